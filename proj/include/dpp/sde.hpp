#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpp/configuration.hpp"

namespace dpp {

enum class SdeKind { dyson, sqbessel, dyson_ou, airy_drift, airy_ou, sqbessel_ou, bessel_ou };

// dyson:       dX = dB + sum 1/(X_j - X_k) dt
// sqbessel:    dZ = 2 sqrt(Z) dB + 2(nu+1) dt + sum 4Z_j/(Z_j - Z_k) dt
// dyson_ou:    dyson drift - X/(2N)
// airy_drift:  dyson drift + (t/2 - N^{1/3})
// airy_ou:     dyson drift - (Y + 2N^{2/3})/(2N^{1/3})
// sqbessel_ou: sqbessel drift - X/N
// bessel_ou:   dV = dB - V/(2N) + (2nu+1)/(2V) + sum 2V_j/(V_j^2 - V_k^2), reflected at 0
struct SdeSystem {
    SdeKind kind = SdeKind::dyson;
    int n = 0;  // particle count; 0 means "size of the initial vector"
    double nu = 0.0;

    static SdeSystem parse(const std::string& name, int n, double nu);
    std::string name() const;
    bool half_line() const;
    bool squared() const;  // square-root diffusion coefficient
    // drift of particle j at time t, without the explicit time term of airy_drift
    double drift(std::span<const double> x, std::size_t j, double t) const;
    double diffusion(double xj) const;
    // exact integral of the state-independent time-dependent drift over [t, t+h]
    double time_drift_increment(double t, double h) const;
    int particles(std::size_t initial_size) const;
};

struct LabeledPath {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    std::uint64_t seed = 0;
    std::uint64_t path_index = 0;
    double dt = 0.0;
    long substeps = 0;     // accepted substeps
    long rejections = 0;   // halvings
    double min_substep = 0.0;
};

struct IntegrateOptions {
    std::uint64_t path_index = 0;
    // store every k-th grid state; 0 keeps only the initial and final state
    int record_every = 1;
};

// Euler-Maruyama on the grid k*dt up to T, with Brownian-bridge halving when a
// substep breaks the ordering or shrinks a gap below 10% of its current size.
LabeledPath integrate(const SdeSystem& system, std::span<const double> initial, double T, double dt,
                      std::uint64_t seed, const IntegrateOptions& options = {});

// Dyson time change: tau_N(t) = (e^{2 gamma t} - 1)/(2 gamma), gamma = 1/(2N).
double dyson_tau(double t, int n);
// e^{-gamma t} X(tau_N(t)) from the plain dyson state observed at time tau_N(t).
std::vector<double> dyson_time_change(std::span<const double> x_at_tau, double t, int n);

enum class IsdeFamily { isde_sin, isde_ai, isde_j };

struct TruncatedDrift {
    IsdeFamily family = IsdeFamily::isde_sin;
    double r = 1.0;
    std::size_t j = 0;           // tagged index into points
    std::vector<double> points;  // labeled configuration
    double nu = 0.0;
};

// isde_sin: sum_{k != j, |x_k| < r} 1/(x_j - x_k)
// isde_ai:  the same sum minus (2/pi) sqrt(r)
// isde_j:   sum_{k != j, |x_k| < r} 4 x_j/(x_j - x_k) (interaction part only)
double truncated_drift(const TruncatedDrift& td);

std::vector<Configuration> unlabel(const LabeledPath& path);
std::vector<double> relabel(const Configuration& config);

}  // namespace dpp
