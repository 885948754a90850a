#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dpp/fredholm.hpp"
#include "dpp/sampling.hpp"
#include "dpp/sde.hpp"
#include "dpp/static_kernels.hpp"

namespace dpp {

struct EstimatorResult {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t n_samples = 0;
};

// Freedman-Diaconis bin edges for the pooled values, clipped to [lo, hi] when
// lo < hi (otherwise the data range is used).
std::vector<double> freedman_diaconis_edges(std::span<const double> values, double lo = 0.0, double hi = 0.0);

// One-point density estimate: per-bin mean count per configuration divided by
// the bin width, with its standard error.
struct DensityEstimate {
    std::vector<double> edges;
    std::vector<EstimatorResult> bins;
    // mean number of points inside the edges (the integral of the estimate)
    EstimatorResult total;
};

DensityEstimate estimate_rho(const std::vector<std::vector<double>>& configurations, std::vector<double> edges);
// Freedman-Diaconis bins over the pooled points
DensityEstimate estimate_rho(const std::vector<std::vector<double>>& configurations);

// Two-point density on the product grid edges x edges, row-major.
struct PairDensityEstimate {
    std::vector<double> edges;
    std::vector<EstimatorResult> cells;
};
PairDensityEstimate estimate_rho2(const std::vector<std::vector<double>>& configurations, std::vector<double> edges);

// Per-bin (estimate - kernel) / SE.
std::vector<double> kernel_bin_z(const DensityEstimate& est, const StaticKernel& k);

// Fraction of bins whose estimate lies within z standard errors of the
// kernel density integrated over the bin (divided by its width).
double kernel_agreement(const DensityEstimate& est, const StaticKernel& k, double z);

enum class Verdict { satisfied, violated };
std::string verdict_name(Verdict v);

struct BoundCheck {
    double lhs = 0.0;
    double lhs_se = 0.0;
    double rhs = 0.0;
    std::size_t n_samples = 0;
    Verdict verdict = Verdict::satisfied;  // violated means lhs - 3 SE > rhs
};

// E|eta(D) - rho(D)|^{2k} against (3 rho(D))^k with rho(D) from the kernel
BoundCheck check_moment_bound(const EnsembleSpec& ensemble, double a, double b, int k, std::size_t draws,
                              std::uint64_t seed);

// Initial states drawn from the reversible law of a stationary system.
std::vector<double> stationary_initial(const SdeSystem& system, std::uint64_t seed, std::uint64_t index);
// Kernel of the one-point function of the stationary law, in the coordinates of
// the configuration (squares for bessel_ou).
StaticKernel stationary_kernel(const SdeSystem& system);
// Point positions of the configuration: the state itself, or its squares for bessel_ou.
std::vector<double> configuration_coordinates(const SdeSystem& system, std::span<const double> state);

struct DisplacementPoint {
    double T = 0.0;
    double epsilon = 0.0;
    EstimatorResult probability;
    double erf = 0.0;          // upper normal tail at epsilon / sqrt(T)
    double fitted_c = 0.0;     // probability / ((rho(D) v 1) erf)
};

struct DisplacementCheck {
    std::vector<DisplacementPoint> grid;
    double rho_d = 0.0;
    double c_ratio = 0.0;  // max/min fitted C over grid points with a nonzero estimate
    Verdict verdict = Verdict::satisfied;  // violated when c_ratio > 3
    bool root_displacement = false;        // |sqrt X(t) - sqrt X(0)| was used
};

// P(some particle starts in D = [a, b] and moves more than epsilon within [0, T])
// on stationary paths, for every T in `horizons` and epsilon = m sqrt(T) for
// every m in `multipliers`. Half-line systems measure the displacement of sqrt X.
DisplacementCheck check_displacement_tail(const SdeSystem& system, double a, double b,
                                          const std::vector<double>& multipliers, const std::vector<double>& horizons,
                                          std::size_t paths, double dt, std::uint64_t seed);

// F(sum_j phi(x_j)) with phi a smooth bump of half-width `width` at `center`
// and F(u) = u^power.
struct PolynomialFunctional {
    double center = 0.0;
    double width = 1.0;
    int power = 1;
    double operator()(std::span<const double> points) const;
};

struct ReversibilityCheck {
    EstimatorResult forward;   // E f(X0) g(Xt)
    EstimatorResult backward;  // E g(X0) f(Xt)
    EstimatorResult difference;
    Verdict verdict = Verdict::satisfied;  // |difference| <= 3 SE
};

ReversibilityCheck check_reversibility(const SdeSystem& system, const PolynomialFunctional& f,
                                       const PolynomialFunctional& g, double t, std::size_t paths, double dt,
                                       std::uint64_t seed);

struct MultitimeReport {
    double fredholm = 0.0;
    double fredholm_cauchy_gap = 0.0;
    EstimatorResult monte_carlo;
    double quadrature = 0.0;  // one-particle Gaussian oracle; NaN for N > 1
    double z_score = 0.0;
    bool agree = false;       // |fredholm - MC| <= 3 SE, and the oracle within 3 SE for N = 1
};

// Fredholm mgf of the nonequilibrium sine kernel against E exp sum_m f_m(X(t_m))
// over dyson paths started at xi.
MultitimeReport check_multitime_determinant(const Configuration& xi, const std::vector<double>& times,
                                            const std::vector<TestFunction>& functions, std::size_t paths,
                                            double dt, std::uint64_t seed);

// max |a(x,y) - b(x,y)| on an n x n grid of [lo, hi]^2
double scaling_distance(const StaticKernel& a, const StaticKernel& b, double lo, double hi, int n);

}  // namespace dpp
