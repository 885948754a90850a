#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "dpp/configuration.hpp"

namespace dpp {

// sign(x)|x|^kappa
double g_kappa(double kappa, double x);

// index k of the half-open cell [g(k), g(k+1)) containing x
long cell_index(double kappa, double x);

// Reference density rho together with the parameters of the set of
// configurations it defines.
struct SpaceParams {
    std::string family = "custom";
    std::function<double(double)> rho;          // density
    std::function<double(double, double)> mass;  // rho([a, b]); filled by the factories
    std::optional<double> total;                 // rho(R) when finite
    double epsilon = 0.5;
    double kappa = 0.5;
    int L0 = 1;
    int m0 = 1;
    double kappa_star = INFINITY;
    double origin = 0.0;  // windows [o, o+L], [o-L, o] and cells o + [g(k), g(k+1))

    static SpaceParams sine(double epsilon, double kappa, int L0, int m0);
    static SpaceParams airy(double epsilon, double kappa, int L0, int m0);
    static SpaceParams bessel(double nu, double epsilon, double kappa, int L0, int m0);
    // rho == 0, total mass 0
    static SpaceParams empty(double epsilon, double kappa, int L0, int m0);
    static SpaceParams custom(std::function<double(double)> rho, double epsilon, double kappa, int L0, int m0);

    void validate() const;
};

enum class Violation { none, total_mass, right_window, left_window, cell };

struct Membership {
    bool member = true;  // up to L_max only
    double L_max = 0.0;
    Violation violation = Violation::none;
    double witness_L = 0.0;  // window violations
    long witness_k = 0;      // cell violation
    double lhs = 0.0;        // |rho - xi| or the cell count
    double rhs = 0.0;        // L^epsilon or m0
};

// The window inequalities are checked at L0, L_max, both one-sided limits at
// every point of the configuration, and on a grid of spacing `step`. For
// constant rho the checked set is exhaustive since |rho - xi| - L^eps is
// convex between jumps.
Membership membership(const Configuration& xi, const SpaceParams& params, double L_max, double step = 1.0 / 64);

std::string violation_name(Violation v);

// Points ordered by nondecreasing |x|; x before -x is broken negative first.
std::vector<double> label_map(const Configuration& xi);
std::vector<double> label_first(const Configuration& xi, std::size_t n);

// count in each occupied cell: (k, count)
std::vector<std::pair<long, std::size_t>> cell_counts(const Configuration& xi, double kappa);

struct PathModulusReport {
    std::size_t max_count = 0;
    long witness_k = 0;
    double witness_time = 0.0;
    // false when some cell asked for a grid finer than the stored times and the
    // nearest stored time stood in
    bool grid_resolved = true;
};

// Max over cells k and grid times t = j/|k|^ell (|k| >= 1, t <= last time) of
// Xi(t, [g(k), g(k+1))). Each grid time is matched to the nearest stored time.
PathModulusReport path_modulus(const std::vector<double>& times, const std::vector<Configuration>& path,
                               double kappa, double ell);

}  // namespace dpp
