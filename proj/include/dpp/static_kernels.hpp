#pragma once

#include <span>
#include <string>

namespace dpp {

enum class StaticFamily { sine, airy, bessel, hermite_n, laguerre_n };

// Equal-time correlation kernel. For the finite-N Laguerre kernel
//   K(x,y) = (1/c) sum_{k<N} phi_k^nu(x/c) phi_k^nu(y/c)
// `scale` is c; 0 selects the default c = 2N.
struct StaticKernel {
    StaticFamily family = StaticFamily::sine;
    int n = 0;
    double nu = 0.0;
    double scale = 0.0;

    static StaticKernel sine() { return {StaticFamily::sine, 0, 0.0, 0.0}; }
    static StaticKernel airy() { return {StaticFamily::airy, 0, 0.0, 0.0}; }
    static StaticKernel bessel(double nu) { return {StaticFamily::bessel, 0, nu, 0.0}; }
    static StaticKernel hermite(int n) { return {StaticFamily::hermite_n, n, 0.0, 0.0}; }
    static StaticKernel laguerre(int n, double nu, double scale = 0.0) {
        return {StaticFamily::laguerre_n, n, nu, scale};
    }

    bool half_line() const { return family == StaticFamily::bessel || family == StaticFamily::laguerre_n; }
    bool finite_n() const { return family == StaticFamily::hermite_n || family == StaticFamily::laguerre_n; }
    double laguerre_scale() const { return scale > 0.0 ? scale : 2.0 * n; }
    std::string name() const;
    void validate() const;
};

// |x - y| below this switches to the expansion about the midpoint.
double near_diagonal_width(double x);

double eval_static(const StaticKernel& k, double x, double y);

// det[K(x_i, x_j)]; exactly 0 if two points coincide.
double rho_m(const StaticKernel& k, std::span<const double> points);

// Integral of K(x,x) for the finite-N kernels (equals N).
double total_mass(const StaticKernel& k);

// Support window [lo, hi] outside which K(x,x) of a finite-N kernel is
// below 1e-12 relative to its bulk.
struct Window {
    double lo = 0.0;
    double hi = 0.0;
};
Window effective_support(const StaticKernel& k);

}  // namespace dpp
