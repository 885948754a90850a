#pragma once

#include <complex>
#include <string>

#include "dpp/configuration.hpp"

namespace dpp {

using cplx = std::complex<double>;

// G(u, p) = (1 - u) exp(u + u^2/2 + ... + u^p/p).
cplx weierstrass_g(cplx u, int p);

// prod over support points x != z of G((w - z)/(x - z), 0)^{mult(x)}.
cplx phi_0(const Configuration& config, cplx z, cplx w);

enum class NonEqFamily { sine, airy_prelimit, bessel };

struct NonEqKernelSpec {
    NonEqFamily family = NonEqFamily::sine;
    Configuration base;
    double nu = 0.0;  // bessel only
    int n = 0;        // airy_prelimit: N of rho_hat^N; 0 means base.total()

    static NonEqKernelSpec sine(Configuration c);
    static NonEqKernelSpec airy_prelimit(Configuration c, int n = 0);
    static NonEqKernelSpec bessel(Configuration c, double nu);

    int airy_n() const;
    // int rho_hat^N(v)/v dv = -N^{1/3}
    double airy_drift() const;
    void validate() const;
    std::string name() const;
};

struct NonEqValue {
    double value = 0.0;
    double imag = 0.0;
    double truncation = 0.0;  // W (sine, airy) or |u| bound (bessel)
    int nodes = 0;
};

NonEqValue eval_noneq_detailed(const NonEqKernelSpec& spec, double s, double x, double t, double y);
double eval_noneq(const NonEqKernelSpec& spec, double s, double x, double t, double y);

struct CrossCheck {
    double residue_value = 0.0;
    double contour_value = 0.0;
};

// Evaluates the integral term twice: by the residue sum and by trapezoid
// quadrature on circles around every configuration point. The heat term
// -1(s>t)p(s-t, x|y) is left out of both.
CrossCheck contour_crosscheck(const NonEqKernelSpec& spec, double s, double x, double t, double y,
                              int circle_nodes = 64);

// rho_hat^N(x) = (1/pi) sqrt(-x(1 + x/(4N^{2/3}))) on (-4N^{2/3}, 0].
double rho_hat(int n, double x);

// Truncated M_A at level L: int_{0<|x|<L} rho_hat(x)/x dx - sum_{0<|x_j|<L} 1/x_j
// with rho_hat(x) = sqrt(-x)/pi 1(x<0).
double m_airy(const Configuration& config, double L);

}  // namespace dpp
