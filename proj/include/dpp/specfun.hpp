#pragma once

#include <complex>
#include <span>

// Special functions used by the kernels: Airy, Bessel J and I, gamma,
// Hermite/Laguerre polynomials and their normalized wave functions, and the
// Gaussian upper tail.
//
// Evaluation regimes (switch points are covered by cross-regime tests):
//   airy         x <= -8      modulus/phase asymptotic expansion
//                -8 < x <= 2  Maclaurin series in extended precision
//                x > 2        e^{-zeta}/pi * int_0^inf e^{-sqrt(x) t^2} cos(t^3/3) dt
//   bessel_j     z <= 16 or |nu| >= z   power series in extended precision
//                z >= max(16, 2 nu^2)   Hankel asymptotic expansion
//                otherwise              Hankel at the fractional order, then
//                                       the three-term order recurrence
//   bessel_i     |z| <= 20    power series
//                |z| > 20     two-exponential asymptotic expansion
namespace dpp::specfun {

struct SpecFunResult {
    double value = 0.0;
    double abs_error_estimate = 0.0;
};

struct AiryValues {
    double ai = 0.0;
    double aip = 0.0;
};

AiryValues airy(double x);

// J_nu(z) for nu > -1, z >= 0.
double bessel_j(double nu, double z);
SpecFunResult bessel_j_detailed(double nu, double z);

// J_nu for any real order (needed for J_{nu-1} in the Bessel kernel).
double bessel_j_any_order(double nu, double z);

// dJ_nu/dz.
double bessel_j_deriv(double nu, double z);

// Modified Bessel function of the first kind, principal branch of z^nu.
std::complex<double> bessel_i(double nu, std::complex<double> z);

// e^{-x} I_nu(x) for real x >= 0.
double bessel_i_scaled(double nu, double x);

// sum_n z^n / (n! Gamma(n+nu+1)), entire in z. Equals (z)^{-nu/2} I_nu(2 sqrt z)
// on the principal branch; for real negative z it is |z|^{-nu/2} J_nu(2 sqrt|z|).
std::complex<double> bessel_i_entire(double nu, std::complex<double> z);
double bessel_i_entire(double nu, double z);

// 1/Gamma(x), zero at the poles.
double rgamma(double x);

// Upper tail of the standard normal: int_a^inf (2 pi)^{-1/2} e^{-x^2/2} dx.
// Named to avoid confusion with the error function.
double gauss_tail(double a);

enum class PolyKind { hermite, laguerre };

// Physicists' Hermite H_k(x) and generalized Laguerre L_k^nu(x) by the
// three-term recurrence. Throws ConvergenceError on overflow.
double hermite(int k, double x);
double laguerre(int k, double nu, double x);
double orthopoly(PolyKind kind, int k, double x, double nu = 0.0);

// phi_k(x) = e^{-x^2/2} H_k(x) / sqrt(sqrt(pi) 2^k k!)
double hermite_function(int k, double x);
// phi_k^nu(x) = sqrt(Gamma(k+1)/Gamma(nu+k+1)) x^{nu/2} L_k^nu(x) e^{-x/2}
double laguerre_function(int k, double nu, double x);

// Fill out[k] = phi_k(x) for k < out.size(), normalized recurrence.
void hermite_functions(double x, std::span<double> out);
void laguerre_functions(double nu, double x, std::span<double> out);

}  // namespace dpp::specfun
