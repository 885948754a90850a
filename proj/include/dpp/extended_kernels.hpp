#pragma once

#include <complex>
#include <string>

#include "dpp/static_kernels.hpp"

namespace dpp {

enum class ExtendedFamily { sine, airy, bessel };

struct ExtendedKernel {
    ExtendedFamily family = ExtendedFamily::sine;
    double nu = 0.0;

    static ExtendedKernel sine() { return {ExtendedFamily::sine, 0.0}; }
    static ExtendedKernel airy() { return {ExtendedFamily::airy, 0.0}; }
    static ExtendedKernel bessel(double nu) { return {ExtendedFamily::bessel, nu}; }

    StaticKernel equal_time() const;
    bool half_line() const { return family == ExtendedFamily::bessel; }
    std::string name() const;
};

// Value plus quadrature metadata. `truncation` is the finite limit that
// replaced an infinite one (0 when none was needed).
struct ExtendedValue {
    double value = 0.0;
    double abs_error = 0.0;
    double truncation = 0.0;
    int panels = 0;
    std::string branch;
};

ExtendedValue eval_extended_detailed(const ExtendedKernel& k, double s, double x, double t, double y);
double eval_extended(const ExtendedKernel& k, double s, double x, double t, double y);

// The s < t integral representation at lag tau = t - s >= 0. At tau = 0 it
// reproduces the static kernel, which the equal-time branch never exercises.
ExtendedValue extended_forward_integral(const ExtendedKernel& k, double tau, double x, double y);

// ---- transition densities ----

// p_sin(t, x|y) = (2 pi |t|)^{-1/2} exp(-(x-y)^2/(2t)), t != 0.
double p_sin(double t, double x, double y);
std::complex<double> p_sin(double t, std::complex<double> x, std::complex<double> y);

// p^(nu)(t, y|x): squared Bessel density from x to y over time t > 0.
double p_bessel(double nu, double t, double y, double x);

enum class TransitionKind { heat, drifted, squared_bessel };

struct TransitionDensity {
    TransitionKind kind = TransitionKind::heat;
    double nu = 0.0;
};

// Density of moving from `from` at time s to `to` at time t. The t = s
// delta mass has no numerical value; asking for it is a domain error.
double eval_transition(const TransitionDensity& td, double s, double t, double from, double to);

}  // namespace dpp
