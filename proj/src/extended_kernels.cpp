#include "dpp/extended_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dpp/error.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/specfun.hpp"

namespace dpp {

namespace {

constexpr double kTol = 1e-10;     // internal target, well inside the 1e-8 contract
constexpr double kTailTol = 1e-12; // bound on discarded tail mass
constexpr double kMaxLimit = 1e7;

double airy_envelope(double z) {
    if (z > 0.0) {
        const double e = std::exp(-2.0 / 3.0 * z * std::sqrt(z)) / (2.0 * std::sqrt(std::numbers::pi) * std::pow(z, 0.25));
        return std::min(0.54, e);
    }
    if (z > -1.0) return 0.54;
    return 1.1 * std::pow(-z, -0.25) / std::sqrt(std::numbers::pi);
}

int oscillation_panels(double length, double frequency) {
    const double n = std::ceil(length * (frequency + 1.0) / std::numbers::pi);
    return static_cast<int>(std::clamp(n, 1.0, 2e5));
}

void require_limit(double upper, const char* what) {
    if (!(upper < kMaxLimit) || !std::isfinite(upper))
        throw ConvergenceError(std::string(what) + ": truncation point cannot be established (time lag too small)");
}

// ---- sine ----

ExtendedValue sine_forward(double tau, double d) {
    auto f = [&](double u) { return std::exp(0.5 * u * u * tau) * std::cos(u * d); };
    const int panels = oscillation_panels(1.0, std::abs(d));
    const auto r = quad::integrate_adaptive(f, 0.0, 1.0, kTol * std::numbers::pi, panels);
    return {r.value / std::numbers::pi, r.abs_error / std::numbers::pi, 0.0, panels, "s<t"};
}

ExtendedValue sine_backward(double lag, double d) {
    // -(1/pi) int_1^inf e^{-u^2 lag/2} cos(u d) du; tail beyond U is below
    // e^{-U^2 lag/2}/(U lag)
    double U = 1.0;
    while (std::exp(-0.5 * U * U * lag) / (U * lag) > kTailTol) {
        U = std::max(2.0 * U, U + 1.0);
        require_limit(U, "extended sine kernel");
    }
    auto f = [&](double v) {
        const double u = v + 1.0;
        return std::exp(-0.5 * u * u * lag) * std::cos(u * d);
    };
    const double width = std::numbers::pi / (std::abs(d) + 1.0);
    const int panels = static_cast<int>(std::clamp(std::ceil((U - 1.0) / width), 1.0, 2e5));
    const auto r = quad::integrate_adaptive(f, 0.0, U - 1.0, kTol * std::numbers::pi, panels);
    return {-r.value / std::numbers::pi, r.abs_error / std::numbers::pi + kTailTol, U, panels, "s>t"};
}

// ---- airy ----

ExtendedValue airy_forward(double tau, double x, double y) {
    // int_0^inf e^{-u tau/2} Ai(u+x) Ai(u+y) du
    double U = std::max({0.0, -x, -y}) + 1.0;
    while (true) {
        const double bound = std::exp(-0.5 * U * tau) * airy_envelope(U + x) * airy_envelope(U + y);
        if (bound < 1e-17 && U + std::min(x, y) > 1.0) break;
        U += 1.0;
        require_limit(U, "extended airy kernel");
    }
    auto f = [&](double u) {
        return std::exp(-0.5 * u * tau) * specfun::airy(u + x).ai * specfun::airy(u + y).ai;
    };
    const double depth = std::max({0.0, -x, -y});
    const int panels = oscillation_panels(U, std::sqrt(depth));
    const auto r = quad::integrate_adaptive(f, 0.0, U, kTol, panels);
    return {r.value, r.abs_error + 1e-16, U, panels, tau == 0.0 ? "integral at tau=0" : "s<t"};
}

ExtendedValue airy_backward(double lag, double x, double y) {
    // -int_{-inf}^0 e^{u lag/2} Ai(u+x) Ai(u+y) du with the envelope bound
    // |Ai| <= 0.54 giving tail <= 0.3 (2/lag) e^{-U lag/2}
    double U = 1.0;
    while (0.3 * (2.0 / lag) * std::exp(-0.5 * U * lag) > kTailTol) {
        U *= 1.5;
        require_limit(U, "extended airy kernel");
    }
    auto f = [&](double v) {
        const double u = -v;
        return std::exp(0.5 * u * lag) * specfun::airy(u + x).ai * specfun::airy(u + y).ai;
    };
    const double depth = U + std::max(std::abs(x), std::abs(y));
    const int panels = oscillation_panels(U, std::sqrt(depth));
    const auto r = quad::integrate_adaptive(f, 0.0, U, kTol, panels);
    return {-r.value, r.abs_error + kTailTol, -U, panels, "s>t"};
}

// ---- bessel ----

double jroot(double nu, double u, double x) {
    if (x == 0.0 || u == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    return specfun::bessel_j(nu, 2.0 * std::sqrt(u * x));
}

ExtendedValue bessel_forward(double nu, double tau, double x, double y) {
    // int_0^1 e^{2u tau} J(2 sqrt(ux)) J(2 sqrt(uy)) du; u^nu at 0 goes to tanh-sinh
    auto f = [&](double u) { return std::exp(2.0 * u * tau) * jroot(nu, u, x) * jroot(nu, u, y); };
    const double split = std::min(1.0, 1.0 / (1.0 + x + y));
    double value = 0.0, err = 0.0;
    if (nu == std::floor(nu) && nu >= 0.0) {
        const auto r = quad::integrate_adaptive(f, 0.0, split, kTol);
        value = r.value;
        err = r.abs_error;
    } else {
        const auto r = quad::integrate_endpoint_singular(f, 0.0, split, kTol);
        value = r.value;
        err = r.abs_error;
    }
    int panels = 1;
    if (split < 1.0) {
        panels = oscillation_panels(1.0 - split, 2.0 * (std::sqrt(x) + std::sqrt(y)));
        const auto r = quad::integrate_adaptive(f, split, 1.0, kTol, panels);
        value += r.value;
        err += r.abs_error;
    }
    return {value, err, 0.0, panels + 1, tau == 0.0 ? "integral at tau=0" : "s<t"};
}

ExtendedValue bessel_backward(double nu, double lag, double x, double y) {
    // -int_1^inf e^{-2u lag} J J du, u = w^2; |J| <= 1 bounds the tail by
    // e^{-2 W^2 lag}/(2 lag)
    double W = 1.0;
    while (std::exp(-2.0 * W * W * lag) / (2.0 * lag) > kTailTol) {
        W *= 1.25;
        require_limit(W, "extended bessel kernel");
    }
    auto f = [&](double w) {
        const double u = w * w;
        return 2.0 * w * std::exp(-2.0 * u * lag) * jroot(nu, u, x) * jroot(nu, u, y);
    };
    const double width = std::numbers::pi / (2.0 * (std::sqrt(x) + std::sqrt(y)) + 1.0);
    const int panels = static_cast<int>(std::clamp(std::ceil((W - 1.0) / width), 1.0, 2e5));
    const auto r = quad::integrate_adaptive(f, 1.0, W, kTol, panels);
    return {-r.value, r.abs_error + kTailTol, W * W, panels, "s>t"};
}

void check_args(const ExtendedKernel& k, double x, double y) {
    require_domain(std::isfinite(x) && std::isfinite(y), "extended kernel arguments must be finite");
    if (k.family == ExtendedFamily::bessel) {
        require_domain(k.nu > -1.0, "extended bessel kernel: nu must exceed -1");
        require_domain(x >= 0.0 && y >= 0.0, "extended bessel kernel: coordinates must be >= 0");
        if (k.nu < 0.0 && (x == 0.0 || y == 0.0))
            throw DomainError("extended bessel kernel is unbounded at the origin for nu < 0");
    }
}

}  // namespace

StaticKernel ExtendedKernel::equal_time() const {
    switch (family) {
        case ExtendedFamily::sine: return StaticKernel::sine();
        case ExtendedFamily::airy: return StaticKernel::airy();
        case ExtendedFamily::bessel: return StaticKernel::bessel(nu);
    }
    return StaticKernel::sine();
}

std::string ExtendedKernel::name() const {
    switch (family) {
        case ExtendedFamily::sine: return "ext_sine";
        case ExtendedFamily::airy: return "ext_airy";
        case ExtendedFamily::bessel: return "ext_bessel";
    }
    return "unknown";
}

ExtendedValue extended_forward_integral(const ExtendedKernel& k, double tau, double x, double y) {
    check_args(k, x, y);
    require_domain(tau >= 0.0 && std::isfinite(tau), "forward lag must be >= 0");
    switch (k.family) {
        case ExtendedFamily::sine: return sine_forward(tau, y - x);
        case ExtendedFamily::airy: return airy_forward(tau, x, y);
        case ExtendedFamily::bessel: return bessel_forward(k.nu, tau, x, y);
    }
    throw DomainError("unknown extended family");
}

ExtendedValue eval_extended_detailed(const ExtendedKernel& k, double s, double x, double t, double y) {
    check_args(k, x, y);
    require_domain(s >= 0.0 && t >= 0.0 && std::isfinite(s) && std::isfinite(t), "times must be finite and >= 0");
    if (s == t) {
        ExtendedValue v;
        v.value = eval_static(k.equal_time(), x, y);
        v.branch = "s=t";
        return v;
    }
    if (s < t) return extended_forward_integral(k, t - s, x, y);
    const double lag = s - t;
    switch (k.family) {
        case ExtendedFamily::sine: return sine_backward(lag, y - x);
        case ExtendedFamily::airy: return airy_backward(lag, x, y);
        case ExtendedFamily::bessel: return bessel_backward(k.nu, lag, x, y);
    }
    throw DomainError("unknown extended family");
}

double eval_extended(const ExtendedKernel& k, double s, double x, double t, double y) {
    return eval_extended_detailed(k, s, x, t, y).value;
}

double p_sin(double t, double x, double y) {
    require_domain(t != 0.0 && std::isfinite(t), "p_sin: t = 0 is the delta branch");
    const double d = x - y;
    return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * std::abs(t));
}

std::complex<double> p_sin(double t, std::complex<double> x, std::complex<double> y) {
    require_domain(t != 0.0 && std::isfinite(t), "p_sin: t = 0 is the delta branch");
    const std::complex<double> d = x - y;
    return std::exp(-d * d / (2.0 * t)) / std::sqrt(2.0 * std::numbers::pi * std::abs(t));
}

double p_bessel(double nu, double t, double y, double x) {
    require_domain(nu > -1.0, "p_bessel: nu must exceed -1");
    require_domain(t != 0.0 && std::isfinite(t), "p_bessel: t = 0 is the delta branch");
    require_domain(x >= 0.0 && y >= 0.0, "p_bessel: real-mode arguments must be >= 0");
    const double at = std::abs(t);
    if (x < 1e-12) {
        if (y == 0.0) {
            if (nu < 0.0) throw DomainError("p_bessel: density is unbounded at 0 for nu < 0");
            return nu == 0.0 ? 1.0 / (2.0 * at) : 0.0;
        }
        return std::exp(nu * std::log(y) - (nu + 1.0) * std::log(2.0 * at) - std::lgamma(nu + 1.0) - y / (2.0 * t));
    }
    if (y == 0.0) {
        if (nu < 0.0) throw DomainError("p_bessel: density is unbounded at 0 for nu < 0");
        return nu == 0.0 ? std::exp(-x / (2.0 * t)) / (2.0 * at) : 0.0;
    }
    // e^{-(x+y)/2t} I_nu(z) = e^{expo} * e^{-z} I_nu(z), z = sqrt(xy)/|t|
    const double z = std::sqrt(x * y) / at;
    const double expo = t > 0.0 ? -std::pow(std::sqrt(x) - std::sqrt(y), 2) / (2.0 * t)
                                : std::pow(std::sqrt(x) + std::sqrt(y), 2) / (2.0 * at);
    return std::exp(0.5 * nu * std::log(y / x) + expo) * specfun::bessel_i_scaled(nu, z) / (2.0 * at);
}

double eval_transition(const TransitionDensity& td, double s, double t, double from, double to) {
    require_domain(s != t, "transition density at equal times is a delta mass");
    switch (td.kind) {
        case TransitionKind::heat: return p_sin(t - s, to, from);
        case TransitionKind::drifted: return p_sin(t - s, to - 0.25 * t * t, from - 0.25 * s * s);
        case TransitionKind::squared_bessel: return p_bessel(td.nu, t - s, to, from);
    }
    throw DomainError("unknown transition kind");
}

}  // namespace dpp
