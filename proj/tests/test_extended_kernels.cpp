#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/airy.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dpp/error.hpp"
#include "dpp/extended_kernels.hpp"

using namespace dpp;

namespace {

// (1/pi) int_0^1 e^{-u^2 tau/2} cos(ud) du - p_tau(d), written on the full line
// so that it shares no code with the tail integral used by the library
double sine_backward_oracle(double tau, double d) {
    auto f = [&](double u) { return std::exp(-0.5 * u * u * tau) * std::cos(u * d); };
    const double head = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.0, 1.0, 15, 1e-14);
    const double heat = std::exp(-d * d / (2.0 * tau)) / std::sqrt(2.0 * std::numbers::pi * tau);
    return head / std::numbers::pi - heat;
}

double trapezoid_mass(auto f, double a, double b, int n) {
    const double h = (b - a) / n;
    double s = 0.5 * (f(a) + f(b));
    for (int i = 1; i < n; ++i) s += f(a + i * h);
    return s * h;
}

}  // namespace

TEST_CASE("extended kernels reduce to the static kernel at equal times") {
    const double pts[][2] = {{0.3, 1.7}, {-2.0, 0.5}, {1.0, 1.0}};
    for (auto [x, y] : pts) {
        CHECK(eval_extended(ExtendedKernel::sine(), 0.7, x, 0.7, y) == eval_static(StaticKernel::sine(), x, y));
        CHECK(eval_extended(ExtendedKernel::airy(), 1.2, x, 1.2, y) == eval_static(StaticKernel::airy(), x, y));
    }
    CHECK(eval_extended(ExtendedKernel::bessel(0.5), 2.0, 0.4, 2.0, 1.3) == eval_static(StaticKernel::bessel(0.5), 0.4, 1.3));
}

TEST_CASE("forward integral at zero lag matches the static kernel") {
    const double sp[][2] = {{0.3, 1.7}, {-2.0, 0.5}, {1.0, 1.0}, {0.0, 9.0}};
    for (auto [x, y] : sp) {
        CHECK(std::abs(extended_forward_integral(ExtendedKernel::sine(), 0.0, x, y).value -
                       eval_static(StaticKernel::sine(), x, y)) < 1e-8);
    }
    const double ap[][2] = {{0.3, 1.7}, {-2.0, 0.5}, {-1.0, -1.0}, {-6.0, -3.0}, {2.0, 3.0}};
    for (auto [x, y] : ap) {
        CHECK(std::abs(extended_forward_integral(ExtendedKernel::airy(), 0.0, x, y).value -
                       eval_static(StaticKernel::airy(), x, y)) < 1e-8);
    }
    const double bp[][2] = {{0.3, 1.7}, {2.0, 0.5}, {1.0, 1.0}, {10.0, 4.0}};
    for (double nu : {0.0, 0.5, 2.0, -0.5}) {
        for (auto [x, y] : bp) {
            CHECK(std::abs(extended_forward_integral(ExtendedKernel::bessel(nu), 0.0, x, y).value -
                           eval_static(StaticKernel::bessel(nu), x, y)) < 1e-8);
        }
    }
}

TEST_CASE("extended sine on the diagonal of space at zero lag") {
    CHECK(eval_extended(ExtendedKernel::sine(), 0.0, 2.0, 0.0, 2.0) == doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-14));
    // s < t, d = 0: (1/pi) int_0^1 e^{u^2 tau/2} du, compared against a series
    const double tau = 0.8;
    double series = 0.0, term = 1.0;
    for (int k = 0; k < 40; ++k) {
        series += term / (2 * k + 1);
        term *= 0.5 * tau / (k + 1);
    }
    CHECK(eval_extended(ExtendedKernel::sine(), 0.2, 1.0, 1.0, 1.0) == doctest::Approx(series / std::numbers::pi).epsilon(1e-10));
}

TEST_CASE("extended sine for s > t matches the closed-form oracle") {
    const double cases[][2] = {{0.5, 0.0}, {0.5, 1.3}, {2.0, -4.0}, {0.05, 0.2}, {5.0, 10.0}};
    for (auto [tau, d] : cases) {
        const auto v = eval_extended_detailed(ExtendedKernel::sine(), 1.0 + tau, 0.0, 1.0, d);
        CHECK(v.branch == "s>t");
        CHECK(v.value == doctest::Approx(sine_backward_oracle(tau, d)).epsilon(1e-9));
    }
}

TEST_CASE("extended airy at large forward lag") {
    // e^{-u tau/2} localizes the integral at u = 0, so the kernel behaves like
    // (2/tau) Ai(x) Ai(y); it only vanishes where Ai(x) Ai(y) does
    const double tau = 200.0;
    for (double x : {0.0, -1.5, 2.0}) {
        const double v = eval_extended(ExtendedKernel::airy(), 0.0, x, tau, x);
        // Watson's lemma with f(u) = Ai(x+u)^2 to third order in e = 2/tau
        const double a = boost::math::airy_ai(x), ap = boost::math::airy_ai_prime(x);
        const double e = 2.0 / tau;
        const double series = e * a * a + e * e * 2 * a * ap + e * e * e * (2 * ap * ap + 2 * x * a * a);
        CHECK(std::abs(v - series) < 20 * std::pow(e, 4));
    }
    CHECK(std::abs(eval_extended(ExtendedKernel::airy(), 0.0, 5.0, tau, 5.0)) < 1e-8);
    CHECK(std::abs(eval_extended(ExtendedKernel::airy(), tau, 0.0, 0.0, 0.0)) < 0.02);
}

TEST_CASE("extended airy backward branch against an independent integral") {
    const double lag = 1.5, x = 0.4, y = -0.7;
    auto f = [&](double u) {
        return std::exp(-0.5 * u * lag) * boost::math::airy_ai(x - u) * boost::math::airy_ai(y - u);
    };
    double ref = 0.0;
    for (int p = 0; p < 80; ++p)
        ref += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 0.5 * p, 0.5 * (p + 1), 4, 1e-13);
    CHECK(eval_extended(ExtendedKernel::airy(), 1.0 + lag, x, 1.0, y) == doctest::Approx(-ref).epsilon(1e-8));
}

TEST_CASE("extended bessel backward branch against an independent integral") {
    const double nu = 1.0, lag = 0.3, x = 0.8, y = 1.6;
    auto j = [&](double u, double z) { return boost::math::cyl_bessel_j(nu, 2.0 * std::sqrt(u * z)); };
    auto f = [&](double u) { return std::exp(-2.0 * u * lag) * j(u, x) * j(u, y); };
    double ref = 0.0;
    for (int p = 0; p < 200; ++p)
        ref += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, 1.0 + 0.5 * p, 1.5 + 0.5 * p, 4, 1e-13);
    CHECK(eval_extended(ExtendedKernel::bessel(nu), 1.0 + lag, x, 1.0, y) == doctest::Approx(-ref).epsilon(1e-8));
}

TEST_CASE("extended kernels reject invalid input") {
    CHECK_THROWS_AS(eval_extended(ExtendedKernel::bessel(0.0), 0.0, -1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(eval_extended(ExtendedKernel::bessel(-0.5), 0.0, 0.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(eval_extended(ExtendedKernel::bessel(-1.5), 0.0, 1.0, 1.0, 1.0), DomainError);
    CHECK_THROWS_AS(eval_extended(ExtendedKernel::sine(), 1e-14, 0.0, 0.0, 0.0), ConvergenceError);
}

TEST_CASE("transition densities integrate to one") {
    const TransitionDensity heat{TransitionKind::heat, 0.0};
    const TransitionDensity drift{TransitionKind::drifted, 0.0};
    auto mh = trapezoid_mass([&](double y) { return eval_transition(heat, 0.0, 0.7, 0.3, y); }, -15.0, 15.0, 6000);
    CHECK(mh == doctest::Approx(1.0).epsilon(1e-10));
    auto md = trapezoid_mass([&](double y) { return eval_transition(drift, 0.5, 1.5, 0.3, y); }, -15.0, 15.0, 6000);
    CHECK(md == doctest::Approx(1.0).epsilon(1e-10));
    for (double nu : {0.0, 0.5, 2.0, -0.5}) {
        const TransitionDensity sq{TransitionKind::squared_bessel, nu};
        auto f = [&](double y) { return eval_transition(sq, 0.0, 0.5, 1.0, y); };
        const double m = boost::math::quadrature::exp_sinh<double>().integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-12);
        CHECK(m == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("squared bessel density satisfies Chapman-Kolmogorov") {
    const double nu = 0.0, s = 0.5, t = 0.5, x = 1.0, y = 2.0;
    auto f = [&](double z) { return p_bessel(nu, s, z, x) * p_bessel(nu, t, y, z); };
    const double conv = boost::math::quadrature::exp_sinh<double>().integrate(f, 0.0, std::numeric_limits<double>::infinity(), 1e-13);
    CHECK(conv == doctest::Approx(p_bessel(nu, s + t, y, x)).epsilon(1e-8));
}

TEST_CASE("squared bessel density solves the backward equation") {
    for (double nu : {0.0, 1.5}) {
        const double t = 0.8, x = 1.3, y = 2.1, h = 1e-3;
        auto p = [&](double tt, double xx) { return p_bessel(nu, tt, y, xx); };
        const double dt = (p(t + h, x) - p(t - h, x)) / (2 * h);
        const double dx = (p(t, x + h) - p(t, x - h)) / (2 * h);
        const double dxx = (p(t, x + h) - 2 * p(t, x) + p(t, x - h)) / (h * h);
        CHECK(std::abs(dt - (2 * x * dxx + 2 * (nu + 1) * dx)) < 1e-4);
    }
}

TEST_CASE("squared bessel density from the origin") {
    const double nu = 1.0, t = 0.6, y = 0.9;
    const double closed = y * std::exp(-y / (2 * t)) / std::pow(2 * t, 2);
    CHECK(p_bessel(nu, t, y, 0.0) == doctest::Approx(closed).epsilon(1e-13));
    CHECK(p_bessel(nu, t, y, 1e-9) == doctest::Approx(closed).epsilon(1e-6));
    CHECK(p_bessel(0.0, t, 0.0, 0.7) == doctest::Approx(std::exp(-0.7 / (2 * t)) / (2 * t)));
    CHECK(p_bessel(1.0, t, 0.0, 0.7) == 0.0);
    CHECK_THROWS_AS(p_bessel(-0.5, t, 0.0, 0.7), DomainError);
}

TEST_CASE("drifted density is a shifted heat kernel") {
    const TransitionDensity drift{TransitionKind::drifted, 0.0};
    const double s = 0.4, t = 1.1, x = -0.2, y = 0.9;
    const double q = eval_transition(drift, s, t, x, y);
    const double tau = t - s;
    const double d = (y - t * t / 4) - (x - s * s / 4);
    CHECK(q == doctest::Approx(std::exp(-d * d / (2 * tau)) / std::sqrt(2 * std::numbers::pi * tau)).epsilon(1e-14));
    CHECK_THROWS_AS(eval_transition(drift, s, s, x, y), DomainError);
}

TEST_CASE("complex heat kernel agrees with the real one on the real axis") {
    const auto z = p_sin(0.7, std::complex<double>(0.3, 0.0), std::complex<double>(-1.1, 0.0));
    CHECK(z.real() == doctest::Approx(p_sin(0.7, 0.3, -1.1)).epsilon(1e-15));
    CHECK(z.imag() == 0.0);
}
