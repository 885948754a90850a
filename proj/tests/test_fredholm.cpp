#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "dpp/error.hpp"
#include "dpp/fredholm.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/sampling.hpp"
#include "dpp/stats.hpp"

using namespace dpp;

namespace {

// 1 - int K + (1/2) int int (K(x,x)K(y,y) - K(x,y)^2), the first three terms
// of the Fredholm series of det(I - K).
double two_term_series(const StaticKernel& k, double a, double b) {
    const auto r = quad::gauss_legendre(40, a, b);
    double t1 = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
        t1 += r.weights[i] * eval_static(k, r.nodes[i], r.nodes[i]);
        for (std::size_t j = 0; j < r.size(); ++j) {
            const double kij = eval_static(k, r.nodes[i], r.nodes[j]);
            t2 += r.weights[i] * r.weights[j] *
                  (eval_static(k, r.nodes[i], r.nodes[i]) * eval_static(k, r.nodes[j], r.nodes[j]) - kij * kij);
        }
    }
    return 1.0 - t1 + 0.5 * t2;
}

double gauss(double var, double x) { return std::exp(-x * x / (2 * var)) / std::sqrt(2 * std::numbers::pi * var); }

}  // namespace

TEST_CASE("sine gap probability on a short interval") {
    const auto k = StaticKernel::sine();
    const auto r = gap_probability_detailed(k, 0.0, 0.1);
    CHECK(std::abs(r.value - (1.0 - 0.1 / std::numbers::pi)) < 1e-4);
    CHECK(std::abs(r.value - two_term_series(k, 0.0, 0.1)) < 1e-8);
    CHECK(r.cauchy_gap <= 1e-8);
    CHECK(gap_probability(k, 0.3, 0.3) == 1.0);
}

TEST_CASE("gap probability decreases with the interval") {
    const auto k = StaticKernel::sine();
    double prev = 1.0;
    for (double s : {0.5, 1.0, 2.0, 3.0}) {
        const double g = gap_probability(k, 0.0, s);
        CHECK(g < prev);
        CHECK(g > 0.0);
        prev = g;
    }
    for (auto kk : {StaticKernel::airy(), StaticKernel::bessel(0.5), StaticKernel::hermite(6)}) {
        const double g = gap_probability(kk, 0.0, 1.0);
        CHECK(g > 0.0);
        CHECK(g < 1.0);
    }
}

TEST_CASE("zero test functions give exactly one") {
    FredholmProblem p;
    p.kernel = ExtendedKernel::sine();
    p.times = {0.0, 1.0};
    p.functions = {TestFunction::zero(), TestFunction::zero()};
    CHECK(mgf(p) == 1.0);
    p.functions = {TestFunction::indicator(-1, 1, 0.0), TestFunction::log_linear(0, 1, 0.0, 0.0)};
    CHECK(mgf(p) == 1.0);
}

TEST_CASE("single-time mgf with z = -1 is the gap probability") {
    for (auto k : {StaticKernel::sine(), StaticKernel::airy(), StaticKernel::hermite(5)}) {
        FredholmProblem p;
        p.kernel = k;
        p.times = {0.0};
        p.functions = {TestFunction::indicator(-0.5, 0.7, -1.0)};
        CHECK(std::abs(mgf(p) - gap_probability(k, -0.5, 0.7)) < 1e-9);
    }
}

TEST_CASE("derivative at z = 0 is the expected count") {
    const auto k = StaticKernel::airy();
    const double a = -1.0, b = 0.5, h = 1e-4;
    FredholmProblem p;
    p.kernel = k;
    p.times = {0.0};
    p.functions = {TestFunction::indicator(a, b, h)};
    const double up = mgf(p);
    p.functions = {TestFunction::indicator(a, b, -h)};
    const double down = mgf(p);
    const double mass = quad::integrate_adaptive([&](double x) { return eval_static(k, x, x); }, a, b, 1e-12).value;
    CHECK(std::abs((up - down) / (2 * h) - mass) < 1e-6);
}

TEST_CASE("mgf of real test functions is positive") {
    FredholmProblem p;
    p.kernel = ExtendedKernel::sine();
    p.times = {0.0, 0.4};
    for (double c : {-3.0, -0.5, 0.5, 2.0}) {
        p.functions = {TestFunction::log_linear(-1, 1, c, 0.3), TestFunction::from_function([c](double x) { return c * std::cos(x); }, -2, 2, 9)};
        CHECK(mgf(p) > 0.0);
    }
}

TEST_CASE("a trailing zero function collapses the block structure") {
    FredholmProblem one;
    one.kernel = ExtendedKernel::bessel(0.5);
    one.times = {0.2};
    one.functions = {TestFunction::indicator(0.5, 2.0, -0.6)};
    FredholmProblem two = one;
    two.times = {0.2, 0.9};
    two.functions.push_back(TestFunction::zero());
    CHECK(std::abs(mgf(one) - mgf(two)) < 1e-9);
}

TEST_CASE("finite GUE: Fredholm determinant matches sampled expectation") {
    const auto spec = EnsembleSpec::gue_scaled(8);
    const double a = -2.0, b = 1.0, z = -0.4;
    FredholmProblem p;
    p.kernel = spec.kernel();
    p.times = {0.0};
    p.functions = {TestFunction::indicator(a, b, z)};
    const double det = mgf(p);
    const auto s = sample(spec, 20000, 21);
    MeanEstimator est;
    for (const auto& x : s.configurations) {
        double prod = 1.0;
        for (double v : x)
            if (v >= a && v <= b) prod *= 1.0 + z;
        est.add(prod);
    }
    CHECK(std::abs(est.mean() - det) < 3 * est.se());
}

TEST_CASE("one Brownian particle: two-time mgf matches nested Gaussian quadrature") {
    const double s = 0.5, t = 1.0;
    const auto f1 = TestFunction::from_function([](double x) { return 0.7 * std::exp(-x * x); }, -1.5, 1.5, 9);
    const auto f2 = TestFunction::indicator(-0.3, 1.2, -0.5);
    FredholmProblem p;
    p.kernel = NonEqKernelSpec::sine(Configuration::from_points({0.0}));
    p.times = {s, t};
    p.functions = {f1, f2};
    p.nodes = 8;
    const double det = mgf(p);

    // E[(1 + chi1(B_s))(1 + chi2(B_t))] with B_0 = 0
    const auto r1 = quad::composite_gauss_legendre(20, -1.5, 1.5, 8);
    const auto r2 = quad::gauss_legendre(40, -0.3, 1.2);
    double e1 = 0, e2 = 0, e12 = 0;
    for (std::size_t i = 0; i < r1.size(); ++i) e1 += r1.weights[i] * gauss(s, r1.nodes[i]) * f1.chi(r1.nodes[i]);
    for (std::size_t j = 0; j < r2.size(); ++j) e2 += r2.weights[j] * gauss(t, r2.nodes[j]) * f2.chi(r2.nodes[j]);
    for (std::size_t i = 0; i < r1.size(); ++i)
        for (std::size_t j = 0; j < r2.size(); ++j)
            e12 += r1.weights[i] * r2.weights[j] * gauss(s, r1.nodes[i]) * f1.chi(r1.nodes[i]) *
                   gauss(t - s, r2.nodes[j] - r1.nodes[i]) * f2.chi(r2.nodes[j]);
    CHECK(std::abs(det - (1 + e1 + e2 + e12)) < 1e-6);
}

TEST_CASE("test function encodings") {
    const auto ind = TestFunction::indicator(0, 1, -1.0);
    CHECK(ind.chi(0.5) == -1.0);
    CHECK(std::isinf(ind.f(0.5)));
    CHECK(ind.chi(1.5) == 0.0);
    const auto ll = TestFunction::log_linear(0, 2, 0.1, 0.5);
    CHECK(ll.f(1.0) == doctest::Approx(0.6));
    CHECK(ll.chi(1.0) == doctest::Approx(std::expm1(0.6)));
    const auto sm = TestFunction::sampled(0, 3, {0.0, 1.0, 4.0, 9.0});
    CHECK(sm.f(1.0) == doctest::Approx(1.0));
    CHECK(sm.f(2.0) == doctest::Approx(4.0));
    CHECK(sm.f(-1.0) == 0.0);
    CHECK(sm.breakpoints().size() == 4);
    CHECK_THROWS_AS(TestFunction::indicator(0, 1, -1.5), DomainError);
    CHECK_THROWS_AS(TestFunction::sampled(0, 1, {1.0, 2.0}), DomainError);
    CHECK_THROWS_AS(TestFunction::indicator(1, 0, 0.5), DomainError);
}

TEST_CASE("invalid problems") {
    FredholmProblem p;
    p.kernel = StaticKernel::sine();
    p.times = {0.0, 1.0};
    p.functions = {TestFunction::indicator(0, 1, -0.5), TestFunction::zero()};
    CHECK_THROWS_AS(mgf(p), DomainError);
    p.kernel = ExtendedKernel::sine();
    p.times = {1.0, 0.5};
    CHECK_THROWS_AS(mgf(p), DomainError);
    p.times = {0.0};
    CHECK_THROWS_AS(mgf(p), DomainError);
    p.kernel = ExtendedKernel::bessel(0.0);
    p.times = {0.0, 1.0};
    p.functions = {TestFunction::indicator(-1, 1, -0.5), TestFunction::zero()};
    CHECK_THROWS_AS(mgf(p), DomainError);
    CHECK_THROWS_AS(gap_probability(StaticKernel::bessel(0.0), -1.0, 1.0), DomainError);
    CHECK_THROWS_AS(gap_probability(StaticKernel::sine(), 0.0, 1.0, 2), DomainError);
}

TEST_CASE("node doubling that cannot settle is a convergence error") {
    FredholmProblem p;
    p.kernel = StaticKernel::sine();
    p.times = {0.0};
    p.functions = {TestFunction::indicator(0, 30, -1.0)};
    p.nodes = 2;
    p.max_nodes = 8;
    CHECK_THROWS_AS(mgf(p), ConvergenceError);
}
