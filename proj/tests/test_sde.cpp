#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "dpp/error.hpp"
#include "dpp/rng.hpp"
#include "dpp/sde.hpp"
#include "dpp/stats.hpp"

using namespace dpp;

namespace {

// Drifts written out term by term from the equations, independent of the
// switch in SdeSystem::drift.
double reference_drift(SdeKind kind, const std::vector<double>& x, std::size_t j, double nu) {
    const double N = static_cast<double>(x.size());
    double pair = 0.0, pair4 = 0.0, pairv = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        if (k == j) continue;
        pair += 1.0 / (x[j] - x[k]);
        pair4 += 4.0 * x[j] / (x[j] - x[k]);
        pairv += 2.0 * x[j] / (x[j] * x[j] - x[k] * x[k]);
    }
    switch (kind) {
        case SdeKind::dyson: return pair;
        case SdeKind::sqbessel: return 2 * (nu + 1) + pair4;
        case SdeKind::dyson_ou: return pair - x[j] / (2 * N);
        case SdeKind::airy_drift: return pair - std::pow(N, 1.0 / 3);
        case SdeKind::airy_ou: return pair - (x[j] + 2 * std::pow(N, 2.0 / 3)) / (2 * std::pow(N, 1.0 / 3));
        case SdeKind::sqbessel_ou: return 2 * (nu + 1) + pair4 - x[j] / N;
        case SdeKind::bessel_ou: return pairv - x[j] / (2 * N) + (2 * nu + 1) / (2 * x[j]);
    }
    return NAN;
}

}  // namespace

TEST_CASE("philox known-answer vectors") {
    const auto a = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(a == std::array<std::uint32_t, 4>{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    const auto b = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(b == std::array<std::uint32_t, 4>{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
}

TEST_CASE("streams are reproducible and independent") {
    Stream a(42, 7), b(42, 7), c(42, 8);
    bool differs = false;
    for (int i = 0; i < 100; ++i) {
        const double u = a.uniform();
        CHECK(u == b.uniform());
        CHECK(u > 0.0);
        CHECK(u < 1.0);
        differs |= u != c.uniform();
    }
    CHECK(differs);
    MeanEstimator m, v;
    Stream s(1, 0);
    for (int i = 0; i < 200000; ++i) {
        const double z = s.normal();
        m.add(z);
        v.add(z * z);
    }
    CHECK(std::abs(m.mean()) < 4 * m.se());
    CHECK(std::abs(v.mean() - 1.0) < 4 * v.se());
    MeanEstimator chi;
    for (int i = 0; i < 20000; ++i) chi.add(s.chi_square(3.0));
    CHECK(std::abs(chi.mean() - 3.0) < 4 * chi.se());
}

TEST_CASE("drifts match the equations at random states") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.1, 5.0);
    const SdeKind kinds[] = {SdeKind::dyson,   SdeKind::sqbessel,    SdeKind::dyson_ou, SdeKind::airy_drift,
                             SdeKind::airy_ou, SdeKind::sqbessel_ou, SdeKind::bessel_ou};
    for (auto kind : kinds) {
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> x(5);
            for (double& v : x) v = u(rng);
            std::sort(x.begin(), x.end());
            const SdeSystem sys{kind, 0, 0.3};
            for (std::size_t j = 0; j < x.size(); ++j)
                CHECK(sys.drift(x, j, 0.7) == doctest::Approx(reference_drift(kind, x, j, 0.3)).epsilon(1e-13));
        }
    }
    const SdeSystem airy{SdeKind::airy_drift, 0, 0.0};
    CHECK(airy.time_drift_increment(0.4, 0.1) == doctest::Approx(0.5 * 0.4 * 0.1 + 0.01 / 4).epsilon(1e-14));
}

TEST_CASE("single Brownian particle variance") {
    const SdeSystem sys = SdeSystem::parse("dyson", 0, 0.0);
    MeanEstimator v;
    const double x0[] = {0.3};
    for (std::uint64_t p = 0; p < 20000; ++p) {
        const auto path = integrate(sys, x0, 0.5, 0.05, 11, {p, 0});
        const double d = path.states.back()[0] - x0[0];
        v.add(d * d);
    }
    CHECK(std::abs(v.mean() - 0.5) < 3 * v.se());
}

TEST_CASE("two-particle gap second moment") {
    const SdeSystem sys = SdeSystem::parse("dyson", 0, 0.0);
    const double x0[] = {-0.25, 0.25};
    MeanEstimator g;
    for (std::uint64_t p = 0; p < 20000; ++p) {
        const auto path = integrate(sys, x0, 0.5, 1e-2, 5, {p, 0});
        const double gap = path.states.back()[1] - path.states.back()[0];
        g.add(gap * gap);
    }
    CHECK(std::abs(g.mean() - (0.25 + 3.0)) < 3 * g.se());
}

TEST_CASE("squared Bessel mean growth") {
    const SdeSystem sys = SdeSystem::parse("sqbessel", 0, 0.5);
    const double x0[] = {0.7};
    MeanEstimator m;
    for (std::uint64_t p = 0; p < 20000; ++p) m.add(integrate(sys, x0, 0.5, 1e-2, 9, {p, 0}).states.back()[0]);
    CHECK(std::abs(m.mean() - (0.7 + 2 * 1.5 * 0.5)) < 3 * m.se());
}

TEST_CASE("paths never collide") {
    const SdeSystem sys = SdeSystem::parse("dyson_ou", 8, 0.0);
    std::vector<double> x0{-3.5, -2.5, -1.5, -0.5, 0.5, 1.5, 2.5, 3.5};
    long violations = 0;
    for (std::uint64_t p = 0; p < 200; ++p) {
        const auto path = integrate(sys, x0, 1.0, 1e-3, 21, {p, 1});
        for (const auto& s : path.states)
            for (std::size_t j = 1; j < s.size(); ++j) violations += !(s[j] > s[j - 1]);
    }
    CHECK(violations == 0);
}

TEST_CASE("drifted Dyson model is a pathwise shift") {
    const double x0[] = {-1.0, 0.2, 1.5};
    const auto dyson = integrate(SdeSystem::parse("dyson", 0, 0.0), x0, 1.0, 1e-3, 77, {3, 1});
    const auto airy = integrate(SdeSystem::parse("airy_drift", 0, 0.0), x0, 1.0, 1e-3, 77, {3, 1});
    REQUIRE(dyson.states.size() == airy.states.size());
    REQUIRE(dyson.rejections == airy.rejections);
    const double c = std::cbrt(3.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < dyson.states.size(); ++i) {
        const double t = dyson.times[i];
        for (std::size_t j = 0; j < 3; ++j)
            worst = std::max(worst, std::abs(airy.states[i][j] - (dyson.states[i][j] + t * t / 4 - c * t)));
    }
    CHECK(worst < 1e-12);
}

TEST_CASE("time change links the Dyson model and its OU version") {
    const int N = 3;
    const double x0[] = {-1.0, 0.0, 1.2};
    const double T = 1.0;
    const SdeSystem plain = SdeSystem::parse("dyson", 0, 0.0);
    const SdeSystem ou = SdeSystem::parse("dyson_ou", N, 0.0);
    MeanEstimator a[3], b[3];
    auto functionals = [](const std::vector<double>& x, double out[3]) {
        out[0] = x[2];
        out[1] = x[0] * x[0] + x[1] * x[1] + x[2] * x[2];
        out[2] = x[2] - x[0];
    };
    for (std::uint64_t p = 0; p < 10000; ++p) {
        double f[3];
        const auto px = integrate(plain, x0, dyson_tau(T, N), 5e-3, 31, {p, 0});
        functionals(dyson_time_change(px.states.back(), T, N), f);
        for (int i = 0; i < 3; ++i) a[i].add(f[i]);
        const auto py = integrate(ou, x0, T, 5e-3, 32, {p, 0});
        functionals(py.states.back(), f);
        for (int i = 0; i < 3; ++i) b[i].add(f[i]);
    }
    for (int i = 0; i < 3; ++i) CHECK(z_score(a[i].mean(), a[i].se(), b[i].mean(), b[i].se()) < 3.0);
}

TEST_CASE("reflecting wall and hard edge") {
    const double v0[] = {0.05, 0.6, 1.3, 2.0};
    for (double nu : {-0.5, 0.5}) {
        const SdeSystem sys{SdeKind::bessel_ou, 4, nu};
        double lowest = INFINITY;
        for (std::uint64_t p = 0; p < 100; ++p) {
            const auto path = integrate(sys, v0, 1.0, 1e-3, 41, {p, 1});
            for (const auto& s : path.states) lowest = std::min(lowest, s[0]);
        }
        CHECK(lowest >= 0.0);
        if (nu >= 0.0) CHECK(lowest > 0.0);
    }
}

TEST_CASE("integration is deterministic and validates its input") {
    const double x0[] = {0.0, 1.0};
    const SdeSystem sys = SdeSystem::parse("dyson", 0, 0.0);
    const auto a = integrate(sys, x0, 0.3, 1e-2, 5, {2, 1});
    const auto b = integrate(sys, x0, 0.3, 1e-2, 5, {2, 1});
    CHECK(a.states == b.states);
    CHECK(a.times.size() == 31);
    CHECK(a.times.back() == 0.3);
    const double tie[] = {1.0, 1.0};
    CHECK_THROWS_AS(integrate(sys, tie, 0.3, 1e-2, 5), DomainError);
    const double neg[] = {-0.1, 1.0};
    CHECK_THROWS_AS(integrate(SdeSystem::parse("sqbessel", 0, 0.0), neg, 0.3, 1e-2, 5), DomainError);
    CHECK_THROWS_AS(integrate(sys, x0, 0.3, 0.0, 5), DomainError);
    CHECK_THROWS_AS(SdeSystem::parse("brownian", 0, 0.0), DomainError);
}

TEST_CASE("time change helper") {
    CHECK(dyson_tau(0.0, 4) == 0.0);
    const double g = 1.0 / 8;
    CHECK(dyson_tau(1.5, 4) == doctest::Approx((std::exp(2 * g * 1.5) - 1) / (2 * g)).epsilon(1e-14));
    const std::vector<double> x{1.0, 2.0};
    const auto y = dyson_time_change(x, 2.0, 4);
    CHECK(y[1] == doctest::Approx(2.0 * std::exp(-0.25)).epsilon(1e-15));
}

TEST_CASE("truncated ISDE drifts") {
    std::vector<double> lattice{0.0};
    for (int k = 1; k <= 6; ++k) {
        lattice.push_back(k);
        lattice.push_back(-k);
    }
    CHECK(truncated_drift({IsdeFamily::isde_sin, 6.0, 0, lattice, 0.0}) == doctest::Approx(0.0));
    CHECK(truncated_drift({IsdeFamily::isde_sin, 6.5, 0, lattice, 0.0}) == doctest::Approx(0.0));
    for (double r : {1.0, 4.0, 50.0})
        CHECK(truncated_drift({IsdeFamily::isde_ai, r, 0, {0.0}, 0.0}) == doctest::Approx(-2.0 / std::numbers::pi * std::sqrt(r)).epsilon(1e-15));
    CHECK(truncated_drift({IsdeFamily::isde_j, 10.0, 0, {0.4, 1.7}, 0.5}) == doctest::Approx(4 * 0.4 / (0.4 - 1.7)));
    CHECK_THROWS_AS(truncated_drift({IsdeFamily::isde_sin, 3.0, 0, {0.5, 0.5}, 0.0}), DomainError);
    CHECK_THROWS_AS(truncated_drift({IsdeFamily::isde_sin, 0.3, 0, {0.5}, 0.0}), DomainError);
}

TEST_CASE("unlabel and relabel") {
    const double x0[] = {-1.0, 0.5, 2.0};
    const auto path = integrate(SdeSystem::parse("dyson", 0, 0.0), x0, 0.1, 1e-2, 3);
    const auto configs = unlabel(path);
    REQUIRE(configs.size() == path.states.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        CHECK(configs[i].total() == 3);
        CHECK(configs[i].simple());
        CHECK(relabel(configs[i]) == path.states[i]);
    }
}
