#include "dpp/sampling.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "dpp/error.hpp"
#include "dpp/parallel.hpp"
#include "dpp/rng.hpp"

namespace dpp {

namespace {

std::vector<double> standard_gue(int n, Stream& rng) {
    Eigen::MatrixXcd h(n, n);
    const double r = std::sqrt(0.5);
    for (int i = 0; i < n; ++i) {
        h(i, i) = rng.normal();
        for (int j = i + 1; j < n; ++j) {
            const double a = rng.normal(), b = rng.normal();
            h(j, i) = std::complex<double>(r * a, r * b);
            h(i, j) = std::conj(h(j, i));
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    return {ev.data(), ev.data() + n};
}

// Bidiagonal beta = 2 Laguerre model: diagonal chi_{2(n+a)}, ..., chi_{2(a+1)},
// subdiagonal chi_{2(n-1)}, ..., chi_2. Eigenvalues of B B^T have density
// prod |l_i - l_j|^2 prod l^a e^{-l/2}.
std::vector<double> bidiagonal_laguerre(int n, double a, Stream& rng) {
    std::vector<double> d(n), e(n > 1 ? n - 1 : 0);
    for (int i = 0; i < n; ++i) d[i] = rng.chi(2.0 * (n - i + a));
    for (int i = 0; i + 1 < n; ++i) e[i] = rng.chi(2.0 * (n - 1 - i));
    // T = B B^T with B lower bidiagonal
    Eigen::VectorXd diag(n), sub(std::max(n - 1, 0));
    for (int i = 0; i < n; ++i) diag(i) = d[i] * d[i] + (i > 0 ? e[i - 1] * e[i - 1] : 0.0);
    for (int i = 0; i + 1 < n; ++i) sub(i) = d[i] * e[i];
    if (n == 1) return {diag(0)};
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
    const Eigen::VectorXd ev = es.eigenvalues();
    std::vector<double> out(ev.data(), ev.data() + n);
    for (double& v : out) v = std::max(v, 0.0);
    return out;
}

}  // namespace

EnsembleSpec EnsembleSpec::parse(const std::string& family, int n, double nu, const std::string& convention) {
    LaguerreConvention c = LaguerreConvention::kernel;
    if (convention == "half_shift")
        c = LaguerreConvention::half_shift;
    else if (convention != "kernel")
        throw DomainError("unknown Laguerre convention '" + convention + "'");
    if (family == "gue_scaled") return gue_scaled(n);
    if (family == "gue_shifted") return gue_shifted(n);
    if (family == "laguerre") return laguerre(n, nu, c);
    throw DomainError("unknown ensemble family '" + family + "'");
}

void EnsembleSpec::validate() const {
    require_domain(n >= 1, name() + ": N must be >= 1");
    require_domain(n <= 512, name() + ": N above 512 is outside the supported range");
    if (family == EnsembleFamily::laguerre) require_domain(nu > -1.0 && std::isfinite(nu), name() + ": nu must exceed -1");
}

std::string EnsembleSpec::name() const {
    switch (family) {
        case EnsembleFamily::gue_scaled: return "gue_scaled";
        case EnsembleFamily::gue_shifted: return "gue_shifted";
        case EnsembleFamily::laguerre: return "laguerre";
    }
    return "unknown";
}

StaticKernel EnsembleSpec::kernel() const {
    switch (family) {
        case EnsembleFamily::gue_scaled: return StaticKernel::hermite(n);
        case EnsembleFamily::laguerre:
            if (convention == LaguerreConvention::kernel) return StaticKernel::laguerre(n, nu);
            return StaticKernel::laguerre(n, nu + 0.5, 2.0);
        case EnsembleFamily::gue_shifted: break;
    }
    throw DomainError("gue_shifted has no finite-N kernel in this library");
}

std::vector<double> sample_one(const EnsembleSpec& spec, std::uint64_t seed, std::uint64_t index) {
    spec.validate();
    Stream rng(seed, index);
    std::vector<double> x;
    switch (spec.family) {
        case EnsembleFamily::gue_scaled: {
            x = standard_gue(spec.n, rng);
            const double s = std::sqrt(static_cast<double>(spec.n));
            for (double& v : x) v *= s;
            break;
        }
        case EnsembleFamily::gue_shifted: {
            x = standard_gue(spec.n, rng);
            const double shift = std::cbrt(static_cast<double>(spec.n));
            for (double& v : x) v += shift;
            break;
        }
        case EnsembleFamily::laguerre:
            if (spec.convention == LaguerreConvention::kernel) {
                x = bidiagonal_laguerre(spec.n, spec.nu, rng);
                for (double& v : x) v *= spec.n;  // e^{-l/2} -> e^{-x/(2N)}
            } else {
                x = bidiagonal_laguerre(spec.n, spec.nu + 0.5, rng);
            }
            break;
    }
    std::sort(x.begin(), x.end());
    return x;
}

EnsembleSample sample(const EnsembleSpec& spec, std::size_t count, std::uint64_t seed) {
    spec.validate();
    require_domain(count >= 1, "sample: count must be >= 1");
    EnsembleSample out;
    out.spec = spec;
    out.seed = seed;
    out.configurations.resize(count);
    parallel_for(count, [&](std::size_t i) { out.configurations[i] = sample_one(spec, seed, i); });
    return out;
}

double log_density_unnormalized(const EnsembleSpec& spec, std::span<const double> x) {
    spec.validate();
    require_domain(x.size() == static_cast<std::size_t>(spec.n), spec.name() + ": expected N coordinates");
    double lv = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        require_domain(std::isfinite(x[i]), "log_density: coordinates must be finite");
        for (std::size_t j = i + 1; j < x.size(); ++j) {
            const double d = std::abs(x[i] - x[j]);
            if (d == 0.0) return -std::numeric_limits<double>::infinity();
            lv += 2.0 * std::log(d);
        }
    }
    const double N = spec.n;
    double w = 0.0;
    switch (spec.family) {
        case EnsembleFamily::gue_scaled:
            for (double v : x) w -= v * v / (2.0 * N);
            break;
        case EnsembleFamily::gue_shifted: {
            const double c = std::cbrt(N);
            for (double v : x) w -= 0.5 * (v - c) * (v - c);
            break;
        }
        case EnsembleFamily::laguerre: {
            const bool half = spec.convention == LaguerreConvention::half_shift;
            const double a = half ? spec.nu + 0.5 : spec.nu;
            const double rate = half ? 0.5 : 1.0 / (2.0 * N);
            for (double v : x) {
                require_domain(v >= 0.0, "log_density: laguerre coordinates must be >= 0");
                if (v == 0.0) {
                    if (a > 0.0) return -std::numeric_limits<double>::infinity();
                    if (a < 0.0) return std::numeric_limits<double>::infinity();
                    continue;
                }
                w += a * std::log(v) - rate * v;
            }
            break;
        }
    }
    return lv + w;
}

MetropolisResult metropolis(const EnsembleSpec& spec, std::span<const double> initial, long sweeps, double step,
                            std::uint64_t seed, std::uint64_t stream) {
    spec.validate();
    require_domain(step > 0.0, "metropolis: step must be > 0");
    require_domain(sweeps >= 0, "metropolis: sweeps must be >= 0");
    MetropolisResult r;
    r.state.assign(initial.begin(), initial.end());
    double lp = log_density_unnormalized(spec, r.state);
    require_domain(std::isfinite(lp), "metropolis: initial state has zero density");
    Stream rng(seed, stream);
    std::vector<double> trial;
    for (long s = 0; s < sweeps; ++s) {
        for (std::size_t j = 0; j < r.state.size(); ++j) {
            trial = r.state;
            trial[j] += step * rng.normal();
            const double u = rng.uniform();
            ++r.proposals;
            if (spec.half_line() && trial[j] < 0.0) continue;
            const double lq = log_density_unnormalized(spec, trial);
            if (std::log(u) < lq - lp) {
                r.state.swap(trial);
                lp = lq;
                ++r.accepted;
            }
        }
    }
    std::sort(r.state.begin(), r.state.end());
    return r;
}

}  // namespace dpp
