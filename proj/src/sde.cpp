#include "dpp/sde.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dpp/error.hpp"
#include "dpp/rng.hpp"

namespace dpp {

namespace {

constexpr double kGapFraction = 0.1;
constexpr double kCollapse = 0x1p-40;

struct Stepper {
    const SdeSystem& sys;
    double dt;
    Stream& rng;
    LabeledPath& path;
    std::vector<double> proposal;

    bool reflecting() const { return sys.half_line() && sys.nu < 0.0; }

    bool propose(const std::vector<double>& x, double t, double h, const std::vector<double>& dB) {
        const std::size_t n = x.size();
        const double time_inc = sys.time_drift_increment(t, h);
        proposal.resize(n);
        for (std::size_t j = 0; j < n; ++j)
            proposal[j] = x[j] + sys.drift(x, j, t) * h + time_inc + sys.diffusion(x[j]) * dB[j];
        if (sys.half_line()) {
            if (reflecting()) {
                for (double& v : proposal) v = std::abs(v);
            } else if (proposal[0] < kGapFraction * x[0] || proposal[0] <= 0.0) {
                // for nu >= 0 the origin is repelling; treat it like a neighbor
                return false;
            }
        }
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(proposal[j])) return false;
        for (std::size_t j = 1; j < n; ++j) {
            const double gap = proposal[j] - proposal[j - 1];
            if (!(gap > 0.0) || gap < kGapFraction * (x[j] - x[j - 1])) return false;
        }
        return true;
    }

    void advance(std::vector<double>& x, double t, double h, const std::vector<double>& dB) {
        if (propose(x, t, h, dB)) {
            x.swap(proposal);
            ++path.substeps;
            path.min_substep = std::min(path.min_substep, h);
            return;
        }
        const double half = 0.5 * h;
        if (half < dt * kCollapse)
            throw ConvergenceError(sys.name() + ": substep collapsed below dt*2^-40 near t=" + std::to_string(t));
        ++path.rejections;
        const double sd = std::sqrt(0.5 * half);  // bridge midpoint sd = sqrt(h/4)
        std::vector<double> first(dB.size()), second(dB.size());
        for (std::size_t j = 0; j < dB.size(); ++j) {
            first[j] = 0.5 * dB[j] + sd * rng.normal();
            second[j] = dB[j] - first[j];
        }
        advance(x, t, half, first);
        advance(x, t + half, half, second);
    }
};

}  // namespace

SdeSystem SdeSystem::parse(const std::string& name, int n, double nu) {
    static const std::pair<const char*, SdeKind> names[] = {
        {"dyson", SdeKind::dyson},         {"sqbessel", SdeKind::sqbessel},
        {"dyson_ou", SdeKind::dyson_ou},   {"airy_drift", SdeKind::airy_drift},
        {"airy_ou", SdeKind::airy_ou},     {"sqbessel_ou", SdeKind::sqbessel_ou},
        {"bessel_ou", SdeKind::bessel_ou}};
    for (const auto& [s, k] : names)
        if (name == s) return {k, n, nu};
    throw DomainError("unknown SDE system '" + name + "'");
}

std::string SdeSystem::name() const {
    switch (kind) {
        case SdeKind::dyson: return "dyson";
        case SdeKind::sqbessel: return "sqbessel";
        case SdeKind::dyson_ou: return "dyson_ou";
        case SdeKind::airy_drift: return "airy_drift";
        case SdeKind::airy_ou: return "airy_ou";
        case SdeKind::sqbessel_ou: return "sqbessel_ou";
        case SdeKind::bessel_ou: return "bessel_ou";
    }
    return "unknown";
}

bool SdeSystem::half_line() const {
    return kind == SdeKind::sqbessel || kind == SdeKind::sqbessel_ou || kind == SdeKind::bessel_ou;
}

bool SdeSystem::squared() const { return kind == SdeKind::sqbessel || kind == SdeKind::sqbessel_ou; }

int SdeSystem::particles(std::size_t initial_size) const { return n > 0 ? n : static_cast<int>(initial_size); }

double SdeSystem::drift(std::span<const double> x, std::size_t j, double) const {
    const double xj = x[j];
    const double N = static_cast<double>(x.size());
    double s = 0.0;
    switch (kind) {
        case SdeKind::dyson:
        case SdeKind::dyson_ou:
        case SdeKind::airy_drift:
        case SdeKind::airy_ou:
            for (std::size_t k = 0; k < x.size(); ++k)
                if (k != j) s += 1.0 / (xj - x[k]);
            if (kind == SdeKind::dyson_ou) s -= xj / (2.0 * N);
            if (kind == SdeKind::airy_drift) s -= std::cbrt(N);
            if (kind == SdeKind::airy_ou) s -= (xj + 2.0 * std::pow(N, 2.0 / 3.0)) / (2.0 * std::cbrt(N));
            return s;
        case SdeKind::sqbessel:
        case SdeKind::sqbessel_ou:
            for (std::size_t k = 0; k < x.size(); ++k)
                if (k != j) s += 4.0 * xj / (xj - x[k]);
            s += 2.0 * (nu + 1.0);
            if (kind == SdeKind::sqbessel_ou) s -= xj / N;
            return s;
        case SdeKind::bessel_ou:
            for (std::size_t k = 0; k < x.size(); ++k)
                if (k != j) s += 2.0 * xj / (xj * xj - x[k] * x[k]);
            return s - xj / (2.0 * N) + (2.0 * nu + 1.0) / (2.0 * xj);
    }
    return 0.0;
}

double SdeSystem::diffusion(double xj) const { return squared() ? 2.0 * std::sqrt(std::max(xj, 0.0)) : 1.0; }

double SdeSystem::time_drift_increment(double t, double h) const {
    if (kind != SdeKind::airy_drift) return 0.0;
    return 0.25 * ((t + h) * (t + h) - t * t);
}

LabeledPath integrate(const SdeSystem& system, std::span<const double> initial, double T, double dt,
                      std::uint64_t seed, const IntegrateOptions& options) {
    require_domain(!initial.empty(), "integrate: empty initial state");
    require_domain(dt > 0.0 && std::isfinite(dt), "integrate: dt must be > 0");
    require_domain(T >= 0.0 && std::isfinite(T), "integrate: horizon must be >= 0");
    require_domain(options.record_every >= 0, "integrate: record_every must be >= 0");
    if (system.n > 0)
        require_domain(static_cast<std::size_t>(system.n) == initial.size(),
                       system.name() + ": initial state must have N entries");
    if (system.half_line()) require_domain(system.nu > -1.0, system.name() + ": nu must exceed -1");
    for (std::size_t j = 0; j < initial.size(); ++j) {
        require_domain(std::isfinite(initial[j]), "integrate: initial state must be finite");
        if (j > 0) require_domain(initial[j] > initial[j - 1], "integrate: initial state must be strictly increasing");
    }
    if (system.half_line()) require_domain(initial[0] >= 0.0, system.name() + ": initial state must be >= 0");
    if (system.kind == SdeKind::bessel_ou) require_domain(initial[0] > 0.0, "bessel_ou: initial state must be > 0");

    LabeledPath path;
    path.seed = seed;
    path.path_index = options.path_index;
    path.dt = dt;
    path.min_substep = dt;
    Stream rng(seed, options.path_index);
    Stepper stepper{system, dt, rng, path, {}};

    std::vector<double> x(initial.begin(), initial.end());
    path.times.push_back(0.0);
    path.states.push_back(x);
    const long steps = static_cast<long>(std::ceil(T / dt - 1e-9));
    std::vector<double> dB(x.size());
    for (long k = 0; k < steps; ++k) {
        const double t = k * dt;
        const double h = std::min(dt, T - t);
        const double sd = std::sqrt(h);
        for (double& b : dB) b = sd * rng.normal();
        stepper.advance(x, t, h, dB);
        const bool last = k + 1 == steps;
        if (last || (options.record_every > 0 && (k + 1) % options.record_every == 0)) {
            path.times.push_back(last ? T : (k + 1) * dt);
            path.states.push_back(x);
        }
    }
    return path;
}

double dyson_tau(double t, int n) {
    require_domain(n >= 1, "dyson_tau: N must be >= 1");
    const double g = 1.0 / (2.0 * n);
    return std::expm1(2.0 * g * t) / (2.0 * g);
}

std::vector<double> dyson_time_change(std::span<const double> x_at_tau, double t, int n) {
    require_domain(n >= 1, "dyson_time_change: N must be >= 1");
    const double f = std::exp(-t / (2.0 * n));
    std::vector<double> out(x_at_tau.begin(), x_at_tau.end());
    for (double& v : out) v *= f;
    return out;
}

double truncated_drift(const TruncatedDrift& td) {
    require_domain(td.r > 0.0, "truncated_drift: radius must be > 0");
    require_domain(td.j < td.points.size(), "truncated_drift: tagged index out of range");
    const double xj = td.points[td.j];
    require_domain(std::abs(xj) < td.r, "truncated_drift: tagged particle must lie inside the radius");
    if (td.family == IsdeFamily::isde_j) {
        require_domain(td.nu > -1.0, "truncated_drift: nu must exceed -1");
        for (double v : td.points) require_domain(v >= 0.0, "truncated_drift: isde_j needs nonnegative points");
    }
    double s = 0.0;
    for (std::size_t k = 0; k < td.points.size(); ++k) {
        if (k == td.j || !(std::abs(td.points[k]) < td.r)) continue;
        const double d = xj - td.points[k];
        if (d == 0.0) throw DomainError("truncated_drift: another particle coincides with the tagged one");
        s += td.family == IsdeFamily::isde_j ? 4.0 * xj / d : 1.0 / d;
    }
    if (td.family == IsdeFamily::isde_ai) s -= 2.0 / std::numbers::pi * std::sqrt(td.r);
    return s;
}

std::vector<Configuration> unlabel(const LabeledPath& path) {
    std::vector<Configuration> out;
    out.reserve(path.states.size());
    for (const auto& s : path.states) out.push_back(Configuration::from_points(s));
    return out;
}

std::vector<double> relabel(const Configuration& config) { return config.points(); }

}  // namespace dpp
