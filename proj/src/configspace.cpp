#include "dpp/configspace.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "dpp/error.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/static_kernels.hpp"

namespace dpp {

double g_kappa(double kappa, double x) {
    require_domain(kappa > 0.0, "g_kappa: kappa must be > 0");
    if (x == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(x), kappa), x);
}

long cell_index(double kappa, double x) {
    require_domain(std::isfinite(x), "cell_index: x must be finite");
    long k = static_cast<long>(std::floor(g_kappa(1.0 / kappa, x)));
    while (g_kappa(kappa, static_cast<double>(k)) > x) --k;
    while (g_kappa(kappa, static_cast<double>(k + 1)) <= x) ++k;
    return k;
}

namespace {

std::function<double(double, double)> kernel_mass(const StaticKernel& k) {
    return [k](double a, double b) {
        if (k.half_line()) {
            a = std::max(a, 0.0);
            if (b <= a) return 0.0;
        }
        auto diag = [k](double x) { return eval_static(k, x, x); };
        if (k.half_line() && a == 0.0) return quad::integrate_endpoint_singular(diag, a, b, 1e-8).value;
        return quad::integrate_adaptive(diag, a, b, 1e-10 * std::max(1.0, b - a)).value;
    };
}

SpaceParams base(std::string family, double epsilon, double kappa, int L0, int m0, double kappa_star) {
    SpaceParams p;
    p.family = std::move(family);
    p.epsilon = epsilon;
    p.kappa = kappa;
    p.L0 = L0;
    p.m0 = m0;
    p.kappa_star = kappa_star;
    return p;
}

}  // namespace

SpaceParams SpaceParams::sine(double epsilon, double kappa, int L0, int m0) {
    auto p = base("sine", epsilon, kappa, L0, m0, 1.0);
    p.rho = [](double) { return 1.0 / std::numbers::pi; };
    p.mass = [](double a, double b) { return (b - a) / std::numbers::pi; };
    return p;
}

SpaceParams SpaceParams::airy(double epsilon, double kappa, int L0, int m0) {
    auto p = base("airy", epsilon, kappa, L0, m0, 2.0 / 3.0);
    const auto k = StaticKernel::airy();
    p.rho = [k](double x) { return eval_static(k, x, x); };
    p.mass = kernel_mass(k);
    return p;
}

SpaceParams SpaceParams::bessel(double nu, double epsilon, double kappa, int L0, int m0) {
    auto p = base("bessel", epsilon, kappa, L0, m0, 2.0);
    const auto k = StaticKernel::bessel(nu);
    k.validate();
    p.rho = [k](double x) { return x > 0.0 ? eval_static(k, x, x) : 0.0; };
    p.mass = kernel_mass(k);
    return p;
}

SpaceParams SpaceParams::empty(double epsilon, double kappa, int L0, int m0) {
    auto p = base("empty", epsilon, kappa, L0, m0, INFINITY);
    p.rho = [](double) { return 0.0; };
    p.mass = [](double, double) { return 0.0; };
    p.total = 0.0;
    return p;
}

SpaceParams SpaceParams::custom(std::function<double(double)> rho, double epsilon, double kappa, int L0, int m0) {
    auto p = base("custom", epsilon, kappa, L0, m0, INFINITY);
    p.rho = rho;
    p.mass = [rho](double a, double b) { return quad::integrate_adaptive(rho, a, b, 1e-10 * std::max(1.0, b - a)).value; };
    return p;
}

void SpaceParams::validate() const {
    require_domain(static_cast<bool>(rho) && static_cast<bool>(mass), "space params: density is missing");
    require_domain(epsilon > 0.0 && epsilon < 1.0, "space params: epsilon must lie in (0, 1)");
    require_domain(kappa > 0.0 && kappa < kappa_star, "space params: kappa must lie in (0, kappa_star)");
    require_domain(L0 >= 1 && m0 >= 1, "space params: L0 and m0 must be positive integers");
    require_domain(std::isfinite(origin), "space params: origin must be finite");
}

std::string violation_name(Violation v) {
    switch (v) {
        case Violation::none: return "none";
        case Violation::total_mass: return "total_mass";
        case Violation::right_window: return "right_window";
        case Violation::left_window: return "left_window";
        case Violation::cell: return "cell";
    }
    return "unknown";
}

namespace {

struct Candidate {
    double L;
    bool left_limit;  // exclude the points sitting exactly at the window edge
};

// side = +1: window [o, o+L]; side = -1: window [o-L, o]
bool check_side(const Configuration& xi, const SpaceParams& p, double L_max, double step, int side, Membership& out) {
    const double o = p.origin;
    std::vector<Candidate> cand;
    cand.push_back({static_cast<double>(p.L0), false});
    cand.push_back({L_max, false});
    for (double L = p.L0 + step; L < L_max; L += step) cand.push_back({L, false});
    for (const auto& a : xi.atoms()) {
        const double L = side * (a.x - o);
        if (L >= p.L0 && L <= L_max) {
            cand.push_back({L, true});
            cand.push_back({L, false});
        }
    }
    std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
        return a.L < b.L || (a.L == b.L && a.left_limit > b.left_limit);
    });
    double prevL = 0.0, cum = 0.0;
    for (const auto& c : cand) {
        if (c.L != prevL) {
            cum += side > 0 ? p.mass(o + prevL, o + c.L) : p.mass(o - c.L, o - prevL);
            prevL = c.L;
        }
        double n = side > 0 ? static_cast<double>(xi.count_closed(o, o + c.L))
                            : static_cast<double>(xi.count_closed(o - c.L, o));
        if (c.left_limit)
            for (const auto& a : xi.atoms())
                if (a.x == o + side * c.L) n -= a.mult;
        const double lhs = std::abs(cum - n), rhs = std::pow(c.L, p.epsilon);
        if (lhs > rhs) {
            out.member = false;
            out.violation = side > 0 ? Violation::right_window : Violation::left_window;
            out.witness_L = c.L;
            out.lhs = lhs;
            out.rhs = rhs;
            return false;
        }
    }
    return true;
}

}  // namespace

Membership membership(const Configuration& xi, const SpaceParams& params, double L_max, double step) {
    params.validate();
    require_domain(L_max >= params.L0, "membership: L_max must be >= L0");
    require_domain(step > 0.0, "membership: step must be > 0");
    Membership out;
    out.L_max = L_max;
    if (params.total && static_cast<double>(xi.total()) != *params.total) {
        out.member = false;
        out.violation = Violation::total_mass;
        out.lhs = static_cast<double>(xi.total());
        out.rhs = *params.total;
        return out;
    }
    if (!check_side(xi, params, L_max, step, +1, out)) return out;
    if (!check_side(xi, params, L_max, step, -1, out)) return out;
    for (const auto& [k, n] : cell_counts(xi.shifted(-params.origin), params.kappa)) {
        if (n > static_cast<std::size_t>(params.m0)) {
            out.member = false;
            out.violation = Violation::cell;
            out.witness_k = k;
            out.lhs = static_cast<double>(n);
            out.rhs = params.m0;
            return out;
        }
    }
    return out;
}

std::vector<double> label_map(const Configuration& xi) {
    auto pts = xi.points();
    std::stable_sort(pts.begin(), pts.end(), [](double a, double b) {
        const double fa = std::abs(a), fb = std::abs(b);
        if (fa != fb) return fa < fb;
        return a < b;
    });
    return pts;
}

std::vector<double> label_first(const Configuration& xi, std::size_t n) {
    auto l = label_map(xi);
    require_domain(n <= l.size(), "label_first: configuration has fewer than n points");
    l.resize(n);
    return l;
}

std::vector<std::pair<long, std::size_t>> cell_counts(const Configuration& xi, double kappa) {
    std::map<long, std::size_t> m;
    for (const auto& a : xi.atoms()) m[cell_index(kappa, a.x)] += static_cast<std::size_t>(a.mult);
    return {m.begin(), m.end()};
}

PathModulusReport path_modulus(const std::vector<double>& times, const std::vector<Configuration>& path, double kappa,
                               double ell) {
    require_domain(times.size() == path.size(), "path_modulus: one time per configuration");
    require_domain(kappa > 0.0 && ell >= 0.0, "path_modulus: need kappa > 0 and ell >= 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        require_domain(times[i] > times[i - 1], "path_modulus: times must be increasing");
    PathModulusReport r;
    if (path.empty()) return r;

    std::map<long, std::vector<std::size_t>> per_cell;  // k -> count at each stored time
    for (std::size_t i = 0; i < path.size(); ++i)
        for (const auto& [k, n] : cell_counts(path[i], kappa)) {
            auto& v = per_cell[k];
            if (v.empty()) v.assign(path.size(), 0);
            v[i] = n;
        }
    double min_dt = INFINITY;
    for (std::size_t i = 1; i < times.size(); ++i) min_dt = std::min(min_dt, times[i] - times[i - 1]);
    const double T = times.back();

    for (const auto& [k, counts] : per_cell) {
        const double m = std::pow(static_cast<double>(std::max(std::labs(k), 1L)), ell);
        auto consider = [&](std::size_t i) {
            if (counts[i] > r.max_count) {
                r.max_count = counts[i];
                r.witness_k = k;
                r.witness_time = times[i];
            }
        };
        if (1.0 / m < min_dt) {
            r.grid_resolved = false;
            for (std::size_t i = 0; i < counts.size(); ++i)
                if (times[i] > 0.0) consider(i);
            continue;
        }
        for (long j = 1; j / m <= T * (1 + 1e-12); ++j) {
            const double t = j / m;
            auto it = std::lower_bound(times.begin(), times.end(), t);
            std::size_t i = static_cast<std::size_t>(it - times.begin());
            if (i == times.size() || (i > 0 && t - times[i - 1] < times[i] - t)) --i;
            consider(i);
        }
    }
    return r;
}

}  // namespace dpp
