#include "dpp/validate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpp/error.hpp"
#include "dpp/parallel.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/rng.hpp"
#include "dpp/specfun.hpp"
#include "dpp/stats.hpp"

namespace dpp {

namespace {

EstimatorResult to_result(const MeanEstimator& m, double scale = 1.0) {
    return {m.mean() * scale, m.se() * scale, m.count()};
}

double kernel_mass(const StaticKernel& k, double a, double b) {
    if (k.half_line()) a = std::max(a, 0.0);
    if (b <= a) return 0.0;
    auto diag = [&](double x) { return eval_static(k, x, x); };
    if (k.half_line() && a == 0.0) return quad::integrate_endpoint_singular(diag, a, b, 1e-8).value;
    return quad::integrate_adaptive(diag, a, b, 1e-10 * std::max(1.0, b - a), 8).value;
}

std::size_t count_in(std::span<const double> x, double a, double b) {
    std::size_t n = 0;
    for (double v : x) n += (v >= a && v <= b);
    return n;
}

Verdict bound_verdict(double lhs, double se, double rhs) { return lhs - 3.0 * se > rhs ? Verdict::violated : Verdict::satisfied; }

}  // namespace

std::vector<double> freedman_diaconis_edges(std::span<const double> values, double lo, double hi) {
    require_domain(values.size() >= 2, "freedman_diaconis: need at least two values");
    std::vector<double> v(values.begin(), values.end());
    std::sort(v.begin(), v.end());
    auto q = [&](double p) {
        const double pos = p * (v.size() - 1);
        const auto i = static_cast<std::size_t>(pos);
        const double f = pos - i;
        return i + 1 < v.size() ? v[i] * (1 - f) + v[i + 1] * f : v[i];
    };
    if (!(lo < hi)) {
        lo = v.front();
        hi = v.back();
    }
    require_domain(lo < hi, "freedman_diaconis: values have zero spread");
    double h = 2.0 * (q(0.75) - q(0.25)) / std::cbrt(static_cast<double>(v.size()));
    if (!(h > 0.0)) h = (hi - lo) / 10.0;
    const int bins = std::clamp(static_cast<int>(std::ceil((hi - lo) / h)), 1, 1000);
    std::vector<double> edges(bins + 1);
    for (int i = 0; i <= bins; ++i) edges[i] = i == bins ? hi : lo + (hi - lo) * i / bins;
    return edges;
}

DensityEstimate estimate_rho(const std::vector<std::vector<double>>& configurations, std::vector<double> edges) {
    require_domain(edges.size() >= 2, "estimate_rho: need at least one bin");
    for (std::size_t i = 1; i < edges.size(); ++i)
        require_domain(edges[i] > edges[i - 1], "estimate_rho: edges must increase");
    require_domain(configurations.size() >= 2, "estimate_rho: need at least two configurations");
    const std::size_t nb = edges.size() - 1;
    std::vector<MeanEstimator> est(nb);
    MeanEstimator total;
    std::vector<int> counts(nb);
    for (const auto& x : configurations) {
        std::fill(counts.begin(), counts.end(), 0);
        int inside = 0;
        for (double v : x) {
            if (v < edges.front() || v >= edges.back()) continue;
            const auto it = std::upper_bound(edges.begin(), edges.end(), v);
            ++counts[static_cast<std::size_t>(it - edges.begin()) - 1];
            ++inside;
        }
        for (std::size_t b = 0; b < nb; ++b) est[b].add(counts[b]);
        total.add(inside);
    }
    DensityEstimate out;
    out.edges = std::move(edges);
    out.total = to_result(total);
    for (std::size_t b = 0; b < nb; ++b) out.bins.push_back(to_result(est[b], 1.0 / (out.edges[b + 1] - out.edges[b])));
    return out;
}

DensityEstimate estimate_rho(const std::vector<std::vector<double>>& configurations) {
    std::vector<double> pooled;
    for (const auto& x : configurations) pooled.insert(pooled.end(), x.begin(), x.end());
    auto edges = freedman_diaconis_edges(pooled);
    edges.back() = std::nextafter(edges.back(), INFINITY);  // keep the maximum inside the last bin
    return estimate_rho(configurations, std::move(edges));
}

PairDensityEstimate estimate_rho2(const std::vector<std::vector<double>>& configurations, std::vector<double> edges) {
    require_domain(edges.size() >= 2, "estimate_rho2: need at least one bin");
    require_domain(configurations.size() >= 2, "estimate_rho2: need at least two configurations");
    const std::size_t nb = edges.size() - 1;
    std::vector<MeanEstimator> est(nb * nb);
    std::vector<int> bin_of;
    std::vector<int> counts(nb * nb);
    for (const auto& x : configurations) {
        bin_of.assign(x.size(), -1);
        for (std::size_t i = 0; i < x.size(); ++i) {
            if (x[i] < edges.front() || x[i] >= edges.back()) continue;
            bin_of[i] = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), x[i]) - edges.begin()) - 1;
        }
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::size_t j = 0; j < x.size(); ++j)
                if (i != j && bin_of[i] >= 0 && bin_of[j] >= 0) ++counts[bin_of[i] * nb + bin_of[j]];
        for (std::size_t c = 0; c < counts.size(); ++c) est[c].add(counts[c]);
    }
    PairDensityEstimate out;
    out.edges = std::move(edges);
    for (std::size_t a = 0; a < nb; ++a)
        for (std::size_t b = 0; b < nb; ++b) {
            const double area = (out.edges[a + 1] - out.edges[a]) * (out.edges[b + 1] - out.edges[b]);
            out.cells.push_back(to_result(est[a * nb + b], 1.0 / area));
        }
    return out;
}

std::vector<double> kernel_bin_z(const DensityEstimate& est, const StaticKernel& k) {
    std::vector<double> z(est.bins.size());
    for (std::size_t b = 0; b < est.bins.size(); ++b) {
        const double lo = est.edges[b], hi = est.edges[b + 1];
        const double diff = est.bins[b].estimate - kernel_mass(k, lo, hi) / (hi - lo);
        const double se = est.bins[b].std_error;
        z[b] = std::abs(diff) <= 1e-12 ? 0.0 : se > 0.0 ? diff / se : std::copysign(INFINITY, diff);
    }
    return z;
}

double kernel_agreement(const DensityEstimate& est, const StaticKernel& k, double z) {
    const auto zs = kernel_bin_z(est, k);
    const auto good = std::count_if(zs.begin(), zs.end(), [&](double v) { return std::abs(v) <= z; });
    return static_cast<double>(good) / static_cast<double>(zs.size());
}

std::string verdict_name(Verdict v) { return v == Verdict::satisfied ? "satisfied" : "violated-beyond-3SE"; }

BoundCheck check_moment_bound(const EnsembleSpec& ensemble, double a, double b, int k, std::size_t draws,
                              std::uint64_t seed) {
    require_domain(k >= 1 && k <= 3, "check_moment_bound: k must be 1, 2 or 3");
    require_domain(std::isfinite(a) && std::isfinite(b) && a <= b, "check_moment_bound: D must be a bounded [a, b]");
    require_domain(draws >= 2, "check_moment_bound: need at least two draws");
    const double rho_d = kernel_mass(ensemble.kernel(), a, b);
    const auto s = sample(ensemble, draws, seed);
    MeanEstimator m;
    for (const auto& x : s.configurations) m.add(std::pow(static_cast<double>(count_in(x, a, b)) - rho_d, 2 * k));
    BoundCheck out;
    out.lhs = m.mean();
    out.lhs_se = m.se();
    out.rhs = std::pow(3.0 * rho_d, k);
    out.n_samples = draws;
    out.verdict = bound_verdict(out.lhs, out.lhs_se, out.rhs);
    return out;
}

std::vector<double> stationary_initial(const SdeSystem& system, std::uint64_t seed, std::uint64_t index) {
    require_domain(system.n >= 1, "stationary_initial: the system needs a particle count");
    const int n = system.n;
    switch (system.kind) {
        case SdeKind::dyson_ou: return sample_one(EnsembleSpec::gue_scaled(n), seed, index);
        case SdeKind::sqbessel_ou: return sample_one(EnsembleSpec::laguerre(n, system.nu), seed, index);
        case SdeKind::bessel_ou: {
            auto x = sample_one(EnsembleSpec::laguerre(n, system.nu), seed, index);
            for (double& v : x) v = std::sqrt(v);
            return x;
        }
        case SdeKind::airy_ou: {
            auto x = sample_one(EnsembleSpec::gue_scaled(n), seed, index);
            const double a = std::cbrt(static_cast<double>(n));
            for (double& v : x) v = v / a - 2.0 * a * a;
            return x;
        }
        default: break;
    }
    throw DomainError("stationary_initial: " + system.name() + " has no stationary law");
}

StaticKernel stationary_kernel(const SdeSystem& system) {
    switch (system.kind) {
        case SdeKind::dyson_ou: return StaticKernel::hermite(system.n);
        case SdeKind::sqbessel_ou:
        case SdeKind::bessel_ou: return StaticKernel::laguerre(system.n, system.nu);
        default: break;
    }
    throw DomainError("stationary_kernel: no one-point kernel for " + system.name());
}

std::vector<double> configuration_coordinates(const SdeSystem& system, std::span<const double> state) {
    std::vector<double> x(state.begin(), state.end());
    if (system.kind == SdeKind::bessel_ou)
        for (double& v : x) v *= v;
    return x;
}

DisplacementCheck check_displacement_tail(const SdeSystem& system, double a, double b,
                                          const std::vector<double>& multipliers, const std::vector<double>& horizons,
                                          std::size_t paths, double dt, std::uint64_t seed) {
    require_domain(a < b, "check_displacement_tail: D must satisfy a < b");
    require_domain(!multipliers.empty() && !horizons.empty(), "check_displacement_tail: empty grid");
    for (double m : multipliers) require_domain(m > 0.0, "check_displacement_tail: multipliers must be > 0");
    for (double T : horizons) require_domain(T > 0.0, "check_displacement_tail: horizons must be > 0");
    require_domain(paths >= 2 && dt > 0.0, "check_displacement_tail: need paths >= 2 and dt > 0");
    if (system.half_line()) require_domain(a >= 0.0 && b - a >= 1.0, "check_displacement_tail: half-line D must lie in [0, inf) with |D| >= 1");

    DisplacementCheck out;
    out.root_displacement = system.half_line();
    out.rho_d = kernel_mass(stationary_kernel(system), a, b);
    const double T_max = *std::max_element(horizons.begin(), horizons.end());
    const std::size_t nh = horizons.size();

    // per path: the largest displacement up to each horizon among particles starting in D
    std::vector<std::vector<double>> disp(paths, std::vector<double>(nh, 0.0));
    std::vector<char> any_in_d(paths, 0);
    std::vector<std::size_t> order(nh);
    for (std::size_t i = 0; i < nh; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t u, std::size_t v) { return horizons[u] < horizons[v]; });
    const std::uint64_t dyn_seed = derive_seed(seed, 1);
    parallel_for(paths, [&](std::size_t p) {
        const auto init = stationary_initial(system, seed, p);
        IntegrateOptions opt;
        opt.path_index = p;
        const auto path = integrate(system, init, T_max, dt, dyn_seed, opt);
        auto root = [&](double v) {
            if (system.kind == SdeKind::sqbessel_ou) return std::sqrt(std::max(v, 0.0));
            return v;
        };
        const auto x0 = configuration_coordinates(system, path.states[0]);
        for (std::size_t j = 0; j < x0.size(); ++j) {
            if (x0[j] < a || x0[j] > b) continue;
            any_in_d[p] = 1;
            const double r0 = root(path.states[0][j]);
            double run = 0.0;
            std::size_t h = 0;
            for (std::size_t s = 0; s < path.states.size() && h < nh; ++s) {
                while (h < nh && path.times[s] > horizons[order[h]] * (1 + 1e-12)) {
                    disp[p][order[h]] = std::max(disp[p][order[h]], run);
                    ++h;
                }
                if (h == nh) break;
                run = std::max(run, std::abs(root(path.states[s][j]) - r0));
            }
            for (; h < nh; ++h) disp[p][order[h]] = std::max(disp[p][order[h]], run);
        }
    });

    double cmin = INFINITY, cmax = 0.0;
    for (std::size_t h = 0; h < nh; ++h)
        for (double m : multipliers) {
            DisplacementPoint pt;
            pt.T = horizons[h];
            pt.epsilon = m * std::sqrt(pt.T);
            MeanEstimator est;
            for (std::size_t p = 0; p < paths; ++p) est.add(any_in_d[p] && disp[p][h] > pt.epsilon ? 1.0 : 0.0);
            pt.probability = to_result(est);
            pt.erf = specfun::gauss_tail(m);
            pt.fitted_c = pt.probability.estimate / (std::max(out.rho_d, 1.0) * pt.erf);
            if (pt.probability.estimate > 0.0) {
                cmin = std::min(cmin, pt.fitted_c);
                cmax = std::max(cmax, pt.fitted_c);
            }
            out.grid.push_back(pt);
        }
    out.c_ratio = cmax > 0.0 ? cmax / cmin : 1.0;
    out.verdict = out.c_ratio <= 3.0 ? Verdict::satisfied : Verdict::violated;
    return out;
}

double PolynomialFunctional::operator()(std::span<const double> points) const {
    double s = 0.0;
    for (double x : points) {
        const double u = (x - center) / width;
        if (std::abs(u) < 1.0) s += std::exp(1.0 - 1.0 / (1.0 - u * u));
    }
    return std::pow(s, power);
}

ReversibilityCheck check_reversibility(const SdeSystem& system, const PolynomialFunctional& f,
                                       const PolynomialFunctional& g, double t, std::size_t paths, double dt,
                                       std::uint64_t seed) {
    require_domain(t >= 0.0 && dt > 0.0, "check_reversibility: need t >= 0 and dt > 0");
    require_domain(paths >= 2, "check_reversibility: need at least two paths");
    require_domain(f.width > 0.0 && g.width > 0.0 && f.power >= 1 && g.power >= 1,
                   "check_reversibility: functionals need width > 0 and power >= 1");
    std::vector<double> fwd(paths), bwd(paths);
    const std::uint64_t dyn_seed = derive_seed(seed, 2);
    parallel_for(paths, [&](std::size_t p) {
        const auto init = stationary_initial(system, seed, p);
        std::vector<double> end = init;
        if (t > 0.0) {
            IntegrateOptions opt;
            opt.path_index = p;
            opt.record_every = 0;
            end = integrate(system, init, t, dt, dyn_seed, opt).states.back();
        }
        const auto x0 = configuration_coordinates(system, init);
        const auto xt = configuration_coordinates(system, end);
        fwd[p] = f(x0) * g(xt);
        bwd[p] = g(x0) * f(xt);
    });
    MeanEstimator mf, mb, md;
    for (std::size_t p = 0; p < paths; ++p) {
        mf.add(fwd[p]);
        mb.add(bwd[p]);
        md.add(fwd[p] - bwd[p]);
    }
    ReversibilityCheck out;
    out.forward = to_result(mf);
    out.backward = to_result(mb);
    out.difference = to_result(md);
    out.verdict = std::abs(out.difference.estimate) <= 3.0 * out.difference.std_error ? Verdict::satisfied : Verdict::violated;
    return out;
}

namespace {

double gauss_density(double var, double x) { return std::exp(-x * x / (2 * var)) / std::sqrt(2 * std::numbers::pi * var); }

quad::QuadratureRule window_rule(const TestFunction& f) {
    quad::QuadratureRule r;
    const auto br = f.breakpoints();
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        if (br[i + 1] <= br[i]) continue;
        const auto p = quad::gauss_legendre(32, br[i], br[i + 1]);
        r.nodes.insert(r.nodes.end(), p.nodes.begin(), p.nodes.end());
        r.weights.insert(r.weights.end(), p.weights.begin(), p.weights.end());
    }
    return r;
}

// E prod_m (1 + chi_m(B(t_m))) for Brownian motion from x0, M <= 2
double brownian_oracle(double x0, const std::vector<double>& times, const std::vector<TestFunction>& f) {
    const auto r1 = window_rule(f[0]);
    double e = 1.0;
    for (std::size_t i = 0; i < r1.size(); ++i)
        e += r1.weights[i] * gauss_density(times[0], r1.nodes[i] - x0) * f[0].chi(r1.nodes[i]);
    if (times.size() == 1) return e;
    const auto r2 = window_rule(f[1]);
    for (std::size_t j = 0; j < r2.size(); ++j) {
        const double c2 = f[1].chi(r2.nodes[j]);
        e += r2.weights[j] * gauss_density(times[1], r2.nodes[j] - x0) * c2;
        for (std::size_t i = 0; i < r1.size(); ++i)
            e += r1.weights[i] * r2.weights[j] * gauss_density(times[0], r1.nodes[i] - x0) * f[0].chi(r1.nodes[i]) *
                 gauss_density(times[1] - times[0], r2.nodes[j] - r1.nodes[i]) * c2;
    }
    return e;
}

}  // namespace

MultitimeReport check_multitime_determinant(const Configuration& xi, const std::vector<double>& times,
                                            const std::vector<TestFunction>& functions, std::size_t paths,
                                            double dt, std::uint64_t seed) {
    require_domain(xi.simple() && !xi.empty(), "check_multitime_determinant: xi must be a nonempty simple configuration");
    require_domain(xi.total() <= 4, "check_multitime_determinant: N must be <= 4");
    require_domain(!times.empty() && times.size() <= 2, "check_multitime_determinant: M must be 1 or 2");
    require_domain(functions.size() == times.size(), "check_multitime_determinant: one function per time");
    require_domain(times.front() > 0.0, "check_multitime_determinant: times must be > 0");
    require_domain(paths >= 2 && dt > 0.0, "check_multitime_determinant: need paths >= 2 and dt > 0");
    std::vector<std::size_t> index;
    for (double t : times) {
        const double k = std::round(t / dt);
        require_domain(std::abs(k * dt - t) <= 1e-9 * std::max(1.0, t), "check_multitime_determinant: times must be multiples of dt");
        index.push_back(static_cast<std::size_t>(k));
    }

    MultitimeReport out;
    FredholmProblem prob;
    prob.kernel = NonEqKernelSpec::sine(xi);
    prob.times = times;
    prob.functions = functions;
    prob.nodes = 8;
    const auto fr = mgf_detailed(prob);
    out.fredholm = fr.value;
    out.fredholm_cauchy_gap = fr.cauchy_gap;

    const auto sys = SdeSystem::parse("dyson", static_cast<int>(xi.total()), 0.0);
    const auto init = xi.points();
    std::vector<double> val(paths);
    parallel_for(paths, [&](std::size_t p) {
        IntegrateOptions opt;
        opt.path_index = p;
        const auto path = integrate(sys, init, times.back(), dt, seed, opt);
        double s = 0.0;
        for (std::size_t m = 0; m < times.size(); ++m)
            for (double x : path.states[index[m]]) s += functions[m].f(x);
        val[p] = std::exp(s);
    });
    MeanEstimator est;
    for (double v : val) est.add(v);
    out.monte_carlo = to_result(est);
    out.z_score = z_score(out.fredholm, 0.0, out.monte_carlo.estimate, out.monte_carlo.std_error);
    out.agree = out.z_score <= 3.0;
    out.quadrature = std::numeric_limits<double>::quiet_NaN();
    if (xi.total() == 1) {
        out.quadrature = brownian_oracle(init[0], times, functions);
        out.agree = out.agree && z_score(out.quadrature, 0.0, out.monte_carlo.estimate, out.monte_carlo.std_error) <= 3.0 &&
                    std::abs(out.quadrature - out.fredholm) <= 1e-3;
    }
    return out;
}

double scaling_distance(const StaticKernel& a, const StaticKernel& b, double lo, double hi, int n) {
    require_domain(n >= 2 && lo < hi, "scaling_distance: need n >= 2 and lo < hi");
    double d = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double x = lo + (hi - lo) * i / (n - 1), y = lo + (hi - lo) * j / (n - 1);
            d = std::max(d, std::abs(eval_static(a, x, y) - eval_static(b, x, y)));
        }
    return d;
}

}  // namespace dpp
