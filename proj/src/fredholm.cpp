#include "dpp/fredholm.hpp"

#include <Eigen/Dense>
#include <math.h>  // pchip in Boost 1.74 calls isnan unqualified
#include <boost/math/interpolators/pchip.hpp>

#include <cmath>
#include <limits>
#include <string>

#include "dpp/error.hpp"
#include "dpp/parallel.hpp"
#include "dpp/quadrature.hpp"

namespace dpp {

TestFunction TestFunction::zero() { return {}; }

TestFunction TestFunction::indicator(double a, double b, double z) {
    require_domain(std::isfinite(a) && std::isfinite(b) && a <= b, "indicator: window must be a finite [a, b]");
    require_domain(std::isfinite(z) && z >= -1.0, "indicator: z must be >= -1");
    TestFunction t;
    t.kind_ = Kind::indicator;
    t.a_ = a;
    t.b_ = b;
    t.z_ = z;
    return t;
}

TestFunction TestFunction::log_linear(double a, double b, double c0, double c1) {
    require_domain(std::isfinite(a) && std::isfinite(b) && a <= b, "log_linear: window must be a finite [a, b]");
    require_domain(std::isfinite(c0) && std::isfinite(c1), "log_linear: coefficients must be finite");
    TestFunction t;
    t.kind_ = Kind::log_linear;
    t.a_ = a;
    t.b_ = b;
    t.c0_ = c0;
    t.c1_ = c1;
    return t;
}

TestFunction TestFunction::sampled(double a, double b, std::vector<double> values) {
    require_domain(std::isfinite(a) && std::isfinite(b) && a < b, "sampled: window must satisfy a < b");
    require_domain(values.size() >= 4, "sampled: at least 4 knots are needed");
    for (double v : values) require_domain(std::isfinite(v), "sampled: values must be finite");
    TestFunction t;
    t.kind_ = Kind::sampled;
    t.a_ = a;
    t.b_ = b;
    const std::size_t k = values.size() - 1;
    for (std::size_t i = 0; i <= k; ++i) t.knots_.push_back(i == k ? b : a + (b - a) * i / k);
    auto xs = t.knots_;
    boost::math::interpolators::pchip<std::vector<double>> p(std::move(xs), std::move(values));
    t.spline_ = std::make_shared<const std::function<double(double)>>([p](double x) { return p(x); });
    return t;
}

TestFunction TestFunction::from_function(const std::function<double(double)>& f, double a, double b, int knots) {
    require_domain(knots >= 4, "from_function: at least 4 knots are needed");
    std::vector<double> v(knots);
    for (int i = 0; i < knots; ++i) v[i] = f(i + 1 == knots ? b : a + (b - a) * i / (knots - 1));
    return sampled(a, b, std::move(v));
}

double TestFunction::f(double x) const {
    if (kind_ == Kind::zero || x < a_ || x > b_) return 0.0;
    switch (kind_) {
        case Kind::indicator: return z_ == -1.0 ? -std::numeric_limits<double>::infinity() : std::log1p(z_);
        case Kind::log_linear: return c0_ + c1_ * x;
        case Kind::sampled: return (*spline_)(x);
        case Kind::zero: break;
    }
    return 0.0;
}

double TestFunction::chi(double x) const {
    if (kind_ == Kind::zero || x < a_ || x > b_) return 0.0;
    if (kind_ == Kind::indicator) return z_;
    return std::expm1(f(x));
}

std::vector<double> TestFunction::breakpoints() const {
    if (kind_ == Kind::zero) return {};
    if (kind_ == Kind::sampled) return knots_;
    return {a_, b_};
}

double eval_any(const AnyKernel& k, double s, double x, double t, double y) {
    return std::visit(
        [&](const auto& kern) -> double {
            using T = std::decay_t<decltype(kern)>;
            if constexpr (std::is_same_v<T, StaticKernel>)
                return eval_static(kern, x, y);
            else if constexpr (std::is_same_v<T, ExtendedKernel>)
                return eval_extended(kern, s, x, t, y);
            else
                return eval_noneq(kern, s, x, t, y);
        },
        k);
}

bool any_half_line(const AnyKernel& k) {
    return std::visit(
        [](const auto& kern) -> bool {
            using T = std::decay_t<decltype(kern)>;
            if constexpr (std::is_same_v<T, NonEqKernelSpec>)
                return kern.family == NonEqFamily::bessel;
            else
                return kern.half_line();
        },
        k);
}

void FredholmProblem::validate() const {
    require_domain(!times.empty(), "fredholm: at least one time is required");
    require_domain(functions.size() == times.size(), "fredholm: one test function per time is required");
    for (std::size_t m = 0; m < times.size(); ++m) {
        require_domain(std::isfinite(times[m]), "fredholm: times must be finite");
        if (m > 0) require_domain(times[m] > times[m - 1], "fredholm: times must be strictly increasing");
    }
    require_domain(nodes >= 2 && max_nodes >= nodes, "fredholm: need 2 <= nodes <= max_nodes");
    require_domain(cauchy_tol > 0.0, "fredholm: cauchy_tol must be > 0");
    if (std::holds_alternative<StaticKernel>(kernel)) {
        std::get<StaticKernel>(kernel).validate();
        require_domain(times.size() == 1, "fredholm: a static kernel carries no time dependence; use M = 1");
    }
    if (std::holds_alternative<NonEqKernelSpec>(kernel)) std::get<NonEqKernelSpec>(kernel).validate();
    if (any_half_line(kernel))
        for (const auto& f : functions)
            require_domain(f.is_zero() || f.lower() >= 0.0, "fredholm: window leaves the half-line kernel domain");
}

namespace {

struct Grid {
    std::vector<double> x, w;
    std::vector<int> block;
};

Grid build_grid(const FredholmProblem& p, int order) {
    Grid g;
    for (std::size_t m = 0; m < p.functions.size(); ++m) {
        const auto br = p.functions[m].breakpoints();
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            if (br[i + 1] <= br[i]) continue;
            const auto r = quad::gauss_legendre(order, br[i], br[i + 1]);
            for (std::size_t j = 0; j < r.size(); ++j) {
                g.x.push_back(r.nodes[j]);
                g.w.push_back(r.weights[j]);
                g.block.push_back(static_cast<int>(m));
            }
        }
    }
    return g;
}

double determinant(const FredholmProblem& p, int order, int& dim) {
    const Grid g = build_grid(p, order);
    const std::size_t n = g.x.size();
    dim = static_cast<int>(n);
    if (n == 0) return 1.0;
    std::vector<double> chiw(n);
    for (std::size_t j = 0; j < n; ++j) chiw[j] = p.functions[g.block[j]].chi(g.x[j]) * g.w[j];
    Eigen::MatrixXd a(n, n);
    parallel_for(n, [&](std::size_t i) {
        const double s = p.times[g.block[i]];
        for (std::size_t j = 0; j < n; ++j) {
            const double k = chiw[j] == 0.0 ? 0.0 : eval_any(p.kernel, s, g.x[i], p.times[g.block[j]], g.x[j]);
            a(i, j) = (i == j ? 1.0 : 0.0) + k * chiw[j];
        }
    });
    const double d = a.partialPivLu().determinant();
    if (!std::isfinite(d)) throw NumericalError("fredholm: determinant is not finite");
    return d;
}

}  // namespace

FredholmResult mgf_detailed(const FredholmProblem& problem) {
    problem.validate();
    FredholmResult r;
    int order = problem.nodes;
    int dim = 0;
    double prev = determinant(problem, order, dim);
    if (dim == 0) {
        r.value = 1.0;
        return r;
    }
    while (2 * order <= problem.max_nodes) {
        order *= 2;
        const double cur = determinant(problem, order, dim);
        r.cauchy_gap = std::abs(cur - prev);
        r.value = cur;
        r.nodes_used = dim;
        if (r.cauchy_gap <= problem.cauchy_tol) return r;
        prev = cur;
    }
    throw ConvergenceError("fredholm: node doubling did not settle (last change " + std::to_string(r.cauchy_gap) +
                           ")");
}

double mgf(const FredholmProblem& problem) { return mgf_detailed(problem).value; }

namespace {

double symmetric_gap(const StaticKernel& k, double a, double b, int n) {
    const auto rule = quad::gauss_legendre(n, a, b);
    Eigen::MatrixXd m(n, n);
    std::vector<double> sw(n);
    for (int i = 0; i < n; ++i) sw[i] = std::sqrt(rule.weights[i]);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            const double v = -sw[i] * eval_static(k, rule.nodes[i], rule.nodes[j]) * sw[j];
            m(i, j) = v + (i == j ? 1.0 : 0.0);
            m(j, i) = m(i, j);
        }
    return m.partialPivLu().determinant();
}

}  // namespace

FredholmResult gap_probability_detailed(const StaticKernel& k, double a, double b, int nodes, double cauchy_tol) {
    k.validate();
    require_domain(std::isfinite(a) && std::isfinite(b) && a <= b, "gap_probability: need a finite interval a <= b");
    require_domain(nodes >= 4, "gap_probability: nodes must be >= 4");
    if (k.half_line()) require_domain(a >= 0.0, "gap_probability: interval leaves the kernel domain [0, inf)");
    FredholmResult r;
    if (a == b) {
        r.value = 1.0;
        return r;
    }
    double prev = symmetric_gap(k, a, b, nodes);
    for (int n = 2 * nodes; n <= 1024; n *= 2) {
        const double cur = symmetric_gap(k, a, b, n);
        r.value = cur;
        r.nodes_used = n;
        r.cauchy_gap = std::abs(cur - prev);
        if (r.cauchy_gap <= cauchy_tol) {
            if (cur < -1e-9 || cur > 1.0 + 1e-9)
                throw NumericalError("gap_probability: determinant " + std::to_string(cur) + " outside [0, 1]");
            return r;
        }
        prev = cur;
    }
    throw ConvergenceError("gap_probability: node doubling did not settle (last change " +
                           std::to_string(r.cauchy_gap) + ")");
}

double gap_probability(const StaticKernel& k, double a, double b, int nodes) {
    return gap_probability_detailed(k, a, b, nodes).value;
}

}  // namespace dpp
