#pragma once

#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "dpp/error.hpp"

namespace dpp::quad {

// Nodes and weights on [-1, 1].
struct UnitRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule on [-1,1], computed once per order and cached.
std::shared_ptr<const UnitRule> gauss_legendre_unit(int n);

// A concrete rule on an interval. tail_bound records the analytic bound on
// the integrand mass discarded when the interval is a truncation of an
// infinite range (0 when nothing was truncated).
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
    double lower = 0.0;
    double upper = 0.0;
    double tail_bound = 0.0;
    std::string method;

    std::size_t size() const { return nodes.size(); }
};

QuadratureRule gauss_legendre(int n, double a, double b);

// `panels` equal panels with an n-point Gauss-Legendre rule on each.
QuadratureRule composite_gauss_legendre(int n, double a, double b, int panels);

struct IntegrationResult {
    double value = 0.0;
    double abs_error = 0.0;
    double lower = 0.0;
    double upper = 0.0;  // effective limit after truncation
    int panels = 0;
};

template <class F>
double integrate_gl(F&& f, double a, double b, int n) {
    const auto rule = gauss_legendre_unit(n);
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (b + a);
    double s = 0.0;
    for (std::size_t i = 0; i < rule->nodes.size(); ++i)
        s += rule->weights[i] * f(mid + half * rule->nodes[i]);
    return s * half;
}

namespace detail {

template <class F>
void gk_bisect(F& f, double a, double b, double tol, unsigned depth, double& value,
               double& error) {
    double err = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        f, a, b, 0, 0.0, &err);
    if (err <= tol || depth == 0) {
        value += v;
        error += err;
        return;
    }
    const double mid = 0.5 * (a + b);
    gk_bisect(f, a, mid, 0.5 * tol, depth - 1, value, error);
    gk_bisect(f, mid, b, 0.5 * tol, depth - 1, value, error);
}

}  // namespace detail

// Adaptive Gauss-Kronrod (31 point) on [a, b] with an absolute error target.
// The range is first split into `panels` equal pieces so that oscillatory
// integrands start from a resolved partition. Throws ConvergenceError if the
// accumulated error estimate exceeds abs_tol.
template <class F>
IntegrationResult integrate_adaptive(F&& f, double a, double b, double abs_tol,
                                     int panels = 1, unsigned max_depth = 24) {
    IntegrationResult out;
    out.lower = a;
    out.upper = b;
    out.panels = panels;
    if (a == b) return out;
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double hi = (p + 1 == panels) ? b : lo + width;
        detail::gk_bisect(f, lo, hi, abs_tol / panels, max_depth, out.value, out.abs_error);
    }
    if (!(out.abs_error <= abs_tol) || !std::isfinite(out.value))
        throw ConvergenceError("adaptive quadrature did not reach tolerance: error estimate " +
                               std::to_string(out.abs_error));
    return out;
}

// Double-exponential rule for integrands with algebraic endpoint behavior
// such as x^nu near 0.
template <class F>
IntegrationResult integrate_endpoint_singular(F&& f, double a, double b, double abs_tol) {
    IntegrationResult out;
    out.lower = a;
    out.upper = b;
    out.panels = 1;
    if (a == b) return out;
    boost::math::quadrature::tanh_sinh<double> ts;
    double err = 0.0, l1 = 0.0;
    out.value = ts.integrate(f, a, b, 1e-13, &err, &l1);
    out.abs_error = err;
    if (!(out.abs_error <= abs_tol) || !std::isfinite(out.value))
        throw ConvergenceError("tanh-sinh quadrature did not reach tolerance: error estimate " +
                               std::to_string(out.abs_error));
    return out;
}

}  // namespace dpp::quad
