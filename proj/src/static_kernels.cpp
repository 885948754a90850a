#include "dpp/static_kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "dpp/error.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/specfun.hpp"

namespace dpp {

namespace {

constexpr double inv_pi = std::numbers::inv_pi;

void check_point(const StaticKernel& k, double x) {
    require_domain(std::isfinite(x), "kernel argument must be finite");
    if (k.half_line()) require_domain(x >= 0.0, k.name() + ": coordinates must be >= 0");
}

double sine_kernel(double x, double y) {
    const double d = x - y;
    if (d == 0.0) return inv_pi;
    if (std::abs(d) < near_diagonal_width(x)) {
        const double d2 = d * d;
        return inv_pi * (1.0 - d2 / 6.0 * (1.0 - d2 / 20.0));
    }
    return std::sin(d) / (std::numbers::pi * d);
}

double airy_diagonal(double x) {
    const auto a = specfun::airy(x);
    return a.aip * a.aip - x * a.ai * a.ai;
}

double airy_offdiagonal(double x, double y) {
    const auto a = specfun::airy(x);
    const auto b = specfun::airy(y);
    return (a.ai * b.aip - a.aip * b.ai) / (x - y);
}

// sqrt(x) J_nu'(2 sqrt x), with the x = 0 limit for nu >= 0.
double bessel_root_deriv(double nu, double x) {
    if (x == 0.0) return 0.0;
    return std::sqrt(x) * specfun::bessel_j_deriv(nu, 2.0 * std::sqrt(x));
}

double bessel_value(double nu, double x) {
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    return specfun::bessel_j(nu, 2.0 * std::sqrt(x));
}

double bessel_diagonal(double nu, double x) {
    if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
    const double z = 2.0 * std::sqrt(x);
    const double j = specfun::bessel_j(nu, z);
    return j * j - specfun::bessel_j_any_order(nu + 1.0, z) * specfun::bessel_j_any_order(nu - 1.0, z);
}

double bessel_offdiagonal(double nu, double x, double y) {
    const double num = bessel_value(nu, x) * bessel_root_deriv(nu, y) -
                       bessel_root_deriv(nu, x) * bessel_value(nu, y);
    return num / (x - y);
}

// K = (xy)^{nu/2} sum_{j,k} a_j a_k x^j y^k / (j+k+nu+1), a_j = (-1)^j/(j! Gamma(j+nu+1)).
// Cancellation-free near the origin; used for the near-diagonal branch with small midpoint.
double bessel_double_series(double nu, double x, double y) {
    using ld = long double;
    auto coefficients = [nu](double v) {
        std::vector<ld> c;
        ld term = 1.0L / std::tgamma(static_cast<ld>(nu) + 1.0L);
        c.push_back(term);
        for (int j = 1; j < 200; ++j) {
            term *= -static_cast<ld>(v) / (static_cast<ld>(j) * (j + static_cast<ld>(nu)));
            c.push_back(term);
            if (std::abs(term) < 1e-22L && j > v) break;
        }
        return c;
    };
    const auto a = coefficients(x);
    const auto b = coefficients(y);
    ld s = 0.0L;
    for (std::size_t j = 0; j < a.size(); ++j)
        for (std::size_t k = 0; k < b.size(); ++k)
            s += a[j] * b[k] / (static_cast<ld>(j + k) + nu + 1.0L);
    const ld pre = (x == 0.0 || y == 0.0) ? (nu == 0.0 ? 1.0L : 0.0L)
                                          : std::pow(static_cast<ld>(x) * y, static_cast<ld>(nu) / 2.0L);
    return static_cast<double>(pre * s);
}

// Symmetric kernels are even in h = x - y about the midpoint m; the h^2
// coefficient is estimated from one off-diagonal evaluation at width H.
template <class Diag, class Off>
double midpoint_expansion(double x, double y, Diag diag, Off off) {
    const double m = 0.5 * (x + y);
    const double h = x - y;
    const double H = 1e-2 * (1.0 + std::abs(m));
    const double kd = diag(m);
    const double kh = off(m + 0.5 * H, m - 0.5 * H);
    const double r = h / H;
    return kd + r * r * (kh - kd);
}

double hermite_n_kernel(int n, double x, double y) {
    const double s = std::sqrt(2.0 * n);
    std::vector<double> a(n), b(n);
    specfun::hermite_functions(x / s, a);
    if (x == y) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += a[k] * a[k];
        return sum / s;
    }
    specfun::hermite_functions(y / s, b);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += a[k] * b[k];
    return sum / s;
}

double laguerre_n_kernel(int n, double nu, double c, double x, double y) {
    std::vector<double> a(n), b(n);
    specfun::laguerre_functions(nu, x / c, a);
    if (x == y) {
        double sum = 0.0;
        for (int k = 0; k < n; ++k) sum += a[k] * a[k];
        return sum / c;
    }
    specfun::laguerre_functions(nu, y / c, b);
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += a[k] * b[k];
    return sum / c;
}

}  // namespace

std::string StaticKernel::name() const {
    switch (family) {
        case StaticFamily::sine: return "sine";
        case StaticFamily::airy: return "airy";
        case StaticFamily::bessel: return "bessel";
        case StaticFamily::hermite_n: return "hermite_n";
        case StaticFamily::laguerre_n: return "laguerre_n";
    }
    return "unknown";
}

void StaticKernel::validate() const {
    if (family == StaticFamily::bessel || family == StaticFamily::laguerre_n)
        require_domain(nu > -1.0, name() + ": nu must exceed -1");
    if (finite_n()) require_domain(n >= 1, name() + ": N must be >= 1");
    require_domain(scale >= 0.0 && std::isfinite(scale), name() + ": scale must be >= 0");
}

double near_diagonal_width(double x) { return 1e-4 * (1.0 + std::abs(x)); }

double eval_static(const StaticKernel& k, double x, double y) {
    k.validate();
    check_point(k, x);
    check_point(k, y);
    const bool near = std::abs(x - y) < near_diagonal_width(x);
    switch (k.family) {
        case StaticFamily::sine: return sine_kernel(x, y);
        case StaticFamily::airy:
            if (x == y) return airy_diagonal(x);
            if (near) return midpoint_expansion(x, y, airy_diagonal, airy_offdiagonal);
            return airy_offdiagonal(x, y);
        case StaticFamily::bessel: {
            const double nu = k.nu;
            if (nu < 0.0 && (x == 0.0 || y == 0.0))
                throw DomainError("bessel kernel is unbounded at the origin for nu < 0");
            if (x == y) return bessel_diagonal(nu, x);
            if (near) {
                if (0.5 * (x + y) <= 4.0) return bessel_double_series(nu, x, y);
                return midpoint_expansion(
                    x, y, [nu](double m) { return bessel_diagonal(nu, m); },
                    [nu](double a, double b) { return bessel_offdiagonal(nu, a, b); });
            }
            return bessel_offdiagonal(nu, x, y);
        }
        case StaticFamily::hermite_n: return hermite_n_kernel(k.n, x, y);
        case StaticFamily::laguerre_n:
            if (k.nu < 0.0 && (x == 0.0 || y == 0.0))
                throw DomainError("laguerre kernel is unbounded at the origin for nu < 0");
            return laguerre_n_kernel(k.n, k.nu, k.laguerre_scale(), x, y);
    }
    throw DomainError("unknown kernel family");
}

double rho_m(const StaticKernel& k, std::span<const double> points) {
    require_domain(!points.empty(), "rho_m needs at least one point");
    const std::size_t m = points.size();
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i + 1; j < m; ++j)
            if (points[i] == points[j]) {
                // still validate the domain before returning the exact zero
                check_point(k, points[i]);
                return 0.0;
            }
    if (m == 1) return eval_static(k, points[0], points[0]);
    Eigen::MatrixXd g(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        g(i, i) = eval_static(k, points[i], points[i]);
        for (std::size_t j = i + 1; j < m; ++j) g(i, j) = g(j, i) = eval_static(k, points[i], points[j]);
    }
    if (m == 2) return g(0, 0) * g(1, 1) - g(0, 1) * g(1, 0);
    return g.partialPivLu().determinant();
}

Window effective_support(const StaticKernel& k) {
    k.validate();
    require_domain(k.finite_n(), "effective_support: finite-N family required");
    if (k.family == StaticFamily::hermite_n) {
        const double s = std::sqrt(2.0 * k.n);
        const double t = std::sqrt(2.0 * k.n) + 12.0;
        return {-s * t, s * t};
    }
    const double turning = 4.0 * k.n + 2.0 * k.nu + 2.0;
    const double t = turning + 40.0 + 10.0 * std::cbrt(turning);
    return {0.0, k.laguerre_scale() * t};
}

double total_mass(const StaticKernel& k) {
    const Window w = effective_support(k);
    auto diag = [&k](double x) { return eval_static(k, x, x); };
    const int panels = k.n + 10;
    if (k.family == StaticFamily::hermite_n) {
        const auto rule = quad::composite_gauss_legendre(24, w.lo, w.hi, 2 * panels);
        double s = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * diag(rule.nodes[i]);
        return s;
    }
    // x^nu behavior at the hard edge: double-exponential rule on the first piece
    const double c = k.laguerre_scale();
    const double first = std::min(c, w.hi);
    double s = quad::integrate_endpoint_singular(diag, 0.0, first, 1e-10).value;
    const auto rule = quad::composite_gauss_legendre(24, first, w.hi, 2 * panels);
    for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * diag(rule.nodes[i]);
    return s;
}

}  // namespace dpp
