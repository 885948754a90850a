#include "dpp/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace dpp::quad {

namespace {

std::shared_ptr<const UnitRule> compute_gauss_legendre(int n) {
    auto rule = std::make_shared<UnitRule>();
    rule->nodes.resize(n);
    rule->weights.resize(n);
    const int m = (n + 1) / 2;
    for (int i = 0; i < m; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) { p1 = x; p0 = 1.0; }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        if (n == 1) { p1 = x; p0 = 1.0; }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule->nodes[i] = -x;
        rule->nodes[n - 1 - i] = x;
        rule->weights[i] = w;
        rule->weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) rule->nodes[n / 2] = 0.0;
    return rule;
}

}  // namespace

std::shared_ptr<const UnitRule> gauss_legendre_unit(int n) {
    require_domain(n >= 1, "Gauss-Legendre order must be >= 1");
    static std::mutex mu;
    static std::map<int, std::shared_ptr<const UnitRule>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto rule = compute_gauss_legendre(n);
    cache.emplace(n, rule);
    return rule;
}

QuadratureRule gauss_legendre(int n, double a, double b) {
    return composite_gauss_legendre(n, a, b, 1);
}

QuadratureRule composite_gauss_legendre(int n, double a, double b, int panels) {
    require_domain(panels >= 1, "panel count must be >= 1");
    require_domain(std::isfinite(a) && std::isfinite(b), "quadrature limits must be finite");
    const auto unit = gauss_legendre_unit(n);
    QuadratureRule rule;
    rule.lower = a;
    rule.upper = b;
    rule.method = "gauss-legendre-" + std::to_string(n) + "x" + std::to_string(panels);
    rule.nodes.reserve(static_cast<std::size_t>(n) * panels);
    rule.weights.reserve(static_cast<std::size_t>(n) * panels);
    const double width = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double lo = a + p * width;
        const double half = 0.5 * width;
        const double mid = lo + half;
        for (int i = 0; i < n; ++i) {
            rule.nodes.push_back(mid + half * unit->nodes[i]);
            rule.weights.push_back(half * unit->weights[i]);
        }
    }
    return rule;
}

}  // namespace dpp::quad
