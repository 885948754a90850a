#include "dpp/noneq_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "dpp/error.hpp"
#include "dpp/extended_kernels.hpp"
#include "dpp/quadrature.hpp"
#include "dpp/specfun.hpp"

namespace dpp {

namespace {

constexpr double kGaussCut = 36.8413614879047;  // ln(1e16)
constexpr double kAgree = 1e-9;
constexpr int kStartNodes = 200;
constexpr int kMaxNodes = 1 << 18;

struct Range {
    double lo = 0.0, hi = 0.0;
    int panels = 1;
};

// Composite Gauss-Legendre with the per-panel order doubled until two
// successive totals agree.
cplx integrate_doubling(const std::function<cplx(double)>& f, const Range& r, int& nodes_used) {
    int per_panel = std::max(4, (kStartNodes + r.panels - 1) / r.panels);
    auto run = [&](int n) {
        const auto rule = quad::composite_gauss_legendre(n, r.lo, r.hi, r.panels);
        cplx s = 0.0;
        for (std::size_t i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.nodes[i]);
        return s;
    };
    cplx prev = run(per_panel);
    while (per_panel * r.panels <= kMaxNodes) {
        per_panel *= 2;
        const cplx next = run(per_panel);
        if (std::abs(next - prev) <= kAgree * std::max(1.0, std::abs(next))) {
            nodes_used = per_panel * r.panels;
            return next;
        }
        prev = next;
    }
    throw ConvergenceError("noneq kernel: u-quadrature did not settle under node doubling");
}

// Upper bound on |Phi_0(xi, x_k, w)| for |w - x_k| <= radius.
double phi0_bound(const std::vector<double>& pts, std::size_t k, double radius) {
    double b = 1.0;
    for (std::size_t j = 0; j < pts.size(); ++j)
        if (j != k) b *= 1.0 + radius / std::abs(pts[j] - pts[k]);
    return b;
}

double max_phi0_bound(const std::vector<double>& pts, double center, double extra) {
    double b = 1.0;
    for (std::size_t k = 0; k < pts.size(); ++k)
        b = std::max(b, phi0_bound(pts, k, std::abs(center - pts[k]) + extra));
    return b;
}

// Complex p^(nu)(s, x|z) for real x >= 0 via the entire series; equals the
// real density for z >= 0.
cplx p_bessel_from_complex(double nu, double s, double x, cplx z) {
    const double pre = (x == 0.0) ? (nu == 0.0 ? 1.0 : 0.0) : std::pow(x / (2.0 * s), nu);
    return pre / (2.0 * s) * std::exp(-(z + x) / (2.0 * s)) * specfun::bessel_i_entire(nu, x * z / (4.0 * s * s));
}

// p^(nu)(-t, u|y) for u <= 0 on the branch where sqrt(uy) = -i sqrt(y|u|),
// which cancels the phase of (u/y)^{nu/2}.
double p_bessel_backward(double nu, double t, double u, double y) {
    const double au = -u;
    const double pre = (au == 0.0) ? (nu == 0.0 ? 1.0 : 0.0) : std::pow(au / (2.0 * t), nu);
    return pre / (2.0 * t) * std::exp((y + u) / (2.0 * t)) * specfun::bessel_i_entire(nu, -y * au / (4.0 * t * t));
}

// The pieces shared by the residue and contour evaluations.
struct Plan {
    Range range;
    double truncation = 0.0;
    // maps the integration variable to the complex point w where Phi_0 is
    // evaluated, and the remaining scalar factor (weight, Jacobian, t-side density)
    std::function<void(double, cplx&, cplx&)> node;
    // s-side factor as a function of the (complex) configuration variable z
    std::function<cplx(cplx)> left;
    // extra z-dependent factor that sits inside the contour integral (airy drift)
    std::function<cplx(cplx, cplx)> inner;
    double heat = 0.0;
};

Plan make_plan(const NonEqKernelSpec& spec, double s, double x, double t, double y) {
    const auto pts = spec.base.support();
    Plan plan;
    switch (spec.family) {
        case NonEqFamily::sine:
        case NonEqFamily::airy_prelimit: {
            const bool airy = spec.family == NonEqFamily::airy_prelimit;
            const double c = airy ? spec.airy_drift() : 0.0;
            const double center = airy ? y - 0.25 * t * t : y;
            double W = std::sqrt(2.0 * t * kGaussCut);
            while (std::exp(-W * W / (2.0 * t)) * max_phi0_bound(pts, center, W) > 1e-16) {
                W *= 1.1;
                if (W > 1e6) throw ConvergenceError("noneq kernel: truncation point cannot be established");
            }
            // contour shift u -> w - i center turns p_sin(-t, iu|.) into a real Gaussian
            const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * t);
            plan.node = [t, center, norm](double w, cplx& at, cplx& weight) {
                at = cplx(center, w);
                weight = norm * std::exp(-w * w / (2.0 * t));
            };
            const double freq = std::abs(c) + 1.0;
            plan.range = {-W, W, std::max(1, static_cast<int>(std::ceil(2.0 * W * freq / std::numbers::pi)))};
            plan.truncation = W;
            if (airy) {
                const double xs = x - 0.25 * s * s;
                plan.left = [s, xs](cplx z) { return p_sin(s, cplx(xs), z); };
                plan.inner = [c](cplx at, cplx z) { return std::exp((at - z) * c); };
                if (s > t) plan.heat = p_sin(s - t, xs, y - 0.25 * t * t);
            } else {
                plan.left = [s, x](cplx z) { return p_sin(s, cplx(x), z); };
                plan.inner = [](cplx, cplx) { return cplx(1.0); };
                if (s > t) plan.heat = p_sin(s - t, x, y);
            }
            break;
        }
        case NonEqFamily::bessel: {
            const double nu = spec.nu;
            const double jb = nu >= -0.5 ? 1.0 / std::tgamma(nu + 1.0) : 1.0 / std::tgamma(nu + 1.0) + 1.0;
            auto envelope = [&](double U) {
                const double z = y * U / (4.0 * t * t);
                double j = jb;
                if (nu < 0.0 && z > 0.0) j += std::pow(z, -0.5 * nu);
                return std::exp((y - U) / (2.0 * t)) * std::pow(U / (2.0 * t), nu) * j / (2.0 * t) *
                       max_phi0_bound(pts, 0.0, U) * U;
            };
            double U = y + 2.0 * t * 40.0 + 1.0;
            while (envelope(U) > 1e-16) {
                U *= 1.25;
                if (U > 1e9) throw ConvergenceError("noneq kernel: truncation point cannot be established");
            }
            // u = -v^a; a = 2 keeps |u|^nu dv analytic for half-integer nu, otherwise
            // a = 2/(nu+1) removes the endpoint power
            const double twice = 2.0 * nu;
            const double a = (twice == std::floor(twice)) ? 2.0 : 2.0 / (nu + 1.0);
            const double V = std::pow(U, 1.0 / a);
            plan.node = [nu, t, y, a](double v, cplx& at, cplx& weight) {
                const double u = -std::pow(v, a);
                at = cplx(u, 0.0);
                weight = v == 0.0 ? 0.0 : a * std::pow(v, a - 1.0) * p_bessel_backward(nu, t, u, y);
            };
            const int osc = static_cast<int>(std::ceil(std::sqrt(y * U) / (std::numbers::pi * t)));
            plan.range = {0.0, V, osc + 2};
            plan.truncation = U;
            plan.left = [nu, s, x](cplx z) { return p_bessel_from_complex(nu, s, x, z); };
            plan.inner = [](cplx, cplx) { return cplx(1.0); };
            if (s > t) plan.heat = p_bessel(nu, s - t, x, y);
            break;
        }
    }
    return plan;
}

void check_times(double s, double t) {
    require_domain(s > 0.0 && t > 0.0 && std::isfinite(s) && std::isfinite(t), "noneq kernel: times must be > 0");
}

void check_space(const NonEqKernelSpec& spec, double x, double y) {
    require_domain(std::isfinite(x) && std::isfinite(y), "noneq kernel: coordinates must be finite");
    if (spec.family == NonEqFamily::bessel) {
        require_domain(x >= 0.0 && y >= 0.0, "noneq bessel kernel: coordinates must be >= 0");
        if (spec.nu < 0.0) require_domain(x > 0.0, "noneq bessel kernel: x = 0 is singular for nu < 0");
    }
}

cplx residue_integral(const NonEqKernelSpec& spec, const Plan& plan, int& nodes) {
    const auto pts = spec.base.support();
    std::vector<cplx> left(pts.size());
    for (std::size_t k = 0; k < pts.size(); ++k) left[k] = plan.left(cplx(pts[k]));
    auto f = [&](double v) {
        cplx at, weight;
        plan.node(v, at, weight);
        if (weight == 0.0) return cplx(0.0);
        cplx sum = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k)
            sum += left[k] * phi_0(spec.base, cplx(pts[k]), at) * plan.inner(at, cplx(pts[k]));
        return sum * weight;
    };
    return integrate_doubling(f, plan.range, nodes);
}

}  // namespace

cplx weierstrass_g(cplx u, int p) {
    require_domain(p >= 0, "weierstrass_g: order must be >= 0");
    if (p == 0) return 1.0 - u;
    cplx e = 0.0, pw = 1.0;
    for (int k = 1; k <= p; ++k) {
        pw *= u;
        e += pw / static_cast<double>(k);
    }
    return (1.0 - u) * std::exp(e);
}

cplx phi_0(const Configuration& config, cplx z, cplx w) {
    cplx prod = 1.0;
    for (const auto& a : config.atoms()) {
        if (cplx(a.x) == z) continue;
        const cplx g = weierstrass_g((w - z) / (a.x - z), 0);
        for (int m = 0; m < a.mult; ++m) prod *= g;
    }
    return prod;
}

NonEqKernelSpec NonEqKernelSpec::sine(Configuration c) { return {NonEqFamily::sine, std::move(c), 0.0, 0}; }
NonEqKernelSpec NonEqKernelSpec::airy_prelimit(Configuration c, int n) {
    return {NonEqFamily::airy_prelimit, std::move(c), 0.0, n};
}
NonEqKernelSpec NonEqKernelSpec::bessel(Configuration c, double nu) { return {NonEqFamily::bessel, std::move(c), nu, 0}; }

int NonEqKernelSpec::airy_n() const { return n > 0 ? n : static_cast<int>(base.total()); }

double NonEqKernelSpec::airy_drift() const { return -std::cbrt(static_cast<double>(airy_n())); }

void NonEqKernelSpec::validate() const {
    require_domain(base.simple(), name() + ": base configuration must not have multiple points");
    if (family == NonEqFamily::bessel) {
        require_domain(nu > -1.0, name() + ": nu must exceed -1");
        require_domain(base.nonnegative(), name() + ": base configuration must lie in [0, inf)");
    }
    if (family == NonEqFamily::airy_prelimit) {
        require_domain(n >= 0, name() + ": N must be >= 0");
        require_domain(airy_n() >= 1, name() + ": N must be >= 1");
    }
}

std::string NonEqKernelSpec::name() const {
    switch (family) {
        case NonEqFamily::sine: return "noneq_sine";
        case NonEqFamily::airy_prelimit: return "noneq_airy_prelimit";
        case NonEqFamily::bessel: return "noneq_bessel";
    }
    return "unknown";
}

NonEqValue eval_noneq_detailed(const NonEqKernelSpec& spec, double s, double x, double t, double y) {
    spec.validate();
    check_times(s, t);
    check_space(spec, x, y);
    const Plan plan = make_plan(spec, s, x, t, y);
    NonEqValue out;
    out.truncation = plan.truncation;
    cplx integral = 0.0;
    if (!spec.base.empty()) integral = residue_integral(spec, plan, out.nodes);
    if (std::abs(integral.imag()) > 1e-8)
        throw NumericalError(spec.name() + ": kernel has imaginary part " + std::to_string(integral.imag()));
    out.imag = integral.imag();
    out.value = integral.real() - plan.heat;
    return out;
}

double eval_noneq(const NonEqKernelSpec& spec, double s, double x, double t, double y) {
    return eval_noneq_detailed(spec, s, x, t, y).value;
}

CrossCheck contour_crosscheck(const NonEqKernelSpec& spec, double s, double x, double t, double y, int circle_nodes) {
    spec.validate();
    check_times(s, t);
    check_space(spec, x, y);
    require_domain(circle_nodes >= 8, "contour_crosscheck: need at least 8 circle nodes");
    CrossCheck out;
    if (spec.base.empty()) return out;
    const Plan plan = make_plan(spec, s, x, t, y);
    int nodes = 0;
    out.residue_value = residue_integral(spec, plan, nodes).real();

    const auto pts = spec.base.support();
    const double half_gap = 0.5 * spec.base.min_gap();
    auto f = [&](double v) {
        cplx at, weight;
        plan.node(v, at, weight);
        if (weight == 0.0) return cplx(0.0);
        cplx total = 0.0;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            double r = 0.5 * std::min(half_gap, std::abs(cplx(pts[k]) - at));
            // the Bessel factors have a branch point at the origin
            if (spec.family == NonEqFamily::bessel) r = std::min(r, 0.5 * pts[k]);
            if (!(r > 0.0)) throw DomainError("contour_crosscheck: contour would pass through the point iu");
            cplx sum = 0.0;
            for (int m = 0; m < circle_nodes; ++m) {
                const double th = 2.0 * std::numbers::pi * (m + 0.5) / circle_nodes;
                const cplx dz = std::polar(r, th);
                const cplx z = pts[k] + dz;
                cplx prod = 1.0;
                for (double xj : pts) prod *= 1.0 - (at - z) / (xj - z);
                sum += plan.left(z) * prod / (at - z) * plan.inner(at, z) * dz;
            }
            total += sum / static_cast<double>(circle_nodes);
        }
        return total * weight;
    };
    int cnodes = 0;
    out.contour_value = integrate_doubling(f, plan.range, cnodes).real();
    return out;
}

double rho_hat(int n, double x) {
    require_domain(n >= 1, "rho_hat: N must be >= 1");
    const double edge = 4.0 * std::pow(static_cast<double>(n), 2.0 / 3.0);
    if (x > 0.0 || x <= -edge) return 0.0;
    return std::sqrt(std::max(0.0, -x * (1.0 + x / edge))) / std::numbers::pi;
}

double m_airy(const Configuration& config, double L) {
    require_domain(L > 0.0 && std::isfinite(L), "m_airy: L must be > 0");
    double sum = -2.0 / std::numbers::pi * std::sqrt(L);
    for (const auto& a : config.atoms())
        if (a.x != 0.0 && std::abs(a.x) < L) sum -= a.mult / a.x;
    return sum;
}

}  // namespace dpp
