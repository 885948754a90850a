#include "dpp/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dpp/error.hpp"
#include "dpp/quadrature.hpp"

namespace dpp::specfun {

namespace {

using ld = long double;
using cld = std::complex<long double>;

constexpr double pi = std::numbers::pi;
constexpr ld kEps = std::numeric_limits<ld>::epsilon();

// Ai(0) = 3^{-2/3}/Gamma(2/3), -Ai'(0) = 3^{-1/3}/Gamma(1/3)
constexpr ld kAi0 = 0.355028053887817239260063186004183176L;
constexpr ld kAip0 = 0.258819403792806798405183560189203963L;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

AiryValues airy_series(double xd) {
    const ld x = xd;
    const ld x3 = x * x * x;
    // f = sum a_k x^{3k}, g = sum b_k x^{3k+1}
    ld a = 1.0L, b = x;
    ld f = a, g = b;
    ld fp = 0.0L, gp = 1.0L;
    for (int k = 1; k < 200; ++k) {
        a *= x3 / ((3.0L * k - 1.0L) * (3.0L * k));
        b *= x3 / ((3.0L * k) * (3.0L * k + 1.0L));
        f += a;
        g += b;
        if (x != 0.0L) {
            fp += 3.0L * k * a / x;
            gp += (3.0L * k + 1.0L) * b / x;
        }
        if (std::abs(a) + std::abs(b) < kEps * (std::abs(f) + std::abs(g)) * 1e-3L) break;
    }
    return {static_cast<double>(kAi0 * f - kAip0 * g),
            static_cast<double>(kAi0 * fp - kAip0 * gp)};
}

// x <= -8: Ai(-z) ~ pi^{-1/2} z^{-1/4} [cos(zeta - pi/4) P + sin(zeta - pi/4) Q]
AiryValues airy_asymptotic_negative(double x) {
    const double z = -x;
    const double zeta = 2.0 / 3.0 * z * std::sqrt(z);
    double u = 1.0;  // u_k / zeta^k
    double uP = 1.0, uQ = 0.0, vP = 1.0, vQ = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 200; ++k) {
        u *= (6.0 * k - 5.0) * (6.0 * k - 3.0) * (6.0 * k - 1.0) / ((2.0 * k - 1.0) * 216.0 * k) / zeta;
        const double v = -(6.0 * k + 1.0) / (6.0 * k - 1.0) * u;
        if (std::abs(u) > prev || std::abs(u) < 1e-17) break;
        prev = std::abs(u);
        const double sign = ((k / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) {
            uP += sign * u;
            vP += sign * v;
        } else {
            uQ += sign * u;
            vQ += sign * v;
        }
    }
    const double phase = zeta - 0.25 * pi;
    const double c = std::cos(phase), s = std::sin(phase);
    const double z4 = std::pow(z, 0.25);
    const double ai = (c * uP + s * uQ) / (std::sqrt(pi) * z4);
    const double aip = z4 / std::sqrt(pi) * (s * vP - c * vQ);
    return {ai, aip};
}

// x > 2: Ai(x) = e^{-zeta}/pi int_0^inf e^{-sqrt(x) t^2} cos(t^3/3) dt.
AiryValues airy_integral_positive(double x) {
    const double sx = std::sqrt(x);
    const double zeta = 2.0 / 3.0 * x * sx;
    if (zeta > 740.0) return {0.0, 0.0};
    const double upper = std::sqrt(43.0 / sx);
    const auto rule = quad::composite_gauss_legendre(32, 0.0, upper, 8);
    double i0 = 0.0, i2 = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k) {
        const double t = rule.nodes[k];
        const double w = rule.weights[k] * std::exp(-sx * t * t) * std::cos(t * t * t / 3.0);
        i0 += w;
        i2 += w * t * t;
    }
    const double e = std::exp(-zeta) / pi;
    const double ai = e * i0;
    const double aip = -sx * ai - e * i2 / (2.0 * sx);
    return {ai, aip};
}

// Power series for J_nu in extended precision; nu not a negative integer.
SpecFunResult bessel_j_series(double nu, double z) {
    const ld half = static_cast<ld>(z) / 2.0L;
    const ld q = half * half;
    ld term;
    if (z == 0.0) {
        if (nu == 0.0) return {1.0, 0.0};
        if (nu > 0.0) return {0.0, 0.0};
        return {std::numeric_limits<double>::infinity(), 0.0};
    }
    term = std::pow(half, static_cast<ld>(nu)) / std::tgamma(static_cast<ld>(nu) + 1.0L);
    ld sum = term;
    ld abs_sum = std::abs(term);
    for (int n = 1; n < 500; ++n) {
        term *= -q / (static_cast<ld>(n) * (static_cast<ld>(n) + nu));
        sum += term;
        abs_sum += std::abs(term);
        if (std::abs(term) <= kEps * std::abs(sum) * 1e-2L && n > q) break;
    }
    return {static_cast<double>(sum), static_cast<double>(4.0L * kEps * abs_sum) + 1e-17 * std::abs(static_cast<double>(sum))};
}

// Hankel expansion for large z.
SpecFunResult bessel_j_asymptotic(double nu, double z) {
    const double mu = 4.0 * nu * nu;
    double P = 1.0, Q = 0.0;
    double a = 1.0;
    double last = 0.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 100; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = a * (mu - odd * odd) / (k * 8.0 * z);
        if (std::abs(next) > prev) break;
        a = next;
        prev = std::abs(a);
        last = std::abs(a);
        const double sign = (((k - (k % 2)) / 2) % 2 == 0) ? 1.0 : -1.0;
        if (k % 2 == 0) P += sign * a;
        else Q += sign * a;
        if (std::abs(a) < 1e-17) break;
    }
    const double omega = z - (0.5 * nu + 0.25) * pi;
    const double amp = std::sqrt(2.0 / (pi * z));
    const double value = amp * (P * std::cos(omega) - Q * std::sin(omega));
    return {value, amp * (last + 1e-16 * (std::abs(P) + std::abs(Q)) * (1.0 + std::abs(omega)))};
}

SpecFunResult bessel_j_general(double nu, double z) {
    if (is_nonpositive_integer(nu) && nu != 0.0) {
        // J_{-m} = (-1)^m J_m
        const int m = static_cast<int>(-nu);
        auto r = bessel_j_general(-nu, z);
        if (m % 2 == 1) r.value = -r.value;
        return r;
    }
    if (z <= 16.0 || std::abs(nu) >= z) return bessel_j_series(nu, z);
    if (z >= 2.0 * nu * nu) return bessel_j_asymptotic(nu, z);
    // Hankel at a base order in [0,1), then three-term recurrence to nu.
    // Both directions are neutrally stable while |order| < z.
    const double base = nu - std::floor(nu);
    const int steps = static_cast<int>(std::lround(nu - base));
    auto lo = bessel_j_asymptotic(base, z);
    auto hi = bessel_j_asymptotic(base + 1.0, z);
    double err = lo.abs_error_estimate + hi.abs_error_estimate;
    if (steps >= 0) {
        double a = lo.value, b = hi.value;
        for (int k = 0; k < steps; ++k) {
            const double order = base + 1.0 + k;
            const double c = 2.0 * order / z * b - a;
            a = b;
            b = c;
            err *= 1.0 + 2.0 * order / z;
        }
        return {a, err + 1e-16 * std::abs(a)};
    }
    double a = lo.value, b = hi.value;  // J_{base}, J_{base+1}
    for (int k = 0; k < -steps; ++k) {
        const double order = base - k;
        const double c = 2.0 * order / z * a - b;
        b = a;
        a = c;
        err *= 1.0 + 2.0 * std::abs(order) / z;
    }
    return {a, err + 1e-16 * std::abs(a)};
}

// sum_k (-1)^k a_k(nu) / x^k for the exponentially scaled I_nu.
double bessel_i_asymptotic_sum(double nu, double x) {
    const double mu = 4.0 * nu * nu;
    double a = 1.0, sum = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 100; ++k) {
        const double odd = 2.0 * k - 1.0;
        const double next = -a * (mu - odd * odd) / (k * 8.0 * x);
        if (std::abs(next) > prev) break;
        a = next;
        prev = std::abs(a);
        sum += a;
        if (std::abs(a) < 1e-17) break;
    }
    return sum;
}

cld i_series(double nu, cld z) {
    const cld half = z / 2.0L;
    const cld q = half * half;
    cld term = std::exp(static_cast<ld>(nu) * std::log(half)) / std::tgamma(static_cast<ld>(nu) + 1.0L);
    cld sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= q / (static_cast<ld>(n) * (static_cast<ld>(n) + nu));
        sum += term;
        if (std::abs(term) <= kEps * std::abs(sum) * 1e-2L && n > std::abs(q)) break;
    }
    return sum;
}

}  // namespace

AiryValues airy(double x) {
    require_domain(std::isfinite(x), "airy: argument must be finite");
    if (x <= -8.0) return airy_asymptotic_negative(x);
    if (x <= 2.0) return airy_series(x);
    return airy_integral_positive(x);
}

SpecFunResult bessel_j_detailed(double nu, double z) {
    require_domain(nu > -1.0, "bessel_j: order must exceed -1");
    require_domain(z >= 0.0 && std::isfinite(z), "bessel_j: argument must be finite and >= 0");
    auto r = bessel_j_general(nu, z);
    if (!std::isfinite(r.value)) throw DomainError("bessel_j: J_nu(0) is infinite for nu < 0");
    return r;
}

double bessel_j(double nu, double z) { return bessel_j_detailed(nu, z).value; }

double bessel_j_any_order(double nu, double z) {
    require_domain(z >= 0.0 && std::isfinite(z), "bessel_j: argument must be finite and >= 0");
    return bessel_j_general(nu, z).value;
}

double bessel_j_deriv(double nu, double z) {
    if (z == 0.0) {
        if (nu == 0.0) return 0.0;
        if (nu == 1.0) return 0.5;
        if (nu > 1.0) return 0.0;
        return std::numeric_limits<double>::infinity();
    }
    return 0.5 * (bessel_j_any_order(nu - 1.0, z) - bessel_j_any_order(nu + 1.0, z));
}

std::complex<double> bessel_i(double nu, std::complex<double> z) {
    require_domain(nu > -1.0, "bessel_i: order must exceed -1");
    if (z == std::complex<double>(0.0, 0.0)) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw DomainError("bessel_i: I_nu(0) is infinite for nu < 0");
    }
    if (std::abs(z) <= 20.0) {
        const cld r = i_series(nu, cld(z.real(), z.imag()));
        return {static_cast<double>(r.real()), static_cast<double>(r.imag())};
    }
    // I_nu(z) ~ e^z/sqrt(2 pi z) sum (-1)^k a_k/z^k
    //          + i s e^{i s nu pi} e^{-z}/sqrt(2 pi z) sum a_k/z^k,  s = sign(Im z)
    const double mu = 4.0 * nu * nu;
    std::complex<double> a = 1.0, s1 = 1.0, s2 = 1.0;
    double prev = std::numeric_limits<double>::infinity();
    for (int k = 1; k < 100; ++k) {
        const double odd = 2.0 * k - 1.0;
        const std::complex<double> next = a * (mu - odd * odd) / (k * 8.0 * z);
        if (std::abs(next) > prev) break;
        a = next;
        prev = std::abs(a);
        s1 += ((k % 2) ? -1.0 : 1.0) * a;
        s2 += a;
        if (std::abs(a) < 1e-17) break;
    }
    const double s = (z.imag() >= 0.0) ? 1.0 : -1.0;
    const std::complex<double> root = std::sqrt(2.0 * pi * z);
    const std::complex<double> i(0.0, 1.0);
    return std::exp(z) / root * s1 + i * s * std::exp(i * s * nu * pi) * std::exp(-z) / root * s2;
}

double bessel_i_scaled(double nu, double x) {
    require_domain(nu > -1.0, "bessel_i: order must exceed -1");
    require_domain(x >= 0.0 && std::isfinite(x), "bessel_i_scaled: argument must be finite and >= 0");
    if (x == 0.0) {
        if (nu == 0.0) return 1.0;
        if (nu > 0.0) return 0.0;
        throw DomainError("bessel_i: I_nu(0) is infinite for nu < 0");
    }
    if (x <= 25.0) {
        const cld r = i_series(nu, cld(x, 0.0L));
        return static_cast<double>(r.real() * std::exp(-static_cast<ld>(x)));
    }
    return bessel_i_asymptotic_sum(nu, x) / std::sqrt(2.0 * pi * x);
}

std::complex<double> bessel_i_entire(double nu, std::complex<double> z) {
    if (std::abs(z) <= 100.0) {
        const cld zl(z.real(), z.imag());
        cld term = 1.0L / std::tgamma(static_cast<ld>(nu) + 1.0L);
        cld sum = term;
        for (int n = 1; n < 2000; ++n) {
            term *= zl / (static_cast<ld>(n) * (static_cast<ld>(n) + nu));
            sum += term;
            if (std::abs(term) <= kEps * std::abs(sum) * 1e-2L && n > 2.0 * std::sqrt(std::abs(z))) break;
        }
        return {static_cast<double>(sum.real()), static_cast<double>(sum.imag())};
    }
    if (z.imag() == 0.0) return bessel_i_entire(nu, z.real());
    const std::complex<double> w = 2.0 * std::sqrt(z);
    return std::pow(z, -0.5 * nu) * bessel_i(nu, w);
}

double bessel_i_entire(double nu, double z) {
    if (z == 0.0) return rgamma(nu + 1.0);
    if (z < 0.0) {
        const double a = std::sqrt(-z);
        return std::pow(-z, -0.5 * nu) * bessel_j_any_order(nu, 2.0 * a);
    }
    if (z <= 100.0) return bessel_i_entire(nu, std::complex<double>(z, 0.0)).real();
    const double w = 2.0 * std::sqrt(z);
    return std::exp(w - 0.5 * nu * std::log(z)) * bessel_i_scaled(nu, w);
}

double rgamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    return 1.0 / std::tgamma(x);
}

double gauss_tail(double a) {
    require_domain(!std::isnan(a), "gauss_tail: argument is NaN");
    return 0.5 * std::erfc(a / std::numbers::sqrt2);
}

double hermite(int k, double x) {
    require_domain(k >= 0, "hermite: degree must be >= 0");
    double h0 = 1.0;
    if (k == 0) return h0;
    double h1 = 2.0 * x;
    for (int n = 1; n < k; ++n) {
        const double h2 = 2.0 * x * h1 - 2.0 * n * h0;
        h0 = h1;
        h1 = h2;
        if (!std::isfinite(h1)) throw ConvergenceError("hermite: recurrence overflow");
    }
    return h1;
}

double laguerre(int k, double nu, double x) {
    require_domain(k >= 0, "laguerre: degree must be >= 0");
    require_domain(nu > -1.0, "laguerre: parameter must exceed -1");
    double l0 = 1.0;
    if (k == 0) return l0;
    double l1 = 1.0 + nu - x;
    for (int n = 1; n < k; ++n) {
        const double l2 = ((2.0 * n + 1.0 + nu - x) * l1 - (n + nu) * l0) / (n + 1.0);
        l0 = l1;
        l1 = l2;
        if (!std::isfinite(l1)) throw ConvergenceError("laguerre: recurrence overflow");
    }
    return l1;
}

double orthopoly(PolyKind kind, int k, double x, double nu) {
    return kind == PolyKind::hermite ? hermite(k, x) : laguerre(k, nu, x);
}

// The polynomial part is carried separately from the weight and rescaled
// when it grows, so tails far beyond the turning point do not underflow
// to zero through the weight alone.
void hermite_functions(double x, std::span<double> out) {
    if (out.empty()) return;
    double log_pre = -0.5 * x * x - 0.25 * std::log(pi);
    double p0 = 1.0;
    out[0] = std::exp(log_pre);
    if (out.size() == 1) return;
    double p1 = std::numbers::sqrt2 * x;
    out[1] = p1 * std::exp(log_pre);
    for (std::size_t k = 1; k + 1 < out.size(); ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = std::sqrt(2.0 / (kk + 1.0)) * x * p1 - std::sqrt(kk / (kk + 1.0)) * p0;
        p0 = p1;
        p1 = p2;
        if (std::abs(p1) > 1e150) {
            p0 *= 1e-150;
            p1 *= 1e-150;
            log_pre += 150.0 * std::numbers::ln10;
        }
        out[k + 1] = p1 * std::exp(log_pre);
    }
}

void laguerre_functions(double nu, double x, std::span<double> out) {
    require_domain(nu > -1.0, "laguerre: parameter must exceed -1");
    require_domain(x >= 0.0, "laguerre functions are defined on x >= 0");
    if (out.empty()) return;
    if (x == 0.0 && nu < 0.0) throw DomainError("laguerre function diverges at 0 for nu < 0");
    if (x == 0.0 && nu > 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        return;
    }
    double log_pre = (x == 0.0 ? 0.0 : 0.5 * nu * std::log(x)) - 0.5 * x - 0.5 * std::lgamma(nu + 1.0);
    double p0 = 1.0;
    out[0] = std::exp(log_pre);
    if (out.size() == 1) return;
    double p1 = (1.0 + nu - x) / std::sqrt(nu + 1.0);
    out[1] = p1 * std::exp(log_pre);
    for (std::size_t k = 1; k + 1 < out.size(); ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk + 1.0 + nu - x) * p1 - std::sqrt(kk * (kk + nu)) * p0) /
                          std::sqrt((kk + 1.0) * (kk + nu + 1.0));
        p0 = p1;
        p1 = p2;
        if (std::abs(p1) > 1e150) {
            p0 *= 1e-150;
            p1 *= 1e-150;
            log_pre += 150.0 * std::numbers::ln10;
        }
        out[k + 1] = p1 * std::exp(log_pre);
    }
}

double hermite_function(int k, double x) {
    require_domain(k >= 0, "hermite_function: degree must be >= 0");
    std::vector<double> v(static_cast<std::size_t>(k) + 1);
    hermite_functions(x, v);
    return v.back();
}

double laguerre_function(int k, double nu, double x) {
    require_domain(k >= 0, "laguerre_function: degree must be >= 0");
    std::vector<double> v(static_cast<std::size_t>(k) + 1);
    laguerre_functions(nu, x, v);
    return v.back();
}

}  // namespace dpp::specfun
