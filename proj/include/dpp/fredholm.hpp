#pragma once

#include <functional>
#include <memory>
#include <variant>
#include <vector>

#include "dpp/extended_kernels.hpp"
#include "dpp/noneq_kernels.hpp"
#include "dpp/static_kernels.hpp"

namespace dpp {

// A test function f on a compact window [a, b], zero outside. The operator
// sees chi = e^f - 1.
class TestFunction {
public:
    enum class Kind { zero, indicator, log_linear, sampled };

    static TestFunction zero();
    // chi = z on [a, b]; z = -1 is f = -infinity (a gap event).
    static TestFunction indicator(double a, double b, double z);
    // f(x) = c0 + c1 x on [a, b]
    static TestFunction log_linear(double a, double b, double c0, double c1);
    // f sampled at equally spaced knots a = x_0 < ... < x_K = b, joined by a
    // monotone piecewise cubic (PCHIP).
    static TestFunction sampled(double a, double b, std::vector<double> values);
    static TestFunction from_function(const std::function<double(double)>& f, double a, double b, int knots);

    Kind kind() const { return kind_; }
    double lower() const { return a_; }
    double upper() const { return b_; }
    bool is_zero() const { return kind_ == Kind::zero; }

    double f(double x) const;
    double chi(double x) const;
    // panel boundaries on which chi is smooth
    std::vector<double> breakpoints() const;

private:
    Kind kind_ = Kind::zero;
    double a_ = 0.0, b_ = 0.0;
    double z_ = 0.0, c0_ = 0.0, c1_ = 0.0;
    std::vector<double> knots_;
    std::shared_ptr<const std::function<double(double)>> spline_;
};

using AnyKernel = std::variant<StaticKernel, ExtendedKernel, NonEqKernelSpec>;

// K(s, x; t, y); a static kernel ignores the times.
double eval_any(const AnyKernel& k, double s, double x, double t, double y);
bool any_half_line(const AnyKernel& k);

struct FredholmProblem {
    AnyKernel kernel = StaticKernel::sine();
    std::vector<double> times;
    std::vector<TestFunction> functions;  // one per time
    int nodes = 16;        // starting Gauss-Legendre order per panel
    int max_nodes = 512;   // per panel
    double cauchy_tol = 1e-8;

    void validate() const;
};

struct FredholmResult {
    double value = 0.0;
    int nodes_used = 0;  // matrix dimension of the accepted discretization
    double cauchy_gap = 0.0;
};

// det(delta + K chi) on the product of the windows, with the per-panel order
// doubled until two successive determinants agree to cauchy_tol.
FredholmResult mgf_detailed(const FredholmProblem& problem);
double mgf(const FredholmProblem& problem);

// det(I - K) on [a, b] with the symmetric weighting sqrt(w) K sqrt(w).
FredholmResult gap_probability_detailed(const StaticKernel& k, double a, double b, int nodes = 16,
                                        double cauchy_tol = 1e-8);
double gap_probability(const StaticKernel& k, double a, double b, int nodes = 16);

}  // namespace dpp
