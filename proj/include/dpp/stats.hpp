#pragma once

#include <boost/accumulators/accumulators.hpp>
#include <boost/accumulators/statistics/count.hpp>
#include <boost/accumulators/statistics/mean.hpp>
#include <boost/accumulators/statistics/stats.hpp>
#include <boost/accumulators/statistics/variance.hpp>
#include <cmath>

namespace dpp {

// Sample mean with its standard error.
class MeanEstimator {
public:
    void add(double x) { acc_(x); }
    std::size_t count() const { return boost::accumulators::count(acc_); }
    double mean() const { return boost::accumulators::mean(acc_); }
    // unbiased sample variance
    double variance() const {
        const double n = static_cast<double>(count());
        return n > 1 ? boost::accumulators::variance(acc_) * n / (n - 1.0) : 0.0;
    }
    double se() const {
        const double n = static_cast<double>(count());
        return n > 1 ? std::sqrt(variance() / n) : 0.0;
    }

private:
    boost::accumulators::accumulator_set<
        double, boost::accumulators::stats<boost::accumulators::tag::count, boost::accumulators::tag::mean,
                                           boost::accumulators::tag::variance>>
        acc_;
};

// |a - b| in units of the combined standard error of two independent estimates.
inline double z_score(double a, double se_a, double b, double se_b) {
    const double s = std::sqrt(se_a * se_a + se_b * se_b);
    return s > 0.0 ? std::abs(a - b) / s : (a == b ? 0.0 : INFINITY);
}

}  // namespace dpp
