#pragma once

#include <cmath>
#include <limits>

namespace tsparse::detail {

// Streaming log-sum-exp over positive terms with Neumaier-compensated
// accumulation in the rescaled domain.
class LogSum {
public:
    void add(double log_term) {
        if (log_term == -std::numeric_limits<double>::infinity()) return;
        if (log_term > max_) {
            const double scale = std::exp(max_ - log_term);
            sum_ *= scale;
            comp_ *= scale;
            max_ = log_term;
        }
        const double x = std::exp(log_term - max_);
        const double t = sum_ + x;
        if (std::abs(sum_) >= x) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    /// log of the accumulated sum; -inf when nothing was added.
    double log_value() const {
        if (max_ == -std::numeric_limits<double>::infinity()) return max_;
        return max_ + std::log(sum_ + comp_);
    }

    /// Sum of exp(log_term) relative to the running maximum, i.e. value() / exp(max()).
    double scaled() const { return sum_ + comp_; }
    double max() const { return max_; }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
    double comp_ = 0.0;
};

inline double log_add_exp(double a, double b) {
    if (a < b) std::swap(a, b);
    if (b == -std::numeric_limits<double>::infinity()) return a;
    return a + std::log1p(std::exp(b - a));
}

} // namespace tsparse::detail
