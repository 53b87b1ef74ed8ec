#pragma once

#include <cmath>
#include <limits>

namespace helium {

/// Streaming log(sum_i exp(x_i)) with a running max shift, so terms spanning
/// thousands of decades neither overflow nor underflow.
class LogSumAccumulator {
public:
    void add(double log_term) noexcept
    {
        if (log_term == -std::numeric_limits<double>::infinity()) return;
        if (log_term > max_) {
            sum_ = sum_ * std::exp(max_ - log_term) + 1.0;
            max_ = log_term;
        } else {
            sum_ += std::exp(log_term - max_);
        }
    }

    void merge(const LogSumAccumulator& other) noexcept
    {
        if (other.empty()) return;
        if (other.max_ > max_) {
            sum_ = sum_ * std::exp(max_ - other.max_) + other.sum_;
            max_ = other.max_;
        } else {
            sum_ += other.sum_ * std::exp(other.max_ - max_);
        }
    }

    bool empty() const noexcept { return sum_ == 0.0; }

    /// -inf when empty.
    double value() const noexcept
    {
        if (empty()) return -std::numeric_limits<double>::infinity();
        return max_ + std::log(sum_);
    }

private:
    double max_ = -std::numeric_limits<double>::infinity();
    double sum_ = 0.0;
};

} // namespace helium
