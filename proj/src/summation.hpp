#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace levysde::detail {

// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v)
    {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v)) {
            comp_ += (sum_ - t) + v;
        } else {
            comp_ += (v - t) + sum_;
        }
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedSums {
public:
    explicit CompensatedSums(std::size_t size) : sums_(size) {}
    void add(std::size_t i, double v) { sums_[i].add(v); }
    double value(std::size_t i) const { return sums_[i].value(); }
    std::size_t size() const { return sums_.size(); }

private:
    std::vector<CompensatedSum> sums_;
};

} // namespace levysde::detail
