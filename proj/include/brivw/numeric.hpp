#pragma once

#include <cmath>

namespace brivw {

/// Neumaier-compensated accumulator. All reductions in the estimators and
/// the Monte Carlo harness add terms in ascending index order through one
/// of these, which keeps results identical under any worker count.
class CompensatedSum {
public:
    void add(double v) {
        double t = sum_ + v;
        if (std::fabs(sum_) >= std::fabs(v)) {
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

}  // namespace brivw
