#pragma once

#include <cmath>

namespace flevy {

/// Gamma function via the Lanczos approximation (g = 7, nine terms) with
/// reflection for x < 1/2. Relative error below 1e-13 away from poles.
double gamma_fn(double x);

/// log|Gamma(x)| for x > 0.
double log_gamma(double x);

/// Beta function B(a, b) for a, b > 0.
double beta_fn(double a, double b);

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double v) {
        const double t = sum_ + v;
        if (std::abs(sum_) >= std::abs(v))
            comp_ += (sum_ - t) + v;
        else
            comp_ += (v - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double v) {
        add(v);
        return *this;
    }
    double value() const { return sum_ + comp_; }
    void merge(const CompensatedSum& other) {
        add(other.sum_);
        add(other.comp_);
    }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace flevy
