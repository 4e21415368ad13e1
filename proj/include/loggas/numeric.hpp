#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>

namespace loggas {

/// Neumaier compensated accumulator. Safe when terms vary wildly in
/// magnitude; value() folds the carried compensation back in.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }
  void reset(double v = 0.0) {
    sum_ = v;
    comp_ = 0.0;
  }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// Compensated total of a range.
double compensated_total(std::span<const double> xs);

/// Adaptive Simpson quadrature for a finite integrand on [a, b].
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-10);

}  // namespace loggas
