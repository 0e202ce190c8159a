#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

namespace tracekit {

// Gauss-Legendre rule on [-1, 1].
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Rules are computed once per order and shared (thread-safe).
const GaussLegendre& gauss_legendre(int n);

// Composite rule on [a, b]: `panels` equal panels with an n-point rule each.
struct CompositeRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
CompositeRule composite_gauss_legendre(double a, double b, int panels, int n);

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(double x) {
    double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      comp_ += (sum_ - t) + x;
    else
      comp_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace tracekit
