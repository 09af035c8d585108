#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace quantfix {

/// Gauss-Legendre rule on [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Nodes via Newton iteration on P_n; exact for polynomials of degree 2n-1.
GaussRule gauss_legendre_unit(std::size_t n);

struct QuadratureResult {
  double value;
  double error_estimate;
};

/// Adaptive tanh-sinh integration of `f` over the finite interval [a, b] to
/// absolute tolerance `abs_tol`. Integrable endpoint singularities are fine.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                    double b, double abs_tol);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept {
    const double t = sum_ + x;
    if (abs(sum_) >= abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  static double abs(double x) noexcept { return x < 0 ? -x : x; }
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace quantfix
