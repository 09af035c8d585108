#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "quantfix/seqcore.hpp"

namespace quantfix {

/// Angle 0 < theta < pi of the quantization kernel.
class KernelParams {
 public:
  explicit KernelParams(double theta);

  double theta() const noexcept { return theta_; }
  double sin_theta() const noexcept { return sin_; }
  double cos_theta() const noexcept { return cos_; }

 private:
  double theta_;
  double sin_;
  double cos_;
};

/// Offsets Q_k = k + c0, with optional explicit values for individual k.
class QSequence {
 public:
  explicit QSequence(double c0, std::map<long, double> overrides = {});

  double at(long k) const;
  double c0() const noexcept { return c0_; }
  const std::map<long, double>& overrides() const noexcept { return overrides_; }

  /// Bound on |Q_k - k| over all k.
  double deviation_bound() const noexcept;

  /// Checks Q_k > (k - 1/2) theta/pi: exactly for the closed-form rule (the
  /// inequality is tightest at k = 1 since theta < pi) and numerically for
  /// every override. Throws ConditionViolation carrying the offending k.
  void validate(const KernelParams& kernel) const;

 private:
  double c0_;
  std::map<long, double> overrides_;
};

struct OperatorConfig {
  std::size_t truncation = 500;
  double root_tol = 1e-12;
  int max_root_iters = 200;
  std::size_t tail_quadrature_points = 48;
};

/// atan2(sin theta, E'/E + cos theta): the continuous branch in (0, pi).
double theta_kernel(const KernelParams& p, double e_prime, double e);

/// E E' / (E^2 + 2 cos theta E E' + E'^2), evaluated through min(E/E', E'/E).
double p_kernel(const KernelParams& p, double e, double e_prime);

/// Weighted node set representing sum_k f(X_k): stored entries with weight 1
/// followed by quadrature nodes that replace the sum over k > N by an
/// integral over [N + 1/2, inf) of the tail model.
class KernelSum {
 public:
  KernelSum(const EnergySequence& x, const OperatorConfig& cfg);

  std::span<const double> stored() const noexcept { return stored_; }
  std::span<const double> tail_nodes() const noexcept { return tail_nodes_; }
  std::span<const double> tail_weights() const noexcept { return tail_weights_; }

  /// phi_j(X, y) in units of 1 (the 1/pi factor included).
  double phi(const KernelParams& p, double y) const;
  /// d phi_j / d ln(y).
  double phi_log_derivative(const KernelParams& p, double y) const;
  /// Both of the above in one pass.
  std::pair<double, double> phi_and_derivative(const KernelParams& p, double y) const;
  /// sum_k P(X_k, y), split into stored part and tail part.
  std::pair<double, double> p_mass(const KernelParams& p, double y) const;

 private:
  std::vector<double> stored_;
  std::vector<double> tail_nodes_;
  std::vector<double> tail_weights_;
};

double phi_component(const EnergySequence& x, double y, const KernelParams& p,
                     const OperatorConfig& cfg);

double phi_derivative(const EnergySequence& x, double y, const KernelParams& p,
                      const OperatorConfig& cfg);

/// Solves phi_j(X, Y_j) = Q_j for j = 1..N. Each component is an independent
/// scalar root in ln Y_j (safeguarded Newton with geometric bisection). The
/// output keeps the input's tail model.
EnergySequence apply_T(const EnergySequence& x, const QSequence& q, const KernelParams& p,
                       const OperatorConfig& cfg);

/// Truncated derivative of T in logarithmic coordinates at x with y = T(x).
class DerivativeMatrix {
 public:
  DerivativeMatrix(std::size_t n, std::vector<double> entries, std::vector<double> row_defect);

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return entries_[i * n_ + j]; }
  std::span<const double> row(std::size_t i) const noexcept {
    return std::span<const double>(entries_).subspan(i * n_, n_);
  }
  std::span<const double> row_defect() const noexcept { return row_defect_; }

  /// w = D v for a perturbation v of the stored prefix (tail unperturbed).
  std::vector<double> apply(std::span<const double> v) const;

 private:
  std::size_t n_;
  std::vector<double> entries_;
  std::vector<double> row_defect_;
};

DerivativeMatrix dt_matrix(const EnergySequence& x, const EnergySequence& y,
                           const KernelParams& p, const OperatorConfig& cfg);

struct StopRule {
  int max_steps = 200;
  double target_residual = 1e-10;
  double rate_epsilon = 1.0;
};

struct IterationTrace {
  std::vector<EnergySequence> iterates;  ///< X^(0), X^(1), ...
  std::vector<double> residual_sup;       ///< ||x^(n+1) - x^(n)||_0
  std::vector<double> residual_weighted;  ///< ||x^(n+1) - x^(n)||_eps
  double rate_epsilon = 1.0;

  std::size_t steps() const noexcept { return residual_sup.size(); }
  const EnergySequence& last() const { return iterates.back(); }
};

IterationTrace iterate(const EnergySequence& x0, const QSequence& q, const KernelParams& p,
                       const OperatorConfig& cfg, const StopRule& stop);

}  // namespace quantfix
