#pragma once

#include <cstddef>
#include <span>

#include "quantfix/quantop.hpp"
#include "quantfix/seqcore.hpp"

namespace quantfix {

struct DriftReport {
  double alpha;
  double theta;
  double integral_value;
  double closed_value;
  double abs_gap;
};

/// S_eps and the derived contraction factor. `s_eps` is +infinity when
/// |eps - 1| >= alpha_theta, in which case `factor` is +infinity as well.
struct ContractionReport {
  double epsilon;
  double s_eps;
  double s_zero;
  double factor;
  double predicted_rate_at_1;
};

enum class BracketKind { SUPER, SUB };

struct BracketCertificate {
  BracketKind kind;
  EnergySequence sequence;
  bool verified;
  /// Worst signed excess against the certificate's inequality; positive
  /// values are violations.
  double max_violation;
  long worst_index;
};

struct AlphaStarCheck {
  double closed;
  double bisected;
  double gap;
};

/// (1/pi) int_0^inf atan2(sin theta, s^alpha + cos theta) ds by adaptive
/// Gauss-Kronrod, split at s = 1. Throws DomainError unless alpha > 1.
double drift_integral(double alpha, const KernelParams& p);

/// sin(theta/alpha) / sin(pi/alpha). Throws DomainError unless alpha > 1.
double drift_closed(double alpha, const KernelParams& p);

DriftReport drift_report(double alpha, const KernelParams& p);

/// Critical exponent 1 + theta/pi, where the drift equals 1.
double alpha_star(const KernelParams& p);

/// Bisection of drift_integral(alpha) = 1 inside [1 + 1e-6, 64], compared with
/// the closed form.
AlphaStarCheck alpha_star_verified(const KernelParams& p);

/// int_0^inf s^-eps / (s^a + 2 cos theta + s^-a) ds with a = alpha_theta,
/// evaluated on [1, inf) in symmetrized form. +infinity if |eps - 1| >= a.
double s_integral(double epsilon, const KernelParams& p);

/// Closed form of s_integral; theta / (a sin theta) at eps = 1.
double s_closed(double epsilon, const KernelParams& p);

ContractionReport contraction_factor(double epsilon, const KernelParams& p);

/// Applies D `steps` times to v_k = k^-eps and returns the geometric ratio of
/// eps-weighted norms fitted over the second half of the run.
double spectral_rate_estimate(const DerivativeMatrix& d, double epsilon, int steps);

/// sup_k |u_k| / min(Ncut^-eps, k^-eps).
double adapted_norm(std::span<const double> u, double epsilon, std::size_t n_cut);
inline double adapted_norm(const LogSequence& u, double epsilon, std::size_t n_cut) {
  return adapted_norm(u.entries, epsilon, n_cut);
}

/// (k + A)^alpha_theta for k <= N; tail k^alpha_theta.
EnergySequence upper_bracket(double shift, std::size_t n, const KernelParams& p);

/// Staircase n^(k - n^2) for k < n^2 and (k - n^2 + n)^alpha_theta after,
/// truncated at N >= n^2; tail k^alpha_theta.
EnergySequence lower_bracket(std::size_t n_param, std::size_t n, const KernelParams& p);

inline constexpr double kDefaultBracketSlack = 1e-8;

/// Evaluates phi_j(X, X_j) - Q_j for all stored j. SUPER certifies
/// phi(X, X) >= Q (hence T(X) <= X), SUB certifies phi(X, X) <= Q.
BracketCertificate verify_bracket(const EnergySequence& x, const QSequence& q,
                                  const KernelParams& p, const OperatorConfig& cfg,
                                  BracketKind kind, double slack = kDefaultBracketSlack);

/// Smallest shift A (to relative resolution `resolution`) for which
/// upper_bracket(A) certifies SUPER, found by doubling then bisection.
/// Throws BracketFailure if none is found below `max_shift`.
double discover_upper_threshold(const QSequence& q, const KernelParams& p,
                                const OperatorConfig& cfg, std::size_t n,
                                double max_shift = 1e6, double resolution = 0.05);

/// Least-squares geometric rate of a decaying error sequence, skipping the
/// first quarter and entries below `floor`.
double fit_geometric_rate(std::span<const double> errors, double floor);

/// Geometric convergence rate of ||x^(n) - reference||_eps along a trace.
double empirical_rate(const IterationTrace& trace, const EnergySequence& reference,
                      double epsilon, double root_tol = 1e-12);

}  // namespace quantfix
