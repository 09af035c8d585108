#include "quantfix/quantop.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "quantfix/parallel.hpp"
#include "quantfix/quadrature.hpp"

namespace quantfix {

namespace {

constexpr double kPi = std::numbers::pi;

// Largest factor by which a bracket end may move away from the initial guess.
constexpr double kMaxBracketFactor = 18446744073709551616.0;  // 2^64
constexpr double kBracketStep = 8.0;

}  // namespace

KernelParams::KernelParams(double theta)
    : theta_(theta), sin_(std::sin(theta)), cos_(std::cos(theta)) {
  if (!(theta > 0.0 && theta < kPi)) {
    throw Error(ErrorCode::DomainError, "kernel angle must lie in (0, pi)");
  }
}

QSequence::QSequence(double c0, std::map<long, double> overrides)
    : c0_(c0), overrides_(std::move(overrides)) {
  for (const auto& [k, v] : overrides_) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "Q override index must be >= 1", k);
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "Q override not finite", k);
  }
}

double QSequence::at(long k) const {
  if (auto it = overrides_.find(k); it != overrides_.end()) return it->second;
  return static_cast<double>(k) + c0_;
}

double QSequence::deviation_bound() const noexcept {
  double bound = std::abs(c0_);
  for (const auto& [k, v] : overrides_) bound = std::max(bound, std::abs(v - static_cast<double>(k)));
  return bound;
}

void QSequence::validate(const KernelParams& kernel) const {
  const double ratio = kernel.theta() / kPi;
  // k + c0 > (k - 1/2) ratio  <=>  k (1 - ratio) + c0 + ratio/2 > 0, increasing in k.
  // Overridden indices are checked individually, so the closed form must hold
  // at the smallest index it actually serves.
  long first_closed = 1;
  while (overrides_.contains(first_closed)) ++first_closed;
  const double kc = static_cast<double>(first_closed);
  if (!(kc * (1.0 - ratio) + c0_ + 0.5 * ratio > 0.0)) {
    throw Error(ErrorCode::ConditionViolation,
                "Q_k > (k - 1/2) theta/pi fails for the closed-form offsets at k = " +
                    std::to_string(first_closed),
                first_closed);
  }
  for (const auto& [k, v] : overrides_) {
    if (!(v > (static_cast<double>(k) - 0.5) * ratio)) {
      throw Error(ErrorCode::ConditionViolation,
                  "Q_k > (k - 1/2) theta/pi fails at k = " + std::to_string(k), k);
    }
  }
}

double theta_kernel(const KernelParams& p, double e_prime, double e) {
  return std::atan2(p.sin_theta(), e_prime / e + p.cos_theta());
}

double p_kernel(const KernelParams& p, double e, double e_prime) {
  double r = e_prime / e;
  if (r > 1.0) r = e / e_prime;
  return r / (1.0 + r * (2.0 * p.cos_theta() + r));
}

KernelSum::KernelSum(const EnergySequence& x, const OperatorConfig& cfg)
    : stored_(x.values().begin(), x.values().end()) {
  const double beta = x.tail().exponent();
  if (!(beta > 1.0)) {
    throw Error(ErrorCode::TailDivergence,
                "tail exponent " + std::to_string(beta) + " does not exceed 1");
  }
  // s = s0 u^{-1/(beta-1)} maps [s0, inf) onto (0, 1]; the integrand of a
  // kernel decaying like s^-beta becomes bounded as u -> 0.
  const GaussRule rule = gauss_legendre_unit(cfg.tail_quadrature_points);
  const double s0 = static_cast<double>(x.size()) + 0.5;
  const double inv = 1.0 / (beta - 1.0);
  tail_nodes_.reserve(rule.nodes.size());
  tail_weights_.reserve(rule.nodes.size());
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double u = rule.nodes[i];
    const double s = s0 * std::pow(u, -inv);
    const double jac = s * inv / u;
    tail_nodes_.push_back(x.tail().value_at(s));
    tail_weights_.push_back(rule.weights[i] * jac);
  }
}

double KernelSum::phi(const KernelParams& p, double y) const {
  const double inv_y = 1.0 / y;
  CompensatedSum sum;
  for (double xk : stored_) sum.add(std::atan2(p.sin_theta(), xk * inv_y + p.cos_theta()));
  for (std::size_t i = 0; i < tail_nodes_.size(); ++i) {
    sum.add(tail_weights_[i] * std::atan2(p.sin_theta(), tail_nodes_[i] * inv_y + p.cos_theta()));
  }
  return sum.value() / kPi;
}

std::pair<double, double> KernelSum::p_mass(const KernelParams& p, double y) const {
  CompensatedSum stored;
  for (double xk : stored_) stored.add(p_kernel(p, xk, y));
  CompensatedSum tail;
  for (std::size_t i = 0; i < tail_nodes_.size(); ++i) {
    tail.add(tail_weights_[i] * p_kernel(p, tail_nodes_[i], y));
  }
  return {stored.value(), tail.value()};
}

double KernelSum::phi_log_derivative(const KernelParams& p, double y) const {
  const auto [stored, tail] = p_mass(p, y);
  return p.sin_theta() / kPi * (stored + tail);
}

std::pair<double, double> KernelSum::phi_and_derivative(const KernelParams& p, double y) const {
  const double inv_y = 1.0 / y;
  const double s = p.sin_theta();
  const double c = p.cos_theta();
  CompensatedSum phi;
  double mass = 0.0;
  auto accumulate = [&](double xk, double w) {
    const double r = xk * inv_y;
    phi.add(w * std::atan2(s, r + c));
    const double q = r > 1.0 ? 1.0 / r : r;
    mass += w * (q / (1.0 + q * (2.0 * c + q)));
  };
  for (double xk : stored_) accumulate(xk, 1.0);
  for (std::size_t i = 0; i < tail_nodes_.size(); ++i) accumulate(tail_nodes_[i], tail_weights_[i]);
  return {phi.value() / kPi, s / kPi * mass};
}

double phi_component(const EnergySequence& x, double y, const KernelParams& p,
                     const OperatorConfig& cfg) {
  return KernelSum(x, cfg).phi(p, y);
}

double phi_derivative(const EnergySequence& x, double y, const KernelParams& p,
                      const OperatorConfig& cfg) {
  return KernelSum(x, cfg).phi_log_derivative(p, y);
}

namespace {

// Finds Y with |phi(X, Y) - target| <= tol. phi is strictly increasing in Y.
double solve_component(const KernelSum& ks, const KernelParams& p, double target, double guess,
                       const OperatorConfig& cfg, long index) {
  auto residual = [&](double y) {
    auto [phi, dphi] = ks.phi_and_derivative(p, y);
    return std::pair{phi - target, dphi};
  };

  auto [f, df] = residual(guess);
  if (std::abs(f) <= cfg.root_tol) return guess;

  // Bracket [lo, hi] with f(lo) < 0 < f(hi).
  double lo = guess, hi = guess, f_lo = f, f_hi = f;
  double y = guess, fy = f, dfy = df;
  if (f < 0.0) {
    f_hi = f;
    while (f_hi < 0.0) {
      lo = hi;
      f_lo = f_hi;
      hi *= kBracketStep;
      if (hi / guess > kMaxBracketFactor || !std::isfinite(hi)) {
        throw Error(ErrorCode::BracketFailure,
                    "no upper bracket for component " + std::to_string(index), index);
      }
      std::tie(f_hi, std::ignore) = residual(hi);
    }
  } else {
    f_lo = f;
    while (f_lo > 0.0) {
      hi = lo;
      f_hi = f_lo;
      lo /= kBracketStep;
      if (guess / lo > kMaxBracketFactor || !(lo > 0.0)) {
        throw Error(ErrorCode::BracketFailure,
                    "no lower bracket for component " + std::to_string(index), index);
      }
      std::tie(f_lo, std::ignore) = residual(lo);
    }
  }
  if (std::abs(f_lo) <= cfg.root_tol) return lo;
  if (std::abs(f_hi) <= cfg.root_tol) return hi;

  double best = std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
  double best_f = std::min(std::abs(f_lo), std::abs(f_hi));
  for (int iter = 0; iter < cfg.max_root_iters; ++iter) {
    // Newton in ln Y from the current point, falling back to the geometric
    // midpoint when the step leaves the bracket.
    double next = y * std::exp(-fy / dfy);
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = std::sqrt(lo) * std::sqrt(hi);
    if (!(next > lo && next < hi)) {
      // Bracket collapsed to adjacent doubles: the root is resolved to
      // machine precision.
      return best;
    }
    y = next;
    std::tie(fy, dfy) = residual(y);
    if (std::abs(fy) < best_f) {
      best = y;
      best_f = std::abs(fy);
    }
    if (std::abs(fy) <= cfg.root_tol) return y;
    if (fy < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
  }
  throw Error(ErrorCode::NoConvergence,
              "root solve for component " + std::to_string(index) + " exceeded " +
                  std::to_string(cfg.max_root_iters) + " iterations",
              index);
}

}  // namespace

EnergySequence apply_T(const EnergySequence& x, const QSequence& q, const KernelParams& p,
                       const OperatorConfig& cfg) {
  if (!(cfg.root_tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "root_tol must be positive");
  q.validate(p);
  const KernelSum ks(x, cfg);
  std::vector<double> y(x.size());
  parallel_for(x.size(), [&](std::size_t i) {
    const long k = static_cast<long>(i + 1);
    y[i] = solve_component(ks, p, q.at(k), x[i], cfg, k);
  });
  return EnergySequence(std::move(y), x.tail());
}

DerivativeMatrix::DerivativeMatrix(std::size_t n, std::vector<double> entries,
                                   std::vector<double> row_defect)
    : n_(n), entries_(std::move(entries)), row_defect_(std::move(row_defect)) {
  if (entries_.size() != n_ * n_ || row_defect_.size() != n_) {
    throw Error(ErrorCode::LengthMismatch, "derivative matrix storage does not match its size");
  }
}

std::vector<double> DerivativeMatrix::apply(std::span<const double> v) const {
  if (v.size() != n_) throw Error(ErrorCode::LengthMismatch, "vector length differs from matrix size");
  std::vector<double> w(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    const auto r = row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < n_; ++j) acc += r[j] * v[j];
    w[i] = acc;
  }
  return w;
}

DerivativeMatrix dt_matrix(const EnergySequence& x, const EnergySequence& y,
                           const KernelParams& p, const OperatorConfig& cfg) {
  if (x.size() != y.size()) throw Error(ErrorCode::LengthMismatch, "dt_matrix needs |X| = |Y|");
  const KernelSum ks(x, cfg);
  const std::size_t n = x.size();
  std::vector<double> entries(n * n);
  std::vector<double> defect(n);
  parallel_for(n, [&](std::size_t i) {
    const double yi = y[i];
    const auto [stored, tail] = ks.p_mass(p, yi);
    const double z = stored + tail;
    for (std::size_t j = 0; j < n; ++j) entries[i * n + j] = p_kernel(p, x[j], yi) / z;
    defect[i] = tail / z;
  });
  return DerivativeMatrix(n, std::move(entries), std::move(defect));
}

IterationTrace iterate(const EnergySequence& x0, const QSequence& q, const KernelParams& p,
                       const OperatorConfig& cfg, const StopRule& stop) {
  IterationTrace trace;
  trace.rate_epsilon = stop.rate_epsilon;
  trace.iterates.push_back(x0);
  for (int step = 1; step <= stop.max_steps; ++step) {
    try {
      trace.iterates.push_back(apply_T(trace.iterates.back(), q, p, cfg));
    } catch (const Error& e) {
      throw e.at_step(step);
    }
    const auto& prev = trace.iterates[trace.iterates.size() - 2];
    const auto diff = log_difference(trace.iterates.back(), prev);
    trace.residual_sup.push_back(weighted_norm(diff, WeightedNorm(0.0)));
    trace.residual_weighted.push_back(weighted_norm(diff, WeightedNorm(stop.rate_epsilon)));
    if (trace.residual_sup.back() <= stop.target_residual) break;
  }
  return trace;
}

}  // namespace quantfix
