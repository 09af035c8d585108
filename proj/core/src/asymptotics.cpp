#include "quantfix/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "quantfix/quadrature.hpp"

namespace quantfix {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadTol = 1e-13;

void require_alpha(double alpha) {
  if (!(alpha > 1.0)) {
    throw Error(ErrorCode::DomainError,
                "drift is finite only for alpha > 1, got " + std::to_string(alpha));
  }
}

// atan(t)/t, stable as t -> 0.
double atan_ratio(double t) { return t < 1e-8 ? 1.0 - t * t / 3.0 : std::atan(t) / t; }

double least_squares_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i], my += ys[i];
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace

double drift_integral(double alpha, const KernelParams& p) {
  require_alpha(alpha);
  const double s = p.sin_theta();
  const double c = p.cos_theta();
  auto near = [&](double x) { return std::atan2(s, std::pow(x, alpha) + c); };
  // On [1, inf) put x = u^{-1/(alpha-1)}: dx = x^alpha du / (alpha - 1), and
  // the integrand tends to sin(theta)/(alpha - 1) as u -> 0.
  auto far = [&](double u) {
    const double big = std::pow(u, -alpha / (alpha - 1.0));
    const double t = s / (big + c);
    return s * atan_ratio(t) / (1.0 + c / big) / (alpha - 1.0);
  };
  const double lower = integrate_adaptive(near, 0.0, 1.0, kQuadTol).value;
  const double upper = integrate_adaptive(far, 0.0, 1.0, kQuadTol).value;
  return (lower + upper) / kPi;
}

double drift_closed(double alpha, const KernelParams& p) {
  require_alpha(alpha);
  return std::sin(p.theta() / alpha) / std::sin(kPi / alpha);
}

DriftReport drift_report(double alpha, const KernelParams& p) {
  DriftReport r{alpha, p.theta(), drift_integral(alpha, p), drift_closed(alpha, p), 0.0};
  r.abs_gap = std::abs(r.integral_value - r.closed_value);
  return r;
}

double alpha_star(const KernelParams& p) { return 1.0 + p.theta() / kPi; }

AlphaStarCheck alpha_star_verified(const KernelParams& p) {
  // D_alpha is strictly decreasing from +inf (alpha -> 1) to theta/pi < 1.
  // The bracket is grown outward so that quadratures near alpha = 1, where
  // the integrand is nearly a step, are only reached when needed.
  double lo = 1.5;
  double hi = 2.0;
  while (drift_integral(hi, p) > 1.0 && hi < 64.0) lo = hi, hi *= 2.0;
  while (drift_integral(lo, p) <= 1.0 && lo - 1.0 > 1e-6) hi = lo, lo = 1.0 + 0.5 * (lo - 1.0);
  for (int i = 0; i < 200 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (drift_integral(mid, p) > 1.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double bisected = 0.5 * (lo + hi);
  const double closed = alpha_star(p);
  return {closed, bisected, std::abs(closed - bisected)};
}

double s_integral(double epsilon, const KernelParams& p) {
  const double a = alpha_star(p);
  const double dev = std::abs(epsilon - 1.0);
  if (dev >= a) return kInf;
  const double c2 = 2.0 * p.cos_theta();
  // Symmetrized integrand on [1, inf) decays like x^-gamma; substitute
  // x = u^{-1/(gamma-1)} so that dx = x^gamma du / (gamma - 1).
  const double m = 1.0 - dev;  // min(eps, 2 - eps)
  const double gamma = a + m;
  auto f = [&](double u) {
    const double x = std::pow(u, -1.0 / (gamma - 1.0));
    // x^(m - eps) + x^(m + eps - 2), whose exponents are 0 and -2|eps - 1|.
    const double num = 1.0 + std::pow(x, -2.0 * dev);
    const double inv = std::pow(x, -a);
    return num / (1.0 + inv * (c2 + inv)) / (gamma - 1.0);
  };
  return integrate_adaptive(f, 0.0, 1.0, kQuadTol).value;
}

double s_closed(double epsilon, const KernelParams& p) {
  const double a = alpha_star(p);
  const double x = 1.0 - epsilon;
  if (std::abs(x) >= a) return kInf;
  const double pref = kPi / (a * p.sin_theta());
  if (x == 0.0) return p.theta() / (a * p.sin_theta());
  return pref * std::sin(x * p.theta() / a) / std::sin(x * kPi / a);
}

ContractionReport contraction_factor(double epsilon, const KernelParams& p) {
  ContractionReport r{};
  r.epsilon = epsilon;
  r.s_eps = s_closed(epsilon, p);
  r.s_zero = s_closed(0.0, p);
  r.factor = std::isfinite(r.s_eps) ? r.s_eps / r.s_zero : kInf;
  r.predicted_rate_at_1 = alpha_star(p) - 1.0;
  return r;
}

double fit_geometric_rate(std::span<const double> errors, double floor) {
  const std::size_t skip = (errors.size() + 3) / 4;
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t n = skip; n < errors.size(); ++n) {
    if (errors[n] < floor || !(errors[n] > 0.0)) continue;
    xs.push_back(static_cast<double>(n));
    ys.push_back(std::log(errors[n]));
  }
  if (xs.size() < 2) {
    throw Error(ErrorCode::InsufficientData,
                "fewer than two error samples in the geometric regime");
  }
  return std::exp(least_squares_slope(xs, ys));
}

double spectral_rate_estimate(const DerivativeMatrix& d, double epsilon, int steps) {
  if (steps < 2) throw Error(ErrorCode::InsufficientData, "need at least two power steps");
  const WeightedNorm norm(epsilon);
  std::vector<double> v(d.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = std::pow(static_cast<double>(k + 1), -epsilon);
  // v is renormalized every step; log_scale carries the discarded magnitude.
  double log_scale = 0.0;
  std::vector<double> xs;
  std::vector<double> ys;
  for (int t = 0; t <= steps; ++t) {
    const double nv = norm(v);
    if (!(nv > 0.0) || !std::isfinite(nv)) break;
    if (t >= steps / 2) {
      xs.push_back(static_cast<double>(t));
      ys.push_back(log_scale + std::log(nv));
    }
    if (t == steps) break;
    for (auto& e : v) e /= nv;
    log_scale += std::log(nv);
    v = d.apply(v);
  }
  if (xs.size() < 2) throw Error(ErrorCode::InsufficientData, "power iteration degenerated");
  return std::exp(least_squares_slope(xs, ys));
}

double adapted_norm(std::span<const double> u, double epsilon, std::size_t n_cut) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::InvalidArgument, "adapted norm needs eps > 0");
  const double floor_weight = std::pow(static_cast<double>(n_cut), -epsilon);
  double sup = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double w = std::min(floor_weight, std::pow(static_cast<double>(i + 1), -epsilon));
    sup = std::max(sup, std::abs(u[i]) / w);
  }
  return sup;
}

EnergySequence upper_bracket(double shift, std::size_t n, const KernelParams& p) {
  if (!(shift >= 0.0)) throw Error(ErrorCode::InvalidArgument, "shift A must be >= 0");
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "truncation must be >= 1");
  const double a = alpha_star(p);
  std::vector<double> values(n);
  for (std::size_t k = 1; k <= n; ++k) values[k - 1] = std::pow(static_cast<double>(k) + shift, a);
  // Tail k^a: the leading asymptotics of (k + A)^a, and never above it.
  return EnergySequence(std::move(values), TailModel(1.0, a));
}

EnergySequence lower_bracket(std::size_t n_param, std::size_t n, const KernelParams& p) {
  if (n_param < 2) throw Error(ErrorCode::DomainError, "staircase parameter must be >= 2");
  const std::size_t corner = n_param * n_param;
  if (n < corner) {
    throw Error(ErrorCode::DomainError, "truncation " + std::to_string(n) +
                                            " shorter than staircase corner " +
                                            std::to_string(corner));
  }
  const double a = alpha_star(p);
  const double base = static_cast<double>(n_param);
  std::vector<double> values(n);
  for (std::size_t k = 1; k <= n; ++k) {
    values[k - 1] = k < corner
                        ? std::pow(base, static_cast<double>(k) - static_cast<double>(corner))
                        : std::pow(static_cast<double>(k - corner) + base, a);
  }
  // Tail k^a: the leading asymptotics of the staircase, and never below it.
  return EnergySequence(std::move(values), TailModel(1.0, a));
}

BracketCertificate verify_bracket(const EnergySequence& x, const QSequence& q,
                                  const KernelParams& p, const OperatorConfig& cfg,
                                  BracketKind kind, double slack) {
  const KernelSum ks(x, cfg);
  double worst = -kInf;
  long worst_index = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long j = static_cast<long>(i + 1);
    const double excess = ks.phi(p, x[i]) - q.at(j);
    const double violation = kind == BracketKind::SUPER ? -excess : excess;
    if (violation > worst) {
      worst = violation;
      worst_index = j;
    }
  }
  return BracketCertificate{kind, x, worst <= slack, worst, worst_index};
}

double discover_upper_threshold(const QSequence& q, const KernelParams& p,
                                const OperatorConfig& cfg, std::size_t n, double max_shift,
                                double resolution) {
  auto certified = [&](double shift) {
    return verify_bracket(upper_bracket(shift, n, p), q, p, cfg, BracketKind::SUPER).verified;
  };
  if (certified(0.0)) return 0.0;
  double hi = 1.0;
  while (!certified(hi)) {
    hi *= 2.0;
    if (hi > max_shift) {
      throw Error(ErrorCode::BracketFailure, "no super-solution shift below " +
                                                 std::to_string(max_shift));
    }
  }
  double lo = hi == 1.0 ? 0.0 : hi / 2.0;
  while (hi - lo > resolution * hi) {
    const double mid = 0.5 * (lo + hi);
    if (certified(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double empirical_rate(const IterationTrace& trace, const EnergySequence& reference,
                      double epsilon, double root_tol) {
  if (trace.iterates.size() < 4) {
    throw Error(ErrorCode::InsufficientData, "rate fit needs at least four iterates");
  }
  std::vector<double> errors;
  errors.reserve(trace.iterates.size());
  for (const auto& it : trace.iterates) errors.push_back(log_distance(it, reference, epsilon));
  return fit_geometric_rate(errors, 100.0 * root_tol);
}

}  // namespace quantfix
