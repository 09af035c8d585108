#include "quantfix/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "quantfix/error.hpp"
#include "quantfix/oscillator.hpp"

namespace quantfix::oracle {

namespace {

using Potential = std::function<double(double)>;

// Number of eigenvalues strictly below x (LDL^T pivot signs).
std::size_t sturm_count(const std::vector<double>& diag, double off2, double x) {
  std::size_t count = 0;
  double d = 1.0;
  for (std::size_t i = 0; i < diag.size(); ++i) {
    d = diag[i] - x - (i == 0 ? 0.0 : off2 / d);
    if (d == 0.0) d = -std::numeric_limits<double>::min();
    if (d < 0.0) ++count;
  }
  return count;
}

// Domain half-width with L^(2M) >= 4 E_max and at least `decay` units of
// WKB attenuation beyond the outermost turning point.
double pick_halfwidth(const Potential& v, double e_max, double power) {
  const double decay = 22.0;
  double turning = 0.0;
  while (v(turning) < e_max) turning += 1e-3;
  double l = std::max(turning, std::pow(4.0 * e_max, 1.0 / power));
  const double dq = 1e-3;
  double action = 0.0;
  for (double q = turning; q < l; q += dq) action += std::sqrt(std::max(0.0, v(q + 0.5 * dq) - e_max)) * dq;
  while (action < decay) {
    action += std::sqrt(std::max(0.0, v(l + 0.5 * dq) - e_max)) * dq;
    l += dq;
  }
  return l;
}

EigenEstimate extrapolated_eigs(const Potential& v, std::size_t count, double l,
                                const OracleConfig& cfg) {
  if (cfg.grid_points < 64) throw Error(ErrorCode::InvalidArgument, "oracle needs >= 64 grid points");
  if (cfg.refinement_levels < 1) throw Error(ErrorCode::InvalidArgument, "need >= 1 refinement level");
  if (count == 0 || count * 8 > cfg.grid_points) {
    throw Error(ErrorCode::InvalidArgument, "eigenvalue count must be well below the grid size");
  }
  const auto levels = static_cast<std::size_t>(cfg.refinement_levels);
  // table[l][i]: eigenvalue i at level l; Richardson in h^2.
  std::vector<std::vector<double>> table(levels);
  std::size_t intervals = cfg.grid_points + 1;
  for (std::size_t lvl = 0; lvl < levels; ++lvl, intervals *= 2) {
    const double h = 2.0 * l / static_cast<double>(intervals);
    const double inv_h2 = 1.0 / (h * h);
    std::vector<double> diag(intervals - 1);
    for (std::size_t i = 0; i < diag.size(); ++i) {
      const double q = -l + h * static_cast<double>(i + 1);
      diag[i] = 2.0 * inv_h2 + v(q);
    }
    table[lvl] = tridiagonal_lowest(diag, -inv_h2, count);
  }
  EigenEstimate out;
  out.halfwidth = l;
  out.values.resize(count);
  out.level_gaps.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    std::vector<double> prev(levels);
    for (std::size_t lvl = 0; lvl < levels; ++lvl) prev[lvl] = table[lvl][i];
    double finest = prev.back();
    double second = levels > 1 ? prev[levels - 2] : prev.back();
    // Neville-style tableau; after column m the last two entries are the
    // two finest extrapolants of that order.
    for (std::size_t m = 1; m < levels; ++m) {
      const double factor = std::pow(4.0, static_cast<double>(m)) - 1.0;
      std::vector<double> next(levels - m);
      for (std::size_t lvl = 0; lvl + m < levels; ++lvl) {
        next[lvl] = prev[lvl + 1] + (prev[lvl + 1] - prev[lvl]) / factor;
      }
      second = prev.back();
      finest = next.back();
      prev = std::move(next);
    }
    out.values[i] = finest;
    out.level_gaps[i] = std::abs(finest - second);
  }
  for (std::size_t i = 0; i < count; ++i) {
    if (out.level_gaps[i] > cfg.tolerance * std::abs(out.values[i])) {
      throw Error(ErrorCode::ResolutionError,
                  "eigenvalue " + std::to_string(i) + " not resolved: finest levels differ by " +
                      std::to_string(out.level_gaps[i]),
                  static_cast<long>(i));
    }
  }
  return out;
}

}  // namespace

std::vector<double> tridiagonal_lowest(const std::vector<double>& diagonal, double off_diagonal,
                                       std::size_t count) {
  if (count > diagonal.size()) throw Error(ErrorCode::InvalidArgument, "count exceeds matrix size");
  const double off2 = off_diagonal * off_diagonal;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (double d : diagonal) {
    lo = std::min(lo, d - 2.0 * std::abs(off_diagonal));
    hi = std::max(hi, d + 2.0 * std::abs(off_diagonal));
  }
  std::vector<double> out(count);
  double floor = lo;
  for (std::size_t i = 0; i < count; ++i) {
    double a = floor;
    double b = hi;
    while (true) {
      const double mid = 0.5 * (a + b);
      if (!(mid > a && mid < b)) break;
      if (sturm_count(diagonal, off2, mid) > i) {
        b = mid;
      } else {
        a = mid;
      }
    }
    out[i] = 0.5 * (a + b);
    floor = a;
  }
  return out;
}

EigenEstimate hamiltonian_eigs_detailed(int M, std::size_t count, const OracleConfig& cfg) {
  if (M < 2) throw Error(ErrorCode::DomainError, "oracle potential needs M >= 2");
  const double power = 2.0 * M;
  const Potential v = [power](double q) { return std::pow(std::abs(q), power); };
  const double alpha = 2.0 * M / (M + 1.0);
  // E_k ~ nu (k + 1/2)^alpha, with a margin for the low-order correction.
  const double e_max = 1.5 * nu_constant(M) * std::pow(static_cast<double>(count) + 0.5, alpha);
  const double l = cfg.halfwidth > 0.0 ? cfg.halfwidth : pick_halfwidth(v, e_max, power);
  return extrapolated_eigs(v, count, l, cfg);
}

std::vector<double> hamiltonian_eigs(int M, std::size_t count, const OracleConfig& cfg) {
  return hamiltonian_eigs_detailed(M, count, cfg).values;
}

std::vector<double> harmonic_sanity_eigs(std::size_t count, const OracleConfig& cfg) {
  const Potential v = [](double q) { return q * q; };
  const double e_max = 2.0 * static_cast<double>(count) + 1.0;
  const double l = cfg.halfwidth > 0.0 ? cfg.halfwidth : pick_halfwidth(v, e_max, 2.0);
  return extrapolated_eigs(v, count, l, cfg).values;
}

std::pair<std::vector<double>, std::vector<double>> parity_split(const std::vector<double>& energies) {
  for (std::size_t i = 1; i < energies.size(); ++i) {
    if (!(energies[i - 1] < energies[i])) {
      throw Error(ErrorCode::NotSorted, "energies must be strictly increasing",
                  static_cast<long>(i));
    }
  }
  std::pair<std::vector<double>, std::vector<double>> out;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    (i % 2 == 0 ? out.first : out.second).push_back(energies[i]);
  }
  return out;
}

}  // namespace quantfix::oracle
