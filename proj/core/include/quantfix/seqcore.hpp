#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "quantfix/error.hpp"

namespace quantfix {

/// Power-law extrapolation `amplitude * k^exponent` standing in for the
/// entries k > N that a truncated sequence does not store.
///
/// Summability of the kernel tail needs exponent > 1; that is checked where
/// the tail is summed (ErrorCode::TailDivergence), not here.
class TailModel {
 public:
  TailModel(double amplitude, double exponent);

  double amplitude() const noexcept { return amplitude_; }
  double exponent() const noexcept { return exponent_; }
  double value_at(double k) const;
  TailModel scaled(double factor) const;

  friend bool operator==(const TailModel&, const TailModel&) = default;

 private:
  double amplitude_;
  double exponent_;
};

/// Finite prefix X_1..X_N of a positive sequence plus its tail model.
/// Storage is 0-based; `at(k)` uses the 1-based sequence index and falls back
/// to the tail for k > N.
class EnergySequence {
 public:
  EnergySequence(std::vector<double> values, TailModel tail);

  /// Builds a sequence from logarithmic coordinates.
  static EnergySequence from_logs(std::span<const double> logs, TailModel tail);

  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  const TailModel& tail() const noexcept { return tail_; }
  double at(std::size_t k) const;
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// Multiplies prefix and tail amplitude by `factor` (> 0).
  EnergySequence scaled(double factor) const;

 private:
  std::vector<double> values_;
  TailModel tail_;
};

/// Natural logarithms of a stored prefix.
struct LogSequence {
  std::vector<double> entries;

  std::size_t size() const noexcept { return entries.size(); }
};

/// Weight exponent of the norm sup_k k^eps |v_k|.
class WeightedNorm {
 public:
  explicit WeightedNorm(double epsilon);
  double epsilon() const noexcept { return epsilon_; }
  double operator()(std::span<const double> v) const;

 private:
  double epsilon_;
};

enum class Ordering { LE, GE, EQ, INCOMPARABLE };

LogSequence log_coords(const EnergySequence& x);

double weighted_norm(std::span<const double> v, WeightedNorm w);
inline double weighted_norm(const LogSequence& v, WeightedNorm w) {
  return weighted_norm(v.entries, w);
}

/// Entrywise order on prefixes and tail amplitudes. Exact comparison, no
/// tolerance.
Ordering partial_compare(const EnergySequence& a, const EnergySequence& b);

/// log(a_k) - log(b_k) over the shared prefix.
std::vector<double> log_difference(const EnergySequence& a, const EnergySequence& b);

/// ||log a - log b||_eps over the prefix.
double log_distance(const EnergySequence& a, const EnergySequence& b,
                    double epsilon = 0.0);

}  // namespace quantfix
