#include "quantfix/seqcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace quantfix {

TailModel::TailModel(double amplitude, double exponent)
    : amplitude_(amplitude), exponent_(exponent) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw Error(ErrorCode::InvalidArgument, "tail amplitude must be positive and finite");
  }
  if (!(exponent > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "tail exponent must be positive");
  }
}

double TailModel::value_at(double k) const { return amplitude_ * std::pow(k, exponent_); }

TailModel TailModel::scaled(double factor) const {
  return TailModel(amplitude_ * factor, exponent_);
}

EnergySequence::EnergySequence(std::vector<double> values, TailModel tail)
    : values_(std::move(values)), tail_(tail) {
  if (values_.empty()) {
    throw Error(ErrorCode::InvalidArgument, "sequence needs at least one stored entry");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw Error(ErrorCode::InvalidArgument,
                  "entry " + std::to_string(i + 1) + " is not a positive finite number",
                  static_cast<long>(i + 1));
    }
  }
}

EnergySequence EnergySequence::from_logs(std::span<const double> logs, TailModel tail) {
  std::vector<double> values(logs.size());
  std::transform(logs.begin(), logs.end(), values.begin(),
                 [](double v) { return std::exp(v); });
  return EnergySequence(std::move(values), tail);
}

double EnergySequence::at(std::size_t k) const {
  if (k == 0) throw Error(ErrorCode::InvalidArgument, "sequence index is 1-based");
  if (k <= values_.size()) return values_[k - 1];
  return tail_.value_at(static_cast<double>(k));
}

EnergySequence EnergySequence::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::InvalidArgument, "scale factor must be positive");
  std::vector<double> v(values_);
  for (auto& e : v) e *= factor;
  return EnergySequence(std::move(v), tail_.scaled(factor));
}

WeightedNorm::WeightedNorm(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon >= 0.0)) throw Error(ErrorCode::InvalidArgument, "norm weight must be >= 0");
}

double WeightedNorm::operator()(std::span<const double> v) const {
  double sup = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double k = static_cast<double>(i + 1);
    const double w = epsilon_ == 0.0 ? 1.0 : std::pow(k, epsilon_);
    sup = std::max(sup, w * std::abs(v[i]));
  }
  return sup;
}

LogSequence log_coords(const EnergySequence& x) {
  LogSequence out;
  out.entries.reserve(x.size());
  for (double v : x.values()) out.entries.push_back(std::log(v));
  return out;
}

double weighted_norm(std::span<const double> v, WeightedNorm w) { return w(v); }

Ordering partial_compare(const EnergySequence& a, const EnergySequence& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "cannot compare prefixes of length " +
                                               std::to_string(a.size()) + " and " +
                                               std::to_string(b.size()));
  }
  if (a.tail().exponent() != b.tail().exponent()) {
    throw Error(ErrorCode::InvalidArgument, "compared sequences must share the tail exponent");
  }
  bool le = a.tail().amplitude() <= b.tail().amplitude();
  bool ge = a.tail().amplitude() >= b.tail().amplitude();
  for (std::size_t i = 0; i < a.size() && (le || ge); ++i) {
    le = le && a[i] <= b[i];
    ge = ge && a[i] >= b[i];
  }
  if (le && ge) return Ordering::EQ;
  if (le) return Ordering::LE;
  if (ge) return Ordering::GE;
  return Ordering::INCOMPARABLE;
}

std::vector<double> log_difference(const EnergySequence& a, const EnergySequence& b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::LengthMismatch, "log difference needs equal prefix lengths");
  }
  std::vector<double> d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = std::log(a[i] / b[i]);
  return d;
}

double log_distance(const EnergySequence& a, const EnergySequence& b, double epsilon) {
  return weighted_norm(log_difference(a, b), WeightedNorm(epsilon));
}

}  // namespace quantfix
