#include "quantfix/oscillator.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace quantfix {

std::string_view to_string(Parity parity) noexcept {
  return parity == Parity::EVEN ? "even" : "odd";
}

double nu_constant(int M) {
  if (M < 2) throw Error(ErrorCode::DomainError, "oscillator needs M >= 2");
  const double m = static_cast<double>(M);
  const double alpha = 2.0 * m / (m + 1.0);
  const double base = 2.0 * std::sqrt(std::numbers::pi) * m * std::tgamma(1.5 + 0.5 / m) /
                      std::tgamma(0.5 / m);
  return std::pow(base, alpha);
}

OscillatorProblem build_problem(int M, Parity parity) {
  if (M < 2) throw Error(ErrorCode::DomainError, "oscillator needs M >= 2, got " + std::to_string(M));
  const double m = static_cast<double>(M);
  const double shift = (m - 1.0) / (4.0 * (m + 1.0));
  const double c0 = parity == Parity::EVEN ? -0.75 + shift : -0.25 - shift;
  OscillatorProblem problem{M,
                            parity,
                            KernelParams((m - 1.0) / (m + 1.0) * std::numbers::pi),
                            2.0 * m / (m + 1.0),
                            nu_constant(M),
                            QSequence(c0)};
  problem.q.validate(problem.kernel);
  return problem;
}

EnergySequence seed(const OscillatorProblem& problem, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "seed needs N >= 1");
  const double amplitude = std::pow(2.0, problem.alpha) * problem.nu;
  std::vector<double> values(n);
  for (std::size_t k = 1; k <= n; ++k) {
    values[k - 1] = amplitude * std::pow(static_cast<double>(k), problem.alpha);
  }
  return EnergySequence(std::move(values), TailModel(amplitude, problem.alpha));
}

ParitySolution solve_parity(const OscillatorProblem& problem, const EnergySequence& start,
                            const OperatorConfig& cfg, const StopRule& stop) {
  IterationTrace trace = iterate(start, problem.q, problem.kernel, cfg, stop);
  if (trace.steps() == 0 || trace.residual_sup.back() > stop.target_residual) {
    throw Error(ErrorCode::NoConvergence,
                std::string(to_string(problem.parity)) + " solve did not reach residual " +
                    std::to_string(stop.target_residual) + " within " +
                    std::to_string(stop.max_steps) + " steps");
  }
  EnergySequence fixed = trace.last();
  return {std::move(fixed), std::move(trace)};
}

ParitySolution solve_parity(const OscillatorProblem& problem, const OperatorConfig& cfg,
                            const StopRule& stop) {
  return solve_parity(problem, seed(problem, cfg.truncation), cfg, stop);
}

SpectrumResult merge_spectrum(const EnergySequence& even, const EnergySequence& odd) {
  if (even.size() != odd.size()) {
    throw Error(ErrorCode::LengthMismatch, "parity fixed points must share the truncation");
  }
  std::vector<double> energies;
  energies.reserve(2 * even.size());
  for (std::size_t i = 0; i < even.size(); ++i) {
    energies.push_back(even[i]);
    energies.push_back(odd[i]);
  }
  for (std::size_t i = 1; i < energies.size(); ++i) {
    if (!(energies[i - 1] < energies[i])) {
      throw Error(ErrorCode::InterlacingViolation,
                  "merged spectrum not increasing at level " + std::to_string(i),
                  static_cast<long>(i));
    }
  }
  return SpectrumResult{std::move(energies), even, odd};
}

SpectrumResult solve_spectrum(int M, const OperatorConfig& cfg, const StopRule& stop) {
  const auto even = solve_parity(build_problem(M, Parity::EVEN), cfg, stop);
  const auto odd = solve_parity(build_problem(M, Parity::ODD), cfg, stop);
  SpectrumResult result = merge_spectrum(even.fixed_point, odd.fixed_point);
  result.even_residual = even.trace.residual_sup.back();
  result.odd_residual = odd.trace.residual_sup.back();
  result.even_iterations = even.trace.steps();
  result.odd_iterations = odd.trace.steps();
  return result;
}

}  // namespace quantfix
