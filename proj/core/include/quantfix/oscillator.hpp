#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "quantfix/quantop.hpp"
#include "quantfix/seqcore.hpp"

namespace quantfix {

enum class Parity { EVEN, ODD };

std::string_view to_string(Parity parity) noexcept;

/// Quantization data for -d^2/dq^2 + q^(2M) restricted to one parity.
struct OscillatorProblem {
  int M;
  Parity parity;
  KernelParams kernel;
  double alpha;  ///< 2M/(M+1) = 1 + theta/pi
  double nu;     ///< lim k^-alpha E_k
  QSequence q;
};

/// (2 sqrt(pi) M Gamma(3/2 + 1/(2M)) / Gamma(1/(2M)))^alpha.
double nu_constant(int M);

/// theta = (M-1) pi/(M+1); Q_k = k - 3/4 + (M-1)/(4(M+1)) for even parity and
/// k - 1/4 - (M-1)/(4(M+1)) for odd. Throws ConditionViolation if Q fails
/// the positivity condition, DomainError if M < 2.
OscillatorProblem build_problem(int M, Parity parity);

/// 2^alpha nu k^alpha with the same power as tail model.
EnergySequence seed(const OscillatorProblem& problem, std::size_t n);

struct ParitySolution {
  EnergySequence fixed_point;
  IterationTrace trace;
};

/// Iterates T from `start` until the sup-log residual drops below
/// stop.target_residual. Throws NoConvergence (with the step count) if the
/// step budget runs out first.
ParitySolution solve_parity(const OscillatorProblem& problem, const EnergySequence& start,
                            const OperatorConfig& cfg, const StopRule& stop);

/// Same, starting from seed(problem, cfg.truncation).
ParitySolution solve_parity(const OscillatorProblem& problem, const OperatorConfig& cfg,
                            const StopRule& stop);

struct SpectrumResult {
  std::vector<double> energies;  ///< E_0 < E_1 < ...
  EnergySequence even_fixed_point;
  EnergySequence odd_fixed_point;
  double even_residual = 0.0;
  double odd_residual = 0.0;
  std::size_t even_iterations = 0;
  std::size_t odd_iterations = 0;
};

/// Interleaves E_{2i-2} = even_i and E_{2i-1} = odd_i. Throws
/// InterlacingViolation unless the merged list is strictly increasing.
SpectrumResult merge_spectrum(const EnergySequence& even, const EnergySequence& odd);

/// Solves both parities of the M problem and merges them.
SpectrumResult solve_spectrum(int M, const OperatorConfig& cfg, const StopRule& stop);

}  // namespace quantfix
