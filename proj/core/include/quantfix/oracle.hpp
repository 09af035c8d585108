#pragma once

#include <cstddef>
#include <functional>
#include <utility>
#include <vector>

namespace quantfix::oracle {

/// Finite-difference discretization settings. `grid_points` is the interior
/// point count of the coarsest level; each refinement halves the spacing.
/// A non-positive `halfwidth` selects the domain automatically.
struct OracleConfig {
  std::size_t grid_points = 599;
  double halfwidth = 0.0;
  int refinement_levels = 4;
  double tolerance = 1e-8;  ///< relative agreement required of the two finest estimates
};

struct EigenEstimate {
  std::vector<double> values;      ///< extrapolated, ascending
  std::vector<double> level_gaps;  ///< |finest - next finest| extrapolant, per eigenvalue
  double halfwidth = 0.0;
};

/// Lowest `count` eigenvalues of -u'' + q^(2M) u on the real line, from
/// second-order central differences with Dirichlet ends at +-L, Richardson
/// extrapolated over the refinement levels. Throws ResolutionError when the
/// two finest extrapolants disagree beyond cfg.tolerance (relative).
EigenEstimate hamiltonian_eigs_detailed(int M, std::size_t count, const OracleConfig& cfg);
std::vector<double> hamiltonian_eigs(int M, std::size_t count, const OracleConfig& cfg);

/// Same discretization for -u'' + q^2 u; exact levels are 1, 3, 5, ...
/// Exists to test the discretization itself.
std::vector<double> harmonic_sanity_eigs(std::size_t count, const OracleConfig& cfg);

/// Lowest `count` eigenvalues of the symmetric tridiagonal matrix with the
/// given diagonal and constant off-diagonal, by Sturm-sequence bisection.
std::vector<double> tridiagonal_lowest(const std::vector<double>& diagonal, double off_diagonal,
                                       std::size_t count);

/// Splits an increasing spectrum into even (positions 0, 2, ...) and odd
/// (positions 1, 3, ...) parts. Throws NotSorted unless strictly increasing.
std::pair<std::vector<double>, std::vector<double>> parity_split(const std::vector<double>& energies);

}  // namespace quantfix::oracle
