#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "otrepair/transport.hpp"

namespace otrepair {

enum class StopReason { MaxIterations, BandResidualBelowVarepsilon };

// Per-iteration diagnostics. Histories are aligned with iterations executed;
// band_residuals stays empty for solvers without a band constraint.
struct SolverTrace {
  std::size_t iterations = 0;
  std::vector<double> band_residuals;
  std::vector<double> row_residuals;
  std::vector<double> col_residuals;
  StopReason stop_reason = StopReason::MaxIterations;
};

struct SolverResult {
  Coupling coupling;
  SolverTrace trace;
};

// Iterative Bregman projections for the plain entropic OT problem: start from
// the Gibbs kernel and alternate column/row marginal projections for K steps.
SolverResult bregman_baseline(const SimplexVector& p, const SimplexVector& q,
                              const CostMatrix& cost, double epsilon, std::size_t iterations);

// Dykstra's algorithm with KL projections onto {rows = P}, {cols = Q} and the
// repair band. The first three iterations are plain projections; afterwards
// the auxiliary q-sequence multiplies the iterate before each projection and
// the run stops early once ||gamma'V||_1 drops below varepsilon.
SolverResult dykstra_repair(const SimplexVector& p, const SimplexVector& q,
                            const BandConstraint& bc, const CostMatrix& cost, double epsilon,
                            std::size_t iterations, double varepsilon);

// Entropic coupling between the two group conditionals (rows = group s0,
// columns = group s1); the barycentre splitting maps are derived from it.
SolverResult barycentre_coupling(const SimplexVector& p0, const SimplexVector& p1,
                                 const CostMatrix& cost, double epsilon,
                                 std::size_t iterations);

// Splits the group coupling into per-group transport plans toward the
// barycentre: mass gamma_b[i][j] lands at index round(pi0*i + pi1*j)
// (half-to-even, collisions accumulated). Requires a scalar evenly spaced
// support so index arithmetic is meaningful.
std::pair<Matrix, Matrix> barycentre_maps(const Matrix& gamma_b, double pi0, double pi1,
                                          const Support& support);

}  // namespace otrepair
