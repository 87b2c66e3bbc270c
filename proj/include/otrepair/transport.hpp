#pragma once

#include <span>
#include <vector>

#include "otrepair/distributions.hpp"
#include "otrepair/matrix.hpp"
#include "otrepair/support.hpp"

namespace otrepair {

// Weighted-L1 ground cost: C[i][j] = sum_d rho_d * |src_i[d] - tgt_j[d]|.
struct CostMatrix {
  Matrix entries;
  std::vector<double> weights;
};

// Transport plan between two supports; nonnegative, total mass <= 1 + 1e-9
// and exactly 1 once both marginal equalities are enforced.
struct Coupling {
  Matrix gamma;
  SupportPtr source;
  SupportPtr target;
};

// Band constraint -Lambda <= gamma' V <= Lambda, evaluated on V's active set.
struct BandConstraint {
  BandConstraint(RepairVector v, std::vector<double> lambda);
  RepairVector v;
  std::vector<double> lambda;
};

CostMatrix cost_matrix(const Support& src, const Support& tgt, std::vector<double> weights);

// xi = exp(-C/epsilon), floored at 1e-300 so the KL reference stays strictly
// positive even when small epsilon underflows the far off-diagonal.
Matrix gibbs_kernel(const CostMatrix& cost, double epsilon);

// -sum gamma_ij (log gamma_ij - 1), with 0 log 0 = 0.
double entropy(const Matrix& gamma);

// sum gamma_ij (log(gamma_ij / xi_ij) - 1); zero entries of gamma contribute 0.
double kl_divergence(const Matrix& gamma, const Matrix& xi);

// Closed-form KL projections. Equality variants scale rows/columns onto the
// marginal; _leq variants only scale down; total-mass rescales uniformly;
// capacity clamps elementwise.
Matrix prox_rows(const Matrix& gamma, const SimplexVector& p);
Matrix prox_cols(const Matrix& gamma, const SimplexVector& q);
Matrix prox_rows_leq(const Matrix& gamma, std::span<const double> p);
Matrix prox_cols_leq(const Matrix& gamma, std::span<const double> q);
Matrix prox_total_mass(const Matrix& gamma, double eta);
Matrix prox_capacity(const Matrix& gamma, const Matrix& cap);

// Root of F(x) = sum_{i active} column[i] * V_i * exp(-V_i x) - target, which
// is non-increasing in x. Safeguarded Newton from 0 with doubling bracket
// expansion and bisection fallback; |x| capped at 700/max|V| (the exp
// overflow boundary). Throws RootNotBracketed when no sign change exists
// inside the cap.
double solve_nu(std::span<const double> column, const RepairVector& v, double target);

// KL projection onto the band set. Columns already inside the band and rows
// outside the active set carry over bit-identically; violated columns are
// moved onto the band edge via exp(-V_i nu_j) reweighting.
Matrix prox_band(const Matrix& gamma, const BandConstraint& bc);

// L1 norm of gamma'V over the active set; the solver stop test and the
// S-wise TV bound both read this.
double band_residual(const Matrix& gamma, const RepairVector& v);

}  // namespace otrepair
