#include "otrepair/solvers.hpp"

#include <array>
#include <cmath>
#include <string>

#include "otrepair/error.hpp"

namespace otrepair {

namespace {

constexpr double kRatioFloor = 1e-300;
constexpr double kRatioCeil = 1e300;

double l1_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += std::abs(a[i] - b[i]);
  return acc;
}

void record_marginals(SolverTrace& trace, const Matrix& gamma, const SimplexVector& p,
                      const SimplexVector& q) {
  trace.row_residuals.push_back(l1_diff(gamma.row_sums(), p.values()));
  trace.col_residuals.push_back(l1_diff(gamma.col_sums(), q.values()));
}

// q-sequence entry: elementwise previous/current iterate, clamped so the
// corrections stay strictly positive and finite. 0/0 means no mass ever
// existed there, so no correction applies.
double correction_ratio(double prev, double cur) {
  if (prev == 0.0 && cur == 0.0) return 1.0;
  const double r = prev / std::max(cur, kRatioFloor);
  return std::min(std::max(r, kRatioFloor), kRatioCeil);
}

void validate_marginals(const SimplexVector& p, const SimplexVector& q, const CostMatrix& cost) {
  if (cost.entries.rows() != p.size() || cost.entries.cols() != q.size())
    throw Error(ErrorKind::Data, "LengthMismatch",
                "cost matrix shape must match the marginal lengths");
}

}  // namespace

SolverResult bregman_baseline(const SimplexVector& p, const SimplexVector& q,
                              const CostMatrix& cost, double epsilon, std::size_t iterations) {
  validate_marginals(p, q, cost);
  if (iterations < 1)
    throw Error(ErrorKind::Config, "TooFewIterations", "baseline needs at least one iteration");

  Matrix gamma = gibbs_kernel(cost, epsilon);
  SolverTrace trace;
  for (std::size_t k = 1; k <= iterations; ++k) {
    gamma = (1 + (k % 2) == 2) ? prox_cols(gamma, q) : prox_rows(gamma, p);
    record_marginals(trace, gamma, p, q);
  }
  trace.iterations = iterations;
  trace.stop_reason = StopReason::MaxIterations;
  return SolverResult{Coupling{std::move(gamma), p.support(), q.support()}, std::move(trace)};
}

SolverResult dykstra_repair(const SimplexVector& p, const SimplexVector& q,
                            const BandConstraint& bc, const CostMatrix& cost, double epsilon,
                            std::size_t iterations, double varepsilon) {
  validate_marginals(p, q, cost);
  if (bc.v.size() != p.size())
    throw Error(ErrorKind::Data, "LengthMismatch", "repair vector must match the support size");
  if (iterations < 4)
    throw Error(ErrorKind::Config, "TooFewIterations", "Dykstra needs at least four iterations");
  if (!(varepsilon > 0.0))
    throw Error(ErrorKind::Config, "NonPositiveVarepsilon", "stop threshold must be positive");

  constexpr int kBandSet = 3;

  Matrix cur = gibbs_kernel(cost, epsilon);
  // Dykstra memory is only needed for the non-affine band set. The marginal
  // sets are affine and their corrections are exactly row/column-constant, so
  // they cancel inside their own projections; accumulating them anyway only
  // compounds numerically until they swamp the positivity floor.
  Matrix band_correction(cur.rows(), cur.cols(), 1.0);

  SolverTrace trace;
  trace.stop_reason = StopReason::MaxIterations;
  std::size_t executed = 0;
  for (std::size_t k = 1; k <= iterations; ++k) {
    const int set = static_cast<int>(1 + (k - 1) % 3);

    // Every KL projection needs a strictly positive reference; repeated
    // scalings can push floored kernel entries to zero, so the floor is
    // re-applied to the projection input. This also keeps every column
    // sign-mixed for the band root equation.
    Matrix candidate = cur;
    if (set == kBandSet) {
      for (std::size_t t = 0; t < candidate.data().size(); ++t)
        candidate.data()[t] =
            std::max(candidate.data()[t] * band_correction.data()[t], kRatioFloor);
      cur = prox_band(candidate, bc);
      for (std::size_t t = 0; t < candidate.data().size(); ++t)
        band_correction.data()[t] = correction_ratio(candidate.data()[t], cur.data()[t]);
    } else {
      for (double& x : candidate.data())
        if (x < kRatioFloor) x = kRatioFloor;
      cur = set == 1 ? prox_rows(candidate, p) : prox_cols(candidate, q);
    }

    const double band = band_residual(cur, bc.v);
    trace.band_residuals.push_back(band);
    record_marginals(trace, cur, p, q);
    executed = k;

    // Right after a band projection the residual only reflects the root
    // finder tolerance, so the stop test is read off the marginal steps where
    // it measures actual convergence.
    if (k >= 4 && set != kBandSet && band < varepsilon) {
      trace.stop_reason = StopReason::BandResidualBelowVarepsilon;
      break;
    }
  }
  trace.iterations = executed;
  return SolverResult{Coupling{std::move(cur), p.support(), q.support()}, std::move(trace)};
}

SolverResult barycentre_coupling(const SimplexVector& p0, const SimplexVector& p1,
                                 const CostMatrix& cost, double epsilon,
                                 std::size_t iterations) {
  if (!same_support(p0.support(), p1.support()))
    throw Error(ErrorKind::Data, "SupportMismatch",
                "barycentre coupling needs both groups on one support");
  return bregman_baseline(p0, p1, cost, epsilon, iterations);
}

namespace {

double round_half_even(double x) {
  const double f = std::floor(x);
  const double frac = x - f;
  if (frac > 0.5) return f + 1.0;
  if (frac < 0.5) return f;
  return std::fmod(f, 2.0) == 0.0 ? f : f + 1.0;
}

}  // namespace

std::pair<Matrix, Matrix> barycentre_maps(const Matrix& gamma_b, double pi0, double pi1,
                                          const Support& support) {
  if (std::abs(pi0 + pi1 - 1.0) > 1e-9 || pi0 < 0.0 || pi1 < 0.0)
    throw Error(ErrorKind::Config, "InvalidBarycentricWeights",
                "barycentric coordinates must be nonnegative and sum to 1");
  if (!support.scalar() || !support.evenly_spaced())
    throw Error(ErrorKind::Data, "UnevenSupport",
                "barycentre index arithmetic needs a scalar evenly spaced support");
  const std::size_t n = support.size();
  if (gamma_b.rows() != n || gamma_b.cols() != n)
    throw Error(ErrorKind::Data, "LengthMismatch", "group coupling must match the support size");

  Matrix to_b0(n, n), to_b1(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double mass = gamma_b(i, j);
      if (mass == 0.0) continue;
      const auto target = static_cast<std::size_t>(
          round_half_even(pi0 * static_cast<double>(i) + pi1 * static_cast<double>(j)));
      to_b0(i, target) += mass;
      to_b1(j, target) += mass;
    }
  }
  return {std::move(to_b0), std::move(to_b1)};
}

}  // namespace otrepair
