#include "otrepair/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "otrepair/error.hpp"

namespace otrepair {

namespace {
constexpr double kKernelFloor = 1e-300;
constexpr double kExpCap = 700.0;  // exp(700) ~ 1e304, still finite
}  // namespace

BandConstraint::BandConstraint(RepairVector v_in, std::vector<double> lambda_in)
    : v(std::move(v_in)), lambda(std::move(lambda_in)) {
  if (lambda.size() != v.size())
    throw Error(ErrorKind::Data, "LengthMismatch", "lambda length must match the support");
  for (double l : lambda)
    if (!(l >= 0.0))
      throw Error(ErrorKind::Config, "NegativeLambda", "band bounds must be nonnegative");
}

CostMatrix cost_matrix(const Support& src, const Support& tgt, std::vector<double> weights) {
  if (src.dimension() != tgt.dimension())
    throw Error(ErrorKind::Data, "DimensionMismatch",
                "source and target supports have different feature dimensions");
  if (weights.size() != src.dimension())
    throw Error(ErrorKind::Data, "DimensionMismatch",
                "cost weights length must equal the feature dimension");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorKind::Config, "NonPositiveWeight", "cost weights must be strictly positive");

  Matrix c(src.size(), tgt.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    const auto& a = src.point(i);
    for (std::size_t j = 0; j < tgt.size(); ++j) {
      const auto& b = tgt.point(j);
      double acc = 0.0;
      for (std::size_t d = 0; d < weights.size(); ++d) acc += weights[d] * std::abs(a[d] - b[d]);
      c(i, j) = acc;
    }
  }
  return CostMatrix{std::move(c), std::move(weights)};
}

Matrix gibbs_kernel(const CostMatrix& cost, double epsilon) {
  if (!(epsilon > 0.0))
    throw Error(ErrorKind::Config, "NonPositiveEpsilon", "entropic regularizer must be positive");
  Matrix xi(cost.entries.rows(), cost.entries.cols());
  for (std::size_t k = 0; k < xi.data().size(); ++k)
    xi.data()[k] = std::max(std::exp(-cost.entries.data()[k] / epsilon), kKernelFloor);
  return xi;
}

double entropy(const Matrix& gamma) {
  double acc = 0.0;
  for (double g : gamma.data())
    if (g > 0.0) acc -= g * (std::log(g) - 1.0);
  return acc;
}

double kl_divergence(const Matrix& gamma, const Matrix& xi) {
  if (!gamma.same_shape(xi))
    throw Error(ErrorKind::Data, "DimensionMismatch", "KL arguments must share a shape");
  double acc = 0.0;
  for (std::size_t k = 0; k < gamma.data().size(); ++k) {
    const double x = xi.data()[k];
    if (!(x > 0.0))
      throw Error(ErrorKind::Data, "NonPositiveReference",
                  "KL reference matrix must be strictly positive");
    const double g = gamma.data()[k];
    if (g > 0.0) acc += g * (std::log(g / x) - 1.0);
  }
  return acc;
}

Matrix prox_rows(const Matrix& gamma, const SimplexVector& p) {
  if (gamma.rows() != p.size())
    throw Error(ErrorKind::Data, "LengthMismatch", "row marginal length must match gamma");
  Matrix out = gamma;
  for (std::size_t i = 0; i < gamma.rows(); ++i) {
    double rs = 0.0;
    for (std::size_t j = 0; j < gamma.cols(); ++j) rs += gamma(i, j);
    if (p[i] == 0.0) {
      for (std::size_t j = 0; j < gamma.cols(); ++j) out(i, j) = 0.0;
      continue;
    }
    if (rs <= 0.0)
      throw Error(ErrorKind::Numerical, "ZeroRowWithMass",
                  "row " + std::to_string(i) + " has zero mass but a positive marginal");
    const double scale = p[i] / rs;
    for (std::size_t j = 0; j < gamma.cols(); ++j) out(i, j) *= scale;
  }
  return out;
}

Matrix prox_cols(const Matrix& gamma, const SimplexVector& q) {
  if (gamma.cols() != q.size())
    throw Error(ErrorKind::Data, "LengthMismatch", "column marginal length must match gamma");
  Matrix out = gamma;
  const auto cs = gamma.col_sums();
  for (std::size_t j = 0; j < gamma.cols(); ++j) {
    if (q[j] == 0.0) {
      for (std::size_t i = 0; i < gamma.rows(); ++i) out(i, j) = 0.0;
      continue;
    }
    if (cs[j] <= 0.0)
      throw Error(ErrorKind::Numerical, "ZeroColumnWithMass",
                  "column " + std::to_string(j) + " has zero mass but a positive marginal");
    const double scale = q[j] / cs[j];
    for (std::size_t i = 0; i < gamma.rows(); ++i) out(i, j) *= scale;
  }
  return out;
}

Matrix prox_rows_leq(const Matrix& gamma, std::span<const double> p) {
  if (gamma.rows() != p.size())
    throw Error(ErrorKind::Data, "LengthMismatch", "row bound length must match gamma");
  Matrix out = gamma;
  for (std::size_t i = 0; i < gamma.rows(); ++i) {
    double rs = 0.0;
    for (std::size_t j = 0; j < gamma.cols(); ++j) rs += gamma(i, j);
    const double scale = rs > 0.0 ? std::min(1.0, p[i] / rs) : 1.0;
    if (scale != 1.0)
      for (std::size_t j = 0; j < gamma.cols(); ++j) out(i, j) *= scale;
  }
  return out;
}

Matrix prox_cols_leq(const Matrix& gamma, std::span<const double> q) {
  if (gamma.cols() != q.size())
    throw Error(ErrorKind::Data, "LengthMismatch", "column bound length must match gamma");
  Matrix out = gamma;
  const auto cs = gamma.col_sums();
  for (std::size_t j = 0; j < gamma.cols(); ++j) {
    const double scale = cs[j] > 0.0 ? std::min(1.0, q[j] / cs[j]) : 1.0;
    if (scale != 1.0)
      for (std::size_t i = 0; i < gamma.rows(); ++i) out(i, j) *= scale;
  }
  return out;
}

Matrix prox_total_mass(const Matrix& gamma, double eta) {
  if (eta < 0.0)
    throw Error(ErrorKind::Config, "NegativeMass", "target total mass must be nonnegative");
  const double total = gamma.total();
  if (total <= 0.0) {
    if (eta > 0.0)
      throw Error(ErrorKind::Numerical, "ZeroTotalMass",
                  "cannot rescale a zero matrix to positive mass");
    return gamma;
  }
  Matrix out = gamma;
  const double scale = eta / total;
  for (double& v : out.data()) v *= scale;
  return out;
}

Matrix prox_capacity(const Matrix& gamma, const Matrix& cap) {
  if (!gamma.same_shape(cap))
    throw Error(ErrorKind::Data, "DimensionMismatch", "capacity bound must match gamma's shape");
  Matrix out = gamma;
  for (std::size_t k = 0; k < out.data().size(); ++k)
    out.data()[k] = std::min(out.data()[k], cap.data()[k]);
  return out;
}

namespace {

// F(x) - target for the band root equation, summed over the active set only.
double band_objective(std::span<const double> column, const RepairVector& v, double x,
                      double target) {
  double acc = 0.0;
  for (std::size_t i : v.active()) {
    const double a = column[i];
    if (a == 0.0) continue;
    acc += a * v[i] * std::exp(-v[i] * x);
  }
  return acc - target;
}

double band_derivative(std::span<const double> column, const RepairVector& v, double x) {
  double acc = 0.0;
  for (std::size_t i : v.active()) {
    const double a = column[i];
    if (a == 0.0) continue;
    acc -= a * v[i] * v[i] * std::exp(-v[i] * x);
  }
  return acc;
}

}  // namespace

double solve_nu(std::span<const double> column, const RepairVector& v, double target) {
  if (column.size() != v.size())
    throw Error(ErrorKind::Data, "LengthMismatch", "column length must match the repair vector");
  const double tol = 1e-10 * std::max(1.0, std::abs(target));
  double g0 = band_objective(column, v, 0.0, target);
  if (std::abs(g0) <= tol) return 0.0;
  if (v.active().empty())
    throw Error(ErrorKind::Numerical, "RootNotBracketed",
                "band equation has no active entries to adjust");

  // F is non-increasing: g(0) > 0 means the root lies to the right. Along the
  // search direction only terms whose exponent grows can overflow, so the
  // bracket cap comes from the steepest growing |V| on that side; with no
  // growing terms the cap is where every term has decayed to zero.
  const double dir = g0 > 0.0 ? 1.0 : -1.0;
  double grow_max = 0.0, abs_min = std::numeric_limits<double>::infinity();
  for (std::size_t i : v.active()) {
    const double a = std::abs(v[i]);
    abs_min = std::min(abs_min, a);
    if ((dir > 0.0 && v[i] < 0.0) || (dir < 0.0 && v[i] > 0.0)) grow_max = std::max(grow_max, a);
  }
  const double cap = grow_max > 0.0 ? kExpCap / grow_max : 745.0 / abs_min;

  // Signs are compared directly; multiplying the endpoint values can
  // underflow to 0.
  double lo = 0.0, glo = g0;
  double hi = dir * std::min(1.0 / std::max(v.max_abs(), 1e-12), cap);
  double ghi = band_objective(column, v, hi, target);
  while (ghi != 0.0 && (glo > 0.0) == (ghi > 0.0)) {
    if (std::abs(hi) >= cap)
      throw Error(ErrorKind::Numerical, "RootNotBracketed",
                  "no sign change before the exponent overflow boundary");
    lo = hi;
    glo = ghi;
    hi = dir * std::min(std::abs(hi) * 2.0, cap);
    ghi = band_objective(column, v, hi, target);
  }

  // pa keeps g >= 0, pb keeps g <= 0 (g is non-increasing along dir).
  double pa = glo >= 0.0 ? lo : hi;
  double pb = glo >= 0.0 ? hi : lo;
  double x = 0.5 * (pa + pb);
  double gx = band_objective(column, v, x, target);
  for (int iter = 0; iter < 200 && std::abs(gx) > tol; ++iter) {
    const double d = band_derivative(column, v, x);
    double next = std::isfinite(gx) && std::isfinite(d) && d < 0.0 ? x - gx / d : x;
    const double lo_end = std::min(pa, pb), hi_end = std::max(pa, pb);
    if (!std::isfinite(next) || !(next > lo_end && next < hi_end) || next == x)
      next = 0.5 * (pa + pb);
    x = next;
    gx = band_objective(column, v, x, target);
    if (gx >= 0.0) pa = x; else pb = x;
    if (pa == pb) break;
  }
  return x;
}

Matrix prox_band(const Matrix& gamma, const BandConstraint& bc) {
  const RepairVector& v = bc.v;
  if (gamma.rows() != v.size())
    throw Error(ErrorKind::Data, "LengthMismatch", "gamma rows must match the repair vector");
  Matrix out = gamma;
  if (v.active().empty()) return out;
  std::vector<double> column(gamma.rows());
  for (std::size_t j = 0; j < gamma.cols(); ++j) {
    double cur = 0.0;
    for (std::size_t i : v.active()) cur += gamma(i, j) * v[i];
    if (cur >= -bc.lambda[j] && cur <= bc.lambda[j]) continue;
    for (std::size_t i = 0; i < gamma.rows(); ++i) column[i] = gamma(i, j);
    const double target = cur > bc.lambda[j] ? bc.lambda[j] : -bc.lambda[j];
    const double nu = solve_nu(column, v, target);
    for (std::size_t i : v.active()) out(i, j) = gamma(i, j) * std::exp(-v[i] * nu);
  }
  return out;
}

double band_residual(const Matrix& gamma, const RepairVector& v) {
  double acc = 0.0;
  for (std::size_t j = 0; j < gamma.cols(); ++j) {
    double cur = 0.0;
    for (std::size_t i : v.active()) cur += gamma(i, j) * v[i];
    acc += std::abs(cur);
  }
  return acc;
}

}  // namespace otrepair
