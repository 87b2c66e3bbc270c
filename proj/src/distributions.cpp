#include "otrepair/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "otrepair/error.hpp"

namespace otrepair {

namespace {
constexpr double kSimplexSumTol = 1e-9;
constexpr double kRenormalizableDrift = 1e-6;
constexpr double kNegativeDust = 1e-12;
constexpr double kRepairZero = 1e-12;
}  // namespace

SimplexVector::SimplexVector(std::vector<double> values, SupportPtr support)
    : values_(std::move(values)), support_(std::move(support)) {
  if (!support_) throw Error(ErrorKind::Data, "EmptySupport", "simplex vector needs a support");
  if (values_.size() != support_->size())
    throw Error(ErrorKind::Data, "LengthMismatch", "value count does not match support size");
  double sum = 0.0;
  for (double v : values_) {
    if (v < 0.0)
      throw Error(ErrorKind::Data, "NotAProbabilityVector", "negative entry in simplex vector");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexSumTol)
    throw Error(ErrorKind::Data, "NotAProbabilityVector", "entries do not sum to 1");
}

SimplexVector make_simplex(std::vector<double> values, SupportPtr support) {
  if (!support) throw Error(ErrorKind::Data, "EmptySupport", "make_simplex needs a support");
  if (values.size() != support->size())
    throw Error(ErrorKind::Data, "LengthMismatch", "value count does not match support size");
  for (double& v : values) {
    if (v < -kNegativeDust)
      throw Error(ErrorKind::Data, "NotAProbabilityVector",
                  "entry below -1e-12 in candidate probability vector");
    if (v < 0.0) v = 0.0;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  if (std::abs(sum - 1.0) > kRenormalizableDrift)
    throw Error(ErrorKind::Data, "NotAProbabilityVector",
                "entries sum to " + std::to_string(sum) + ", beyond renormalizable drift");
  for (double& v : values) v /= sum;
  return SimplexVector(std::move(values), std::move(support));
}

SimplexVector empirical_distribution(const std::vector<WeightedPoint>& samples,
                                     SupportPtr support) {
  if (!support) throw Error(ErrorKind::Data, "EmptySupport", "empirical needs a support");
  std::vector<double> mass(support->size(), 0.0);
  double total = 0.0;
  for (const auto& s : samples) {
    if (s.weight < 0.0)
      throw Error(ErrorKind::Data, "NegativeWeight", "sample weights must be nonnegative");
    auto idx = support->index(s.point);
    if (!idx) throw Error(ErrorKind::Data, "PointOffSupport", "sample point not on the support");
    mass[*idx] += s.weight;
    total += s.weight;
  }
  if (total <= 0.0)
    throw Error(ErrorKind::Data, "ZeroTotalWeight", "total sample weight must be positive");
  for (double& m : mass) m /= total;
  return SimplexVector(std::move(mass), std::move(support));
}

std::map<int, SimplexVector> groupwise_empirical(const std::vector<GroupedPoint>& samples,
                                                 SupportPtr support) {
  if (!support) throw Error(ErrorKind::Data, "EmptySupport", "empirical needs a support");
  std::map<int, std::vector<double>> mass;
  std::map<int, double> totals;
  for (const auto& s : samples) {
    if (s.weight < 0.0)
      throw Error(ErrorKind::Data, "NegativeWeight", "sample weights must be nonnegative");
    auto idx = support->index(s.point);
    if (!idx) throw Error(ErrorKind::Data, "PointOffSupport", "sample point not on the support");
    auto [it, inserted] = mass.try_emplace(s.group, support->size(), 0.0);
    it->second[*idx] += s.weight;
    totals[s.group] += s.weight;
  }
  std::map<int, SimplexVector> result;
  for (auto& [group, m] : mass) {
    const double total = totals[group];
    if (total <= 0.0)
      throw Error(ErrorKind::Data, "EmptyGroup",
                  "group " + std::to_string(group) + " has zero total weight");
    for (double& v : m) v /= total;
    result.emplace(group, SimplexVector(std::move(m), support));
  }
  return result;
}

double tv_distance(const SimplexVector& p, const SimplexVector& q) {
  if (!same_support(p.support(), q.support()))
    throw Error(ErrorKind::Data, "SupportMismatch", "tv_distance needs a shared support");
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return std::min(0.5 * acc, 1.0);
}

RepairVector::RepairVector(std::vector<double> values, SupportPtr support)
    : values_(std::move(values)), support_(std::move(support)) {
  if (!support_) throw Error(ErrorKind::Data, "EmptySupport", "repair vector needs a support");
  if (values_.size() != support_->size())
    throw Error(ErrorKind::Data, "LengthMismatch", "value count does not match support size");
  bool has_pos = false, has_neg = false;
  for (double& v : values_) {
    if (!std::isfinite(v))
      throw Error(ErrorKind::Data, "NonFiniteRepairEntry", "repair vector entries must be finite");
    if (std::abs(v) < kRepairZero) v = 0.0;
    has_pos = has_pos || v > 0.0;
    has_neg = has_neg || v < 0.0;
  }
  if (has_pos != has_neg)
    throw Error(ErrorKind::Data, "OneSignedRepairVector",
                "a nonzero repair vector must mix signs");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (values_[i] != 0.0) {
      active_.push_back(i);
      max_abs_ = std::max(max_abs_, std::abs(values_[i]));
    }
}

RepairVector repair_vector(const SimplexVector& p_x, const SimplexVector& p_x_s0,
                           const SimplexVector& p_x_s1) {
  if (!same_support(p_x.support(), p_x_s0.support()) ||
      !same_support(p_x.support(), p_x_s1.support()))
    throw Error(ErrorKind::Data, "SupportMismatch", "repair_vector needs a shared support");
  std::vector<double> v(p_x.size(), 0.0);
  for (std::size_t i = 0; i < p_x.size(); ++i) {
    if (p_x[i] > 0.0) {
      v[i] = (p_x_s0[i] - p_x_s1[i]) / p_x[i];
    } else if (p_x_s0[i] > 0.0 || p_x_s1[i] > 0.0) {
      throw Error(ErrorKind::Data, "DivisionBySupportHole",
                  "group mass at a point where the blind distribution is zero");
    }
  }
  return RepairVector(std::move(v), p_x.support());
}

}  // namespace otrepair
