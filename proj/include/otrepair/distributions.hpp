#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "otrepair/support.hpp"

namespace otrepair {

// Nonnegative probability vector over an ordered support; entries sum to 1
// within 1e-9.
class SimplexVector {
 public:
  SimplexVector(std::vector<double> values, SupportPtr support);

  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  const SupportPtr& support() const noexcept { return support_; }

 private:
  std::vector<double> values_;
  SupportPtr support_;
};

// Repair direction V = (P^{X_{s0}} - P^{X_{s1}}) / P^X. Entries with
// |V_i| < 1e-12 are zeroed so they never drive the band constraint; the
// active set holds the indices of the remaining nonzero entries.
class RepairVector {
 public:
  RepairVector(std::vector<double> values, SupportPtr support);

  const std::vector<double>& values() const noexcept { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::size_t size() const noexcept { return values_.size(); }
  const std::vector<std::size_t>& active() const noexcept { return active_; }
  const SupportPtr& support() const noexcept { return support_; }
  double max_abs() const noexcept { return max_abs_; }

 private:
  std::vector<double> values_;
  std::vector<std::size_t> active_;
  SupportPtr support_;
  double max_abs_ = 0.0;
};

// Validating constructor: clamps negative dust (>= -1e-12) to zero and
// renormalizes drift up to |sum-1| <= 1e-6; anything worse is rejected.
SimplexVector make_simplex(std::vector<double> values, SupportPtr support);

struct WeightedPoint {
  Support::Point point;
  double weight = 1.0;
};

struct GroupedPoint {
  Support::Point point;
  double weight = 1.0;
  int group = 0;
};

SimplexVector empirical_distribution(const std::vector<WeightedPoint>& samples,
                                     SupportPtr support);

std::map<int, SimplexVector> groupwise_empirical(const std::vector<GroupedPoint>& samples,
                                                 SupportPtr support);

// Total variation distance (1/2)*sum |P_j - Q_j|; both vectors must live on
// the same support.
double tv_distance(const SimplexVector& p, const SimplexVector& q);

RepairVector repair_vector(const SimplexVector& p_x, const SimplexVector& p_x_s0,
                           const SimplexVector& p_x_s1);

}  // namespace otrepair
