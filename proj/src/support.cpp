#include "otrepair/support.hpp"

#include <algorithm>
#include <cmath>

#include "otrepair/error.hpp"

namespace otrepair {

Support::Support(std::vector<Point> points) : points_(std::move(points)) {
  if (points_.empty())
    throw Error(ErrorKind::Data, "EmptySupport", "a support needs at least one point");
  const std::size_t d = points_.front().size();
  if (d == 0) throw Error(ErrorKind::Data, "EmptySupport", "support points need dimension >= 1");
  for (const auto& p : points_)
    if (p.size() != d)
      throw Error(ErrorKind::Data, "DimensionMismatch", "support points have mixed dimensions");
  std::sort(points_.begin(), points_.end());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (i > 0 && points_[i] == points_[i - 1])
      throw Error(ErrorKind::Data, "DuplicatePoint", "support points must be pairwise distinct");
    index_.emplace(points_[i], i);
  }
}

std::optional<std::size_t> Support::index(const Point& p) const {
  auto it = index_.find(p);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

bool Support::evenly_spaced(double rel_tol) const {
  if (!scalar() || size() < 2) return scalar();
  const double step = points_[1][0] - points_[0][0];
  if (step <= 0.0) return false;
  for (std::size_t i = 2; i < size(); ++i) {
    const double s = points_[i][0] - points_[i - 1][0];
    if (std::abs(s - step) > rel_tol * std::max(1.0, std::abs(step))) return false;
  }
  return true;
}

}  // namespace otrepair
