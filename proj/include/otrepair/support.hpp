#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

namespace otrepair {

// Ordered list of N distinct discretization points (feature tuples of
// dimension d >= 1). Points are canonicalized by lexicographic sort so that
// index layout is deterministic across runs. Coordinates are compared with
// exact equality; any rounding happens upstream at ingestion.
class Support {
 public:
  using Point = std::vector<double>;

  explicit Support(std::vector<Point> points);

  std::size_t size() const noexcept { return points_.size(); }
  std::size_t dimension() const noexcept { return points_.empty() ? 0 : points_.front().size(); }

  const Point& point(std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const noexcept { return points_; }

  // Inverse lookup; empty when the point is off the support.
  std::optional<std::size_t> index(const Point& p) const;

  bool scalar() const noexcept { return dimension() == 1; }
  // True for scalar supports with a constant step between consecutive points.
  bool evenly_spaced(double rel_tol = 1e-9) const;

  bool operator==(const Support& other) const { return points_ == other.points_; }

 private:
  std::vector<Point> points_;
  std::map<Point, std::size_t> index_;
};

using SupportPtr = std::shared_ptr<const Support>;

inline bool same_support(const SupportPtr& a, const SupportPtr& b) {
  return a == b || (a && b && *a == *b);
}

}  // namespace otrepair
