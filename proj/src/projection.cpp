#include "otrepair/projection.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "otrepair/error.hpp"

namespace otrepair {

namespace {
constexpr double kMarginalTol = 1e-6;
constexpr double kSplitPrune = 1e-15;
}  // namespace

ProjectionMap build_map(const Coupling& coupling, const SimplexVector& p_x) {
  const Matrix& gamma = coupling.gamma;
  if (gamma.rows() != p_x.size())
    throw Error(ErrorKind::Data, "LengthMismatch", "coupling rows must match the distribution");
  const auto rs = gamma.row_sums();
  for (std::size_t i = 0; i < rs.size(); ++i)
    if (std::abs(rs[i] - p_x[i]) > kMarginalTol)
      throw Error(ErrorKind::Data, "MarginalMismatch",
                  "coupling row " + std::to_string(i) + " does not match the source marginal");

  ProjectionMap map;
  map.weights = Matrix(gamma.rows(), gamma.cols());
  map.source = coupling.source;
  map.target = coupling.target;
  map.reachable.assign(gamma.rows(), false);
  for (std::size_t i = 0; i < gamma.rows(); ++i) {
    if (p_x[i] <= 0.0 || rs[i] <= 0.0) continue;
    double kept = 0.0;
    for (std::size_t j = 0; j < gamma.cols(); ++j) {
      const double w = gamma(i, j) / rs[i];
      if (w >= kSplitPrune) {
        map.weights(i, j) = w;
        kept += w;
      }
    }
    if (kept <= 0.0) continue;
    for (std::size_t j = 0; j < gamma.cols(); ++j) map.weights(i, j) /= kept;
    map.reachable[i] = true;
  }
  return map;
}

WeightedDataset apply_map(const ProjectionMap& map, const WeightedDataset& data) {
  WeightedDataset out;
  out.adjusted_columns = data.adjusted_columns;
  out.neutral_columns = data.neutral_columns;
  out.rows.reserve(data.rows.size());

  for (const auto& row : data.rows) {
    auto idx = map.source->index(row.x);
    if (!idx || !map.reachable[*idx])
      throw Error(ErrorKind::Data, "UnreachableSourcePoint",
                  "row feature value is not a reachable source point");
    const std::size_t first_out = out.rows.size();
    double assigned = 0.0;
    std::size_t heaviest = first_out;
    double heaviest_w = -1.0;
    for (std::size_t j = 0; j < map.weights.cols(); ++j) {
      const double w = map.weights(*idx, j);
      if (w <= 0.0) continue;
      SampleRow split = row;
      split.x = map.target->point(j);
      split.weight = row.weight * w;
      assigned += split.weight;
      out.rows.push_back(std::move(split));
      if (w > heaviest_w) {
        heaviest_w = w;
        heaviest = out.rows.size() - 1;
      }
    }
    // Push rounding dust into the heaviest split so each row's output weight
    // sums to the input weight exactly.
    out.rows[heaviest].weight += row.weight - assigned;
  }
  return out;
}

SupportPtr tuple_support(const WeightedDataset& data,
                         const std::vector<std::string>& adjusted_columns) {
  if (data.rows.empty())
    throw Error(ErrorKind::Data, "EmptyDataset", "cannot build a support from an empty dataset");
  if (adjusted_columns.empty())
    throw Error(ErrorKind::Data, "UnknownColumn", "no adjusted columns requested");
  std::vector<std::size_t> coords;
  for (const auto& name : adjusted_columns) {
    auto it = std::find(data.adjusted_columns.begin(), data.adjusted_columns.end(), name);
    if (it == data.adjusted_columns.end())
      throw Error(ErrorKind::Data, "UnknownColumn", "no adjusted column named " + name);
    coords.push_back(static_cast<std::size_t>(it - data.adjusted_columns.begin()));
  }

  std::set<Support::Point> distinct;
  Support::Point tuple(coords.size());
  for (const auto& row : data.rows) {
    for (std::size_t d = 0; d < coords.size(); ++d) tuple[d] = row.x[coords[d]];
    distinct.insert(tuple);
  }
  return std::make_shared<Support>(
      std::vector<Support::Point>(distinct.begin(), distinct.end()));
}

}  // namespace otrepair
