#pragma once

#include <vector>

#include "otrepair/dataset.hpp"
#include "otrepair/distributions.hpp"
#include "otrepair/matrix.hpp"
#include "otrepair/transport.hpp"

namespace otrepair {

// Group-blind projection map: row i lists the conditional split weights
// w[i][j] = gamma[i][j] / P^X_i. Rows with no source mass are unreachable.
struct ProjectionMap {
  Matrix weights;
  SupportPtr source;
  SupportPtr target;
  std::vector<bool> reachable;
};

// Requires gamma's row sums to match p_x within 1e-6. Split weights below
// 1e-15 are pruned and each reachable row renormalized to sum exactly 1, so
// applying the map conserves mass.
ProjectionMap build_map(const Coupling& gamma, const SimplexVector& p_x);

// Replaces every row (x_i, u, s, y, w) by the rows {(x_j, u, s, y, w*w[i][j])}
// in ascending target order. Everything except the adjusted features and the
// weight is carried over unchanged; the map never reads the group tag.
WeightedDataset apply_map(const ProjectionMap& map, const WeightedDataset& data);

// Support of the distinct adjusted-feature tuples observed in the data.
SupportPtr tuple_support(const WeightedDataset& data,
                         const std::vector<std::string>& adjusted_columns);

}  // namespace otrepair
