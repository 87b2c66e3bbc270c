#pragma once

#include <optional>
#include <string>
#include <vector>

#include "otrepair/support.hpp"

namespace otrepair {

// One (possibly split) observation. Adjusted features are already
// discretized; neutral cells ride along untouched. source_id names the
// original row so split weights can be re-aggregated later.
struct SampleRow {
  Support::Point x;
  std::vector<std::string> neutral;
  std::optional<int> group;
  std::optional<int> label;
  std::optional<double> score;
  double weight = 1.0;
  std::size_t source_id = 0;
};

struct WeightedDataset {
  std::vector<std::string> adjusted_columns;
  std::vector<std::string> neutral_columns;
  std::vector<SampleRow> rows;

  double total_weight() const {
    double acc = 0.0;
    for (const auto& r : rows) acc += r.weight;
    return acc;
  }
};

}  // namespace otrepair
