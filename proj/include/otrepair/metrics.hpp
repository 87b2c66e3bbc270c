#pragma once

#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "otrepair/dataset.hpp"
#include "otrepair/distributions.hpp"

namespace otrepair {

struct GroupCounts {
  std::size_t tp = 0, fp = 0, fn = 0, tn = 0;
};

// Fairness/accuracy indices of a run. The f1 and classification fields stay
// empty when the data carries no labels or no scores.
struct MetricsReport {
  std::optional<double> f1_micro;
  std::optional<double> f1_macro;
  std::optional<double> f1_weighted;
  std::optional<double> disparate_impact;
  std::optional<double> swise_tv;
  std::map<int, GroupCounts> counts;

  std::string to_json() const;
};

// Weighted-score threshold rule for one original sample: positive when the
// weight-normalized score sum reaches the threshold (ties classify as 1).
int threshold_classify(const std::vector<std::pair<double, double>>& weighted_scores,
                       double threshold);

// Per-group F1 aggregation: micro pools the confusion counts, macro averages
// group F1 uniformly, weighted averages by the empirical group shares.
std::tuple<double, double, double> f1_scores(const std::vector<int>& predictions,
                                             const std::vector<int>& labels,
                                             const std::vector<int>& groups,
                                             std::map<int, GroupCounts>* counts_out = nullptr);

// Ratio of positive prediction rates, unprivileged group (s0) over privileged
// group (s1).
double disparate_impact(const std::vector<int>& predictions, const std::vector<int>& groups);

// TV distance between the group-conditional weighted empiricals of the data.
double swise_tv(const WeightedDataset& data, const SupportPtr& support);

}  // namespace otrepair
