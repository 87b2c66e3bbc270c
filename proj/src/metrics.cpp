#include "otrepair/metrics.hpp"

#include <cmath>
#include <cstdio>

#include "otrepair/error.hpp"

namespace otrepair {

namespace {

std::string json_number(const std::optional<double>& v) {
  if (!v || !std::isfinite(*v)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", *v);
  return buf;
}

double group_f1(const GroupCounts& c) {
  const double denom = static_cast<double>(2 * c.tp + c.fp + c.fn);
  if (denom == 0.0) return 0.0;
  return 2.0 * static_cast<double>(c.tp) / denom;
}

}  // namespace

std::string MetricsReport::to_json() const {
  std::string out = "{";
  out += "\"f1_micro\": " + json_number(f1_micro);
  out += ", \"f1_macro\": " + json_number(f1_macro);
  out += ", \"f1_weighted\": " + json_number(f1_weighted);
  out += ", \"disparate_impact\": " + json_number(disparate_impact);
  out += ", \"swise_tv\": " + json_number(swise_tv);
  out += "}";
  return out;
}

int threshold_classify(const std::vector<std::pair<double, double>>& weighted_scores,
                       double threshold) {
  double mass = 0.0, score = 0.0;
  for (const auto& [w, s] : weighted_scores) {
    if (w < 0.0)
      throw Error(ErrorKind::Data, "NegativeWeight", "split weights must be nonnegative");
    mass += w;
    score += w * s;
  }
  if (mass <= 0.0)
    throw Error(ErrorKind::Data, "EmptySample", "a sample needs positive total weight");
  return score / mass >= threshold ? 1 : 0;
}

std::tuple<double, double, double> f1_scores(const std::vector<int>& predictions,
                                             const std::vector<int>& labels,
                                             const std::vector<int>& groups,
                                             std::map<int, GroupCounts>* counts_out) {
  if (predictions.size() != labels.size() || predictions.size() != groups.size())
    throw Error(ErrorKind::Data, "LengthMismatch",
                "predictions, labels and groups must have equal lengths");
  if (predictions.empty())
    throw Error(ErrorKind::Data, "EmptyGroup", "f1 needs at least one sample");

  std::map<int, GroupCounts> counts;
  std::map<int, std::size_t> sizes;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    GroupCounts& c = counts[groups[i]];
    ++sizes[groups[i]];
    if (labels[i] == 1 && predictions[i] == 1) ++c.tp;
    else if (labels[i] == 0 && predictions[i] == 1) ++c.fp;
    else if (labels[i] == 1 && predictions[i] == 0) ++c.fn;
    else ++c.tn;
  }

  std::size_t tp = 0, fp = 0, fn = 0;
  double macro = 0.0, weighted = 0.0;
  for (const auto& [group, c] : counts) {
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
    const double f1 = group_f1(c);
    macro += f1 / static_cast<double>(counts.size());
    weighted += f1 * static_cast<double>(sizes[group]) / static_cast<double>(predictions.size());
  }
  const double micro_denom = static_cast<double>(2 * tp + fp + fn);
  const double micro = micro_denom == 0.0 ? 0.0 : 2.0 * static_cast<double>(tp) / micro_denom;
  if (counts_out) *counts_out = counts;
  return {micro, macro, weighted};
}

double disparate_impact(const std::vector<int>& predictions, const std::vector<int>& groups) {
  if (predictions.size() != groups.size())
    throw Error(ErrorKind::Data, "LengthMismatch", "predictions and groups must align");
  std::size_t n0 = 0, n1 = 0, pos0 = 0, pos1 = 0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (groups[i] == 0) {
      ++n0;
      pos0 += predictions[i] == 1;
    } else {
      ++n1;
      pos1 += predictions[i] == 1;
    }
  }
  if (n0 == 0 || n1 == 0)
    throw Error(ErrorKind::Data, "EmptyGroup", "disparate impact needs both groups present");
  const double rate1 = static_cast<double>(pos1) / static_cast<double>(n1);
  if (rate1 == 0.0)
    throw Error(ErrorKind::Data, "ZeroPrivilegedPositiveRate",
                "privileged group has no positive predictions");
  const double rate0 = static_cast<double>(pos0) / static_cast<double>(n0);
  return rate0 / rate1;
}

double swise_tv(const WeightedDataset& data, const SupportPtr& support) {
  std::vector<GroupedPoint> samples;
  samples.reserve(data.rows.size());
  for (const auto& row : data.rows) {
    if (!row.group)
      throw Error(ErrorKind::Data, "EmptyGroup", "S-wise TV needs group tags on every row");
    samples.push_back(GroupedPoint{row.x, row.weight, *row.group});
  }
  auto grouped = groupwise_empirical(samples, support);
  auto it0 = grouped.find(0);
  auto it1 = grouped.find(1);
  if (it0 == grouped.end() || it1 == grouped.end())
    throw Error(ErrorKind::Data, "EmptyGroup", "S-wise TV needs both groups present");
  return tv_distance(it0->second, it1->second);
}

}  // namespace otrepair
