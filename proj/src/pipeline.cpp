#include "otrepair/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <numeric>
#include <random>
#include <set>

#include "otrepair/error.hpp"
#include "otrepair/transport.hpp"

namespace otrepair {

namespace {

double round_to_decimals(double v, int decimals) {
  const double scale = std::pow(10.0, decimals);
  double r = std::round(v * scale) / scale;
  if (r == 0.0) r = 0.0;  // normalize -0.0
  return r;
}

double parse_double(const std::string& text, std::size_t row, const std::string& column) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end == begin || *end != '\0' || !std::isfinite(v))
    throw Error(ErrorKind::Data, "ParseError",
                "row " + std::to_string(row) + ", column '" + column + "': cannot parse '" +
                    text + "' as a number");
  return v;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

// Box-Muller with explicit uniforms; keeps the sample stream independent of
// the standard library's normal_distribution implementation.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return unit_(rng_); }

  double normal() {
    double u1 = unit_(rng_);
    while (u1 <= 0.0) u1 = unit_(rng_);
    const double u2 = unit_(rng_);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 rng_;
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
};

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

std::string point_label(const Support::Point& p) {
  std::string out;
  for (std::size_t d = 0; d < p.size(); ++d) {
    if (d > 0) out += '|';
    out += format_double(p[d]);
  }
  return out;
}

Support::Point parse_point_label(const std::string& label) {
  Support::Point p;
  std::size_t start = 0;
  while (true) {
    const auto bar = label.find('|', start);
    const std::string coord = label.substr(start, bar == std::string::npos ? bar : bar - start);
    p.push_back(parse_double(coord, 0, "point"));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  return p;
}

std::vector<double> blind_empirical(const WeightedDataset& data, const SupportPtr& support) {
  std::vector<WeightedPoint> pts;
  pts.reserve(data.rows.size());
  for (const auto& r : data.rows) pts.push_back({r.x, r.weight});
  return empirical_distribution(pts, support).values();
}

}  // namespace

WeightedDataset generate_synthetic(const SyntheticSpec& spec) {
  if (!(spec.sigma0 > 0.0) || !(spec.sigma1 > 0.0) || !(spec.target_sigma > 0.0))
    throw Error(ErrorKind::Config, "NonPositiveSigma", "Gaussian widths must be positive");
  if (spec.p_group0 < 0.0 || spec.p_group0 > 1.0)
    throw Error(ErrorKind::Config, "InvalidGroupProbability",
                "group probability must lie in [0, 1]");
  if (spec.lo > spec.hi)
    throw Error(ErrorKind::Config, "EmptySupport", "synthetic support range is empty");

  GaussianSource source(spec.seed);
  WeightedDataset data;
  data.adjusted_columns = {"x"};
  data.rows.reserve(spec.samples);
  for (std::size_t i = 0; i < spec.samples; ++i) {
    const int group = source.uniform() < spec.p_group0 ? 0 : 1;
    const double mu = group == 0 ? spec.mu0 : spec.mu1;
    const double sigma = group == 0 ? spec.sigma0 : spec.sigma1;
    double value = std::floor(mu + sigma * source.normal());
    value = std::max(spec.lo, std::min(spec.hi, value));
    SampleRow row;
    row.x = {value};
    row.group = group;
    row.weight = 1.0;
    row.source_id = i;
    data.rows.push_back(std::move(row));
  }
  return data;
}

WeightedDataset ingest_csv(const std::string& path, const RunConfig& config) {
  if (config.adjusted_columns.empty())
    throw Error(ErrorKind::Config, "MissingColumn", "no adjusted feature columns configured");
  CsvTable table = read_csv(path);

  std::vector<std::size_t> adjusted_idx;
  for (const auto& name : config.adjusted_columns) adjusted_idx.push_back(table.column(name));
  std::optional<std::size_t> group_idx, label_idx, score_idx, weight_idx;
  if (!config.group_column.empty()) group_idx = table.column(config.group_column);
  if (!config.label_column.empty()) label_idx = table.column(config.label_column);
  if (!config.score_column.empty()) score_idx = table.column(config.score_column);
  if (!config.weight_column.empty()) weight_idx = table.column(config.weight_column);

  std::set<std::size_t> special(adjusted_idx.begin(), adjusted_idx.end());
  for (auto idx : {group_idx, label_idx, score_idx, weight_idx})
    if (idx) special.insert(*idx);

  WeightedDataset data;
  data.adjusted_columns = config.adjusted_columns;
  for (std::size_t c = 0; c < table.header.size(); ++c)
    if (!special.count(c)) data.neutral_columns.push_back(table.header[c]);

  std::vector<int> decimals(adjusted_idx.size(), config.round_decimals);
  for (std::size_t d = 0; d < adjusted_idx.size(); ++d) {
    auto it = config.round_decimals_per_column.find(config.adjusted_columns[d]);
    if (it != config.round_decimals_per_column.end()) decimals[d] = it->second;
  }

  std::size_t kept = 0;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& cells = table.rows[r];
    SampleRow row;
    if (group_idx) {
      const std::string g = trim(cells[*group_idx]);
      if (g == config.group_unprivileged) row.group = 0;
      else if (g == config.group_privileged) row.group = 1;
      else continue;  // other group values are filtered out
    }
    row.x.resize(adjusted_idx.size());
    for (std::size_t d = 0; d < adjusted_idx.size(); ++d)
      row.x[d] = round_to_decimals(
          parse_double(trim(cells[adjusted_idx[d]]), r + 1, config.adjusted_columns[d]),
          decimals[d]);
    if (label_idx) row.label = trim(cells[*label_idx]) == config.label_positive ? 1 : 0;
    if (score_idx) row.score = parse_double(trim(cells[*score_idx]), r + 1, config.score_column);
    if (weight_idx) {
      row.weight = parse_double(trim(cells[*weight_idx]), r + 1, config.weight_column);
      if (row.weight < 0.0)
        throw Error(ErrorKind::Data, "ParseError",
                    "row " + std::to_string(r + 1) + ": negative weight");
    }
    for (std::size_t c = 0; c < table.header.size(); ++c)
      if (!special.count(c)) row.neutral.push_back(cells[c]);
    row.source_id = kept++;
    data.rows.push_back(std::move(row));
  }
  if (data.rows.empty())
    throw Error(ErrorKind::Data, "EmptyDataset", path + " has no usable rows");
  return data;
}

std::vector<double> discretized_gaussian(const Support& support, double mu, double sigma) {
  if (!support.scalar())
    throw Error(ErrorKind::Config, "DimensionMismatch",
                "Gaussian targets are defined for scalar supports");
  if (!(sigma > 0.0))
    throw Error(ErrorKind::Config, "NonPositiveSigma", "Gaussian width must be positive");
  std::vector<double> cells(support.size());
  double total = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) {
    const double lo = support.point(i)[0];
    cells[i] = normal_cdf((lo + 1.0 - mu) / sigma) - normal_cdf((lo - mu) / sigma);
    total += cells[i];
  }
  if (total <= 0.0)
    throw Error(ErrorKind::Numerical, "ZeroTotalMass",
                "target Gaussian has no mass on the support");
  for (double& c : cells) c /= total;
  return cells;
}

FeatureSelection select_adjusted_features(const CsvTable& table,
                                          const std::vector<std::string>& candidates,
                                          const RunConfig& config) {
  if (config.group_column.empty())
    throw Error(ErrorKind::Config, "MissingColumn", "feature selection needs a group column");
  const std::size_t group_idx = table.column(config.group_column);

  FeatureSelection out;
  for (const auto& name : candidates) {
    const std::size_t col = table.column(name);
    int decimals = config.round_decimals;
    auto it = config.round_decimals_per_column.find(name);
    if (it != config.round_decimals_per_column.end()) decimals = it->second;

    std::vector<GroupedPoint> samples;
    std::set<Support::Point> seen;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
      const std::string g = trim(table.rows[r][group_idx]);
      int group;
      if (g == config.group_unprivileged) group = 0;
      else if (g == config.group_privileged) group = 1;
      else continue;
      const double v =
          round_to_decimals(parse_double(trim(table.rows[r][col]), r + 1, name), decimals);
      samples.push_back({{v}, 1.0, group});
      seen.insert({v});
    }
    if (samples.empty())
      throw Error(ErrorKind::Data, "EmptyGroup", "no rows matched the configured group values");
    auto support = std::make_shared<Support>(
        std::vector<Support::Point>(seen.begin(), seen.end()));
    auto grouped = groupwise_empirical(samples, support);
    if (grouped.size() < 2)
      throw Error(ErrorKind::Data, "EmptyGroup", "feature selection needs both groups present");
    const double tv = tv_distance(grouped.at(0), grouped.at(1));
    out.table.push_back({name, tv, tv > config.tv_threshold});
    if (tv > config.tv_threshold) out.selected.push_back(name);
  }
  return out;
}

double demo_score(const Support& support, const Support::Point& x) {
  double z = 0.0;
  const std::size_t d = support.dimension();
  for (std::size_t k = 0; k < d; ++k) {
    double lo = support.point(0)[k], hi = lo;
    for (std::size_t i = 1; i < support.size(); ++i) {
      lo = std::min(lo, support.point(i)[k]);
      hi = std::max(hi, support.point(i)[k]);
    }
    const double half = 0.5 * (hi - lo);
    if (half > 0.0) z += (x[k] - 0.5 * (lo + hi)) / half;
  }
  z /= static_cast<double>(d);
  return 1.0 / (1.0 + std::exp(-8.0 * z));
}

namespace {

std::vector<double> resolve_cost_weights(const RunConfig& config, const Support& support) {
  const std::size_t d = support.dimension();
  switch (config.cost_mode) {
    case CostWeightMode::Unit:
      return std::vector<double>(d, 1.0);
    case CostWeightMode::Explicit:
      if (config.cost_weights.size() != d)
        throw Error(ErrorKind::Config, "DimensionMismatch",
                    "explicit cost weights must match the feature dimension");
      return config.cost_weights;
    case CostWeightMode::ReciprocalRange: {
      std::vector<double> w(d);
      for (std::size_t k = 0; k < d; ++k) {
        double lo = support.point(0)[k], hi = lo;
        for (std::size_t i = 1; i < support.size(); ++i) {
          lo = std::min(lo, support.point(i)[k]);
          hi = std::max(hi, support.point(i)[k]);
        }
        if (!(hi > lo))
          throw Error(ErrorKind::Config, "NonPositiveWeight",
                      "adjusted feature " + std::to_string(k) +
                          " has zero range; reciprocal-range weights are undefined");
        w[k] = 1.0 / (hi - lo);
      }
      return w;
    }
  }
  throw Error(ErrorKind::Config, "InvalidCostMode", "unknown cost weight mode");
}

struct GroupEmpiricals {
  std::optional<std::vector<double>> s0;
  std::optional<std::vector<double>> s1;
};

GroupEmpiricals groupwise_values(const WeightedDataset& data, const SupportPtr& support) {
  bool any = false;
  for (const auto& r : data.rows)
    if (r.group) any = true;
  if (!any) return {};
  std::vector<GroupedPoint> samples;
  for (const auto& r : data.rows) {
    if (!r.group)
      throw Error(ErrorKind::Data, "EmptyGroup",
                  "group tags must be present on every row or on none");
    samples.push_back({r.x, r.weight, *r.group});
  }
  auto grouped = groupwise_empirical(samples, support);
  GroupEmpiricals out;
  if (auto it = grouped.find(0); it != grouped.end()) out.s0 = it->second.values();
  if (auto it = grouped.find(1); it != grouped.end()) out.s1 = it->second.values();
  return out;
}

// Scores every projected row (external score carried over when present, demo
// scorer otherwise), aggregates per source sample and assembles the metrics.
MetricsReport evaluate(const WeightedDataset& projected, const SupportPtr& support,
                       const RunConfig& config) {
  MetricsReport report;

  bool groups_everywhere = !projected.rows.empty();
  for (const auto& r : projected.rows)
    if (!r.group) groups_everywhere = false;
  if (groups_everywhere) {
    try {
      report.swise_tv = swise_tv(projected, support);
    } catch (const Error& e) {
      if (e.code() != "EmptyGroup") throw;
    }
  }

  struct Sample {
    std::vector<std::pair<double, double>> weighted_scores;
    std::optional<int> label;
    std::optional<int> group;
  };
  std::map<std::size_t, Sample> samples;
  for (const auto& r : projected.rows) {
    Sample& s = samples[r.source_id];
    const double score = r.score ? *r.score : demo_score(*support, r.x);
    s.weighted_scores.push_back({r.weight, score});
    if (r.label) s.label = r.label;
    if (r.group) s.group = r.group;
  }

  std::vector<int> predictions, labels, groups;
  bool all_labeled = true, all_grouped = true;
  for (const auto& [id, s] : samples) {
    predictions.push_back(threshold_classify(s.weighted_scores, config.classifier_threshold));
    if (s.label) labels.push_back(*s.label); else all_labeled = false;
    if (s.group) groups.push_back(*s.group); else all_grouped = false;
  }

  if (all_grouped && !predictions.empty()) {
    try {
      report.disparate_impact = disparate_impact(predictions, groups);
    } catch (const Error& e) {
      if (e.code() != "ZeroPrivilegedPositiveRate" && e.code() != "EmptyGroup") throw;
    }
    if (all_labeled) {
      auto [micro, macro, weighted] = f1_scores(predictions, labels, groups, &report.counts);
      report.f1_micro = micro;
      report.f1_macro = macro;
      report.f1_weighted = weighted;
    }
  }
  return report;
}

}  // namespace

RepairOutcome run_repair(const WeightedDataset& data, const RunConfig& config, Method method,
                         const std::optional<std::vector<double>>& target_values) {
  if (data.rows.empty())
    throw Error(ErrorKind::Data, "EmptyDataset", "cannot repair an empty dataset");
  if (!(config.epsilon > 0.0))
    throw Error(ErrorKind::Config, "NonPositiveEpsilon", "epsilon must be positive");

  RepairOutcome out;
  out.method = method;
  out.support = tuple_support(data, data.adjusted_columns);
  const std::size_t n = out.support->size();
  auto p = make_simplex(blind_empirical(data, out.support), out.support);
  out.p_x = p.values();

  auto grouped = groupwise_values(data, out.support);
  out.p_x_s0 = grouped.s0;
  out.p_x_s1 = grouped.s1;

  std::vector<double> target = target_values.value_or(out.p_x);
  if (target.size() != n)
    throw Error(ErrorKind::Config, "LengthMismatch",
                "target distribution must live on the data's tuple support");
  auto q = make_simplex(target, out.support);
  out.target = q.values();

  const std::size_t iterations =
      config.iterations.value_or(method == Method::Dykstra ? 600 : 400);
  const double varepsilon = config.varepsilon.value_or(1e-5);
  const auto make_cost = [&] {
    return cost_matrix(*out.support, *out.support, resolve_cost_weights(config, *out.support));
  };

  Matrix gamma;
  switch (method) {
    case Method::None: {
      gamma = Matrix(n, n, 0.0);
      for (std::size_t i = 0; i < n; ++i) gamma(i, i) = out.p_x[i];
      out.trace.stop_reason = StopReason::MaxIterations;
      break;
    }
    case Method::Baseline: {
      const auto cost = make_cost();
      auto res = bregman_baseline(p, q, cost, config.epsilon, iterations);
      gamma = std::move(res.coupling.gamma);
      out.trace = std::move(res.trace);
      break;
    }
    case Method::Dykstra: {
      std::vector<double> v_values;
      if (!config.v_file.empty()) {
        v_values = read_v_file(config.v_file, *out.support);
        double inner = 0.0;
        for (std::size_t i = 0; i < n; ++i) inner += out.p_x[i] * v_values[i];
        if (std::abs(inner) > 1e-9)
          throw Error(ErrorKind::Data, "InconsistentRepairVector",
                      "supplied repair vector is not orthogonal to the source distribution");
      } else {
        if (!out.p_x_s0 || !out.p_x_s1)
          throw Error(ErrorKind::Data, "EmptyGroup",
                      "repair needs a group column or an explicit v-file");
        v_values = repair_vector(p, SimplexVector(*out.p_x_s0, out.support),
                                 SimplexVector(*out.p_x_s1, out.support))
                       .values();
      }
      RepairVector v(v_values, out.support);
      std::vector<double> lambda = config.lambda_vector;
      if (lambda.empty()) lambda.assign(n, config.lambda);
      if (lambda.size() != n)
        throw Error(ErrorKind::Config, "LengthMismatch",
                    "lambda vector must match the support size");
      BandConstraint bc(v, std::move(lambda));
      const auto cost = make_cost();
      auto res = dykstra_repair(p, q, bc, cost, config.epsilon, iterations, varepsilon);
      gamma = std::move(res.coupling.gamma);
      out.trace = std::move(res.trace);
      break;
    }
    case Method::Barycentre: {
      if (!out.p_x_s0 || !out.p_x_s1)
        throw Error(ErrorKind::Data, "EmptyGroup",
                    "the barycentre baseline needs the group column at fit time");
      SimplexVector p0(*out.p_x_s0, out.support);
      SimplexVector p1(*out.p_x_s1, out.support);
      const auto cost = make_cost();
      auto res = barycentre_coupling(p0, p1, cost, config.epsilon, iterations);
      out.trace = std::move(res.trace);

      double w0 = 0.0, w1 = 0.0;
      for (const auto& r : data.rows) (*r.group == 0 ? w0 : w1) += r.weight;
      const double pi0 = w0 / (w0 + w1);

      // Each group's map is built from the feasibility-exact side of the
      // coupling it reads.
      auto [g0, unused] = barycentre_maps(prox_rows(res.coupling.gamma, p0), pi0, 1.0 - pi0,
                                          *out.support);
      auto [unused2, g1] = barycentre_maps(prox_cols(res.coupling.gamma, p1), pi0, 1.0 - pi0,
                                           *out.support);
      auto map0 = build_map(Coupling{g0, out.support, out.support}, p0);
      auto map1 = build_map(Coupling{g1, out.support, out.support}, p1);

      WeightedDataset part0, part1;
      part0.adjusted_columns = part1.adjusted_columns = data.adjusted_columns;
      part0.neutral_columns = part1.neutral_columns = data.neutral_columns;
      for (const auto& r : data.rows) (*r.group == 0 ? part0 : part1).rows.push_back(r);
      auto proj0 = apply_map(map0, part0);
      auto proj1 = apply_map(map1, part1);

      // Merge back in source-id order, split targets already ordered.
      out.projected.adjusted_columns = data.adjusted_columns;
      out.projected.neutral_columns = data.neutral_columns;
      out.projected.rows.reserve(proj0.rows.size() + proj1.rows.size());
      std::size_t i0 = 0, i1 = 0;
      while (i0 < proj0.rows.size() || i1 < proj1.rows.size()) {
        const bool take0 = i1 >= proj1.rows.size() ||
                           (i0 < proj0.rows.size() &&
                            proj0.rows[i0].source_id < proj1.rows[i1].source_id);
        out.projected.rows.push_back(take0 ? proj0.rows[i0++] : proj1.rows[i1++]);
      }
      gamma = std::move(res.coupling.gamma);
      break;
    }
  }

  if (method != Method::Barycentre) {
    // A finishing row projection hands the map an exactly row-feasible
    // coupling; the conditional split weights are unchanged by it.
    gamma = prox_rows(gamma, p);
    auto map = build_map(Coupling{gamma, out.support, out.support}, p);
    out.projected = apply_map(map, data);
  }
  out.coupling = Coupling{std::move(gamma), out.support, out.support};

  out.projected_blind = blind_empirical(out.projected, out.support);
  auto grouped_out = groupwise_values(out.projected, out.support);
  out.projected_s0 = grouped_out.s0;
  out.projected_s1 = grouped_out.s1;

  out.metrics = evaluate(out.projected, out.support, config);
  return out;
}

void emit_outputs(const RepairOutcome& outcome, const std::string& out_dir,
                  bool emit_projected) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorKind::Io, "IoError", "cannot create directory " + out_dir);
  const auto path = [&](const char* name) { return out_dir + "/" + name; };
  const Support& sup = *outcome.support;
  const std::size_t n = sup.size();

  {
    std::vector<std::string> header = {"point"};
    for (std::size_t j = 0; j < n; ++j) header.push_back(point_label(sup.point(j)));
    std::vector<std::vector<std::string>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      rows[i].push_back(point_label(sup.point(i)));
      for (std::size_t j = 0; j < n; ++j)
        rows[i].push_back(format_double(outcome.coupling.gamma(i, j)));
    }
    write_csv(path("coupling.csv"), header, rows);
  }

  {
    const auto opt = [&](const std::optional<std::vector<double>>& v, std::size_t i) {
      return v ? format_double((*v)[i]) : std::string();
    };
    std::vector<std::vector<std::string>> rows(n);
    for (std::size_t i = 0; i < n; ++i) {
      rows[i] = {point_label(sup.point(i)),
                 format_double(outcome.p_x[i]),
                 opt(outcome.p_x_s0, i),
                 opt(outcome.p_x_s1, i),
                 format_double(outcome.projected_blind[i]),
                 opt(outcome.projected_s0, i),
                 opt(outcome.projected_s1, i)};
    }
    write_csv(path("distributions.csv"),
              {"point", "p_x", "p_x_s0", "p_x_s1", "p_xt", "p_xt_s0", "p_xt_s1"}, rows);
  }

  {
    std::vector<std::vector<std::string>> rows;
    for (std::size_t k = 0; k < outcome.trace.iterations; ++k) {
      rows.push_back({std::to_string(k + 1),
                      outcome.trace.band_residuals.empty()
                          ? std::string()
                          : format_double(outcome.trace.band_residuals[k]),
                      format_double(outcome.trace.row_residuals[k]),
                      format_double(outcome.trace.col_residuals[k])});
    }
    write_csv(path("trace.csv"), {"iteration", "band_residual", "row_residual", "col_residual"},
              rows);
  }

  {
    std::ofstream json(path("metrics.json"), std::ios::binary);
    if (!json) throw Error(ErrorKind::Io, "IoError", "cannot write metrics.json");
    std::string body = outcome.metrics.to_json();
    body.pop_back();  // strip closing brace, append run fields
    body += ", \"iterations\": " + std::to_string(outcome.trace.iterations);
    body += ", \"stop_reason\": \"";
    if (outcome.method == Method::None) body += "none";
    else if (outcome.trace.stop_reason == StopReason::BandResidualBelowVarepsilon)
      body += "band_residual_below_varepsilon";
    else body += "max_iterations";
    body += "\"}";
    json << body << '\n';
  }

  if (emit_projected) write_dataset_csv(path("projected.csv"), outcome.projected);
}

Matrix read_coupling_csv(const std::string& path, const Support& source,
                         const Support& target) {
  CsvTable table = read_csv(path);
  if (table.header.size() != target.size() + 1 || table.rows.size() != source.size())
    throw Error(ErrorKind::Data, "ParseError", path + " does not match the expected shape");
  Matrix gamma(source.size(), target.size());
  for (std::size_t j = 0; j < target.size(); ++j)
    if (parse_point_label(table.header[j + 1]) != target.point(j))
      throw Error(ErrorKind::Data, "PointOffSupport",
                  "coupling column header does not match the target support");
  for (std::size_t i = 0; i < source.size(); ++i) {
    if (parse_point_label(table.rows[i][0]) != source.point(i))
      throw Error(ErrorKind::Data, "PointOffSupport",
                  "coupling row label does not match the source support");
    for (std::size_t j = 0; j < target.size(); ++j)
      gamma(i, j) = parse_double(table.rows[i][j + 1], i + 1, "coupling");
  }
  return gamma;
}

void write_v_file(const std::string& path, const Support& support,
                  const std::vector<double>& v) {
  std::vector<std::vector<std::string>> rows(support.size());
  for (std::size_t i = 0; i < support.size(); ++i)
    rows[i] = {point_label(support.point(i)), format_double(v[i])};
  write_csv(path, {"point", "v"}, rows);
}

std::vector<double> read_v_file(const std::string& path, const Support& support) {
  CsvTable table = read_csv(path);
  const std::size_t point_col = table.column("point");
  const std::size_t v_col = table.column("v");
  if (table.rows.size() != support.size())
    throw Error(ErrorKind::Data, "LengthMismatch",
                path + " must have one row per support point");
  std::vector<double> v(support.size());
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto point = parse_point_label(table.rows[r][point_col]);
    auto idx = support.index(point);
    if (!idx)
      throw Error(ErrorKind::Data, "PointOffSupport",
                  path + " row " + std::to_string(r + 1) + " is not on the support");
    v[*idx] = parse_double(table.rows[r][v_col], r + 1, "v");
  }
  return v;
}

void write_dataset_csv(const std::string& path, const WeightedDataset& data) {
  std::vector<std::string> header = data.adjusted_columns;
  header.insert(header.end(), data.neutral_columns.begin(), data.neutral_columns.end());
  header.insert(header.end(), {"group", "label", "score", "weight", "source_id"});
  std::vector<std::vector<std::string>> rows;
  rows.reserve(data.rows.size());
  for (const auto& r : data.rows) {
    std::vector<std::string> cells;
    for (double x : r.x) cells.push_back(format_double(x));
    for (const auto& u : r.neutral) cells.push_back(u);
    cells.push_back(r.group ? std::to_string(*r.group) : "");
    cells.push_back(r.label ? std::to_string(*r.label) : "");
    cells.push_back(r.score ? format_double(*r.score) : "");
    cells.push_back(format_double(r.weight));
    cells.push_back(std::to_string(r.source_id));
    rows.push_back(std::move(cells));
  }
  write_csv(path, header, rows);
}

TrialsSummary run_trials(const WeightedDataset& data, const RunConfig& config, Method method,
                         std::size_t trials, double train_frac, std::uint64_t seed,
                         const std::optional<std::vector<double>>& target_values) {
  if (trials == 0)
    throw Error(ErrorKind::Config, "TooFewTrials", "at least one trial is required");
  if (!(train_frac > 0.0) || !(train_frac < 1.0))
    throw Error(ErrorKind::Config, "InvalidTrainFraction",
                "train fraction must lie strictly between 0 and 1");

  std::map<std::string, std::vector<double>> values;
  for (std::size_t t = 0; t < trials; ++t) {
    // Per-trial derived seed; the test split plays the paper's held-out role.
    std::mt19937_64 rng(seed + 0x9e3779b97f4a7c15ull * (t + 1));
    std::vector<std::size_t> order(data.rows.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const auto test_count = static_cast<std::size_t>(
        std::round((1.0 - train_frac) * static_cast<double>(data.rows.size())));

    WeightedDataset test;
    test.adjusted_columns = data.adjusted_columns;
    test.neutral_columns = data.neutral_columns;
    for (std::size_t k = 0; k < test_count; ++k) test.rows.push_back(data.rows[order[k]]);
    for (std::size_t k = 0; k < test.rows.size(); ++k) test.rows[k].source_id = k;

    auto outcome = run_repair(test, config, method, target_values);
    const auto record = [&](const char* name, const std::optional<double>& v) {
      if (v) values[name].push_back(*v);
    };
    record("f1_micro", outcome.metrics.f1_micro);
    record("f1_macro", outcome.metrics.f1_macro);
    record("f1_weighted", outcome.metrics.f1_weighted);
    record("disparate_impact", outcome.metrics.disparate_impact);
    record("swise_tv", outcome.metrics.swise_tv);
  }

  TrialsSummary summary;
  summary.trials = trials;
  for (const auto& [name, vs] : values) {
    double mean = 0.0;
    for (double v : vs) mean += v;
    mean /= static_cast<double>(vs.size());
    double var = 0.0;
    for (double v : vs) var += (v - mean) * (v - mean);
    var = vs.size() > 1 ? var / static_cast<double>(vs.size() - 1) : 0.0;
    summary.mean_std[name] = {mean, std::sqrt(var)};
  }
  return summary;
}

}  // namespace otrepair
