#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "otrepair/csv.hpp"
#include "otrepair/dataset.hpp"
#include "otrepair/distributions.hpp"
#include "otrepair/metrics.hpp"
#include "otrepair/projection.hpp"
#include "otrepair/solvers.hpp"

namespace otrepair {

enum class Method { None, Baseline, Dykstra, Barycentre };

enum class CostWeightMode { Unit, ReciprocalRange, Explicit };

struct RunConfig {
  double epsilon = 0.01;
  // Scalar band level broadcast over the support unless a full vector is
  // given.
  double lambda = 0.0;
  std::vector<double> lambda_vector;
  std::optional<std::size_t> iterations;  // defaults: 600 repair, 400 otherwise
  std::optional<double> varepsilon;       // defaults: 1e-4 synthetic, 1e-5 tabular

  std::vector<std::string> adjusted_columns;
  std::string group_column;
  std::string group_unprivileged = "0";
  std::string group_privileged = "1";
  std::string label_column;
  std::string label_positive = "1";
  std::string score_column;
  std::string weight_column;

  CostWeightMode cost_mode = CostWeightMode::ReciprocalRange;
  std::vector<double> cost_weights;  // explicit mode only

  double tv_threshold = 0.08;
  double classifier_threshold = 0.1;
  int round_decimals = 6;
  std::map<std::string, int> round_decimals_per_column;

  std::string v_file;  // optional externally supplied repair vector
};

struct SyntheticSpec {
  double lo = -30.0;
  double hi = 10.0;
  double p_group0 = 0.7;
  double mu0 = -10.0;
  double sigma0 = 6.0;
  double mu1 = 1.0;
  double sigma1 = 3.0;
  double target_mu = -5.0;
  double target_sigma = 5.0;
  std::size_t samples = 10000;
  std::uint64_t seed = 1;
};

// Draws (floor of a group Gaussian, group) pairs, clamped into [lo, hi].
// Deterministic under a fixed seed; the Gaussian sampler is hand-rolled
// Box-Muller so the stream does not depend on the standard library.
WeightedDataset generate_synthetic(const SyntheticSpec& spec);

// Parses, filters to the two configured group values (when a group column is
// set), rounds adjusted features to the configured precision.
WeightedDataset ingest_csv(const std::string& path, const RunConfig& config);

// Cell probabilities of floor(N(mu, sigma^2)) on the support points,
// renormalized; the synthetic target distribution.
std::vector<double> discretized_gaussian(const Support& support, double mu, double sigma);

struct TvTableEntry {
  std::string column;
  double tv = 0.0;
  bool selected = false;
};

struct FeatureSelection {
  std::vector<TvTableEntry> table;
  std::vector<std::string> selected;
};

// Per-column group-wise TV distance over the candidate columns; columns with
// TV above the threshold are selected for adjustment.
FeatureSelection select_adjusted_features(const CsvTable& table,
                                          const std::vector<std::string>& candidates,
                                          const RunConfig& config);

// Stand-in scorer for runs without an external score column: a logistic curve
// over the range-normalized mean of the adjusted features.
double demo_score(const Support& support, const Support::Point& x);

struct RepairOutcome {
  Method method = Method::None;
  WeightedDataset projected;
  Coupling coupling;
  SolverTrace trace;
  MetricsReport metrics;
  SupportPtr support;
  std::vector<double> p_x;
  std::optional<std::vector<double>> p_x_s0;
  std::optional<std::vector<double>> p_x_s1;
  std::vector<double> target;
  std::vector<double> projected_blind;
  std::optional<std::vector<double>> projected_s0;
  std::optional<std::vector<double>> projected_s1;
};

// End-to-end run: support and empiricals from the data, repair vector from
// the group column (or the configured v-file), solver by method, projection,
// scoring and metrics. The fit path for baseline/dykstra consumes only P^X,
// the target and V; group tags are used for evaluation only. `target_values`
// overrides the target distribution (defaults to P^X); it must live on the
// data's tuple support.
RepairOutcome run_repair(const WeightedDataset& data, const RunConfig& config, Method method,
                         const std::optional<std::vector<double>>& target_values = std::nullopt);

// Writes coupling.csv, metrics.json, distributions.csv, trace.csv and
// projected.csv under the directory.
void emit_outputs(const RepairOutcome& outcome, const std::string& out_dir,
                  bool emit_projected = true);

// Round-trip reader for the emitted coupling file.
Matrix read_coupling_csv(const std::string& path, const Support& source,
                         const Support& target);

// Support-aligned repair vector file (one row per point, `v` column).
void write_v_file(const std::string& path, const Support& support,
                  const std::vector<double>& v);
std::vector<double> read_v_file(const std::string& path, const Support& support);

// Serializes a dataset (adjusted features, neutral cells, tags, weight,
// source id) as CSV; the inverse of ingest for projected data.
void write_dataset_csv(const std::string& path, const WeightedDataset& data);

struct TrialsSummary {
  std::size_t trials = 0;
  std::map<std::string, std::pair<double, double>> mean_std;
};

// Reduced cross-validation harness: repeated random test splits of
// (1 - train_frac) of the data, repair and metrics per split, mean and
// standard deviation of every defined index.
TrialsSummary run_trials(const WeightedDataset& data, const RunConfig& config, Method method,
                         std::size_t trials, double train_frac, std::uint64_t seed,
                         const std::optional<std::vector<double>>& target_values = std::nullopt);

}  // namespace otrepair
