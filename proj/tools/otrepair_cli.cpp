// Command line front end: group-blind bias repair over CSV or synthetic data.
//
// Subcommands: repair (band-constrained Dykstra), baseline (plain entropic
// OT), barycentre (group-aware prior-work baseline), metrics (no projection),
// synth (write a synthetic dataset), tvtable (per-feature group TV distances).

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "otrepair/csv.hpp"
#include "otrepair/error.hpp"
#include "otrepair/pipeline.hpp"

using namespace otrepair;

namespace {

struct CliOptions {
  std::string config_file;
  std::string input;
  bool synthetic = false;
  std::string out_dir = "out";
  std::string out_file;

  RunConfig run;
  std::vector<std::string> adjusted;
  std::vector<std::string> candidates;
  std::string cost_mode = "reciprocal-range";
  std::string lambda_file;

  SyntheticSpec synth;
  bool target_gaussian = false;
  double target_mu = -5.0;
  double target_sigma = 5.0;

  std::size_t trials = 0;
  double train_frac = 0.6;
  bool no_projected = false;
};

// --config file values act as defaults; explicit flags override them. Keys
// use the flag spelling without the leading dashes.
void apply_config_file(CliOptions& opt) {
  if (opt.config_file.empty()) return;
  std::ifstream in(opt.config_file);
  if (!in) throw Error(ErrorKind::Io, "IoError", "cannot open " + opt.config_file);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::Config, "ParseError",
                opt.config_file + " is not valid JSON: " + e.what());
  }
  const auto set_double = [&](const char* key, double& slot) {
    if (j.contains(key)) slot = j.at(key).get<double>();
  };
  const auto set_size = [&](const char* key, std::size_t& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::size_t>();
  };
  const auto set_string = [&](const char* key, std::string& slot) {
    if (j.contains(key)) slot = j.at(key).get<std::string>();
  };
  set_double("epsilon", opt.run.epsilon);
  set_double("lambda", opt.run.lambda);
  if (j.contains("iterations")) opt.run.iterations = j.at("iterations").get<std::size_t>();
  if (j.contains("varepsilon")) opt.run.varepsilon = j.at("varepsilon").get<double>();
  if (j.contains("adjusted")) opt.adjusted = j.at("adjusted").get<std::vector<std::string>>();
  if (j.contains("columns")) opt.candidates = j.at("columns").get<std::vector<std::string>>();
  set_string("group-column", opt.run.group_column);
  set_string("group-unprivileged", opt.run.group_unprivileged);
  set_string("group-privileged", opt.run.group_privileged);
  set_string("label-column", opt.run.label_column);
  set_string("label-positive", opt.run.label_positive);
  set_string("score-column", opt.run.score_column);
  set_string("weight-column", opt.run.weight_column);
  set_string("cost-weights", opt.cost_mode);
  if (j.contains("cost-weight-values"))
    opt.run.cost_weights = j.at("cost-weight-values").get<std::vector<double>>();
  set_double("tv-threshold", opt.run.tv_threshold);
  set_double("classifier-threshold", opt.run.classifier_threshold);
  if (j.contains("round-decimals")) opt.run.round_decimals = j.at("round-decimals").get<int>();
  if (j.contains("round-decimals-per-column"))
    opt.run.round_decimals_per_column =
        j.at("round-decimals-per-column").get<std::map<std::string, int>>();
  set_string("v-file", opt.run.v_file);
  set_string("input", opt.input);
  set_string("out", opt.out_dir);
  if (j.contains("synthetic")) opt.synthetic = j.at("synthetic").get<bool>();
  set_double("lo", opt.synth.lo);
  set_double("hi", opt.synth.hi);
  set_double("p0", opt.synth.p_group0);
  set_double("mu0", opt.synth.mu0);
  set_double("sigma0", opt.synth.sigma0);
  set_double("mu1", opt.synth.mu1);
  set_double("sigma1", opt.synth.sigma1);
  set_double("target-mu", opt.target_mu);
  set_double("target-sigma", opt.target_sigma);
  set_size("samples", opt.synth.samples);
  if (j.contains("seed")) opt.synth.seed = j.at("seed").get<std::uint64_t>();
  set_size("trials", opt.trials);
  set_double("train-frac", opt.train_frac);
}

void add_common_run_options(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--config", opt.config_file, "JSON config file merged under flags");
  cmd->add_option("--input", opt.input, "input CSV path");
  cmd->add_flag("--synthetic", opt.synthetic, "generate the synthetic instance instead");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--epsilon", opt.run.epsilon, "entropic regularization");
  cmd->add_option("--iterations", [&opt](const std::vector<std::string>& vals) {
    try {
      opt.run.iterations = std::stoull(vals.back());
    } catch (const std::exception&) {
      return false;
    }
    return true;
  }, "projection iteration count");
  cmd->add_option("--varepsilon", [&opt](const std::vector<std::string>& vals) {
    try {
      opt.run.varepsilon = std::stod(vals.back());
    } catch (const std::exception&) {
      return false;
    }
    return true;
  }, "early-exit threshold on ||gamma'V||_1");
  cmd->add_option("--adjusted", opt.adjusted, "adjusted feature columns")->delimiter(',');
  cmd->add_option("--group-column", opt.run.group_column, "sensitive attribute column");
  cmd->add_option("--group-unprivileged", opt.run.group_unprivileged,
                  "unprivileged group value (s0)");
  cmd->add_option("--group-privileged", opt.run.group_privileged, "privileged group value (s1)");
  cmd->add_option("--label-column", opt.run.label_column, "binary label column");
  cmd->add_option("--label-positive", opt.run.label_positive, "label value mapped to 1");
  cmd->add_option("--score-column", opt.run.score_column, "per-sample score column");
  cmd->add_option("--weight-column", opt.run.weight_column, "sample weight column");
  cmd->add_option("--cost-weights", opt.cost_mode,
                  "cost weight mode: unit | reciprocal-range | explicit");
  cmd->add_option("--cost-weight-values", opt.run.cost_weights, "explicit cost weights")
      ->delimiter(',');
  cmd->add_option("--classifier-threshold", opt.run.classifier_threshold,
                  "weighted-score decision threshold");
  cmd->add_option("--round-decimals", opt.run.round_decimals,
                  "decimal places kept for adjusted features");
  cmd->add_option("--v-file", opt.run.v_file, "externally supplied repair vector CSV");
  cmd->add_option("--trials", opt.trials, "number of random-split trials (0 = single run)");
  cmd->add_option("--train-frac", opt.train_frac, "held-out trial train fraction");
  cmd->add_flag("--no-projected", opt.no_projected, "skip writing projected.csv");
  // synthetic instance parameters
  cmd->add_option("--samples", opt.synth.samples, "synthetic sample count");
  cmd->add_option("--seed", opt.synth.seed, "synthetic RNG seed");
  cmd->add_option("--lo", opt.synth.lo, "synthetic support lower end");
  cmd->add_option("--hi", opt.synth.hi, "synthetic support upper end");
  cmd->add_option("--p0", opt.synth.p_group0, "synthetic group-0 probability");
  cmd->add_option("--mu0", opt.synth.mu0, "group-0 Gaussian mean");
  cmd->add_option("--sigma0", opt.synth.sigma0, "group-0 Gaussian width");
  cmd->add_option("--mu1", opt.synth.mu1, "group-1 Gaussian mean");
  cmd->add_option("--sigma1", opt.synth.sigma1, "group-1 Gaussian width");
  cmd->add_flag("--target-gaussian", opt.target_gaussian,
                "use a discretized Gaussian target (default for --synthetic)");
  cmd->add_option("--target-mu", opt.target_mu, "target Gaussian mean");
  cmd->add_option("--target-sigma", opt.target_sigma, "target Gaussian width");
}

CostWeightMode parse_cost_mode(const std::string& mode) {
  if (mode == "unit") return CostWeightMode::Unit;
  if (mode == "reciprocal-range") return CostWeightMode::ReciprocalRange;
  if (mode == "explicit") return CostWeightMode::Explicit;
  throw Error(ErrorKind::Config, "InvalidCostMode",
              "cost weight mode must be unit, reciprocal-range or explicit");
}

int run_method(CliOptions& opt, Method method) {
  opt.run.cost_mode = parse_cost_mode(opt.cost_mode);
  opt.run.adjusted_columns = opt.adjusted;

  WeightedDataset data;
  if (opt.synthetic) {
    data = generate_synthetic(opt.synth);
    opt.run.adjusted_columns = {"x"};
    if (!opt.run.varepsilon) opt.run.varepsilon = 1e-4;
    opt.target_gaussian = true;
  } else {
    if (opt.input.empty())
      throw Error(ErrorKind::Config, "MissingInput", "either --input or --synthetic is required");
    if (opt.run.adjusted_columns.empty())
      throw Error(ErrorKind::Config, "MissingColumn", "--adjusted columns are required");
    data = ingest_csv(opt.input, opt.run);
    if (!opt.run.varepsilon) opt.run.varepsilon = 1e-5;
  }

  std::optional<std::vector<double>> target;
  if (opt.target_gaussian) {
    auto support = tuple_support(data, data.adjusted_columns);
    target = discretized_gaussian(*support, opt.target_mu, opt.target_sigma);
  }

  if (opt.trials > 0) {
    auto summary = run_trials(data, opt.run, method, opt.trials, opt.train_frac,
                              opt.synth.seed, target);
    std::error_code ec;
    std::filesystem::create_directories(opt.out_dir, ec);
    if (ec) throw Error(ErrorKind::Io, "IoError", "cannot create " + opt.out_dir);
    std::ofstream json(opt.out_dir + "/trials.json", std::ios::binary);
    json << "{\"trials\": " << summary.trials;
    for (const auto& [name, ms] : summary.mean_std)
      json << ", \"" << name << "_mean\": " << format_double(ms.first) << ", \"" << name
           << "_std\": " << format_double(ms.second);
    json << "}\n";
    std::cout << "wrote " << opt.out_dir << "/trials.json (" << summary.trials << " trials)\n";
    return 0;
  }

  auto outcome = run_repair(data, opt.run, method, target);
  emit_outputs(outcome, opt.out_dir, !opt.no_projected);
  std::cout << "wrote " << opt.out_dir << "/{coupling,distributions,trace}.csv, metrics.json";
  if (!opt.no_projected) std::cout << ", projected.csv";
  std::cout << "\n" << outcome.metrics.to_json() << "\n";
  return 0;
}

int run_synth(CliOptions& opt) {
  auto data = generate_synthetic(opt.synth);
  const std::string path = opt.out_file.empty() ? "synthetic.csv" : opt.out_file;
  write_dataset_csv(path, data);
  std::cout << "wrote " << path << " (" << data.rows.size() << " rows)\n";
  return 0;
}

int run_tvtable(CliOptions& opt) {
  if (opt.input.empty())
    throw Error(ErrorKind::Config, "MissingInput", "--input is required");
  if (opt.candidates.empty())
    throw Error(ErrorKind::Config, "MissingColumn", "--columns is required");
  auto table = read_csv(opt.input);
  auto selection = select_adjusted_features(table, opt.candidates, opt.run);
  std::printf("%-24s %10s %s\n", "column", "tv", "selected");
  for (const auto& e : selection.table)
    std::printf("%-24s %10.4f %s\n", e.column.c_str(), e.tv, e.selected ? "yes" : "no");
  if (!opt.out_file.empty()) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& e : selection.table)
      rows.push_back({e.column, format_double(e.tv), e.selected ? "1" : "0"});
    write_csv(opt.out_file, {"column", "tv", "selected"}, rows);
    std::cout << "wrote " << opt.out_file << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"group-blind bias repair via entropic optimal transport"};
  app.require_subcommand(1);

  CliOptions opt;
  Method method = Method::None;

  // Config file values act as defaults below explicit flags, so the file is
  // read before CLI11 binds flag values over the option struct.
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--config" && i + 1 < argc) opt.config_file = argv[i + 1];
    else if (arg.rfind("--config=", 0) == 0) opt.config_file = arg.substr(9);
  }
  try {
    apply_config_file(opt);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  }

  auto* repair = app.add_subcommand("repair", "band-constrained Dykstra repair");
  add_common_run_options(repair, opt);
  repair->add_option("--lambda", opt.run.lambda, "band level (broadcast over the support)");
  repair->add_option("--lambda-file", opt.lambda_file, "per-point band levels CSV");
  repair->callback([&] { method = Method::Dykstra; });

  auto* baseline = app.add_subcommand("baseline", "plain entropic OT baseline");
  add_common_run_options(baseline, opt);
  baseline->callback([&] { method = Method::Baseline; });

  auto* barycentre = app.add_subcommand("barycentre", "group-aware barycentre baseline");
  add_common_run_options(barycentre, opt);
  barycentre->callback([&] { method = Method::Barycentre; });

  auto* metrics = app.add_subcommand("metrics", "evaluate a dataset without repairing it");
  add_common_run_options(metrics, opt);
  metrics->callback([&] { method = Method::None; });

  auto* synth = app.add_subcommand("synth", "write a synthetic dataset CSV");
  synth->add_option("--config", opt.config_file, "JSON config file merged under flags");
  synth->add_option("--out", opt.out_file, "output CSV path");
  synth->add_option("--samples", opt.synth.samples, "sample count");
  synth->add_option("--seed", opt.synth.seed, "RNG seed");
  synth->add_option("--lo", opt.synth.lo, "support lower end");
  synth->add_option("--hi", opt.synth.hi, "support upper end");
  synth->add_option("--p0", opt.synth.p_group0, "group-0 probability");
  synth->add_option("--mu0", opt.synth.mu0, "group-0 Gaussian mean");
  synth->add_option("--sigma0", opt.synth.sigma0, "group-0 Gaussian width");
  synth->add_option("--mu1", opt.synth.mu1, "group-1 Gaussian mean");
  synth->add_option("--sigma1", opt.synth.sigma1, "group-1 Gaussian width");

  auto* tvtable = app.add_subcommand("tvtable", "group-wise TV distance per feature");
  tvtable->add_option("--config", opt.config_file, "JSON config file merged under flags");
  tvtable->add_option("--input", opt.input, "input CSV path")->required();
  tvtable->add_option("--columns", opt.candidates, "candidate feature columns")->delimiter(',');
  tvtable->add_option("--group-column", opt.run.group_column, "sensitive attribute column");
  tvtable->add_option("--group-unprivileged", opt.run.group_unprivileged,
                      "unprivileged group value (s0)");
  tvtable->add_option("--group-privileged", opt.run.group_privileged, "privileged group value");
  tvtable->add_option("--tv-threshold", opt.run.tv_threshold, "selection threshold");
  tvtable->add_option("--round-decimals", opt.run.round_decimals, "rounding precision");
  tvtable->add_option("--out", opt.out_file, "also write the table as CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 2;
  }

  try {
    if (app.got_subcommand(synth)) return run_synth(opt);
    if (app.got_subcommand(tvtable)) return run_tvtable(opt);
    if (!opt.lambda_file.empty()) {
      // One value per support point, aligned like a v-file.
      CsvTable t = read_csv(opt.lambda_file);
      const auto col = t.column("lambda");
      for (const auto& row : t.rows)
        opt.run.lambda_vector.push_back(std::stod(row[col]));
    }
    return run_method(opt, method);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
