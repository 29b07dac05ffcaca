// Command-line front end: estimate a mean from a points file, run benchmark
// grids from a JSON config, and run the built-in hard-case and lower-bound
// presets. Exit codes: 0 success, 1 usage, 2 data error, 3 runtime failure.

#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "affmed/bench.hpp"
#include "affmed/estimators.hpp"
#include "affmed/instances.hpp"
#include "affmed/io.hpp"
#include "affmed/rng.hpp"

namespace {

using namespace affmed;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRuntime = 3;

struct EstimateArgs {
  std::string input;
  std::string estimator = "ours";
  double delta = 0.05;
  double eta = 0.0;
  double bucket_c = 5.0;
  std::uint64_t seed = 0;
  bool json_out = false;
  bool raw_mode = false;
};

int run_estimate(const EstimateArgs& args) {
  const auto kind = parse_estimator(args.estimator);
  if (!kind) {
    std::cerr << "unknown estimator: " << args.estimator << "\n";
    return kExitUsage;
  }
  PointSet pts;
  try {
    pts = read_points_csv(args.input);
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  EstimatorConfig cfg;
  cfg.kind = *kind;
  cfg.delta = args.delta;
  cfg.eta = args.eta;
  cfg.bucket_constant_c = args.bucket_c;
  cfg.seed = args.seed;
  if (args.raw_mode) cfg.median_cfg.mode = EquivariantMode::raw;

  EstimateResult res;
  try {
    res = run_estimator(pts, cfg);
  } catch (const std::exception& e) {
    std::cerr << "estimation failed: " << e.what() << "\n";
    return kExitRuntime;
  }

  const bool has_outly = cfg.kind == EstimatorKind::ours || cfg.kind == EstimatorKind::stahel_donoho;
  const int iterations = res.report ? res.report->iterations : 0;
  const int constraints = res.report ? static_cast<int>(res.report->constraints_used.size()) : 0;

  if (args.json_out) {
    nlohmann::ordered_json o;
    o["estimate"] = std::vector<double>(res.estimate.data(), res.estimate.data() + res.estimate.size());
    if (has_outly && std::isfinite(res.score)) {
      o["outlyingness"] = res.score;
    } else {
      o["outlyingness"] = nullptr;
    }
    o["iterations"] = iterations;
    o["constraints"] = constraints;
    o["k_buckets"] = res.k_buckets;
    o["seed"] = args.seed;
    o["undefined"] = res.undefined_flag;
    std::cout << o.dump(2) << "\n";
  } else {
    std::cout << "estimate:";
    for (int j = 0; j < res.estimate.size(); ++j) std::cout << ' ' << res.estimate[j];
    std::cout << "\n";
    if (has_outly) std::cout << "outlyingness: " << res.score << "\n";
    if (res.report) {
      std::cout << "iterations: " << iterations << "\nconstraints: " << constraints << "\n";
    }
    if (res.k_buckets > 0) std::cout << "k_buckets: " << res.k_buckets << "\n";
    if (res.undefined_flag) std::cout << "undefined: true\n";
  }
  return 0;
}

int write_and_report(const ExperimentConfig& cfg, const std::string& out_path,
                     const std::string& format) {
  std::vector<TrialRecord> records;
  try {
    records = run_experiment(cfg);
  } catch (const std::exception& e) {
    std::cerr << "experiment failed: " << e.what() << "\n";
    return kExitRuntime;
  }
  try {
    if (format == "json") {
      write_records_json(out_path, records);
    } else {
      write_records_csv(out_path, records);
    }
  } catch (const std::exception& e) {
    std::cerr << "write failed: " << e.what() << "\n";
    return kExitData;
  }
  std::cout << "wrote " << records.size() << " records to " << out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"affine-equivariant robust mean estimation toolkit"};
  app.require_subcommand(1);

  // estimate
  EstimateArgs est;
  CLI::App* sub_est = app.add_subcommand("estimate", "estimate the mean of a points file");
  sub_est->add_option("--input", est.input, "points CSV file")->required();
  sub_est->add_option("--estimator", est.estimator,
                      "ours|empirical_mean|coord_median|tukey|stahel_donoho");
  sub_est->add_option("--delta", est.delta, "failure probability for bucket sizing");
  sub_est->add_option("--eta", est.eta, "assumed contamination fraction");
  sub_est->add_option("--C", est.bucket_c, "bucket constant C");
  sub_est->add_option("--seed", est.seed, "random seed");
  sub_est->add_flag("--json", est.json_out, "print a JSON report");
  sub_est->add_flag("--raw-mode", est.raw_mode, "skip whitening in the median");

  // bench
  std::string bench_config;
  std::string bench_out;
  std::string bench_format;
  CLI::App* sub_bench = app.add_subcommand("bench", "run a benchmark grid from a JSON config");
  sub_bench->add_option("--config", bench_config, "JSON experiment config")->required();
  sub_bench->add_option("--out", bench_out, "output path (overrides config)");
  sub_bench->add_option("--format", bench_format, "csv|json (overrides config)");

  // hardcase
  struct {
    int d = 20;
    int n = 20000;
    int trials = 20;
    std::string gamma = "auto";
    std::uint64_t seed = 1;
    std::string out = "hardcase.csv";
    bool timings = false;
  } hard;
  CLI::App* sub_hard = app.add_subcommand("hardcase", "basis-vector hard instance preset");
  sub_hard->add_option("--d", hard.d, "dimension");
  sub_hard->add_option("--n", hard.n, "sample size");
  sub_hard->add_option("--trials", hard.trials, "number of trials");
  sub_hard->add_option("--gamma", hard.gamma, "tilt parameter, or auto for 1/(10 d)");
  sub_hard->add_option("--seed", hard.seed, "base seed");
  sub_hard->add_option("--out", hard.out, "output CSV path");
  sub_hard->add_flag("--timings", hard.timings, "record wall-clock times");

  // lowerbound
  struct {
    std::string family;
    int d = 8;
    int n = 2000;
    int trials = 5;
    double delta = 0.05;
    double eta = -1.0;
    double r = 100.0;
    std::uint64_t seed = 1;
    std::string out = "lowerbound.csv";
    bool timings = false;
  } lb;
  CLI::App* sub_lb = app.add_subcommand("lowerbound", "lower-bound family presets");
  sub_lb->add_option("--family", lb.family, "heavy|breakdown|quant")->required();
  sub_lb->add_option("--d", lb.d, "dimension");
  sub_lb->add_option("--n", lb.n, "sample size");
  sub_lb->add_option("--trials", lb.trials, "number of trials");
  sub_lb->add_option("--delta", lb.delta, "failure probability");
  sub_lb->add_option("--eta", lb.eta, "contamination fraction (default: family-specific)");
  sub_lb->add_option("--r", lb.r, "breakdown target error radius");
  sub_lb->add_option("--seed", lb.seed, "base seed");
  sub_lb->add_option("--out", lb.out, "output CSV path");
  sub_lb->add_flag("--timings", lb.timings, "record wall-clock times");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (sub_est->parsed()) return run_estimate(est);

    if (sub_bench->parsed()) {
      ExperimentConfig cfg;
      try {
        cfg = load_experiment_config(bench_config);
      } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitData;
      }
      if (!bench_out.empty()) cfg.out_path = bench_out;
      if (!bench_format.empty()) cfg.out_format = bench_format;
      if (cfg.out_path.empty()) {
        std::cerr << "no output path: give --out or set output.path in the config\n";
        return kExitUsage;
      }
      if (cfg.out_format != "csv" && cfg.out_format != "json") {
        std::cerr << "format must be csv or json\n";
        return kExitUsage;
      }
      return write_and_report(cfg, cfg.out_path, cfg.out_format);
    }

    if (sub_hard->parsed()) {
      double gamma;
      if (hard.gamma == "auto") {
        gamma = 1.0 / (10.0 * hard.d);
      } else {
        try {
          gamma = std::stod(hard.gamma);
        } catch (const std::exception&) {
          std::cerr << "--gamma must be a number or auto\n";
          return kExitUsage;
        }
      }
      ExperimentConfig cfg;
      cfg.trials = hard.trials;
      cfg.base_seed = hard.seed;
      cfg.timings = hard.timings;
      cfg.estimators = {EstimatorKind::ours, EstimatorKind::tukey, EstimatorKind::stahel_donoho,
                        EstimatorKind::empirical_mean};
      GridCell cell;
      cell.family = "intuition_gamma";
      cell.dist = make_intuition_gamma(hard.d, gamma, 0.0);
      cell.n = hard.n;
      cell.delta = 0.05;
      cfg.cells.push_back(std::move(cell));
      return write_and_report(cfg, hard.out, "csv");
    }

    if (sub_lb->parsed()) {
      ExperimentConfig cfg;
      cfg.trials = lb.trials;
      cfg.base_seed = lb.seed;
      cfg.timings = lb.timings;
      cfg.estimators = {EstimatorKind::ours, EstimatorKind::empirical_mean,
                        EstimatorKind::coord_median, EstimatorKind::tukey,
                        EstimatorKind::stahel_donoho};
      if (lb.family == "heavy") {
        GridCell cell;
        cell.family = "heavytailed_lb";
        cell.dist = make_heavytailed(lb.d, 1, heavytailed_eps(lb.n, lb.d, lb.delta));
        cell.n = lb.n;
        cell.delta = lb.delta;
        cfg.cells.push_back(std::move(cell));
      } else if (lb.family == "breakdown") {
        const double eta = lb.eta > 0.0 ? lb.eta : 2.0 / (lb.d + 1);
        const std::vector<FamilyMember> fam = breakdown_family(lb.d, lb.r);
        GridCell clean;
        clean.family = "breakdown_lb";
        clean.dist = fam[1].dist;
        clean.n = lb.n;
        clean.delta = lb.delta;
        cfg.cells.push_back(clean);
        GridCell bad = clean;
        bad.eta = eta;
        bad.contamination.mode = ContaminationMode::huber_mix;
        bad.contamination.eta = eta;
        bad.contamination.payload = *fam[1].witness;
        for (size_t i = 1; i < fam.size(); ++i) bad.score_family.push_back(fam[i].dist);
        cfg.cells.push_back(std::move(bad));
      } else if (lb.family == "quant") {
        if (lb.eta <= 0.0) {
          std::cerr << "--eta > 0 required for the quant family\n";
          return kExitUsage;
        }
        const std::vector<FamilyMember> fam = quant_family(lb.d, lb.eta);
        GridCell clean;
        clean.family = "quant_lb";
        clean.dist = fam[1].dist;
        clean.n = lb.n;
        clean.delta = lb.delta;
        cfg.cells.push_back(clean);
        GridCell bad = clean;
        bad.eta = lb.eta;
        bad.contamination.mode = ContaminationMode::huber_mix;
        bad.contamination.eta = lb.eta;
        bad.contamination.payload = *fam[1].witness;
        for (const FamilyMember& m : fam) bad.score_family.push_back(m.dist);
        cfg.cells.push_back(std::move(bad));
      } else {
        std::cerr << "unknown family: " << lb.family << " (expected heavy|breakdown|quant)\n";
        return kExitUsage;
      }
      return write_and_report(cfg, lb.out, "csv");
    }
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
