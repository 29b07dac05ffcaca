#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "affmed/estimators.hpp"
#include "affmed/instances.hpp"

namespace affmed {

// One output row. Error fields are NaN when not computed (failed trial, or
// singular covariance where only the certified lower bound exists); the note
// says why.
struct TrialRecord {
  std::string family;
  int d = 0;
  int n = 0;
  double eta = 0.0;
  double delta = 0.0;
  std::string estimator;
  int trial = 0;
  std::uint64_t seed = 0;
  double error_mahalanobis = std::numeric_limits<double>::quiet_NaN();
  double error_euclidean = std::numeric_limits<double>::quiet_NaN();
  double cert_lower_bound = std::numeric_limits<double>::quiet_NaN();
  double outlyingness = std::numeric_limits<double>::quiet_NaN();
  int k_buckets = 0;
  bool undefined_flag = false;
  double runtime_ms = 0.0;
  std::string note;
};

// Fixed CSV column order; also the key order of JSON records.
const std::vector<std::string>& trial_record_fields();

// One grid point: what to sample, how to corrupt it, and what to score
// against. score_family empty means score against dist's own moments;
// nonempty means take the worst error over the listed members.
struct GridCell {
  std::string family;
  DistributionSpec dist;
  ContaminationSpec contamination;
  int n = 0;
  double eta = 0.0;
  double delta = 0.05;
  std::vector<DistributionSpec> score_family;
};

struct ExperimentConfig {
  std::vector<GridCell> cells;
  std::vector<EstimatorKind> estimators;
  double bucket_constant_c = 5.0;
  MedianConfig median_cfg;
  int baseline_candidates = 512;
  int trials = 1;
  std::uint64_t base_seed = 0;
  bool timings = false;  // when false, runtime_ms is zeroed for byte-stable output
  std::string out_path;
  std::string out_format = "csv";  // "csv" or "json"
};

// Exact Mahalanobis error of an estimate against the distribution's
// closed-form moments. Throws SingularCovariance when the covariance is
// singular.
double mahalanobis_error(const Vector& estimate, const DistributionSpec& spec);

struct CertificateResult {
  double value = 0.0;
  bool all_null = false;  // every direction had zero variance and zero inner product
};

// max over directions of |<estimate - mean, v>| / sqrt(v' cov v); always a
// lower bound on the Mahalanobis norm. A zero-variance direction with a
// nonzero inner product certifies an infinite norm.
CertificateResult directional_certificate(const Vector& estimate, const Vector& mean,
                                          const Matrix& cov, const std::vector<Vector>& directions);

// Runs the full grid x estimator x trial product. Deterministic: records are
// sorted by (family, d, n, eta, delta, estimator, trial) and every seed is
// derived from base_seed and the grid position, independent of scheduling.
// Worker count comes from AFFMED_THREADS when set.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& cfg);

void write_records_csv(const std::string& path, const std::vector<TrialRecord>& records);
void write_records_json(const std::string& path, const std::vector<TrialRecord>& records);

// JSON experiment config file; see docs/bench-config.md for the schema.
ExperimentConfig load_experiment_config(const std::string& path);

}  // namespace affmed
