#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "affmed/geometry.hpp"
#include "affmed/median.hpp"

namespace affmed {

enum class EstimatorKind { ours, empirical_mean, coord_median, tukey, stahel_donoho };

std::string estimator_name(EstimatorKind kind);
std::optional<EstimatorKind> parse_estimator(const std::string& name);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::ours;
  double delta = 0.05;
  double eta = 0.0;
  double bucket_constant_c = 5.0;
  MedianConfig median_cfg;
  // Baselines share the median's direction budgets for a fair comparison;
  // only the candidate-point budget is their own knob.
  int baseline_candidates = 512;
  std::uint64_t seed = 0;
};

struct EstimateResult {
  Vector estimate;
  int k_buckets = 0;
  bool undefined_flag = false;       // Stahel-Donoho with no finite candidate
  bool eta_regime_exceeded = false;  // eta above 1 / (6 d)
  double runtime_ms = 0.0;
  // Achieved maximin depth (tukey) or minimax outlyingness (stahel_donoho).
  double score = 0.0;
  std::optional<MedianReport> report;
};

// Bucket count k = clamp(ceil(max(6 eta d n, C d ln(1/delta))), 1, n).
int choose_k(int n, int d, double delta, double eta, double c);

// Seeded shuffle, k buckets of floor(n/k) points, leftovers dropped.
PointSet bucket_means(const PointSet& pts, int k, std::uint64_t seed);

// Fraction of the sample on the smaller side of y (weakly).
double tukey_depth_1d(double y, const std::vector<double>& sample);

// Lower median; for mad the deviations are taken around it.
double median_1d(std::vector<double> sample);
double mad_1d(const std::vector<double>& sample);

EstimateResult estimate_ours(const PointSet& pts, const EstimatorConfig& cfg);
EstimateResult estimate_empirical_mean(const PointSet& pts);
EstimateResult estimate_coord_median(const PointSet& pts);
EstimateResult estimate_tukey(const PointSet& pts, const EstimatorConfig& cfg);
EstimateResult estimate_stahel_donoho(const PointSet& pts, const EstimatorConfig& cfg);

// Dispatch on cfg.kind; fills runtime_ms.
EstimateResult run_estimator(const PointSet& pts, const EstimatorConfig& cfg);

}  // namespace affmed
