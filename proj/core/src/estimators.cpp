#include "affmed/estimators.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "affmed/rng.hpp"

namespace affmed {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> to_std(const Vector& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Shared candidate points for the depth baselines: data subsample, pairwise
// midpoints, then the coordinate-wise median. Ties in the argmax/argmin
// resolve to the earliest candidate, so data points win over synthetics.
std::vector<Vector> baseline_candidates(const PointSet& pts, const EstimatorConfig& cfg, Rng& rng) {
  const int n = pts.n();
  std::vector<Vector> out;
  const int n_data = std::min(cfg.baseline_candidates, n);
  for (int i : rng.sample_without_replacement(n, n_data)) out.push_back(pts.point(i));
  const int n_mid =
      static_cast<int>(std::min<long long>(cfg.baseline_candidates / 2, 1LL * n * (n - 1) / 2));
  for (int t = 0; t < n_mid; ++t) {
    const int a = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    int b = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    if (a == b) b = (b + 1) % n;
    out.push_back(0.5 * (pts.point(a) + pts.point(b)));
  }
  out.push_back(estimate_coord_median(pts).estimate);
  return out;
}

// Shared direction sweep: random unit vectors, normalized data differences,
// the coordinate axes, and the all-ones direction.
std::vector<Vector> baseline_directions(const PointSet& pts, const EstimatorConfig& cfg, Rng& rng) {
  const int n = pts.n();
  const int d = pts.dim();
  std::vector<Vector> out;
  for (int t = 0; t < cfg.median_cfg.sweep_random; ++t) {
    Vector v(d);
    for (int j = 0; j < d; ++j) v[j] = rng.normal();
    const double nrm = v.norm();
    if (nrm > 1e-12) out.push_back(v / nrm);
  }
  for (int t = 0; t < cfg.median_cfg.directions_data && n > 1; ++t) {
    const int a = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    int b = static_cast<int>(rng.bounded(static_cast<std::uint64_t>(n)));
    if (a == b) b = (b + 1) % n;
    Vector v = pts.point(a) - pts.point(b);
    const double nrm = v.norm();
    if (nrm > 1e-12) out.push_back(v / nrm);
  }
  for (int j = 0; j < d; ++j) out.push_back(Vector::Unit(d, j));
  out.push_back(Vector::Ones(d) / std::sqrt(static_cast<double>(d)));
  return out;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::ours: return "ours";
    case EstimatorKind::empirical_mean: return "empirical_mean";
    case EstimatorKind::coord_median: return "coord_median";
    case EstimatorKind::tukey: return "tukey";
    case EstimatorKind::stahel_donoho: return "stahel_donoho";
  }
  return "unknown";
}

std::optional<EstimatorKind> parse_estimator(const std::string& name) {
  if (name == "ours") return EstimatorKind::ours;
  if (name == "empirical_mean") return EstimatorKind::empirical_mean;
  if (name == "coord_median") return EstimatorKind::coord_median;
  if (name == "tukey") return EstimatorKind::tukey;
  if (name == "stahel_donoho") return EstimatorKind::stahel_donoho;
  return std::nullopt;
}

int choose_k(int n, int d, double delta, double eta, double c) {
  if (n < 1 || d < 1) throw InvalidInput("choose_k: n and d must be positive");
  if (delta <= 0.0 || delta >= 1.0) throw InvalidInput("choose_k: delta must lie in (0,1)");
  if (eta < 0.0) throw InvalidInput("choose_k: eta must be nonnegative");
  double v = std::max(6.0 * eta * d * n, c * d * std::log(1.0 / delta));
  // Snap near-integer products before ceil so 300.0000000001 stays 300.
  const double r = std::round(v);
  if (std::abs(v - r) < 1e-9 * std::max(1.0, std::abs(v))) v = r;
  const double k = std::ceil(v);
  return static_cast<int>(std::clamp(k, 1.0, static_cast<double>(n)));
}

PointSet bucket_means(const PointSet& pts, int k, std::uint64_t seed) {
  const int n = pts.n();
  const int d = pts.dim();
  if (k < 1 || k > n) throw InvalidInput("bucket_means: need 1 <= k <= n");
  Rng rng(seed);
  const std::vector<int> perm = rng.permutation(n);
  const int b = n / k;
  Matrix means(k, d);
  for (int i = 0; i < k; ++i) {
    Vector m = Vector::Zero(d);
    for (int j = 0; j < b; ++j) m += pts.point(perm[i * b + j]);
    means.row(i) = (m / static_cast<double>(b)).transpose();
  }
  return PointSet(means);
}

double tukey_depth_1d(double y, const std::vector<double>& sample) {
  if (sample.empty()) throw InvalidInput("tukey_depth_1d: empty sample");
  int ge = 0;
  int le = 0;
  for (double s : sample) {
    if (s >= y) ++ge;
    if (s <= y) ++le;
  }
  return static_cast<double>(std::min(ge, le)) / static_cast<double>(sample.size());
}

double median_1d(std::vector<double> sample) {
  if (sample.empty()) throw InvalidInput("median_1d: empty sample");
  const size_t mid = (sample.size() - 1) / 2;  // lower median for even sizes
  std::nth_element(sample.begin(), sample.begin() + mid, sample.end());
  return sample[mid];
}

double mad_1d(const std::vector<double>& sample) {
  const double med = median_1d(sample);
  std::vector<double> dev(sample.size());
  for (size_t i = 0; i < sample.size(); ++i) dev[i] = std::abs(sample[i] - med);
  return median_1d(std::move(dev));
}

EstimateResult estimate_empirical_mean(const PointSet& pts) {
  EstimateResult res;
  res.estimate = sample_mean(pts);
  return res;
}

EstimateResult estimate_coord_median(const PointSet& pts) {
  EstimateResult res;
  const int d = pts.dim();
  res.estimate.resize(d);
  for (int j = 0; j < d; ++j) {
    res.estimate[j] = median_1d(to_std(pts.matrix().col(j)));
  }
  return res;
}

EstimateResult estimate_ours(const PointSet& pts, const EstimatorConfig& cfg) {
  EstimateResult res;
  const int n = pts.n();
  const int d = pts.dim();
  const int k = choose_k(n, d, cfg.delta, cfg.eta, cfg.bucket_constant_c);
  // One top-level seed drives the whole pipeline; the median gets its own
  // derived stream regardless of what median_cfg.seed was set to.
  PointSet means = bucket_means(pts, k, split_seed(cfg.seed, 1));
  MedianConfig mcfg = cfg.median_cfg;
  mcfg.seed = split_seed(cfg.seed, 2);
  MedianReport report = high_dim_median(means, mcfg);
  res.estimate = report.estimate;
  res.k_buckets = k;
  res.score = report.certified_outlyingness;
  res.eta_regime_exceeded = cfg.eta > 1.0 / (6.0 * d) + 1e-12;
  res.report = std::move(report);
  return res;
}

EstimateResult estimate_tukey(const PointSet& pts, const EstimatorConfig& cfg) {
  EstimateResult res;
  const int n = pts.n();
  Rng rng(split_seed(cfg.seed, 3));
  const std::vector<Vector> cands = baseline_candidates(pts, cfg, rng);
  const std::vector<Vector> dirs = baseline_directions(pts, cfg, rng);

  std::vector<std::vector<double>> sorted_proj(dirs.size());
  for (size_t v = 0; v < dirs.size(); ++v) {
    sorted_proj[v] = to_std(pts.matrix() * dirs[v]);
    std::sort(sorted_proj[v].begin(), sorted_proj[v].end());
  }

  double best_depth = -1.0;
  size_t best_idx = 0;
  for (size_t c = 0; c < cands.size(); ++c) {
    double depth = 1.0;
    for (size_t v = 0; v < dirs.size(); ++v) {
      const double y = cands[c].dot(dirs[v]);
      const auto& p = sorted_proj[v];
      const auto lo = std::lower_bound(p.begin(), p.end(), y);
      const auto hi = std::upper_bound(p.begin(), p.end(), y);
      const int le = static_cast<int>(hi - p.begin());
      const int ge = n - static_cast<int>(lo - p.begin());
      depth = std::min(depth, static_cast<double>(std::min(le, ge)) / n);
      if (depth <= best_depth) break;
    }
    if (depth > best_depth) {
      best_depth = depth;
      best_idx = c;
    }
  }
  res.estimate = cands[best_idx];
  res.score = best_depth;
  return res;
}

EstimateResult estimate_stahel_donoho(const PointSet& pts, const EstimatorConfig& cfg) {
  EstimateResult res;
  Rng rng(split_seed(cfg.seed, 4));
  const std::vector<Vector> cands = baseline_candidates(pts, cfg, rng);
  const std::vector<Vector> dirs = baseline_directions(pts, cfg, rng);

  struct DirStats {
    double med;
    double mad;
    double scale;
  };
  std::vector<DirStats> stats(dirs.size());
  for (size_t v = 0; v < dirs.size(); ++v) {
    const std::vector<double> p = to_std(pts.matrix() * dirs[v]);
    stats[v].med = median_1d(p);
    stats[v].mad = mad_1d(p);
    double s = 1.0;
    for (double x : p) s = std::max(s, std::abs(x));
    stats[v].scale = s;
  }

  double best = kInf;
  size_t best_idx = 0;
  bool any_finite = false;
  for (size_t c = 0; c < cands.size(); ++c) {
    double outly = 0.0;
    for (size_t v = 0; v < dirs.size(); ++v) {
      const double num = std::abs(cands[c].dot(dirs[v]) - stats[v].med);
      double o;
      if (stats[v].mad > 1e-12 * stats[v].scale) {
        o = num / stats[v].mad;
      } else {
        o = num <= 1e-9 * stats[v].scale ? 0.0 : kInf;
      }
      outly = std::max(outly, o);
      if (outly >= best) break;
    }
    if (outly < best) {
      best = outly;
      best_idx = c;
      any_finite = std::isfinite(outly);
    }
  }
  if (any_finite) {
    res.estimate = cands[best_idx];
    res.score = best;
  } else {
    // Every candidate is infinitely outlying along some degenerate
    // direction; the coordinate median stands in as a placeholder.
    res.undefined_flag = true;
    res.estimate = estimate_coord_median(pts).estimate;
    res.score = kInf;
  }
  return res;
}

EstimateResult run_estimator(const PointSet& pts, const EstimatorConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  EstimateResult res;
  switch (cfg.kind) {
    case EstimatorKind::ours: res = estimate_ours(pts, cfg); break;
    case EstimatorKind::empirical_mean: res = estimate_empirical_mean(pts); break;
    case EstimatorKind::coord_median: res = estimate_coord_median(pts); break;
    case EstimatorKind::tukey: res = estimate_tukey(pts, cfg); break;
    case EstimatorKind::stahel_donoho: res = estimate_stahel_donoho(pts, cfg); break;
  }
  const auto stop = std::chrono::steady_clock::now();
  res.runtime_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  return res;
}

}  // namespace affmed
