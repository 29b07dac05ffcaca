#include "affmed/trimmed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "affmed/geometry.hpp"

namespace affmed {

namespace {

struct SortedView {
  std::vector<double> vals;   // ascending
  std::vector<int> order;     // vals[j] == y[order[j]]
  std::vector<double> prefix; // prefix[j] = sum of vals[0..j)
};

SortedView sort_with_index(const std::vector<double>& y) {
  SortedView sv;
  const int k = static_cast<int>(y.size());
  sv.order.resize(k);
  std::iota(sv.order.begin(), sv.order.end(), 0);
  std::stable_sort(sv.order.begin(), sv.order.end(),
                   [&](int a, int b) { return y[a] < y[b]; });
  sv.vals.resize(k);
  for (int j = 0; j < k; ++j) sv.vals[j] = y[sv.order[j]];
  sv.prefix.resize(k + 1, 0.0);
  for (int j = 0; j < k; ++j) sv.prefix[j + 1] = sv.prefix[j] + sv.vals[j];
  return sv;
}

// Mean and mean absolute deviation of sorted window [i, i+s).
void window_stats(const SortedView& sv, int i, int s, double* mu, double* sigma1) {
  *mu = (sv.prefix[i + s] - sv.prefix[i]) / s;
  const auto lo = sv.vals.begin() + i;
  const auto hi = sv.vals.begin() + i + s;
  const int t = static_cast<int>(std::lower_bound(lo, hi, *mu) - sv.vals.begin());
  const double below = *mu * (t - i) - (sv.prefix[t] - sv.prefix[i]);
  const double above = (sv.prefix[i + s] - sv.prefix[t]) - *mu * (i + s - t);
  *sigma1 = std::max(0.0, below + above) / s;
}

std::vector<int> window_subset(const SortedView& sv, int i, int s) {
  std::vector<int> subset(sv.order.begin() + i, sv.order.begin() + i + s);
  std::sort(subset.begin(), subset.end());
  return subset;
}

void validate_nu(double nu) {
  if (!(nu >= 0.0 && nu < 0.5)) {
    throw InvalidInput("trim fraction nu must lie in [0, 0.5)");
  }
}

// The interval routines additionally need nu <= 1/3: that is where any two
// admissible subsets overlap in at least (1 - 2 nu) k points and the mean
// over the overlap satisfies both slabs, since (1 - nu) / (1 - 2 nu) <= 2.
// Past 1/3 the slab intersection can be genuinely empty and the window
// reduction no longer matches full enumeration (counterexamples near
// nu = 0.49 with tied values).
void validate_interval_nu(double nu) {
  validate_nu(nu);
  if (nu > 1.0 / 3.0 + 1e-12) {
    throw InvalidInput("feasible interval requires nu <= 1/3");
  }
}

}  // namespace

int min_subset_size(int k, double nu) {
  validate_nu(nu);
  if (k < 1) throw InvalidInput("min_subset_size: empty sample");
  // ceil((1 - nu) k) computed as k - floor(nu k); the epsilon keeps nu k
  // values that are mathematically integral from rounding down.
  int m = k - static_cast<int>(std::floor(nu * k + 1e-9));
  return std::clamp(m, 1, k);
}

TrimmedStats min_sigma_subset(const std::vector<double>& y, int m) {
  const int k = static_cast<int>(y.size());
  if (k < 1) throw InvalidInput("min_sigma_subset: empty sample");
  if (m < 1 || m > k) throw InvalidInput("min_sigma_subset: subset size out of range");
  const SortedView sv = sort_with_index(y);

  // Contiguous windows of the sorted sample are sufficient: swapping any
  // outside value for an inside one never lowers the mean absolute
  // deviation. The brute-force oracle in the test suite enforces this.
  double best_sigma = std::numeric_limits<double>::infinity();
  int best_i = 0, best_s = m;
  for (int s = m; s <= k; ++s) {
    for (int i = 0; i + s <= k; ++i) {
      double mu, s1;
      window_stats(sv, i, s, &mu, &s1);
      if (s1 < best_sigma) {
        best_sigma = s1;
        best_i = i;
        best_s = s;
      }
    }
  }
  TrimmedStats out;
  double mu;
  window_stats(sv, best_i, best_s, &mu, &out.sigma1);
  out.mu = mu;
  out.subset = window_subset(sv, best_i, best_s);
  return out;
}

Interval slab_interval(const TrimmedStats& stats) {
  return Interval{stats.mu - 2.0 * stats.sigma1, stats.mu + 2.0 * stats.sigma1, false};
}

FeasibleIntervalDetail directional_feasible_interval_detail(const std::vector<double>& y, double nu) {
  validate_interval_nu(nu);
  const int k = static_cast<int>(y.size());
  const int m = min_subset_size(k, nu);
  const SortedView sv = sort_with_index(y);

  // Windows of the minimum admissible size m determine the intersection:
  // every larger window's slab contains some size-m window's slab endpoint.
  // Validated against full subset enumeration by the oracle test.
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  int lo_i = 0, hi_i = 0;
  for (int i = 0; i + m <= k; ++i) {
    double mu, s1;
    window_stats(sv, i, m, &mu, &s1);
    const double left = mu - 2.0 * s1;
    const double right = mu + 2.0 * s1;
    if (left > lo) {
      lo = left;
      lo_i = i;
    }
    if (right < hi) {
      hi = right;
      hi_i = i;
    }
  }

  FeasibleIntervalDetail detail;
  detail.data_min = sv.vals.front();
  detail.data_max = sv.vals.back();

  auto fill = [&](BindingWindow* w, int i) {
    window_stats(sv, i, m, &w->mu, &w->sigma1);
    w->subset = window_subset(sv, i, m);
  };
  fill(&detail.lower, lo_i);
  fill(&detail.upper, hi_i);

  if (lo < detail.data_min) {
    lo = detail.data_min;
    detail.lower_is_range_clip = true;
  }
  if (hi > detail.data_max) {
    hi = detail.data_max;
    detail.upper_is_range_clip = true;
  }

  if (lo > hi) {
    // Numerically empty: collapse to the midpoint of the crossing bounds.
    const double mid = 0.5 * (lo + hi);
    detail.interval = Interval{mid, mid, true};
  } else {
    detail.interval = Interval{lo, hi, false};
  }
  return detail;
}

Interval directional_feasible_interval(const std::vector<double>& y, double nu) {
  return directional_feasible_interval_detail(y, nu).interval;
}

Interval brute_force_interval(const std::vector<double>& y, double nu) {
  validate_interval_nu(nu);
  const int k = static_cast<int>(y.size());
  if (k > 20) throw InvalidInput("brute_force_interval: sample too large (k <= 20)");
  const int m = min_subset_size(k, nu);

  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    const int s = __builtin_popcount(mask);
    if (s < m) continue;
    double sum = 0.0;
    for (int j = 0; j < k; ++j) {
      if (mask & (1u << j)) sum += y[j];
    }
    const double mu = sum / s;
    double sumabs = 0.0;
    for (int j = 0; j < k; ++j) {
      if (mask & (1u << j)) sumabs += std::abs(y[j] - mu);
    }
    const double s1 = sumabs / s;
    lo = std::max(lo, mu - 2.0 * s1);
    hi = std::min(hi, mu + 2.0 * s1);
  }
  const double dmin = *std::min_element(y.begin(), y.end());
  const double dmax = *std::max_element(y.begin(), y.end());
  lo = std::max(lo, dmin);
  hi = std::min(hi, dmax);
  if (lo > hi) {
    const double mid = 0.5 * (lo + hi);
    return Interval{mid, mid, true};
  }
  return Interval{lo, hi, false};
}

double outlyingness_1d(double y, const std::vector<double>& sample, double nu) {
  const int k = static_cast<int>(sample.size());
  const TrimmedStats stats = min_sigma_subset(sample, min_subset_size(k, nu));
  const double scale = std::max(1.0, std::abs(stats.mu));
  if (stats.sigma1 <= 1e-14 * scale) {
    // The snap band must stay comfortably above the precision to which any
    // solver can hold a point on an exact-tie hyperplane.
    return std::abs(y - stats.mu) <= 1e-9 * scale ? 0.0 : std::numeric_limits<double>::infinity();
  }
  return std::abs(y - stats.mu) / stats.sigma1;
}

}  // namespace affmed
