#pragma once

#include <vector>

namespace affmed {

// Mean and mean absolute deviation of a subset of a 1-d sample, together
// with the member indices (into the original sample order).
struct TrimmedStats {
  double mu = 0.0;
  double sigma1 = 0.0;
  std::vector<int> subset;
};

// Closed interval [lo, hi]. Feasible intervals are never empty: when the
// exact intersection is numerically empty the midpoint of the crossing
// endpoints is returned as a degenerate singleton and the flag is set.
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool degenerate_fallback = false;

  double mid() const { return 0.5 * (lo + hi); }
  double halfwidth() const { return 0.5 * (hi - lo); }
  bool contains(double y) const { return y >= lo && y <= hi; }
};

// A window achieving an endpoint of the feasible interval, reported so the
// caller can turn it into an explicit constraint.
struct BindingWindow {
  double mu = 0.0;
  double sigma1 = 0.0;
  std::vector<int> subset;  // original-order indices
};

struct FeasibleIntervalDetail {
  Interval interval;
  BindingWindow lower;  // window whose left slab edge attains interval.lo
  BindingWindow upper;  // window whose right slab edge attains interval.hi
  double data_min = 0.0;
  double data_max = 0.0;
  bool lower_is_range_clip = false;
  bool upper_is_range_clip = false;
};

// Minimum mean-absolute-deviation subset with at least m of the k values.
// The search runs over contiguous windows of the sorted sample, all sizes in
// [m, k]; ties break toward the smaller subset, then the leftmost window.
TrimmedStats min_sigma_subset(const std::vector<double>& y, int m);

// [mu - 2 sigma1, mu + 2 sigma1].
Interval slab_interval(const TrimmedStats& stats);

// Intersection of the slabs of every subset with at least ceil((1-nu)k)
// values, clipped to the data range [min y, max y]. Requires nu <= 1/3;
// there the intersection is provably nonempty and is attained by contiguous
// windows of the minimum admissible size, which is what makes the scan
// O(k log k) instead of exponential.
Interval directional_feasible_interval(const std::vector<double>& y, double nu);

// Same computation with the binding windows exposed.
FeasibleIntervalDetail directional_feasible_interval_detail(const std::vector<double>& y, double nu);

// Reference implementation enumerating every subset (not just windows).
// Exponential in k; callers must keep k <= 20.
Interval brute_force_interval(const std::vector<double>& y, double nu);

// |y - mu~| / sigma1~ against the minimum-sigma subset; when sigma1~ = 0 the
// value is 0 at mu~ (to a small relative tolerance) and +infinity elsewhere.
double outlyingness_1d(double y, const std::vector<double>& sample, double nu);

// Trim count helper: smallest admissible subset size for a sample of k.
int min_subset_size(int k, double nu);

}  // namespace affmed
