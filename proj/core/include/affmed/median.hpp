#pragma once

#include <cstdint>
#include <vector>

#include "affmed/geometry.hpp"
#include "affmed/linprog.hpp"
#include "affmed/trimmed.hpp"

namespace affmed {

// One directional constraint: points y with |<y, v> - center| <= halfwidth.
// The window records which sample indices produced the trimmed statistics.
struct SlabConstraint {
  Vector direction;        // unit vector
  double center = 0.0;     // trimmed window mean of the projections
  double halfwidth = 0.0;  // twice the window mean absolute deviation
  std::vector<int> window; // indices into the point list
};

enum class EquivariantMode { whitened, raw };

struct MedianConfig {
  double nu = -1.0;          // trim fraction; <= 0 selects 1 / (3 d)
  double slack_eps = 0.05;   // stop when no direction is violated beyond this
  int max_iterations = 200;
  int directions_random = 64;
  int directions_data = 64;
  int sweep_random = 256;    // extra random directions in the final audit sweep
  std::uint64_t seed = 0;
  EquivariantMode mode = EquivariantMode::whitened;
};

struct MedianDiagnostics {
  bool iteration_limit = false;
  bool infeasible_degenerate = false;
  bool interval_fallback = false;  // some directional interval collapsed
  int rank = 0;                    // dimension actually solved in
  int hull_cuts = 0;
  double lp_gap = 0.0;
  double hull_distance = 0.0;      // pre-snap distance of the LP point to the hull
  double final_violation = 0.0;    // best violation found at termination
};

struct MedianReport {
  Vector estimate;
  double certified_outlyingness = 0.0;
  int iterations = 0;
  std::vector<SlabConstraint> constraints_used;  // input-space directions and windows
  Vector hull_weights;                           // barycentric, length n
  Matrix sweep_directions;                       // unit rows, input space; audit support
  MedianDiagnostics diagnostics;
};

struct ViolationReport {
  bool found = false;
  Vector direction;
  double violation = 0.0;      // normalized distance outside the interval
  double outlyingness = 0.0;   // trimmed outlyingness along the direction
  FeasibleIntervalDetail detail;
};

struct MinmaxSolution {
  Vector x;
  Vector weights;
  double t = 0.0;       // max normalized soft-slab violation at x
  LpStatus status = LpStatus::numerical_trouble;
  double gap = 0.0;
  double hull_distance = 0.0;
  int hull_cuts = 0;
};

// Trimmed slab from an explicit subset of the projections.
SlabConstraint build_slab(const PointSet& pts, const Direction& v, const std::vector<int>& subset);

// Heuristic search for the direction whose feasible interval the point x
// violates the most: random probes, data-driven probes, then local ascent.
ViolationReport find_violating_direction(const PointSet& pts, const Vector& x, const MedianConfig& cfg);

// min over x in conv(points) of the max violation |<x,v> - center| /
// halfwidth over the given slabs. Zero-halfwidth slabs become hard equality
// bands; per-direction data ranges are hard constraints. The returned point
// is exactly the barycentric combination of the weights.
MinmaxSolution solve_minmax(const PointSet& pts, const std::vector<SlabConstraint>& slabs, const MedianConfig& cfg);

// Cutting-plane computation of the trimmed high-dimensional median.
MedianReport high_dim_median(const PointSet& pts, const MedianConfig& cfg);

struct HellyCertificate {
  Vector mu_r;                      // mean over the common index set
  std::vector<int> common_indices;  // intersection of the slab windows
  std::vector<double> margins;      // halfwidth - |<mu_r, v> - center| per slab
};

// Feasibility witness from d+1 slabs: the mean over the intersection of
// their windows satisfies each slab. Throws when the intersection is
// smaller than (1 - (d+1) nu) n.
HellyCertificate helly_feasibility_certificate(const PointSet& pts,
                                               const std::vector<SlabConstraint>& slabs,
                                               double nu);

// Effective trim fraction for a configuration at ambient dimension d.
double effective_nu(const MedianConfig& cfg, int d);

}  // namespace affmed
