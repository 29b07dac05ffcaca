#pragma once

#include <vector>

#include "affmed/geometry.hpp"

namespace affmed {

enum class LpStatus { optimal, infeasible, unbounded, numerical_trouble };

struct LpResult {
  LpStatus status = LpStatus::numerical_trouble;
  Vector z;            // optimal point
  double objective = 0.0;
  double gap = 0.0;    // |primal obj - dual obj| at the reported solution
  int iterations = 0;
};

// Minimize c'z subject to G z <= g with z free. Designed for few variables
// (tens) and many rows (thousands): the dual is solved with a dense
// two-phase tableau simplex whose tableau has only dim(z) rows, and the
// primal optimum is read off the simplex multipliers.
LpResult solve_lp_few_vars(const Matrix& G, const Vector& g, const Vector& c);

struct SimplexProjection {
  Vector weights;   // in the simplex, support size <= dim + 2
  Vector point;     // A * weights
  double distance;  // |point - target|
  int iterations = 0;
};

// Least squares over the probability simplex: minimize |A w - x| subject to
// w >= 0, sum w = 1. Columns of A are the points. Active-set method in the
// style of Lawson-Hanson NNLS; exact finite termination on generic data.
SimplexProjection project_onto_hull(const Matrix& a, const Vector& x);

}  // namespace affmed
