#include "affmed/linprog.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace affmed {

namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-9;

// Dense tableau simplex on min cost'y s.t. T y = rhs, y >= 0, where the
// tableau has p rows and ncols columns. basis[i] is the column basic in row
// i. Columns in [ban_from, ncols) may sit in the basis but never enter.
// Returns false on iteration trouble, true otherwise; *unbounded reports an
// unbounded ray.
bool run_simplex(Matrix& t, Vector& rhs, Vector& obj, double& objval,
                 std::vector<int>& basis, int ban_from, int* iters, bool* unbounded) {
  const int p = static_cast<int>(t.rows());
  const int ncols = static_cast<int>(t.cols());
  *unbounded = false;
  const int max_iters = 200 + 60 * ncols;
  const int bland_after = 40 + 10 * ncols;
  for (int it = 0; it < max_iters; ++it) {
    // Entering column: most negative reduced cost (Dantzig), Bland's rule
    // once degeneracy is suspected.
    int enter = -1;
    if (it < bland_after) {
      double best = -kCostTol;
      for (int j = 0; j < ban_from; ++j) {
        if (obj[j] < best) {
          best = obj[j];
          enter = j;
        }
      }
    } else {
      for (int j = 0; j < ban_from; ++j) {
        if (obj[j] < -kCostTol) {
          enter = j;
          break;
        }
      }
    }
    if (enter < 0) {
      *iters += it;
      return true;  // optimal
    }
    // Ratio test.
    int leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < p; ++i) {
      const double a = t(i, enter);
      if (a > kPivotTol) {
        const double ratio = rhs[i] / a;
        if (ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && (leave < 0 || basis[i] < basis[leave]))) {
          best_ratio = ratio;
          leave = i;
        }
      }
    }
    if (leave < 0) {
      *unbounded = true;
      *iters += it;
      return true;
    }
    // Pivot.
    const double piv = t(leave, enter);
    t.row(leave) /= piv;
    rhs[leave] /= piv;
    for (int i = 0; i < p; ++i) {
      if (i == leave) continue;
      const double f = t(i, enter);
      if (f != 0.0) {
        t.row(i) -= f * t.row(leave);
        rhs[i] -= f * rhs[leave];
        if (rhs[i] < 0.0 && rhs[i] > -1e-11) rhs[i] = 0.0;
      }
    }
    const double fo = obj[enter];
    if (fo != 0.0) {
      obj -= fo * t.row(leave).transpose();
      objval -= fo * rhs[leave];
    }
    basis[leave] = enter;
  }
  return false;
}

}  // namespace

LpResult solve_lp_few_vars(const Matrix& G, const Vector& g, const Vector& c) {
  LpResult res;
  const int m = static_cast<int>(G.rows());
  const int p = static_cast<int>(G.cols());
  if (m == 0 || p == 0 || g.size() != m || c.size() != p) {
    throw InvalidInput("solve_lp_few_vars: shape mismatch");
  }

  // Row scaling for conditioning; scaling an inequality row is harmless.
  Vector row_scale(m);
  Matrix Gs = G;
  Vector gs = g;
  for (int r = 0; r < m; ++r) {
    const double s = std::max(G.row(r).cwiseAbs().maxCoeff(), 1e-12);
    row_scale[r] = s;
    Gs.row(r) /= s;
    gs[r] /= s;
  }

  // Dual standard form: min gs'y s.t. Gs^T y = -c, y >= 0. The dual of this
  // problem is max (-c)'pi s.t. Gs pi <= gs, so the optimal multipliers pi
  // are exactly the primal optimum z*.
  Matrix a = Gs.transpose();  // p x m
  Vector b = -c;
  Vector sign = Vector::Ones(p);
  for (int i = 0; i < p; ++i) {
    if (b[i] < 0.0) {
      sign[i] = -1.0;
      a.row(i) = -a.row(i);
      b[i] = -b[i];
    }
  }

  const int ncols = m + p;  // original dual vars + artificials
  Matrix t(p, ncols);
  t.leftCols(m) = a;
  t.rightCols(p) = Matrix::Identity(p, p);
  Vector rhs = b;
  std::vector<int> basis(p);
  for (int i = 0; i < p; ++i) basis[i] = m + i;

  // Phase 1: minimize the sum of artificials.
  Vector obj = Vector::Zero(ncols);
  for (int j = 0; j < m; ++j) obj[j] = -t.col(j).sum();
  double objval = -rhs.sum();
  bool unbounded = false;
  if (!run_simplex(t, rhs, obj, objval, basis, m, &res.iterations, &unbounded)) {
    res.status = LpStatus::numerical_trouble;
    return res;
  }
  const double scale1 = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (-objval > 1e-7 * scale1) {
    // Dual infeasible: the primal is unbounded below.
    res.status = LpStatus::unbounded;
    return res;
  }

  // Phase 2: original dual objective; artificials stay banned from entering
  // so their reduced costs expose the simplex multipliers.
  obj.setZero();
  objval = 0.0;
  for (int j = 0; j < m; ++j) obj[j] = gs[j];
  for (int i = 0; i < p; ++i) {
    const int bj = basis[i];
    const double cb = bj < m ? gs[bj] : 0.0;
    if (cb != 0.0) {
      obj -= cb * t.row(i).transpose();
      objval -= cb * rhs[i];
    }
  }
  if (!run_simplex(t, rhs, obj, objval, basis, m, &res.iterations, &unbounded)) {
    res.status = LpStatus::numerical_trouble;
    return res;
  }
  if (unbounded) {
    // Dual unbounded means the primal has no feasible point.
    res.status = LpStatus::infeasible;
    return res;
  }

  // Multipliers: for artificial column m+i the reduced cost is -pi_i in the
  // sign-normalized system.
  Vector pi(p);
  for (int i = 0; i < p; ++i) pi[i] = -obj[m + i] * sign[i];
  // Dual objective equals gs'y*; read y* from the basis.
  double dual_obj = 0.0;
  for (int i = 0; i < p; ++i) {
    if (basis[i] < m) dual_obj += gs[basis[i]] * rhs[i];
  }

  // If an artificial is stuck in the basis (redundant equality row) its
  // reduced cost is zero and the read-off loses that multiplier. Detect via
  // a feasibility check and fall back to solving the tight-row system.
  const double feas_scale = std::max(1.0, gs.cwiseAbs().maxCoeff());
  auto primal_violation = [&](const Vector& z) {
    return (Gs * z - gs).maxCoeff();
  };
  if (primal_violation(pi) > 1e-6 * feas_scale ||
      std::abs(c.dot(pi) + dual_obj) > 1e-6 * std::max(1.0, std::abs(dual_obj))) {
    std::vector<int> tight;
    for (int i = 0; i < p; ++i) {
      if (basis[i] < m) tight.push_back(basis[i]);
    }
    if (!tight.empty()) {
      Matrix gt(static_cast<int>(tight.size()), p);
      Vector bt(static_cast<int>(tight.size()));
      for (size_t i = 0; i < tight.size(); ++i) {
        gt.row(static_cast<int>(i)) = Gs.row(tight[i]);
        bt[static_cast<int>(i)] = gs[tight[i]];
      }
      pi = gt.completeOrthogonalDecomposition().solve(bt);
    }
    if (primal_violation(pi) > 1e-6 * feas_scale) {
      res.status = LpStatus::numerical_trouble;
      res.z = pi;
      res.objective = c.dot(pi);
      return res;
    }
  }

  res.z = pi;
  res.objective = c.dot(pi);
  res.gap = std::abs(res.objective + dual_obj);
  res.status = LpStatus::optimal;
  return res;
}

SimplexProjection project_onto_hull(const Matrix& a, const Vector& x) {
  const int d = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  if (n == 0 || x.size() != d) throw InvalidInput("project_onto_hull: shape mismatch");

  SimplexProjection out;
  out.weights = Vector::Zero(n);

  // Start from the single closest point.
  int start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    const double dist = (a.col(j) - x).squaredNorm();
    if (dist < best) {
      best = dist;
      start = j;
    }
  }
  std::vector<int> support{start};
  Vector w_support = Vector::Ones(1);

  const double grad_tol = 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff() + x.cwiseAbs().maxCoeff());
  const int max_outer = 20 * (n + d) + 200;

  // Equality-constrained least squares on the support via the bordered
  // normal equations; returns false when the KKT system is singular.
  auto solve_support = [&](const std::vector<int>& sup, Vector* w) -> bool {
    const int s = static_cast<int>(sup.size());
    Matrix as(d, s);
    for (int j = 0; j < s; ++j) as.col(j) = a.col(sup[j]);
    Matrix kkt(s + 1, s + 1);
    kkt.topLeftCorner(s, s) = as.transpose() * as;
    kkt.topRightCorner(s, 1).setOnes();
    kkt.bottomLeftCorner(1, s).setOnes();
    kkt(s, s) = 0.0;
    Vector rhs(s + 1);
    rhs.head(s) = as.transpose() * x;
    rhs[s] = 1.0;
    Eigen::FullPivLU<Matrix> lu(kkt);
    if (!lu.isInvertible()) return false;
    Vector sol = lu.solve(rhs);
    *w = sol.head(s);
    return true;
  };

  for (int outer = 0; outer < max_outer; ++outer) {
    ++out.iterations;
    // Gradient of 0.5 |A w - x|^2 restricted to the simplex face.
    Vector wa = Vector::Zero(n);
    for (size_t j = 0; j < support.size(); ++j) wa[support[j]] = w_support[j];
    Vector resid = a * wa - x;
    Vector grad = a.transpose() * resid;
    double mu = std::numeric_limits<double>::infinity();
    for (int idx : support) mu = std::min(mu, grad[idx]);

    int enter = -1;
    double most = -grad_tol;
    for (int j = 0; j < n; ++j) {
      const double v = grad[j] - mu;
      if (v < most) {
        bool in_support = false;
        for (int idx : support) {
          if (idx == j) {
            in_support = true;
            break;
          }
        }
        if (!in_support) {
          most = v;
          enter = j;
        }
      }
    }
    if (enter < 0) break;  // KKT satisfied

    support.push_back(enter);
    Vector w_new;
    if (!solve_support(support, &w_new)) {
      support.pop_back();
      break;
    }
    // Walk toward the unconstrained face solution, dropping variables that
    // hit zero (standard NNLS inner loop).
    Vector w_old = Vector::Zero(support.size());
    w_old.head(support.size() - 1) = w_support;
    while (true) {
      double alpha = 1.0;
      int drop = -1;
      for (size_t j = 0; j < support.size(); ++j) {
        if (w_new[j] < 0.0) {
          const double step = w_old[j] / (w_old[j] - w_new[j]);
          if (step < alpha) {
            alpha = step;
            drop = static_cast<int>(j);
          }
        }
      }
      if (drop < 0) {
        w_support = w_new;
        break;
      }
      Vector w_mid = w_old + alpha * (w_new - w_old);
      std::vector<int> next_support;
      Vector w_next(static_cast<int>(support.size()) - 1);
      int k = 0;
      for (size_t j = 0; j < support.size(); ++j) {
        if (static_cast<int>(j) == drop) continue;
        next_support.push_back(support[j]);
        w_next[k++] = std::max(0.0, w_mid[j]);
      }
      support = next_support;
      w_old = w_next;
      if (!solve_support(support, &w_new)) {
        w_new = w_old;
        w_support = w_old;
        break;
      }
    }
  }

  out.weights.setZero();
  for (size_t j = 0; j < support.size(); ++j) out.weights[support[j]] = std::max(0.0, w_support[j]);
  const double total = out.weights.sum();
  if (total > 0.0) out.weights /= total;
  out.point = a * out.weights;
  out.distance = (out.point - x).norm();
  return out;
}

}  // namespace affmed
