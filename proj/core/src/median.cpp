#include "affmed/median.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "affmed/rng.hpp"

namespace affmed {

namespace {

std::vector<double> proj_rows(const Matrix& z, const Vector& v) {
  Vector p = z * v;
  return std::vector<double>(p.data(), p.data() + p.size());
}

double mean_over(const std::vector<double>& p, const std::vector<int>& idx) {
  double s = 0.0;
  for (int i : idx) s += p[i];
  return s / static_cast<double>(idx.size());
}

// Interval-violation measure from the design notes: distance outside the
// feasible interval, normalized by the binding window halfwidth.
struct DirEval {
  double excess = 0.0;       // raw distance outside the interval
  double violation = 0.0;    // normalized
  int side = 0;              // -1 below, +1 above, 0 inside
  FeasibleIntervalDetail detail;
};

DirEval eval_interval(const Matrix& z, const Vector& x, const Vector& v, double nu) {
  DirEval ev;
  const std::vector<double> p = proj_rows(z, v);
  ev.detail = directional_feasible_interval_detail(p, nu);
  const double px = x.dot(v);
  const double below = ev.detail.interval.lo - px;
  const double above = px - ev.detail.interval.hi;
  double h_bind = 0.0;
  if (below > above) {
    ev.excess = std::max(0.0, below);
    ev.side = ev.excess > 0.0 ? -1 : 0;
    h_bind = 2.0 * ev.detail.lower.sigma1;
  } else {
    ev.excess = std::max(0.0, above);
    ev.side = ev.excess > 0.0 ? 1 : 0;
    h_bind = 2.0 * ev.detail.upper.sigma1;
  }
  const double scale = std::max({std::abs(ev.detail.data_min), std::abs(ev.detail.data_max), 1.0});
  ev.violation = ev.excess / std::max(h_bind, 1e-12 * scale);
  return ev;
}

double eval_outlyingness(const Matrix& z, const Vector& x, const Vector& v, double nu) {
  const std::vector<double> p = proj_rows(z, v);
  return outlyingness_1d(x.dot(v), p, nu);
}

// Subgradient of the violated slab edge as a function of the direction,
// holding the window membership and deviation signs fixed.
Vector ascent_gradient(const Matrix& z, const Vector& x, const Vector& v, const DirEval& ev) {
  const BindingWindow& w = ev.side > 0 ? ev.detail.upper : ev.detail.lower;
  const std::vector<double> p = proj_rows(z, v);
  const double mu = mean_over(p, w.subset);
  Vector m_s = Vector::Zero(z.cols());
  for (int i : w.subset) m_s += z.row(i).transpose();
  m_s /= static_cast<double>(w.subset.size());
  Vector dsg = Vector::Zero(z.cols());
  for (int i : w.subset) {
    const double s = p[i] >= mu ? 1.0 : -1.0;
    dsg += s * (z.row(i).transpose() - m_s);
  }
  dsg /= static_cast<double>(w.subset.size());
  if (ev.side > 0) return x - m_s - 2.0 * dsg;
  return m_s - x - 2.0 * dsg;
}

struct DirEntry {
  Vector v;
  FeasibleIntervalDetail detail;
};

bool near_duplicate(const std::vector<DirEntry>& pool, const Vector& v) {
  for (const auto& e : pool) {
    if (std::abs(e.v.dot(v)) > 1.0 - 1e-9) return true;
  }
  return false;
}

// Candidate directions for one search round.
std::vector<Vector> candidate_directions(const Matrix& z, const Vector& x, const MedianConfig& cfg,
                                         int n_random, Rng& rng) {
  const int n = static_cast<int>(z.rows());
  const int r = static_cast<int>(z.cols());
  std::vector<Vector> out;
  out.reserve(n_random + cfg.directions_data + 2 * r + 1);
  for (int i = 0; i < n_random; ++i) {
    Vector v(r);
    for (int j = 0; j < r; ++j) v[j] = rng.normal();
    const double nrm = v.norm();
    if (nrm > 1e-12) out.push_back(v / nrm);
  }
  const int n_data = std::min(cfg.directions_data, n);
  std::vector<int> idx = rng.sample_without_replacement(n, n_data);
  for (int i : idx) {
    Vector v = x - z.row(i).transpose();
    const double nrm = v.norm();
    if (nrm > 1e-10) out.push_back(v / nrm);
  }
  for (int j = 0; j < r; ++j) out.push_back(Vector::Unit(r, j));
  out.push_back(Vector::Ones(r) / std::sqrt(static_cast<double>(r)));
  // Covariance eigenvectors; in whitened coordinates these are close to the
  // axes but cost little and matter in raw mode.
  if (n > 1) {
    Matrix centered = z.rowwise() - z.colwise().mean();
    Matrix c = centered.transpose() * centered / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
    if (eig.info() == Eigen::Success) {
      for (int j = 0; j < r; ++j) out.push_back(eig.eigenvectors().col(j));
    }
  }
  return out;
}

ViolationReport search_violation(const Matrix& z, const Vector& x, const MedianConfig& cfg,
                                 double nu, Rng& rng) {
  ViolationReport rep;
  const std::vector<Vector> cands = candidate_directions(z, x, cfg, cfg.directions_random, rng);
  double best = -1.0;
  Vector best_v;
  DirEval best_ev;
  for (const Vector& v : cands) {
    const DirEval ev = eval_interval(z, x, v, nu);
    if (ev.violation > best) {
      best = ev.violation;
      best_v = v;
      best_ev = ev;
    }
  }
  if (best < 0.0) return rep;

  // Local ascent: up to 20 normalized steps of size 0.2, halving on failure.
  double step = 0.2;
  for (int it = 0; it < 20 && best_ev.side != 0; ++it) {
    Vector g = ascent_gradient(z, x, best_v, best_ev);
    g -= g.dot(best_v) * best_v;
    const double gn = g.norm();
    if (gn < 1e-12) break;
    Vector v_try = best_v + step * (g / gn);
    const double nrm = v_try.norm();
    if (nrm < 1e-12) break;
    v_try /= nrm;
    const DirEval ev = eval_interval(z, x, v_try, nu);
    if (ev.violation > best) {
      best = ev.violation;
      best_v = v_try;
      best_ev = ev;
    } else {
      step *= 0.5;
      if (step < 1e-3) break;
    }
  }

  rep.direction = best_v;
  rep.violation = best;
  rep.detail = best_ev.detail;
  rep.outlyingness = eval_outlyingness(z, x, best_v, nu);
  rep.found = best > cfg.slack_eps;
  return rep;
}

struct LpBuild {
  Matrix g_mat;
  Vector g_rhs;
  Vector cost;
};

LpBuild build_lp(const std::vector<DirEntry>& pool,
                 const std::vector<std::pair<Vector, double>>& hull_cuts, int r, double scale) {
  const double tol_h = 1e-12 * scale;
  const double tol_eq = 1e-12 * scale;
  std::vector<Vector> rows;
  std::vector<double> rhs;
  auto add_row = [&](const Vector& v, double h_coeff, double bound) {
    Vector row(r + 1);
    row.head(r) = v;
    row[r] = h_coeff;
    rows.push_back(row);
    rhs.push_back(bound);
  };
  for (const auto& e : pool) {
    auto add_slab = [&](const BindingWindow& w) {
      const double h = 2.0 * w.sigma1;
      if (h > tol_h) {
        add_row(e.v, -h, w.mu);
        add_row(-e.v, -h, -w.mu);
      } else {
        add_row(e.v, 0.0, w.mu + tol_eq);
        add_row(-e.v, 0.0, -w.mu + tol_eq);
      }
    };
    add_slab(e.detail.lower);
    if (e.detail.upper.subset != e.detail.lower.subset) add_slab(e.detail.upper);
    add_row(e.v, 0.0, e.detail.data_max);
    add_row(-e.v, 0.0, -e.detail.data_min);
  }
  for (const auto& cut : hull_cuts) add_row(cut.first, 0.0, cut.second);
  // t >= 0
  add_row(Vector::Zero(r), -1.0, 0.0);

  LpBuild b;
  const int m = static_cast<int>(rows.size());
  b.g_mat.resize(m, r + 1);
  b.g_rhs.resize(m);
  for (int i = 0; i < m; ++i) {
    b.g_mat.row(i) = rows[i].transpose();
    b.g_rhs[i] = rhs[i];
  }
  b.cost = Vector::Zero(r + 1);
  b.cost[r] = 1.0;
  return b;
}

// Zero-width slabs are honored by the LP only up to its equality band, and the
// hull projection can move the point off them again. A minimum-norm correction
// puts the point back on the degenerate hyperplanes exactly, so outlyingness
// along an exact-tie direction certifies as zero instead of infinity.
void pin_degenerate(const std::vector<DirEntry>& pool, double scale, Vector* x) {
  const double tol_h = 1e-12 * scale;
  std::vector<std::pair<const Vector*, double>> planes;
  for (const auto& e : pool) {
    auto take = [&](const BindingWindow& w) {
      if (2.0 * w.sigma1 <= tol_h) planes.emplace_back(&e.v, w.mu);
    };
    take(e.detail.lower);
    if (e.detail.upper.subset != e.detail.lower.subset) take(e.detail.upper);
  }
  if (planes.empty()) return;
  const int m = static_cast<int>(planes.size());
  const int r = static_cast<int>(x->size());
  Matrix a(m, r);
  Vector b(m);
  for (int i = 0; i < m; ++i) {
    a.row(i) = planes[i].first->transpose();
    b[i] = planes[i].second - planes[i].first->dot(*x);
  }
  *x += a.completeOrthogonalDecomposition().solve(b);
}

double recompute_t(const std::vector<DirEntry>& pool, const Vector& x, double scale) {
  const double tol_h = 1e-12 * scale;
  double t = 0.0;
  for (const auto& e : pool) {
    auto slab_t = [&](const BindingWindow& w) {
      const double h = 2.0 * w.sigma1;
      if (h > tol_h) t = std::max(t, std::abs(e.v.dot(x) - w.mu) / h);
    };
    slab_t(e.detail.lower);
    slab_t(e.detail.upper);
  }
  return t;
}

// LP solve plus lazy hull separation; the returned point is the exact
// barycentric combination of the weights.
MinmaxSolution solve_pool(const Matrix& z, const std::vector<DirEntry>& pool,
                          std::vector<std::pair<Vector, double>>* hull_cuts, double nu_scale) {
  MinmaxSolution sol;
  const int r = static_cast<int>(z.cols());
  const Matrix zt = z.transpose();  // r x n, columns are points
  const double hull_tol = 1e-9 * std::max(1.0, z.cwiseAbs().maxCoeff());

  for (int round = 0; round < 40; ++round) {
    const LpBuild b = build_lp(pool, *hull_cuts, r, nu_scale);
    const LpResult lp = solve_lp_few_vars(b.g_mat, b.g_rhs, b.cost);
    sol.status = lp.status;
    sol.gap = lp.gap;
    if (lp.status != LpStatus::optimal) return sol;
    const Vector x_lp = lp.z.head(r);
    SimplexProjection proj = project_onto_hull(zt, x_lp);
    sol.hull_distance = proj.distance;
    if (proj.distance <= hull_tol) {
      sol.x = proj.point;
      sol.weights = proj.weights;
      pin_degenerate(pool, nu_scale, &sol.x);
      sol.t = recompute_t(pool, sol.x, nu_scale);
      return sol;
    }
    Vector sep = (x_lp - proj.point) / proj.distance;
    double bound = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < z.rows(); ++i) bound = std::max(bound, sep.dot(z.row(i).transpose()));
    hull_cuts->emplace_back(sep, bound);
    ++sol.hull_cuts;
  }
  // Separation failed to converge; accept the last projection.
  sol.status = LpStatus::numerical_trouble;
  return sol;
}

// Orthonormal frame built from the rows in index order; equivariant under
// any orthogonal change of the row coordinates.
Matrix canonical_frame(const Matrix& z) {
  const int n = static_cast<int>(z.rows());
  const int r = static_cast<int>(z.cols());
  Matrix f(r, r);
  int have = 0;
  for (int i = 0; i < n && have < r; ++i) {
    Vector u = z.row(i).transpose();
    const double scale = std::max(1.0, u.norm());
    for (int j = 0; j < have; ++j) u -= f.col(j).dot(u) * f.col(j);
    if (u.norm() > 1e-6 * scale) {
      f.col(have++) = u / u.norm();
    }
  }
  // Complete with axes if the rows were nearly dependent.
  for (int j = 0; j < r && have < r; ++j) {
    Vector u = Vector::Unit(r, j);
    for (int k = 0; k < have; ++k) u -= f.col(k).dot(u) * f.col(k);
    if (u.norm() > 1e-6) f.col(have++) = u / u.norm();
  }
  return f;
}

}  // namespace

double effective_nu(const MedianConfig& cfg, int d) {
  if (cfg.nu > 0.0) return cfg.nu;
  return 1.0 / (3.0 * static_cast<double>(d));
}

SlabConstraint build_slab(const PointSet& pts, const Direction& v, const std::vector<int>& subset) {
  if (subset.empty()) throw InvalidInput("build_slab: empty subset");
  const std::vector<double> p = project(pts, v);
  for (int i : subset) {
    if (i < 0 || i >= pts.n()) throw InvalidInput("build_slab: index out of range");
  }
  const double mu = mean_over(p, subset);
  double sumabs = 0.0;
  for (int i : subset) sumabs += std::abs(p[i] - mu);
  SlabConstraint s;
  s.direction = v.vec();
  s.center = mu;
  s.halfwidth = 2.0 * sumabs / static_cast<double>(subset.size());
  s.window = subset;
  std::sort(s.window.begin(), s.window.end());
  return s;
}

ViolationReport find_violating_direction(const PointSet& pts, const Vector& x, const MedianConfig& cfg) {
  if (x.size() != pts.dim()) throw InvalidInput("find_violating_direction: dimension mismatch");
  Rng rng(split_seed(cfg.seed, 0x5644));
  const double nu = effective_nu(cfg, pts.dim());
  return search_violation(pts.matrix(), x, cfg, nu, rng);
}

MinmaxSolution solve_minmax(const PointSet& pts, const std::vector<SlabConstraint>& slabs,
                            const MedianConfig& cfg) {
  const int r = pts.dim();
  const Matrix& z = pts.matrix();
  std::vector<DirEntry> pool;
  pool.reserve(slabs.size());
  for (const SlabConstraint& s : slabs) {
    if (s.direction.size() != r) throw InvalidInput("solve_minmax: slab dimension mismatch");
    DirEntry e;
    e.v = s.direction;
    BindingWindow w;
    w.mu = s.center;
    w.sigma1 = 0.5 * s.halfwidth;
    w.subset = s.window;
    e.detail.lower = w;
    e.detail.upper = w;
    const std::vector<double> p = proj_rows(z, e.v);
    e.detail.data_min = *std::min_element(p.begin(), p.end());
    e.detail.data_max = *std::max_element(p.begin(), p.end());
    pool.push_back(std::move(e));
  }
  std::vector<std::pair<Vector, double>> cuts;
  const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());
  return solve_pool(z, pool, &cuts, scale);
}

MedianReport high_dim_median(const PointSet& pts, const MedianConfig& cfg) {
  const int n = pts.n();
  const int d = pts.dim();
  const double nu = effective_nu(cfg, d);

  MedianReport rep;
  rep.hull_weights = Vector::Constant(n, 1.0 / n);

  // Solve-space setup: whitened canonical coordinates or the raw input.
  Matrix z;           // n x r
  Matrix dir_back;    // d x r, maps solve-space directions to input space
  WhitenResult wr;
  Matrix frame;
  const bool whitened = cfg.mode == EquivariantMode::whitened;
  if (whitened) {
    wr = whiten(pts);
    rep.diagnostics.rank = wr.rank;
    if (wr.rank == 0) {
      rep.estimate = wr.center;
      rep.certified_outlyingness = 0.0;
      rep.sweep_directions = Matrix::Zero(0, d);
      return rep;
    }
    frame = canonical_frame(wr.whitened.matrix());
    z = wr.whitened.matrix() * frame;
    dir_back = wr.forward.transpose() * frame;  // d x r
  } else {
    z = pts.matrix();
    rep.diagnostics.rank = d;
    dir_back = Matrix::Identity(d, d);
    // Degenerate raw input: all points identical.
    Matrix spread = z.rowwise() - z.colwise().mean();
    if (spread.cwiseAbs().maxCoeff() == 0.0) {
      rep.estimate = sample_mean(pts);
      rep.sweep_directions = Matrix::Zero(0, d);
      return rep;
    }
  }
  const int r = static_cast<int>(z.cols());
  const Matrix zt = z.transpose();
  const double scale = std::max(1.0, z.cwiseAbs().maxCoeff());

  // Converts a solve-space direction to an input-space slab over the same
  // window, so reports are reproducible from the original points.
  auto export_slab = [&](const Vector& v, const std::vector<int>& window) -> SlabConstraint {
    Vector v_in = dir_back * v;
    const double nrm = v_in.norm();
    if (nrm < 1e-14) {
      SlabConstraint s;
      s.direction = Vector::Unit(d, 0);
      s.window = window;
      return s;
    }
    return build_slab(pts, Direction(v_in), window);
  };

  auto finish = [&](const Vector& x_solve, const Vector& weights,
                    const std::vector<DirEntry>& pool, const Matrix& sweep_solve) {
    rep.hull_weights = weights;
    rep.estimate = pts.matrix().transpose() * weights;
    rep.constraints_used.clear();
    for (const auto& e : pool) {
      rep.constraints_used.push_back(export_slab(e.v, e.detail.lower.subset));
      if (e.detail.upper.subset != e.detail.lower.subset) {
        rep.constraints_used.push_back(export_slab(e.v, e.detail.upper.subset));
      }
    }
    rep.sweep_directions.resize(sweep_solve.rows(), d);
    for (int i = 0; i < sweep_solve.rows(); ++i) {
      Vector v_in = dir_back * sweep_solve.row(i).transpose();
      const double nrm = v_in.norm();
      if (nrm > 1e-14) {
        rep.sweep_directions.row(i) = (v_in / nrm).transpose();
      } else {
        rep.sweep_directions.row(i) = Vector::Unit(d, 0).transpose();
      }
    }
    // Certified outlyingness over pool plus sweep, evaluated in solve space;
    // the value is shift/scale invariant per direction so it matches the
    // input-space evaluation along the exported directions.
    double cert = 0.0;
    for (const auto& e : pool) cert = std::max(cert, eval_outlyingness(z, x_solve, e.v, nu));
    for (int i = 0; i < sweep_solve.rows(); ++i) {
      cert = std::max(cert, eval_outlyingness(z, x_solve, sweep_solve.row(i).transpose(), nu));
    }
    rep.certified_outlyingness = cert;
  };

  // One-dimensional data: the interval midpoint is exact, no cutting plane.
  if (r == 1) {
    const std::vector<double> p0 = proj_rows(z, Vector::Ones(1));
    const FeasibleIntervalDetail detail = directional_feasible_interval_detail(p0, nu);
    rep.diagnostics.interval_fallback = detail.interval.degenerate_fallback;
    Vector target(1);
    target[0] = detail.interval.mid();
    SimplexProjection proj = project_onto_hull(zt, target);
    rep.diagnostics.hull_distance = proj.distance;
    std::vector<DirEntry> pool(1);
    pool[0].v = Vector::Ones(1);
    pool[0].detail = detail;
    Matrix sweep = Matrix::Ones(1, 1);
    finish(proj.point, proj.weights, pool, sweep);
    return rep;
  }

  Rng dir_rng(split_seed(cfg.seed, 0x6d64));
  std::vector<DirEntry> pool;
  std::vector<std::pair<Vector, double>> hull_cuts;

  auto add_direction = [&](const Vector& v) -> bool {
    if (near_duplicate(pool, v)) return false;
    DirEntry e;
    e.v = v;
    e.detail = directional_feasible_interval_detail(proj_rows(z, v), nu);
    if (e.detail.interval.degenerate_fallback) rep.diagnostics.interval_fallback = true;
    pool.push_back(std::move(e));
    return true;
  };

  for (int j = 0; j < r; ++j) add_direction(Vector::Unit(r, j));
  add_direction(Vector::Ones(r) / std::sqrt(static_cast<double>(r)));
  if (!whitened && n > 1) {
    Matrix centered = z.rowwise() - z.colwise().mean();
    Matrix c = centered.transpose() * centered / static_cast<double>(n);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
    if (eig.info() == Eigen::Success) {
      for (int j = 0; j < r; ++j) add_direction(eig.eigenvectors().col(j));
    }
  }

  MinmaxSolution sol;
  Matrix sweep_solve(0, r);
  bool done = false;
  int sweep_round = 0;
  for (int iter = 0; iter < cfg.max_iterations && !done; ++iter) {
    rep.iterations = iter + 1;
    sol = solve_pool(z, pool, &hull_cuts, scale);
    rep.diagnostics.lp_gap = sol.gap;
    rep.diagnostics.hull_distance = sol.hull_distance;
    rep.diagnostics.hull_cuts += sol.hull_cuts;
    if (sol.status == LpStatus::infeasible) {
      rep.diagnostics.infeasible_degenerate = true;
      break;
    }
    if (sol.status != LpStatus::optimal) break;

    ViolationReport vr = search_violation(z, sol.x, cfg, nu, dir_rng);
    rep.diagnostics.final_violation = vr.violation;
    if (vr.found) {
      if (!add_direction(vr.direction)) break;  // stalled on a known direction
      continue;
    }

    // Candidate convergence: audit with a full sweep including the trimmed
    // outlyingness, and keep cutting if the certificate target is missed.
    Rng sweep_rng(split_seed(cfg.seed, 0x5357, static_cast<std::uint64_t>(sweep_round++)));
    std::vector<Vector> sweep_dirs =
        candidate_directions(z, sol.x, cfg, cfg.sweep_random, sweep_rng);
    for (const auto& e : pool) sweep_dirs.push_back(e.v);
    double worst = -1.0;
    Vector worst_v;
    for (const Vector& v : sweep_dirs) {
      const double o = eval_outlyingness(z, sol.x, v, nu);
      if (o > worst) {
        worst = o;
        worst_v = v;
      }
    }
    sweep_solve.resize(static_cast<int>(sweep_dirs.size()), r);
    for (size_t i = 0; i < sweep_dirs.size(); ++i) {
      sweep_solve.row(static_cast<int>(i)) = sweep_dirs[i].transpose();
    }
    if (worst > 2.0 * (1.0 + cfg.slack_eps) && iter + 1 < cfg.max_iterations) {
      if (!add_direction(worst_v)) break;
      continue;
    }
    done = true;
  }
  if (!done && rep.iterations >= cfg.max_iterations) rep.diagnostics.iteration_limit = true;

  if (sol.status != LpStatus::optimal || sol.x.size() == 0) {
    // Degenerate exit: certify the hull-projected origin of the solve space
    // (the whitened mean) honestly.
    SimplexProjection proj = project_onto_hull(zt, Vector::Zero(r));
    sol.x = proj.point;
    sol.weights = proj.weights;
  }
  if (sweep_solve.rows() == 0) {
    Rng sweep_rng(split_seed(cfg.seed, 0x5357, static_cast<std::uint64_t>(sweep_round++)));
    std::vector<Vector> sweep_dirs =
        candidate_directions(z, sol.x, cfg, cfg.sweep_random, sweep_rng);
    for (const auto& e : pool) sweep_dirs.push_back(e.v);
    sweep_solve.resize(static_cast<int>(sweep_dirs.size()), r);
    for (size_t i = 0; i < sweep_dirs.size(); ++i) {
      sweep_solve.row(static_cast<int>(i)) = sweep_dirs[i].transpose();
    }
  }
  finish(sol.x, sol.weights, pool, sweep_solve);
  return rep;
}

HellyCertificate helly_feasibility_certificate(const PointSet& pts,
                                               const std::vector<SlabConstraint>& slabs,
                                               double nu) {
  const int n = pts.n();
  const int d = pts.dim();
  if (static_cast<int>(slabs.size()) != d + 1) {
    throw InvalidInput("helly_feasibility_certificate: need exactly d+1 slabs");
  }
  std::vector<char> in_all(n, 1);
  for (const SlabConstraint& s : slabs) {
    std::vector<char> member(n, 0);
    for (int i : s.window) {
      if (i < 0 || i >= n) throw InvalidInput("helly_feasibility_certificate: bad window index");
      member[i] = 1;
    }
    for (int i = 0; i < n; ++i) in_all[i] &= member[i];
  }
  HellyCertificate cert;
  for (int i = 0; i < n; ++i) {
    if (in_all[i]) cert.common_indices.push_back(i);
  }
  const double need = (1.0 - (d + 1) * nu) * n;
  if (static_cast<double>(cert.common_indices.size()) < need - 1e-9) {
    throw InvalidInput("helly_feasibility_certificate: window intersection too small");
  }
  if (cert.common_indices.empty()) {
    throw InvalidInput("helly_feasibility_certificate: empty window intersection");
  }
  Vector mu = Vector::Zero(d);
  for (int i : cert.common_indices) mu += pts.point(i);
  mu /= static_cast<double>(cert.common_indices.size());
  cert.mu_r = mu;
  for (const SlabConstraint& s : slabs) {
    const double margin = s.halfwidth - std::abs(mu.dot(s.direction) - s.center);
    const double tol = 1e-8 * std::max(1.0, std::abs(s.center) + s.halfwidth);
    if (margin < -tol) {
      throw InvalidInput("helly_feasibility_certificate: slab violated by window mean");
    }
    cert.margins.push_back(margin);
  }
  return cert;
}

}  // namespace affmed
