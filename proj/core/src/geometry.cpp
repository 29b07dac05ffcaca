#include "affmed/geometry.hpp"

#include <cmath>

namespace affmed {

PointSet::PointSet(Matrix pts) : pts_(std::move(pts)) {
  if (pts_.rows() == 0 || pts_.cols() == 0) {
    throw InvalidInput("PointSet: need at least one point of dimension >= 1");
  }
  if (!pts_.allFinite()) {
    throw InvalidInput("PointSet: coordinates must be finite");
  }
}

PointSet::PointSet(const std::vector<Vector>& pts) {
  if (pts.empty()) throw InvalidInput("PointSet: empty point list");
  const auto d = pts.front().size();
  Matrix m(static_cast<int>(pts.size()), d);
  for (size_t i = 0; i < pts.size(); ++i) {
    if (pts[i].size() != d) {
      throw InvalidInput("PointSet: inconsistent dimensions");
    }
    m.row(static_cast<int>(i)) = pts[i].transpose();
  }
  *this = PointSet(std::move(m));
}

Direction::Direction(Vector v) : v_(std::move(v)) {
  if (v_.size() == 0 || !v_.allFinite()) {
    throw InvalidInput("Direction: invalid vector");
  }
  const double nrm = v_.norm();
  if (nrm < tol::unit) {
    throw InvalidInput("Direction: vector too close to zero to normalize");
  }
  v_ /= nrm;
}

SpdMatrix::SpdMatrix(Matrix m) : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() == 0) {
    throw InvalidInput("SpdMatrix: must be square");
  }
  if (!m_.allFinite()) throw InvalidInput("SpdMatrix: entries must be finite");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  const double asym = (m_ - m_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-8 * scale) {
    throw InvalidInput("SpdMatrix: input is not symmetric");
  }
  m_ = 0.5 * (m_ + m_.transpose());
}

AffineMap::AffineMap(Matrix a_in, Vector b_in) : a(std::move(a_in)), b(std::move(b_in)) {
  if (a.rows() != a.cols() || a.rows() != b.size()) {
    throw InvalidInput("AffineMap: shape mismatch");
  }
  Eigen::FullPivLU<Matrix> lu(a);
  if (!lu.isInvertible()) {
    throw InvalidInput("AffineMap: linear part must be invertible");
  }
}

PointSet AffineMap::apply(const PointSet& x) const {
  Matrix out = x.matrix() * a.transpose();
  out.rowwise() += b.transpose();
  return PointSet(std::move(out));
}

AffineMap AffineMap::inverse() const {
  Matrix ainv = a.inverse();
  return AffineMap(ainv, -ainv * b);
}

std::vector<double> project(const PointSet& x, const Direction& v) {
  if (v.dim() != x.dim()) throw InvalidInput("project: dimension mismatch");
  Vector p = x.matrix() * v.vec();
  return std::vector<double>(p.data(), p.data() + p.size());
}

double mahalanobis_norm(const Vector& x, const SpdMatrix& sigma) {
  if (x.size() != sigma.dim()) {
    throw InvalidInput("mahalanobis_norm: dimension mismatch");
  }
  Eigen::LLT<Matrix> llt(sigma.matrix());
  const double scale = std::max(1.0, sigma.matrix().diagonal().maxCoeff());
  if (llt.info() != Eigen::Success ||
      llt.matrixL().toDenseMatrix().diagonal().minCoeff() < std::sqrt(tol::pd * scale)) {
    throw SingularCovariance("mahalanobis_norm: covariance not positive definite");
  }
  // Solve L z = x; the norm is |z|.
  Vector z = llt.matrixL().solve(x);
  return z.norm();
}

Vector sample_mean(const PointSet& x) {
  return x.matrix().colwise().mean().transpose();
}

SpdMatrix sample_cov(const PointSet& x) {
  Matrix centered = x.matrix().rowwise() - x.matrix().colwise().mean();
  Matrix c = centered.transpose() * centered / static_cast<double>(x.n());
  return SpdMatrix(std::move(c));
}

WhitenResult whiten(const PointSet& x) {
  const int n = x.n();
  const int d = x.dim();
  WhitenResult res;
  res.center = sample_mean(x);
  Matrix centered = x.matrix().rowwise() - res.center.transpose();
  Matrix c = centered.transpose() * centered / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Matrix> eig(c);
  if (eig.info() != Eigen::Success) {
    throw InvalidInput("whiten: eigendecomposition failed");
  }
  const Vector& lam = eig.eigenvalues();  // ascending
  const double lmax = std::max(lam.maxCoeff(), 0.0);
  const double cut = std::max(lmax * tol::pd, 0.0);

  std::vector<int> keep;
  for (int i = 0; i < d; ++i) {
    if (lam[i] > cut) keep.push_back(i);
  }
  const int r = static_cast<int>(keep.size());
  res.rank = r;
  res.span_basis.resize(d, r);
  res.forward.resize(r, d);
  res.backward.resize(d, r);
  for (int j = 0; j < r; ++j) {
    const Vector u = eig.eigenvectors().col(keep[j]);
    const double s = std::sqrt(lam[keep[j]]);
    res.span_basis.col(j) = u;
    res.forward.row(j) = u.transpose() / s;
    res.backward.col(j) = u * s;
  }
  if (r == 0) {
    // All points identical: whitened representation is empty; keep a single
    // zero column so PointSet stays well formed.
    res.whitened = PointSet(Matrix::Zero(n, 1));
    res.rank = 0;
    return res;
  }
  res.whitened = PointSet(centered * res.forward.transpose());
  return res;
}

Vector unwhiten(const WhitenResult& w, const Vector& y) {
  if (w.rank == 0) return w.center;
  return w.center + w.backward * y;
}

}  // namespace affmed
