#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

#include "affmed/tolerances.hpp"

namespace affmed {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

struct SingularCovariance : std::runtime_error {
  explicit SingularCovariance(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Ordered list of n points in R^d, stored as rows. Construction validates
// finiteness and uniform dimension.
class PointSet {
 public:
  PointSet() = default;
  explicit PointSet(Matrix pts);
  explicit PointSet(const std::vector<Vector>& pts);

  int n() const { return static_cast<int>(pts_.rows()); }
  int dim() const { return static_cast<int>(pts_.cols()); }
  Vector point(int i) const { return pts_.row(i).transpose(); }
  const Matrix& matrix() const { return pts_; }

 private:
  Matrix pts_;
};

// Unit vector; construction normalizes and rejects near-zero input.
class Direction {
 public:
  explicit Direction(Vector v);

  const Vector& vec() const { return v_; }
  int dim() const { return static_cast<int>(v_.size()); }

 private:
  Vector v_;
};

// Symmetric positive semidefinite matrix. Symmetry is enforced on
// construction (the input is symmetrized and the asymmetry checked); no
// eigenvalue check is done here because many call sites want psd-but-singular.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(Matrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }

 private:
  Matrix m_;
};

// Affine map x -> A x + b with invertible A.
struct AffineMap {
  Matrix a;
  Vector b;

  AffineMap(Matrix a_in, Vector b_in);
  Vector apply(const Vector& x) const { return a * x + b; }
  PointSet apply(const PointSet& x) const;
  AffineMap inverse() const;
};

// Projections <x_i, v> of all points along a direction.
std::vector<double> project(const PointSet& x, const Direction& v);

// sqrt((x)^T Sigma^{-1} (x)) via Cholesky; throws SingularCovariance when
// Sigma is not positive definite to tolerance.
double mahalanobis_norm(const Vector& x, const SpdMatrix& sigma);

// Mean with divisor n.
Vector sample_mean(const PointSet& x);

// Covariance with divisor n (not n-1).
SpdMatrix sample_cov(const PointSet& x);

// Output of whiten(): y_i = W (x_i - center) expressed in an orthonormal
// basis of the span of the centered data. rank < d means the input was
// degenerate and the whitened points live in R^rank.
struct WhitenResult {
  PointSet whitened;       // n x rank
  Vector center;           // d
  Matrix span_basis;       // d x rank, orthonormal columns
  Matrix forward;          // rank x d, y = forward * (x - center)
  Matrix backward;         // d x rank, x = center + backward * y
  int rank = 0;
};

// Affine change of variables making the sample covariance the identity on the
// span of the data. Rank-deficient input is restricted to its span.
WhitenResult whiten(const PointSet& x);

// x corresponding to whitened coordinates y.
Vector unwhiten(const WhitenResult& w, const Vector& y);

}  // namespace affmed
