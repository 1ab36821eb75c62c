#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "locsdp/config.hpp"

namespace locsdp {

using DenseVector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;

// Orthogonal projection onto a subspace of R^n, stored as an orthonormal
// basis. Coordinate-subset projections keep the index list so that apply()
// and the complement chart avoid dense products.
class OrthoProjection {
 public:
  OrthoProjection() = default;

  static OrthoProjection identity(int n);
  static OrthoProjection zero(int n);
  // Projection onto the coordinates listed in `coords` (0-based, any order).
  static OrthoProjection coordinates(int n, std::vector<int> coords);
  // Projection onto span of the columns of `spanning`; columns need not be
  // independent. Directions with singular value below `rank_tol` are dropped.
  static OrthoProjection from_span(const DenseMatrix& spanning,
                                   double rank_tol = 1e-10);

  int ambient_dim() const { return n_; }
  int rank() const { return static_cast<int>(basis_.cols()); }
  bool is_coordinate() const { return coordinate_; }
  const std::vector<int>& coordinate_list() const { return coords_; }
  // n x m, orthonormal columns.
  const DenseMatrix& basis() const { return basis_; }

  DenseVector apply(const DenseVector& x) const;
  DenseVector apply_complement(const DenseVector& x) const;
  DenseMatrix matrix() const;
  // Orthonormal basis of the orthogonal complement, n x (n - m).
  DenseMatrix null_basis() const;

 private:
  int n_ = 0;
  bool coordinate_ = false;
  std::vector<int> coords_;
  DenseMatrix basis_;
};

DenseVector project(const OrthoProjection& p, const DenseVector& x);

// The set { y : P y = anchor } parameterised as anchor + chart * z.
class AffineSlice {
 public:
  AffineSlice(OrthoProjection projection, DenseVector anchor,
              const Tolerances& tol = default_tolerances());

  const OrthoProjection& projection() const { return projection_; }
  const DenseVector& anchor() const { return anchor_; }
  const DenseMatrix& chart() const { return chart_; }
  int ambient_dim() const { return projection_.ambient_dim(); }
  int chart_dim() const { return static_cast<int>(chart_.cols()); }

  DenseVector point(const DenseVector& z) const;
  // Chart gradient B^T c of an ambient linear functional c.
  DenseVector pull_back(const DenseVector& c) const;

 private:
  OrthoProjection projection_;
  DenseVector anchor_;
  DenseMatrix chart_;
  std::vector<int> free_coords_;  // used when the projection is coordinate
};

// poly(C, d) = { x : C x <= d }. Each row remembers the oracle call that
// produced it.
class Polytope {
 public:
  explicit Polytope(int dim = 0) : dim_(dim) {}

  int dim() const { return dim_; }
  int num_rows() const { return static_cast<int>(offsets_.size()); }
  bool empty_rows() const { return offsets_.empty(); }

  void add_row(const DenseVector& row, double offset, int tag);
  const DenseVector& row(int i) const { return rows_[static_cast<size_t>(i)]; }
  double offset(int i) const { return offsets_[static_cast<size_t>(i)]; }
  int tag(int i) const { return tags_[static_cast<size_t>(i)]; }

  // Stacked rows, num_rows x dim.
  DenseMatrix row_matrix() const;
  DenseVector offset_vector() const;
  DenseVector row_norms() const;
  bool contains(const DenseVector& x, double slack = 0.0) const;

 private:
  int dim_;
  std::vector<DenseVector> rows_;
  std::vector<double> offsets_;
  std::vector<int> tags_;
};

// Rows unchanged, offsets reduced by eps times the Euclidean row norm.
Polytope shrink_polytope(const Polytope& p, double eps);

double ball_volume(int d, double r);
double log_ball_volume(int d, double r);
double ball_radius(int d, double volume);

}  // namespace locsdp
