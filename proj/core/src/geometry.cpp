#include "locsdp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "locsdp/errors.hpp"

namespace locsdp {

namespace {

void require_dim(int expected, Eigen::Index actual, const char* what) {
  if (actual != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                std::string(what) + ": expected dimension " +
                    std::to_string(expected) + ", got " +
                    std::to_string(actual));
  }
}

}  // namespace

OrthoProjection OrthoProjection::identity(int n) {
  std::vector<int> all(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) all[static_cast<size_t>(i)] = i;
  return coordinates(n, std::move(all));
}

OrthoProjection OrthoProjection::zero(int n) { return coordinates(n, {}); }

OrthoProjection OrthoProjection::coordinates(int n, std::vector<int> coords) {
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  for (int c : coords) {
    if (c < 0 || c >= n) {
      throw Error(ErrorCode::kInvalidArgument,
                  "coordinate " + std::to_string(c) + " outside [0, " +
                      std::to_string(n) + ")");
    }
  }
  OrthoProjection p;
  p.n_ = n;
  p.coordinate_ = true;
  p.basis_ = DenseMatrix::Zero(n, static_cast<Eigen::Index>(coords.size()));
  for (size_t j = 0; j < coords.size(); ++j) {
    p.basis_(coords[j], static_cast<Eigen::Index>(j)) = 1.0;
  }
  p.coords_ = std::move(coords);
  return p;
}

OrthoProjection OrthoProjection::from_span(const DenseMatrix& spanning,
                                           double rank_tol) {
  OrthoProjection p;
  p.n_ = static_cast<int>(spanning.rows());
  if (spanning.cols() == 0 || spanning.rows() == 0) {
    p.basis_ = DenseMatrix::Zero(spanning.rows(), 0);
    return p;
  }
  Eigen::JacobiSVD<DenseMatrix> svd(spanning, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double scale = std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  Eigen::Index r = 0;
  while (r < sv.size() && sv(r) > rank_tol * scale) ++r;
  p.basis_ = svd.matrixU().leftCols(r);
  return p;
}

DenseVector OrthoProjection::apply(const DenseVector& x) const {
  require_dim(n_, x.size(), "projection apply");
  if (coordinate_) {
    DenseVector out = DenseVector::Zero(n_);
    for (int c : coords_) out(c) = x(c);
    return out;
  }
  return basis_ * (basis_.transpose() * x);
}

DenseVector OrthoProjection::apply_complement(const DenseVector& x) const {
  return x - apply(x);
}

DenseMatrix OrthoProjection::matrix() const {
  return basis_ * basis_.transpose();
}

DenseMatrix OrthoProjection::null_basis() const {
  if (coordinate_) {
    std::vector<char> fixed(static_cast<size_t>(n_), 0);
    for (int c : coords_) fixed[static_cast<size_t>(c)] = 1;
    const Eigen::Index free_count = n_ - rank();
    DenseMatrix b = DenseMatrix::Zero(n_, free_count);
    Eigen::Index j = 0;
    for (int i = 0; i < n_; ++i) {
      if (!fixed[static_cast<size_t>(i)]) b(i, j++) = 1.0;
    }
    return b;
  }
  if (rank() == 0) return DenseMatrix::Identity(n_, n_);
  // Complete the basis with a full QR of the stored columns.
  Eigen::HouseholderQR<DenseMatrix> qr(basis_);
  DenseMatrix q = qr.householderQ() * DenseMatrix::Identity(n_, n_);
  return q.rightCols(n_ - rank());
}

DenseVector project(const OrthoProjection& p, const DenseVector& x) {
  return p.apply(x);
}

AffineSlice::AffineSlice(OrthoProjection projection, DenseVector anchor,
                         const Tolerances& tol)
    : projection_(std::move(projection)), anchor_(std::move(anchor)) {
  require_dim(projection_.ambient_dim(), anchor_.size(), "slice anchor");
  const double off = (projection_.apply(anchor_) - anchor_).norm();
  if (off > tol.slice_membership) {
    throw Error(ErrorCode::kInvalidArgument,
                "slice anchor is not in the span of the projection (off by " +
                    std::to_string(off) + ")");
  }
  chart_ = projection_.null_basis();
  if (projection_.is_coordinate()) {
    for (Eigen::Index j = 0; j < chart_.cols(); ++j) {
      Eigen::Index row = 0;
      chart_.col(j).maxCoeff(&row);
      free_coords_.push_back(static_cast<int>(row));
    }
  }
}

DenseVector AffineSlice::point(const DenseVector& z) const {
  require_dim(chart_dim(), z.size(), "chart point");
  if (projection_.is_coordinate()) {
    DenseVector y = anchor_;
    for (size_t j = 0; j < free_coords_.size(); ++j) {
      y(free_coords_[j]) += z(static_cast<Eigen::Index>(j));
    }
    return y;
  }
  return anchor_ + chart_ * z;
}

DenseVector AffineSlice::pull_back(const DenseVector& c) const {
  require_dim(ambient_dim(), c.size(), "pull back");
  if (projection_.is_coordinate()) {
    DenseVector g(static_cast<Eigen::Index>(free_coords_.size()));
    for (size_t j = 0; j < free_coords_.size(); ++j) {
      g(static_cast<Eigen::Index>(j)) = c(free_coords_[j]);
    }
    return g;
  }
  return chart_.transpose() * c;
}

void Polytope::add_row(const DenseVector& row, double offset, int tag) {
  require_dim(dim_, row.size(), "polytope row");
  if (row.lpNorm<Eigen::Infinity>() == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "polytope rows must be nonzero");
  }
  rows_.push_back(row);
  offsets_.push_back(offset);
  tags_.push_back(tag);
}

DenseMatrix Polytope::row_matrix() const {
  DenseMatrix m(num_rows(), dim_);
  for (int i = 0; i < num_rows(); ++i) m.row(i) = rows_[static_cast<size_t>(i)];
  return m;
}

DenseVector Polytope::offset_vector() const {
  return Eigen::Map<const DenseVector>(offsets_.data(),
                                       static_cast<Eigen::Index>(offsets_.size()));
}

DenseVector Polytope::row_norms() const {
  DenseVector n(num_rows());
  for (int i = 0; i < num_rows(); ++i) n(i) = rows_[static_cast<size_t>(i)].norm();
  return n;
}

bool Polytope::contains(const DenseVector& x, double slack) const {
  require_dim(dim_, x.size(), "polytope membership");
  for (size_t i = 0; i < rows_.size(); ++i) {
    if (rows_[i].dot(x) > offsets_[i] + slack) return false;
  }
  return true;
}

Polytope shrink_polytope(const Polytope& p, double eps) {
  if (eps < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "shrink amount must be nonnegative");
  }
  Polytope out(p.dim());
  for (int i = 0; i < p.num_rows(); ++i) {
    out.add_row(p.row(i), p.offset(i) - eps * p.row(i).norm(), p.tag(i));
  }
  return out;
}

double log_ball_volume(int d, double r) {
  if (d < 0 || r < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "ball volume needs d >= 0, r >= 0");
  }
  if (d == 0) return 0.0;
  if (r == 0.0) return -INFINITY;
  const double half = 0.5 * d;
  return half * std::log(std::numbers::pi) + d * std::log(r) -
         std::lgamma(half + 1.0);
}

double ball_volume(int d, double r) { return std::exp(log_ball_volume(d, r)); }

double ball_radius(int d, double volume) {
  if (d < 1 || volume < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "ball radius needs d >= 1, V >= 0");
  }
  if (volume == 0.0) return 0.0;
  const double log_unit = log_ball_volume(d, 1.0);
  return std::exp((std::log(volume) - log_unit) / d);
}

}  // namespace locsdp
