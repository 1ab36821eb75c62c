#include "locsdp/oracle.hpp"

#include <memory>

#include "locsdp/errors.hpp"

namespace locsdp {

DenseVector normalize_inf(const DenseVector& c) {
  const double m = c.lpNorm<Eigen::Infinity>();
  if (!(m > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "cannot normalize a zero cut");
  }
  return c / m;
}

OracleHandle polytope_oracle(const Polytope& p, double half_width) {
  if (p.empty_rows()) {
    throw Error(ErrorCode::kInvalidArgument, "polytope oracle needs rows");
  }
  auto rows = std::make_shared<const DenseMatrix>(p.row_matrix());
  auto offsets = std::make_shared<const DenseVector>(p.offset_vector());
  auto norms = std::make_shared<const DenseVector>(p.row_norms());
  OracleHandle h;
  h.dim = p.dim();
  h.half_width = half_width;
  h.query = [rows, offsets, norms](const DenseVector& y,
                                   double delta) -> SeparationResponse {
    const DenseVector excess = *rows * y - *offsets;
    Eigen::Index worst = -1;
    double worst_dist = 0.0;
    for (Eigen::Index i = 0; i < excess.size(); ++i) {
      if (excess(i) <= delta * (*norms)(i)) continue;
      const double dist = excess(i) / (*norms)(i);
      if (worst < 0 || dist > worst_dist) {
        worst = i;
        worst_dist = dist;
      }
    }
    if (worst < 0) return Feasible{};
    return Cut{normalize_inf(rows->row(worst).transpose()), 0.0};
  };
  return h;
}

OracleHandle ball_oracle(const DenseVector& center, double radius,
                         double half_width) {
  if (!(radius > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "ball radius must be positive");
  }
  OracleHandle h;
  h.dim = static_cast<int>(center.size());
  h.half_width = half_width;
  h.query = [center, radius](const DenseVector& y,
                             double delta) -> SeparationResponse {
    const DenseVector d = y - center;
    if (d.norm() <= radius + delta) return Feasible{};
    return Cut{normalize_inf(d), 0.0};
  };
  return h;
}

}  // namespace locsdp
