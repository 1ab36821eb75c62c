#include "locsdp/certify.hpp"

#include <cmath>
#include <string>

#include "locsdp/errors.hpp"

namespace locsdp {

CertifyOutcome certify_e(const OracleHandle& oracle, const OrthoProjection& proj,
                         const DenseVector& anchor, double eps0,
                         const CertifyOptions& options) {
  const int m = proj.rank();
  if (m < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "certify_e needs a projection of rank >= 1; use ccut_e instead");
  }
  if (!(eps0 > 0.0 && eps0 < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps0 must lie in (0, 1)");
  }
  const AffineSlice slice(proj, anchor, options.ccut.tol);
  const int free_dim = slice.chart_dim();
  const double delta = eps0 / (2.0 * std::sqrt(double(m)));

  CertifyOutcome out;
  CcutResult run =
      ccut_e_log(oracle, slice, log_ball_volume(free_dim, delta), options.ccut);
  out.ccut_iterations = run.iterations;
  out.oracle_calls = run.oracle_calls;
  if (run.is_point()) {
    out.value = PointOutcome{run.point()};
    return out;
  }

  const double width = oracle.half_width;
  if (run.orthogonal_stop) {
    // The last cut <r, x> <= o is constant on the slice, so r already lies in
    // span(proj) up to the chart tolerance. Project it and charge the leak
    // against the box before falling back to the quadratic program.
    const Polytope& cuts = run.polytope();
    const int last = cuts.num_rows() - 1;
    const DenseVector& r = cuts.row(last);
    const DenseVector c = proj.apply(r);
    const double leak = (r - c).norm();
    const double reach = width * std::sqrt(double(r.size())) + anchor.norm();
    const double excess = cuts.offset(last) - r.dot(anchor) + leak * reach;
    const double scale = c.lpNorm<Eigen::Infinity>();
    if (scale >= options.ccut.tol.zero_direction && excess <= eps0 * scale) {
      out.value = Certificate{c / scale, eps0};
      out.orthogonal_shortcut = true;
      return out;
    }
  }
  const double eps_prime = delta / (2.0 * width * std::sqrt(double(m)));
  const Polytope shrunk =
      shrink_polytope(run.polytope(), (2.0 + eps_prime) * delta);
  QpOptions qp_options = options.qp;
  qp_options.half_width = width;
  if (options.ccut.deadline) qp_options.deadline = options.ccut.deadline;
  QpResult qp;
  try {
    qp = qp_min_norm(proj, anchor, shrunk, eps_prime * delta, qp_options);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kEmptyShrunkPolytope) {
      throw Error(ErrorCode::kThinBody,
                  "shrunk cut polytope is empty; the body has no interior of "
                  "depth " + std::to_string((2.0 + eps_prime) * delta));
    }
    throw;
  }
  out.qp_iterations = qp.iterations;

  const DenseVector direction = proj.apply(qp.y - anchor);
  const double scale = direction.lpNorm<Eigen::Infinity>();
  if (scale < options.ccut.tol.zero_direction) {
    throw Error(ErrorCode::kZeroDirection,
                "certificate direction vanished (" + std::to_string(scale) +
                    "); tolerances are inconsistent");
  }
  out.value = Certificate{-direction / scale, eps0};
  return out;
}

}  // namespace locsdp
