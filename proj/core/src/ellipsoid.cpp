#include "locsdp/ellipsoid.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "locsdp/errors.hpp"

namespace locsdp {

EllipsoidState::EllipsoidState(int dim, double radius)
    : center_(DenseVector::Zero(dim)),
      factor_(radius * DenseMatrix::Identity(dim, dim)),
      log_volume_(log_ball_volume(dim, radius)) {}

double EllipsoidState::log_volume_drop(int p) {
  if (p <= 0) return 0.0;
  if (p == 1) return std::log(0.5);
  const double pd = p;
  const double expand = pd * pd / (pd * pd - 1.0);
  const double beta = 2.0 / (pd + 1.0);
  return 0.5 * (pd * std::log(expand) + std::log1p(-beta));
}

double EllipsoidState::cut(const DenseVector& g, const Tolerances& tol) {
  const int p = dim();
  const DenseVector h = factor_.transpose() * g;
  const double gag = h.squaredNorm();
  if (!std::isfinite(gag)) {
    throw Error(ErrorCode::kDegenerateShape,
                "non-finite ellipsoid shape after " +
                    std::to_string(iterations_) + " iterations");
  }
  if (gag < tol.zero_gradient) {
    throw Error(ErrorCode::kDegenerateShape,
                "ellipsoid collapsed along the cut direction (g^T A g = " +
                    std::to_string(gag) + ") after " +
                    std::to_string(iterations_) + " iterations");
  }
  const DenseVector u = h / std::sqrt(gag);
  const DenseVector w = factor_ * u;  // A g / sqrt(g^T A g)
  if (p == 1) {
    center_ -= 0.5 * w;
    factor_ *= 0.5;
  } else {
    const double pd = p;
    const double beta = 2.0 / (pd + 1.0);
    const double gamma = 1.0 - std::sqrt(1.0 - beta);
    const double scale = std::sqrt(pd * pd / (pd * pd - 1.0));
    center_ -= w / (pd + 1.0);
    factor_.noalias() -= gamma * w * u.transpose();
    factor_ *= scale;
  }
  log_volume_ += log_volume_drop(p);
  ++iterations_;
  return gag;
}

bool EllipsoidState::deep_cut(const DenseVector& g, double depth,
                              const Tolerances& tol) {
  if (!(depth > 0.0)) {
    cut(g, tol);
    return true;
  }
  const int p = dim();
  const DenseVector h = factor_.transpose() * g;
  const double gag = h.squaredNorm();
  if (!std::isfinite(gag) || gag < tol.zero_gradient) {
    throw Error(ErrorCode::kDegenerateShape,
                "ellipsoid collapsed along a deep cut (g^T A g = " +
                    std::to_string(gag) + ") after " +
                    std::to_string(iterations_) + " iterations");
  }
  const double root = std::sqrt(gag);
  const double alpha = depth / root;
  if (alpha >= 1.0) return false;
  const DenseVector u = h / root;
  const DenseVector w = factor_ * u;
  if (p == 1) {
    center_ -= 0.5 * (1.0 + alpha) * w;
    factor_ *= 0.5 * (1.0 - alpha);
    log_volume_ += std::log(0.5 * (1.0 - alpha));
  } else {
    const double pd = p;
    const double tau = (1.0 + pd * alpha) / (pd + 1.0);
    const double sigma = 2.0 * tau / (1.0 + alpha);
    const double expand = pd * pd * (1.0 - alpha * alpha) / (pd * pd - 1.0);
    const double gamma = 1.0 - std::sqrt(1.0 - sigma);
    center_ -= tau * w;
    factor_.noalias() -= gamma * w * u.transpose();
    factor_ *= std::sqrt(expand);
    log_volume_ += 0.5 * (pd * std::log(expand) + std::log1p(-sigma));
  }
  ++iterations_;
  return true;
}

long ccut_iteration_cap(int chart_dim, double log2_target) {
  if (chart_dim <= 0) return 1;
  const double p = chart_dim;
  const double base = std::ceil(6.0 * p * (std::fabs(log2_target) + p));
  const double cap = 2.0 * base;
  if (cap > static_cast<double>(std::numeric_limits<long>::max() / 2)) {
    return std::numeric_limits<long>::max() / 2;
  }
  return static_cast<long>(cap);
}

namespace {

void check_deadline(
    const std::optional<std::chrono::steady_clock::time_point>& deadline,
    long k, const char* what) {
  if (deadline && std::chrono::steady_clock::now() > *deadline) {
    throw Error(ErrorCode::kBudgetExhausted,
                std::string(what) + " stopped by deadline after " +
                    std::to_string(k) + " iterations");
  }
}

}  // namespace

CcutResult ccut_e_log(const OracleHandle& oracle, const AffineSlice& slice,
                      double log_eps, const CcutOptions& options) {
  const int n = slice.ambient_dim();
  if (oracle.dim != n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "oracle dimension " + std::to_string(oracle.dim) +
                    " differs from slice dimension " + std::to_string(n));
  }
  const int p = slice.chart_dim();
  CcutResult result;
  Polytope cuts(n);

  if (p == 0) {
    const DenseVector& y = slice.anchor();
    const SeparationResponse r = oracle(y, options.query_delta);
    result.oracle_calls = 1;
    if (is_feasible(r)) {
      result.outcome = PointOutcome{y};
    } else {
      const Cut& cut = std::get<Cut>(r);
      cuts.add_row(cut.c, cut.c.dot(y) + cut.slack, 0);
      result.outcome = CutPolytopeOutcome{std::move(cuts)};
    }
    return result;
  }

  const int radius_dim = slice.projection().is_coordinate() ? p : n;
  EllipsoidState ellipsoid(p, oracle.half_width * std::sqrt(double(radius_dim)));
  const long cap = options.max_iterations > 0
                       ? options.max_iterations
                       : ccut_iteration_cap(p, log_eps / std::log(2.0));
  if (options.record_log_volume) {
    result.log_volumes.push_back(ellipsoid.log_volume());
  }

  for (long k = 0; k < cap; ++k) {
    check_deadline(options.deadline, k, "ellipsoid");
    const DenseVector y = slice.point(ellipsoid.center());
    const SeparationResponse r = oracle(y, options.query_delta);
    ++result.oracle_calls;
    if (is_feasible(r)) {
      result.iterations = k;
      result.final_log_volume = ellipsoid.log_volume();
      result.outcome = PointOutcome{y};
      return result;
    }
    const Cut& cut = std::get<Cut>(r);
    cuts.add_row(cut.c, cut.c.dot(y) + cut.slack, static_cast<int>(k));
    const DenseVector g = slice.pull_back(cut.c);
    if (g.norm() < std::sqrt(options.tol.zero_gradient)) {
      // The cut is constant on the slice, so the whole slice lies on or
      // outside its boundary and no central cut can make progress.
      if (options.reject_orthogonal_cuts) {
        throw Error(ErrorCode::kZeroGradient,
                    "oracle cut is orthogonal to the slice at iteration " +
                        std::to_string(k));
      }
      result.orthogonal_stop = true;
      break;
    }
    try {
      ellipsoid.cut(g, options.tol);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateShape || !ellipsoid.finite()) throw;
      result.collapsed = true;
      break;
    }
    if (options.record_log_volume) {
      result.log_volumes.push_back(ellipsoid.log_volume());
    }
    if (options.stop_on_volume && ellipsoid.log_volume() < log_eps) break;
  }
  result.iterations = ellipsoid.iterations();
  result.final_log_volume = ellipsoid.log_volume();
  result.outcome = CutPolytopeOutcome{std::move(cuts)};
  return result;
}

CcutResult ccut_e(const OracleHandle& oracle, const AffineSlice& slice,
                  double eps, const CcutOptions& options) {
  if (!(eps > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  }
  return ccut_e_log(oracle, slice, std::log(eps), options);
}

QpResult qp_min_norm(const OrthoProjection& proj, const DenseVector& anchor,
                     const Polytope& p, double accuracy,
                     const QpOptions& options) {
  const int n = proj.ambient_dim();
  if (anchor.size() != n || p.dim() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "qp_min_norm dimensions differ");
  }
  if (!(accuracy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "accuracy must be positive");
  }
  const double hw = options.half_width;
  const DenseMatrix rows = p.row_matrix();
  const DenseVector offsets = p.offset_vector();
  const DenseVector norms = p.row_norms();

  const double radius = hw * std::sqrt(double(n));
  EllipsoidState ellipsoid(n, radius);
  const double log_vol0 = ellipsoid.log_volume();
  const double spread = std::pow(radius + anchor.norm(), 2);
  const long cap =
      options.max_iterations > 0
          ? options.max_iterations
          : ccut_iteration_cap(n, std::log2(accuracy));

  bool have_best = false;
  QpResult best;
  best.objective = std::numeric_limits<double>::infinity();
  DenseVector g(n);
  for (long k = 0; k < cap; ++k) {
    if ((k & 63) == 0) check_deadline(options.deadline, k, "qp_min_norm");
    const DenseVector& y = ellipsoid.center();
    double depth = 0.0;
    // Box first, then the polytope rows, then the objective.
    Eigen::Index box_i = 0;
    const double box_excess = (y.array().abs() - hw).maxCoeff(&box_i);
    if (box_excess > 0.0) {
      g.setZero();
      g(box_i) = y(box_i) > 0 ? 1.0 : -1.0;
      depth = box_excess;
    } else {
      Eigen::Index worst = -1;
      if (rows.rows() > 0) {
        const DenseVector dist =
            ((rows * y - offsets).array() / norms.array()).matrix();
        const double worst_dist = dist.maxCoeff(&worst);
        if (worst_dist <= accuracy) worst = -1;
      }
      if (worst >= 0) {
        g = rows.row(worst).transpose();
        depth = rows.row(worst).dot(y) - offsets(worst);
      } else {
        const DenseVector diff = proj.apply(y - anchor);
        const double f = diff.squaredNorm();
        if (f < best.objective) {
          best.objective = f;
          best.y = y;
          have_best = true;
        }
        if (f <= 0.25 * accuracy * accuracy) break;
        g = 2.0 * diff;
        // Sliding objective: only points with f <= best can improve on it.
        depth = f - best.objective;
        const double gap_bound =
            spread * std::exp((ellipsoid.log_volume() - log_vol0) / n);
        if (gap_bound <= accuracy) break;
      }
    }
    try {
      // A deep cut missing the ellipsoid proves that no feasible point beats
      // the incumbent (or, without one, that the polytope is empty).
      if (!ellipsoid.deep_cut(g, depth, options.tol)) break;
    } catch (const Error& e) {
      // Collapse along g: nothing left to refine at this resolution.
      if (e.code() != ErrorCode::kDegenerateShape) throw;
      break;
    }
  }
  if (!have_best) {
    throw Error(ErrorCode::kEmptyShrunkPolytope,
                "no feasible point of the shrunk polytope found in " +
                    std::to_string(ellipsoid.iterations()) + " iterations");
  }
  best.iterations = ellipsoid.iterations();
  return best;
}

}  // namespace locsdp
