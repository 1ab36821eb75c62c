#pragma once

#include <chrono>
#include <optional>
#include <variant>
#include <vector>

#include "locsdp/config.hpp"
#include "locsdp/geometry.hpp"
#include "locsdp/oracle.hpp"

namespace locsdp {

// Central-cut ellipsoid { z : (z - center)^T A^{-1} (z - center) <= 1 } in
// chart coordinates. The shape is kept as a square-root factor A = L L^T, so
// symmetry and positive semidefiniteness hold by construction.
class EllipsoidState {
 public:
  EllipsoidState(int dim, double radius);

  int dim() const { return static_cast<int>(center_.size()); }
  const DenseVector& center() const { return center_; }
  const DenseMatrix& factor() const { return factor_; }
  DenseMatrix shape() const { return factor_ * factor_.transpose(); }
  long iterations() const { return iterations_; }
  // Natural log of the ellipsoid volume, tracked analytically.
  double log_volume() const { return log_volume_; }
  bool finite() const { return center_.allFinite() && factor_.allFinite(); }

  // Keeps the half { z : <g, z - center> <= 0 }. Returns g^T A g before the
  // update. Throws DegenerateShape when the ellipsoid has collapsed along g.
  double cut(const DenseVector& g, const Tolerances& tol);

  // Keeps { z : <g, z - center> <= -depth } with depth >= 0. Returns false,
  // leaving the state unchanged, when that half-space misses the ellipsoid.
  // Throws DegenerateShape like cut().
  bool deep_cut(const DenseVector& g, double depth, const Tolerances& tol);

  // Log-volume decrease of one central cut in dimension p.
  static double log_volume_drop(int p);

 private:
  DenseVector center_;
  DenseMatrix factor_;
  long iterations_ = 0;
  double log_volume_ = 0.0;
};

struct PointOutcome {
  DenseVector a;
};

struct CutPolytopeOutcome {
  Polytope polytope;
};

using CcutOutcome = std::variant<PointOutcome, CutPolytopeOutcome>;

struct CcutOptions {
  // Slack passed to every oracle query.
  double query_delta = 0.0;
  // 0 selects the default cap 2 * ceil(6 p (|log2 eps| + p)).
  long max_iterations = 0;
  // Stop as soon as the tracked ellipsoid volume falls below the target.
  bool stop_on_volume = true;
  bool record_log_volume = false;
  // A cut with zero chart gradient proves the slice lies outside the open
  // half-space kept by the oracle. By default this ends the run with the cut
  // polytope; when set, it raises ZeroGradient instead.
  bool reject_orthogonal_cuts = false;
  std::optional<std::chrono::steady_clock::time_point> deadline;
  Tolerances tol = default_tolerances();
};

struct CcutResult {
  CcutOutcome outcome;
  long iterations = 0;
  long oracle_calls = 0;
  double final_log_volume = 0.0;
  bool orthogonal_stop = false;
  // The shape factor lost rank along a cut direction: the ellipsoid is
  // thinner than sqrt(tol.zero_gradient) there and holds no target ball.
  bool collapsed = false;
  std::vector<double> log_volumes;  // filled when record_log_volume is set

  bool is_point() const { return std::holds_alternative<PointOutcome>(outcome); }
  const DenseVector& point() const { return std::get<PointOutcome>(outcome).a; }
  const Polytope& polytope() const {
    return std::get<CutPolytopeOutcome>(outcome).polytope;
  }
};

long ccut_iteration_cap(int chart_dim, double log2_target);

// Central-cut ellipsoid over an affine slice. `eps` is the slice-volume
// threshold below which the accumulated cut polytope is returned.
CcutResult ccut_e(const OracleHandle& oracle, const AffineSlice& slice,
                  double eps, const CcutOptions& options = {});
// Same, with the threshold given as a natural logarithm so that volumes far
// below the double range remain representable.
CcutResult ccut_e_log(const OracleHandle& oracle, const AffineSlice& slice,
                      double log_eps, const CcutOptions& options = {});

struct QpOptions {
  double half_width = 1.0;
  long max_iterations = 0;  // 0: 2 * ceil(6 n (|log2 accuracy| + n))
  // Checked every 64 iterations; expiry raises BudgetExhausted.
  std::optional<std::chrono::steady_clock::time_point> deadline;
  Tolerances tol = default_tolerances();
};

struct QpResult {
  DenseVector y;
  double objective = 0.0;
  long iterations = 0;
};

// Minimises ||proj (y - anchor)||^2 over P intersected with the box
// [-half_width, half_width]^n using a sliding-objective ellipsoid.
QpResult qp_min_norm(const OrthoProjection& proj, const DenseVector& anchor,
                     const Polytope& p, double accuracy,
                     const QpOptions& options = {});

}  // namespace locsdp
