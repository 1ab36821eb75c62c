#pragma once

#include <map>
#include <utility>
#include <vector>

#include "locsdp/config.hpp"
#include "locsdp/geometry.hpp"
#include "locsdp/lasserre.hpp"
#include "locsdp/subsets.hpp"

namespace locsdp {

// How labels of a vertex map to 0/1 program variables.
//   kBinary:    k = 2, vertex u is variable u, label = variable value.
//   kIndicator: variable u*k + i is the indicator of "u has label i".
enum class Encoding { kBinary, kIndicator };

struct LabelModel {
  int vertices = 0;
  int k = 2;
  Encoding encoding = Encoding::kBinary;

  static LabelModel binary(int vertices) { return {vertices, 2, Encoding::kBinary}; }
  static LabelModel indicator(int vertices, int k) {
    return {vertices, k, Encoding::kIndicator};
  }

  int variables() const { return encoding == Encoding::kBinary ? vertices : vertices * k; }
  int variable(int u, int label) const;
  // All program variables of vertex u.
  Subset block(int u) const;
  // Variables forced to one and to zero by "u has label `label`".
  std::pair<Subset, Subset> event(int u, int label) const;
};

// Partial labeling: vertex -> label, ordered by vertex.
using Labeling = std::map<int, int>;

// Union of two labelings; false when they disagree on a shared vertex.
bool merge_labelings(const Labeling& a, const Labeling& b, Labeling& out);
// All labelings of `vertices` with labels in [0, k), lexicographic order.
std::vector<Labeling> all_labelings(const std::vector<int>& vertices, int k);

// Vectors x_T with <x_A, x_B> = y_{A|B}. Either an explicit family of
// columns, or the canonical factor of a distribution over 0/1 points, where
// coordinate a of x_T is sqrt(p_a) [T subset of atom a] for every T.
class LabelVectors {
 public:
  LabelVectors() = default;
  LabelVectors(SubsetIndexer family, DenseMatrix columns);
  static LabelVectors from_distribution(
      const std::vector<std::pair<Subset, double>>& atoms);

  const SubsetIndexer& family() const { return family_; }
  int dim() const { return static_cast<int>(columns_.rows()); }
  bool is_distribution() const { return !atoms_.empty(); }
  // Throws MissingMoment when T is outside the family.
  DenseVector vec(Subset t) const;
  bool has(Subset t) const {
    return is_distribution() || family_.contains(t);
  }

 private:
  SubsetIndexer family_;
  DenseMatrix columns_;  // one column per family member, or sqrt weights
  std::vector<Subset> atoms_;
};

// Factorizes the moment matrix over `family`. Eigenvalues in [-tol.psd, 0)
// are clipped to zero; anything more negative raises PsdViolation.
LabelVectors cholesky_vectors(const PseudoMoments& y,
                              const std::vector<Subset>& family,
                              const Tolerances& tol = default_tolerances());

// sum_{T subset of zeros} (-1)^{|T|} x_{ones | T}; the zero vector when
// `ones` and `zeros` intersect.
DenseVector label_vectors(const LabelVectors& x, Subset ones, Subset zeros);
// Vertex-level form: the event "every u in dom(f) has label f(u)".
DenseVector label_vectors(const LabelVectors& x, const LabelModel& model,
                          const Labeling& f);

// Vectors rescaled by a conditioning event f on seed vertices. Holds a
// reference to `x`, which must outlive it.
class ConditionedVectors {
 public:
  ConditionedVectors(const LabelVectors& x, const LabelModel& model,
                     Labeling f, double event_norm);

  const Labeling& event() const { return f_; }
  const LabelVectors& vectors() const { return *x_; }
  const LabelModel& model() const { return model_; }
  // ||x_S(f)||.
  double event_norm() const { return norm_; }
  double event_probability() const { return norm_ * norm_; }

  // x_{A|f}(g) = x_{S | A}(f o g) / ||x_S(f)||, zero when g contradicts f.
  DenseVector vec(const Labeling& g) const;
  // x_{empty|f}; a unit vector.
  DenseVector base() const { return vec({}); }
  // ||x_{A|f}(g)||^2, the conditional probability of g.
  double probability(const Labeling& g) const;
  // Component orthogonal to x_{empty|f}.
  DenseVector perp(const DenseVector& v) const;

 private:
  const LabelVectors* x_;
  LabelModel model_;
  Labeling f_;
  double norm_;
  DenseVector unit_base_;
};

// Throws ZeroConditioning when ||x_S(f)|| <= tol.zero_event.
ConditionedVectors condition(const LabelVectors& x, const LabelModel& model,
                             const Labeling& f,
                             const Tolerances& tol = default_tolerances());

// Projection onto span{ x_{S|f0}(f) : f in [k]^S, nonzero }. The spanning
// vectors are mutually orthogonal, so the rank equals the number of events
// with nonzero probability.
OrthoProjection conditional_projection(const ConditionedVectors& cond,
                                       const std::vector<int>& seed_vertices,
                                       const Tolerances& tol = default_tolerances());

// Var = p - p^2 with p = ||x_{A|f}(g)||^2.
double conditional_variance(const ConditionedVectors& cond, const Labeling& g);
// <perp x_{A|f}(g), perp x_{B|f}(h)>.
double conditional_covariance(const ConditionedVectors& cond, const Labeling& g,
                              const Labeling& h);

struct VarianceIdentity {
  double lhs = 0.0;  // expectation over f in [k]^S of the conditional variance
  double rhs = 0.0;  // squared norm of the projection residual
};

// Both sides of the expected-conditional-variance identity for the event g
// after conditioning on f0 and then on a random labeling of `seed_vertices`.
VarianceIdentity expected_conditional_variance(
    const LabelVectors& x, const LabelModel& model, const Labeling& f0,
    const std::vector<int>& seed_vertices, const Labeling& g,
    const Tolerances& tol = default_tolerances());

}  // namespace locsdp
