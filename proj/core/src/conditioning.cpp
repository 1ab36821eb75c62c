#include "locsdp/conditioning.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <string>

#include "locsdp/errors.hpp"

namespace locsdp {

int LabelModel::variable(int u, int label) const {
  if (u < 0 || u >= vertices || label < 0 || label >= k) {
    throw Error(ErrorCode::kInvalidArgument,
                "vertex " + std::to_string(u) + " / label " +
                    std::to_string(label) + " out of range");
  }
  return encoding == Encoding::kBinary ? u : u * k + label;
}

Subset LabelModel::block(int u) const {
  if (encoding == Encoding::kBinary) return singleton(u);
  Subset s = 0;
  for (int i = 0; i < k; ++i) s |= singleton(variable(u, i));
  return s;
}

std::pair<Subset, Subset> LabelModel::event(int u, int label) const {
  if (encoding == Encoding::kBinary) {
    const Subset bit = singleton(variable(u, label));
    return label == 1 ? std::make_pair(bit, Subset{0})
                      : std::make_pair(Subset{0}, bit);
  }
  const Subset one = singleton(variable(u, label));
  return {one, block(u) & ~one};
}

bool merge_labelings(const Labeling& a, const Labeling& b, Labeling& out) {
  out = a;
  for (const auto& [u, label] : b) {
    const auto [it, inserted] = out.emplace(u, label);
    if (!inserted && it->second != label) return false;
  }
  return true;
}

std::vector<Labeling> all_labelings(const std::vector<int>& vertices, int k) {
  std::vector<Labeling> out;
  Labeling current;
  auto rec = [&](auto&& self, size_t i) -> void {
    if (i == vertices.size()) {
      out.push_back(current);
      return;
    }
    for (int label = 0; label < k; ++label) {
      current[vertices[i]] = label;
      self(self, i + 1);
    }
    current.erase(vertices[i]);
  };
  rec(rec, 0);
  return out;
}

LabelVectors::LabelVectors(SubsetIndexer family, DenseMatrix columns)
    : family_(std::move(family)), columns_(std::move(columns)) {
  if (columns_.cols() != family_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "one vector per family member expected");
  }
}

LabelVectors LabelVectors::from_distribution(
    const std::vector<std::pair<Subset, double>>& atoms) {
  LabelVectors out;
  double total = 0.0;
  out.columns_.resize(static_cast<int>(atoms.size()), 1);
  for (size_t a = 0; a < atoms.size(); ++a) {
    if (atoms[a].second < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "negative atom probability");
    }
    total += atoms[a].second;
    out.columns_(static_cast<int>(a), 0) = std::sqrt(atoms[a].second);
    out.atoms_.push_back(atoms[a].first);
  }
  if (atoms.empty() || std::fabs(total - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument,
                "atom probabilities must sum to 1");
  }
  return out;
}

DenseVector LabelVectors::vec(Subset t) const {
  if (is_distribution()) {
    DenseVector v(dim());
    for (int a = 0; a < dim(); ++a) {
      v(a) = is_subset_of(t, atoms_[static_cast<size_t>(a)]) ? columns_(a, 0)
                                                              : 0.0;
    }
    return v;
  }
  const int i = family_.find(t);
  if (i < 0) {
    throw Error(ErrorCode::kMissingMoment,
                "no vector for " + subset_to_string(t));
  }
  return columns_.col(i);
}

LabelVectors cholesky_vectors(const PseudoMoments& y,
                              const std::vector<Subset>& family,
                              const Tolerances& tol) {
  SubsetIndexer index(family);
  const DenseMatrix gram = moment_matrix(y, index.family());
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kEigenFailure, "moment matrix eigensolve failed");
  }
  const DenseVector& lambda = es.eigenvalues();
  if (lambda(0) < -tol.psd) {
    throw Error(ErrorCode::kPsdViolation,
                "moment matrix has eigenvalue " + std::to_string(lambda(0)) +
                    " below -" + std::to_string(tol.psd));
  }
  // Numerical rank cutoff: eigenvalues at round-off level belong to the null
  // space, and their square roots would add O(sqrt(eps)) noise to vectors of
  // impossible events.
  const double cutoff = std::max(0.0, lambda(lambda.size() - 1)) *
                        std::numeric_limits<double>::epsilon() *
                        64.0 * static_cast<double>(lambda.size());
  int first = 0;
  while (first < lambda.size() && lambda(first) <= cutoff) ++first;
  const int rank = static_cast<int>(lambda.size()) - first;
  DenseMatrix cols(rank, index.size());
  for (int j = 0; j < rank; ++j) {
    cols.row(j) = std::sqrt(lambda(first + j)) *
                  es.eigenvectors().col(first + j).transpose();
  }
  return LabelVectors(std::move(index), std::move(cols));
}

DenseVector label_vectors(const LabelVectors& x, Subset ones, Subset zeros) {
  DenseVector out = DenseVector::Zero(x.dim());
  if (ones & zeros) return out;
  Subset t = zeros;
  while (true) {
    const double sign = (subset_size(t) % 2 == 0) ? 1.0 : -1.0;
    out += sign * x.vec(ones | t);
    if (t == 0) break;
    t = (t - 1) & zeros;
  }
  return out;
}

DenseVector label_vectors(const LabelVectors& x, const LabelModel& model,
                          const Labeling& f) {
  Subset ones = 0, zeros = 0;
  for (const auto& [u, label] : f) {
    const auto [o, z] = model.event(u, label);
    ones |= o;
    zeros |= z;
  }
  return label_vectors(x, ones, zeros);
}

ConditionedVectors::ConditionedVectors(const LabelVectors& x,
                                       const LabelModel& model, Labeling f,
                                       double event_norm)
    : x_(&x), model_(model), f_(std::move(f)), norm_(event_norm) {
  unit_base_ = label_vectors(*x_, model_, f_) / norm_;
}

DenseVector ConditionedVectors::vec(const Labeling& g) const {
  Labeling merged;
  if (!merge_labelings(f_, g, merged)) return DenseVector::Zero(x_->dim());
  return label_vectors(*x_, model_, merged) / norm_;
}

double ConditionedVectors::probability(const Labeling& g) const {
  return vec(g).squaredNorm();
}

DenseVector ConditionedVectors::perp(const DenseVector& v) const {
  return v - unit_base_.dot(v) * unit_base_;
}

ConditionedVectors condition(const LabelVectors& x, const LabelModel& model,
                             const Labeling& f, const Tolerances& tol) {
  const double norm = label_vectors(x, model, f).norm();
  if (norm <= tol.zero_event) {
    throw Error(ErrorCode::kZeroConditioning,
                "conditioning event has norm " + std::to_string(norm));
  }
  return ConditionedVectors(x, model, f, norm);
}

OrthoProjection conditional_projection(const ConditionedVectors& cond,
                                       const std::vector<int>& seed_vertices,
                                       const Tolerances& tol) {
  std::vector<DenseVector> units;
  for (const Labeling& f : all_labelings(seed_vertices, cond.model().k)) {
    const DenseVector v = cond.vec(f);
    const double norm = v.norm();
    if (norm > tol.zero_event) units.push_back(v / norm);
  }
  const int dim = static_cast<int>(cond.base().size());
  DenseMatrix span(dim, static_cast<int>(units.size()));
  for (size_t j = 0; j < units.size(); ++j) span.col(static_cast<int>(j)) = units[j];
  return OrthoProjection::from_span(span, tol.zero_event);
}

double conditional_variance(const ConditionedVectors& cond, const Labeling& g) {
  const double p = cond.probability(g);
  return p - p * p;
}

double conditional_covariance(const ConditionedVectors& cond, const Labeling& g,
                              const Labeling& h) {
  return cond.perp(cond.vec(g)).dot(cond.perp(cond.vec(h)));
}

VarianceIdentity expected_conditional_variance(
    const LabelVectors& x, const LabelModel& model, const Labeling& f0,
    const std::vector<int>& seed_vertices, const Labeling& g,
    const Tolerances& tol) {
  const ConditionedVectors outer = condition(x, model, f0, tol);
  VarianceIdentity out;
  for (const Labeling& f : all_labelings(seed_vertices, model.k)) {
    const double weight = outer.probability(f);
    Labeling both;
    if (!merge_labelings(f0, f, both)) continue;
    const double norm = label_vectors(x, model, both).norm();
    if (norm <= tol.zero_event) continue;
    const ConditionedVectors inner(x, model, both, norm);
    out.lhs += weight * conditional_variance(inner, g);
  }
  const OrthoProjection proj = conditional_projection(outer, seed_vertices, tol);
  out.rhs = proj.apply_complement(outer.vec(g)).squaredNorm();
  return out;
}

}  // namespace locsdp
