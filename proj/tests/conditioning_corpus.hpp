#pragma once

// Random feasible conditioning instances and the checks run on them. A
// feasible instance is the moment vector of a random distribution over
// labelings, factorized through cholesky_vectors over the full power set of
// program variables, so conditioning never runs out of vectors.

#include <algorithm>
#include <array>
#include <map>
#include <numeric>
#include <cmath>
#include <random>
#include <vector>

#include "locsdp/conditioning.hpp"
#include "locsdp/lasserre.hpp"
#include "reference.hpp"

namespace corpus {

using namespace locsdp;

struct Instance {
  LabelModel model;
  ref::Atoms atoms;  // distribution over 0/1 points of the program variables
  LabelVectors x;
  Labeling f0;                 // conditioning event of positive probability
  std::vector<int> seeds;      // S, disjoint from dom(f0)
  Labeling g;                  // event A with labels
  Labeling h;                  // second event B
};

inline Subset encode(const LabelModel& m, const std::vector<int>& labels) {
  Subset s = 0;
  for (int u = 0; u < m.vertices; ++u) {
    if (m.encoding == Encoding::kBinary) {
      if (labels[static_cast<size_t>(u)] == 1) s |= singleton(u);
    } else {
      s |= singleton(m.variable(u, labels[static_cast<size_t>(u)]));
    }
  }
  return s;
}

inline std::vector<int> random_labels(int n, int k, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  std::vector<int> out(static_cast<size_t>(n));
  for (int& l : out) l = pick(rng);
  return out;
}

inline Labeling random_event(const std::vector<int>& vertices, int k,
                             std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, k - 1);
  Labeling f;
  for (int u : vertices) f[u] = pick(rng);
  return f;
}

inline double event_prob(const Instance& in, const Labeling& f) {
  Subset ones = 0, zeros = 0;
  for (const auto& [u, l] : f) {
    const auto [o, z] = in.model.event(u, l);
    ones |= o;
    zeros |= z;
  }
  return ref::event_probability(in.atoms, ones, zeros);
}

// Binary (k = 2) instances have 2..5 vertices; indicator instances have
// k = 3 and 2..3 vertices so the power set stays below 2^9 members.
inline Instance make(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Instance in;
  const bool indicator = u(rng) < 0.3;
  const int vertices = indicator ? 2 + static_cast<int>(u(rng) * 2)
                                 : 2 + static_cast<int>(u(rng) * 4);
  in.model = indicator ? LabelModel::indicator(vertices, 3)
                       : LabelModel::binary(vertices);
  const int k = in.model.k;
  // Random atoms; weights include tiny ones so conditioning sees skewed events.
  const int support = 2 + static_cast<int>(u(rng) * 6);
  std::vector<double> w(static_cast<size_t>(support));
  double total = 0.0;
  for (double& v : w) {
    v = std::pow(u(rng), 2.0) + 1e-3;
    total += v;
  }
  std::map<Subset, double> merged;
  for (int a = 0; a < support; ++a) {
    merged[encode(in.model, random_labels(vertices, k, rng))] += w[static_cast<size_t>(a)] / total;
  }
  for (const auto& [s, p] : merged) in.atoms.emplace_back(s, p);

  const int vars = in.model.variables();
  const std::vector<Subset> family = subsets_up_to(vars, vars);
  std::vector<std::pair<Subset, double>> atoms(in.atoms.begin(), in.atoms.end());
  in.x = cholesky_vectors(distribution_moments(vars, atoms, family), family);

  std::vector<int> order(static_cast<size_t>(vertices));
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int cond_size = static_cast<int>(u(rng) * std::min(2, vertices - 1));
  // f0 is read off a support atom so it has positive probability.
  const std::vector<int> witness = [&] {
    std::vector<int> labels(static_cast<size_t>(vertices));
    const Subset atom = in.atoms[static_cast<size_t>(u(rng) * in.atoms.size())].first;
    for (int v = 0; v < vertices; ++v) {
      if (in.model.encoding == Encoding::kBinary) {
        labels[static_cast<size_t>(v)] = subset_contains(atom, v) ? 1 : 0;
      } else {
        for (int l = 0; l < k; ++l) {
          if (subset_contains(atom, in.model.variable(v, l))) labels[static_cast<size_t>(v)] = l;
        }
      }
    }
    return labels;
  }();
  for (int i = 0; i < cond_size; ++i) {
    in.f0[order[static_cast<size_t>(i)]] = witness[static_cast<size_t>(order[static_cast<size_t>(i)])];
  }
  const int rest = vertices - cond_size;
  const int seed_size = 1 + static_cast<int>(u(rng) * std::min(2, rest));
  for (int i = 0; i < seed_size; ++i) in.seeds.push_back(order[static_cast<size_t>(cond_size + i)]);
  std::sort(in.seeds.begin(), in.seeds.end());
  std::vector<int> a_vertices, b_vertices;
  for (int v = 0; v < vertices; ++v) {
    if (u(rng) < 0.5) a_vertices.push_back(v);
    if (u(rng) < 0.5) b_vertices.push_back(v);
  }
  in.g = random_event(a_vertices, k, rng);
  in.h = random_event(b_vertices, k, rng);
  return in;
}

// Worst deviation of each conditioned-vector identity on one instance.
struct ClaimErrors {
  std::array<double, 5> item{};
  double vs_reference = 0.0;  // conditional probabilities against the atoms
};

inline ClaimErrors conditioned_identities(const Instance& in) {
  ClaimErrors err;
  auto bump = [](double& slot, double v) { slot = std::max(slot, std::fabs(v)); };
  const int k = in.model.k;
  const ConditionedVectors cf = condition(in.x, in.model, in.f0);
  const double pf = cf.event_probability();
  bump(err.vs_reference, pf - event_prob(in, in.f0));

  // (a) x_{empty|f} = x_{S|f}(f), unit norm.
  bump(err.item[0], (cf.base() - cf.vec(in.f0)).norm());
  bump(err.item[0], cf.base().squaredNorm() - 1.0);

  // (b) inner products of conditioned vectors.
  Labeling gh;
  const bool consistent = merge_labelings(in.g, in.h, gh);
  const double inner = cf.vec(in.g).dot(cf.vec(in.h));
  bump(err.item[1], inner - (consistent ? cf.probability(gh) : 0.0));

  // (c) decomposition of x_A(g) over labelings of the seeds.
  DenseVector sum = DenseVector::Zero(in.x.dim());
  double mass = 0.0;
  for (const Labeling& f : all_labelings(in.seeds, k)) {
    const double norm = label_vectors(in.x, in.model, f).norm();
    if (norm <= 1e-12) continue;
    const ConditionedVectors c(in.x, in.model, f, norm);
    sum += norm * c.vec(in.g);
    mass += norm * norm * c.probability(in.g);
  }
  const DenseVector xg = label_vectors(in.x, in.model, in.g);
  bump(err.item[2], (sum - xg).norm());
  bump(err.item[2], mass - xg.squaredNorm());

  // (d) conditional norm through an inner product.
  const DenseVector xf = label_vectors(in.x, in.model, in.f0);
  bump(err.item[3], cf.probability(in.g) - xf.dot(xg) / xf.squaredNorm());

  // (e) conditioning in two steps equals conditioning on the merged event.
  const double pg = cf.probability(in.g);
  Labeling fg;
  if (pg > 1e-9 && merge_labelings(in.f0, in.g, fg)) {
    const ConditionedVectors cfg = condition(in.x, in.model, fg);
    Labeling gh2;
    const DenseVector lhs = cfg.vec(in.h);
    const DenseVector rhs = merge_labelings(in.g, in.h, gh2)
                                ? DenseVector(cf.vec(gh2) / std::sqrt(pg))
                                : DenseVector(DenseVector::Zero(in.x.dim()));
    bump(err.item[4], (lhs - rhs).norm());
    Labeling fgh;
    if (merge_labelings(fg, in.h, fgh)) {
      bump(err.vs_reference, cfg.probability(in.h) - event_prob(in, fgh) / event_prob(in, fg));
    }
  }
  return err;
}

// Reference side of the expected-variance identity: E_f Var(g | f, f0) from
// the distribution itself.
inline double reference_expected_variance(const Instance& in) {
  const double p0 = event_prob(in, in.f0);
  double lhs = 0.0;
  for (const Labeling& f : all_labelings(in.seeds, in.model.k)) {
    Labeling ff;
    if (!merge_labelings(in.f0, f, ff)) continue;
    const double pf = event_prob(in, ff);
    if (pf <= 1e-15) continue;
    Labeling ffg;
    const double p = merge_labelings(ff, in.g, ffg) ? event_prob(in, ffg) / pf : 0.0;
    lhs += (pf / p0) * (p - p * p);
  }
  return lhs;
}

}  // namespace corpus
