#include "locsdp/seeding.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "locsdp/errors.hpp"

namespace locsdp {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

// Indices 0..m-1 ordered by decreasing weight, ties by index.
std::vector<int> order_by_weight(const DenseVector& w) {
  std::vector<int> order(static_cast<size_t>(w.size()));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return w(a) > w(b); });
  return order;
}

// Greedy max-volume selection on a Gram matrix via pivoted Cholesky.
std::vector<int> greedy_select(const DenseMatrix& gram, int count, double tol) {
  const int m = static_cast<int>(gram.rows());
  DenseVector residual = gram.diagonal();
  DenseMatrix factor = DenseMatrix::Zero(m, count);
  std::vector<int> chosen;
  std::vector<bool> used(static_cast<size_t>(m), false);
  for (int step = 0; step < count; ++step) {
    int best = -1;
    for (int i = 0; i < m; ++i) {
      if (used[static_cast<size_t>(i)]) continue;
      if (best < 0 || residual(i) > residual(best)) best = i;
    }
    if (best < 0 || residual(best) <= tol) break;
    const double pivot = std::sqrt(residual(best));
    for (int i = 0; i < m; ++i) {
      double v = gram(i, best);
      for (int j = 0; j < step; ++j) v -= factor(i, j) * factor(best, j);
      factor(i, step) = v / pivot;
      residual(i) -= factor(i, step) * factor(i, step);
    }
    used[static_cast<size_t>(best)] = true;
    chosen.push_back(best);
  }
  return chosen;
}

// Exact size-k sampling with P(S) proportional to det(gram_S).
std::vector<int> dpp_select(const DenseMatrix& gram, int count, double tol,
                            Rng& rng) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(gram);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kEigenFailure, "Gram eigensolve failed");
  }
  std::vector<int> keep;
  for (int i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) > tol) keep.push_back(i);
  }
  const int m = static_cast<int>(keep.size());
  if (count > m) count = m;
  if (count == 0) return {};
  const double scale = es.eigenvalues()(keep.back());
  std::vector<double> lambda(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) {
    lambda[static_cast<size_t>(i)] = es.eigenvalues()(keep[static_cast<size_t>(i)]) / scale;
  }
  // e[l][i]: elementary symmetric polynomial of degree l in lambda[0..i).
  std::vector<std::vector<double>> e(static_cast<size_t>(count) + 1,
                                     std::vector<double>(static_cast<size_t>(m) + 1, 0.0));
  for (int i = 0; i <= m; ++i) e[0][static_cast<size_t>(i)] = 1.0;
  for (int l = 1; l <= count; ++l) {
    for (int i = 1; i <= m; ++i) {
      e[static_cast<size_t>(l)][static_cast<size_t>(i)] =
          e[static_cast<size_t>(l)][static_cast<size_t>(i) - 1] +
          lambda[static_cast<size_t>(i) - 1] *
              e[static_cast<size_t>(l) - 1][static_cast<size_t>(i) - 1];
    }
  }
  std::vector<int> eig;
  int l = count;
  for (int i = m; i >= 1 && l > 0; --i) {
    const double take = lambda[static_cast<size_t>(i) - 1] *
                        e[static_cast<size_t>(l) - 1][static_cast<size_t>(i) - 1] /
                        e[static_cast<size_t>(l)][static_cast<size_t>(i)];
    if (i == l || uniform01(rng) < take) {
      eig.push_back(keep[static_cast<size_t>(i) - 1]);
      --l;
    }
  }
  DenseMatrix basis(gram.rows(), static_cast<int>(eig.size()));
  for (size_t j = 0; j < eig.size(); ++j) {
    basis.col(static_cast<int>(j)) = es.eigenvectors().col(eig[j]);
  }
  std::vector<int> chosen;
  while (basis.cols() > 0) {
    const DenseVector weights = basis.rowwise().squaredNorm();
    double u = uniform01(rng) * weights.sum();
    int pick = static_cast<int>(weights.size()) - 1;
    for (int i = 0; i < weights.size(); ++i) {
      if (u < weights(i)) {
        pick = i;
        break;
      }
      u -= weights(i);
    }
    while (weights(pick) <= 0.0 && pick > 0) --pick;
    chosen.push_back(pick);
    // Restrict the span to vectors vanishing at `pick`.
    Eigen::Index j = 0;
    basis.row(pick).cwiseAbs().maxCoeff(&j);
    const DenseVector pivot_col = basis.col(j);
    const double pivot = basis(pick, j);
    DenseMatrix next(basis.rows(), basis.cols() - 1);
    int c = 0;
    for (int k = 0; k < basis.cols(); ++k) {
      if (k == j) continue;
      next.col(c++) = basis.col(k) - pivot_col * (basis(pick, k) / pivot);
    }
    if (next.cols() > 0) {
      Eigen::HouseholderQR<DenseMatrix> qr(next);
      basis = qr.householderQ() *
              DenseMatrix::Identity(next.rows(), next.cols());
    } else {
      basis = next;
    }
  }
  return chosen;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(base) ^ a) ^ b);
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          const SeedSet& seeds) {
  std::uint64_t h = derive_seed(base, a, seeds.size());
  for (int u : seeds) h = splitmix(h ^ static_cast<std::uint64_t>(u));
  return h;
}

ColumnEnsemble ColumnEnsemble::from_columns(std::vector<int> ids,
                                            const DenseMatrix& columns) {
  if (static_cast<int>(ids.size()) != columns.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "one id per column expected");
  }
  return {std::move(ids), columns.transpose() * columns};
}

VolumeSample volume_sample(const ColumnEnsemble& cols, int count, Rng& rng,
                           bool greedy) {
  const int m = cols.size();
  if (cols.gram.rows() != m || cols.gram.cols() != m) {
    throw Error(ErrorCode::kDimensionMismatch, "Gram size differs from ids");
  }
  if (count < 0 || count > m) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot select " + std::to_string(count) + " of " +
                    std::to_string(m) + " columns");
  }
  VolumeSample out;
  if (count == 0) return out;
  const double tol = 1e-10 * std::max(1.0, cols.gram.diagonal().maxCoeff());
  const std::vector<int> picked = greedy ? greedy_select(cols.gram, count, tol)
                                         : dpp_select(cols.gram, count, tol, rng);
  std::vector<bool> used(static_cast<size_t>(m), false);
  for (int i : picked) {
    used[static_cast<size_t>(i)] = true;
    out.ids.push_back(cols.ids[static_cast<size_t>(i)]);
  }
  if (static_cast<int>(picked.size()) < count) {
    out.padded = true;
    for (int i : order_by_weight(cols.gram.diagonal())) {
      if (static_cast<int>(out.ids.size()) == count) break;
      if (used[static_cast<size_t>(i)]) continue;
      used[static_cast<size_t>(i)] = true;
      out.ids.push_back(cols.ids[static_cast<size_t>(i)]);
    }
  }
  return out;
}

SeedChoice seed_qip(const SeedSet& current, const LabelVectors& x,
                    const LabelModel& model, int count, Rng& rng,
                    const Tolerances& tol) {
  std::vector<DenseVector> span;
  for (const Labeling& f : all_labelings(current, model.k)) {
    const DenseVector v = label_vectors(x, model, f);
    if (v.norm() > tol.zero_event) span.push_back(v);
  }
  DenseMatrix span_mat(x.dim(), static_cast<int>(span.size()));
  for (size_t j = 0; j < span.size(); ++j) span_mat.col(static_cast<int>(j)) = span[j];
  const OrthoProjection proj = OrthoProjection::from_span(span_mat, tol.zero_event);

  std::vector<int> ids;
  for (int u = 0; u < model.vertices; ++u) {
    if (!std::binary_search(current.begin(), current.end(), u)) ids.push_back(u);
  }
  DenseMatrix cols(x.dim(), static_cast<int>(ids.size()));
  for (size_t j = 0; j < ids.size(); ++j) {
    cols.col(static_cast<int>(j)) =
        proj.apply_complement(label_vectors(x, model, Labeling{{ids[j], 1}}));
  }
  const int take = std::min(count, static_cast<int>(ids.size()));
  const VolumeSample s =
      volume_sample(ColumnEnsemble::from_columns(ids, cols), take, rng);
  SeedChoice out;
  out.seeds = current;
  out.seeds.insert(out.seeds.end(), s.ids.begin(), s.ids.end());
  out.seeds = normalize_seeds(out.seeds);
  out.padded = s.padded;
  return out;
}

ColumnEnsemble coloring_embedding(const LabelVectors& x, const LabelModel& model) {
  const DenseVector base = x.vec(0);
  const int d = x.dim();
  DenseMatrix cols = DenseMatrix::Zero(d * model.k, model.vertices);
  std::vector<int> ids(static_cast<size_t>(model.vertices));
  for (int u = 0; u < model.vertices; ++u) {
    ids[static_cast<size_t>(u)] = u;
    for (int i = 0; i < model.k; ++i) {
      DenseVector v;
      try {
        v = label_vectors(x, model, Labeling{{u, i}});
      } catch (const Error& e) {
        // Partial families lack the pair moments of u's block; the positive
        // event agrees with the full one whenever the one-hot rows hold.
        if (e.code() != ErrorCode::kMissingMoment) throw;
        v = x.vec(singleton(model.variable(u, i)));
      }
      cols.block(i * d, u, d, 1) = v - base.dot(v) * base;
    }
  }
  return ColumnEnsemble::from_columns(std::move(ids), cols);
}

SeedChoice seed_color(const LabelVectors& x, const LabelModel& model, int count,
                      Rng& rng) {
  const VolumeSample s = volume_sample(coloring_embedding(x, model),
                                       std::min(count, model.vertices), rng);
  return {normalize_seeds(s.ids), s.padded};
}

SeedChoice seed_sparsest_cut(const LabelVectors& x, const LabelModel& model,
                             const std::vector<DemandPair>& demand, int count,
                             Rng& rng) {
  std::vector<int> ids;
  std::vector<DenseVector> cols;
  for (size_t p = 0; p < demand.size(); ++p) {
    const DemandPair& d = demand[p];
    if (d.weight < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "negative demand weight");
    }
    if (d.weight == 0.0) continue;
    const DenseVector xu = label_vectors(x, model, Labeling{{d.u, 1}});
    const DenseVector xv = label_vectors(x, model, Labeling{{d.v, 1}});
    ids.push_back(static_cast<int>(p));
    cols.push_back(std::sqrt(d.weight) * (xu - xv));
  }
  if (ids.empty()) {
    throw Error(ErrorCode::kNoDemand, "demand graph has no positive weight");
  }
  DenseMatrix mat(x.dim(), static_cast<int>(cols.size()));
  for (size_t j = 0; j < cols.size(); ++j) mat.col(static_cast<int>(j)) = cols[j];
  const VolumeSample s = volume_sample(
      ColumnEnsemble::from_columns(ids, mat),
      std::min(count, static_cast<int>(ids.size())), rng);
  SeedChoice out;
  for (int p : s.ids) {
    out.seeds.push_back(demand[static_cast<size_t>(p)].u);
    out.seeds.push_back(demand[static_cast<size_t>(p)].v);
  }
  out.seeds = normalize_seeds(out.seeds);
  out.padded = s.padded;
  return out;
}

namespace {

constexpr double kTinyNorm = 1e-12;

// perp x_{u|f}(i) for every label i.
std::vector<DenseVector> centered_labels(const ConditionedVectors& cond, int u) {
  std::vector<DenseVector> out;
  for (int i = 0; i < cond.model().k; ++i) {
    out.push_back(cond.perp(cond.vec(Labeling{{u, i}})));
  }
  return out;
}

}  // namespace

ColumnEnsemble csp_embedding(const ConditionedVectors& cond, int vertices) {
  std::vector<std::vector<DenseVector>> centered;
  std::vector<std::vector<double>> norms;
  for (int u = 0; u < vertices; ++u) {
    centered.push_back(centered_labels(cond, u));
    std::vector<double> nu;
    for (const DenseVector& v : centered.back()) nu.push_back(v.norm());
    norms.push_back(nu);
  }
  const int k = cond.model().k;
  ColumnEnsemble ens;
  ens.ids.resize(static_cast<size_t>(vertices));
  std::iota(ens.ids.begin(), ens.ids.end(), 0);
  ens.gram = DenseMatrix::Zero(vertices, vertices);
  for (int u = 0; u < vertices; ++u) {
    for (int v = u; v < vertices; ++v) {
      double s = 0.0;
      for (int i = 0; i < k; ++i) {
        const double ni = norms[static_cast<size_t>(u)][static_cast<size_t>(i)];
        if (ni <= kTinyNorm) continue;
        for (int j = 0; j < k; ++j) {
          const double nj = norms[static_cast<size_t>(v)][static_cast<size_t>(j)];
          if (nj <= kTinyNorm) continue;
          const double ip = centered[static_cast<size_t>(u)][static_cast<size_t>(i)].dot(
              centered[static_cast<size_t>(v)][static_cast<size_t>(j)]);
          s += ip * ip / (ni * nj);
        }
      }
      ens.gram(u, v) = ens.gram(v, u) = s / k;
    }
  }
  return ens;
}

VarianceFunctionals variance_functionals(const ConditionedVectors& cond,
                                         const std::vector<Edge>& edges) {
  VarianceFunctionals out;
  double total = 0.0;
  for (const Edge& e : edges) {
    const auto a = centered_labels(cond, e.u);
    const auto b = centered_labels(cond, e.v);
    double cov = 0.0, var = 0.0;
    for (const DenseVector& ai : a) {
      for (const DenseVector& bj : b) cov += std::fabs(ai.dot(bj));
    }
    // Endpoint of a random edge: each side with probability one half.
    for (const DenseVector& ai : a) var += 0.5 * ai.squaredNorm();
    for (const DenseVector& bj : b) var += 0.5 * bj.squaredNorm();
    out.eps += e.w * cov;
    out.delta += e.w * var;
    total += e.w;
  }
  if (total > 0.0) {
    out.eps /= total;
    out.delta /= total;
  }
  return out;
}

int stage_cap(int k, double eps, double c) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps must lie in (0, 1)");
  }
  return static_cast<int>(std::ceil(c * k * k / (eps * eps)));
}

StageState initial_stage(const LabelVectors& x, const LabelModel& model,
                         const std::vector<Edge>& edges, double eps,
                         double cap_constant) {
  StageState s;
  s.cap = stage_cap(model.k, eps, cap_constant);
  const ConditionedVectors cond = condition(x, model, {});
  const VarianceFunctionals vf = variance_functionals(cond, edges);
  s.eps = vf.eps;
  s.delta = vf.delta;
  return s;
}

StageStep csp_stage(const StageState& state, const LabelVectors& x,
                    const LabelModel& model,
                    const std::vector<Edge>& edges, int count,
                    double eps, Rng& rng, const Tolerances& tol) {
  if (state.eps <= eps) return StageDone{state.f};
  if (state.stage >= state.cap) {
    throw Error(ErrorCode::kStageCapExceeded,
                "eps_f = " + std::to_string(state.eps) + " still above " +
                    std::to_string(eps) + " after " +
                    std::to_string(state.stage) + " stages");
  }
  const ConditionedVectors cond = condition(x, model, state.f, tol);
  const ColumnEnsemble full = csp_embedding(cond, model.vertices);

  // Only unlabeled vertices are candidates.
  std::vector<int> keep;
  for (int u = 0; u < model.vertices; ++u) {
    if (!state.f.count(u)) keep.push_back(u);
  }
  if (keep.empty()) return StageDone{state.f};
  ColumnEnsemble ens;
  ens.ids = keep;
  ens.gram.resize(static_cast<int>(keep.size()), static_cast<int>(keep.size()));
  for (size_t a = 0; a < keep.size(); ++a) {
    for (size_t b = 0; b < keep.size(); ++b) {
      ens.gram(static_cast<int>(a), static_cast<int>(b)) = full.gram(keep[a], keep[b]);
    }
  }
  const VolumeSample pick = volume_sample(
      ens, std::min(count, static_cast<int>(keep.size())), rng);
  const SeedSet stage_seeds = normalize_seeds(pick.ids);

  // Candidate labelings of the new seeds with their conditional weights.
  std::vector<Labeling> candidates;
  const double space = std::pow(double(model.k), double(stage_seeds.size()));
  if (space <= 1e6) {
    candidates = all_labelings(stage_seeds, model.k);
  } else {
    for (int draw = 0; draw < 1000; ++draw) {
      Labeling g;
      for (int u : stage_seeds) {
        double r = uniform01(rng);
        const ConditionedVectors step = condition(x, model, [&] {
          Labeling m;
          merge_labelings(state.f, g, m);
          return m;
        }(), tol);
        int label = model.k - 1;
        for (int i = 0; i < model.k; ++i) {
          const double p = step.probability(Labeling{{u, i}});
          if (r < p) {
            label = i;
            break;
          }
          r -= p;
        }
        g[u] = label;
      }
      candidates.push_back(g);
    }
  }
  std::vector<double> weight, delta;
  std::vector<Labeling> merged;
  double mass = 0.0, mean = 0.0;
  for (const Labeling& g : candidates) {
    const double p = cond.probability(g);
    if (std::sqrt(std::max(p, 0.0)) * cond.event_norm() <= tol.zero_event) continue;
    Labeling fg;
    merge_labelings(state.f, g, fg);
    const ConditionedVectors next = condition(x, model, fg, tol);
    const double d = variance_functionals(next, edges).delta;
    weight.push_back(p);
    delta.push_back(d);
    merged.push_back(fg);
    mass += p;
    mean += p * d;
  }
  if (merged.empty()) {
    throw Error(ErrorCode::kZeroConditioning,
                "every labeling of the stage seeds has zero probability");
  }
  mean /= mass;
  size_t chosen = 0;
  for (size_t c = 0; c < merged.size(); ++c) {
    if (delta[c] <= mean + 1e-12) {
      chosen = c;
      break;
    }
  }
  StageState next;
  next.f = merged[chosen];
  next.stage = state.stage + 1;
  next.cap = state.cap;
  next.delta_history = state.delta_history;
  const ConditionedVectors nc = condition(x, model, next.f, tol);
  const VarianceFunctionals vf = variance_functionals(nc, edges);
  next.eps = vf.eps;
  next.delta = vf.delta;
  next.delta_history.push_back(vf.delta);
  return next;
}

StageDone run_csp_stages(const LabelVectors& x, const LabelModel& model,
                         const std::vector<Edge>& edges, int count,
                         double eps, Rng& rng, StageState* final_state,
                         double cap_constant) {
  StageState state = initial_stage(x, model, edges, eps, cap_constant);
  state.delta_history.push_back(state.delta);
  while (true) {
    StageStep step = csp_stage(state, x, model, edges, count, eps, rng);
    if (auto* done = std::get_if<StageDone>(&step)) {
      if (final_state) *final_state = state;
      return *done;
    }
    state = std::get<StageState>(std::move(step));
  }
}

LasserreSeedSelector qip_selector(const LabelModel& model, int count,
                                  std::uint64_t rng_seed) {
  return [model, count, rng_seed](const SeedSet& seeds, const PseudoMoments& y,
                                  const LocalRelaxation& rel, int level) {
    // The oracle accepted the base block with slack tol.psd; allow a little
    // more here so that eigensolver round-off cannot reject the same matrix.
    Tolerances tol = default_tolerances();
    tol.psd *= 10.0;
    const LabelVectors x = cholesky_vectors(y, rel.base_rows(), tol);
    Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(level), seeds));
    return seed_qip(seeds, x, model, count, rng, tol).seeds;
  };
}

LasserreSeedSelector color_selector(const LabelModel& model, int count,
                                    std::uint64_t rng_seed) {
  return [model, count, rng_seed](const SeedSet& seeds, const PseudoMoments& y,
                                  const LocalRelaxation& rel, int level) {
    Tolerances tol = default_tolerances();
    tol.psd *= 10.0;
    const LabelVectors x = cholesky_vectors(y, rel.base_rows(), tol);
    Rng rng(derive_seed(rng_seed, static_cast<std::uint64_t>(level), seeds));
    SeedSet out = seeds;
    for (int u : seed_color(x, model, count, rng).seeds) out.push_back(u);
    return normalize_seeds(out);
  };
}

}  // namespace locsdp
