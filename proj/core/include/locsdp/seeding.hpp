#pragma once

#include <cstdint>
#include <random>
#include <variant>
#include <vector>

#include "locsdp/conditioning.hpp"
#include "locsdp/geometry.hpp"
#include "locsdp/graph.hpp"
#include "locsdp/solver.hpp"

namespace locsdp {

using Rng = std::mt19937_64;

// Mixes a base seed with call-site context into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          std::uint64_t b = 0);
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                          const SeedSet& seeds);

// Columns known only through their Gram matrix.
struct ColumnEnsemble {
  std::vector<int> ids;
  DenseMatrix gram;

  static ColumnEnsemble from_columns(std::vector<int> ids,
                                     const DenseMatrix& columns);
  int size() const { return static_cast<int>(ids.size()); }
};

struct VolumeSample {
  std::vector<int> ids;  // selected ids, in selection order
  bool padded = false;   // rank fell short and norm-order padding was used
};

// Draws a subset of size `count` with probability proportional to the
// determinant of its Gram minor. With `greedy` set, returns the deterministic
// greedy max-volume subset instead.
VolumeSample volume_sample(const ColumnEnsemble& cols, int count, Rng& rng,
                           bool greedy = false);

// Binary partitioning seeds: volume-samples `count` vertices from the columns
// Pi_S^perp x_u(1), where Pi_S projects onto the span of the x_S(f).
struct SeedChoice {
  SeedSet seeds;
  bool padded = false;
};
SeedChoice seed_qip(const SeedSet& current, const LabelVectors& x,
                    const LabelModel& model, int count, Rng& rng,
                    const Tolerances& tol = default_tolerances());

// Coloring seeds: columns X_u = sum_i e_i (x) perp x_u(i).
ColumnEnsemble coloring_embedding(const LabelVectors& x, const LabelModel& model);
SeedChoice seed_color(const LabelVectors& x, const LabelModel& model, int count,
                      Rng& rng);

// Sparsest-cut seeds: columns sqrt(w_uv) (x_u - x_v) over demand pairs; the
// union of endpoints of the chosen pairs. Throws NoDemand without demand.
struct DemandPair {
  int u;
  int v;
  double weight;
};
SeedChoice seed_sparsest_cut(const LabelVectors& x, const LabelModel& model,
                             const std::vector<DemandPair>& demand, int count,
                             Rng& rng);

// Gram matrix of the embedded vectors X_u(f), computed through
// <a (x) a, b (x) b> = <a, b>^2.
ColumnEnsemble csp_embedding(const ConditionedVectors& cond, int vertices);

// (eps_f, delta_f): mean absolute edge covariance mass and mean total
// variance.
struct VarianceFunctionals {
  double eps = 0.0;
  double delta = 0.0;
};
VarianceFunctionals variance_functionals(const ConditionedVectors& cond,
                                         const std::vector<Edge>& edges);

struct StageState {
  Labeling f;
  double eps = 0.0;
  double delta = 0.0;
  int stage = 0;
  int cap = 0;
  std::vector<double> delta_history;  // initial delta, then one per committed stage
};

struct StageDone {
  Labeling f;
};

using StageStep = std::variant<StageState, StageDone>;

// Stage cap ceil(c * k^2 / eps^2).
int stage_cap(int k, double eps, double c = 8.0);

StageState initial_stage(const LabelVectors& x, const LabelModel& model,
                         const std::vector<Edge>& edges, double eps,
                         double cap_constant = 8.0);

// One seed-selection stage. Done when eps_f <= eps; otherwise embeds,
// volume-samples `count` vertices and commits the first labeling whose delta
// is at most the conditional average. Throws StageCapExceeded past the cap.
StageStep csp_stage(const StageState& state, const LabelVectors& x,
                    const LabelModel& model,
                    const std::vector<Edge>& edges, int count,
                    double eps, Rng& rng,
                    const Tolerances& tol = default_tolerances());

// Runs csp_stage until done.
StageDone run_csp_stages(const LabelVectors& x, const LabelModel& model,
                         const std::vector<Edge>& edges, int count,
                         double eps, Rng& rng, StageState* final_state = nullptr,
                         double cap_constant = 8.0);

// Seed selector for the binary partitioning family: factorizes the base
// moment block and calls seed_qip with a stream derived from (rng_seed,
// level, seeds).
LasserreSeedSelector qip_selector(const LabelModel& model, int count,
                                  std::uint64_t rng_seed);

// Seed selector for indicator encodings: volume-samples through the
// coloring embedding and adds the result to the current seeds.
LasserreSeedSelector color_selector(const LabelModel& model, int count,
                                    std::uint64_t rng_seed);

}  // namespace locsdp
