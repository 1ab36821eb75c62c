#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "locsdp/conditioning.hpp"
#include "locsdp/graph.hpp"
#include "locsdp/problems.hpp"
#include "locsdp/seeding.hpp"
#include "locsdp/solver.hpp"

namespace locsdp {

// Label vectors read from the deepest level of a transcript, with the seed
// vertices they were selected for.
struct RoundingInput {
  LabelVectors x;
  LabelModel model;
  SeedSet seeds;
};

// Factorizes the base block of the final seed family from y_star.
RoundingInput rounding_input(const Transcript& transcript,
                             const LabelModel& model,
                             const Tolerances& tol = default_tolerances());

struct Rounded {
  Assignment labels;          // -1 marks an uncolored vertex
  Labeling event;             // sampled labeling of the seeds
  std::uint64_t rng_seed = 0;
};

// Samples f on `seeds` with probability ||x_S(f)||^2 (renormalized against
// round-off). Only events of positive probability are drawn.
Labeling sample_event(const LabelVectors& x, const LabelModel& model,
                      const SeedSet& seeds, Rng& rng);

// ||x_{u|f}(i)||^2 for i in [k]. When x lacks the coordinates of the full
// one-hot event (indicator encoding on a partial family), the positive event
// "x_{u,i} = 1" is used instead.
std::vector<double> label_marginals(const ConditionedVectors& cond, int u);

// Independent per-vertex labels from conditional marginals given `f`.
Assignment csp_round(const LabelVectors& x, const LabelModel& model,
                     const Labeling& f, std::uint64_t rng_seed);

// Samples f on the seeds, then labels every vertex independently.
Rounded propagation_round(const LabelVectors& x, const LabelModel& model,
                          const SeedSet& seeds, std::uint64_t rng_seed);

// Samples f, then colors u with the unique i whose conditional mass exceeds
// 1/2 (strictly); otherwise u stays uncolored (-1).
Rounded threshold_color(const LabelVectors& x, const LabelModel& model,
                        const SeedSet& seeds, std::uint64_t rng_seed);

struct QualityReport {
  Mode mode = Mode::kMaxCut;
  double value = 0.0;               // native objective of the assignment
  std::optional<double> optimum;    // exhaustive optimum when small enough
  std::string optimum_note;         // reason the optimum is missing
  std::vector<double> spectrum;     // normalized-Laplacian eigenvalues
  bool isolated_vertices = false;
  bool legal = true;                // coloring / independence legality
  int side = 0;                     // bisection: vertices labeled 1
  int uncolored = 0;
};

// Objective per mode: cut weight (maxcut, minbisection), set size
// (independent set), monochromatic edges among colored vertices (coloring),
// satisfied fraction (2csp) and Q(x) (raw).
QualityReport evaluate(const Assignment& labels, const Instance& instance);

// True when `a` beats `b` for the instance's objective direction. Illegal
// colorings and sets never beat legal ones; for bisection, balanced beats
// unbalanced.
bool better(const QualityReport& a, const QualityReport& b,
            const Instance& instance);

std::string report_to_json(const QualityReport& r);

}  // namespace locsdp
