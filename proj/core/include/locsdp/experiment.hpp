#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "locsdp/problems.hpp"
#include "locsdp/rounding.hpp"
#include "locsdp/solver.hpp"

namespace locsdp {

struct ProblemSpec {
  Instance instance;
  std::string graph_path;  // echoed only
  int rounds = 1;          // hierarchy round r of the full-level relaxation
  int seed_size = 1;       // vertices added per stage (r')
  int stages = 1;          // recursion depth (l)
  double eps = 0.5;        // CSP stage target
  double eps0 = 1e-4;
  std::uint64_t rng_seed = 1;
  int repeats = 100;
  Tolerances tol;
  // Skip the bisection and solve at this objective bound.
  std::optional<double> fixed_bound;
  // Wall-clock cap per fast_solve call, in seconds; 0 means none.
  double time_limit = 0.0;
  // Bisection stops once upper - lower is at most this.
  double resolution = 1e-3;

  // Throws InvalidArgument naming the first bad field.
  void validate() const;
};

// Full-level relaxation: every seed set maps to the family of all subsets of
// size below `rounds`.
ProblemFamily full_level_problem(const PolynomialProgram& program,
                                 std::optional<double> bound,
                                 const Tolerances& tol = default_tolerances());

// Local relaxation family for the mode of `spec` with its seed selector.
ProblemFamily local_problem(const ProblemSpec& spec,
                            std::optional<double> bound);

// Throws TooLarge when an ellipsoid over `dim` coordinates would need more
// than `max_bytes` for its shape factor.
void check_ellipsoid_memory(long dim, double max_bytes = 512.0 * 1024 * 1024);

// Smallest objective bound q (to `resolution`) for which `solve(q)` is
// feasible, searched in [lower, upper].
struct BisectionResult {
  bool feasible = false;  // some q in range was feasible
  double lower = 0.0;     // largest q asserted infeasible
  double upper = 0.0;     // smallest q found feasible
  int iterations = 0;
  // Probes stopped by their deadline. Each counts as not certified feasible,
  // so `lower` is then no longer an infeasibility claim.
  int budget_stops = 0;
  Transcript transcript;  // transcript at `upper`
};

using BoundedSolve = std::function<SolveResult(double q)>;

BisectionResult bisect_objective(const BoundedSolve& solve, double lower,
                                 double upper, double resolution = 1e-3,
                                 int max_iterations = 30);

// Sum of |coefficients|, a bound on |<Q, y>| for moments in [-1, 1].
double objective_scale(const PolynomialProgram& program);

// Relaxation value of the full level-`rounds` relaxation by bisection.
BisectionResult full_level_value(const PolynomialProgram& program, double eps0,
                                 const SolveOptions& options = {},
                                 double resolution = 1e-3);

struct RunResult {
  ProblemSpec spec;
  BisectionResult bisection;
  ReplayReport replay;
  Rounded best;
  QualityReport report;
  std::vector<long> level_calls;
  long touched = 0;
  // Wall-clock seconds per phase; excluded from the JSON unless requested.
  double solve_seconds = 0.0;
  double round_seconds = 0.0;
};

// Bisects q (or uses fixed_bound), runs fast_solve, replays the transcript,
// rounds best-of-`repeats` and evaluates.
RunResult run_experiment(const ProblemSpec& spec);

std::string run_result_to_json(const RunResult& r, bool include_timing = false);

// Counts for the locality comparison on one spec.
struct LocalityReport {
  long fast_touched = 0;
  long full_count = 0;          // |[n]_{<= 2r}|
  long local_count = 0;         // |ex(S(l), 2)| at the committed seeds
  bool within_closures = true;  // every touched coordinate lies in some closure
  double fast_seconds = 0.0;
  double full_seconds = 0.0;
  std::string full_status;      // "solved", "deadline", or "too-large"
  int full_rounds_timed = 0;    // round of the full-level solve that was timed
};

// Runs fast_solve at `spec.fixed_bound` (or the trivial upper bound) and a
// full-level solve for timing. The full count refers to spec.rounds; when
// that relaxation exceeds the memory guard, the timed solve drops to
// `fallback_rounds`, stopped after `full_time_limit` seconds.
LocalityReport measure_locality(const ProblemSpec& spec, int fallback_rounds,
                                double full_time_limit);

}  // namespace locsdp
