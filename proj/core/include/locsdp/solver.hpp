#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "locsdp/certify.hpp"
#include "locsdp/conditioning.hpp"
#include "locsdp/ellipsoid.hpp"
#include "locsdp/lasserre.hpp"
#include "locsdp/subsets.hpp"

namespace locsdp {

// Sorted, duplicate-free vertex list.
using SeedSet = std::vector<int>;

SeedSet normalize_seeds(SeedSet s);

// Abstract local problem: coordinates of the projection attached to a seed
// set, a feasibility oracle over those coordinates and a seed selector. The
// selector may read only the coordinates of its own seed set and must be a
// deterministic function of (seeds, y, level).
struct ProblemFamily {
  std::function<std::vector<Subset>(const SeedSet&)> coordinates;
  std::function<SeparationResponse(const SeedSet&, const DenseVector&)> feasible;
  std::function<SeedSet(const SeedSet&, const DenseVector&, int level)> seed;
  // Upper bound on |SEED(S)| - |S|.
  int growth = 1;
  double half_width = 1.0;
};

// Seed selector over label vectors of the local relaxation. Receives the
// current seeds, the moments restricted to them and the recursion level.
using LasserreSeedSelector = std::function<SeedSet(
    const SeedSet&, const PseudoMoments&, const LocalRelaxation&, int level)>;

// Family of local relaxations of `program`. Seed vertex set V maps to the
// seed family of all subsets of the program variables of V under `model`.
// Relaxations are built lazily and cached; the cache is shared by copies.
ProblemFamily lasserre_family(const PolynomialProgram& program,
                              const LabelModel& model,
                              std::optional<double> objective_bound,
                              LasserreSeedSelector selector, int growth,
                              const Tolerances& tol = default_tolerances());

// Variable family induced by vertex seeds.
std::vector<Subset> seed_family(const LabelModel& model, const SeedSet& seeds);

struct TranscriptLevel {
  SeedSet seeds;
  std::vector<Subset> coords;
  DenseVector y;
  long oracle_calls = 0;  // feasibility queries answered at this level
};

struct Transcript {
  std::vector<TranscriptLevel> levels;  // levels[i] holds S(i) and y(i)
  DenseVector y_star;                   // equals levels.back().y
  std::set<Subset> touched;             // every coordinate ever materialized
  std::vector<long> level_calls;        // recursive_sep calls per level
  double max_support_leak = 0.0;        // max ||(proj S(i))^perp c|| forwarded
  long outer_iterations = 0;

  PseudoMoments final_moments(int n) const;
};

struct InfeasibleAssertion {
  long iterations = 0;
  double final_log_volume = 0.0;
};

using SolveResult = std::variant<Transcript, InfeasibleAssertion>;

struct SolveOptions {
  CertifyOptions certify;
  // Outer run stops once the ellipsoid is smaller than a ball of radius
  // eps0 (natural-log volume target computed from it).
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

// Nested-certificate solver. Level i works over coordinates(S(i)); level
// boundaries are crossed with certify_e.
SolveResult fast_solve(const ProblemFamily& problem, int stages, double eps0,
                       const SolveOptions& options = {});

// One call of the recursive separation oracle, exposed for tests. `sink`
// receives the transcript when the call reaches the deepest level.
class RecursiveSeparator {
 public:
  RecursiveSeparator(const ProblemFamily& problem, int stages, double eps0,
                     SolveOptions options);

  SeparationResponse separate(int level, const SeedSet& seeds,
                              const DenseVector& y);
  OracleHandle oracle(int level, const SeedSet& seeds,
                      const std::vector<Subset>& coords);
  Transcript& transcript() { return transcript_; }
  bool committed() const { return committed_; }

 private:
  const ProblemFamily& problem_;
  int stages_;
  double eps0_;
  SolveOptions options_;
  Transcript transcript_;
  std::vector<TranscriptLevel> path_;
  bool committed_ = false;
};

struct ReplayReport {
  bool ok = true;
  std::vector<std::string> failures;
  double worst_min_eigenvalue = 0.0;
  double worst_restriction = 0.0;
};

// Checks that every y(i) passes FEASIBLE at S(i), that SEED replays S(i+1)
// from y(i) and that consecutive levels agree on shared coordinates.
ReplayReport replay_check(const Transcript& transcript,
                          const ProblemFamily& problem,
                          const Tolerances& tol = default_tolerances());

// JSON document with levels (seed members 1-based, coordinate/value pairs).
std::string transcript_to_json(const Transcript& transcript);
Transcript transcript_from_json(const std::string& text);

}  // namespace locsdp
