#pragma once

#include <optional>
#include <string>
#include <vector>

#include "locsdp/conditioning.hpp"
#include "locsdp/graph.hpp"
#include "locsdp/lasserre.hpp"

namespace locsdp {

// Label vector of a full assignment: labels[u] in [0, k), -1 for unlabeled.
using Assignment = std::vector<int>;

// 0/1 point of the program variables encoding a full labeling.
Subset encode_assignment(const LabelModel& model, const Assignment& labels);

// Objectives are stated for minimization; maximization problems negate.
PolynomialProgram maxcut_program(const Graph& g, int rounds = 1);
// Balance |sum_u x_u - n/2| <= slack as two degree-1 constraints.
PolynomialProgram minbisection_program(const Graph& g, double slack,
                                       int rounds = 1);
// x_u x_v <= slack for every edge; minimizes -sum_u x_u.
PolynomialProgram independent_set_program(const Graph& g, double slack,
                                          int rounds = 1);
// Indicator encoding; |sum_i x_{u,i} - 1| <= slack per vertex and
// x_{u,i} x_{v,i} <= slack per edge and color. Zero objective.
PolynomialProgram coloring_program(const Graph& g, int k, double slack,
                                   int rounds = 1);

// 2-CSP: each constraint lists the allowed label pairs of (u, v).
struct CspConstraint {
  int u;
  int v;
  double weight = 1.0;
  std::vector<std::pair<int, int>> allowed;
};

struct CspInstance {
  int n = 0;
  int k = 2;
  std::vector<CspConstraint> constraints;

  LabelModel model() const;
  // Weighted fraction of satisfied constraints.
  double satisfied_fraction(const Assignment& labels) const;
  std::vector<Edge> constraint_graph() const;
};

// Equal-label (or different-label) constraints on every edge of g.
CspInstance equality_csp(const Graph& g, int k, bool equal = true);
// Minimizes minus the satisfied weight; k = 2 uses the binary encoding,
// larger k the indicator encoding with one-hot constraints of width `slack`.
PolynomialProgram csp_program(const CspInstance& csp, double slack = 0.0,
                              int rounds = 1);

// Value of a labeling under each problem's native objective.
double cut_value(const Graph& g, const Assignment& side);
// Number of vertices with label 1.
int side_size(const Assignment& side);
int monochromatic_edges(const Graph& g, const Assignment& colors);
int uncolored_count(const Assignment& colors);
bool is_independent(const Graph& g, const Assignment& chosen);

struct BruteForce {
  double value = 0.0;
  Assignment witness;
};

// Exhaustive optima. Refuse with TooLarge beyond 2^20 (cut modes) or
// k^n > 10^6 (labelings).
BruteForce brute_force_maxcut(const Graph& g);
// Balanced: side sizes floor(n/2) or ceil(n/2).
BruteForce brute_force_minbisection(const Graph& g);
BruteForce brute_force_independent_set(const Graph& g);
// Fewest monochromatic edges over all k-colorings.
BruteForce brute_force_coloring(const Graph& g, int k);
BruteForce brute_force_csp(const CspInstance& csp);
// min Q(x) over feasible 0/1 points; nullopt when infeasible.
std::optional<BruteForce> brute_force_program(const PolynomialProgram& p);

// All proper k-colorings (labels per vertex); refuses beyond k^n > 10^6.
std::vector<Assignment> proper_colorings(const Graph& g, int k);

enum class Mode {
  kMaxCut,
  kMinBisection,
  kIndependentSet,
  kColoring,
  kCsp,
  kRawPolynomial
};

// Accepts "maxcut", "minbisection", "independent-set", "coloring", "2csp",
// "raw-polynomial"; throws InvalidArgument otherwise.
Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);

// A concrete instance of one mode. `csp` is used by kCsp only, `raw` by
// kRawPolynomial only.
struct Instance {
  Mode mode = Mode::kMaxCut;
  Graph graph{0};
  int k = 2;
  double slack = 0.0;
  CspInstance csp;
  PolynomialProgram raw;

  LabelModel model() const;
  PolynomialProgram program(int rounds) const;
  // Vertices of the label model.
  int vertices() const;
};

// Uniform distribution over the given labelings as atoms of 0/1 points.
std::vector<std::pair<Subset, double>> uniform_atoms(
    const LabelModel& model, const std::vector<Assignment>& labelings);

}  // namespace locsdp
