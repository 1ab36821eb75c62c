#include "locsdp/problems.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "locsdp/errors.hpp"
#include "locsdp/seeding.hpp"

namespace locsdp {

namespace {

constexpr int kMaxCutBits = 20;
constexpr double kMaxLabelings = 1e6;

void require_bits(int n) {
  if (n > kMaxCutBits) {
    throw Error(ErrorCode::kTooLarge,
                "brute force limited to 2^" + std::to_string(kMaxCutBits) +
                    " assignments, instance has 2^" + std::to_string(n));
  }
}

void require_labelings(int n, int k) {
  if (std::pow(double(k), double(n)) > kMaxLabelings) {
    throw Error(ErrorCode::kTooLarge,
                "brute force limited to 10^6 labelings, instance has " +
                    std::to_string(k) + "^" + std::to_string(n));
  }
}

Assignment side_of(Subset mask, int n) {
  Assignment a(static_cast<size_t>(n));
  for (int u = 0; u < n; ++u) a[static_cast<size_t>(u)] = subset_contains(mask, u) ? 1 : 0;
  return a;
}

// Calls fn(labels) for every labeling in [k]^n, lexicographic order.
template <class Fn>
void for_each_labeling(int n, int k, Fn&& fn) {
  Assignment a(static_cast<size_t>(n), 0);
  while (true) {
    fn(a);
    int i = n - 1;
    while (i >= 0 && a[static_cast<size_t>(i)] == k - 1) {
      a[static_cast<size_t>(i)] = 0;
      --i;
    }
    if (i < 0) return;
    ++a[static_cast<size_t>(i)];
  }
}

// Adds coef * [u has label a][v has label b] to p.
void add_pair_event(Polynomial& p, const LabelModel& m, int u, int a, int v,
                    int b, double coef) {
  if (m.encoding == Encoding::kIndicator) {
    p.add(singleton(m.variable(u, a)) | singleton(m.variable(v, b)), coef);
    return;
  }
  // Binary: [x = 1] = x, [x = 0] = 1 - x.
  const Subset su = singleton(u), sv = singleton(v);
  const double cu = a == 1 ? 1.0 : -1.0, cv = b == 1 ? 1.0 : -1.0;
  const double ku = a == 1 ? 0.0 : 1.0, kv = b == 1 ? 0.0 : 1.0;
  p.add(0, coef * ku * kv);
  p.add(su, coef * cu * kv);
  p.add(sv, coef * ku * cv);
  p.add(su | sv, coef * cu * cv);
}

}  // namespace

Subset encode_assignment(const LabelModel& model, const Assignment& labels) {
  Subset ones = 0;
  for (int u = 0; u < model.vertices; ++u) {
    const int label = labels[static_cast<size_t>(u)];
    if (model.encoding == Encoding::kBinary) {
      if (label == 1) ones |= singleton(u);
    } else {
      ones |= singleton(model.variable(u, label));
    }
  }
  return ones;
}

PolynomialProgram maxcut_program(const Graph& g, int rounds) {
  PolynomialProgram p;
  p.n = g.n();
  p.degree = 2;
  p.rounds = rounds;
  for (const Edge& e : g.edges()) {
    p.objective.add(singleton(e.u), -e.w);
    p.objective.add(singleton(e.v), -e.w);
    p.objective.add(singleton(e.u) | singleton(e.v), 2.0 * e.w);
  }
  return p;
}

PolynomialProgram minbisection_program(const Graph& g, double slack,
                                       int rounds) {
  PolynomialProgram p = maxcut_program(g, rounds);
  Polynomial cut;
  for (const auto& [s, c] : p.objective.terms()) cut.add(s, -c);
  p.objective = cut;
  Polynomial above, below;
  const double half = 0.5 * g.n();
  above.add(0, slack - half);
  below.add(0, slack + half);
  for (int u = 0; u < g.n(); ++u) {
    above.add(singleton(u), 1.0);
    below.add(singleton(u), -1.0);
  }
  p.constraints = {above, below};
  return p;
}

PolynomialProgram independent_set_program(const Graph& g, double slack,
                                          int rounds) {
  PolynomialProgram p;
  p.n = g.n();
  p.degree = 2;
  p.rounds = rounds;
  for (int u = 0; u < g.n(); ++u) p.objective.add(singleton(u), -1.0);
  for (const Edge& e : g.edges()) {
    Polynomial c;
    c.add(0, slack);
    c.add(singleton(e.u) | singleton(e.v), -1.0);
    p.constraints.push_back(c);
  }
  return p;
}

PolynomialProgram coloring_program(const Graph& g, int k, double slack,
                                   int rounds) {
  const LabelModel m = LabelModel::indicator(g.n(), k);
  PolynomialProgram p;
  p.n = m.variables();
  p.degree = 2;
  p.rounds = rounds;
  for (int u = 0; u < g.n(); ++u) {
    Polynomial above, below;
    above.add(0, slack - 1.0);
    below.add(0, slack + 1.0);
    for (int i = 0; i < k; ++i) {
      above.add(singleton(m.variable(u, i)), 1.0);
      below.add(singleton(m.variable(u, i)), -1.0);
    }
    p.constraints.push_back(above);
    p.constraints.push_back(below);
  }
  for (const Edge& e : g.edges()) {
    for (int i = 0; i < k; ++i) {
      Polynomial c;
      c.add(0, slack);
      c.add(singleton(m.variable(e.u, i)) | singleton(m.variable(e.v, i)), -1.0);
      p.constraints.push_back(c);
    }
  }
  return p;
}

LabelModel CspInstance::model() const {
  return k == 2 ? LabelModel::binary(n) : LabelModel::indicator(n, k);
}

double CspInstance::satisfied_fraction(const Assignment& labels) const {
  double sat = 0.0, total = 0.0;
  for (const CspConstraint& c : constraints) {
    total += c.weight;
    const std::pair<int, int> got{labels[static_cast<size_t>(c.u)],
                                  labels[static_cast<size_t>(c.v)]};
    for (const auto& a : c.allowed) {
      if (a == got) {
        sat += c.weight;
        break;
      }
    }
  }
  return total > 0.0 ? sat / total : 1.0;
}

std::vector<Edge> CspInstance::constraint_graph() const {
  std::vector<Edge> out;
  for (const CspConstraint& c : constraints) out.push_back({c.u, c.v, c.weight});
  return out;
}

CspInstance equality_csp(const Graph& g, int k, bool equal) {
  CspInstance csp;
  csp.n = g.n();
  csp.k = k;
  for (const Edge& e : g.edges()) {
    CspConstraint c{e.u, e.v, e.w, {}};
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        if ((a == b) == equal) c.allowed.emplace_back(a, b);
      }
    }
    csp.constraints.push_back(c);
  }
  return csp;
}

PolynomialProgram csp_program(const CspInstance& csp, double slack, int rounds) {
  const LabelModel m = csp.model();
  PolynomialProgram p;
  p.n = m.variables();
  p.degree = 2;
  p.rounds = rounds;
  for (const CspConstraint& c : csp.constraints) {
    for (const auto& [a, b] : c.allowed) {
      add_pair_event(p.objective, m, c.u, a, c.v, b, -c.weight);
    }
  }
  if (m.encoding == Encoding::kIndicator) {
    for (int u = 0; u < csp.n; ++u) {
      Polynomial above, below;
      above.add(0, slack - 1.0);
      below.add(0, slack + 1.0);
      for (int i = 0; i < csp.k; ++i) {
        above.add(singleton(m.variable(u, i)), 1.0);
        below.add(singleton(m.variable(u, i)), -1.0);
      }
      p.constraints.push_back(above);
      p.constraints.push_back(below);
    }
  }
  return p;
}

double cut_value(const Graph& g, const Assignment& side) {
  double v = 0.0;
  for (const Edge& e : g.edges()) {
    if (side[static_cast<size_t>(e.u)] != side[static_cast<size_t>(e.v)]) v += e.w;
  }
  return v;
}

int side_size(const Assignment& side) {
  int s = 0;
  for (int x : side) s += x == 1 ? 1 : 0;
  return s;
}

int monochromatic_edges(const Graph& g, const Assignment& colors) {
  int bad = 0;
  for (const Edge& e : g.edges()) {
    const int a = colors[static_cast<size_t>(e.u)], b = colors[static_cast<size_t>(e.v)];
    if (a >= 0 && a == b) ++bad;
  }
  return bad;
}

int uncolored_count(const Assignment& colors) {
  int c = 0;
  for (int x : colors) c += x < 0 ? 1 : 0;
  return c;
}

bool is_independent(const Graph& g, const Assignment& chosen) {
  for (const Edge& e : g.edges()) {
    if (chosen[static_cast<size_t>(e.u)] == 1 && chosen[static_cast<size_t>(e.v)] == 1) {
      return false;
    }
  }
  return true;
}

BruteForce brute_force_maxcut(const Graph& g) {
  require_bits(g.n());
  BruteForce best{-1.0, {}};
  for (Subset mask = 0; mask < (Subset{1} << g.n()); ++mask) {
    const Assignment a = side_of(mask, g.n());
    const double v = cut_value(g, a);
    if (v > best.value) best = {v, a};
  }
  return best;
}

BruteForce brute_force_minbisection(const Graph& g) {
  require_bits(g.n());
  const int lo = g.n() / 2, hi = (g.n() + 1) / 2;
  BruteForce best{std::numeric_limits<double>::infinity(), {}};
  for (Subset mask = 0; mask < (Subset{1} << g.n()); ++mask) {
    const int s = subset_size(mask);
    if (s != lo && s != hi) continue;
    const Assignment a = side_of(mask, g.n());
    const double v = cut_value(g, a);
    if (v < best.value) best = {v, a};
  }
  return best;
}

BruteForce brute_force_independent_set(const Graph& g) {
  require_bits(g.n());
  BruteForce best{-1.0, {}};
  for (Subset mask = 0; mask < (Subset{1} << g.n()); ++mask) {
    const Assignment a = side_of(mask, g.n());
    if (!is_independent(g, a)) continue;
    const double v = subset_size(mask);
    if (v > best.value) best = {v, a};
  }
  return best;
}

BruteForce brute_force_coloring(const Graph& g, int k) {
  require_labelings(g.n(), k);
  BruteForce best{std::numeric_limits<double>::infinity(), {}};
  for_each_labeling(g.n(), k, [&](const Assignment& a) {
    const double v = monochromatic_edges(g, a);
    if (v < best.value) best = {v, a};
  });
  return best;
}

BruteForce brute_force_csp(const CspInstance& csp) {
  require_labelings(csp.n, csp.k);
  BruteForce best{-1.0, {}};
  for_each_labeling(csp.n, csp.k, [&](const Assignment& a) {
    const double v = csp.satisfied_fraction(a);
    if (v > best.value) best = {v, a};
  });
  return best;
}

std::optional<BruteForce> brute_force_program(const PolynomialProgram& p) {
  p.validate();
  require_bits(p.n);
  std::optional<BruteForce> best;
  for (Subset mask = 0; mask < (Subset{1} << p.n); ++mask) {
    bool ok = true;
    for (const Polynomial& c : p.constraints) {
      if (c.evaluate(mask) < 0.0) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    const double v = p.objective.evaluate(mask);
    if (!best || v < best->value) best = BruteForce{v, side_of(mask, p.n)};
  }
  return best;
}

std::vector<Assignment> proper_colorings(const Graph& g, int k) {
  require_labelings(g.n(), k);
  std::vector<Assignment> out;
  for_each_labeling(g.n(), k, [&](const Assignment& a) {
    if (monochromatic_edges(g, a) == 0) out.push_back(a);
  });
  return out;
}

Mode parse_mode(const std::string& name) {
  if (name == "maxcut") return Mode::kMaxCut;
  if (name == "minbisection") return Mode::kMinBisection;
  if (name == "independent-set") return Mode::kIndependentSet;
  if (name == "coloring") return Mode::kColoring;
  if (name == "2csp") return Mode::kCsp;
  if (name == "raw-polynomial") return Mode::kRawPolynomial;
  throw Error(ErrorCode::kInvalidArgument, "unknown mode '" + name + "'");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::kMaxCut: return "maxcut";
    case Mode::kMinBisection: return "minbisection";
    case Mode::kIndependentSet: return "independent-set";
    case Mode::kColoring: return "coloring";
    case Mode::kCsp: return "2csp";
    case Mode::kRawPolynomial: return "raw-polynomial";
  }
  return "unknown";
}

LabelModel Instance::model() const {
  switch (mode) {
    case Mode::kColoring: return LabelModel::indicator(graph.n(), k);
    case Mode::kCsp: return csp.model();
    case Mode::kRawPolynomial: return LabelModel::binary(raw.n);
    default: return LabelModel::binary(graph.n());
  }
}

PolynomialProgram Instance::program(int rounds) const {
  switch (mode) {
    case Mode::kMaxCut: return maxcut_program(graph, rounds);
    case Mode::kMinBisection: return minbisection_program(graph, slack, rounds);
    case Mode::kIndependentSet:
      return independent_set_program(graph, slack, rounds);
    case Mode::kColoring: return coloring_program(graph, k, slack, rounds);
    case Mode::kCsp: return csp_program(csp, slack, rounds);
    case Mode::kRawPolynomial: {
      PolynomialProgram p = raw;
      p.rounds = rounds;
      return p;
    }
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mode");
}

int Instance::vertices() const { return model().vertices; }

std::vector<std::pair<Subset, double>> uniform_atoms(
    const LabelModel& model, const std::vector<Assignment>& labelings) {
  if (labelings.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no labelings to average");
  }
  std::vector<std::pair<Subset, double>> atoms;
  const double p = 1.0 / static_cast<double>(labelings.size());
  for (const Assignment& a : labelings) {
    atoms.emplace_back(encode_assignment(model, a), p);
  }
  return atoms;
}

}  // namespace locsdp
