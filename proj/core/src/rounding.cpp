#include "locsdp/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "json.hpp"
#include "locsdp/errors.hpp"
#include "locsdp/lasserre.hpp"

namespace locsdp {

namespace {

constexpr int kEvaluateCutLimit = 18;
constexpr double kEvaluateLabelLimit = 1e6;

constexpr double kThresholdMargin = 64.0 * std::numeric_limits<double>::epsilon();

int draw(const std::vector<double>& weights, Rng& rng) {
  std::vector<double> w(weights.size());
  for (size_t i = 0; i < w.size(); ++i) w[i] = std::max(weights[i], 0.0);
  double total = 0.0;
  for (double v : w) total += v;
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kZeroConditioning, "all outcomes have zero mass");
  }
  std::discrete_distribution<int> pick(w.begin(), w.end());
  return pick(rng);
}

Graph csp_graph(const CspInstance& csp) {
  Graph g(csp.n);
  for (const Edge& e : csp.constraint_graph()) {
    if (e.u != e.v) g.add_edge(e.u, e.v, e.w);
  }
  return g;
}

}  // namespace

RoundingInput rounding_input(const Transcript& transcript,
                             const LabelModel& model, const Tolerances& tol) {
  if (transcript.levels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty transcript");
  }
  const int n = model.variables();
  const SeedSet& seeds = transcript.levels.back().seeds;
  const PseudoMoments y = transcript.final_moments(n);
  const std::vector<Subset> rows = base_rows_of(seed_family(model, seeds), n);
  return {cholesky_vectors(y, rows, tol), model, seeds};
}

Labeling sample_event(const LabelVectors& x, const LabelModel& model,
                      const SeedSet& seeds, Rng& rng) {
  const std::vector<Labeling> events = all_labelings(seeds, model.k);
  std::vector<double> mass(events.size());
  for (size_t j = 0; j < events.size(); ++j) {
    mass[j] = label_vectors(x, model, events[j]).squaredNorm();
  }
  return events[static_cast<size_t>(draw(mass, rng))];
}

std::vector<double> label_marginals(const ConditionedVectors& cond, int u) {
  const LabelModel& model = cond.model();
  std::vector<double> p(static_cast<size_t>(model.k));
  for (int i = 0; i < model.k; ++i) {
    try {
      p[static_cast<size_t>(i)] = cond.probability({{u, i}});
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kMissingMoment) throw;
      const auto it = cond.event().find(u);
      if (it != cond.event().end()) {
        p[static_cast<size_t>(i)] = it->second == i ? 1.0 : 0.0;
        continue;
      }
      Subset ones = 0, zeros = 0;
      for (const auto& [v, label] : cond.event()) {
        const auto [o, z] = model.event(v, label);
        ones |= o;
        zeros |= z;
      }
      ones |= singleton(model.variable(u, i));
      const DenseVector v = label_vectors(cond.vectors(), ones, zeros);
      p[static_cast<size_t>(i)] =
          v.squaredNorm() / (cond.event_norm() * cond.event_norm());
    }
  }
  return p;
}

Assignment csp_round(const LabelVectors& x, const LabelModel& model,
                     const Labeling& f, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  const ConditionedVectors cond = condition(x, model, f);
  Assignment labels(static_cast<size_t>(model.vertices));
  for (int u = 0; u < model.vertices; ++u) {
    labels[static_cast<size_t>(u)] = draw(label_marginals(cond, u), rng);
  }
  return labels;
}

Rounded propagation_round(const LabelVectors& x, const LabelModel& model,
                          const SeedSet& seeds, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  Rounded out;
  out.rng_seed = rng_seed;
  out.event = sample_event(x, model, seeds, rng);
  // Fresh stream for the per-vertex draws so they do not depend on how many
  // numbers the event draw consumed.
  out.labels = csp_round(x, model, out.event, derive_seed(rng_seed, 1));
  return out;
}

Rounded threshold_color(const LabelVectors& x, const LabelModel& model,
                        const SeedSet& seeds, std::uint64_t rng_seed) {
  Rng rng(rng_seed);
  Rounded out;
  out.rng_seed = rng_seed;
  out.event = sample_event(x, model, seeds, rng);
  const ConditionedVectors cond = condition(x, model, out.event);
  out.labels.assign(static_cast<size_t>(model.vertices), -1);
  for (int u = 0; u < model.vertices; ++u) {
    const std::vector<double> p = label_marginals(cond, u);
    for (int i = 0; i < model.k; ++i) {
      // At most one label can exceed 1/2 when the marginals sum to one. The
      // margin keeps exact ties uncolored despite round-off in the norms.
      if (p[static_cast<size_t>(i)] > 0.5 + kThresholdMargin) {
        out.labels[static_cast<size_t>(u)] = i;
        break;
      }
    }
  }
  return out;
}

QualityReport evaluate(const Assignment& labels, const Instance& instance) {
  QualityReport r;
  r.mode = instance.mode;
  const Graph& g = instance.graph;
  const int expected = instance.mode == Mode::kRawPolynomial
                           ? instance.raw.n
                           : instance.vertices();
  if (static_cast<int>(labels.size()) != expected) {
    throw Error(ErrorCode::kDimensionMismatch,
                "assignment has " + std::to_string(labels.size()) +
                    " labels, instance needs " + std::to_string(expected));
  }
  auto attach_spectrum = [&r](const Graph& graph) {
    const Spectrum s = laplacian_spectrum(graph);
    r.spectrum = s.values;
    r.isolated_vertices = s.isolated;
  };
  auto omit = [&r](const std::string& why) { r.optimum_note = why; };
  const bool cut_small = g.n() <= kEvaluateCutLimit;

  switch (instance.mode) {
    case Mode::kMaxCut:
      r.value = cut_value(g, labels);
      attach_spectrum(g);
      if (cut_small) r.optimum = brute_force_maxcut(g).value;
      else omit("n > 18");
      break;
    case Mode::kMinBisection:
      r.value = cut_value(g, labels);
      r.side = side_size(labels);
      attach_spectrum(g);
      if (cut_small) r.optimum = brute_force_minbisection(g).value;
      else omit("n > 18");
      break;
    case Mode::kIndependentSet:
      r.value = side_size(labels);
      r.legal = is_independent(g, labels);
      attach_spectrum(g);
      if (cut_small) r.optimum = brute_force_independent_set(g).value;
      else omit("n > 18");
      break;
    case Mode::kColoring:
      r.value = monochromatic_edges(g, labels);
      r.uncolored = uncolored_count(labels);
      r.legal = r.value == 0.0;
      attach_spectrum(g);
      if (std::pow(double(instance.k), double(g.n())) <= kEvaluateLabelLimit) {
        r.optimum = brute_force_coloring(g, instance.k).value;
      } else {
        omit("k^n > 10^6");
      }
      break;
    case Mode::kCsp:
      r.value = instance.csp.satisfied_fraction(labels);
      attach_spectrum(csp_graph(instance.csp));
      if (std::pow(double(instance.csp.k), double(instance.csp.n)) <=
          kEvaluateLabelLimit) {
        r.optimum = brute_force_csp(instance.csp).value;
      } else {
        omit("k^n > 10^6");
      }
      break;
    case Mode::kRawPolynomial: {
      Subset ones = 0;
      for (int u = 0; u < instance.raw.n; ++u) {
        if (labels[static_cast<size_t>(u)] == 1) ones |= singleton(u);
      }
      r.value = instance.raw.objective.evaluate(ones);
      for (const Polynomial& c : instance.raw.constraints) {
        if (c.evaluate(ones) < 0.0) r.legal = false;
      }
      if (instance.raw.n <= kEvaluateCutLimit) {
        const auto best = brute_force_program(instance.raw);
        if (best) r.optimum = best->value;
        else omit("no feasible 0/1 point");
      } else {
        omit("n > 18");
      }
      break;
    }
  }
  return r;
}

bool better(const QualityReport& a, const QualityReport& b,
            const Instance& instance) {
  if (a.legal != b.legal) return a.legal;
  switch (instance.mode) {
    case Mode::kMaxCut:
    case Mode::kIndependentSet:
    case Mode::kCsp:
      return a.value > b.value;
    case Mode::kMinBisection: {
      const int n = instance.graph.n();
      auto balanced = [n](int side) { return side == n / 2 || side == (n + 1) / 2; };
      if (balanced(a.side) != balanced(b.side)) return balanced(a.side);
      return a.value < b.value;
    }
    case Mode::kColoring:
      if (a.uncolored != b.uncolored) return a.uncolored < b.uncolored;
      return a.value < b.value;
    case Mode::kRawPolynomial:
      return a.value < b.value;
  }
  return false;
}

std::string report_to_json(const QualityReport& r) {
  nlohmann::ordered_json doc;
  doc["mode"] = mode_name(r.mode);
  doc["value"] = r.value;
  if (r.optimum) doc["optimum"] = *r.optimum;
  else doc["optimum"] = nullptr;
  if (!r.optimum_note.empty()) doc["optimum_note"] = r.optimum_note;
  doc["legal"] = r.legal;
  if (r.mode == Mode::kMinBisection) doc["side"] = r.side;
  if (r.mode == Mode::kColoring) doc["uncolored"] = r.uncolored;
  doc["spectrum"] = r.spectrum;
  doc["isolated_vertices"] = r.isolated_vertices;
  return doc.dump(2);
}

}  // namespace locsdp
