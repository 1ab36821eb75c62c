#include "locsdp/experiment.hpp"

#include <chrono>
#include <cmath>
#include <memory>
#include <mutex>
#include <set>

#include "json.hpp"
#include "locsdp/errors.hpp"
#include "locsdp/seeding.hpp"

namespace locsdp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SolveOptions options_for(const ProblemSpec& spec) {
  SolveOptions o;
  if (spec.time_limit > 0.0) {
    o.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                    std::chrono::duration<double>(spec.time_limit));
  }
  return o;
}

bool is_binary(const ProblemSpec& spec) {
  return spec.instance.model().encoding == Encoding::kBinary;
}

}  // namespace

void ProblemSpec::validate() const {
  auto bad = [](const std::string& what) {
    throw Error(ErrorCode::kInvalidArgument, what);
  };
  if (rounds < 1) bad("rounds must be at least 1");
  if (seed_size < 1) bad("seed size must be at least 1");
  if (stages < 0) bad("stages must be non-negative");
  if (!(eps > 0.0)) bad("eps must be positive");
  if (!(eps0 > 0.0 && eps0 < 1.0)) bad("eps0 must lie in (0, 1)");
  if (repeats < 1) bad("repeats must be at least 1");
  if (time_limit < 0.0) bad("time limit must be non-negative");
  if (!(resolution > 0.0)) bad("resolution must be positive");
  const Instance& in = instance;
  switch (in.mode) {
    case Mode::kColoring:
      if (in.k < 2) bad("coloring needs k >= 2");
      [[fallthrough]];
    case Mode::kMaxCut:
    case Mode::kMinBisection:
    case Mode::kIndependentSet:
      if (in.graph.n() < 1) bad("mode requires a graph");
      break;
    case Mode::kCsp:
      if (in.csp.n < 1) bad("2csp requires an instance");
      break;
    case Mode::kRawPolynomial:
      in.raw.validate();
      break;
  }
  if (in.model().variables() > 64) bad("more than 64 program variables");
}

ProblemFamily full_level_problem(const PolynomialProgram& program,
                                 std::optional<double> bound,
                                 const Tolerances& tol) {
  auto rel = std::make_shared<const LocalRelaxation>(
      program, full_level_family(program.n, program.rounds), bound, tol);
  ProblemFamily family;
  family.growth = 0;
  family.half_width = 1.0;
  family.coordinates = [rel](const SeedSet&) {
    return rel->coordinates().family();
  };
  family.feasible = [rel](const SeedSet&, const DenseVector& y) {
    return rel->separate(y);
  };
  family.seed = [](const SeedSet& s, const DenseVector&, int) { return s; };
  return family;
}

ProblemFamily local_problem(const ProblemSpec& spec,
                            std::optional<double> bound) {
  const LabelModel model = spec.instance.model();
  const PolynomialProgram program = spec.instance.program(spec.rounds);
  LasserreSeedSelector selector =
      is_binary(spec) ? qip_selector(model, spec.seed_size, spec.rng_seed)
                      : color_selector(model, spec.seed_size, spec.rng_seed);
  return lasserre_family(program, model, bound, std::move(selector),
                         spec.seed_size, spec.tol);
}

void check_ellipsoid_memory(long dim, double max_bytes) {
  const double need = double(dim) * double(dim) * sizeof(double);
  if (need > max_bytes) {
    throw Error(ErrorCode::kTooLarge,
                "ellipsoid over " + std::to_string(dim) + " coordinates needs " +
                    std::to_string(need / (1024.0 * 1024.0)) + " MiB");
  }
}

double objective_scale(const PolynomialProgram& program) {
  double s = 0.0;
  for (const auto& [set, c] : program.objective.terms()) s += std::fabs(c);
  return s;
}

BisectionResult bisect_objective(const BoundedSolve& solve, double lower,
                                 double upper, double resolution,
                                 int max_iterations) {
  BisectionResult out;
  out.lower = lower;
  out.upper = upper;
  // A probe that runs out of time proves nothing; treat it like an
  // infeasibility assertion so the search moves up, never down.
  const auto probe = [&](double q) -> std::optional<Transcript> {
    ++out.iterations;
    try {
      SolveResult r = solve(q);
      if (std::holds_alternative<Transcript>(r)) return std::get<Transcript>(std::move(r));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kBudgetExhausted) throw;
      ++out.budget_stops;
    }
    return std::nullopt;
  };
  std::optional<Transcript> top = probe(upper);
  if (!top) return out;
  out.feasible = true;
  out.transcript = std::move(*top);
  while (out.upper - out.lower > resolution && out.iterations < max_iterations) {
    const double mid = 0.5 * (out.lower + out.upper);
    if (std::optional<Transcript> t = probe(mid)) {
      out.upper = mid;
      out.transcript = std::move(*t);
    } else {
      out.lower = mid;
    }
  }
  return out;
}

BisectionResult full_level_value(const PolynomialProgram& program, double eps0,
                                 const SolveOptions& options,
                                 double resolution) {
  const long dim =
      static_cast<long>(count_subsets_up_to(program.n, 2 * program.rounds)) - 1;
  check_ellipsoid_memory(dim);
  const double scale = objective_scale(program);
  return bisect_objective(
      [&](double q) {
        return fast_solve(full_level_problem(program, q), 0, eps0, options);
      },
      -scale - 1.0, scale + 1.0, resolution);
}

RunResult run_experiment(const ProblemSpec& spec) {
  spec.validate();
  RunResult out;
  out.spec = spec;
  const Instance& instance = spec.instance;
  const LabelModel model = instance.model();
  const PolynomialProgram program = instance.program(spec.rounds);

  const auto solve_start = Clock::now();
  const BoundedSolve solve = [&](double q) {
    return fast_solve(local_problem(spec, q), spec.stages, spec.eps0,
                      options_for(spec));
  };
  if (spec.fixed_bound) {
    out.bisection =
        bisect_objective(solve, *spec.fixed_bound, *spec.fixed_bound, 1.0, 1);
  } else {
    const double scale = objective_scale(program);
    out.bisection =
        bisect_objective(solve, -scale - 1.0, scale + 1.0, spec.resolution);
  }
  out.solve_seconds = seconds_since(solve_start);
  if (!out.bisection.feasible) {
    if (out.bisection.budget_stops > 0) {
      throw Error(ErrorCode::kBudgetExhausted,
                  "deadline reached before any bound was certified feasible");
    }
    throw Error(ErrorCode::kInvalidArgument,
                "relaxation infeasible at every bound in range");
  }
  const Transcript& t = out.bisection.transcript;
  out.level_calls = t.level_calls;
  out.touched = static_cast<long>(t.touched.size());
  out.replay = replay_check(t, local_problem(spec, out.bisection.upper), spec.tol);

  const auto round_start = Clock::now();
  Tolerances tol = spec.tol;
  tol.psd *= 10.0;
  const RoundingInput in = rounding_input(t, model, tol);
  bool have = false;
  for (int rep = 0; rep < spec.repeats; ++rep) {
    const std::uint64_t seed =
        derive_seed(spec.rng_seed, 0x726f756eULL, static_cast<std::uint64_t>(rep));
    Rounded r = instance.mode == Mode::kColoring
                    ? threshold_color(in.x, in.model, in.seeds, seed)
                    : propagation_round(in.x, in.model, in.seeds, seed);
    QualityReport q = evaluate(r.labels, instance);
    if (!have || better(q, out.report, instance)) {
      out.best = std::move(r);
      out.report = std::move(q);
      have = true;
    }
  }
  out.round_seconds = seconds_since(round_start);
  return out;
}

std::string run_result_to_json(const RunResult& r, bool include_timing) {
  using nlohmann::ordered_json;
  ordered_json doc;
  doc["schema"] = "locsdp.run/1";
  const ProblemSpec& s = r.spec;
  ordered_json config;
  config["mode"] = mode_name(s.instance.mode);
  config["graph"] = s.graph_path;
  config["k"] = s.instance.k;
  config["rounds"] = s.rounds;
  config["seed_size"] = s.seed_size;
  config["stages"] = s.stages;
  config["eps"] = s.eps;
  config["eps0"] = s.eps0;
  config["rng_seed"] = s.rng_seed;
  config["repeats"] = s.repeats;
  config["resolution"] = s.resolution;
  config["time_limit"] = s.time_limit;
  doc["config"] = config;

  ordered_json bis;
  bis["lower"] = r.bisection.lower;
  bis["upper"] = r.bisection.upper;
  bis["iterations"] = r.bisection.iterations;
  bis["budget_stops"] = r.bisection.budget_stops;
  doc["bisection"] = bis;

  ordered_json tr;
  const Transcript& t = r.bisection.transcript;
  ordered_json seeds = ordered_json::array();
  for (const TranscriptLevel& lv : t.levels) {
    ordered_json level = ordered_json::array();
    for (int u : lv.seeds) level.push_back(u + 1);
    seeds.push_back(level);
  }
  tr["seeds"] = seeds;
  tr["level_calls"] = r.level_calls;
  tr["touched"] = r.touched;
  tr["outer_iterations"] = t.outer_iterations;
  tr["max_support_leak"] = t.max_support_leak;
  tr["replay_ok"] = r.replay.ok;
  tr["replay_failures"] = r.replay.failures;
  doc["transcript"] = tr;

  ordered_json asg;
  ordered_json labels = ordered_json::array();
  for (int l : r.best.labels) {
    if (l < 0) labels.push_back(nullptr);
    else labels.push_back(l);
  }
  asg["labels"] = labels;
  ordered_json event = ordered_json::object();
  for (const auto& [u, l] : r.best.event) event[std::to_string(u + 1)] = l;
  asg["event"] = event;
  asg["rng_seed"] = r.best.rng_seed;
  doc["assignment"] = asg;
  doc["quality"] = ordered_json::parse(report_to_json(r.report));
  if (include_timing) {
    doc["timing"] = {{"solve_seconds", r.solve_seconds},
                     {"round_seconds", r.round_seconds}};
  }
  return doc.dump(2);
}

LocalityReport measure_locality(const ProblemSpec& spec, int fallback_rounds,
                                double full_time_limit) {
  spec.validate();
  LocalityReport rep;
  const PolynomialProgram program = spec.instance.program(spec.rounds);
  const double bound = spec.fixed_bound.value_or(objective_scale(program) + 1.0);

  // Record every seed set whose closure the fast path asked for.
  ProblemFamily fast = local_problem(spec, bound);
  auto visited = std::make_shared<std::set<SeedSet>>();
  auto inner = fast.coordinates;
  fast.coordinates = [inner, visited](const SeedSet& s) {
    visited->insert(s);
    return inner(s);
  };
  const auto fast_start = Clock::now();
  const SolveResult res = fast_solve(fast, spec.stages, spec.eps0, options_for(spec));
  rep.fast_seconds = seconds_since(fast_start);
  if (!std::holds_alternative<Transcript>(res)) {
    throw Error(ErrorCode::kInvalidArgument,
                "fast path infeasible at the locality bound");
  }
  const Transcript& t = std::get<Transcript>(res);
  rep.fast_touched = static_cast<long>(t.touched.size());
  rep.local_count = static_cast<long>(t.levels.back().coords.size()) + 1;
  std::set<Subset> closure;
  for (const SeedSet& s : *visited) {
    for (Subset c : inner(s)) closure.insert(c);
  }
  for (Subset c : t.touched) {
    if (!closure.count(c)) rep.within_closures = false;
  }

  const int n = program.n;
  rep.full_count = static_cast<long>(count_subsets_up_to(n, 2 * spec.rounds));
  PolynomialProgram timed = program;
  rep.full_rounds_timed = spec.rounds;
  try {
    check_ellipsoid_memory(rep.full_count - 1);
  } catch (const Error&) {
    rep.full_status = "too-large";
    timed.rounds = fallback_rounds;
    rep.full_rounds_timed = fallback_rounds;
    check_ellipsoid_memory(
        static_cast<long>(count_subsets_up_to(n, 2 * fallback_rounds)) - 1);
  }
  SolveOptions opts;
  opts.deadline = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(full_time_limit));
  const auto full_start = Clock::now();
  std::string status = "solved";
  try {
    fast_solve(full_level_problem(timed, bound, spec.tol), 0, spec.eps0, opts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kBudgetExhausted) throw;
    status = "deadline";
  }
  rep.full_seconds = seconds_since(full_start);
  rep.full_status = rep.full_status.empty() ? status : rep.full_status + "+" + status;
  return rep;
}

}  // namespace locsdp
