// Command line front end: one subcommand per harness operation.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "locsdp/errors.hpp"
#include "locsdp/experiment.hpp"
#include "locsdp/lasserre.hpp"
#include "locsdp/problems.hpp"
#include "locsdp/rounding.hpp"
#include "locsdp/solver.hpp"

namespace {

using namespace locsdp;
using nlohmann::ordered_json;

struct Flags {
  std::string mode = "maxcut";
  std::string graph;
  std::string builtin;
  std::string program;
  std::string relation = "different";
  int k = 2;
  int rounds = 1;
  int seed_size = 1;
  int stages = 1;
  double eps = 0.5;
  double eps0 = 1e-4;
  double slack = 0.0;
  double psd = 1e-8;
  double zero = 1e-9;
  std::uint64_t rng_seed = 1;
  int repeats = 100;
  double bound = 0.0;
  bool has_bound = false;
  double time_limit = 0.0;
  double resolution = 1e-3;
  bool timing = false;
  std::string out;
  std::string transcript;
  int fallback_rounds = 2;
  double full_limit = 60.0;
  bool full = false;
};

void add_spec_flags(CLI::App* app, Flags& f) {
  app->add_option("--mode", f.mode,
                  "maxcut | minbisection | independent-set | coloring | 2csp | "
                  "raw-polynomial");
  app->add_option("--graph", f.graph, "edge-list file, 1-based 'u v [w]'");
  app->add_option("--builtin", f.builtin,
                  "generated graph: cycle:N, path:N, complete:N, bipartite:A:B, "
                  "prism:M, petersen");
  app->add_option("--program", f.program, "polynomial program file");
  app->add_option("--relation", f.relation, "2csp edge relation: equal | different");
  app->add_option("--k", f.k, "number of labels");
  app->add_option("--rounds", f.rounds, "hierarchy round r");
  app->add_option("--seed-size", f.seed_size, "vertices added per stage (r')");
  app->add_option("--stages", f.stages, "recursion depth (l)");
  app->add_option("--eps", f.eps, "stage target for the 2csp pipeline");
  app->add_option("--eps0", f.eps0, "certificate slack");
  app->add_option("--slack", f.slack, "constraint slack for balance / one-hot rows");
  app->add_option("--tau-psd", f.psd, "PSD tolerance");
  app->add_option("--tau-zero", f.zero, "zero-event tolerance");
  app->add_option("--rng-seed", f.rng_seed, "base RNG seed");
  app->add_option("--repeats", f.repeats, "rounding repetitions (best-of-R)");
  app->add_option("--time-limit", f.time_limit, "seconds per solve, 0 = none");
  app->add_option("--resolution", f.resolution, "bisection stopping width");
  app->add_option("--out", f.out, "output file (stdout when empty)");
  app->add_option_function<double>(
      "--bound",
      [&f](double v) {
        f.bound = v;
        f.has_bound = true;
      },
      "fixed objective bound q (skips bisection)");
}

Graph load_graph(const Flags& f) {
  if (!f.graph.empty() && !f.builtin.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "give --graph or --builtin, not both");
  }
  if (!f.graph.empty()) return ingest_graph(f.graph);
  if (!f.builtin.empty()) return named_graph(f.builtin);
  return Graph(0);
}

ProblemSpec make_spec(const Flags& f) {
  ProblemSpec s;
  s.instance.mode = parse_mode(f.mode);
  s.instance.k = f.k;
  s.instance.slack = f.slack;
  if (s.instance.mode == Mode::kRawPolynomial) {
    if (f.program.empty()) {
      throw Error(ErrorCode::kInvalidArgument, "raw-polynomial needs --program");
    }
    s.instance.raw = load_program(f.program);
  } else {
    s.instance.graph = load_graph(f);
    s.graph_path = f.graph.empty() ? f.builtin : f.graph;
  }
  if (s.instance.mode == Mode::kCsp) {
    if (f.relation != "equal" && f.relation != "different") {
      throw Error(ErrorCode::kInvalidArgument, "relation must be equal or different");
    }
    s.instance.csp = equality_csp(s.instance.graph, f.k, f.relation == "equal");
  }
  s.rounds = f.rounds;
  s.seed_size = f.seed_size;
  s.stages = f.stages;
  s.eps = f.eps;
  s.eps0 = f.eps0;
  s.rng_seed = f.rng_seed;
  s.repeats = f.repeats;
  s.tol.psd = f.psd;
  s.tol.zero_event = f.zero;
  s.time_limit = f.time_limit;
  s.resolution = f.resolution;
  if (f.has_bound) s.fixed_bound = f.bound;
  s.validate();
  return s;
}

void emit(const Flags& f, const std::string& text) {
  if (f.out.empty()) {
    std::cout << text << '\n';
    return;
  }
  std::ofstream o(f.out);
  if (!o) throw Error(ErrorCode::kParse, "cannot write " + f.out);
  o << text << '\n';
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kParse, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ordered_json assignment_json(const Assignment& a) {
  ordered_json out = ordered_json::array();
  for (int l : a) {
    if (l < 0) out.push_back(nullptr);
    else out.push_back(l);
  }
  return out;
}

void cmd_build_relaxation(const Flags& f) {
  const ProblemSpec spec = make_spec(f);
  const PolynomialProgram program = spec.instance.program(spec.rounds);
  const LabelModel model = spec.instance.model();
  const std::vector<Subset> seeds = f.full
                                        ? full_level_family(program.n, program.rounds)
                                        : seed_family(model, {});
  const LocalRelaxation rel(program, seeds, std::nullopt, spec.tol);
  ordered_json doc;
  doc["schema"] = "locsdp.relaxation/1";
  doc["level"] = f.full ? "full" : "root";
  doc["variables"] = program.n;
  doc["coordinates"] = rel.dim();
  doc["base_rows"] = rel.base_rows().size();
  doc["constraint_rows"] = rel.constraint_rows().size();
  doc["constraints"] = program.constraints.size();
  doc["blocks"] = rel.block_count();
  doc["full_count"] = count_subsets_up_to(program.n, 2 * program.rounds);
  doc["program"] = format_program(program);
  emit(f, doc.dump(2));
}

void cmd_solve(const Flags& f) {
  const ProblemSpec spec = make_spec(f);
  const RunResult r = run_experiment(spec);
  emit(f, run_result_to_json(r, f.timing));
  if (!f.transcript.empty()) {
    ordered_json doc;
    doc["schema"] = "locsdp.solve/1";
    doc["bound"] = r.bisection.upper;
    doc["transcript"] = ordered_json::parse(transcript_to_json(r.bisection.transcript));
    std::ofstream o(f.transcript);
    if (!o) throw Error(ErrorCode::kParse, "cannot write " + f.transcript);
    o << doc.dump(2) << '\n';
  }
}

struct LoadedTranscript {
  double bound;
  Transcript transcript;
};

LoadedTranscript load_transcript(const std::string& path) {
  const ordered_json doc = ordered_json::parse(read_file(path));
  if (doc.value("schema", "") != "locsdp.solve/1") {
    throw Error(ErrorCode::kParse, path + ": expected a locsdp.solve/1 document");
  }
  return {doc.at("bound").get<double>(),
          transcript_from_json(doc.at("transcript").dump())};
}

void cmd_round(const Flags& f) {
  const ProblemSpec spec = make_spec(f);
  const LoadedTranscript lt = load_transcript(f.transcript);
  Tolerances tol = spec.tol;
  tol.psd *= 10.0;
  const RoundingInput in = rounding_input(lt.transcript, spec.instance.model(), tol);
  Rounded best;
  QualityReport best_q;
  for (int rep = 0; rep < spec.repeats; ++rep) {
    const std::uint64_t seed = derive_seed(spec.rng_seed, 0x726f756eULL,
                                           static_cast<std::uint64_t>(rep));
    Rounded r = spec.instance.mode == Mode::kColoring
                    ? threshold_color(in.x, in.model, in.seeds, seed)
                    : propagation_round(in.x, in.model, in.seeds, seed);
    QualityReport q = evaluate(r.labels, spec.instance);
    if (rep == 0 || better(q, best_q, spec.instance)) {
      best = r;
      best_q = q;
    }
  }
  ordered_json doc;
  doc["schema"] = "locsdp.round/1";
  doc["repeats"] = spec.repeats;
  doc["labels"] = assignment_json(best.labels);
  doc["rng_seed"] = best.rng_seed;
  doc["quality"] = ordered_json::parse(report_to_json(best_q));
  emit(f, doc.dump(2));
}

void cmd_bruteforce(const Flags& f) {
  const ProblemSpec spec = make_spec(f);
  const Instance& in = spec.instance;
  BruteForce b;
  switch (in.mode) {
    case Mode::kMaxCut: b = brute_force_maxcut(in.graph); break;
    case Mode::kMinBisection: b = brute_force_minbisection(in.graph); break;
    case Mode::kIndependentSet: b = brute_force_independent_set(in.graph); break;
    case Mode::kColoring: b = brute_force_coloring(in.graph, in.k); break;
    case Mode::kCsp: b = brute_force_csp(in.csp); break;
    case Mode::kRawPolynomial: {
      const auto r = brute_force_program(in.raw);
      if (!r) throw Error(ErrorCode::kInvalidArgument, "program has no feasible point");
      b = *r;
      break;
    }
  }
  ordered_json doc;
  doc["schema"] = "locsdp.bruteforce/1";
  doc["mode"] = mode_name(in.mode);
  doc["optimum"] = b.value;
  doc["witness"] = assignment_json(b.witness);
  emit(f, doc.dump(2));
}

int cmd_check(const Flags& f) {
  const ProblemSpec spec = make_spec(f);
  const LoadedTranscript lt = load_transcript(f.transcript);
  const ReplayReport r =
      replay_check(lt.transcript, local_problem(spec, lt.bound), spec.tol);
  ordered_json doc;
  doc["schema"] = "locsdp.check/1";
  doc["ok"] = r.ok;
  doc["failures"] = r.failures;
  doc["worst_restriction"] = r.worst_restriction;
  emit(f, doc.dump(2));
  return r.ok ? 0 : 1;
}

void cmd_bench(const Flags& f) {
  const ProblemSpec spec = make_spec(f);
  const LocalityReport r = measure_locality(spec, f.fallback_rounds, f.full_limit);
  std::ostringstream csv;
  csv << "mode,n,rounds,stages,seed_size,fast_touched,local_count,full_count,"
         "within_closures,fast_seconds,full_rounds_timed,full_seconds,full_status\n";
  csv << mode_name(spec.instance.mode) << ',' << spec.instance.program(1).n << ','
      << spec.rounds << ',' << spec.stages << ',' << spec.seed_size << ','
      << r.fast_touched << ',' << r.local_count << ',' << r.full_count << ','
      << (r.within_closures ? "yes" : "no") << ',' << r.fast_seconds << ','
      << r.full_rounds_timed << ',' << r.full_seconds << ',' << r.full_status;
  emit(f, csv.str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local-certificate Lasserre solver"};
  app.require_subcommand(1);
  Flags f;

  auto* build = app.add_subcommand("build-relaxation", "describe the relaxation");
  add_spec_flags(build, f);
  build->add_flag("--full", f.full, "full level-r relaxation instead of the root");

  auto* solve = app.add_subcommand("solve", "bisect, solve, replay, round, evaluate");
  add_spec_flags(solve, f);
  solve->add_option("--transcript-out", f.transcript, "write the transcript here");
  solve->add_flag("--timing", f.timing, "include wall-clock timing in the output");

  auto* round = app.add_subcommand("round", "round a stored transcript");
  add_spec_flags(round, f);
  round->add_option("--transcript", f.transcript, "transcript file")->required();

  auto* brute = app.add_subcommand("bruteforce", "exhaustive optimum");
  add_spec_flags(brute, f);

  auto* check = app.add_subcommand("check", "replay a stored transcript");
  add_spec_flags(check, f);
  check->add_option("--transcript", f.transcript, "transcript file")->required();

  auto* bench = app.add_subcommand("bench", "locality counters and timing (CSV)");
  add_spec_flags(bench, f);
  bench->add_option("--fallback-rounds", f.fallback_rounds,
                    "round of the timed full-level solve when the requested one "
                    "is too large");
  bench->add_option("--full-limit", f.full_limit, "seconds for the full-level solve");

  CLI11_PARSE(app, argc, argv);
  try {
    if (build->parsed()) cmd_build_relaxation(f);
    if (solve->parsed()) cmd_solve(f);
    if (round->parsed()) cmd_round(f);
    if (brute->parsed()) cmd_bruteforce(f);
    if (check->parsed()) return cmd_check(f);
    if (bench->parsed()) cmd_bench(f);
  } catch (const Error& e) {
    std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
