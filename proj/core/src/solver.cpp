#include "locsdp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "json.hpp"
#include "locsdp/errors.hpp"

namespace locsdp {

SeedSet normalize_seeds(SeedSet s) {
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

std::vector<Subset> seed_family(const LabelModel& model, const SeedSet& seeds) {
  Subset vars = 0;
  for (int u : seeds) vars |= model.block(u);
  return all_subsets_of(vars);
}

namespace {

struct RelaxationCache {
  PolynomialProgram program;
  LabelModel model;
  std::optional<double> bound;
  Tolerances tol;
  std::mutex mu;
  std::map<SeedSet, std::shared_ptr<const LocalRelaxation>> built;

  std::shared_ptr<const LocalRelaxation> get(const SeedSet& seeds) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = built.find(seeds);
    if (it != built.end()) return it->second;
    auto rel = std::make_shared<const LocalRelaxation>(
        program, seed_family(model, seeds), bound, tol);
    built.emplace(seeds, rel);
    return rel;
  }
};

}  // namespace

ProblemFamily lasserre_family(const PolynomialProgram& program,
                              const LabelModel& model,
                              std::optional<double> objective_bound,
                              LasserreSeedSelector selector, int growth,
                              const Tolerances& tol) {
  if (model.variables() != program.n) {
    throw Error(ErrorCode::kDimensionMismatch,
                "label model has " + std::to_string(model.variables()) +
                    " variables, program has " + std::to_string(program.n));
  }
  auto cache = std::make_shared<RelaxationCache>();
  cache->program = program;
  cache->model = model;
  cache->bound = objective_bound;
  cache->tol = tol;

  ProblemFamily family;
  family.growth = growth;
  family.half_width = 1.0;
  family.coordinates = [cache](const SeedSet& s) {
    return cache->get(s)->coordinates().family();
  };
  family.feasible = [cache](const SeedSet& s, const DenseVector& y) {
    return cache->get(s)->separate(y);
  };
  family.seed = [cache, selector](const SeedSet& s, const DenseVector& y,
                                  int level) {
    const auto rel = cache->get(s);
    const PseudoMoments moments =
        PseudoMoments::from_coordinates(rel->n(), rel->coordinates(), y);
    return selector(s, moments, *rel, level);
  };
  return family;
}

PseudoMoments Transcript::final_moments(int n) const {
  if (levels.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty transcript");
  }
  return PseudoMoments::from_coordinates(n, SubsetIndexer(levels.back().coords),
                                         y_star);
}

RecursiveSeparator::RecursiveSeparator(const ProblemFamily& problem, int stages,
                                       double eps0, SolveOptions options)
    : problem_(problem),
      stages_(stages),
      eps0_(eps0),
      options_(std::move(options)) {
  if (stages_ < 0) {
    throw Error(ErrorCode::kInvalidArgument, "stage count must be >= 0");
  }
  if (!(eps0_ > 0.0 && eps0_ < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "eps0 must lie in (0, 1)");
  }
  path_.resize(static_cast<size_t>(stages_) + 1);
  transcript_.level_calls.assign(static_cast<size_t>(stages_) + 1, 0);
  if (options_.deadline) options_.certify.ccut.deadline = options_.deadline;
}

OracleHandle RecursiveSeparator::oracle(int level, const SeedSet& seeds,
                                        const std::vector<Subset>& coords) {
  for (Subset s : coords) transcript_.touched.insert(s);
  OracleHandle h;
  h.dim = static_cast<int>(coords.size());
  h.half_width = problem_.half_width;
  h.query = [this, level, seeds, coords](const DenseVector& y, double) {
    path_[static_cast<size_t>(level)].coords = coords;
    return separate(level, seeds, y);
  };
  return h;
}

SeparationResponse RecursiveSeparator::separate(int level, const SeedSet& seeds,
                                                const DenseVector& y) {
  auto& slot = path_[static_cast<size_t>(level)];
  ++transcript_.level_calls[static_cast<size_t>(level)];
  SeparationResponse first;
  try {
    first = problem_.feasible(seeds, y);
  } catch (const Error& e) {
    throw e.level() < 0 ? e.at_level(level) : e;
  }
  if (!is_feasible(first)) return first;
  ++slot.oracle_calls;
  slot.seeds = seeds;
  slot.y = y;

  if (level >= stages_) {
    transcript_.levels = path_;
    transcript_.y_star = y;
    committed_ = true;
    return Feasible{};
  }

  const SeedSet next = normalize_seeds(problem_.seed(seeds, y, level));
  if (!std::includes(next.begin(), next.end(), seeds.begin(), seeds.end())) {
    throw Error(ErrorCode::kInvalidArgument,
                "seed selector dropped existing seeds", level);
  }
  if (static_cast<int>(next.size() - seeds.size()) > problem_.growth) {
    throw Error(ErrorCode::kInvalidArgument,
                "seed selector exceeded its growth bound", level);
  }
  const std::vector<Subset>& coords = slot.coords;
  const std::vector<Subset> next_coords = problem_.coordinates(next);
  const SubsetIndexer next_index(next_coords);
  std::vector<int> positions(coords.size());
  DenseVector anchor = DenseVector::Zero(next_index.size());
  for (size_t j = 0; j < coords.size(); ++j) {
    const int p = next_index.find(coords[j]);
    if (p < 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "coordinates of the next level do not contain " +
                      subset_to_string(coords[j]),
                  level);
    }
    positions[j] = p;
    anchor(p) = y(static_cast<int>(j));
  }
  const OrthoProjection proj =
      OrthoProjection::coordinates(next_index.size(), positions);
  const OracleHandle inner = oracle(level + 1, next, next_index.family());

  CertifyOutcome out;
  try {
    out = certify_e(inner, proj, anchor, eps0_, options_.certify);
  } catch (const Error& e) {
    throw e.level() < 0 ? e.at_level(level) : e;
  }
  if (out.is_point()) return Feasible{};

  const Certificate& cert = out.certificate();
  transcript_.max_support_leak = std::max(
      transcript_.max_support_leak, proj.apply_complement(cert.c).norm());
  DenseVector c(static_cast<int>(coords.size()));
  for (size_t j = 0; j < coords.size(); ++j) {
    c(static_cast<int>(j)) = cert.c(positions[j]);
  }
  return Cut{c, cert.bound};
}

SolveResult fast_solve(const ProblemFamily& problem, int stages, double eps0,
                       const SolveOptions& options) {
  RecursiveSeparator sep(problem, stages, eps0, options);
  const SeedSet root;
  const std::vector<Subset> coords = problem.coordinates(root);
  const int dim = static_cast<int>(coords.size());
  const AffineSlice slice(OrthoProjection::zero(dim), DenseVector::Zero(dim));
  CcutOptions ccut = options.certify.ccut;
  if (options.deadline) ccut.deadline = options.deadline;
  CcutResult run;
  try {
    run = ccut_e_log(sep.oracle(0, root, coords), slice,
                     log_ball_volume(dim, eps0), ccut);
  } catch (const Error& e) {
    throw e.level() < 0 ? e.at_level(0) : e;
  }
  if (run.is_point()) {
    if (!sep.committed()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "outer run accepted a point without a committed transcript", 0);
    }
    Transcript t = std::move(sep.transcript());
    t.outer_iterations = run.iterations;
    return t;
  }
  return InfeasibleAssertion{run.iterations, run.final_log_volume};
}

ReplayReport replay_check(const Transcript& transcript,
                          const ProblemFamily& problem, const Tolerances& tol) {
  ReplayReport report;
  auto fail = [&](const std::string& why) {
    report.ok = false;
    report.failures.push_back(why);
  };
  const auto& levels = transcript.levels;
  if (levels.empty()) {
    fail("transcript has no levels");
    return report;
  }
  if (!levels.front().seeds.empty()) fail("S(0) is not empty");
  for (size_t i = 0; i < levels.size(); ++i) {
    const TranscriptLevel& lv = levels[i];
    const std::string tag = "level " + std::to_string(i) + ": ";
    if (problem.coordinates(lv.seeds) != lv.coords) {
      fail(tag + "coordinates differ from the projection of S(i)");
      continue;
    }
    if (lv.y.size() != static_cast<int>(lv.coords.size())) {
      fail(tag + "y(i) has the wrong length");
      continue;
    }
    try {
      if (!is_feasible(problem.feasible(lv.seeds, lv.y))) {
        fail(tag + "y(i) is rejected by the feasibility oracle");
      }
    } catch (const Error& e) {
      fail(tag + e.what());
    }
    if (i + 1 < levels.size()) {
      const TranscriptLevel& nx = levels[i + 1];
      SeedSet replayed;
      try {
        replayed = normalize_seeds(
            problem.seed(lv.seeds, lv.y, static_cast<int>(i)));
      } catch (const Error& e) {
        fail(tag + e.what());
      }
      if (replayed != nx.seeds) fail(tag + "seed selection does not replay");
      const SubsetIndexer next_index(nx.coords);
      for (size_t j = 0; j < lv.coords.size(); ++j) {
        const int p = next_index.find(lv.coords[j]);
        if (p < 0 || p >= nx.y.size()) {
          fail(tag + "coordinate " + subset_to_string(lv.coords[j]) +
               " missing at the next level");
          break;
        }
        const double gap = std::fabs(nx.y(p) - lv.y(static_cast<int>(j)));
        report.worst_restriction = std::max(report.worst_restriction, gap);
      }
    }
  }
  if (report.worst_restriction > tol.restriction) {
    fail("restriction mismatch " + std::to_string(report.worst_restriction));
  }
  if (transcript.y_star.size() != levels.back().y.size() ||
      (transcript.y_star - levels.back().y).lpNorm<Eigen::Infinity>() > 0.0) {
    fail("final solution differs from the deepest level");
  }
  return report;
}

namespace {

nlohmann::json subset_json(Subset s) {
  nlohmann::json a = nlohmann::json::array();
  for (int m : subset_members(s)) a.push_back(m + 1);
  return a;
}

Subset subset_from_json(const nlohmann::json& a) {
  std::vector<int> members;
  for (const auto& v : a) members.push_back(v.get<int>() - 1);
  return subset_of(members);
}

}  // namespace

std::string transcript_to_json(const Transcript& t) {
  nlohmann::json doc;
  doc["schema"] = "locsdp.transcript/1";
  doc["outer_iterations"] = t.outer_iterations;
  doc["max_support_leak"] = t.max_support_leak;
  doc["level_calls"] = t.level_calls;
  nlohmann::json levels = nlohmann::json::array();
  for (const TranscriptLevel& lv : t.levels) {
    nlohmann::json l;
    nlohmann::json seeds = nlohmann::json::array();
    for (int u : lv.seeds) seeds.push_back(u + 1);
    l["seeds"] = seeds;
    l["oracle_calls"] = lv.oracle_calls;
    nlohmann::json moments = nlohmann::json::array();
    for (size_t j = 0; j < lv.coords.size(); ++j) {
      moments.push_back(
          {{"set", subset_json(lv.coords[j])}, {"value", lv.y(static_cast<int>(j))}});
    }
    l["moments"] = moments;
    levels.push_back(l);
  }
  doc["levels"] = levels;
  nlohmann::json touched = nlohmann::json::array();
  std::vector<Subset> sorted(t.touched.begin(), t.touched.end());
  canonicalize(sorted);
  for (Subset s : sorted) touched.push_back(subset_json(s));
  doc["touched"] = touched;
  return doc.dump(2);
}

Transcript transcript_from_json(const std::string& text) {
  Transcript t;
  try {
    const nlohmann::json doc = nlohmann::json::parse(text);
    if (doc.value("schema", "") != "locsdp.transcript/1") {
      throw Error(ErrorCode::kParse, "unknown transcript schema");
    }
    t.outer_iterations = doc.at("outer_iterations").get<long>();
    t.max_support_leak = doc.at("max_support_leak").get<double>();
    t.level_calls = doc.at("level_calls").get<std::vector<long>>();
    for (const auto& l : doc.at("levels")) {
      TranscriptLevel lv;
      for (const auto& u : l.at("seeds")) lv.seeds.push_back(u.get<int>() - 1);
      lv.oracle_calls = l.at("oracle_calls").get<long>();
      const auto& moments = l.at("moments");
      lv.y.resize(static_cast<int>(moments.size()));
      int j = 0;
      for (const auto& m : moments) {
        lv.coords.push_back(subset_from_json(m.at("set")));
        lv.y(j++) = m.at("value").get<double>();
      }
      t.levels.push_back(std::move(lv));
    }
    for (const auto& s : doc.at("touched")) t.touched.insert(subset_from_json(s));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("transcript: ") + e.what());
  }
  if (!t.levels.empty()) t.y_star = t.levels.back().y;
  return t;
}

}  // namespace locsdp
