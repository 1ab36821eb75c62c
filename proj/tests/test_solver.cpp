#include <gtest/gtest.h>

#include "locsdp/errors.hpp"
#include "locsdp/experiment.hpp"
#include "locsdp/solver.hpp"

using namespace locsdp;

namespace {

ProblemSpec maxcut_spec(const Graph& g, int stages) {
  ProblemSpec s;
  s.instance.mode = Mode::kMaxCut;
  s.instance.graph = g;
  s.stages = stages;
  s.seed_size = 1;
  s.eps0 = 1e-3;
  s.repeats = 20;
  return s;
}

Graph single_edge() {
  Graph g(2);
  g.add_edge(0, 1);
  return g;
}

DenseVector integral(const std::vector<Subset>& coords, Subset point) {
  DenseVector y(static_cast<Eigen::Index>(coords.size()));
  for (size_t i = 0; i < coords.size(); ++i) {
    y(static_cast<Eigen::Index>(i)) = is_subset_of(coords[i], point) ? 1.0 : 0.0;
  }
  return y;
}

// Two-stage C5 transcript shared by the replay tests; cut >= 3 is feasible.
const Transcript& c5_transcript() {
  static const Transcript t = [] {
    const ProblemSpec s = maxcut_spec(cycle_graph(5), 2);
    SolveResult r = fast_solve(local_problem(s, -3.0), 2, s.eps0);
    EXPECT_TRUE(std::holds_alternative<Transcript>(r));
    return std::get<Transcript>(r);
  }();
  return t;
}

}  // namespace

TEST(FastSolve, SingleEdgeRoundsToCut) {
  ProblemSpec s = maxcut_spec(single_edge(), 1);
  s.fixed_bound = -0.9;
  const RunResult r = run_experiment(s);
  ASSERT_TRUE(r.bisection.feasible);
  EXPECT_TRUE(r.replay.ok);
  EXPECT_EQ(r.report.value, 1.0);
  ASSERT_TRUE(r.report.optimum.has_value());
  EXPECT_EQ(*r.report.optimum, 1.0);
}

TEST(FastSolve, ZeroStagesIsPlainFeasiblePoint) {
  const ProblemSpec s = maxcut_spec(single_edge(), 0);
  const ProblemFamily problem = local_problem(s, -0.5);
  const SolveResult r = fast_solve(problem, 0, 1e-3);
  ASSERT_TRUE(std::holds_alternative<Transcript>(r));
  const Transcript& t = std::get<Transcript>(r);
  ASSERT_EQ(t.levels.size(), 1u);
  EXPECT_TRUE(t.levels[0].seeds.empty());
  EXPECT_TRUE(is_feasible(problem.feasible({}, t.y_star)));
}

TEST(FastSolve, BoundBeyondOptimumIsInfeasible) {
  // A single edge cuts at most once; asking for 1.5 is impossible.
  const ProblemSpec s = maxcut_spec(single_edge(), 1);
  const SolveResult r = fast_solve(local_problem(s, -1.5), 1, 1e-3);
  EXPECT_TRUE(std::holds_alternative<InfeasibleAssertion>(r));
}

TEST(FastSolve, RejectsBadArguments) {
  const ProblemFamily problem = local_problem(maxcut_spec(single_edge(), 1), -0.5);
  EXPECT_THROW(fast_solve(problem, -1, 1e-3), Error);
  EXPECT_THROW(fast_solve(problem, 1, 1.5), Error);
}

TEST(RecursiveSep, DeepestLevelCommitsFeasiblePoint) {
  const ProblemFamily problem = local_problem(maxcut_spec(single_edge(), 0), -0.5);
  RecursiveSeparator sep(problem, 0, 1e-3, {});
  const std::vector<Subset> coords = problem.coordinates({});
  EXPECT_TRUE(is_feasible(sep.separate(0, {}, integral(coords, singleton(0)))));
  EXPECT_TRUE(sep.committed());
}

TEST(RecursiveSep, FailingFeasibilityForwardsSameCut) {
  const ProblemFamily problem = local_problem(maxcut_spec(single_edge(), 1), -0.5);
  RecursiveSeparator sep(problem, 1, 1e-3, {});
  const std::vector<Subset> coords = problem.coordinates({});
  DenseVector y = integral(coords, singleton(0));
  y(0) = 1.2;
  const SeparationResponse direct = problem.feasible({}, y);
  const SeparationResponse forwarded = sep.separate(0, {}, y);
  ASSERT_FALSE(is_feasible(direct));
  ASSERT_FALSE(is_feasible(forwarded));
  EXPECT_LE((std::get<Cut>(direct).c - std::get<Cut>(forwarded).c).norm(), 1e-15);
  EXPECT_NEAR(std::get<Cut>(forwarded).c.lpNorm<Eigen::Infinity>(), 1.0, 1e-12);
  EXPECT_FALSE(sep.committed());
}

TEST(Transcript, InvariantsHold) {
  const Transcript& t = c5_transcript();
  ASSERT_EQ(t.levels.size(), 3u);
  for (size_t i = 0; i + 1 < t.levels.size(); ++i) {
    const SeedSet& a = t.levels[i].seeds;
    const SeedSet& b = t.levels[i + 1].seeds;
    EXPECT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
    EXPECT_LE(b.size(), a.size() + 1);
  }
  EXPECT_LE(t.max_support_leak, 1e-8);
  EXPECT_LE((t.y_star - t.levels.back().y).norm(), 0.0);
}

// Every materialized coordinate lies in some level's chart.
TEST(Transcript, TouchedCoordinatesStayLocal) {
  const Transcript& t = c5_transcript();
  std::set<Subset> charts;
  for (const TranscriptLevel& lv : t.levels) charts.insert(lv.coords.begin(), lv.coords.end());
  for (Subset s : t.touched) EXPECT_TRUE(charts.count(s)) << subset_to_string(s);
  EXPECT_LT(t.touched.size(), count_subsets_up_to(5, 4));
}

TEST(ReplayCheck, AcceptsEmittedTranscript) {
  const ProblemSpec s = maxcut_spec(cycle_graph(5), 2);
  const ReplayReport r = replay_check(c5_transcript(), local_problem(s, -3.0));
  EXPECT_TRUE(r.ok);
  EXPECT_TRUE(r.failures.empty());
  EXPECT_LE(r.worst_restriction, 1e-8);
}

TEST(ReplayCheck, RejectsPerturbedCoordinate) {
  const ProblemSpec s = maxcut_spec(cycle_graph(5), 2);
  Transcript t = c5_transcript();
  t.levels[0].y(0) += 0.1;
  const ReplayReport r = replay_check(t, local_problem(s, -3.0));
  EXPECT_FALSE(r.ok);
  EXPECT_GE(r.worst_restriction, 0.1 - 1e-12);
}

TEST(ReplayCheck, RejectsReplacedSeeds) {
  const ProblemSpec s = maxcut_spec(cycle_graph(5), 2);
  Transcript t = c5_transcript();
  SeedSet other;
  for (int v = 0; v < 5 && other.size() < t.levels[2].seeds.size(); ++v) {
    if (!std::binary_search(t.levels[2].seeds.begin(), t.levels[2].seeds.end(), v)) {
      other.push_back(v);
    }
  }
  t.levels[2].seeds = other;
  EXPECT_FALSE(replay_check(t, local_problem(s, -3.0)).ok);
}

TEST(FastSolve, DeterministicTranscripts) {
  const ProblemSpec s = maxcut_spec(cycle_graph(5), 2);
  const SolveResult again = fast_solve(local_problem(s, -3.0), 2, s.eps0);
  ASSERT_TRUE(std::holds_alternative<Transcript>(again));
  EXPECT_EQ(transcript_to_json(std::get<Transcript>(again)),
            transcript_to_json(c5_transcript()));
}

TEST(TranscriptJson, RoundTrip) {
  const std::string text = transcript_to_json(c5_transcript());
  const Transcript back = transcript_from_json(text);
  EXPECT_EQ(transcript_to_json(back), text);
  EXPECT_EQ(back.levels.size(), c5_transcript().levels.size());
  EXPECT_LE((back.y_star - c5_transcript().y_star).norm(), 1e-12);
}

TEST(TranscriptJson, MalformedInputRejected) {
  EXPECT_THROW(transcript_from_json("{\"levels\": 3}"), Error);
  EXPECT_THROW(transcript_from_json("not json"), Error);
}

TEST(SeedFamily, BinaryAndIndicator) {
  EXPECT_EQ(seed_family(LabelModel::binary(3), {}), (std::vector<Subset>{0}));
  EXPECT_EQ(seed_family(LabelModel::binary(3), {1}), (std::vector<Subset>{0, singleton(1)}));
  // Indicator with k = 2: vertex 0 owns variables 0 and 1.
  const std::vector<Subset> f = seed_family(LabelModel::indicator(2, 2), {0});
  EXPECT_EQ(f.size(), 4u);
}
