#include <gtest/gtest.h>

#include <map>

#include "conditioning_corpus.hpp"
#include "locsdp/errors.hpp"
#include "locsdp/graph.hpp"
#include "locsdp/problems.hpp"
#include "locsdp/seeding.hpp"
#include "reference.hpp"

using namespace locsdp;

namespace {

DenseMatrix columns(std::initializer_list<std::initializer_list<double>> cols) {
  const int n = static_cast<int>(cols.begin()->size());
  DenseMatrix m(n, static_cast<int>(cols.size()));
  int j = 0;
  for (const auto& c : cols) {
    int i = 0;
    for (double v : c) m(i++, j) = v;
    ++j;
  }
  return m;
}

std::map<std::vector<int>, int> tally(const ColumnEnsemble& cols, int count,
                                      int draws, std::uint64_t seed) {
  Rng rng(seed);
  std::map<std::vector<int>, int> out;
  for (int d = 0; d < draws; ++d) {
    std::vector<int> ids = volume_sample(cols, count, rng).ids;
    std::sort(ids.begin(), ids.end());
    ++out[ids];
  }
  return out;
}

// Independent fair coins on `n` binary vertices.
LabelVectors product_coins(int n) {
  std::vector<std::pair<Subset, double>> atoms;
  for (Subset s = 0; s < (Subset{1} << n); ++s) atoms.emplace_back(s, std::ldexp(1.0, -n));
  return LabelVectors::from_distribution(atoms);
}

}  // namespace

TEST(VolumeSample, ZeroColumnNeverChosen) {
  const ColumnEnsemble cols = ColumnEnsemble::from_columns({0, 1}, columns({{1, 0}, {0, 0}}));
  const auto t = tally(cols, 1, 200, 1);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.begin()->first, (std::vector<int>{0}));
}

TEST(VolumeSample, FullVolumePair) {
  const ColumnEnsemble cols = ColumnEnsemble::from_columns({0, 1}, columns({{1, 0}, {0, 1}}));
  Rng rng(3);
  const VolumeSample s = volume_sample(cols, 2, rng);
  std::vector<int> ids = s.ids;
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, (std::vector<int>{0, 1}));
  EXPECT_FALSE(s.padded);
}

TEST(VolumeSample, DuplicateColumnsSplitEvenly) {
  const ColumnEnsemble cols =
      ColumnEnsemble::from_columns({1, 2, 3}, columns({{1, 0}, {1, 0}, {0, 1}}));
  const auto t = tally(cols, 2, 20000, 5);
  EXPECT_EQ(t.count({1, 2}), 0u);
  EXPECT_NEAR(t.at({1, 3}) / 20000.0, 0.5, 0.02);
  EXPECT_NEAR(t.at({2, 3}) / 20000.0, 0.5, 0.02);
}

TEST(VolumeSample, RankShortfallPadsAndFlags) {
  const ColumnEnsemble cols =
      ColumnEnsemble::from_columns({0, 1, 2}, columns({{2, 0}, {1, 0}, {0, 0}}));
  Rng rng(7);
  const VolumeSample s = volume_sample(cols, 2, rng);
  EXPECT_TRUE(s.padded);
  std::vector<int> ids = s.ids;
  std::sort(ids.begin(), ids.end());
  EXPECT_EQ(ids, (std::vector<int>{0, 1}));
}

TEST(VolumeSample, GreedyIsDeterministic) {
  const ColumnEnsemble cols = ColumnEnsemble::from_columns(
      {0, 1, 2, 3}, columns({{1, 0.2, 0}, {0.3, 1, 0}, {0, 0.1, 0.5}, {0.7, 0.7, 0.7}}));
  Rng a(1), b(99);
  EXPECT_EQ(volume_sample(cols, 2, a, true).ids, volume_sample(cols, 2, b, true).ids);
}

// Property: empirical frequencies match determinant ratios from the
// reference enumerator on random 5-column ensembles.
TEST(VolumeSampleProperty, MatchesDeterminantRatios) {
  Rng gen(11);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 4; ++trial) {
    DenseMatrix m(3, 5);
    for (int i = 0; i < m.size(); ++i) m.data()[i] = g(gen);
    const ColumnEnsemble cols = ColumnEnsemble::from_columns({0, 1, 2, 3, 4}, m);
    const int count = 1 + trial % 3;
    const auto want = ref::volume_probabilities(m.transpose() * m, count);
    const int draws = 20000;
    const auto got = tally(cols, count, draws, 100 + trial);
    for (const auto& [ids, p] : want) {
      const auto it = got.find(ids);
      const double f = it == got.end() ? 0.0 : it->second / double(draws);
      EXPECT_NEAR(f, p, 0.02) << "count " << count;
    }
  }
}

TEST(SeedQip, IntegralSolutionPads) {
  const LabelVectors x = LabelVectors::from_distribution({{subset_of({0, 2}), 1.0}});
  Rng rng(1);
  const SeedChoice c = seed_qip({}, x, LabelModel::binary(4), 2, rng);
  EXPECT_TRUE(c.padded);
  EXPECT_EQ(c.seeds.size(), 2u);
}

TEST(SeedQip, FullRankColumnsGrowByCount) {
  const LabelVectors x = product_coins(4);
  Rng rng(2);
  const SeedChoice first = seed_qip({}, x, LabelModel::binary(4), 2, rng);
  EXPECT_FALSE(first.padded);
  EXPECT_EQ(first.seeds.size(), 2u);
  const SeedChoice second = seed_qip(first.seeds, x, LabelModel::binary(4), 1, rng);
  EXPECT_EQ(second.seeds.size(), 3u);
  EXPECT_TRUE(std::includes(second.seeds.begin(), second.seeds.end(),
                            first.seeds.begin(), first.seeds.end()));
}

TEST(SeedColor, IntegralColoringPads) {
  const LabelModel m = LabelModel::indicator(3, 3);
  const LabelVectors x = LabelVectors::from_distribution(uniform_atoms(m, {{0, 1, 2}}));
  Rng rng(3);
  EXPECT_TRUE(seed_color(x, m, 1, rng).padded);
}

TEST(SeedColor, TriangleSymmetry) {
  const LabelModel m = LabelModel::indicator(3, 3);
  const Graph tri = complete_graph(3);
  const LabelVectors x =
      LabelVectors::from_distribution(uniform_atoms(m, proper_colorings(tri, 3)));
  const ColumnEnsemble emb = coloring_embedding(x, m);
  EXPECT_NEAR(emb.gram(0, 0), emb.gram(1, 1), 1e-12);
  EXPECT_NEAR(emb.gram(0, 1), emb.gram(1, 2), 1e-12);
  Rng rng(4);
  std::array<int, 3> hits{};
  const int draws = 6000;
  for (int d = 0; d < draws; ++d) ++hits[static_cast<size_t>(seed_color(x, m, 1, rng).seeds.at(0))];
  for (int h : hits) EXPECT_NEAR(h / double(draws), 1.0 / 3.0, 0.03);
  EXPECT_EQ(seed_color(x, m, 3, rng).seeds, (SeedSet{0, 1, 2}));
}

TEST(SeedSparsestCut, SingleDemandEdge) {
  const LabelVectors x = product_coins(3);
  Rng rng(5);
  const SeedChoice c = seed_sparsest_cut(x, LabelModel::binary(3), {{0, 1, 1.0}}, 1, rng);
  EXPECT_EQ(c.seeds, (SeedSet{0, 1}));
}

TEST(SeedSparsestCut, EqualVectorsNeverSampled) {
  // x_0 = x_1 always; vertex 2 is an independent coin.
  const LabelVectors x = LabelVectors::from_distribution({{0, 0.25},
                                                          {subset_of({0, 1}), 0.25},
                                                          {subset_of({2}), 0.25},
                                                          {subset_of({0, 1, 2}), 0.25}});
  Rng rng(6);
  for (int d = 0; d < 50; ++d) {
    const SeedChoice c = seed_sparsest_cut(x, LabelModel::binary(3),
                                           {{0, 1, 1.0}, {1, 2, 1.0}}, 1, rng);
    EXPECT_EQ(c.seeds, (SeedSet{1, 2}));
  }
}

TEST(SeedSparsestCut, NoDemandRejected) {
  Rng rng(7);
  try {
    seed_sparsest_cut(product_coins(2), LabelModel::binary(2), {{0, 1, 0.0}}, 1, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNoDemand);
  }
}

TEST(CspEmbedding, DeterministicVertexEmbedsToZero) {
  const LabelModel m = LabelModel::binary(2);
  const LabelVectors x = LabelVectors::from_distribution({{subset_of({0}), 0.5},
                                                          {subset_of({0, 1}), 0.5}});
  const ColumnEnsemble e = csp_embedding(condition(x, m, {}), 2);
  EXPECT_NEAR(e.gram(0, 0), 0.0, 1e-15);
  EXPECT_GT(e.gram(1, 1), 0.1);
}

// Property: each embedded column is no longer than the total conditional
// variance vector mass of its vertex, and eps_f <= k delta_f.
TEST(CspEmbeddingProperty, NormBoundAndFunctionals) {
  std::mt19937_64 rng(43);
  for (int trial = 0; trial < 80; ++trial) {
    const corpus::Instance in = corpus::make(rng);
    const ConditionedVectors c = condition(in.x, in.model, in.f0);
    const ColumnEnsemble e = csp_embedding(c, in.model.vertices);
    for (int u = 0; u < in.model.vertices; ++u) {
      double mass = 0.0;
      for (int i = 0; i < in.model.k; ++i) mass += c.perp(c.vec({{u, i}})).squaredNorm();
      EXPECT_LE(e.gram(u, u), mass + 1e-9);
    }
    std::vector<Edge> edges;
    for (int u = 0; u < in.model.vertices; ++u) {
      for (int v = u + 1; v < in.model.vertices; ++v) edges.push_back({u, v, 1.0});
    }
    const VarianceFunctionals f = variance_functionals(c, edges);
    EXPECT_GE(f.eps, -1e-12);
    EXPECT_LE(f.eps, in.model.k * f.delta + 1e-9);
  }
}

TEST(CspStage, CapFormula) {
  EXPECT_EQ(stage_cap(2, 0.5), 128);
  EXPECT_EQ(stage_cap(3, 0.3), 800);
}

TEST(CspStage, ProductDistributionDoneImmediately) {
  const LabelModel m = LabelModel::binary(3);
  const std::vector<Edge> edges = {{0, 1, 1.0}, {1, 2, 1.0}};
  const LabelVectors x = product_coins(3);
  const StageState s = initial_stage(x, m, edges, 0.2);
  EXPECT_NEAR(s.eps, 0.0, 1e-12);
  Rng rng(1);
  const StageStep step = csp_stage(s, x, m, edges, 1, 0.2, rng);
  ASSERT_TRUE(std::holds_alternative<StageDone>(step));
  EXPECT_TRUE(std::get<StageDone>(step).f.empty());
}

TEST(CspStage, CorrelatedPairResolvedInOneStage) {
  const LabelModel m = LabelModel::binary(2);
  const std::vector<Edge> edges = {{0, 1, 1.0}};
  const LabelVectors x = LabelVectors::from_distribution({{0, 0.5}, {subset_of({0, 1}), 0.5}});
  StageState final_state;
  Rng rng(2);
  const StageDone done = run_csp_stages(x, m, edges, 1, 0.1, rng, &final_state);
  EXPECT_EQ(final_state.stage, 1);
  // History holds the initial delta and one committed stage.
  ASSERT_EQ(final_state.delta_history.size(), 2u);
  EXPECT_GT(final_state.delta_history[0], 0.1);
  EXPECT_NEAR(final_state.delta_history[1], 0.0, 1e-9);
  EXPECT_EQ(done.f.size(), 1u);
}

TEST(CspStage, CapExceededIsReported) {
  const LabelModel m = LabelModel::binary(2);
  const std::vector<Edge> edges = {{0, 1, 1.0}};
  const LabelVectors x = LabelVectors::from_distribution({{0, 0.5}, {subset_of({0, 1}), 0.5}});
  StageState s = initial_stage(x, m, edges, 0.1);
  s.cap = 0;
  Rng rng(3);
  try {
    csp_stage(s, x, m, edges, 1, 0.1, rng);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kStageCapExceeded);
  }
}

TEST(DeriveSeed, StableAndSeparating) {
  EXPECT_EQ(derive_seed(1, 2, 3), derive_seed(1, 2, 3));
  EXPECT_NE(derive_seed(1, 2, 3), derive_seed(1, 2, 4));
  EXPECT_NE(derive_seed(1, 2, SeedSet{0, 1}), derive_seed(1, 2, SeedSet{0, 2}));
}
