#include <benchmark/benchmark.h>

#include "locsdp/certify.hpp"
#include "locsdp/experiment.hpp"
#include "locsdp/graph.hpp"
#include "locsdp/seeding.hpp"
#include "locsdp/solver.hpp"

using namespace locsdp;

namespace {

DenseVector filled(int n, double value) { return DenseVector::Constant(n, value); }

ProblemSpec cycle_maxcut(int n, int stages) {
  ProblemSpec s;
  s.instance.mode = Mode::kMaxCut;
  s.instance.graph = cycle_graph(n);
  s.stages = stages;
  s.seed_size = 1;
  s.eps0 = 1e-3;
  return s;
}

void BM_CcutBall(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const OracleHandle ball = ball_oracle(filled(n, 0.6), 0.05);
  const AffineSlice slice(OrthoProjection::zero(n), DenseVector::Zero(n));
  long iterations = 0;
  for (auto _ : state) {
    const CcutResult r = ccut_e(ball, slice, 1e-6);
    iterations = r.iterations;
    benchmark::DoNotOptimize(r);
  }
  state.counters["iterations"] = static_cast<double>(iterations);
}
BENCHMARK(BM_CcutBall)->DenseRange(2, 8, 2);

// The slice misses the ball, so every run ends with a certificate.
void BM_CertifyMissedSlice(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const OracleHandle ball = ball_oracle(filled(n, 0.5), 0.1);
  DenseVector anchor = DenseVector::Zero(n);
  anchor(0) = 0.9;
  const OrthoProjection proj = OrthoProjection::coordinates(n, {0});
  long qp = 0;
  for (auto _ : state) {
    const CertifyOutcome out = certify_e(ball, proj, anchor, 0.01);
    qp = out.qp_iterations;
    benchmark::DoNotOptimize(out);
  }
  state.counters["qp_iterations"] = static_cast<double>(qp);
}
BENCHMARK(BM_CertifyMissedSlice)->DenseRange(2, 8, 2);

void BM_RecursiveSeparate(benchmark::State& state) {
  const ProblemFamily problem = local_problem(cycle_maxcut(5, 1), -3.0);
  const std::vector<Subset> coords = problem.coordinates({});
  const DenseVector y = DenseVector::Constant(static_cast<Eigen::Index>(coords.size()), 0.5);
  for (auto _ : state) {
    RecursiveSeparator sep(problem, 1, 1e-3, {});
    benchmark::DoNotOptimize(sep.separate(0, {}, y));
  }
}
BENCHMARK(BM_RecursiveSeparate);

void BM_FastSolveCycle(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const ProblemSpec spec = cycle_maxcut(n, 1);
  long touched = 0;
  for (auto _ : state) {
    const SolveResult r = fast_solve(local_problem(spec, -0.6 * n), spec.stages, spec.eps0);
    if (const auto* t = std::get_if<Transcript>(&r)) touched = static_cast<long>(t->touched.size());
  }
  state.counters["touched"] = static_cast<double>(touched);
}
BENCHMARK(BM_FastSolveCycle)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_VolumeSample(benchmark::State& state) {
  const int cols = static_cast<int>(state.range(0));
  Rng rng(5);
  std::normal_distribution<double> g;
  DenseMatrix m(cols, cols);
  for (int i = 0; i < cols; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = g(rng);
  }
  std::vector<int> ids(static_cast<size_t>(cols));
  for (int i = 0; i < cols; ++i) ids[static_cast<size_t>(i)] = i;
  const ColumnEnsemble ens = ColumnEnsemble::from_columns(ids, m);
  for (auto _ : state) benchmark::DoNotOptimize(volume_sample(ens, 3, rng));
}
BENCHMARK(BM_VolumeSample)->Arg(5)->Arg(20)->Arg(80);

// Logs the locality counters next to the fast and full-level timings.
void BM_Locality(benchmark::State& state) {
  ProblemSpec spec = cycle_maxcut(static_cast<int>(state.range(0)), 1);
  spec.rounds = 2;
  spec.fixed_bound = -0.75 * static_cast<double>(state.range(0));
  LocalityReport rep;
  for (auto _ : state) rep = measure_locality(spec, 1, 30.0);
  state.counters["touched"] = static_cast<double>(rep.fast_touched);
  state.counters["full_count"] = static_cast<double>(rep.full_count);
  state.counters["fast_s"] = rep.fast_seconds;
  state.counters["full_s"] = rep.full_seconds;
}
BENCHMARK(BM_Locality)->Arg(6)->Iterations(1)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
