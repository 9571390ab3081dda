#include <qmc/mask.hpp>
#include <qmc/qdct.hpp>
#include <qmc/qlinalg.hpp>
#include <qmc/solvers.hpp>
#include <qmc/synthetic.hpp>

#include <benchmark/benchmark.h>

using namespace qmc;

static void BM_Matmul(benchmark::State& state) {
  const Index n = state.range(0);
  const QuaternionMatrix a = random_gaussian(n, n, 1);
  const QuaternionMatrix b = random_gaussian(n, 16, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
}
BENCHMARK(BM_Matmul)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Qqr(benchmark::State& state) {
  const Index n = state.range(0);
  const QuaternionMatrix a = random_gaussian(n, 16, 3);
  for (auto _ : state) benchmark::DoNotOptimize(qqr(a));
}
BENCHMARK(BM_Qqr)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Qsvd(benchmark::State& state) {
  const Index n = state.range(0);
  const QuaternionMatrix a = random_gaussian(n, n, 4);
  for (auto _ : state) benchmark::DoNotOptimize(qsvd(a));
}
BENCHMARK(BM_Qsvd)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_CqsvdStep(benchmark::State& state) {
  const Index n = state.range(0);
  const QuaternionMatrix x = random_low_rank(n, n, 16, 5);
  const TriFactor tf = cqsvd_qqr_step(x, TriFactor::identity(n, n, 16));
  for (auto _ : state) benchmark::DoNotOptimize(cqsvd_qqr_step(x, tf));
}
BENCHMARK(BM_CqsvdStep)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Qdct(benchmark::State& state) {
  const Index n = state.range(0);
  const QdctContext ctx(n, n);
  const QuaternionMatrix a = random_gaussian(n, n, 6);
  for (auto _ : state) benchmark::DoNotOptimize(fqdct_l(ctx, a));
}
BENCHMARK(BM_Qdct)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

// Ten iterations of each solver; the per-iteration figure is time / 10.
static void BM_Solver(benchmark::State& state) {
  const Index n = state.range(0);
  const auto method = static_cast<Method>(state.range(1));
  const QuaternionMatrix truth = random_low_rank(n, n, 16, 7);
  const Mask mask = random_mask(n, n, 0.5, 8);
  const QuaternionMatrix observed = mask.project(truth);
  SolverConfig cfg = SolverConfig::defaults_for(method);
  cfg.rank = 16;
  cfg.v = 4;
  cfg.max_iter = 10;
  cfg.tol = 0.0;
  for (auto _ : state) benchmark::DoNotOptimize(complete(observed, mask, cfg));
  state.SetLabel(std::string(method_name(method)));
}
BENCHMARK(BM_Solver)
    ->ArgsProduct({{128, 256, 512}, {0, 1, 2}})
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

BENCHMARK_MAIN();
