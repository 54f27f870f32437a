#include "quenchlab/certificates.hpp"
#include "quenchlab/spectra.hpp"

#include <benchmark/benchmark.h>

using namespace quenchlab;

static void BM_Thomas(benchmark::State& state) {
  const Grid g = Grid::interval(0.0, 1.0, static_cast<int>(state.range(0)));
  const DiscreteOperator op = assemble_laplacian(g);
  const ScalarField rhs = ScalarField::Ones(long(g.size()));
  for (auto _ : state) benchmark::DoNotOptimize(op.solve(rhs));
}
BENCHMARK(BM_Thomas)->Arg(199)->Arg(999)->Arg(9999);

static void BM_ConjugateGradient2D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Grid g = Grid::rectangle({0, 1}, n, {0, 1}, n);
  const DiscreteOperator op = assemble_laplacian(g);
  const ScalarField rhs = ScalarField::Ones(long(g.size()));
  for (auto _ : state) benchmark::DoNotOptimize(op.solve(rhs));
}
BENCHMARK(BM_ConjugateGradient2D)->Arg(31)->Arg(63);

static void BM_LaplacianEigenpair(benchmark::State& state) {
  const Grid g = Grid::interval(0.0, 1.0, static_cast<int>(state.range(0)));
  const DiscreteOperator op = assemble_laplacian(g);
  for (auto _ : state) benchmark::DoNotOptimize(principal_laplacian_eigenpair(op, g));
}
BENCHMARK(BM_LaplacianEigenpair)->Arg(199)->Arg(999);

static void BM_MinimalSolution(benchmark::State& state) {
  const Discretization d(Grid::interval(0.0, 1.0, 199));
  const double t = static_cast<double>(state.range(0)) / 100.0;
  for (auto _ : state) benchmark::DoNotOptimize(monotone_minimal_solution(d, Model{}, {t, t}));
}
BENCHMARK(BM_MinimalSolution)->Arg(50)->Arg(130);

static void BM_CoupledEigenpair(benchmark::State& state) {
  const Discretization d(Grid::interval(0.0, 1.0, 199));
  const auto v = monotone_minimal_solution(d, Model{}, {0.5, 0.5});
  const LinearizedOperator op = assemble_linearization(d, Model{}, std::get<InLambda>(v).solution);
  for (auto _ : state) benchmark::DoNotOptimize(principal_eigenpair(op));
}
BENCHMARK(BM_CoupledEigenpair);

static void BM_SimulateToEquilibrium(benchmark::State& state) {
  const Discretization d(Grid::interval(0.0, 1.0, 199));
  const PairField zero{ScalarField::Zero(199), ScalarField::Zero(199)};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(d, Model{}, {0.5, 0.5}, zero, {}, 5.0));
}
BENCHMARK(BM_SimulateToEquilibrium)->Unit(benchmark::kMillisecond);

static void BM_SimulateToQuench(benchmark::State& state) {
  const Discretization d(Grid::interval(0.0, 1.0, 199));
  const PairField zero{ScalarField::Zero(199), ScalarField::Zero(199)};
  for (auto _ : state) benchmark::DoNotOptimize(simulate(d, Model{}, {12.0, 12.0}, zero, {}, 10.0));
}
BENCHMARK(BM_SimulateToQuench)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
