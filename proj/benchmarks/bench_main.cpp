#include <benchmark/benchmark.h>

#include <random>

#include "polarcone/polarcone.hpp"

using namespace polarcone;

namespace {

StickyState random_state(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n), v(n), w(n, 1.0 / static_cast<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(n);
    v[i] = g(rng);
  }
  return StickyState(MonotoneMap1D(x), v, DiscreteMeasure(x, w));
}

RepresentationProblem manufactured(std::size_t n, bool identity_row) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g(0.0, 1.0);
  auto grid = Grid::cube(2, 0.0, 1.0, n);
  std::vector<SymMatrix> cells(grid.cell_count(), SymMatrix::Zero(2, 2));
  for (std::size_t c = 0; c < cells.size(); ++c) {
    if (grid.is_boundary_cell(c)) continue;
    SymMatrix l(2, 2);
    l << g(rng), g(rng), g(rng), g(rng);
    cells[c] = l * l.transpose() * grid.cell_volume();
  }
  auto f = divergence_measure(grid, MatrixMeasureField(2, cells));
  return RepresentationProblem::make(grid, f, MatrixMeasureField::zero(grid), identity_row);
}

RepresentationProblem sticky_problem(std::size_t particles, std::size_t cells) {
  auto s = random_state(particles, 5);
  auto y = polar_residual(s, 0.5);
  std::vector<Point> atoms, vecs;
  for (std::size_t i = 0; i < s.size(); ++i) {
    Point a(1), f(1);
    a << 0.1 + 0.8 * s.x0()[i];
    f << y[i] * s.measure().weights()[i];
    atoms.push_back(a);
    vecs.push_back(f);
  }
  auto grid = Grid::cube(1, 0.0, 1.0, cells);
  return RepresentationProblem::make(grid, VectorMeasure(1, atoms, vecs), MatrixMeasureField::zero(grid));
}

}  // namespace

static void BM_Pava(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> y(n), w(n, 1.0);
  for (auto& v : y) v = g(rng);
  for (auto _ : st) benchmark::DoNotOptimize(project_monotone_1d(y, w));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_Pava)->RangeMultiplier(10)->Range(100, 1000000)->Complexity(benchmark::oN);

static void BM_StickySnapshot(benchmark::State& st) {
  auto s = random_state(static_cast<std::size_t>(st.range(0)), 2);
  for (auto _ : st) benchmark::DoNotOptimize(sticky_snapshot(s, 0.7));
}
BENCHMARK(BM_StickySnapshot)->Arg(1000)->Arg(100000);

static void BM_Recover1D(benchmark::State& st) {
  auto p = sticky_problem(32, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(recover_stress(p));
}
BENCHMARK(BM_Recover1D)->Arg(64)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Recover2D(benchmark::State& st) {
  auto p = manufactured(static_cast<std::size_t>(st.range(0)), st.range(1) != 0);
  for (auto _ : st) benchmark::DoNotOptimize(recover_stress(p));
}
BENCHMARK(BM_Recover2D)->Args({16, 1})->Args({32, 1})->Args({16, 0})->Unit(benchmark::kMillisecond);

static void BM_Gauge(benchmark::State& st) {
  auto p = manufactured(static_cast<std::size_t>(st.range(0)), true);
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<SymMatrix> v(p.grid.cell_count());
  for (auto& c : v) {
    c.resize(2, 2);
    c << g(rng), 0.0, 0.0, g(rng);
  }
  GaugeOptions opts;
  opts.fast = st.range(1) != 0;
  for (auto _ : st) benchmark::DoNotOptimize(riedl_gauge(p, v, opts));
}
BENCHMARK(BM_Gauge)->Args({6, 0})->Args({6, 1})->Unit(benchmark::kMillisecond);

static void BM_Assemble(benchmark::State& st) {
  auto p = manufactured(static_cast<std::size_t>(st.range(0)), true);
  for (auto _ : st) benchmark::DoNotOptimize(assemble_constraints(p));
}
BENCHMARK(BM_Assemble)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
