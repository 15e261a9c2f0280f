// Serial reference vs OpenMP for the hot kernels.

#include <benchmark/benchmark.h>

#include "cdil/dilation.hpp"

using namespace cdil;

namespace {

const BlaschkeProduct kB({{0.0, 1}, {0.5, 1}});

void pairings(benchmark::State& st, bool parallel) {
  const BlaschkeProduct b({{0.0, 2}, {0.5, 1}, {-0.3, 1}});
  const auto basis = annihilator_basis_constrained(b);
  Rng rng(1);
  const auto phi = random_algebra_element(b, AlgebraTag::Constrained, rng);
  const auto samples = sample_boundary(phi, static_cast<std::size_t>(st.range(0)));
  for (auto _ : st)
    benchmark::DoNotOptimize(parallel ? annihilator_pairings(samples, basis)
                                      : annihilator_pairings_serial(samples, basis));
}

void kernels(benchmark::State& st, bool parallel) {
  const auto grid = build_grid(AlgebraTag::Full, kB, {static_cast<int>(st.range(0)), 2 * static_cast<int>(st.range(0))});
  const auto s = build_S(kB, 0.3, {0.0, -0.4}, 0);
  for (auto _ : st) benchmark::DoNotOptimize(grid_kernels(grid.functions, s.points, parallel));
  st.counters["generators"] = static_cast<double>(grid.functions.size());
}

void lmax(benchmark::State& st, bool parallel) {
  const auto grid = build_grid(AlgebraTag::Full, kB, {static_cast<int>(st.range(0)), 2 * static_cast<int>(st.range(0))});
  const auto s = build_S(kB, 0.3, {0.0, -0.4}, 0);
  const auto ks = grid_kernels(grid.functions, s.points);
  const auto phi = build_Phi(kB, AlgebraTag::Full, 0.3, {0.0, -0.4});
  auto w = delta_matrix(phi, s.points);
  w *= -1.0 / w.frobenius_norm();
  for (auto _ : st) benchmark::DoNotOptimize(separator_lmax(w, ks, 2, parallel));
}

// Fixed iteration budget on the default dilation problem.
void solve(benchmark::State& st, bool parallel) {
  const auto s = build_S(kB, 0.3, {0.0, -0.4}, 0);
  const auto grid = build_grid(AlgebraTag::Full, kB, {8, 16});
  ConeProblem p;
  p.block = 2;
  p.nodes = s.points;
  p.target = delta_matrix(build_Phi(kB, AlgebraTag::Full, 0.3, {0.0, -0.4}), s.points);
  p.generators = grid_kernels(grid.functions, s.points);
  SolverOptions o;
  o.parallel = parallel;
  o.single_check = false;
  o.tol.max_iter = st.range(0);
  o.check_every = static_cast<int>(st.range(0)) + 1;
  for (auto _ : st) benchmark::DoNotOptimize(cone_feasibility(p, o));
}

}  // namespace

BENCHMARK_CAPTURE(pairings, serial, false)->Arg(4096)->Arg(65536);
BENCHMARK_CAPTURE(pairings, openmp, true)->Arg(4096)->Arg(65536);
BENCHMARK_CAPTURE(kernels, serial, false)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(kernels, openmp, true)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(lmax, serial, false)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(lmax, openmp, true)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(solve, serial, false)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(solve, openmp, true)->Arg(20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
