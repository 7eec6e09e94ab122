#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "conekit/angular.hpp"
#include "conekit/cone_operators.hpp"
#include "conekit/dynamics.hpp"

using namespace conekit;

namespace {

geometry::MeshPtr bench_mesh(int cells) {
  const double p[] = {0.5, 2.0};
  return geometry::build_mesh(geometry::build_profile(geometry::ProfileKind::cone_capped, p), cells, 0.85);
}

std::vector<double> noise(int n) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  std::vector<double> v(static_cast<std::size_t>(n));
  for (double& x : v) x = normal(rng);
  return v;
}

void BM_ChSolve(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const ops::ModeOperator op(bench_mesh(m), 3);
  const ops::ChSystem ch(op, 1e-3, 2.0);
  auto x = noise(m);
  for (auto _ : state) {
    ch.solve_in_place(x);
    benchmark::DoNotOptimize(x.data());
  }
  state.SetComplexityN(m);
}
BENCHMARK(BM_ChSolve)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_ChFactor(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const ops::ModeOperator op(bench_mesh(m), 3);
  for (auto _ : state) {
    ops::ChSystem ch(op, 1e-3, 2.0);
    benchmark::DoNotOptimize(&ch);
  }
}
BENCHMARK(BM_ChFactor)->RangeMultiplier(4)->Range(64, 4096);

void BM_AngularTransform(benchmark::State& state) {
  const int K = static_cast<int>(state.range(0));
  const int m = 256;
  const auto mesh = bench_mesh(m);
  Field u(mesh, K);
  const auto v = noise(static_cast<int>(u.data().size()));
  std::copy(v.begin(), v.end(), u.data().begin());
  AngularGrid grid(K, m);
  std::vector<double> g(static_cast<std::size_t>(grid.points()) * m);
  for (auto _ : state) {
    grid.to_grid(u, g);
    grid.from_grid(g, u);
    benchmark::DoNotOptimize(u.data().data());
  }
}
BENCHMARK(BM_AngularTransform)->Arg(8)->Arg(32)->Arg(128);

void BM_CahnHilliardStep(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  const int K = static_cast<int>(state.range(1));
  const auto mesh = bench_mesh(m);
  auto s = dynamics::make_state(dynamics::random_initial_field(mesh, K, 1, 0.5));
  dynamics::StepperConfig cfg;
  s = dynamics::step_imex(s, cfg);
  for (auto _ : state) {
    s = dynamics::step_imex(s, cfg);
    benchmark::DoNotOptimize(s.u.data().data());
  }
}
BENCHMARK(BM_CahnHilliardStep)->Args({128, 12})->Args({256, 32})->Unit(benchmark::kMicrosecond);

void BM_Energy(benchmark::State& state) {
  const auto mesh = bench_mesh(256);
  const Field u = dynamics::random_initial_field(mesh, 32, 2, 0.5);
  dynamics::Workspace ws(mesh, 32);
  for (auto _ : state) benchmark::DoNotOptimize(dynamics::energy(u, ws));
}
BENCHMARK(BM_Energy);

}  // namespace
BENCHMARK_MAIN();
