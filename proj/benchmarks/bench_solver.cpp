#include <benchmark/benchmark.h>

#include "swflood/scheme_kernels.hpp"
#include "swflood/solver_2d.hpp"

namespace {

swflood::State dam_break(int n) {
  swflood::State s(n, n, 1.0, 1.0);
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      s.h(i, j) = i < n / 2 ? 2.0 : 0.5;
      s.z(i, j) = 0.001 * j;
    }
  }
  return s;
}

void BM_SpatialResidual(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  const swflood::State s = dam_break(n);
  const swflood::PhysicalParams p;
  swflood::Residual r;
  for (auto _ : st) {
    swflood::spatial_residual(s, p, swflood::SpatialOrder::Second, r, swflood::boundary::Placement::whole(s));
    benchmark::DoNotOptimize(r.dh.raw().data());
  }
  st.SetItemsProcessed(st.iterations() * n * n);
}
BENCHMARK(BM_SpatialResidual)->Arg(100)->Arg(400);

void BM_SolverStep(benchmark::State& st) {
  const int n = static_cast<int>(st.range(0));
  swflood::SolverOptions opt;
  opt.blocks = static_cast<int>(st.range(1));
  swflood::PhysicalParams p;
  p.manning_n = 0.03;
  swflood::Solver solver(dam_break(n), p, swflood::boundary::BoundarySpec::walls(), opt);
  for (auto _ : st) benchmark::DoNotOptimize(solver.step().dt_used);
  st.SetItemsProcessed(st.iterations() * n * n);
}
BENCHMARK(BM_SolverStep)->Args({200, 1})->Args({200, 4});

void BM_HllcFlux(benchmark::State& st) {
  double hL = 1.0, hR = 0.5;
  for (auto _ : st) {
    const auto f = swflood::kernels::hllc_flux(hL, 0.3, 0.1, hR, -0.2, 0.0, 9.81);
    benchmark::DoNotOptimize(f);
    hL += 1e-12;
  }
}
BENCHMARK(BM_HllcFlux);

}  // namespace

BENCHMARK_MAIN();
