#include <benchmark/benchmark.h>

#include "nsf/diagnostics.hpp"

using namespace nsf;

namespace {

Problem disk_case(int n) {
  Problem p;
  p.grid = Grid(2, n, 2.0);
  p.domain.R = 1.0;
  p.domain.field = make_rotation_field(1.0, 1.0, {0, 0, 0}, 0.85);
  p.domain.shape = Shape::disk({0.2, 0.0, 0.0}, 0.65);
  p.solver.flux = FluxScheme::Muscl;
  return p;
}

void BM_InvertQ(benchmark::State& st) {
  const ConstitutiveSet laws = ConstitutiveSet::defaults();
  double w = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(invert_Q(laws, w));
    w = w < 100.0 ? w * 1.01 : 0.1;
  }
}
BENCHMARK(BM_InvertQ);

void BM_RenormPair(benchmark::State& st) {
  const ConstitutiveSet laws = ConstitutiveSet::defaults();
  for (auto _ : st) benchmark::DoNotOptimize(renorm_pair(laws, 2.5, 0.5));
}
BENCHMARK(BM_RenormPair);

void BM_GeometryFrame(benchmark::State& st) {
  const Problem p = disk_case(static_cast<int>(st.range(0)));
  GeometryTracker tracker(p.domain, p.grid, p.penalty);
  for (auto _ : st) {
    benchmark::DoNotOptimize(tracker.peek(1e-3).phi.data());
    tracker.commit();
  }
  st.SetItemsProcessed(st.iterations() * static_cast<long>(p.grid.cells()));
}
BENCHMARK(BM_GeometryFrame)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Tendencies(benchmark::State& st) {
  const Problem p = disk_case(static_cast<int>(st.range(0)));
  const Solver solver(p);
  const FieldState s = solver.initial_state();
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_tendencies(p, s, solver.frame()).rho.data());
  st.SetItemsProcessed(st.iterations() * static_cast<long>(p.grid.cells()));
}
BENCHMARK(BM_Tendencies)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& st) {
  const Problem p = disk_case(static_cast<int>(st.range(0)));
  Solver solver(p);
  FieldState s = solver.initial_state();
  for (auto _ : st) benchmark::DoNotOptimize(solver.step(s, 1e9).dt);
  st.SetItemsProcessed(st.iterations() * static_cast<long>(p.grid.cells()));
}
BENCHMARK(BM_Step)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_ThermalMonitors(benchmark::State& st) {
  const Problem p = disk_case(64);
  Solver solver(p);
  FieldState s = solver.initial_state();
  const FieldState before = s;
  const StepRecord rec = solver.step(s, 1e9, true);
  std::vector<std::vector<double>> psis{TestFunction::constant().sample(p.grid)};
  for (int k = 1; k < st.range(0); ++k)
    psis.push_back(TestFunction::bump("b", {0.2, 0.0, 0.0}, 0.02 * k, 0.1 + 0.02 * k).sample(p.grid));
  for (auto _ : st) benchmark::DoNotOptimize(thermal_residuals(p, before, s, rec, psis).data());
}
BENCHMARK(BM_ThermalMonitors)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Diagnostics(benchmark::State& st) {
  const Problem p = disk_case(128);
  const Solver solver(p);
  const FieldState s = solver.initial_state();
  for (auto _ : st) {
    benchmark::DoNotOptimize(total_mass(s));
    benchmark::DoNotOptimize(energy_parts(p, s).total());
    benchmark::DoNotOptimize(penalty_integral(s, solver.frame(), 1e-3, 0.0));
    benchmark::DoNotOptimize(solid_mass(s, solver.frame()));
  }
}
BENCHMARK(BM_Diagnostics)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
