#include <benchmark/benchmark.h>

#include "tidal/curvature.hpp"
#include "tidal/dynamics.hpp"
#include "tidal/scenario.hpp"
#include "tidal/verify.hpp"

using namespace tidal;

namespace {

const Scenario& suite_member(std::size_t k) {
  static const auto suite = default_suite();
  return suite[k];
}

void BM_FieldSample(benchmark::State& state) {
  const auto& sc = suite_member(static_cast<std::size_t>(state.range(0)));
  const auto g = sc.metric_field();
  const auto A = sc.potential_field();
  for (auto _ : state) benchmark::DoNotOptimize(sample_fields(g, A, sc.x0));
  state.SetLabel(sc.id);
}
BENCHMARK(BM_FieldSample)->DenseRange(0, 3);

void BM_Packet(benchmark::State& state) {
  const auto& sc = suite_member(static_cast<std::size_t>(state.range(0)));
  const auto g = sc.metric_field();
  const auto A = sc.potential_field();
  const auto y = sc.initial_velocity();
  for (auto _ : state) benchmark::DoNotOptimize(compute_packet(g, A, {1.0, 0.0}, sc.x0, y));
  state.SetLabel(sc.id);
}
BENCHMARK(BM_Packet)->DenseRange(0, 3);

void BM_ChecksAtPoint(benchmark::State& state) {
  const auto& sc = suite_member(static_cast<std::size_t>(state.range(0)));
  const auto p = sample_phase_points(sc, 1, 1)[0];
  for (auto _ : state) benchmark::DoNotOptimize(run_checks(make_context(sc, p.x, p.y, 1.0)));
  state.SetLabel(sc.id);
}
BENCHMARK(BM_ChecksAtPoint)->DenseRange(0, 3);

void BM_CyclotronPeriod(benchmark::State& state) {
  const auto g = builtin_metric("minkowski");
  const auto A = builtin_potential("uniform_b", {{"B", 0.7}, {"axis", 3}});
  IntegratorConfig cfg;
  cfg.t_end = 9.0;
  cfg.samples = 100;
  for (auto _ : state)
    benchmark::DoNotOptimize(integrate_worldline(g, A, {1.0, 0.0}, {0, 1, 1, 1}, {1.044, 0.3, 0, 0}, cfg));
}
BENCHMARK(BM_CyclotronPeriod)->Unit(benchmark::kMillisecond);

void BM_Suite(benchmark::State& state) {
  SuiteConfig cfg;
  cfg.points = static_cast<std::size_t>(state.range(0));
  cfg.alphas = {1.0};
  for (auto _ : state) benchmark::DoNotOptimize(run_suite(default_suite(), cfg));
}
BENCHMARK(BM_Suite)->Arg(10)->Arg(50)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
