#include <benchmark/benchmark.h>

#include "magflow/geodesics.hpp"
#include "magflow/spectrum.hpp"

namespace {

magflow::HeisGeodesic sample_geo() {
  magflow::HeisGeodesic g;
  g.A = Eigen::VectorXd::Constant(1, 2.0);
  g.B = 0.7;
  g.u = Eigen::VectorXd::Constant(1, 1.1);
  g.v = Eigen::VectorXd::Constant(1, -0.4);
  g.z0 = 0.3;
  return g;
}

void BM_heis_eval(benchmark::State& state) {
  const auto g = sample_geo();
  double t = 0.0;
  for (auto _ : state) {
    t += 1e-3;
    benchmark::DoNotOptimize(magflow::heis_eval(g, t));
  }
}
BENCHMARK(BM_heis_eval);

void BM_integrate_numeric(benchmark::State& state) {
  const auto g = sample_geo();
  const auto sys = magflow::heis_system(g);
  const auto p0 = magflow::heis_momentum(g);
  for (auto _ : state)
    benchmark::DoNotOptimize(magflow::integrate_numeric(sys, p0, 1.0, 1000));
}
BENCHMARK(BM_integrate_numeric);

void BM_central_spirals(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(
        magflow::central_spiral_families(40.0, 2.0, 0.5, 1.0, 10000));
}
BENCHMARK(BM_central_spirals);

}  // namespace

BENCHMARK_MAIN();
