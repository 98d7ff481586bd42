#include <benchmark/benchmark.h>

#include "dipolegate/geometry.hpp"

namespace geo = dipolegate::geometry;
using dipolegate::Quantity;
using dipolegate::Unit;

static void BM_MonteCarlo(benchmark::State& state) {
  geo::GeometryDistribution dist;
  const Quantity mu(1.37, Unit::debye);
  dist.mean = geo::DipoleGeometry::equilibrium(mu, mu, Quantity(500, Unit::nanometer));
  dist.sigma_r = Quantity(1.5, Unit::nanometer).base();
  dist.sigma_theta = 0.05;
  geo::MonteCarloOptions opts;
  opts.n_samples = 100000;
  opts.workers = static_cast<unsigned>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(geo::phase_error_monte_carlo(dist, 1.0, opts).rel_rms_error);
}
BENCHMARK(BM_MonteCarlo)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_DipolePhase(benchmark::State& state) {
  const Quantity mu(1.37, Unit::debye);
  auto g = geo::DipoleGeometry::equilibrium(mu, mu, Quantity(500, Unit::nanometer));
  for (auto _ : state) {
    g.theta1 += 1e-9;
    benchmark::DoNotOptimize(geo::dipole_phase(g, 1.0));
  }
}
BENCHMARK(BM_DipolePhase);
