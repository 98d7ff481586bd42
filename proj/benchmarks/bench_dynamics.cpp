#include <benchmark/benchmark.h>

#include <limits>

#include "dipolegate/dynamics.hpp"

namespace dyn = dipolegate::dynamics;

static void BM_DirectGate(benchmark::State& state) {
  const auto scheme = dyn::LevelScheme::direct();
  dyn::InteractionSpec inter;
  inter.u_ee = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dyn::run_direct_gate(scheme, inter, 1e5, 1e5).fidelity);
}
BENCHMARK(BM_DirectGate)->Arg(1000000)->Arg(1000000000);

static void BM_InvertedGate(benchmark::State& state) {
  const auto scheme = dyn::LevelScheme::inverted();
  auto inter = dyn::InteractionSpec::with_accumulated_phases(3.14159, 3.14159, 2.0 * 3.14159 / 1e5);
  inter.u_gg = std::numeric_limits<double>::infinity();
  for (auto _ : state) benchmark::DoNotOptimize(dyn::run_inverted_gate(scheme, inter, 6e4, 1e5).fidelity);
}
BENCHMARK(BM_InvertedGate);

static void BM_Propagate(benchmark::State& state) {
  const auto scheme = dyn::LevelScheme::inverted();
  dyn::InteractionSpec inter;
  inter.u_ee = 1e6;
  const auto pulse = dyn::PulseSpec::two_pi(dyn::Molecule::target, {"1", "e"}, 1e5);
  std::vector<dyn::Segment> segments = {{dyn::build_hamiltonian(scheme, inter, std::span(&pulse, 1)), pulse.duration}};
  dyn::Vector psi = dyn::Vector::Zero(16);
  psi(0) = 1.0;
  const double dt = pulse.duration / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dyn::propagate(segments, psi, dt));
}
BENCHMARK(BM_Propagate)->Arg(10)->Arg(200)->Arg(2000);
