#include <cmath>
#include <complex>
#include <limits>

#include <gtest/gtest.h>

#include "dipolegate/dynamics.hpp"
#include "dipolegate/errors.hpp"

namespace dg = dipolegate;
namespace dyn = dipolegate::dynamics;
using dyn::Complex;
using dyn::Manifold;
using dyn::Matrix;
using dyn::Molecule;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Oracle: classical RK4 on i dpsi/dt = H psi with many small steps.
Matrix rk4_propagator(const Matrix& h, double t, int steps) {
  const Complex mi(0.0, -1.0);
  const double dt = t / steps;
  Matrix psi = Matrix::Identity(h.rows(), h.cols());
  for (int s = 0; s < steps; ++s) {
    const Matrix k1 = mi * h * psi;
    const Matrix k2 = mi * h * (psi + 0.5 * dt * k1);
    const Matrix k3 = mi * h * (psi + 0.5 * dt * k2);
    const Matrix k4 = mi * h * (psi + dt * k3);
    psi += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return psi;
}

dyn::GateMatrix diag(Complex a, Complex b, Complex c, Complex d) {
  dyn::GateMatrix g = dyn::GateMatrix::Zero();
  g.diagonal() << a, b, c, d;
  return g;
}

double max_diff(const dyn::GateMatrix& a, const dyn::GateMatrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

dyn::GateResult direct(double u, double omega, dyn::GateOptions opts = {}) {
  dyn::InteractionSpec inter;
  inter.u_ee = u;
  return dyn::run_direct_gate(dyn::LevelScheme::direct(), inter, omega, omega, opts);
}

}  // namespace

TEST(LevelScheme, FactoriesAndLookup) {
  const auto d = dyn::LevelScheme::direct();
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.index_of("e"), 2u);
  EXPECT_FALSE(d.find("1'").has_value());
  EXPECT_THROW(d.index_of("x"), dg::UnknownTransition);
  const auto inv = dyn::LevelScheme::inverted(1e-18, 0.0, 1e-3);
  EXPECT_EQ(inv.size(), 4u);
  EXPECT_TRUE(inv.has_decay());
  EXPECT_EQ(inv.level(inv.index_of("1'")).manifold, Manifold::storage);
  EXPECT_THROW(dyn::LevelScheme({{"0", Manifold::storage}, {"0", Manifold::excited}}),
               dg::InvalidArgument);
  EXPECT_THROW(dyn::LevelScheme({{"0", Manifold::storage}, {"e", Manifold::excited}}),
               dg::InvalidArgument);
}

TEST(PulseSpec, FactoriesEnforceAreas) {
  const auto p = dyn::PulseSpec::pi(Molecule::control, {"1", "e"}, 2e5);
  EXPECT_NEAR(p.duration, M_PI / 2e5, 1e-20);
  const auto q = dyn::PulseSpec::two_pi(Molecule::target, {"1", "e"}, 2e5);
  EXPECT_NEAR(q.duration, 2.0 * M_PI / 2e5, 1e-20);
  auto bad = p;
  bad.duration *= 1.1;
  EXPECT_THROW(bad.validate(), dg::InvalidArgument);
  EXPECT_THROW(dyn::PulseSpec::pi(Molecule::control, {"1", "e"}, 0.0), dg::InvalidArgument);
  EXPECT_THROW(dyn::PulseSpec::ideal_transfer(Molecule::control, {"1", "1'"}, 1.5), dg::InvalidArgument);
  EXPECT_THROW(dyn::PulseSpec::custom(Molecule::control, {"1", "1"}, 1.0, 1.0), dg::InvalidArgument);
}

TEST(Hamiltonian, MatchesHandBuiltMatrix) {
  const auto scheme = dyn::LevelScheme::direct();
  dyn::InteractionSpec inter;
  inter.u_ee = 3.0e5;
  inter.u_e1 = 4.0e4;
  inter.u_gg = 1.0e3;
  auto pulse = dyn::PulseSpec::custom(Molecule::target, {"1", "e"}, 7e4, 1e-5, 2e3);
  pulse.phase = 0.4;
  const Matrix h = dyn::build_hamiltonian(scheme, inter, std::span(&pulse, 1));

  // Control on the right: index = target * 3 + control; levels 0, 1, e = 0, 1, 2.
  const auto at = [](int control, int target) { return target * 3 + control; };
  const auto shift = [&](int c, int t) {
    const int excited = (c == 2) + (t == 2);
    return excited == 0 ? inter.u_gg : excited == 1 ? inter.u_e1 : inter.u_ee;
  };
  const double tuned = inter.u_e1 - inter.u_gg + pulse.detuning;
  Matrix ref = Matrix::Zero(9, 9);
  for (int c = 0; c < 3; ++c) {
    for (int t = 0; t < 3; ++t) ref(at(c, t), at(c, t)) = shift(c, t) - (t == 2 ? tuned : 0.0);
  }
  const Complex g = -0.5 * pulse.rabi * std::exp(Complex(0.0, pulse.phase));
  for (int c = 0; c < 3; ++c) {
    ref(at(c, 2), at(c, 1)) = g;
    ref(at(c, 1), at(c, 2)) = std::conj(g);
  }
  EXPECT_LT((h - ref).cwiseAbs().maxCoeff(), 1e-9);
  EXPECT_LT((h - h.adjoint()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Hamiltonian, InfiniteShiftRemovesBlockadedCouplings) {
  const auto scheme = dyn::LevelScheme::direct();
  dyn::InteractionSpec inter;
  inter.u_ee = kInf;
  const auto pulse = dyn::PulseSpec::two_pi(Molecule::target, {"1", "e"}, 1e5);
  const Matrix h = dyn::build_hamiltonian(scheme, inter, std::span(&pulse, 1));
  // Control in |e> (index 2): no coupling of |1>_t <-> |e>_t.
  EXPECT_EQ(std::abs(h(2 * 3 + 2, 1 * 3 + 2)), 0.0);
  EXPECT_GT(std::abs(h(2 * 3 + 1, 1 * 3 + 1)), 0.0);
  EXPECT_TRUE(h.allFinite());
}

TEST(Propagation, ExactExponentialMatchesRk4) {
  const auto scheme = dyn::LevelScheme::inverted();
  dyn::InteractionSpec inter;
  inter.u_ee = 2e5;
  inter.u_e1 = -3e4;
  inter.u_gg = 1e5;
  const std::vector<dyn::PulseSpec> pulses = {
      dyn::PulseSpec::custom(Molecule::target, {"1'", "e"}, 1.3e5, 1e-5, 1e4),
      dyn::PulseSpec::custom(Molecule::control, {"1", "e"}, 0.7e5, 1e-5, -2e4)};
  const Matrix h = dyn::build_hamiltonian(scheme, inter, pulses);
  const double t = 3.7e-5;
  EXPECT_LT((dyn::segment_propagator(h, t) - rk4_propagator(h, t, 20000)).cwiseAbs().maxCoeff(), 1e-9);

  // Non-Hermitian path with decay.
  const auto lossy = dyn::LevelScheme::inverted(0.0, 0.0, 2e-5);
  const Matrix hl = dyn::build_hamiltonian(lossy, inter, pulses) + dyn::decay_operator(lossy);
  EXPECT_LT((dyn::segment_propagator(hl, t) - rk4_propagator(hl, t, 20000)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Propagation, SubsteppingDoesNotChangeTheResult) {
  const auto scheme = dyn::LevelScheme::direct();
  dyn::InteractionSpec inter;
  inter.u_ee = 5e5;
  const auto pulse = dyn::PulseSpec::two_pi(Molecule::target, {"1", "e"}, 1e5);
  const std::vector<dyn::Segment> seg = {{dyn::build_hamiltonian(scheme, inter, std::span(&pulse, 1)),
                                          pulse.duration}};
  dyn::Vector psi0 = dyn::Vector::Zero(9);
  psi0(1 * 3 + 1) = 1.0;
  int calls = 0;
  const auto a = dyn::propagate(seg, psi0, pulse.duration / 7.0, [&](double, const dyn::Vector&) { ++calls; });
  const auto b = dyn::propagate(seg, psi0, pulse.duration);
  EXPECT_EQ(calls, 7);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(dyn::propagate(seg, 2.0 * psi0, 1e-6), dg::InvalidArgument);
  EXPECT_THROW(dyn::propagate(seg, psi0, 0.0), dg::InvalidArgument);
}

TEST(DirectGate, IdealBlockadeIsExactPhaseGate) {
  const auto g = direct(kInf, 1e5);
  EXPECT_LT(max_diff(g.basis_map, dyn::ideal_phase_gate()), 1e-10);
  EXPECT_NEAR(g.fidelity, 1.0, 1e-12);
  EXPECT_NEAR(g.gate_time, 4.0 * M_PI / 1e5, 1e-15);
}

TEST(DirectGate, StrongBlockadeLimit) {
  const auto g = direct(1e9, 1e5);
  EXPECT_GT(g.fidelity, 0.9999);
  for (double l : g.leakage) EXPECT_LT(l, 1e-6);
  EXPECT_LT(max_diff(g.basis_map, dyn::ideal_phase_gate()), 1e-3);
}

TEST(DirectGate, ResidualPhaseAtCoParameters) {
  const double u = 18.7 * 1e5;
  const auto g = direct(u, 1e5);
  const double estimate = M_PI * 1e5 / (2.0 * u);
  EXPECT_NEAR(std::abs(g.residual_phase_11()) / estimate, 1.0, 0.3);
  EXPECT_GE(g.fidelity, 0.99);
}

TEST(DirectGate, ControlSlotIsAConvention) {
  dyn::GateOptions left;
  left.layout.control_slot = dyn::ControlSlot::left;
  const auto a = direct(3e5, 1e5);
  const auto b = direct(3e5, 1e5, left);
  // Swapping the slots swaps |01> and |10>.
  Eigen::Matrix4cd p = Eigen::Matrix4cd::Zero();
  p(0, 0) = p(1, 2) = p(2, 1) = p(3, 3) = 1.0;
  EXPECT_LT(max_diff(p * a.basis_map * p, b.basis_map), 1e-12);
  EXPECT_NEAR(a.fidelity, b.fidelity, 1e-12);
}

TEST(DirectGate, FirstPulseMapsControlToExcited) {
  // |01>: target in |0>, control in |1>; the first pi pulse maps it to i|0e>.
  const auto scheme = dyn::LevelScheme::direct();
  const auto pulse = dyn::PulseSpec::pi(Molecule::control, {"1", "e"}, 1e5);
  const Matrix h = dyn::build_hamiltonian(scheme, {}, std::span(&pulse, 1));
  dyn::Vector psi = dyn::Vector::Zero(9);
  psi(0 * 3 + 1) = 1.0;
  const dyn::Vector out = dyn::segment_propagator(h, pulse.duration) * psi;
  EXPECT_NEAR(std::abs(out(0 * 3 + 2) - Complex(0.0, 1.0)), 0.0, 1e-12);
}

TEST(DirectGate, DecayOnlyRemovesNorm) {
  dyn::InteractionSpec inter;
  inter.u_ee = kInf;
  dyn::GateOptions opts;
  opts.include_decay = true;
  const auto g = dyn::run_direct_gate(dyn::LevelScheme::direct(0.0, 0.0, 1e-3), inter, 1e5, 1e5, opts);
  EXPECT_EQ(g.leakage[0], 0.0);
  for (int k = 1; k < 4; ++k) {
    EXPECT_GT(g.leakage[k], 0.0);
    EXPECT_LT(g.leakage[k], 0.2);
  }
}

TEST(InvertedGate, PhaseTableWithIdealBlockade) {
  const double omega = 1e5;
  const double window = 2.0 * M_PI / omega;
  const double phi = 0.3, phi_tilde = 0.7;
  auto inter = dyn::InteractionSpec::with_accumulated_phases(phi, phi_tilde, window);
  inter.u_gg = kInf;
  const auto g = dyn::run_inverted_gate(dyn::LevelScheme::inverted(), inter, 6e4, omega);
  const auto e = [](double x) { return std::exp(Complex(0.0, x)); };
  // |q_target q_control>: both storage, control excited, both storage, 2pi pulse.
  const auto expected = diag(e(2 * phi), -e(phi_tilde), e(2 * phi), e(phi_tilde / 2));
  EXPECT_LT(max_diff(g.basis_map, expected), 1e-9);
  EXPECT_NEAR(g.peak_target_excitation[3], 1.0, 1e-6);
  EXPECT_LT(g.peak_target_excitation[2], 1e-12);
}

TEST(InvertedGate, HalfPhaseGateAndTwice) {
  const double omega = 1e5;
  auto inter = dyn::InteractionSpec::with_accumulated_phases(M_PI, M_PI, 2.0 * M_PI / omega);
  inter.u_gg = kInf;
  const auto once = dyn::run_inverted_gate(dyn::LevelScheme::inverted(), inter, omega, omega);
  EXPECT_LT(max_diff(once.basis_map, dyn::ideal_half_phase_gate()), 1e-9);
  dyn::GateOptions twice;
  twice.repetitions = 2;
  const auto two = dyn::run_inverted_gate(dyn::LevelScheme::inverted(), inter, omega, omega, twice);
  EXPECT_LT(max_diff(two.basis_map, diag(1, 1, 1, -1)), 1e-8);
  EXPECT_NEAR(two.fidelity, 1.0, 1e-12);
  EXPECT_NEAR(two.gate_time, 2.0 * once.gate_time, 1e-15);
}

TEST(InvertedGate, OccupationBookkeepingFromLatticeRates) {
  // lattice_sum_rate and pair_phase_rate enter like the DC rates.
  const double omega = 1e5, window = 2.0 * M_PI / omega;
  dyn::InteractionSpec a = dyn::InteractionSpec::with_accumulated_phases(0.4, 0.9, window);
  a.u_gg = kInf;
  dyn::InteractionSpec b;
  b.u_gg = kInf;
  b.lattice_sum_rate = 0.4 / window;
  b.pair_phase_rate = -0.5 / window;
  const auto ga = dyn::run_inverted_gate(dyn::LevelScheme::inverted(), a, omega, omega);
  const auto gb = dyn::run_inverted_gate(dyn::LevelScheme::inverted(), b, omega, omega);
  EXPECT_LT(max_diff(ga.basis_map, gb.basis_map), 1e-9);
}

TEST(InvertedGate, DcSwitchedOffDuringWindow) {
  const double omega = 1e5;
  auto inter = dyn::InteractionSpec::with_accumulated_phases(M_PI, M_PI, 2.0 * M_PI / omega);
  inter.u_gg = kInf;
  dyn::GateOptions opts;
  opts.dc_on_during_2pi = false;
  const auto g = dyn::run_inverted_gate(dyn::LevelScheme::inverted(), inter, omega, omega, opts);
  // No accumulated phase: only the sign of the resonant 2pi pulse and the
  // control pi-pulse pair remain.
  EXPECT_LT(max_diff(g.basis_map, diag(1, -1, 1, 1)), 1e-9);
}

TEST(InvertedGate, BlockadeKeepsTargetInStorage) {
  dyn::InteractionSpec inter;
  inter.u_gg = 5e5;
  inter.u_e1 = 4e4;
  const auto g = dyn::run_inverted_gate(dyn::LevelScheme::inverted(), inter, 6e4, 1e5);
  EXPECT_LT(g.peak_target_excitation[2], 0.1);
  EXPECT_GT(g.peak_target_excitation[3], 0.9);
}

TEST(InvertedGate, TransferEfficiencyLosesPopulation) {
  dyn::InteractionSpec inter;
  inter.u_gg = kInf;
  dyn::GateOptions opts;
  opts.transfer_efficiency = 0.9;
  const auto g = dyn::run_inverted_gate(dyn::LevelScheme::inverted(), inter, 1e5, 1e5, opts);
  EXPECT_LT(g.fidelity, 0.99);
  EXPECT_EQ(g.leakage[0], 0.0);
  EXPECT_THROW(dyn::run_inverted_gate(dyn::LevelScheme::direct(), inter, 1e5, 1e5), dg::UnknownTransition);
}

TEST(Gate, TimesAndFidelity) {
  EXPECT_NEAR(dyn::gate_time(1e5, 1e5), 125.66370614359172e-6, 1e-18);
  EXPECT_NEAR(dyn::gate_time(2e3, 2e3), 6.283185307179586e-3, 1e-15);
  EXPECT_NEAR(dyn::gate_time_from_durations(M_PI / 3e5, 2.0 * M_PI / 2e4), dyn::gate_time(3e5, 2e4), 1e-18);
  EXPECT_THROW(dyn::gate_time(0.0, 1.0), dg::InvalidArgument);
  const auto g = dyn::ideal_phase_gate();
  EXPECT_NEAR(dyn::gate_fidelity(Complex(0.0, 1.0) * g, g), 1.0, 1e-15);
  EXPECT_NEAR(dyn::gate_fidelity(dyn::GateMatrix::Identity(), g), 0.25, 1e-15);
}
