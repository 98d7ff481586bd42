#include "dipolegate/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <unsupported/Eigen/MatrixFunctions>

#include "dipolegate/errors.hpp"
#include "dipolegate/units.hpp"

namespace dipolegate::dynamics {

namespace {

using constants::kPi;
using constants::kTwoPi;

const Complex kI{0.0, 1.0};

// Interaction class of a two-molecule configuration.
enum ShiftClass { kGroundGround = 0, kMixed = 1, kExcitedExcited = 2 };

ShiftClass shift_class(Manifold a, Manifold b) {
  const int excited = (a == Manifold::excited) + (b == Manifold::excited);
  return static_cast<ShiftClass>(excited);
}

// Interaction shift split into a finite part and an ideal-blockade marker.
struct Shift {
  double finite = 0.0;
  std::array<int, 3> infinite{};
};

Shift shift_of(const InteractionSpec& inter, Manifold a, Manifold b) {
  const ShiftClass c = shift_class(a, b);
  const double u = c == kGroundGround ? inter.u_gg : (c == kMixed ? inter.u_e1 : inter.u_ee);
  Shift s;
  if (std::isinf(u)) {
    s.infinite[c] = 1;
  } else {
    s.finite = u;
  }
  return s;
}

std::array<int, 3> infinite_difference(const Shift& upper, const Shift& lower) {
  std::array<int, 3> d{};
  for (int k = 0; k < 3; ++k) d[k] = upper.infinite[k] - lower.infinite[k];
  return d;
}

bool is_hermitian(const Matrix& h) {
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

bool near(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(b)); }

void require_label(const std::string& label) {
  if (label.empty()) throw InvalidArgument("level label must not be empty");
}

// Occupation integral G = int_0^tau U(s)^dagger R U(s) ds with U = exp(-iHs),
// from the block exponential of [[-iH^dagger, R], [0, -iH]].
Matrix occupation_integral(const Matrix& h, const Matrix& r, double tau) {
  const Eigen::Index n = h.rows();
  Matrix block = Matrix::Zero(2 * n, 2 * n);
  block.topLeftCorner(n, n) = -kI * h.adjoint() * tau;
  block.topRightCorner(n, n) = r * tau;
  block.bottomRightCorner(n, n) = -kI * h * tau;
  const Matrix e = block.exp();
  return segment_propagator(h, tau).adjoint() * e.topRightCorner(n, n);
}

Matrix transfer_unitary(const LevelScheme& scheme, const PulseSpec& p, const Layout& layout) {
  const std::size_t n = scheme.size();
  const std::size_t from = scheme.index_of(p.transition.lower);
  const std::size_t to = scheme.index_of(p.transition.upper);
  const double a = std::sqrt(p.efficiency);
  const double b = std::sqrt(1.0 - p.efficiency);
  Matrix u = Matrix::Identity(static_cast<Eigen::Index>(n * n), static_cast<Eigen::Index>(n * n));
  for (std::size_t x = 0; x < n; ++x) {
    const bool control = p.molecule == Molecule::control;
    const auto idx = [&](std::size_t level) {
      return static_cast<Eigen::Index>(control ? layout.index(level, x, n)
                                               : layout.index(x, level, n));
    };
    const Eigen::Index i_from = idx(from), i_to = idx(to);
    u(i_from, i_from) = b;
    u(i_to, i_from) = a;
    u(i_from, i_to) = -a;
    u(i_to, i_to) = b;
  }
  return u;
}

}  // namespace

LevelScheme::LevelScheme(std::vector<Level> levels) : levels_(std::move(levels)) {
  std::set<std::string> seen;
  for (const auto& l : levels_) {
    require_label(l.label);
    if (!seen.insert(l.label).second) throw InvalidArgument("duplicate level label '" + l.label + "'");
    if (!std::isfinite(l.dipole)) throw InvalidArgument("level dipole must be finite");
    if (!(l.lifetime > 0.0)) throw InvalidArgument("level lifetime must be positive");
  }
  if (!find("0") || !find("1")) throw InvalidArgument("level scheme needs levels '0' and '1'");
}

LevelScheme LevelScheme::direct(double storage_dipole, double excited_dipole,
                                double excited_lifetime) {
  return LevelScheme({{"0", Manifold::storage, storage_dipole, kNoDecay},
                      {"1", Manifold::storage, storage_dipole, kNoDecay},
                      {"e", Manifold::excited, excited_dipole, excited_lifetime}});
}

LevelScheme LevelScheme::inverted(double storage_dipole, double excited_dipole,
                                  double excited_lifetime) {
  return LevelScheme({{"0", Manifold::storage, storage_dipole, kNoDecay},
                      {"1", Manifold::storage, storage_dipole, kNoDecay},
                      {"1'", Manifold::storage, storage_dipole, kNoDecay},
                      {"e", Manifold::excited, excited_dipole, excited_lifetime}});
}

std::optional<std::size_t> LevelScheme::find(const std::string& label) const {
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (levels_[i].label == label) return i;
  }
  return std::nullopt;
}

std::size_t LevelScheme::index_of(const std::string& label) const {
  if (auto i = find(label)) return *i;
  throw UnknownTransition("level '" + label + "' is not part of the scheme");
}

bool LevelScheme::has_decay() const {
  return std::any_of(levels_.begin(), levels_.end(),
                     [](const Level& l) { return std::isfinite(l.lifetime); });
}

InteractionSpec InteractionSpec::with_accumulated_phases(double phi_ct, double phi_tilde,
                                                         double window) {
  if (!(window > 0.0)) throw InvalidArgument("phase window must be positive");
  InteractionSpec s;
  s.dc_phase_rate_g = phi_ct / window;
  s.dc_phase_rate_e = (phi_tilde - phi_ct) / window;
  return s;
}

void InteractionSpec::validate() const {
  for (double v : {dc_phase_rate_g, dc_phase_rate_e, lattice_sum_rate, pair_phase_rate}) {
    if (!std::isfinite(v)) throw InvalidArgument("phase rates must be finite");
  }
  for (double v : {u_ee, u_e1, u_gg}) {
    if (std::isnan(v)) throw InvalidArgument("interaction shifts must not be NaN");
  }
}

PulseSpec PulseSpec::pi(Molecule molecule, Transition transition, double rabi, Manifold tuned_for) {
  if (!(rabi > 0.0)) throw InvalidArgument("pi pulse needs a positive Rabi frequency");
  PulseSpec p;
  p.molecule = molecule;
  p.transition = std::move(transition);
  p.rabi = rabi;
  p.duration = kPi / rabi;
  p.kind = PulseKind::pi;
  p.tuned_for = tuned_for;
  p.validate();
  return p;
}

PulseSpec PulseSpec::two_pi(Molecule molecule, Transition transition, double rabi,
                            Manifold tuned_for) {
  if (!(rabi > 0.0)) throw InvalidArgument("2pi pulse needs a positive Rabi frequency");
  PulseSpec p = pi(molecule, std::move(transition), rabi, tuned_for);
  p.duration = kTwoPi / rabi;
  p.kind = PulseKind::two_pi;
  p.validate();
  return p;
}

PulseSpec PulseSpec::custom(Molecule molecule, Transition transition, double rabi,
                            double duration, double detuning) {
  PulseSpec p;
  p.molecule = molecule;
  p.transition = std::move(transition);
  p.rabi = rabi;
  p.duration = duration;
  p.detuning = detuning;
  p.kind = PulseKind::custom;
  p.validate();
  return p;
}

PulseSpec PulseSpec::ideal_transfer(Molecule molecule, Transition transition, double efficiency,
                                    double duration) {
  PulseSpec p;
  p.molecule = molecule;
  p.transition = std::move(transition);
  p.duration = duration;
  p.efficiency = efficiency;
  p.kind = PulseKind::ideal_transfer;
  p.validate();
  return p;
}

void PulseSpec::validate() const {
  require_label(transition.lower);
  require_label(transition.upper);
  if (transition.lower == transition.upper) throw InvalidArgument("transition levels must differ");
  if (!(rabi >= 0.0) || !std::isfinite(rabi)) throw InvalidArgument("Rabi frequency must be >= 0");
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw InvalidArgument("pulse duration must be positive");
  }
  if (!std::isfinite(detuning) || !std::isfinite(phase)) {
    throw InvalidArgument("detuning and phase must be finite");
  }
  switch (kind) {
    case PulseKind::pi:
      if (!near(rabi * duration, kPi)) throw InvalidArgument("pi pulse needs rabi * duration = pi");
      break;
    case PulseKind::two_pi:
      if (!near(rabi * duration, kTwoPi)) {
        throw InvalidArgument("2pi pulse needs rabi * duration = 2 pi");
      }
      break;
    case PulseKind::ideal_transfer:
      if (!(efficiency > 0.0 && efficiency <= 1.0)) {
        throw InvalidArgument("transfer efficiency must lie in (0, 1]");
      }
      break;
    case PulseKind::custom: break;
  }
}

std::size_t Layout::slot_of(Molecule m) const {
  const bool control_right = control_slot == ControlSlot::right;
  return (m == Molecule::control) == control_right ? 1 : 0;
}

std::size_t Layout::index(std::size_t control_level, std::size_t target_level,
                          std::size_t n) const {
  return control_slot == ControlSlot::right ? target_level * n + control_level
                                            : control_level * n + target_level;
}

Matrix build_hamiltonian(const LevelScheme& scheme, const InteractionSpec& inter,
                         std::span<const PulseSpec> active, const Layout& layout) {
  inter.validate();
  const std::size_t n = scheme.size();
  const auto dim = static_cast<Eigen::Index>(n * n);
  Matrix h = Matrix::Zero(dim, dim);
  const auto manifold = [&](std::size_t i) { return scheme.level(i).manifold; };

  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t t = 0; t < n; ++t) {
      const auto i = static_cast<Eigen::Index>(layout.index(c, t, n));
      h(i, i) += shift_of(inter, manifold(c), manifold(t)).finite;
    }
  }

  for (const PulseSpec& p : active) {
    p.validate();
    if (p.kind == PulseKind::ideal_transfer) continue;
    const std::size_t lo = scheme.index_of(p.transition.lower);
    const std::size_t up = scheme.index_of(p.transition.upper);
    const bool control = p.molecule == Molecule::control;
    const auto idx = [&](std::size_t driven, std::size_t spectator) {
      return static_cast<Eigen::Index>(control ? layout.index(driven, spectator, n)
                                               : layout.index(spectator, driven, n));
    };
    // Transition shift at the tuning point is absorbed in the laser frequency.
    const Shift ref_up = shift_of(inter, manifold(up), p.tuned_for);
    const Shift ref_lo = shift_of(inter, manifold(lo), p.tuned_for);
    const double tuned = ref_up.finite - ref_lo.finite + p.detuning;
    const auto ref_gap = infinite_difference(ref_up, ref_lo);
    const Complex coupling = -0.5 * p.rabi * std::exp(kI * p.phase);

    for (std::size_t x = 0; x < n; ++x) {
      const Eigen::Index i_up = idx(up, x), i_lo = idx(lo, x);
      h(i_up, i_up) -= tuned;
      const auto gap = infinite_difference(shift_of(inter, manifold(up), manifold(x)),
                                           shift_of(inter, manifold(lo), manifold(x)));
      if (gap != ref_gap) continue;  // infinitely detuned: blockaded
      h(i_up, i_lo) += coupling;
      h(i_lo, i_up) += std::conj(coupling);
    }
  }
  return h;
}

Matrix decay_operator(const LevelScheme& scheme) {
  const std::size_t n = scheme.size();
  const auto dim = static_cast<Eigen::Index>(n * n);
  Matrix d = Matrix::Zero(dim, dim);
  const auto rate = [&](std::size_t i) {
    const double tau = scheme.level(i).lifetime;
    return std::isfinite(tau) ? 1.0 / tau : 0.0;
  };
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const auto i = static_cast<Eigen::Index>(a * n + b);
      d(i, i) = -0.5 * kI * (rate(a) + rate(b));
    }
  }
  return d;
}

Matrix segment_propagator(const Matrix& hamiltonian, double t) {
  if (is_hermitian(hamiltonian)) {
    const Matrix herm = 0.5 * (hamiltonian + hamiltonian.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm);
    if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
    const Eigen::VectorXcd phases =
        (-kI * t * solver.eigenvalues().cast<Complex>()).array().exp().matrix();
    return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
  }
  const Matrix a = -kI * t * hamiltonian;
  return a.exp();
}

Vector propagate(std::span<const Segment> segments, const Vector& psi0, double dt_max,
                 const Observer& observer) {
  if (!(dt_max > 0.0)) throw InvalidArgument("dt_max must be positive");
  if (std::abs(psi0.norm() - 1.0) > 1e-10) throw InvalidArgument("initial state must be normalized");
  Vector psi = psi0;
  double t = 0.0;
  for (const Segment& seg : segments) {
    if (seg.hamiltonian.rows() != psi.size() || seg.hamiltonian.cols() != psi.size()) {
      throw InvalidArgument("segment Hamiltonian does not match the state dimension");
    }
    if (!(seg.duration >= 0.0)) throw InvalidArgument("segment duration must be non-negative");
    if (seg.duration == 0.0) continue;
    const auto steps = static_cast<long>(std::ceil(seg.duration / dt_max * (1.0 - 1e-12)));
    const double dt = seg.duration / static_cast<double>(steps);
    const Matrix u = segment_propagator(seg.hamiltonian, dt);
    for (long s = 0; s < steps; ++s) {
      psi = u * psi;
      t += dt;
      if (observer) observer(t, psi);
    }
  }
  return psi;
}

double GateResult::residual_phase_11() const {
  return std::arg(basis_map(3, 3) / ideal(3, 3));
}

GateResult run_sequence(const LevelScheme& scheme, const InteractionSpec& inter,
                        const PulseSequence& sequence, const GateMatrix& ideal,
                        const SequenceOptions& options) {
  inter.validate();
  if (sequence.empty()) throw InvalidArgument("pulse sequence is empty");
  if (options.repetitions < 1) throw InvalidArgument("repetitions must be at least 1");
  const std::size_t n = scheme.size();
  const Layout& layout = options.layout;
  const auto dim = static_cast<Eigen::Index>(n * n);
  const auto manifold = [&](std::size_t i) { return scheme.level(i).manifold; };

  double shortest = std::numeric_limits<double>::infinity();
  for (const auto& p : sequence) {
    p.validate();
    if (p.kind != PulseKind::ideal_transfer) shortest = std::min(shortest, p.duration);
  }
  const double dt_max =
      options.dt_max > 0.0 ? options.dt_max : (std::isfinite(shortest) ? shortest / 200.0 : 1.0);

  // Columns start in the computational states |q_left q_right>.
  const std::size_t q0 = scheme.index_of("0"), q1 = scheme.index_of("1");
  std::array<Eigen::Index, 4> comp{};
  for (int k = 0; k < 4; ++k) {
    const std::size_t left = (k >> 1) ? q1 : q0;
    const std::size_t right = (k & 1) ? q1 : q0;
    comp[k] = static_cast<Eigen::Index>(left * n + right);
  }
  Matrix psi = Matrix::Zero(dim, 4);
  for (int k = 0; k < 4; ++k) psi(comp[k], k) = 1.0;

  // Diagonal observables on the product space.
  Eigen::VectorXd target_excited = Eigen::VectorXd::Zero(dim);
  Matrix rate = Matrix::Zero(dim, dim);
  const double dc_g = options.dc_on_during_window ? inter.dc_phase_rate_g : 0.0;
  const double dc_e = options.dc_on_during_window ? inter.dc_phase_rate_e : 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t t = 0; t < n; ++t) {
      const auto i = static_cast<Eigen::Index>(layout.index(c, t, n));
      if (manifold(t) == Manifold::excited) {
        target_excited(i) = 1.0;
      } else if (manifold(c) == Manifold::storage) {
        rate(i, i) = 2.0 * (inter.lattice_sum_rate + dc_g);
      } else {
        rate(i, i) = inter.lattice_sum_rate - inter.pair_phase_rate + dc_g + dc_e;
      }
    }
  }
  const Matrix loss = options.include_decay ? decay_operator(scheme) : Matrix::Zero(dim, dim);

  GateResult result;
  // Repeating the sequence repeats the target gate as well.
  result.ideal = GateMatrix::Identity();
  for (int rep = 0; rep < options.repetitions; ++rep) result.ideal = ideal * result.ideal;
  std::array<double, 4> window_phase{};
  const auto record_peak = [&](const Matrix& state) {
    for (int k = 0; k < 4; ++k) {
      const double p = (target_excited.array() * state.col(k).array().abs2()).sum();
      result.peak_target_excitation[k] = std::max(result.peak_target_excitation[k], p);
    }
  };

  for (int rep = 0; rep < options.repetitions; ++rep) {
    for (const PulseSpec& p : sequence) {
      result.gate_time += p.duration;
      if (p.kind == PulseKind::ideal_transfer) {
        psi = transfer_unitary(scheme, p, layout) * psi;
        record_peak(psi);
        continue;
      }
      const Matrix h = build_hamiltonian(scheme, inter, std::span(&p, 1), layout) + loss;
      if (p.phase_window) {
        const Matrix g = occupation_integral(h, rate, p.duration);
        for (int k = 0; k < 4; ++k) {
          window_phase[k] += (psi.col(k).adjoint() * g * psi.col(k))(0, 0).real();
        }
      }
      const auto steps = static_cast<long>(std::ceil(p.duration / dt_max * (1.0 - 1e-12)));
      const Matrix u = segment_propagator(h, p.duration / static_cast<double>(steps));
      for (long s = 0; s < steps; ++s) {
        psi = u * psi;
        record_peak(psi);
      }
    }
  }

  for (int k = 0; k < 4; ++k) {
    psi.col(k) *= std::exp(kI * window_phase[k]);
    for (int j = 0; j < 4; ++j) result.basis_map(j, k) = psi(comp[j], k);
    result.leakage[k] = std::max(0.0, 1.0 - result.basis_map.col(k).squaredNorm());
    result.phases[k] = std::arg(result.basis_map(k, k));
  }
  result.fidelity = gate_fidelity(result.basis_map, result.ideal);
  return result;
}

GateMatrix ideal_phase_gate() {
  GateMatrix g = GateMatrix::Zero();
  g.diagonal() << 1.0, -1.0, -1.0, -1.0;
  return g;
}

GateMatrix ideal_half_phase_gate() {
  GateMatrix g = GateMatrix::Zero();
  g.diagonal() << 1.0, 1.0, 1.0, kI;
  return g;
}

PulseSequence direct_sequence(double omega_pi, double omega_2pi) {
  const Transition t{"1", "e"};
  return {PulseSpec::pi(Molecule::control, t, omega_pi, Manifold::storage),
          PulseSpec::two_pi(Molecule::target, t, omega_2pi, Manifold::storage),
          PulseSpec::pi(Molecule::control, t, omega_pi, Manifold::storage)};
}

GateResult run_direct_gate(const LevelScheme& scheme, const InteractionSpec& inter,
                           double omega_pi, double omega_2pi, const GateOptions& options) {
  SequenceOptions so;
  so.layout = options.layout;
  so.dt_max = options.dt_max;
  so.include_decay = options.include_decay;
  so.repetitions = options.repetitions;
  return run_sequence(scheme, inter, direct_sequence(omega_pi, omega_2pi), ideal_phase_gate(), so);
}

PulseSequence inverted_sequence(double omega_pi, double omega_2pi, double transfer_efficiency) {
  const Transition store{"1", "1'"};
  const Transition release{"1'", "1"};
  const Transition drive{"1'", "e"};
  PulseSpec two_pi = PulseSpec::two_pi(Molecule::target, drive, omega_2pi, Manifold::excited);
  two_pi.phase_window = true;
  return {PulseSpec::ideal_transfer(Molecule::control, store, transfer_efficiency),
          PulseSpec::pi(Molecule::control, drive, omega_pi, Manifold::storage),
          PulseSpec::ideal_transfer(Molecule::target, store, transfer_efficiency),
          two_pi,
          PulseSpec::pi(Molecule::control, drive, omega_pi, Manifold::storage),
          PulseSpec::ideal_transfer(Molecule::control, release, transfer_efficiency),
          PulseSpec::ideal_transfer(Molecule::target, release, transfer_efficiency)};
}

GateResult run_inverted_gate(const LevelScheme& scheme, const InteractionSpec& inter,
                             double omega_pi, double omega_2pi, const GateOptions& options) {
  if (!scheme.find("1'")) throw UnknownTransition("inverted scheme needs a level \"1'\"");
  SequenceOptions so;
  so.layout = options.layout;
  so.dt_max = options.dt_max;
  so.include_decay = options.include_decay;
  so.dc_on_during_window = options.dc_on_during_2pi;
  so.repetitions = options.repetitions;
  return run_sequence(scheme, inter,
                      inverted_sequence(omega_pi, omega_2pi, options.transfer_efficiency),
                      ideal_half_phase_gate(), so);
}

GateResult run_rotational_gate(const LevelScheme& scheme, const InteractionSpec& inter,
                               double omega_pi, double omega_2pi, const GateOptions& options) {
  return run_direct_gate(scheme, inter, omega_pi, omega_2pi, options);
}

double gate_fidelity(const GateMatrix& actual, const GateMatrix& ideal) {
  const Complex overlap = (ideal.adjoint() * actual).trace();
  return std::clamp(std::norm(overlap) / 16.0, 0.0, 1.0);
}

double gate_time(double omega_pi, double omega_2pi) {
  if (!(omega_pi > 0.0) || !(omega_2pi > 0.0)) {
    throw InvalidArgument("Rabi frequencies must be positive");
  }
  return kTwoPi / omega_pi + kTwoPi / omega_2pi;
}

double gate_time_from_durations(double t_pi, double t_2pi) {
  if (!(t_pi > 0.0) || !(t_2pi > 0.0)) throw InvalidArgument("durations must be positive");
  return 2.0 * t_pi + t_2pi;
}

}  // namespace dipolegate::dynamics
