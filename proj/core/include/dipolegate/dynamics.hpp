#pragma once

// Blockade pulse sequences on two few-level molecules.
//
// Each molecule carries the levels of a LevelScheme; the two-molecule space
// is their tensor product (dimension <= 16). The Hamiltonian is written in
// the rotating frame of the active pulse and is piecewise constant, so every
// segment is propagated with an exact matrix exponential.
//
// Computational kets are written |q_left q_right>. By default the control
// molecule occupies the right slot, so |01> means target in |0>, control in
// |1>, and the first pi pulse maps |01> to i|0e>.
//
// Angular frequencies are in rad/s and times in s.

#include <array>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dipolegate::dynamics {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using GateMatrix = Eigen::Matrix4cd;

inline constexpr double kNoDecay = std::numeric_limits<double>::infinity();

// Storage levels hold the qubit (|0>, |1>, |1'>); the excited level |e> is the
// one the blockade pulses address.
enum class Manifold { storage, excited };

struct Level {
  std::string label;
  Manifold manifold = Manifold::storage;
  double dipole = 0.0;          // permanent moment, esu*cm (sign kept)
  double lifetime = kNoDecay;   // s; infinity disables decay
};

class LevelScheme {
 public:
  // Throws InvalidArgument for duplicate labels, non-finite dipoles,
  // non-positive lifetimes, or a scheme without both |0> and |1>.
  explicit LevelScheme(std::vector<Level> levels);

  // {|0>, |1>, |e>}.
  static LevelScheme direct(double storage_dipole = 0.0, double excited_dipole = 0.0,
                            double excited_lifetime = kNoDecay);
  // {|0>, |1>, |1'>, |e>}; all storage levels share `storage_dipole`.
  static LevelScheme inverted(double storage_dipole = 0.0, double excited_dipole = 0.0,
                              double excited_lifetime = kNoDecay);

  std::size_t size() const { return levels_.size(); }
  const Level& level(std::size_t i) const { return levels_.at(i); }
  std::span<const Level> levels() const { return levels_; }
  std::optional<std::size_t> find(const std::string& label) const;
  // Throws UnknownTransition when the label does not exist.
  std::size_t index_of(const std::string& label) const;
  bool has_decay() const;

 private:
  std::vector<Level> levels_;
};

enum class Molecule { control, target };

enum class ControlSlot { right, left };

// Diagonal interaction shifts and phase rates, all in rad/s.
//
// `u_gg`, `u_e1` and `u_ee` shift the two-molecule configurations in which
// both molecules are in storage levels, one in storage and one excited, and
// both excited. An infinite shift denotes the ideal blockade limit: couplings
// that would have to bridge it are removed and the shift itself carries no
// tracked phase.
//
// The remaining rates feed the phases accumulated during the 2pi window of
// the inverted sequence (see run_inverted_gate).
struct InteractionSpec {
  double u_ee = 0.0;
  double u_e1 = 0.0;
  double u_gg = 0.0;
  double dc_phase_rate_g = 0.0;   // mu * E / hbar
  double dc_phase_rate_e = 0.0;   // mu_e * E / hbar
  double lattice_sum_rate = 0.0;  // sum_j mu^2 / (r_j^3 hbar), j != c, t
  double pair_phase_rate = 0.0;   // mu^2 / (r_ct^3 hbar) entering Phi~_t

  // Rates that make Phi_{c,t} = phi_ct and Phi~_t = phi_tilde over a window
  // of length `window`.
  static InteractionSpec with_accumulated_phases(double phi_ct, double phi_tilde, double window);

  void validate() const;
};

struct Transition {
  std::string lower;
  std::string upper;
};

enum class PulseKind { pi, two_pi, ideal_transfer, custom };

struct PulseSpec {
  Molecule molecule = Molecule::target;
  Transition transition;
  double rabi = 0.0;
  double duration = 0.0;
  double detuning = 0.0;  // extra detuning on top of the tuning point
  double phase = 0.0;     // coupling phase
  PulseKind kind = PulseKind::custom;
  // Manifold of the other molecule for which the pulse is resonant. Shifts
  // of the driven transition in that configuration are compensated.
  Manifold tuned_for = Manifold::storage;
  // Transfer efficiency of an ideal transfer, in (0, 1].
  double efficiency = 1.0;
  // Whether the accumulated-phase bookkeeping runs during this step.
  bool phase_window = false;

  // Area pi: duration = pi / rabi.
  static PulseSpec pi(Molecule molecule, Transition transition, double rabi,
                      Manifold tuned_for = Manifold::storage);
  // Area 2 pi: duration = 2 pi / rabi.
  static PulseSpec two_pi(Molecule molecule, Transition transition, double rabi,
                          Manifold tuned_for = Manifold::storage);
  static PulseSpec custom(Molecule molecule, Transition transition, double rabi,
                          double duration, double detuning = 0.0);
  // Instantaneous |lower> -> |upper> population transfer (sqrt(eta)
  // amplitude); `duration` counts towards the gate time only.
  static PulseSpec ideal_transfer(Molecule molecule, Transition transition,
                                  double efficiency = 1.0, double duration = 1e-9);

  // Throws InvalidArgument when the invariants of `kind` are violated.
  void validate() const;
};

using PulseSequence = std::vector<PulseSpec>;

struct Layout {
  ControlSlot control_slot = ControlSlot::right;

  std::size_t slot_of(Molecule m) const;
  // Product-space index of (control level, target level).
  std::size_t index(std::size_t control_level, std::size_t target_level, std::size_t n) const;
};

// Rotating-frame Hamiltonian on the two-molecule space for the given active
// pulses (ideal transfers are ignored). Hermitian by construction. Throws
// UnknownTransition for labels missing from the scheme.
Matrix build_hamiltonian(const LevelScheme& scheme, const InteractionSpec& inter,
                         std::span<const PulseSpec> active, const Layout& layout = {});

// Anti-Hermitian loss -i Gamma/2 per molecule in a finite-lifetime level.
Matrix decay_operator(const LevelScheme& scheme);

struct Segment {
  Matrix hamiltonian;
  double duration = 0.0;
};

// Called after each propagation sub-step with the elapsed time and the state.
using Observer = std::function<void(double, const Vector&)>;

// Propagates a normalized state through piecewise-constant segments, each
// split into sub-steps no longer than dt_max. Throws InvalidArgument for a
// non-normalized initial state or non-positive dt_max.
Vector propagate(std::span<const Segment> segments, const Vector& psi0, double dt_max,
                 const Observer& observer = {});

// Exact propagator exp(-i H t). Uses a Hermitian eigendecomposition when H is
// Hermitian and the general matrix exponential otherwise.
Matrix segment_propagator(const Matrix& hamiltonian, double t);

struct GateResult {
  GateMatrix basis_map = GateMatrix::Zero();
  GateMatrix ideal = GateMatrix::Identity();
  std::array<double, 4> phases{};
  std::array<double, 4> leakage{};
  // Largest probability of the target being in an excited level during the
  // sequence, per computational input.
  std::array<double, 4> peak_target_excitation{};
  double fidelity = 0.0;
  double gate_time = 0.0;

  // Phase of the |11> diagonal element relative to the ideal gate.
  double residual_phase_11() const;
};

struct SequenceOptions {
  Layout layout;
  double dt_max = 0.0;  // 0: a 1/200 of the shortest coherent step
  bool include_decay = false;
  bool dc_on_during_window = true;
  int repetitions = 1;
};

// Runs a sequence on the four computational inputs and projects the result
// onto the computational subspace. The fidelity is taken against `ideal`
// raised to the number of repetitions.
GateResult run_sequence(const LevelScheme& scheme, const InteractionSpec& inter,
                        const PulseSequence& sequence, const GateMatrix& ideal,
                        const SequenceOptions& options = {});

struct GateOptions {
  Layout layout;
  double dt_max = 0.0;
  bool include_decay = false;
  double transfer_efficiency = 1.0;
  bool dc_on_during_2pi = true;
  int repetitions = 1;
};

// diag(1, -1, -1, -1).
GateMatrix ideal_phase_gate();
// diag(1, 1, 1, i).
GateMatrix ideal_half_phase_gate();

// pi_c, 2pi_t, pi_c on |1> <-> |e>; the 2pi pulse is resonant with the
// transition of the target when the control is in storage.
PulseSequence direct_sequence(double omega_pi, double omega_2pi);
GateResult run_direct_gate(const LevelScheme& scheme, const InteractionSpec& inter,
                           double omega_pi, double omega_2pi, const GateOptions& options = {});

// Transfer_c(1 -> 1'), pi_c, transfer_t(1 -> 1'), 2pi_t, pi_c, transfer back.
// The control pi pulses are tuned with the target in storage, the 2pi pulse
// with the control excited. During the 2pi pulse each computational column
// picks up the phase integral of
//   (Phi_c + Phi_t)/T   on both-storage configurations,
//   Phi~_t/T            on target-storage / control-excited configurations,
// weighted by the instantaneous occupation. Requires a |1'> level.
PulseSequence inverted_sequence(double omega_pi, double omega_2pi, double transfer_efficiency);
GateResult run_inverted_gate(const LevelScheme& scheme, const InteractionSpec& inter,
                             double omega_pi, double omega_2pi, const GateOptions& options = {});

// Same protocol as the direct gate with |e> the dressed |+> level and u_ee
// the dipole shift V_dip of the doubly dressed state.
GateResult run_rotational_gate(const LevelScheme& scheme, const InteractionSpec& inter,
                               double omega_pi, double omega_2pi, const GateOptions& options = {});

// |Tr(ideal^dagger actual)|^2 / 16; insensitive to a global phase.
double gate_fidelity(const GateMatrix& actual, const GateMatrix& ideal);

// 2 pi / omega_pi + 2 pi / omega_2pi.
double gate_time(double omega_pi, double omega_2pi);
// 2 T_pi + T_2pi from pulse durations.
double gate_time_from_durations(double t_pi, double t_2pi);

}  // namespace dipolegate::dynamics
