#pragma once

// Molecular parameter presets and structure calculators: the quadrupole
// Casimir function, the 2Sigma+ rotational/fine/hyperfine Hamiltonian,
// microwave-dressed states, rotational linewidth, Stark mixing field and
// linear Zeeman shifts.

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "dipolegate/units.hpp"

namespace dipolegate::molecules {

// Hyperfine coupling constants as cyclic frequencies (stored in MHz).
struct HyperfineConstants {
  std::optional<Quantity> gamma_sr;
  std::optional<Quantity> b_F;
  std::optional<Quantity> c;
  std::optional<Quantity> eQq;

  bool operator==(const HyperfineConstants&) const = default;
};

struct MoleculeParams {
  std::string name;
  std::string description;
  std::vector<std::string> aliases;
  // Permanent moments keep the sign they are quoted with.
  std::optional<Quantity> mu_ground;
  std::optional<Quantity> mu_excited;
  std::optional<Quantity> mu_transition_induced;
  std::optional<Quantity> excited_lifetime;
  std::optional<Quantity> transition_wavelength;
  std::optional<Quantity> rotational_constant;
  double electron_spin = 0.0;
  std::vector<double> nuclear_spins;
  HyperfineConstants hyperfine;
  // Linear Zeeman scale: frequency shift per gauss.
  std::optional<Quantity> zeeman_ground_per_gauss;
  std::optional<Quantity> zeeman_excited_per_gauss;
  // Free-text origin of individual constants, keyed by field name.
  std::map<std::string, std::string> sources;

  // Throws InvalidArgument naming `field` when it is absent.
  const Quantity& require(const std::optional<Quantity>& field, std::string_view what) const;
  // Throws InvalidArgument for zero lifetimes, bad spins or wrong dimensions.
  void validate() const;

  bool operator==(const MoleculeParams&) const = default;
};

// Case-insensitive lookup by name or alias in the shipped preset table.
// Throws UnknownPreset listing the known names.
MoleculeParams preset(std::string_view name);
std::vector<std::string> preset_names();

// Preset tables in the shipped JSON layout.
std::vector<MoleculeParams> presets_from_json(std::string_view json);
std::string presets_to_json(const std::vector<MoleculeParams>& molecules);
std::vector<MoleculeParams> load_presets(const std::string& path);

MoleculeParams molecule_from_json(std::string_view json);
std::string molecule_to_json(const MoleculeParams& m);

// (3C(C+1)/4 - I(I+1)J(J+1)) / (2I(2I-1)(2J-1)(2J+3)) with
// C = F(F+1) - I(I+1) - J(J+1). Returns 0 at J = 0, where the quadrupole
// coupling vanishes. Throws InvalidArgument for I < 1, non-half-integer
// arguments, J = 1/2, or F outside |J-I|..J+I.
double casimir_F(double I, double J, double F);

// Parameters of H = B N^2 + gamma N.S + b_F I.S + c I_z' S_z'
//   + eQq (3 I_z'^2 - I^2) / (4 I (2I - 1)), all in MHz, S = 1/2.
struct SigmaHamiltonian {
  double B = 0.0;
  double gamma_sr = 0.0;
  double b_F = 0.0;
  double c = 0.0;
  double eQq = 0.0;
  double I = 0.0;

  // Throws InvalidArgument when a constant the Hamiltonian needs is missing.
  static SigmaHamiltonian from(const MoleculeParams& m);
};

// Basis state |((N S) J I) F>.
struct CoupledState {
  int N = 0;
  double J = 0.0;
  double F = 0.0;
};

std::vector<CoupledState> coupled_basis(double I, int n_max);

// Hamiltonian matrix (MHz) on coupled_basis(I, n_max); one row per (N, J, F)
// multiplet, the M_F degeneracy is implicit.
Eigen::MatrixXd hyperfine_matrix(const SigmaHamiltonian& h, int n_max);

struct HyperfineLevel {
  int N = 0;          // dominant rotational quantum number
  double J = 0.0;     // dominant J
  double F = 0.0;
  double energy = 0.0;  // MHz relative to the N = 0 centroid
  int degeneracy = 1;   // 2F + 1
};

// Diagonalizes per (F, N-parity) block, sorted by energy. n_max in [0, 4].
std::vector<HyperfineLevel> hyperfine_levels(const SigmaHamiltonian& h, int n_max);
std::vector<HyperfineLevel> hyperfine_levels(const MoleculeParams& m, int n_max);

struct DressedStates {
  double shift_plus = 0.0;   // rad/s
  double shift_minus = 0.0;  // rad/s
  // Mixing angle alpha with tan(2 alpha) = 2 Omega / delta; pi/4 on resonance.
  double mixing_angle = 0.0;
};

// Eigenvalues of [[0, Omega], [Omega, delta]]. Throws for Omega < 0.
DressedStates dressed_states(double omega_coupl, double detuning);

// A = 4 mu^2 (2 pi)^3 / (3 lambda^3 hbar), returned in rad/s.
Quantity rotational_linewidth(const Quantity& mu, const Quantity& lambda_mw);

// Resonant exchange rate mu^2 / (r^3 hbar) at separation r.
Quantity exchange_rate(const Quantity& mu, const Quantity& r);

// True when the rotational linewidth is at least the exchange rate, i.e.
// exchange is slower than spontaneous decay.
bool decay_dominates_exchange(const Quantity& mu, const Quantity& lambda_mw, const Quantity& r);

// 2 B hbar / mu with B converted to angular frequency, in V/cm.
Quantity stark_mixing_field(const Quantity& rotational_constant, const Quantity& mu);

enum class ElectronicState { ground, excited };

// Linear Zeeman shift scale * B, in the unit of the preset scale.
Quantity zeeman_shift(const MoleculeParams& m, ElectronicState state, const Quantity& field);

}  // namespace dipolegate::molecules
