#pragma once

// Closed-form feasibility estimates: interaction shifts, lattice phase sums,
// field budgets, gate-time derived counts and the aggregated reports with
// their reference values.

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dipolegate/units.hpp"

namespace dipolegate::feasibility {

// u = mu1 mu2 / (r^3 hbar), rad/s. Signs of the moments are kept.
Quantity dipole_dipole_shift(const Quantity& mu1, const Quantity& mu2, const Quantity& r);

// V = mu^2 / (h^2 r hbar), rad/s.
Quantity trap_dipole_shift(const Quantity& mu, const Quantity& h, const Quantity& r);

// Phase pi Omega / (2 u) left on |11> by a blockaded 2pi pulse.
double blockade_residual_phase(double omega_2pi, double u);

// Lattice site in units of lambda/2.
struct Site {
  int x = 0;
  int y = 0;
  int z = 0;

  bool operator==(const Site&) const = default;
};

// Phases (rad) accumulated over `duration` by the control (c) and target (t)
// molecules of a filled lattice:
//   Phi_{c,t} = sum_{j != c,t} mu^2 T / (r_{c,t;j}^3 hbar) + mu E T / hbar
//   Phi~_t    = sum_{j != c,t} mu^2 T / (r_{t;j}^3 hbar) - mu^2 T / (r_ct^3 hbar)
//               + mu E T / hbar + mu_e E T / hbar
struct LatticePhases {
  double phi_c = 0.0;
  double phi_t = 0.0;
  double phi_t_tilde = 0.0;
  double sum_c = 0.0;  // lattice sums alone
  double sum_t = 0.0;
  double pair = 0.0;   // mu^2 T / (r_ct^3 hbar)
  double dc_g = 0.0;   // mu E T / hbar
  double dc_e = 0.0;   // mu_e E T / hbar
};

// Throws InvalidArgument for duplicate sites or control/target indices that
// are equal or out of range.
LatticePhases lattice_phase_sum(const Quantity& mu, const Quantity& mu_e,
                                const Quantity& wavelength, std::span<const Site> sites,
                                std::size_t control, std::size_t target, const Quantity& field,
                                const Quantity& duration);

// `n` sites on a line spaced by lambda/2, starting at the origin.
std::vector<Site> chain_sites(std::size_t n);

// Convention for the tolerated phase error in field_precision.
enum class PhaseBudget {
  absolute,        // delta_phi = target (rad)
  fraction_of_pi,  // delta_phi = target * pi
};

double phase_budget(PhaseBudget convention, double target = 0.01);

// Field stability hbar delta_phi / (mu T), in uV/cm.
Quantity field_precision(const Quantity& mu, const Quantity& duration, double delta_phi);

// floor(coherence / gate_time).
std::uint64_t ops_count(const Quantity& coherence, const Quantity& gate_time);

// n pi v / r, rad/s. Throws for v > c.
Quantity wire_min_frequency(const Quantity& r, const Quantity& v, int n = 1);

// `steps` points from start to stop inclusive, evenly spaced or, with `log`,
// geometrically spaced (start and stop must then share a sign and be
// non-zero). A single step yields {start}.
std::vector<double> sweep_grid(double start, double stop, std::size_t steps, bool log);

enum class Scenario { direct_lattice, inverted_lattice, rotational_trap };

std::string_view name(Scenario scenario);
// Accepts "direct-lattice", "inverted-lattice", "rotational-trap".
Scenario scenario_from_name(std::string_view name);

enum class ToleranceKind {
  relative,             // |computed/expected - 1| <= value
  order_of_magnitude,   // |log10(computed/expected)| < 1
  significant_figures,  // computed rounded to `value` figures equals expected
  at_least,             // computed >= expected
  at_most,              // computed <= expected
};

struct Tolerance {
  ToleranceKind kind = ToleranceKind::relative;
  double value = 0.0;
};

std::string_view name(ToleranceKind kind);
bool within_tolerance(const Tolerance& tol, double computed, double expected);

// One quoted reference number.
struct Expectation {
  std::string id;
  std::string molecule;
  double value = 0.0;
  std::string unit;
  Tolerance tolerance;
  std::string note;
};

// Shipped reference table.
std::vector<Expectation> reference_values();
std::vector<Expectation> reference_values_from_json(std::string_view json);

struct ReportEntry {
  std::string id;
  std::string label;
  double value = 0.0;
  std::string unit;
  std::string formula;
  std::map<std::string, std::string> inputs;
  std::optional<double> expected;
  std::optional<Tolerance> tolerance;
  std::optional<double> relative_deviation;
  std::optional<bool> within;
};

struct FeasibilityReport {
  std::string molecule;
  Scenario scenario = Scenario::direct_lattice;
  std::vector<ReportEntry> entries;

  // Throws InvalidArgument for an unknown id.
  const ReportEntry& at(std::string_view id) const;
};

using Overrides = std::map<std::string, Quantity>;

// Inputs of a scenario with their default values.
Overrides default_inputs(Scenario scenario);

// Computes every scalar of the scenario for a preset. Reference values are
// attached when the preset is the one they were quoted for and no input was
// overridden. Throws UnknownPreset, or InvalidArgument for an unknown
// override, a dimension mismatch, or a preset lacking the constants the
// scenario needs.
FeasibilityReport feasibility_report(std::string_view molecule, Scenario scenario,
                                     const Overrides& overrides = {});

}  // namespace dipolegate::feasibility
