#include "dipolegate/reproduce.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "dipolegate/dynamics.hpp"
#include "dipolegate/errors.hpp"
#include "dipolegate/geometry.hpp"
#include "dipolegate/molecules.hpp"

namespace dipolegate::reproduce {

namespace {

using constants::kPi;
using feasibility::Expectation;

// Values are returned in CGS base units (or radians / plain numbers) and
// converted to the unit of the expectation by the caller.
using Computation = std::function<double()>;

double max_of(const std::array<double, 4>& a) { return *std::max_element(a.begin(), a.end()); }

dynamics::GateResult direct_gate(double u, double omega) {
  dynamics::InteractionSpec inter;
  inter.u_ee = u;
  return dynamics::run_direct_gate(dynamics::LevelScheme::direct(), inter, omega, omega);
}

double blockade_slope() {
  const double omega = 1e5;
  std::vector<double> x, y;
  for (int k = 0; k <= 10; ++k) {
    const double u = omega * std::pow(10.0, 1.0 + 0.1 * k);
    x.push_back(std::log(u));
    y.push_back(std::log(std::abs(direct_gate(u, omega).residual_phase_11())));
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxy / sxx;
}

double inverted_twice_error() {
  const double omega = 1e5;
  auto inter = dynamics::InteractionSpec::with_accumulated_phases(kPi, kPi, 2.0 * kPi / omega);
  inter.u_gg = std::numeric_limits<double>::infinity();
  dynamics::GateOptions opts;
  opts.repetitions = 2;
  const auto g = dynamics::run_inverted_gate(dynamics::LevelScheme::inverted(), inter, omega,
                                             omega, opts);
  dynamics::GateMatrix ideal = dynamics::GateMatrix::Identity();
  ideal(3, 3) = -1.0;
  return (g.basis_map - ideal).cwiseAbs().maxCoeff();
}

double inverted_blockade_excitation() {
  dynamics::InteractionSpec inter;
  inter.u_gg = 5e5;
  inter.u_e1 = 4e4;
  const auto g = dynamics::run_inverted_gate(dynamics::LevelScheme::inverted(), inter, 6e4, 1e5);
  return g.peak_target_excitation[2];  // |10>: target in |1>, control in |0>
}

const std::map<std::string, Computation>& registry() {
  using namespace geometry;
  static const std::map<std::string, Computation> table = {
      {"geometry.phase_rate_co",
       [] {
         const auto g = DipoleGeometry::equilibrium(Quantity(1.37, Unit::debye),
                                                    Quantity(1.37, Unit::debye),
                                                    Quantity(100, Unit::nanometer));
         return std::abs(dipole_phase(g, 1.0));
       }},
      {"geometry.sigma_r_budget",
       [] {
         return tolerated_spread(Channel::r, 0.01, Quantity(500, Unit::nanometer).base()).spread;
       }},
      {"geometry.theta_budget", [] { return tolerated_spread(Channel::theta, 0.01).spread; }},
      {"geometry.theta1_budget", [] { return tolerated_spread(Channel::theta1, 0.01).spread; }},
      {"geometry.theta2_budget", [] { return tolerated_spread(Channel::theta2, 0.01).spread; }},
      {"geometry.lattice_neighbour_10",
       [] { return lattice_phase_error({Quantity(800, Unit::nanometer).base(), 10, 1}); }},
      {"geometry.lattice_neighbour_40",
       [] { return lattice_phase_error({Quantity(800, Unit::nanometer).base(), 40, 1}); }},
      {"geometry.lattice_five_periods_10",
       [] { return lattice_phase_error({Quantity(800, Unit::nanometer).base(), 10, 5}); }},
      {"geometry.lattice_five_periods_40",
       [] { return lattice_phase_error({Quantity(800, Unit::nanometer).base(), 40, 5}); }},
      {"geometry.trap_sigma_h",
       [] {
         return tolerated_trap_spread(Quantity(1, Unit::micrometer).base(),
                                      Quantity(10, Unit::micrometer).base(), 0.01)
             .from_h;
       }},
      {"geometry.trap_sigma_r",
       [] {
         return tolerated_trap_spread(Quantity(1, Unit::micrometer).base(),
                                      Quantity(10, Unit::micrometer).base(), 0.01)
             .from_r;
       }},
      {"dynamics.direct_blockade_fidelity", [] { return direct_gate(1e9, 1e5).fidelity; }},
      {"dynamics.direct_blockade_leakage", [] { return max_of(direct_gate(1e9, 1e5).leakage); }},
      {"dynamics.direct_residual_phase",
       [] { return std::abs(direct_gate(1.87e6, 1e5).residual_phase_11()); }},
      {"dynamics.direct_fidelity", [] { return direct_gate(1.87e6, 1e5).fidelity; }},
      {"dynamics.rotational_residual_phase",
       [] {
         dynamics::InteractionSpec inter;
         inter.u_ee = 3.6e5;
         return std::abs(dynamics::run_rotational_gate(dynamics::LevelScheme::direct(), inter,
                                                       3e5, 2e4)
                             .residual_phase_11());
       }},
      {"dynamics.inverted_twice_error", inverted_twice_error},
      {"dynamics.inverted_blockade_excitation", inverted_blockade_excitation},
      {"dynamics.blockade_slope", blockade_slope},
      {"molecules.bai_n0_levels",
       [] {
         return static_cast<double>(
             molecules::hyperfine_levels(molecules::preset("BaI"), 0).size());
       }},
      {"molecules.bai_n0_multiplicity",
       [] {
         int total = 0;
         for (const auto& l : molecules::hyperfine_levels(molecules::preset("BaI"), 0)) {
           total += l.degeneracy;
         }
         return static_cast<double>(total);
       }},
  };
  return table;
}

std::string scenario_prefix(const std::string& id) { return id.substr(0, id.find('.')); }

}  // namespace

std::vector<std::string> registered_ids() {
  std::vector<std::string> ids;
  for (const auto& [id, fn] : registry()) ids.push_back(id);
  return ids;
}

double compute(const Expectation& x) {
  const auto unit = unit_from_symbol(x.unit);
  if (!unit) throw InvalidArgument("unknown unit '" + x.unit + "'");
  const auto it = registry().find(x.id);
  if (it != registry().end()) return from_base(it->second(), *unit).value();

  const auto scenario = feasibility::scenario_from_name(scenario_prefix(x.id));
  const auto report = feasibility::feasibility_report(x.molecule, scenario);
  const auto& entry = report.at(x.id);
  return Quantity(entry.value, *unit_from_symbol(entry.unit)).in(*unit);
}

Check check(const Expectation& x) {
  Check c;
  c.id = x.id;
  c.molecule = x.molecule;
  c.expected = x.value;
  c.unit = x.unit;
  c.tolerance = x.tolerance;
  c.note = x.note;
  try {
    c.computed = compute(x);
    c.passed = feasibility::within_tolerance(x.tolerance, c.computed, x.value);
  } catch (const Error& e) {
    c.error = e.what();
  }
  return c;
}

std::vector<Check> run(const std::vector<Expectation>& table, std::string_view prefix) {
  std::vector<Check> out;
  for (const auto& x : table) {
    if (x.id.compare(0, prefix.size(), prefix) == 0) out.push_back(check(x));
  }
  return out;
}

std::vector<Check> run_all(std::string_view prefix) {
  return run(feasibility::reference_values(), prefix);
}

}  // namespace dipolegate::reproduce
