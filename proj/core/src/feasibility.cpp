#include "dipolegate/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <tuple>

#include <json.hpp>

#include "dipolegate/dynamics.hpp"
#include "dipolegate/embedded_data.hpp"
#include "dipolegate/errors.hpp"
#include "dipolegate/molecules.hpp"

namespace dipolegate::feasibility {

namespace {

using constants::kHbar;
using constants::kPi;
using constants::kSpeedOfLight;
using constants::kTwoPi;

double positive_base(const Quantity& q, Dimension d, const char* what) {
  const double v = q.require(d, what).base();
  if (!(v > 0.0)) throw InvalidArgument(std::string(what) + " must be positive");
  return v;
}

std::string format(const Quantity& q) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g %s", q.value(), std::string(symbol(q.unit())).c_str());
  return buf;
}

double in_unit(const Quantity& q, std::string_view unit) {
  const auto u = unit_from_symbol(unit);
  if (!u) throw InvalidArgument("unknown unit '" + std::string(unit) + "'");
  return q.in(*u);
}

class ReportBuilder {
 public:
  ReportBuilder(FeasibilityReport& report, const Overrides& inputs)
      : report_(report), inputs_(inputs) {}

  const Quantity& input(const std::string& key) const { return inputs_.at(key); }
  double base(const std::string& key) const { return inputs_.at(key).base(); }

  void add(std::string id, std::string label, const Quantity& value, std::string_view unit,
           std::string formula, std::initializer_list<std::string> used) {
    ReportEntry e;
    e.id = std::string(name(report_.scenario)) + "." + id;
    e.label = std::move(label);
    e.value = in_unit(value, unit);
    e.unit = std::string(unit);
    e.formula = std::move(formula);
    for (const auto& k : used) e.inputs[k] = format(inputs_.at(k));
    report_.entries.push_back(std::move(e));
  }

 private:
  FeasibilityReport& report_;
  const Overrides& inputs_;
};

Quantity rad_per_s(double v) { return Quantity(v, Unit::rad_per_s); }
Quantity seconds(double v) { return Quantity(v, Unit::second); }
Quantity plain(double v) { return Quantity(v, Unit::one); }

void direct_lattice(const molecules::MoleculeParams& m, ReportBuilder& b) {
  const Quantity& mu_e = m.require(m.mu_excited, "excited-state dipole moment");
  const double u = dipole_dipole_shift(mu_e, mu_e, b.input("r")).base();
  const double om_pi = b.base("omega_pi"), om_2pi = b.base("omega_2pi");
  b.add("u", "|ee> blockade shift", rad_per_s(u), "rad/s", "mu_e^2/(r^3 hbar)", {"r"});
  b.add("blockade_ratio", "u / Omega_2pi", plain(u / om_2pi), "1", "u/Omega_2pi", {"r", "omega_2pi"});
  b.add("residual_phase", "|11> residual phase estimate", plain(blockade_residual_phase(om_2pi, u)),
        "rad", "pi Omega_2pi/(2u)", {"r", "omega_2pi"});
  if (m.mu_transition_induced) {
    const Quantity field = field_from_rabi(*m.mu_transition_induced, b.input("omega_drive"));
    b.add("drive_field", "pi-pulse field amplitude", field, "V/cm", "hbar Omega/mu_ind",
          {"omega_drive"});
    b.add("drive_intensity", "pi-pulse intensity", field_to_intensity(field), "W/cm^2",
          "c E^2/(4 pi)", {"omega_drive"});
  }
  const double t_gate = dynamics::gate_time(om_pi, om_2pi);
  b.add("gate_time", "gate time", seconds(t_gate), "us", "2pi/Omega_pi + 2pi/Omega_2pi",
        {"omega_pi", "omega_2pi"});
  const double om_slow = b.base("omega_slow");
  b.add("gate_time_slow", "gate time at the slow Rabi frequency",
        seconds(dynamics::gate_time(om_slow, om_slow)), "ms", "4pi/Omega_slow", {"omega_slow"});
  b.add("ops_count", "operations per coherence time",
        plain(static_cast<double>(ops_count(b.input("coherence"), seconds(t_gate)))), "1",
        "floor(T_coh/T_gate)", {"coherence", "omega_pi", "omega_2pi"});
  if (m.zeeman_ground_per_gauss) {
    b.add("zeeman_ground", "ground Zeeman shift",
          molecules::zeeman_shift(m, molecules::ElectronicState::ground, b.input("magnetic_field")),
          "kHz", "scale * B", {"magnetic_field"});
  }
  if (m.zeeman_excited_per_gauss) {
    b.add("zeeman_excited", "excited Zeeman shift",
          molecules::zeeman_shift(m, molecules::ElectronicState::excited, b.input("magnetic_field")),
          "MHz", "scale * B", {"magnetic_field"});
  }
}

void inverted_lattice(const molecules::MoleculeParams& m, ReportBuilder& b) {
  const Quantity& mu_g = m.require(m.mu_ground, "ground-state dipole moment");
  const Quantity& mu_e = m.require(m.mu_excited, "excited-state dipole moment");
  const Quantity& rot = m.require(m.rotational_constant, "rotational constant");
  const Quantity mu_e_abs(std::abs(mu_e.value()), mu_e.unit());
  const double u_gg = dipole_dipole_shift(mu_g, mu_g, b.input("r")).base();
  b.add("u_gg", "ground-ground shift", rad_per_s(u_gg), "rad/s", "mu^2/(r^3 hbar)", {"r"});
  b.add("u_e1", "|e1> shift", dipole_dipole_shift(mu_g, mu_e_abs, b.input("r")), "rad/s",
        "mu |mu_e|/(r^3 hbar)", {"r"});
  const Quantity stark = molecules::stark_mixing_field(rot, mu_g);
  b.add("stark_field", "J=0/J=1 mixing field", stark, "kV/cm", "2 B hbar/mu", {});
  const double dc = rabi_from_field(mu_g, stark).base();
  b.add("dc_rate", "DC phase rate", rad_per_s(dc), "rad/s", "mu E/hbar", {});
  b.add("dc_over_u", "DC rate over neighbour shift", plain(dc / u_gg), "1", "mu E r^3/mu^2", {"r"});
  b.add("field_precision", "field stability", 
        field_precision(mu_g, b.input("t_2pi"), b.input("delta_phi").base()), "uV/cm",
        "hbar delta_phi/(mu T_2pi)", {"t_2pi", "delta_phi"});
  if (m.mu_transition_induced) {
    const Quantity field = field_from_rabi(*m.mu_transition_induced, b.input("omega_pi"));
    b.add("drive_field", "pi-pulse field amplitude", field, "V/cm", "hbar Omega_pi/mu_ind",
          {"omega_pi"});
    b.add("drive_intensity", "pi-pulse intensity", field_to_intensity(field), "uW/cm^2",
          "c E^2/(4 pi)", {"omega_pi"});
  }
  const double om_2pi = b.base("omega_2pi");
  b.add("blockade_ratio", "u_gg / Omega_2pi", plain(u_gg / om_2pi), "1", "u_gg/Omega_2pi",
        {"r", "omega_2pi"});
  const double t_gate = dynamics::gate_time(b.base("omega_pi"), om_2pi);
  b.add("gate_time", "gate time", seconds(t_gate), "us", "2pi/Omega_pi + 2pi/Omega_2pi",
        {"omega_pi", "omega_2pi"});
  b.add("ops_count", "operations per coherence time",
        plain(static_cast<double>(ops_count(b.input("coherence"), seconds(t_gate)))), "1",
        "floor(T_coh/T_gate)", {"coherence", "omega_pi", "omega_2pi"});
}

void rotational_trap(const molecules::MoleculeParams& m, ReportBuilder& b) {
  const Quantity& mu = m.require(m.mu_ground, "ground-state dipole moment");
  const double v = trap_dipole_shift(mu, b.input("h"), b.input("r")).base();
  b.add("v_trap", "wire-mediated interaction", rad_per_s(v), "rad/s", "mu^2/(h^2 r hbar)",
        {"h", "r"});
  const double om_pi = b.base("omega_pi"), om_2pi = b.base("omega_2pi");
  const double t_pi = kPi / om_pi, t_2pi = kTwoPi / om_2pi;
  b.add("t_pi", "pi-pulse duration", seconds(t_pi), "us", "pi/Omega_pi", {"omega_pi"});
  b.add("t_2pi", "2pi-pulse duration", seconds(t_2pi), "us", "2pi/Omega_2pi", {"omega_2pi"});
  b.add("gate_time", "gate time", seconds(dynamics::gate_time(om_pi, om_2pi)), "us",
        "2pi/Omega_pi + 2pi/Omega_2pi", {"omega_pi", "omega_2pi"});
  const double t_gate = dynamics::gate_time_from_durations(t_pi, t_2pi);
  b.add("gate_time_durations", "gate time from pulse durations", seconds(t_gate), "us",
        "2 T_pi + T_2pi", {"omega_pi", "omega_2pi"});
  const auto dc = molecules::dressed_states(b.base("omega_c_coupl"), 0.0);
  const auto dt = molecules::dressed_states(b.base("omega_t_coupl"), 0.0);
  b.add("dressed_plus_c", "control |+> shift", rad_per_s(dc.shift_plus), "rad/s", "+Omega_c",
        {"omega_c_coupl"});
  b.add("dressed_minus_c", "control |-> shift", rad_per_s(dc.shift_minus), "rad/s", "-Omega_c",
        {"omega_c_coupl"});
  b.add("dressed_plus_t", "target |+> shift", rad_per_s(dt.shift_plus), "rad/s", "+Omega_t",
        {"omega_t_coupl"});
  b.add("dressed_minus_t", "target |-> shift", rad_per_s(dt.shift_minus), "rad/s", "-Omega_t",
        {"omega_t_coupl"});
  b.add("blockade_ratio", "V / Omega_2pi", plain(v / om_2pi), "1", "V/Omega_2pi",
        {"h", "r", "omega_2pi"});
  b.add("residual_phase", "|11> residual phase estimate", plain(blockade_residual_phase(om_2pi, v)),
        "rad", "pi Omega_2pi/(2V)", {"h", "r", "omega_2pi"});
  b.add("wire_min_frequency", "lowest wire frequency",
        wire_min_frequency(b.input("r"), b.input("wire_velocity")), "rad/s", "pi v/r",
        {"r", "wire_velocity"});
  b.add("rotational_linewidth", "rotational linewidth",
        molecules::rotational_linewidth(mu, b.input("lambda_mw")), "rad/s",
        "4 mu^2 (2pi)^3/(3 lambda^3 hbar)", {"lambda_mw"});
  b.add("ops_count", "operations per coherence time",
        plain(static_cast<double>(ops_count(b.input("coherence"), seconds(t_gate)))), "1",
        "floor(T_coh/T_gate)", {"coherence", "omega_pi", "omega_2pi"});
}

}  // namespace

Quantity dipole_dipole_shift(const Quantity& mu1, const Quantity& mu2, const Quantity& r) {
  const double m1 = mu1.require(Dimension::dipole_moment, "mu1").base();
  const double m2 = mu2.require(Dimension::dipole_moment, "mu2").base();
  const double d = positive_base(r, Dimension::length, "separation r");
  return Quantity(m1 * m2 / (d * d * d * kHbar), Unit::rad_per_s);
}

Quantity trap_dipole_shift(const Quantity& mu, const Quantity& h, const Quantity& r) {
  const double m = mu.require(Dimension::dipole_moment, "mu").base();
  const double hh = positive_base(h, Dimension::length, "surface distance h");
  const double rr = positive_base(r, Dimension::length, "trap distance r");
  return Quantity(m * m / (hh * hh * rr * kHbar), Unit::rad_per_s);
}

double blockade_residual_phase(double omega_2pi, double u) {
  if (!(omega_2pi >= 0.0) || u == 0.0 || std::isnan(u)) {
    throw InvalidArgument("residual phase needs Omega >= 0 and u != 0");
  }
  return kPi * omega_2pi / (2.0 * std::abs(u));
}

LatticePhases lattice_phase_sum(const Quantity& mu, const Quantity& mu_e,
                                const Quantity& wavelength, std::span<const Site> sites,
                                std::size_t control, std::size_t target, const Quantity& field,
                                const Quantity& duration) {
  const double m = mu.require(Dimension::dipole_moment, "mu").base();
  const double me = mu_e.require(Dimension::dipole_moment, "mu_e").base();
  const double spacing = positive_base(wavelength, Dimension::length, "wavelength") / 2.0;
  const double e = field.require(Dimension::electric_field, "field").base();
  const double t = duration.require(Dimension::time, "duration").base();
  if (t < 0.0) throw InvalidArgument("duration must be non-negative");
  if (control >= sites.size() || target >= sites.size() || control == target) {
    throw InvalidArgument("control and target must be distinct occupied sites");
  }
  std::set<std::tuple<int, int, int>> seen;
  for (const Site& s : sites) {
    if (!seen.insert({s.x, s.y, s.z}).second) throw InvalidArgument("lattice sites overlap");
  }
  const auto inv_r3 = [&](const Site& a, const Site& b) {
    const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
    const double r = spacing * std::sqrt(dx * dx + dy * dy + dz * dz);
    return 1.0 / (r * r * r);
  };
  const double scale = m * m * t / kHbar;
  LatticePhases p;
  // Summed from the far end so small terms are added first.
  for (std::size_t j = sites.size(); j-- > 0;) {
    if (j == control || j == target) continue;
    p.sum_c += scale * inv_r3(sites[control], sites[j]);
    p.sum_t += scale * inv_r3(sites[target], sites[j]);
  }
  p.pair = scale * inv_r3(sites[control], sites[target]);
  p.dc_g = m * e * t / kHbar;
  p.dc_e = me * e * t / kHbar;
  p.phi_c = p.sum_c + p.dc_g;
  p.phi_t = p.sum_t + p.dc_g;
  p.phi_t_tilde = p.sum_t - p.pair + p.dc_g + p.dc_e;
  return p;
}

std::vector<Site> chain_sites(std::size_t n) {
  std::vector<Site> sites(n);
  for (std::size_t i = 0; i < n; ++i) sites[i].x = static_cast<int>(i);
  return sites;
}

double phase_budget(PhaseBudget convention, double target) {
  if (!(target > 0.0)) throw InvalidArgument("phase budget must be positive");
  return convention == PhaseBudget::absolute ? target : target * kPi;
}

Quantity field_precision(const Quantity& mu, const Quantity& duration, double delta_phi) {
  const double m = positive_base(mu, Dimension::dipole_moment, "dipole moment");
  const double t = positive_base(duration, Dimension::time, "duration");
  if (!(delta_phi >= 0.0)) throw InvalidArgument("phase tolerance must be non-negative");
  return from_base(kHbar * delta_phi / (m * t), Unit::microvolt_per_cm);
}

std::uint64_t ops_count(const Quantity& coherence, const Quantity& gate_time) {
  const double c = positive_base(coherence, Dimension::time, "coherence time");
  const double g = positive_base(gate_time, Dimension::time, "gate time");
  return static_cast<std::uint64_t>(std::floor(c / g));
}

Quantity wire_min_frequency(const Quantity& r, const Quantity& v, int n) {
  const double rr = positive_base(r, Dimension::length, "distance r");
  const double vv = positive_base(v, Dimension::velocity, "velocity");
  if (vv > kSpeedOfLight * (1.0 + 1e-12)) throw InvalidArgument("velocity exceeds c");
  if (n < 1) throw InvalidArgument("mode number must be at least 1");
  return Quantity(n * kPi * vv / rr, Unit::rad_per_s);
}

std::string_view name(Scenario scenario) {
  switch (scenario) {
    case Scenario::direct_lattice: return "direct-lattice";
    case Scenario::inverted_lattice: return "inverted-lattice";
    case Scenario::rotational_trap: return "rotational-trap";
  }
  return "unknown";
}

Scenario scenario_from_name(std::string_view n) {
  for (Scenario s : {Scenario::direct_lattice, Scenario::inverted_lattice, Scenario::rotational_trap}) {
    if (name(s) == n) return s;
  }
  throw InvalidArgument("unknown scenario '" + std::string(n) +
                        "'; expected direct-lattice, inverted-lattice or rotational-trap");
}

std::string_view name(ToleranceKind kind) {
  switch (kind) {
    case ToleranceKind::relative: return "relative";
    case ToleranceKind::order_of_magnitude: return "order_of_magnitude";
    case ToleranceKind::significant_figures: return "significant_figures";
    case ToleranceKind::at_least: return "at_least";
    case ToleranceKind::at_most: return "at_most";
  }
  return "unknown";
}

bool within_tolerance(const Tolerance& tol, double computed, double expected) {
  if (!std::isfinite(computed)) return false;
  switch (tol.kind) {
    case ToleranceKind::relative:
      if (expected == 0.0) return std::abs(computed) <= tol.value;
      return std::abs(computed / expected - 1.0) <= tol.value * (1.0 + 1e-12) + 1e-15;
    case ToleranceKind::order_of_magnitude:
      if (computed == 0.0 || expected == 0.0 || (computed > 0) != (expected > 0)) return false;
      return std::abs(std::log10(computed / expected)) < 1.0;
    case ToleranceKind::significant_figures: {
      if (computed == 0.0) return expected == 0.0;
      const int figures = static_cast<int>(std::lround(tol.value));
      const double magnitude = std::floor(std::log10(std::abs(computed)));
      const double step = std::pow(10.0, magnitude - figures + 1);
      const double rounded = std::round(computed / step) * step;
      return std::abs(rounded - expected) <= 1e-9 * std::abs(expected);
    }
    case ToleranceKind::at_least: return computed >= expected;
    case ToleranceKind::at_most: return computed <= expected;
  }
  return false;
}

std::vector<Expectation> reference_values_from_json(std::string_view text) {
  using nlohmann::json;
  try {
    const json doc = json::parse(text);
    std::vector<Expectation> out;
    for (const json& v : doc.at("values")) {
      Expectation e;
      e.id = v.at("id").get<std::string>();
      e.molecule = v.value("molecule", "");
      e.value = v.at("value").get<double>();
      e.unit = v.at("unit").get<std::string>();
      if (!unit_from_symbol(e.unit)) throw InvalidArgument("unknown unit '" + e.unit + "'");
      const json& t = v.at("tolerance");
      const auto kind = t.at("kind").get<std::string>();
      bool known = false;
      for (ToleranceKind k : {ToleranceKind::relative, ToleranceKind::order_of_magnitude,
                              ToleranceKind::significant_figures, ToleranceKind::at_least,
                              ToleranceKind::at_most}) {
        if (name(k) == kind) {
          e.tolerance.kind = k;
          known = true;
        }
      }
      if (!known) throw InvalidArgument("unknown tolerance kind '" + kind + "'");
      e.tolerance.value = t.value("value", 0.0);
      e.note = v.value("note", "");
      out.push_back(std::move(e));
    }
    return out;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed reference values: ") + e.what());
  }
}

std::vector<Expectation> reference_values() {
  static const std::vector<Expectation> table =
      reference_values_from_json(embedded::reference_values_json());
  return table;
}

const ReportEntry& FeasibilityReport::at(std::string_view id) const {
  for (const auto& e : entries) {
    if (e.id == id) return e;
  }
  throw InvalidArgument("report has no entry '" + std::string(id) + "'");
}

Overrides default_inputs(Scenario scenario) {
  switch (scenario) {
    case Scenario::direct_lattice:
      return {{"r", Quantity(100, Unit::nanometer)},
              {"omega_pi", Quantity(1e5, Unit::rad_per_s)},
              {"omega_2pi", Quantity(1e5, Unit::rad_per_s)},
              {"omega_slow", Quantity(2e3, Unit::rad_per_s)},
              {"omega_drive", Quantity(6e4, Unit::rad_per_s)},
              {"coherence", Quantity(1, Unit::second)},
              {"magnetic_field", Quantity(10, Unit::gauss)}};
    case Scenario::inverted_lattice:
      return {{"r", Quantity(400, Unit::nanometer)},
              {"omega_pi", Quantity(6e4, Unit::rad_per_s)},
              {"omega_2pi", Quantity(1e5, Unit::rad_per_s)},
              {"t_2pi", Quantity(100, Unit::microsecond)},
              {"delta_phi", Quantity(0.01, Unit::radian)},
              {"coherence", Quantity(1, Unit::second)}};
    case Scenario::rotational_trap:
      return {{"h", Quantity(0.1, Unit::micrometer)},
              {"r", Quantity(10, Unit::micrometer)},
              {"omega_pi", Quantity(3e5, Unit::rad_per_s)},
              {"omega_2pi", Quantity(2e4, Unit::rad_per_s)},
              {"omega_c_coupl", Quantity(3e7, Unit::rad_per_s)},
              {"omega_t_coupl", Quantity(3e6, Unit::rad_per_s)},
              {"wire_velocity", Quantity(kSpeedOfLight, Unit::cm_per_s)},
              {"lambda_mw", Quantity(1, Unit::centimeter)},
              {"coherence", Quantity(1, Unit::second)}};
  }
  return {};
}

FeasibilityReport feasibility_report(std::string_view molecule, Scenario scenario,
                                     const Overrides& overrides) {
  const molecules::MoleculeParams m = molecules::preset(molecule);
  Overrides inputs = default_inputs(scenario);
  for (const auto& [key, value] : overrides) {
    auto it = inputs.find(key);
    if (it == inputs.end()) {
      throw InvalidArgument("unknown input '" + key + "' for scenario " +
                            std::string(name(scenario)));
    }
    value.require(it->second.dimension(), key);
    it->second = value;
  }

  FeasibilityReport report;
  report.molecule = m.name;
  report.scenario = scenario;
  ReportBuilder builder(report, inputs);
  switch (scenario) {
    case Scenario::direct_lattice: direct_lattice(m, builder); break;
    case Scenario::inverted_lattice: inverted_lattice(m, builder); break;
    case Scenario::rotational_trap: rotational_trap(m, builder); break;
  }

  if (overrides.empty()) {
    for (const Expectation& x : reference_values()) {
      if (x.molecule != m.name) continue;
      for (ReportEntry& e : report.entries) {
        if (e.id != x.id) continue;
        const auto eu = unit_from_symbol(e.unit);
        const double expected = Quantity(x.value, *unit_from_symbol(x.unit)).in(*eu);
        e.expected = expected;
        e.tolerance = x.tolerance;
        if (expected != 0.0) e.relative_deviation = e.value / expected - 1.0;
        e.within = within_tolerance(x.tolerance, e.value, expected);
      }
    }
  }
  return report;
}

}  // namespace dipolegate::feasibility

namespace dipolegate::feasibility {

std::vector<double> sweep_grid(double start, double stop, std::size_t steps, bool log) {
  if (steps < 1) throw InvalidArgument("a sweep needs at least one step");
  if (!std::isfinite(start) || !std::isfinite(stop)) {
    throw InvalidArgument("sweep bounds must be finite");
  }
  if (log && (start == 0.0 || stop == 0.0 || (start > 0.0) != (stop > 0.0))) {
    throw InvalidArgument("a logarithmic sweep needs non-zero bounds of equal sign");
  }
  std::vector<double> grid(steps);
  for (std::size_t i = 0; i < steps; ++i) {
    const double f = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
    grid[i] = log ? start * std::pow(stop / start, f) : start + f * (stop - start);
  }
  grid.back() = steps == 1 ? start : stop;
  return grid;
}

}  // namespace dipolegate::feasibility
