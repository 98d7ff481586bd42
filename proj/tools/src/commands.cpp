#include "commands.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "dipolegate/dynamics.hpp"
#include "dipolegate/errors.hpp"
#include "dipolegate/feasibility.hpp"
#include "dipolegate/geometry.hpp"
#include "dipolegate/molecules.hpp"
#include "dipolegate/report_io.hpp"
#include "dipolegate/reproduce.hpp"
#include "dipolegate/units.hpp"

namespace dipolegate::cli {

namespace {

using report::Cell;
using report::Table;

const std::vector<std::string> kCommands = {"phase-error", "gate",  "feasibility",
                                            "hyperfine",   "sweep", "reproduce"};

struct CommonOptions {
  std::string format = "table";
  std::string output;
  std::uint64_t seed = 1;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
};

struct PhaseErrorOptions {
  std::string preset = "co";
  std::string mu;
  std::string r = "100nm";
  std::string duration = "1s";
  std::string sigma_r = "0nm";
  std::string sigma_theta = "0";
  std::string sigma_theta1 = "0";
  std::string sigma_theta2 = "0";
  std::string sigma_phi2 = "0";
  std::uint64_t samples = 100000;
  unsigned bootstrap = 200;
  std::string reference = "nominal";
  double target = 0.01;
};

struct GateOptions {
  std::string scheme = "direct";
  std::string preset;
  std::string r;
  std::string h;
  std::string omega;
  std::string omega_pi;
  std::string omega_2pi;
  std::string u;
  std::string u_e1;
  std::string u_ee;
  std::string phases;
  int repetitions = 1;
  bool decay = false;
  double efficiency = 1.0;
  std::string dt_max;
};

struct FeasibilityOptions {
  std::string preset;
  std::string scenario;
  std::vector<std::string> set;
  std::string phase_budget = "absolute";
};

struct HyperfineOptions {
  std::string preset = "bai";
  int nmax = 0;
};

struct SweepOptions {
  std::string param = "u";
  std::string from;
  std::string to;
  std::size_t steps = 10;
  bool log = false;
};

struct ReproduceOptions {
  std::string filter;
  bool strict = false;
};

Quantity parse(const std::string& text, Dimension d, const std::string& flag) {
  try {
    return parse_quantity(text, d);
  } catch (const InvalidArgument& e) {
    throw InvalidArgument("--" + flag + ": " + e.what());
  }
}

// Angles: a bare number is read as radians.
Quantity parse_angle(const std::string& text, const std::string& flag) {
  const Quantity q = parse(text, Dimension::dimensionless, flag);
  return q.unit() == Unit::one ? Quantity(q.value(), Unit::radian) : q;
}

bool is_infinite(const std::string& text) {
  std::string t;
  for (char c : text) t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return t == "inf" || t == "infinity";
}

// Angular frequency flag that also accepts "inf".
double shift_flag(const std::string& text, const std::string& flag) {
  if (is_infinite(text)) return std::numeric_limits<double>::infinity();
  return parse(text, Dimension::angular_frequency, flag).base();
}

std::string show(const Quantity& q) {
  std::ostringstream s;
  s.precision(6);
  s << q.value() << ' ' << symbol(q.unit());
  return s.str();
}

std::string show(double v) {
  std::ostringstream s;
  s.precision(6);
  s << v;
  return s.str();
}

// ---------------------------------------------------------------- phase-error

std::vector<Table> phase_error(const PhaseErrorOptions& o, const CommonOptions& common) {
  const auto m = molecules::preset(o.preset);
  const Quantity mu = !o.mu.empty() ? parse(o.mu, Dimension::dipole_moment, "mu")
                      : m.mu_excited ? *m.mu_excited
                                     : m.require(m.mu_ground, "dipole moment");
  const Quantity r = parse(o.r, Dimension::length, "r");
  const Quantity duration = parse(o.duration, Dimension::time, "duration");

  geometry::GeometryDistribution dist;
  dist.mean = geometry::DipoleGeometry::equilibrium(mu, mu, r);
  const std::map<geometry::Channel, Quantity> sigmas = {
      {geometry::Channel::r, parse(o.sigma_r, Dimension::length, "sigma-r")},
      {geometry::Channel::theta, parse_angle(o.sigma_theta, "sigma-theta")},
      {geometry::Channel::theta1, parse_angle(o.sigma_theta1, "sigma-theta1")},
      {geometry::Channel::theta2, parse_angle(o.sigma_theta2, "sigma-theta2")},
      {geometry::Channel::phi2, parse_angle(o.sigma_phi2, "sigma-phi2")}};
  const auto set_sigma = [](geometry::GeometryDistribution& d, geometry::Channel c, double v) {
    switch (c) {
      case geometry::Channel::r: d.sigma_r = v; break;
      case geometry::Channel::theta: d.sigma_theta = v; break;
      case geometry::Channel::theta1: d.sigma_theta1 = v; break;
      case geometry::Channel::theta2: d.sigma_theta2 = v; break;
      case geometry::Channel::phi2: d.sigma_phi2 = v; break;
    }
  };
  for (const auto& [c, q] : sigmas) set_sigma(dist, c, q.base());
  dist.validate();
  if (!(o.target > 0.0)) throw InvalidArgument("--target must be positive");

  geometry::MonteCarloOptions mc;
  mc.n_samples = o.samples;
  mc.seed = common.seed;
  mc.workers = common.workers;
  mc.bootstrap_resamples = o.bootstrap;
  if (o.reference == "nominal") {
    mc.reference = geometry::PhaseReference::nominal;
  } else if (o.reference == "sample-mean") {
    mc.reference = geometry::PhaseReference::sample_mean;
  } else {
    throw InvalidArgument("--reference must be nominal or sample-mean");
  }

  Table t;
  t.command = "phase-error";
  t.meta = {{"preset", m.name},
            {"mu", show(mu)},
            {"r", show(r)},
            {"duration", show(duration)},
            {"phase", show(geometry::dipole_phase(dist.mean, duration.base())) + " rad"},
            {"samples", std::to_string(o.samples)},
            {"seed", std::to_string(common.seed)},
            {"reference", o.reference},
            {"target", show(o.target)}};
  t.columns = {{"channel", ""},     {"sigma", ""},          {"sigma_unit", ""},
               {"analytic", ""},    {"monte_carlo", ""},    {"std_error", ""},
               {"agrees", ""},      {"tolerated", ""},      {"tolerated_unit", ""}};
  for (const auto& [channel, sigma] : sigmas) {
    geometry::GeometryDistribution one;
    one.mean = dist.mean;
    set_sigma(one, channel, sigma.base());
    const double analytic = geometry::sensitivity_analytic(channel, one);
    const auto result = geometry::phase_error_monte_carlo(one, duration.base(), mc);
    const auto tol = geometry::tolerated_spread(channel, o.target, r.base());
    const bool length = channel == geometry::Channel::r;
    const Unit unit = length ? Unit::nanometer : Unit::degree;
    const double tolerated =
        std::isfinite(tol.spread) ? from_base(tol.spread, unit).value()
                                  : std::numeric_limits<double>::infinity();
    t.add_row({std::string(geometry::name(channel)), sigma.value(),
               std::string(symbol(sigma.unit())), analytic, result.rel_rms_error,
               result.std_error, geometry::monte_carlo_agrees(analytic, result), tolerated,
               std::string(symbol(unit))});
  }
  return {t};
}

// ----------------------------------------------------------------------- gate

enum class Scheme { direct, inverted, rotational };

Scheme scheme_from_name(const std::string& s) {
  if (s == "direct") return Scheme::direct;
  if (s == "inverted") return Scheme::inverted;
  if (s == "rotational") return Scheme::rotational;
  throw InvalidArgument("--scheme must be direct, inverted or rotational");
}

struct GateSetup {
  Scheme scheme = Scheme::direct;
  std::string molecule;
  std::optional<dynamics::LevelScheme> levels;
  dynamics::InteractionSpec inter;
  double omega_pi = 0.0;
  double omega_2pi = 0.0;
  dynamics::GateOptions options;
  std::vector<std::pair<std::string, std::string>> meta;
};

// Builds everything but the interaction shifts, which `apply_shifts` fills in
// from the preset geometry or the explicit flags.
GateSetup gate_setup(const GateOptions& o) {
  GateSetup s;
  s.scheme = scheme_from_name(o.scheme);
  const feasibility::Scenario scenario = s.scheme == Scheme::direct ? feasibility::Scenario::direct_lattice
                                         : s.scheme == Scheme::inverted
                                             ? feasibility::Scenario::inverted_lattice
                                             : feasibility::Scenario::rotational_trap;
  const auto defaults = feasibility::default_inputs(scenario);
  const std::string preset = !o.preset.empty()               ? o.preset
                             : s.scheme == Scheme::direct   ? "co"
                             : s.scheme == Scheme::inverted ? "lics"
                                                            : "bai";
  const auto m = molecules::preset(preset);
  s.molecule = m.name;

  const auto pick = [&](const std::string& flag_value, const std::string& fallback,
                        const char* key) {
    if (!flag_value.empty()) return parse(flag_value, Dimension::angular_frequency, key).base();
    if (!fallback.empty()) return parse(fallback, Dimension::angular_frequency, key).base();
    return defaults.at(key == std::string("omega-pi") ? "omega_pi" : "omega_2pi").base();
  };
  s.omega_pi = pick(o.omega_pi, o.omega, "omega-pi");
  s.omega_2pi = pick(o.omega_2pi, o.omega, "omega-2pi");

  const Quantity r = o.r.empty() ? defaults.at("r") : parse(o.r, Dimension::length, "r");
  const double lifetime =
      o.decay && m.excited_lifetime ? m.excited_lifetime->base() : dynamics::kNoDecay;
  if (o.decay && !m.excited_lifetime) {
    throw InvalidArgument("--decay needs a preset with an excited-state lifetime");
  }

  switch (s.scheme) {
    case Scheme::direct: {
      const Quantity& mu_e = m.require(m.mu_excited, "excited-state dipole moment");
      s.levels = dynamics::LevelScheme::direct(0.0, mu_e.base(), lifetime);
      if (o.u.empty()) s.inter.u_ee = feasibility::dipole_dipole_shift(mu_e, mu_e, r).base();
      s.meta.push_back({"r", show(r)});
      break;
    }
    case Scheme::inverted: {
      const Quantity& mu_g = m.require(m.mu_ground, "ground-state dipole moment");
      const Quantity& mu_e = m.require(m.mu_excited, "excited-state dipole moment");
      s.levels = dynamics::LevelScheme::inverted(mu_g.base(), mu_e.base(), lifetime);
      if (!o.phases.empty()) {
        const double phi = o.phases == "pi" ? constants::kPi
                                            : parse(o.phases, Dimension::dimensionless, "phases").base();
        const double window =
            dynamics::PulseSpec::two_pi(dynamics::Molecule::target, {"1'", "e"}, s.omega_2pi).duration;
        // The accumulated phases already contain the diagonal interactions, so
        // the shifts only block: ideal blockade unless the flags say otherwise.
        s.inter = dynamics::InteractionSpec::with_accumulated_phases(phi, phi, window);
        s.inter.u_gg = std::numeric_limits<double>::infinity();
        s.meta.push_back({"phases", o.phases});
      } else {
        s.inter.u_gg = feasibility::dipole_dipole_shift(mu_g, mu_g, r).base();
        s.inter.u_e1 = feasibility::dipole_dipole_shift(mu_g, mu_e, r).base();
        s.inter.u_ee = feasibility::dipole_dipole_shift(mu_e, mu_e, r).base();
      }
      s.meta.push_back({"r", show(r)});
      break;
    }
    case Scheme::rotational: {
      const Quantity& mu = m.require(m.mu_ground, "ground-state dipole moment");
      s.levels = dynamics::LevelScheme::direct(mu.base(), mu.base(), lifetime);
      const Quantity h = o.h.empty() ? defaults.at("h") : parse(o.h, Dimension::length, "height");
      const Quantity rr = o.r.empty() ? defaults.at("r") : r;
      if (o.u.empty()) s.inter.u_ee = feasibility::trap_dipole_shift(mu, h, rr).base();
      s.meta.push_back({"h", show(h)});
      s.meta.push_back({"r", show(rr)});
      break;
    }
  }
  if (!o.u.empty()) {
    (s.scheme == Scheme::inverted ? s.inter.u_gg : s.inter.u_ee) = shift_flag(o.u, "u");
  }
  if (!o.u_e1.empty()) s.inter.u_e1 = shift_flag(o.u_e1, "u-e1");
  if (!o.u_ee.empty()) s.inter.u_ee = shift_flag(o.u_ee, "u-ee");

  if (o.repetitions < 1) throw InvalidArgument("--repetitions must be at least 1");
  s.options.repetitions = o.repetitions;
  s.options.include_decay = o.decay;
  s.options.transfer_efficiency = o.efficiency;
  if (!o.dt_max.empty()) s.options.dt_max = parse(o.dt_max, Dimension::time, "dt-max").base();
  return s;
}

dynamics::GateResult run_gate(const GateSetup& s) {
  switch (s.scheme) {
    case Scheme::direct:
      return dynamics::run_direct_gate(*s.levels, s.inter, s.omega_pi, s.omega_2pi, s.options);
    case Scheme::inverted:
      return dynamics::run_inverted_gate(*s.levels, s.inter, s.omega_pi, s.omega_2pi, s.options);
    case Scheme::rotational:
      return dynamics::run_rotational_gate(*s.levels, s.inter, s.omega_pi, s.omega_2pi,
                                           s.options);
  }
  throw InvalidArgument("unknown scheme");
}

const std::array<std::string, 4> kBasis = {"|00>", "|01>", "|10>", "|11>"};

std::vector<Table> gate(const GateOptions& o) {
  const GateSetup s = gate_setup(o);
  const auto g = run_gate(s);

  std::vector<std::pair<std::string, std::string>> meta = {
      {"scheme", o.scheme}, {"molecule", s.molecule}};
  meta.insert(meta.end(), s.meta.begin(), s.meta.end());
  meta.push_back({"omega_pi", show(s.omega_pi) + " rad/s"});
  meta.push_back({"omega_2pi", show(s.omega_2pi) + " rad/s"});
  meta.push_back({"repetitions", std::to_string(o.repetitions)});

  Table map;
  map.command = "gate";
  map.meta = meta;
  map.columns = {{"input", ""}, {"output", ""}, {"magnitude", ""}, {"phase", "rad"},
                 {"ideal_magnitude", ""}, {"ideal_phase", "rad"}};
  for (int k = 0; k < 4; ++k) {
    for (int j = 0; j < 4; ++j) {
      const auto a = g.basis_map(j, k);
      const auto b = g.ideal(j, k);
      map.add_row({kBasis[k], kBasis[j], std::abs(a), std::abs(a) > 0.0 ? Cell(std::arg(a)) : Cell(),
                   std::abs(b), std::abs(b) > 0.0 ? Cell(std::arg(b)) : Cell()});
    }
  }

  Table summary;
  summary.command = "gate";
  summary.meta = meta;
  summary.columns = {{"quantity", ""}, {"value", ""}, {"unit", ""}};
  summary.add_row({std::string("fidelity"), g.fidelity, std::string("1")});
  summary.add_row({std::string("gate_time"),
                   from_base(g.gate_time, Unit::microsecond).value(), std::string("us")});
  summary.add_row({std::string("residual_phase_11"), g.residual_phase_11(), std::string("rad")});
  for (int k = 0; k < 4; ++k) {
    summary.add_row({"leakage " + kBasis[k], g.leakage[k], std::string("1")});
  }
  for (int k = 0; k < 4; ++k) {
    summary.add_row({"peak_target_excitation " + kBasis[k], g.peak_target_excitation[k],
                     std::string("1")});
  }
  summary.add_row({std::string("u_ee"), s.inter.u_ee, std::string("rad/s")});
  if (s.scheme == Scheme::inverted) {
    summary.add_row({std::string("u_e1"), s.inter.u_e1, std::string("rad/s")});
    summary.add_row({std::string("u_gg"), s.inter.u_gg, std::string("rad/s")});
  }
  return {map, summary};
}

// ---------------------------------------------------------------- feasibility

std::vector<Table> feasibility_cmd(const FeasibilityOptions& o) {
  if (o.preset.empty()) throw InvalidArgument("--preset is required");
  if (o.scenario.empty()) throw InvalidArgument("--scenario is required");
  const auto scenario = feasibility::scenario_from_name(o.scenario);
  const auto defaults = feasibility::default_inputs(scenario);
  feasibility::Overrides overrides;
  for (const std::string& kv : o.set) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InvalidArgument("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const auto it = defaults.find(key);
    if (it == defaults.end()) {
      std::string known;
      for (const auto& [k, v] : defaults) known += (known.empty() ? "" : ", ") + k;
      throw InvalidArgument("unknown input '" + key + "'; known: " + known);
    }
    overrides.insert_or_assign(key, parse(kv.substr(eq + 1), it->second.dimension(), "set " + key));
  }
  if (o.phase_budget == "fraction-of-pi") {
    if (scenario != feasibility::Scenario::inverted_lattice) {
      throw InvalidArgument("--phase-budget applies to the inverted-lattice scenario");
    }
    if (!overrides.count("delta_phi")) {
      overrides.insert_or_assign(
          "delta_phi",
          Quantity(feasibility::phase_budget(feasibility::PhaseBudget::fraction_of_pi), Unit::radian));
    }
  } else if (o.phase_budget != "absolute") {
    throw InvalidArgument("--phase-budget must be absolute or fraction-of-pi");
  }
  const auto rep = feasibility::feasibility_report(o.preset, scenario, overrides);
  return {report::report_table(rep)};
}

// ------------------------------------------------------------------ hyperfine

std::vector<Table> hyperfine(const HyperfineOptions& o) {
  const auto m = molecules::preset(o.preset);
  const auto levels = molecules::hyperfine_levels(m, o.nmax);
  std::vector<Table> tables;
  for (int n = 0; n <= o.nmax; ++n) {
    Table t;
    t.command = "hyperfine";
    t.meta = {{"molecule", m.name}, {"N", std::to_string(n)}, {"nmax", std::to_string(o.nmax)}};
    t.columns = {{"N", ""}, {"J", ""}, {"F", ""}, {"energy", "MHz"}, {"degeneracy", ""}};
    for (const auto& l : levels) {
      if (l.N != n) continue;
      t.add_row({static_cast<std::int64_t>(l.N), l.J, l.F, l.energy,
                 static_cast<std::int64_t>(l.degeneracy)});
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

// ---------------------------------------------------------------------- sweep

struct SweepParam {
  Dimension dimension;
  Unit display;
};

const std::map<std::string, SweepParam> kSweepParams = {
    {"u", {Dimension::angular_frequency, Unit::rad_per_s}},
    {"omega", {Dimension::angular_frequency, Unit::rad_per_s}},
    {"omega-pi", {Dimension::angular_frequency, Unit::rad_per_s}},
    {"omega-2pi", {Dimension::angular_frequency, Unit::rad_per_s}},
    {"r", {Dimension::length, Unit::nanometer}},
};

std::vector<Table> sweep(const SweepOptions& o, const GateOptions& gate_opts,
                         const CommonOptions& common, int& exit_code) {
  const auto it = kSweepParams.find(o.param);
  if (it == kSweepParams.end()) {
    throw InvalidArgument("--param must be one of u, omega, omega-pi, omega-2pi, r");
  }
  if (o.from.empty() || o.to.empty()) throw InvalidArgument("--from and --to are required");
  if (o.steps < 1) throw InvalidArgument("--steps must be at least 1");
  const Unit unit = it->second.display;
  const double from = parse(o.from, it->second.dimension, "from").in(unit);
  const double to = parse(o.to, it->second.dimension, "to").in(unit);
  const auto grid = feasibility::sweep_grid(from, to, o.steps, o.log);
  // Fails fast on flags that are invalid regardless of the swept value.
  gate_setup(gate_opts);

  struct Row {
    std::optional<dynamics::GateResult> result;
    GateSetup setup;
    std::string error;
  };
  std::vector<Row> rows(grid.size());
  const auto work = [&](std::size_t i) {
    try {
      GateOptions g = gate_opts;
      std::ostringstream v;
      v.precision(17);
      v << grid[i] << ' ' << symbol(unit);
      const std::string value = v.str();
      if (o.param == "u") g.u = value;
      else if (o.param == "omega") g.omega = value, g.omega_pi.clear(), g.omega_2pi.clear();
      else if (o.param == "omega-pi") g.omega_pi = value;
      else if (o.param == "omega-2pi") g.omega_2pi = value;
      else g.r = value;
      rows[i].setup = gate_setup(g);
      rows[i].result = run_gate(rows[i].setup);
    } catch (const std::exception& e) {
      rows[i].error = e.what();
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(common.workers, grid.size()));
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < grid.size(); i += workers) work(i);
    });
  }
  for (auto& th : pool) th.join();

  Table t;
  t.command = "sweep";
  t.meta = {{"scheme", gate_opts.scheme},
            {"param", o.param},
            {"scale", o.log ? "log" : "linear"},
            {"steps", std::to_string(o.steps)}};
  t.columns = {{"index", ""},          {"swept_" + o.param, std::string(symbol(unit))},
               {"u", "rad/s"},         {"omega_2pi", "rad/s"},
               {"residual_phase", "rad"}, {"predicted_phase", "rad"},
               {"fidelity", ""},       {"max_leakage", ""},
               {"gate_time", "us"},    {"status", ""},
               {"error", ""}};
  std::size_t ok = 0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const Row& r = rows[i];
    if (!r.result) {
      t.add_row({static_cast<std::int64_t>(i), grid[i], Cell(), Cell(), Cell(), Cell(), Cell(),
                 Cell(), Cell(), std::string("error"), r.error});
      continue;
    }
    ++ok;
    const auto& g = *r.result;
    const double u = r.setup.scheme == Scheme::inverted ? r.setup.inter.u_gg : r.setup.inter.u_ee;
    Cell predicted;
    if (std::isfinite(u)) predicted = feasibility::blockade_residual_phase(r.setup.omega_2pi, u);
    t.add_row({static_cast<std::int64_t>(i), grid[i], std::isfinite(u) ? Cell(u) : Cell(),
               r.setup.omega_2pi, g.residual_phase_11(), predicted, g.fidelity,
               *std::max_element(g.leakage.begin(), g.leakage.end()),
               from_base(g.gate_time, Unit::microsecond).value(), std::string("ok"),
               std::string()});
  }
  exit_code = ok > 0 ? kExitOk : kExitNumerical;
  return {t};
}

// ------------------------------------------------------------------ reproduce

std::vector<Table> reproduce_cmd(const ReproduceOptions& o, int& exit_code) {
  const auto checks = reproduce::run_all(o.filter);
  if (checks.empty()) throw InvalidArgument("no reference value matches '" + o.filter + "'");
  const bool all = std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  exit_code = o.strict && !all ? kExitNumerical : kExitOk;
  return {report::checks_table(checks)};
}

void add_gate_flags(CLI::App* sub, GateOptions& g) {
  sub->add_option("--scheme", g.scheme, "direct, inverted or rotational")
      ->check(CLI::IsMember({"direct", "inverted", "rotational"}));
  sub->add_option("--preset", g.preset, "molecule preset (default per scheme: co, lics, bai)");
  sub->add_option("--r", g.r, "molecule separation, e.g. 100nm");
  sub->add_option("--height", g.h, "distance to the surface (rotational), e.g. 0.1um");
  sub->add_option("--omega", g.omega, "Rabi frequency of every pulse, rad/s or with unit");
  sub->add_option("--omega-pi", g.omega_pi, "Rabi frequency of the pi pulses");
  sub->add_option("--omega-2pi", g.omega_2pi, "Rabi frequency of the 2pi pulse");
  sub->add_option("--u", g.u, "blockade shift (u_ee, or u_gg for inverted); 'inf' for ideal");
  sub->add_option("--u-e1", g.u_e1, "storage/excited shift of the inverted scheme");
  sub->add_option("--u-ee", g.u_ee, "excited/excited shift of the inverted scheme");
  sub->add_option("--phases", g.phases, "accumulated 2pi-window phases ('pi' or radians) with ideal blockade");
  sub->add_option("--repetitions", g.repetitions, "number of times the sequence is applied");
  sub->add_flag("--decay", g.decay, "include the excited-state lifetime of the preset");
  sub->add_option("--efficiency", g.efficiency, "transfer efficiency of the inverted scheme");
  sub->add_option("--dt-max", g.dt_max, "largest propagation step, e.g. 10ns");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_output(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot write '" + path + "'");
  f << text;
}

}  // namespace

std::vector<std::string> expand_config(const std::vector<std::string>& args) {
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw InvalidArgument("--config needs a file name");
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (config_path.empty()) return args;

  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(read_file(config_path));
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument("config '" + config_path + "': " + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("config '" + config_path + "' must be an object");

  std::string command;
  std::vector<std::string> flags;
  for (const auto& [key, value] : doc.items()) {
    if (key == "command") {
      command = value.get<std::string>();
      continue;
    }
    const auto scalar = [&](const nlohmann::json& v) {
      if (v.is_string()) return v.get<std::string>();
      if (v.is_number() || v.is_boolean()) return v.dump();
      throw InvalidArgument("config key '" + key + "' has an unsupported value");
    };
    if (value.is_boolean()) {
      if (value.get<bool>()) flags.push_back("--" + key);
    } else if (value.is_array()) {
      for (const auto& v : value) {
        flags.push_back("--" + key);
        flags.push_back(scalar(v));
      }
    } else {
      flags.push_back("--" + key);
      flags.push_back(scalar(value));
    }
  }

  // The command line may name the command itself; its flags follow the file's.
  std::vector<std::string> out;
  std::size_t start = 0;
  if (!rest.empty() &&
      std::find(kCommands.begin(), kCommands.end(), rest.front()) != kCommands.end()) {
    if (!command.empty() && command != rest.front()) {
      throw InvalidArgument("config command '" + command + "' conflicts with '" + rest.front() + "'");
    }
    command = rest.front();
    start = 1;
  }
  if (command.empty()) throw InvalidArgument("no command given on the command line or in the config");
  out.push_back(command);
  out.insert(out.end(), flags.begin(), flags.end());
  out.insert(out.end(), rest.begin() + static_cast<std::ptrdiff_t>(start), rest.end());
  return out;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dipole-dipole phase gates between polar molecules", "dipolegate"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  std::string config_unused;
  app.add_option("--config", config_unused, "JSON file whose keys mirror the long flags");
  app.add_option("--format", common.format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  app.add_option("--output", common.output, "write to a file instead of stdout");
  app.add_option("--seed", common.seed, "random seed of the Monte-Carlo runs");
  app.add_option("--workers", common.workers, "worker threads for sampling and sweeps")
      ->check(CLI::PositiveNumber);

  PhaseErrorOptions pe;
  auto* pe_cmd = app.add_subcommand("phase-error", "analytic and Monte-Carlo phase error budget");
  pe_cmd->add_option("--preset", pe.preset, "molecule preset supplying the dipole");
  pe_cmd->add_option("--mu", pe.mu, "dipole moment, e.g. 1.37D (overrides the preset)");
  pe_cmd->add_option("--r", pe.r, "mean separation, e.g. 500nm");
  pe_cmd->add_option("--duration", pe.duration, "interaction time, e.g. 1s");
  pe_cmd->add_option("--sigma-r", pe.sigma_r, "RMS separation spread, e.g. 1.5nm");
  pe_cmd->add_option("--sigma-theta", pe.sigma_theta, "offset-angle spread, rad or deg");
  pe_cmd->add_option("--sigma-theta1", pe.sigma_theta1, "polar spread of dipole 1");
  pe_cmd->add_option("--sigma-theta2", pe.sigma_theta2, "polar spread of dipole 2");
  pe_cmd->add_option("--sigma-phi2", pe.sigma_phi2, "azimuthal spread of dipole 2");
  pe_cmd->add_option("--samples", pe.samples, "Monte-Carlo samples (>= 1000)");
  pe_cmd->add_option("--bootstrap", pe.bootstrap, "bootstrap resamples for the standard error");
  pe_cmd->add_option("--reference", pe.reference, "nominal or sample-mean")
      ->check(CLI::IsMember({"nominal", "sample-mean"}));
  pe_cmd->add_option("--target", pe.target, "relative error budget of the tolerated column");

  GateOptions gate_opts;
  auto* gate_cmd = app.add_subcommand("gate", "simulate a blockade gate sequence");
  add_gate_flags(gate_cmd, gate_opts);

  FeasibilityOptions fe;
  auto* fe_cmd = app.add_subcommand("feasibility", "closed-form estimates against reference values");
  fe_cmd->add_option("--preset", fe.preset, "molecule preset");
  fe_cmd->add_option("--scenario", fe.scenario, "direct-lattice, inverted-lattice or rotational-trap");
  fe_cmd->add_option("--set", fe.set, "override an input, e.g. r=200nm (repeatable)")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  fe_cmd->add_option("--phase-budget", fe.phase_budget,
                     "field-precision phase tolerance: absolute (0.01 rad) or fraction-of-pi");

  HyperfineOptions hf;
  auto* hf_cmd = app.add_subcommand("hyperfine", "rotational and hyperfine level table");
  hf_cmd->add_option("--preset", hf.preset, "molecule preset");
  hf_cmd->add_option("--nmax", hf.nmax, "highest rotational level listed (0..4)");

  SweepOptions sw;
  GateOptions sweep_gate;
  auto* sw_cmd = app.add_subcommand("sweep", "gate figures of merit over a parameter grid");
  sw_cmd->add_option("--param", sw.param, "u, omega, omega-pi, omega-2pi or r");
  sw_cmd->add_option("--from", sw.from, "first grid value");
  sw_cmd->add_option("--to", sw.to, "last grid value");
  sw_cmd->add_option("--steps", sw.steps, "number of grid points");
  sw_cmd->add_flag("--log", sw.log, "geometric spacing");
  add_gate_flags(sw_cmd, sweep_gate);

  ReproduceOptions rp;
  auto* rp_cmd = app.add_subcommand("reproduce", "check every shipped reference value");
  rp_cmd->add_option("--filter", rp.filter, "only ids starting with this prefix");
  rp_cmd->add_flag("--strict", rp.strict, "exit with 1 when a check fails");

  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    const report::Format format = report::format_from_name(common.format);
    int exit_code = kExitOk;
    std::vector<Table> tables;
    if (*pe_cmd) tables = phase_error(pe, common);
    else if (*gate_cmd) tables = gate(gate_opts);
    else if (*fe_cmd) tables = feasibility_cmd(fe);
    else if (*hf_cmd) tables = hyperfine(hf);
    else if (*sw_cmd) tables = sweep(sw, sweep_gate, common, exit_code);
    else if (*rp_cmd) tables = reproduce_cmd(rp, exit_code);
    write_output(report::render(tables, format), common.output, out);
    return exit_code;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace dipolegate::cli
