// Acceptance suite: one PASS/FAIL line per criterion.
//
//   dipolegate_acceptance [--expect-fail N]...
//
// Exits 0 when every criterion passes, except those listed with
// --expect-fail, which must fail. A listed criterion that passes fails the
// run, so a stale expectation cannot linger.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "dipolegate/dynamics.hpp"
#include "dipolegate/errors.hpp"
#include "dipolegate/feasibility.hpp"
#include "dipolegate/geometry.hpp"
#include "dipolegate/molecules.hpp"
#include "dipolegate/units.hpp"

namespace dg = dipolegate;
namespace dyn = dipolegate::dynamics;
namespace fz = dipolegate::feasibility;
namespace geo = dipolegate::geometry;
namespace mol = dipolegate::molecules;
using dg::Quantity;
using dg::Unit;

namespace {

// Accumulates sub-checks of one criterion.
class Criterion {
 public:
  void expect(bool ok, const std::string& what) {
    ok_ = ok_ && ok;
    if (!ok) failures_.push_back(what);
    details_.push_back(what);
  }
  void relative(const std::string& label, double computed, double expected, double tol) {
    std::ostringstream s;
    s << label << " = " << computed << " (ref " << expected << " +-" << tol * 100 << "%)";
    expect(std::abs(computed / expected - 1.0) <= tol * (1.0 + 1e-12), s.str());
  }
  void order_of_magnitude(const std::string& label, double computed, double expected) {
    std::ostringstream s;
    s << label << " = " << computed << " (ref " << expected << " within a decade)";
    expect(computed > 0.0 && std::abs(std::log10(computed / expected)) < 1.0, s.str());
  }
  void at_most(const std::string& label, double computed, double bound) {
    std::ostringstream s;
    s << label << " = " << computed << " (<= " << bound << ")";
    expect(computed <= bound, s.str());
  }
  void at_least(const std::string& label, double computed, double bound) {
    std::ostringstream s;
    s << label << " = " << computed << " (>= " << bound << ")";
    expect(computed >= bound, s.str());
  }
  bool ok() const { return ok_; }
  const std::vector<std::string>& failures() const { return failures_; }
  const std::vector<std::string>& details() const { return details_; }

 private:
  bool ok_ = true;
  std::vector<std::string> failures_;
  std::vector<std::string> details_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_deviation(const dyn::GateMatrix& a, const dyn::GateMatrix& b) { return (a - b).cwiseAbs().maxCoeff(); }

double entry(const fz::FeasibilityReport& r, const std::string& id) { return r.at(id).value; }

void co_blockade_shift(Criterion& c) {
  const Quantity mu(1.37, Unit::debye);
  c.relative("u [rad/s]", fz::dipole_dipole_shift(mu, mu, Quantity(100, Unit::nanometer)).base(), 1.87e6, 0.05);
}

void gate_times(Criterion& c) {
  c.relative("direct T [us]", dyn::gate_time(1e5, 1e5) * 1e6, 126, 0.02);
  c.relative("direct slow T [ms]", dyn::gate_time(2e3, 2e3) * 1e3, 6.3, 0.02);
  c.relative("inverted T [us]", dyn::gate_time(6e4, 1e5) * 1e6, 160, 0.10);
  const double t_pi = M_PI / 3e5, t_2pi = 2.0 * M_PI / 2e4;
  c.relative("rotational 2T_pi + T_2pi [us]", dyn::gate_time_from_durations(t_pi, t_2pi) * 1e6, 320, 0.05);
}

void error_budgets(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  const double r = Quantity(500, Unit::nanometer).base();
  const double deg = 180.0 / M_PI;
  c.relative("sigma_r budget @ 500 nm [nm]", geo::tolerated_spread(geo::Channel::r, 0.01, r).spread * 1e7, 1.5,
             0.10);
  c.relative("theta budget [deg]", geo::tolerated_spread(geo::Channel::theta, 0.01).spread * deg, 3.0, 0.10);
  c.relative("theta1 budget [deg]", geo::tolerated_spread(geo::Channel::theta1, 0.01).spread * deg, 8.0, 0.10);
  c.relative("theta2 budget [deg]", geo::tolerated_spread(geo::Channel::theta2, 0.01).spread * deg, 8.0, 0.10);

  const Quantity mu(1.37, Unit::debye);
  for (const geo::Channel ch :
       {geo::Channel::r, geo::Channel::theta, geo::Channel::theta1, geo::Channel::theta2, geo::Channel::phi2}) {
    geo::GeometryDistribution dist;
    dist.mean = geo::DipoleGeometry::equilibrium(mu, mu, Quantity(500, Unit::nanometer));
    switch (ch) {
      case geo::Channel::r: dist.sigma_r = Quantity(1.5, Unit::nanometer).base(); break;
      case geo::Channel::theta: dist.sigma_theta = 0.05; break;
      case geo::Channel::theta1: dist.sigma_theta1 = 0.05; break;
      case geo::Channel::theta2: dist.sigma_theta2 = 0.05; break;
      case geo::Channel::phi2: dist.sigma_phi2 = 0.05; break;
    }
    geo::MonteCarloOptions opts;
    opts.n_samples = 100000;
    opts.seed = 20240601;
    const double analytic = geo::sensitivity_analytic(ch, dist);
    const auto mc = geo::phase_error_monte_carlo(dist, 1.0, opts);
    std::ostringstream s;
    s << "MC " << geo::name(ch) << " = " << mc.rel_rms_error << " +- " << mc.std_error << " vs analytic "
      << analytic;
    c.expect(geo::monte_carlo_agrees(analytic, mc), s.str());
  }
  c.at_most("runtime [s]", seconds_since(t0), 10.0);
}

void lattice_estimates(Criterion& c) {
  const double lambda = Quantity(800, Unit::nanometer).base();
  const auto two_figures = [&](const std::string& label, double v, double expected) {
    const double rounded = std::round(v * 100.0) / 100.0;
    std::ostringstream s;
    s << label << " = " << v << " (ref " << expected << " to 2 figures)";
    c.expect(std::abs(rounded - expected) < 1e-9, s.str());
  };
  two_figures("neighbour @ 10 E_R", geo::lattice_phase_error({lambda, 10, 1}), 0.54);
  two_figures("neighbour @ 40 E_R", geo::lattice_phase_error({lambda, 40, 1}), 0.38);
  c.relative("five periods @ 10 E_R", geo::lattice_phase_error({lambda, 10, 5}), 0.11, 0.10);
  c.relative("five periods @ 40 E_R", geo::lattice_phase_error({lambda, 40, 5}), 0.08, 0.10);
}

void trap_budget(Criterion& c) {
  const auto t = geo::tolerated_trap_spread(Quantity(1, Unit::micrometer).base(), Quantity(10, Unit::micrometer).base(),
                                            0.01);
  c.relative("sigma_h [nm]", t.from_h * 1e7, 5.0, 1e-12);
  c.relative("sigma_r [nm]", t.from_r * 1e7, 100.0, 1e-12);
}

void truth_tables(Criterion& c) {
  const auto scheme = dyn::LevelScheme::direct();
  auto t0 = std::chrono::steady_clock::now();
  dyn::InteractionSpec strong;
  strong.u_ee = 1e9;
  const auto g = dyn::run_direct_gate(scheme, strong, 1e5, 1e5);
  double leak = 0.0;
  for (double l : g.leakage) leak = std::max(leak, l);
  c.at_most("u/Omega = 1e4: |U - diag(1,-1,-1,-1)|", max_deviation(g.basis_map, dyn::ideal_phase_gate()), 1e-3);
  c.at_most("u/Omega = 1e4: leakage", leak, 1e-6);
  c.expect(g.fidelity > 0.9999, "u/Omega = 1e4: fidelity = " + std::to_string(g.fidelity) + " (> 0.9999)");

  dyn::InteractionSpec weak;
  weak.u_ee = 18.7e5;
  const auto w = dyn::run_direct_gate(scheme, weak, 1e5, 1e5);
  c.relative("u/Omega = 18.7: residual phase", std::abs(w.residual_phase_11()),
             fz::blockade_residual_phase(1e5, 18.7e5), 0.30);
  c.at_least("u/Omega = 18.7: fidelity", w.fidelity, 0.99);
  c.at_most("direct runtime [s]", seconds_since(t0), 5.0);

  t0 = std::chrono::steady_clock::now();
  const double omega = 1e5;
  const double window = 2.0 * M_PI / omega;
  auto inter = dyn::InteractionSpec::with_accumulated_phases(M_PI, M_PI, window);
  inter.u_gg = std::numeric_limits<double>::infinity();
  dyn::GateOptions opts;
  opts.repetitions = 2;
  const auto inv = dyn::run_inverted_gate(dyn::LevelScheme::inverted(), inter, omega, omega, opts);
  dyn::GateMatrix target = dyn::GateMatrix::Identity();
  target(3, 3) = -1.0;
  c.at_most("inverted, Phi = pi, twice: |U - diag(1,1,1,-1)|", max_deviation(inv.basis_map, target), 1e-8);
  c.at_most("inverted runtime [s]", seconds_since(t0), 5.0);
}

void blockade_scaling(Criterion& c) {
  const auto scheme = dyn::LevelScheme::direct();
  const double omega = 1e5;
  std::vector<double> x, y;
  for (int k = 0; k <= 10; ++k) {
    dyn::InteractionSpec inter;
    inter.u_ee = omega * std::pow(10.0, 1.0 + k / 10.0);
    const auto g = dyn::run_direct_gate(scheme, inter, omega, omega);
    x.push_back(std::log(inter.u_ee));
    y.push_back(std::log(std::abs(g.residual_phase_11())));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i] / x.size();
    my += y[i] / y.size();
  }
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  const double slope = sxy / sxx;
  c.expect(std::abs(slope + 1.0) <= 0.1, "log-log slope over u/Omega in [10, 100] = " + std::to_string(slope));
}

void lics_numbers(Criterion& c) {
  const auto r = fz::feasibility_report("lics", fz::Scenario::inverted_lattice);
  c.relative("u_gg [rad/s]", entry(r, "inverted-lattice.u_gg"), 5e5, 0.15);
  c.relative("u_e1 [rad/s]", entry(r, "inverted-lattice.u_e1"), 4e4, 0.15);
  c.relative("Stark field [kV/cm]", entry(r, "inverted-lattice.stark_field"), 4.0, 0.10);
  c.relative("DC rate [rad/s]", entry(r, "inverted-lattice.dc_rate"), 7e10, 0.10);
  c.relative("field precision [uV/cm]", entry(r, "inverted-lattice.field_precision"), 5.0, 0.25);
}

void bai_numbers(Criterion& c) {
  const auto r = fz::feasibility_report("bai", fz::Scenario::rotational_trap);
  c.relative("V_trap [rad/s]", entry(r, "rotational-trap.v_trap"), 3.6e5, 0.10);
  const auto exact = [&](const std::string& id, double expected) {
    const double v = entry(r, "rotational-trap." + id);
    c.expect(v == expected, id + " = " + std::to_string(v));
  };
  exact("dressed_plus_c", 3e7);
  exact("dressed_minus_c", -3e7);
  exact("dressed_plus_t", 3e6);
  exact("dressed_minus_t", -3e6);
  const double t_pi = entry(r, "rotational-trap.t_pi");
  c.expect(std::round(t_pi) == 10.0,
           "T_pi [us] = " + std::to_string(t_pi) + " (10 at two figures)");

  const auto levels = mol::hyperfine_levels(mol::preset("bai"), 0);
  int multiplicity = 0;
  std::set<double> fs;
  for (const auto& l : levels) {
    multiplicity += l.degeneracy;
    fs.insert(l.F);
  }
  c.expect(levels.size() == 2 && fs == std::set<double>{2.0, 3.0},
           "N = 0 levels: " + std::to_string(levels.size()) + " with F = 2, 3");
  c.expect(multiplicity == 12, "N = 0 multiplicity = " + std::to_string(multiplicity));

  mol::SigmaHamiltonian h;
  h.B = 800.0;
  h.b_F = 93.117;
  h.I = 2.5;
  const auto only_fermi = mol::hyperfine_levels(h, 0);
  double err = 0.0;
  for (const auto& l : only_fermi) {
    const double is = 0.5 * (l.F * (l.F + 1) - h.I * (h.I + 1) - 0.75);
    err = std::max(err, std::abs(l.energy - h.b_F * is));
  }
  c.at_most("b_F-only sum rule error [MHz]", err, 1e-10);
}

void operation_counts(Criterion& c) {
  c.relative("direct ops",
             entry(fz::feasibility_report("co", fz::Scenario::direct_lattice), "direct-lattice.ops_count"), 8e3, 0.20);
  c.relative("inverted ops",
             entry(fz::feasibility_report("lics", fz::Scenario::inverted_lattice), "inverted-lattice.ops_count"), 6e3,
             0.20);
  c.relative("rotational ops",
             entry(fz::feasibility_report("bai", fz::Scenario::rotational_trap), "rotational-trap.ops_count"), 3e3,
             0.20);
}

void norm_conservation(Criterion& c) {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto log_uniform = [&](double lo, double hi) { return lo * std::pow(hi / lo, unit(rng)); };
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const bool inverted = unit(rng) < 0.5;
    const auto scheme = inverted ? dyn::LevelScheme::inverted() : dyn::LevelScheme::direct();
    dyn::InteractionSpec inter;
    inter.u_ee = log_uniform(1e3, 1e8) * (unit(rng) < 0.5 ? -1.0 : 1.0);
    inter.u_e1 = log_uniform(1e2, 1e7);
    inter.u_gg = log_uniform(1e2, 1e7);
    const std::vector<std::string> labels =
        inverted ? std::vector<std::string>{"0", "1", "1'", "e"} : std::vector<std::string>{"0", "1", "e"};
    std::uniform_int_distribution<std::size_t> pick(0, labels.size() - 1);
    std::vector<dyn::Segment> segments;
    const int n = 1 + static_cast<int>(unit(rng) * 6);
    for (int i = 0; i < n; ++i) {
      std::string lo = labels[pick(rng)], up = labels[pick(rng)];
      while (up == lo) up = labels[pick(rng)];
      auto p = dyn::PulseSpec::custom(unit(rng) < 0.5 ? dyn::Molecule::control : dyn::Molecule::target, {lo, up},
                                      log_uniform(1e3, 1e6), log_uniform(1e-7, 1e-4), (unit(rng) - 0.5) * 1e5);
      p.phase = 2.0 * M_PI * unit(rng);
      segments.push_back({dyn::build_hamiltonian(scheme, inter, std::span(&p, 1)), p.duration});
    }
    const auto dim = static_cast<Eigen::Index>(scheme.size() * scheme.size());
    dyn::Vector psi = dyn::Vector::Random(dim);
    psi.normalize();
    double shortest = 1.0;
    for (const auto& s : segments) shortest = std::min(shortest, s.duration);
    dyn::propagate(segments, psi, shortest / 3.0,
                   [&](double, const dyn::Vector& v) { worst = std::max(worst, std::abs(v.norm() - 1.0)); });
  }
  c.at_most("worst |norm - 1| over 1000 sequences", worst, 1e-10);
  c.at_most("runtime [s]", seconds_since(t0), 30.0);
}

void intensity_chain(Criterion& c) {
  const Quantity mu_ind(2e-4, Unit::debye);
  const auto field = dg::field_from_rabi(mu_ind, Quantity(6e4, Unit::rad_per_s));
  c.relative("CO drive field [V/cm]", field.in(Unit::volt_per_cm), 100.0, 0.25);
  c.relative("CO drive intensity [W/cm^2]", dg::field_to_intensity(field).in(Unit::watt_per_cm2), 25.0, 0.25);
  const auto r = fz::feasibility_report("lics", fz::Scenario::inverted_lattice);
  c.order_of_magnitude("LiCs drive field [V/cm]", entry(r, "inverted-lattice.drive_field"), 0.15);
  c.order_of_magnitude("LiCs drive intensity [uW/cm^2]", entry(r, "inverted-lattice.drive_intensity"), 70.0);
}

struct Entry {
  int number;
  const char* title;
  std::function<void(Criterion&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  std::set<int> expect_fail;
  bool verbose = false;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--expect-fail" && i + 1 < argc) {
      expect_fail.insert(std::atoi(argv[++i]));
    } else if (a == "--verbose" || a == "-v") {
      verbose = true;
    } else {
      std::fprintf(stderr, "usage: %s [--expect-fail N]... [--verbose]\n", argv[0]);
      return 2;
    }
  }

  const std::vector<Entry> criteria = {
      {1, "CO blockade shift", co_blockade_shift},
      {2, "gate times", gate_times},
      {3, "error-budget formulas and Monte-Carlo agreement", error_budgets},
      {4, "lattice estimates", lattice_estimates},
      {5, "trap budget", trap_budget},
      {6, "gate truth tables", truth_tables},
      {7, "blockade scaling law", blockade_scaling},
      {8, "LiCs numbers", lics_numbers},
      {9, "BaI numbers and hyperfine structure", bai_numbers},
      {10, "operation counts", operation_counts},
      {11, "norm conservation", norm_conservation},
      {12, "intensity chain", intensity_chain},
  };

  int unexpected = 0;
  for (const auto& e : criteria) {
    Criterion c;
    try {
      e.run(c);
    } catch (const std::exception& ex) {
      c.expect(false, std::string("exception: ") + ex.what());
    }
    const bool expected_failure = expect_fail.count(e.number) > 0;
    const char* note = expected_failure ? (c.ok() ? " [unexpected pass]" : " [expected failure]") : "";
    if (c.ok() == expected_failure) ++unexpected;
    std::printf("%s %2d  %s%s\n", c.ok() ? "PASS" : "FAIL", e.number, e.title, note);
    for (const auto& line : verbose ? c.details() : c.failures()) std::printf("        %s\n", line.c_str());
  }
  std::fflush(stdout);
  return unexpected == 0 ? 0 : 1;
}
