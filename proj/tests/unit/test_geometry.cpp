#include <cmath>
#include <random>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "dipolegate/errors.hpp"
#include "dipolegate/geometry.hpp"

namespace dg = dipolegate;
namespace geo = dipolegate::geometry;
using dg::Quantity;
using dg::Unit;

namespace {

constexpr double kHbar = 1.05457181765e-27;

// Oracle: -(T/hbar) [d1.d2 - 3 (d1.n)(d2.n)] / r^3 from explicit vectors.
double vector_phase(const geo::DipoleGeometry& g, double t) {
  const Eigen::Vector3d d1 = g.mu1 * Eigen::Vector3d(0.0, std::sin(g.theta1), std::cos(g.theta1));
  const Eigen::Vector3d d2 =
      g.mu2 * Eigen::Vector3d(std::sin(g.theta2) * std::cos(g.phi2),
                              std::sin(g.theta2) * std::sin(g.phi2), std::cos(g.theta2));
  const Eigen::Vector3d n(0.0, std::cos(g.theta), std::sin(g.theta));
  const double u = (d1.dot(d2) - 3.0 * d1.dot(n) * d2.dot(n)) / std::pow(g.r, 3);
  return -t * u / kHbar;
}

geo::GeometryDistribution co_at(double r_nm) {
  geo::GeometryDistribution d;
  d.mean = geo::DipoleGeometry::equilibrium(Quantity(1.37, Unit::debye), Quantity(1.37, Unit::debye),
                                            Quantity(r_nm, Unit::nanometer));
  return d;
}

}  // namespace

TEST(Geometry, EquilibriumPhase) {
  const auto g = co_at(100).mean;
  const double expected = -1.37e-18 * 1.37e-18 / (kHbar * 1e-15);
  EXPECT_NEAR(geo::dipole_phase(g, 1.0) / expected, 1.0, 1e-12);
  EXPECT_NEAR(std::abs(geo::dipole_phase(g, 1.0)), 1.7798e6, 1e2);
}

TEST(Geometry, PhaseMatchesVectorOracle) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> length(1e-6, 1e-4);
  for (int i = 0; i < 2000; ++i) {
    geo::DipoleGeometry g;
    g.r = length(rng);
    g.theta = angle(rng);
    g.theta1 = angle(rng);
    g.theta2 = angle(rng);
    g.phi2 = angle(rng);
    g.mu1 = 1e-18 * (1.0 + i % 3);
    g.mu2 = 2e-18;
    const double ref = vector_phase(g, 2.5e-3);
    EXPECT_NEAR(geo::dipole_phase(g, 2.5e-3), ref, 1e-10 * (std::abs(ref) + 1.0));
  }
}

TEST(Geometry, ValidationRejectsBadInput) {
  auto d = co_at(100);
  d.mean.r = 0.0;
  EXPECT_THROW(d.validate(), dg::InvalidArgument);
  d = co_at(100);
  d.sigma_theta = -1.0;
  EXPECT_THROW(d.validate(), dg::InvalidArgument);
  EXPECT_THROW(geo::phase_error_monte_carlo(co_at(100), 1.0, {.n_samples = 10}), dg::InvalidArgument);
}

TEST(Geometry, AnalyticSensitivities) {
  auto d = co_at(500);
  d.sigma_r = 1.5e-7;
  d.sigma_theta = 0.05;
  d.sigma_theta1 = 0.1;
  d.sigma_theta2 = 0.2;
  d.sigma_phi2 = 0.3;
  EXPECT_NEAR(geo::sensitivity_analytic(geo::Channel::r, d), 0.009, 1e-15);
  EXPECT_NEAR(geo::sensitivity_analytic(geo::Channel::theta, d), 3.0 * std::sqrt(3.0) * 0.0025, 1e-15);
  EXPECT_NEAR(geo::sensitivity_analytic(geo::Channel::theta1, d), std::sqrt(3.0) * 0.01 / 2.0, 1e-15);
  EXPECT_NEAR(geo::sensitivity_analytic(geo::Channel::theta2, d), std::sqrt(3.0) * 0.04 / 2.0, 1e-15);
  EXPECT_EQ(geo::sensitivity_analytic(geo::Channel::phi2, d), 0.0);
}

TEST(Geometry, ToleratedSpreadInvertsTheBudget) {
  for (auto c : {geo::Channel::r, geo::Channel::theta, geo::Channel::theta1, geo::Channel::theta2}) {
    const auto t = geo::tolerated_spread(c, 0.01, 5e-5);
    auto d = co_at(500);
    if (c == geo::Channel::r) d.sigma_r = t.gaussian_sigma;
    if (c == geo::Channel::theta) d.sigma_theta = t.gaussian_sigma;
    if (c == geo::Channel::theta1) d.sigma_theta1 = t.gaussian_sigma;
    if (c == geo::Channel::theta2) d.sigma_theta2 = t.gaussian_sigma;
    EXPECT_NEAR(geo::sensitivity_analytic(c, d), 0.01, 1e-14) << geo::name(c);
  }
  EXPECT_NEAR(geo::tolerated_spread(geo::Channel::r, 0.01, 5e-5).spread, 5e-5 / 300.0, 1e-20);
  EXPECT_NEAR(geo::tolerated_spread(geo::Channel::theta, 0.01).spread, std::sqrt(0.01 / 3.0), 1e-15);
  EXPECT_NEAR(geo::tolerated_spread(geo::Channel::theta1, 0.01).spread, std::sqrt(0.02), 1e-15);
  EXPECT_TRUE(std::isinf(geo::tolerated_spread(geo::Channel::phi2, 0.01).spread));
  EXPECT_THROW(geo::tolerated_spread(geo::Channel::r, 0.01, 0.0), dg::InvalidArgument);
}

TEST(Geometry, MonteCarloAgreesWithAnalyticPerChannel) {
  struct Case {
    geo::Channel channel;
    double sigma;
  };
  for (const Case& c : {Case{geo::Channel::r, 1.5e-7}, Case{geo::Channel::theta, 0.05},
                        Case{geo::Channel::theta1, 0.1}, Case{geo::Channel::theta2, 0.1}}) {
    auto d = co_at(500);
    if (c.channel == geo::Channel::r) d.sigma_r = c.sigma;
    if (c.channel == geo::Channel::theta) d.sigma_theta = c.sigma;
    if (c.channel == geo::Channel::theta1) d.sigma_theta1 = c.sigma;
    if (c.channel == geo::Channel::theta2) d.sigma_theta2 = c.sigma;
    const auto mc = geo::phase_error_monte_carlo(d, 1.0, {.n_samples = 100000, .seed = 11, .workers = 4});
    const double analytic = geo::sensitivity_analytic(c.channel, d);
    EXPECT_TRUE(geo::monte_carlo_agrees(analytic, mc))
        << geo::name(c.channel) << ": " << mc.rel_rms_error << " +- " << mc.std_error << " vs " << analytic;
  }
}

TEST(Geometry, SampleMeanReferenceRemovesTheBias) {
  // For the quadratic channels the nominal reference keeps the mean shift:
  // rms(3 x^2) = 3 sqrt(3) s^2, the spread alone is 3 sqrt(2) s^2.
  auto d = co_at(500);
  d.sigma_theta = 0.02;
  const auto mc = geo::phase_error_monte_carlo(
      d, 1.0, {.n_samples = 200000, .seed = 5, .reference = geo::PhaseReference::sample_mean});
  EXPECT_NEAR(mc.rel_rms_error / (3.0 * std::sqrt(2.0) * 4e-4), 1.0, 0.02);
}

TEST(Geometry, MonteCarloIsDeterministicAcrossWorkers) {
  auto d = co_at(500);
  d.sigma_r = 2e-7;
  d.sigma_theta1 = 0.05;
  const auto a = geo::phase_error_monte_carlo(d, 1.0, {.n_samples = 50000, .seed = 9, .workers = 1});
  const auto b = geo::phase_error_monte_carlo(d, 1.0, {.n_samples = 50000, .seed = 9, .workers = 7});
  EXPECT_EQ(a.rel_rms_error, b.rel_rms_error);
  EXPECT_EQ(a.std_error, b.std_error);
  const auto c = geo::phase_error_monte_carlo(d, 1.0, {.n_samples = 50000, .seed = 10, .workers = 1});
  EXPECT_NE(a.rel_rms_error, c.rel_rms_error);
}

TEST(Geometry, ZeroSpreadGivesZeroError) {
  const auto mc = geo::phase_error_monte_carlo(co_at(500), 1.0, {.n_samples = 1000});
  EXPECT_EQ(mc.rel_rms_error, 0.0);
  EXPECT_EQ(mc.std_error, 0.0);
  for (auto c : {geo::Channel::r, geo::Channel::theta, geo::Channel::theta1, geo::Channel::theta2,
                 geo::Channel::phi2}) {
    EXPECT_EQ(geo::sensitivity_analytic(c, co_at(500)), 0.0);
  }
}

TEST(Geometry, LatticeClosedForm) {
  for (double depth : {10.0, 20.0, 40.0}) {
    const geo::LatticeConfig cfg{8e-5, depth, 1};
    EXPECT_NEAR(geo::lattice_phase_error(cfg), 6.0 * std::pow(depth, -0.25) / (2.0 * M_PI), 1e-15);
    EXPECT_NEAR(geo::lattice_phase_error(cfg, geo::LatticeSpread::two_molecule),
                std::sqrt(2.0) * geo::lattice_phase_error(cfg), 1e-15);
    const geo::LatticeConfig far{8e-5, depth, 5};
    EXPECT_NEAR(geo::lattice_phase_error(far), geo::lattice_phase_error(cfg) / 5.0, 1e-15);
    EXPECT_NEAR(geo::lattice_ground_width(cfg), std::pow(depth, -0.25) * 8e-5 / (2.0 * M_PI), 1e-20);
  }
  EXPECT_NEAR(geo::lattice_phase_error({8e-5, 10, 1}), 0.537, 5e-4);
  EXPECT_NEAR(geo::lattice_phase_error({8e-5, 40, 1}), 0.3797, 5e-5);
  EXPECT_THROW(geo::lattice_phase_error({8e-5, 0, 1}), dg::InvalidArgument);
  EXPECT_THROW(geo::lattice_phase_error({8e-5, 10, 0}), dg::InvalidArgument);
}

TEST(Geometry, TrapBudget) {
  const auto e = geo::trap_phase_error({1e-4, 1e-3, 5e-7, 1e-5});
  EXPECT_NEAR(e.from_h, 0.01, 1e-15);
  EXPECT_NEAR(e.from_r, 0.01, 1e-15);
  const auto t = geo::tolerated_trap_spread(1e-4, 1e-3, 0.01);
  EXPECT_NEAR(t.from_h, 5e-7, 1e-20);
  EXPECT_NEAR(t.from_r, 1e-5, 1e-20);
  EXPECT_THROW(geo::trap_phase_error({0.0, 1e-3, 0, 0}), dg::InvalidArgument);
}
