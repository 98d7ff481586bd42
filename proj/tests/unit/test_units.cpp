#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dipolegate/errors.hpp"
#include "dipolegate/units.hpp"

namespace dg = dipolegate;
using dg::Dimension;
using dg::Quantity;
using dg::Unit;

namespace {

constexpr std::array kDimensions = {
    Dimension::dipole_moment, Dimension::electric_field, Dimension::intensity,
    Dimension::length,        Dimension::time,           Dimension::angular_frequency,
    Dimension::energy,        Dimension::magnetic_field, Dimension::wavenumber,
    Dimension::velocity,      Dimension::dimensionless};

}  // namespace

TEST(Units, RoundTripWithinEveryDimension) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> exponent(-20.0, 20.0);
  for (Dimension d : kDimensions) {
    for (Unit a : dg::units_of(d)) {
      for (Unit b : dg::units_of(d)) {
        for (int i = 0; i < 20; ++i) {
          const double v = std::pow(10.0, exponent(rng));
          const double back = dg::convert(dg::convert(Quantity(v, a), b), a).value();
          EXPECT_NEAR(back / v, 1.0, 1e-12) << dg::symbol(a) << " -> " << dg::symbol(b);
        }
      }
    }
  }
}

TEST(Units, SymbolsResolveToTheirUnit) {
  for (Dimension d : kDimensions) {
    for (Unit u : dg::units_of(d)) {
      const auto back = dg::unit_from_symbol(dg::symbol(u));
      ASSERT_TRUE(back.has_value()) << dg::symbol(u);
      EXPECT_EQ(*back, u);
      EXPECT_EQ(dg::dimension_of(u), d);
    }
  }
}

TEST(Units, KnownConversions) {
  EXPECT_DOUBLE_EQ(Quantity(1.0, Unit::debye).base(), 1e-18);
  EXPECT_NEAR(Quantity(299.792458, Unit::volt_per_cm).base(), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(Quantity(1.0, Unit::watt_per_cm2).base(), 1e7);
  EXPECT_DOUBLE_EQ(Quantity(100.0, Unit::nanometer).base(), 1e-5);
  EXPECT_NEAR(Quantity(1.0, Unit::megahertz).base(), 2e6 * M_PI, 1e-6);
  EXPECT_NEAR(Quantity(180.0, Unit::degree).base(), M_PI, 1e-15);
  EXPECT_DOUBLE_EQ(Quantity(1.0, Unit::tesla).in(Unit::gauss), 1e4);
}

TEST(Units, MismatchedDimensionsThrow) {
  EXPECT_THROW(Quantity(1.0, Unit::debye).in(Unit::nanometer), dg::DimensionMismatch);
  EXPECT_THROW(Quantity(1.0, Unit::second).require(Dimension::length, "r"), dg::DimensionMismatch);
  EXPECT_THROW(Quantity(std::nan(""), Unit::second), dg::InvalidArgument);
}

TEST(Units, WavenumberToAngularFrequency) {
  const auto w = dg::wavenumber_to_angular_frequency(Quantity(1.0, Unit::inverse_cm));
  EXPECT_NEAR(w.base(), 2.0 * M_PI * dg::constants::kSpeedOfLight, 1e-3);
}

TEST(Units, RabiAndFieldAreInverse) {
  const Quantity mu(2e-4, Unit::debye);
  const Quantity field = dg::field_from_rabi(mu, Quantity(6e4, Unit::rad_per_s));
  EXPECT_NEAR(dg::rabi_from_field(mu, field).base(), 6e4, 1e-6);
  // hbar * 6e4 / 2e-22 statvolt/cm, in V/cm.
  EXPECT_NEAR(field.in(Unit::volt_per_cm), 1.05457181765e-27 * 6e4 / 2e-22 * 299.792458, 1e-9);
  EXPECT_THROW(dg::rabi_from_field(Quantity(0.0, Unit::debye), field), dg::InvalidArgument);
}

TEST(Units, IntensityIsCESquaredOverFourPi) {
  const Quantity e(1.0, Unit::statvolt_per_cm);
  EXPECT_NEAR(dg::field_to_intensity(e).base(), dg::constants::kSpeedOfLight / (4.0 * M_PI), 1e-3);
  EXPECT_EQ(dg::field_to_intensity(e).unit(), Unit::watt_per_cm2);
}

TEST(Units, ParseQuantity) {
  EXPECT_EQ(dg::parse_quantity("100nm", Dimension::length), Quantity(100, Unit::nanometer));
  EXPECT_EQ(dg::parse_quantity("1.37 D", Dimension::dipole_moment), Quantity(1.37, Unit::debye));
  EXPECT_EQ(dg::parse_quantity("1e5", Dimension::angular_frequency), Quantity(1e5, Unit::rad_per_s));
  EXPECT_EQ(dg::parse_quantity("5 1/s", Dimension::angular_frequency), Quantity(5, Unit::rad_per_s));
  EXPECT_EQ(dg::parse_quantity("3deg", Dimension::dimensionless), Quantity(3, Unit::degree));
  EXPECT_THROW(dg::parse_quantity("100", Dimension::length), dg::InvalidArgument);
  EXPECT_THROW(dg::parse_quantity("100 furlong", Dimension::length), dg::InvalidArgument);
  EXPECT_THROW(dg::parse_quantity("100 us", Dimension::length), dg::DimensionMismatch);
  EXPECT_THROW(dg::parse_quantity("", Dimension::length), dg::InvalidArgument);
  EXPECT_THROW(dg::parse_quantity("inf", Dimension::angular_frequency), dg::InvalidArgument);
}
