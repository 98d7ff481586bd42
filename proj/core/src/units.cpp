#include "dipolegate/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <system_error>

#include "dipolegate/errors.hpp"

namespace dipolegate {

namespace {

using namespace constants;

struct UnitInfo {
  Unit unit;
  Dimension dimension;
  std::string_view symbol;
  double to_base;
};

constexpr double kStatvoltPerCmPerVoltPerCm = 1.0 / kVoltPerCmPerStatvoltPerCm;

constexpr std::array<UnitInfo, 34> kUnits{{
    {Unit::esu_cm, Dimension::dipole_moment, "esu*cm", 1.0},
    {Unit::debye, Dimension::dipole_moment, "D", kDebye},
    {Unit::statvolt_per_cm, Dimension::electric_field, "statV/cm", 1.0},
    {Unit::volt_per_cm, Dimension::electric_field, "V/cm", kStatvoltPerCmPerVoltPerCm},
    {Unit::kilovolt_per_cm, Dimension::electric_field, "kV/cm", 1e3 * kStatvoltPerCmPerVoltPerCm},
    {Unit::microvolt_per_cm, Dimension::electric_field, "uV/cm", 1e-6 * kStatvoltPerCmPerVoltPerCm},
    {Unit::erg_per_s_cm2, Dimension::intensity, "erg/(s*cm^2)", 1.0},
    {Unit::watt_per_cm2, Dimension::intensity, "W/cm^2", kErgPerJoule},
    {Unit::milliwatt_per_cm2, Dimension::intensity, "mW/cm^2", 1e-3 * kErgPerJoule},
    {Unit::microwatt_per_cm2, Dimension::intensity, "uW/cm^2", 1e-6 * kErgPerJoule},
    {Unit::centimeter, Dimension::length, "cm", 1.0},
    {Unit::meter, Dimension::length, "m", 1e2},
    {Unit::millimeter, Dimension::length, "mm", 1e-1},
    {Unit::micrometer, Dimension::length, "um", 1e-4},
    {Unit::nanometer, Dimension::length, "nm", 1e-7},
    {Unit::second, Dimension::time, "s", 1.0},
    {Unit::millisecond, Dimension::time, "ms", 1e-3},
    {Unit::microsecond, Dimension::time, "us", 1e-6},
    {Unit::nanosecond, Dimension::time, "ns", 1e-9},
    {Unit::rad_per_s, Dimension::angular_frequency, "rad/s", 1.0},
    {Unit::hertz, Dimension::angular_frequency, "Hz", kTwoPi},
    {Unit::kilohertz, Dimension::angular_frequency, "kHz", kTwoPi * 1e3},
    {Unit::megahertz, Dimension::angular_frequency, "MHz", kTwoPi * 1e6},
    {Unit::gigahertz, Dimension::angular_frequency, "GHz", kTwoPi * 1e9},
    {Unit::erg, Dimension::energy, "erg", 1.0},
    {Unit::joule, Dimension::energy, "J", kErgPerJoule},
    {Unit::gauss, Dimension::magnetic_field, "G", 1.0},
    {Unit::tesla, Dimension::magnetic_field, "T", kGaussPerTesla},
    {Unit::inverse_cm, Dimension::wavenumber, "cm^-1", 1.0},
    {Unit::cm_per_s, Dimension::velocity, "cm/s", 1.0},
    {Unit::m_per_s, Dimension::velocity, "m/s", 1e2},
    {Unit::one, Dimension::dimensionless, "1", 1.0},
    {Unit::radian, Dimension::dimensionless, "rad", 1.0},
    {Unit::degree, Dimension::dimensionless, "deg", kPi / 180.0},
}};

const UnitInfo& info(Unit unit) {
  for (const auto& u : kUnits) {
    if (u.unit == unit) return u;
  }
  throw InvalidArgument("unknown unit tag");
}

// Grouped per dimension for units_of(); kept in sync with kUnits.
constexpr std::array<Unit, 2> kDipoleUnits{Unit::esu_cm, Unit::debye};
constexpr std::array<Unit, 4> kFieldUnits{Unit::statvolt_per_cm, Unit::volt_per_cm,
                                          Unit::kilovolt_per_cm, Unit::microvolt_per_cm};
constexpr std::array<Unit, 4> kIntensityUnits{Unit::erg_per_s_cm2, Unit::watt_per_cm2,
                                              Unit::milliwatt_per_cm2, Unit::microwatt_per_cm2};
constexpr std::array<Unit, 5> kLengthUnits{Unit::centimeter, Unit::meter, Unit::millimeter,
                                           Unit::micrometer, Unit::nanometer};
constexpr std::array<Unit, 4> kTimeUnits{Unit::second, Unit::millisecond, Unit::microsecond,
                                         Unit::nanosecond};
constexpr std::array<Unit, 5> kAngularUnits{Unit::rad_per_s, Unit::hertz, Unit::kilohertz,
                                            Unit::megahertz, Unit::gigahertz};
constexpr std::array<Unit, 2> kEnergyUnits{Unit::erg, Unit::joule};
constexpr std::array<Unit, 2> kMagneticUnits{Unit::gauss, Unit::tesla};
constexpr std::array<Unit, 1> kWavenumberUnits{Unit::inverse_cm};
constexpr std::array<Unit, 2> kVelocityUnits{Unit::cm_per_s, Unit::m_per_s};
constexpr std::array<Unit, 3> kDimensionlessUnits{Unit::one, Unit::radian, Unit::degree};

}  // namespace

Dimension dimension_of(Unit unit) { return info(unit).dimension; }

std::string_view symbol(Unit unit) { return info(unit).symbol; }

std::string_view name(Dimension dimension) {
  switch (dimension) {
    case Dimension::dipole_moment: return "dipole-moment";
    case Dimension::electric_field: return "electric-field";
    case Dimension::intensity: return "intensity";
    case Dimension::length: return "length";
    case Dimension::time: return "time";
    case Dimension::angular_frequency: return "angular-frequency";
    case Dimension::energy: return "energy";
    case Dimension::magnetic_field: return "magnetic-field";
    case Dimension::wavenumber: return "wavenumber";
    case Dimension::velocity: return "velocity";
    case Dimension::dimensionless: return "dimensionless";
  }
  return "unknown";
}

double to_base_factor(Unit unit) { return info(unit).to_base; }

std::optional<Unit> unit_from_symbol(std::string_view sym) {
  for (const auto& u : kUnits) {
    if (u.symbol == sym) return u.unit;
  }
  // A few spelling aliases.
  if (sym == "\xC2\xB5m" || sym == "micron") return Unit::micrometer;
  if (sym == "\xC2\xB5s") return Unit::microsecond;
  if (sym == "Debye" || sym == "debye") return Unit::debye;
  if (sym == "1/s" || sym == "s^-1") return Unit::rad_per_s;
  if (sym == "1/cm" || sym == "cm-1") return Unit::inverse_cm;
  if (sym == "W/cm2") return Unit::watt_per_cm2;
  return std::nullopt;
}

std::span<const Unit> units_of(Dimension dimension) {
  switch (dimension) {
    case Dimension::dipole_moment: return kDipoleUnits;
    case Dimension::electric_field: return kFieldUnits;
    case Dimension::intensity: return kIntensityUnits;
    case Dimension::length: return kLengthUnits;
    case Dimension::time: return kTimeUnits;
    case Dimension::angular_frequency: return kAngularUnits;
    case Dimension::energy: return kEnergyUnits;
    case Dimension::magnetic_field: return kMagneticUnits;
    case Dimension::wavenumber: return kWavenumberUnits;
    case Dimension::velocity: return kVelocityUnits;
    case Dimension::dimensionless: return kDimensionlessUnits;
  }
  return {};
}

Quantity::Quantity(double value, Unit unit) : value_(value), unit_(unit) {
  if (!std::isfinite(value)) {
    throw InvalidArgument("quantity value must be finite");
  }
}

double Quantity::in(Unit target) const {
  if (dimension_of(target) != dimension()) {
    throw DimensionMismatch("cannot express " + std::string(name(dimension())) + " in " +
                            std::string(symbol(target)));
  }
  if (target == unit_) return value_;
  return base() / to_base_factor(target);
}

const Quantity& Quantity::require(Dimension expected, std::string_view what) const {
  if (dimension() != expected) {
    throw DimensionMismatch(std::string(what) + ": expected " + std::string(name(expected)) +
                            ", got " + std::string(name(dimension())));
  }
  return *this;
}

Quantity from_base(double base_value, Unit unit) {
  return Quantity(base_value / to_base_factor(unit), unit);
}

Quantity convert(const Quantity& q, Unit target) { return Quantity(q.in(target), target); }

Quantity wavenumber_to_angular_frequency(const Quantity& wavenumber) {
  wavenumber.require(Dimension::wavenumber, "wavenumber");
  return Quantity(kTwoPi * kSpeedOfLight * wavenumber.base(), Unit::rad_per_s);
}

Quantity rabi_from_field(const Quantity& mu, const Quantity& field) {
  mu.require(Dimension::dipole_moment, "dipole moment");
  field.require(Dimension::electric_field, "field");
  if (!(mu.base() > 0.0)) throw InvalidArgument("dipole moment must be positive");
  if (field.base() < 0.0) throw InvalidArgument("field amplitude must be non-negative");
  return Quantity(mu.base() * field.base() / kHbar, Unit::rad_per_s);
}

Quantity field_from_rabi(const Quantity& mu, const Quantity& rabi) {
  mu.require(Dimension::dipole_moment, "dipole moment");
  rabi.require(Dimension::angular_frequency, "Rabi frequency");
  if (!(mu.base() > 0.0)) throw InvalidArgument("dipole moment must be positive");
  if (rabi.base() < 0.0) throw InvalidArgument("Rabi frequency must be non-negative");
  return from_base(kHbar * rabi.base() / mu.base(), Unit::volt_per_cm);
}

Quantity field_to_intensity(const Quantity& field) {
  field.require(Dimension::electric_field, "field");
  if (field.base() < 0.0) throw InvalidArgument("field amplitude must be non-negative");
  const double e = field.base();
  return from_base(kSpeedOfLight * e * e / (4.0 * kPi), Unit::watt_per_cm2);
}

Quantity parse_quantity(std::string_view text, Dimension expected) {
  const auto fail = [&](const std::string& why) {
    return InvalidArgument("cannot read '" + std::string(text) + "' as " +
                           std::string(name(expected)) + ": " + why);
  };
  const auto first = text.find_first_not_of(' ');
  if (first == std::string_view::npos) throw fail("empty value");
  text.remove_prefix(first);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || !std::isfinite(value)) throw fail("no finite number");
  std::string_view suffix(end, static_cast<std::size_t>(text.data() + text.size() - end));
  while (!suffix.empty() && suffix.front() == ' ') suffix.remove_prefix(1);
  while (!suffix.empty() && suffix.back() == ' ') suffix.remove_suffix(1);
  if (suffix.empty()) {
    if (expected == Dimension::angular_frequency) return Quantity(value, Unit::rad_per_s);
    if (expected == Dimension::dimensionless) return Quantity(value, Unit::one);
    throw fail("a unit suffix is required");
  }
  std::optional<Unit> unit = unit_from_symbol(suffix);
  if (!unit && (suffix == "1/s" || suffix == "/s" || suffix == "s^-1")) unit = Unit::rad_per_s;
  if (!unit) throw fail("unknown unit '" + std::string(suffix) + "'");
  Quantity q(value, *unit);
  q.require(expected, "value");
  return q;
}

namespace literals {

Quantity operator""_D(long double v) { return {static_cast<double>(v), Unit::debye}; }
Quantity operator""_nm(long double v) { return {static_cast<double>(v), Unit::nanometer}; }
Quantity operator""_um(long double v) { return {static_cast<double>(v), Unit::micrometer}; }
Quantity operator""_cm(long double v) { return {static_cast<double>(v), Unit::centimeter}; }
Quantity operator""_s(long double v) { return {static_cast<double>(v), Unit::second}; }
Quantity operator""_ms(long double v) { return {static_cast<double>(v), Unit::millisecond}; }
Quantity operator""_us(long double v) { return {static_cast<double>(v), Unit::microsecond}; }
Quantity operator""_V_per_cm(long double v) { return {static_cast<double>(v), Unit::volt_per_cm}; }
Quantity operator""_per_s(long double v) { return {static_cast<double>(v), Unit::rad_per_s}; }
Quantity operator""_MHz(long double v) { return {static_cast<double>(v), Unit::megahertz}; }
Quantity operator""_G(long double v) { return {static_cast<double>(v), Unit::gauss}; }
Quantity operator""_inv_cm(long double v) { return {static_cast<double>(v), Unit::inverse_cm}; }

}  // namespace literals

}  // namespace dipolegate
