#pragma once

// Physical constants and unit handling.
//
// Every formula in the library is evaluated in Gaussian-CGS: cm, s, erg,
// esu*cm (dipole moment), statvolt/cm (field), erg/(s*cm^2) (intensity) and
// rad/s for angular frequencies. Laboratory units appear only at the I/O
// boundary through `Quantity`.

#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace dipolegate {

namespace constants {

// CODATA 2018, 12 significant digits, CGS.
inline constexpr double kSpeedOfLight = 2.99792458000e10;   // cm/s (exact)
inline constexpr double kPlanck = 6.62607015000e-27;        // erg*s (exact)
inline constexpr double kHbar = 1.05457181765e-27;          // erg*s
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

inline constexpr double kDebye = 1.0e-18;                   // esu*cm
inline constexpr double kVoltPerCmPerStatvoltPerCm = 299.792458;
inline constexpr double kErgPerJoule = 1.0e7;
inline constexpr double kGaussPerTesla = 1.0e4;

}  // namespace constants

enum class Dimension {
  dipole_moment,
  electric_field,
  intensity,
  length,
  time,
  angular_frequency,
  energy,
  magnetic_field,
  wavenumber,
  velocity,
  dimensionless,
};

// Units accepted at the boundary. Cyclic-frequency units (Hz, kHz, MHz, GHz)
// belong to the angular-frequency dimension and convert with a factor 2*pi.
// Plain numbers, radians and degrees share the dimensionless dimension with
// the radian as base.
enum class Unit {
  esu_cm,
  debye,
  statvolt_per_cm,
  volt_per_cm,
  kilovolt_per_cm,
  microvolt_per_cm,
  erg_per_s_cm2,
  watt_per_cm2,
  milliwatt_per_cm2,
  microwatt_per_cm2,
  centimeter,
  meter,
  millimeter,
  micrometer,
  nanometer,
  second,
  millisecond,
  microsecond,
  nanosecond,
  rad_per_s,
  hertz,
  kilohertz,
  megahertz,
  gigahertz,
  erg,
  joule,
  gauss,
  tesla,
  inverse_cm,
  cm_per_s,
  m_per_s,
  one,
  radian,
  degree,
};

Dimension dimension_of(Unit unit);
std::string_view symbol(Unit unit);
std::string_view name(Dimension dimension);

// Factor that takes a value in `unit` to the Gaussian-CGS base unit of its
// dimension.
double to_base_factor(Unit unit);

// Looks up a unit by its symbol ("nm", "D", "V/cm", "us", ...).
std::optional<Unit> unit_from_symbol(std::string_view symbol);

// All units of one dimension, in declaration order.
std::span<const Unit> units_of(Dimension dimension);

class Quantity {
 public:
  // Throws InvalidArgument for non-finite values.
  Quantity(double value, Unit unit);

  double value() const { return value_; }
  Unit unit() const { return unit_; }
  Dimension dimension() const { return dimension_of(unit_); }

  // Value expressed in the Gaussian-CGS base unit of this dimension.
  double base() const { return value_ * to_base_factor(unit_); }

  // Value expressed in `target`. Throws DimensionMismatch.
  double in(Unit target) const;

  // Throws DimensionMismatch unless this quantity has dimension `expected`.
  const Quantity& require(Dimension expected, std::string_view what) const;

  // Same value in the same unit; 1 D and 1e-18 esu*cm compare unequal.
  friend bool operator==(const Quantity&, const Quantity&) = default;

 private:
  double value_;
  Unit unit_;
};

// Builds a quantity from a CGS base value and re-expresses it in `unit`.
Quantity from_base(double base_value, Unit unit);

// Exact conversion within one dimension. Throws DimensionMismatch.
Quantity convert(const Quantity& q, Unit target);

// Spectroscopic wavenumber to angular frequency: omega = 2*pi*c*k.
Quantity wavenumber_to_angular_frequency(const Quantity& wavenumber);

// Rabi frequency mu*E/hbar of a dipole in a field. Throws InvalidArgument for
// a non-positive dipole moment or negative field.
Quantity rabi_from_field(const Quantity& mu, const Quantity& field);

// Field amplitude hbar*Omega/mu that produces Rabi frequency Omega.
Quantity field_from_rabi(const Quantity& mu, const Quantity& rabi);

// Intensity c*E^2/(4*pi) of a field amplitude, reported in W/cm^2.
Quantity field_to_intensity(const Quantity& field);

// Parses "<number><unit>" or "<number> <unit>" ("100nm", "1.37 D", "5e5 Hz").
// A bare number is accepted only for angular frequencies (rad/s) and
// dimensionless values; other dimensions need an explicit unit. Throws
// InvalidArgument for malformed text and DimensionMismatch for a unit of
// another dimension.
Quantity parse_quantity(std::string_view text, Dimension expected);

namespace literals {

Quantity operator""_D(long double v);
Quantity operator""_nm(long double v);
Quantity operator""_um(long double v);
Quantity operator""_cm(long double v);
Quantity operator""_s(long double v);
Quantity operator""_ms(long double v);
Quantity operator""_us(long double v);
Quantity operator""_V_per_cm(long double v);
Quantity operator""_per_s(long double v);
Quantity operator""_MHz(long double v);
Quantity operator""_G(long double v);
Quantity operator""_inv_cm(long double v);

}  // namespace literals

}  // namespace dipolegate
