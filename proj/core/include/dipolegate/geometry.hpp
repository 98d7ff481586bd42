#pragma once

// Dipole-dipole interaction phase versus relative position and orientation,
// its error budget, and a Monte-Carlo check of the analytic budget.
//
// All inputs are Gaussian-CGS: lengths in cm, dipoles in esu*cm, times in s.

#include <cstdint>
#include <string_view>

#include "dipolegate/units.hpp"

namespace dipolegate::geometry {

// Relative placement of two dipoles. `theta` is the vertical offset angle of
// dipole 2 seen from dipole 1, `theta1`/`theta2` are the polar angles of the
// dipoles and `phi2` the azimuth of dipole 2. Dipole 1 and the separation
// vector lie in the y-z plane.
struct DipoleGeometry {
  double r = 0.0;
  double theta = 0.0;
  double theta1 = 0.0;
  double theta2 = 0.0;
  double phi2 = constants::kPi / 2.0;
  double mu1 = 0.0;
  double mu2 = 0.0;

  // theta = theta1 = theta2 = 0, phi2 = pi/2.
  static DipoleGeometry equilibrium(const Quantity& mu1, const Quantity& mu2, const Quantity& r);

  // Throws InvalidArgument unless r > 0 and every angle is finite.
  void validate() const;
};

// Independent zero-mean Gaussian deviations about `mean`.
struct GeometryDistribution {
  DipoleGeometry mean;
  double sigma_r = 0.0;
  double sigma_theta = 0.0;
  double sigma_theta1 = 0.0;
  double sigma_theta2 = 0.0;
  double sigma_phi2 = 0.0;

  void validate() const;
};

enum class Channel { r, theta, theta1, theta2, phi2 };

std::string_view name(Channel channel);

// Accumulated interaction phase
//   (T/hbar) (mu1 mu2 / r^3) [3 sin(theta+theta1)(cos theta2 sin theta
//     + sin theta2 cos theta sin phi2) - cos theta1 cos theta2
//     - sin theta1 sin theta2 sin phi2].
// At equilibrium this is -T mu1 mu2 / (hbar r^3).
double dipole_phase(const DipoleGeometry& g, double duration);

// Small-deviation relative RMS phase error of one channel, using the
// Gaussian closure <dx^4> = 3 sigma^4 for the angular channels.
double sensitivity_analytic(Channel channel, const GeometryDistribution& dist);

// Inverse of the analytic budget: the largest spread of one channel that
// keeps the relative phase error at `target`.
struct ToleratedSpread {
  // r channel: tolerated RMS distance in cm. Angular channels: tolerated
  // sqrt(<dx^4>) in rad^2.
  double moment = 0.0;
  // r channel: same as `moment`. Angular channels: the characteristic angle
  // <dx^4>^(1/4) in radians.
  double spread = 0.0;
  // Gaussian standard deviation reaching the same budget (cm or rad).
  double gaussian_sigma = 0.0;
};

// `mean_r` (cm) is needed only for the r channel. phi2 tolerates any spread
// in this approximation and reports +infinity.
ToleratedSpread tolerated_spread(Channel channel, double target, double mean_r = 0.0);

// Reference phase used by the Monte-Carlo relative error.
enum class PhaseReference {
  // Phase at the mean geometry (the small-deviation expansion point).
  nominal,
  // Sample mean of the phase.
  sample_mean,
};

struct MonteCarloOptions {
  std::uint64_t n_samples = 100000;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  unsigned bootstrap_resamples = 200;
  PhaseReference reference = PhaseReference::nominal;
};

struct MonteCarloResult {
  double rel_rms_error = 0.0;
  double std_error = 0.0;
  double reference_phase = 0.0;
  std::uint64_t n_samples = 0;
};

// Samples geometries, evaluates dipole_phase and returns
// sqrt(<(phi - phi_ref)^2>) / |phi_ref| with a bootstrap standard error.
// Samples are drawn in fixed-size blocks, each from its own generator seeded
// by (seed, block index), so the result does not depend on `workers`.
// Throws InvalidArgument for n_samples < 1000 and NumericalError when the
// reference phase is zero.
MonteCarloResult phase_error_monte_carlo(const GeometryDistribution& dist, double duration,
                                         const MonteCarloOptions& options = {});

// True when |mc - analytic| <= n_standard_errors * mc.std_error.
bool monte_carlo_agrees(double analytic, const MonteCarloResult& mc,
                        double n_standard_errors = 3.0);

struct LatticeConfig {
  double wavelength = 0.0;      // cm
  double depth_recoils = 0.0;   // V0 / E_R
  int separation_periods = 1;   // mean separation in units of lambda/2

  void validate() const;
};

// Spread model for the lattice positional error.
enum class LatticeSpread {
  // One ground-state width a against <r>.
  single_molecule,
  // Both molecules spread independently: sqrt(2) * a.
  two_molecule,
};

// Harmonic ground-state width a = (V0/E_R)^(-1/4) * lambda / (2 pi), in cm.
double lattice_ground_width(const LatticeConfig& cfg);

// 3 * spread / <r> with <r> = separation_periods * lambda / 2. For
// neighbours and the single-molecule spread: 6 (V0/E_R)^(-1/4) / (2 pi).
double lattice_phase_error(const LatticeConfig& cfg,
                           LatticeSpread spread = LatticeSpread::single_molecule);

// Molecules above surface traps coupled by a wire, interaction ~ mu^2/(h^2 r).
struct TrapGeometry {
  double h = 0.0;        // molecule-to-surface distance, cm
  double r = 0.0;        // trap-to-trap distance, cm
  double sigma_h = 0.0;  // cm
  double sigma_r = 0.0;  // cm

  void validate() const;
};

struct TrapPhaseError {
  double from_h = 0.0;  // 2 sigma_h / h
  double from_r = 0.0;  // sigma_r / r
};

TrapPhaseError trap_phase_error(const TrapGeometry& tg);

// Largest sigma_h and sigma_r (cm) keeping each trap channel at `target`.
TrapPhaseError tolerated_trap_spread(double h, double r, double target);

}  // namespace dipolegate::geometry
