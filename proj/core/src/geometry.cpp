#include "dipolegate/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>
#include <vector>

#include "dipolegate/errors.hpp"
#include "pairwise_sum.hpp"

namespace dipolegate::geometry {

namespace {

using constants::kHbar;
using constants::kPi;
using constants::kTwoPi;

constexpr std::uint64_t kBlockSize = 4096;

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite");
}

void require_non_negative(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) {
    throw InvalidArgument(std::string(what) + " must be finite and non-negative");
  }
}

std::mt19937_64 block_engine(std::uint64_t seed, std::uint64_t block, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                    stream};
  return std::mt19937_64(seq);
}

double relative_error(std::span<const double> phases, double reference) {
  std::vector<double> sq(phases.size());
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const double d = phases[i] - reference;
    sq[i] = d * d;
  }
  return std::sqrt(detail::pairwise_sum(sq) / static_cast<double>(phases.size())) /
         std::abs(reference);
}

double mean_of(std::span<const double> values) {
  return detail::pairwise_sum(values) / static_cast<double>(values.size());
}

}  // namespace

DipoleGeometry DipoleGeometry::equilibrium(const Quantity& mu1, const Quantity& mu2,
                                           const Quantity& r) {
  DipoleGeometry g;
  g.mu1 = mu1.require(Dimension::dipole_moment, "mu1").base();
  g.mu2 = mu2.require(Dimension::dipole_moment, "mu2").base();
  g.r = r.require(Dimension::length, "r").base();
  g.validate();
  return g;
}

void DipoleGeometry::validate() const {
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("separation r must be positive");
  require_finite(theta, "theta");
  require_finite(theta1, "theta1");
  require_finite(theta2, "theta2");
  require_finite(phi2, "phi2");
  require_finite(mu1, "mu1");
  require_finite(mu2, "mu2");
}

void GeometryDistribution::validate() const {
  mean.validate();
  require_non_negative(sigma_r, "sigma_r");
  require_non_negative(sigma_theta, "sigma_theta");
  require_non_negative(sigma_theta1, "sigma_theta1");
  require_non_negative(sigma_theta2, "sigma_theta2");
  require_non_negative(sigma_phi2, "sigma_phi2");
}

std::string_view name(Channel channel) {
  switch (channel) {
    case Channel::r: return "r";
    case Channel::theta: return "theta";
    case Channel::theta1: return "theta1";
    case Channel::theta2: return "theta2";
    case Channel::phi2: return "phi2";
  }
  return "unknown";
}

double dipole_phase(const DipoleGeometry& g, double duration) {
  g.validate();
  if (!(duration >= 0.0)) throw InvalidArgument("duration must be non-negative");
  const double angular =
      3.0 * std::sin(g.theta + g.theta1) *
          (std::cos(g.theta2) * std::sin(g.theta) +
           std::sin(g.theta2) * std::cos(g.theta) * std::sin(g.phi2)) -
      std::cos(g.theta1) * std::cos(g.theta2) -
      std::sin(g.theta1) * std::sin(g.theta2) * std::sin(g.phi2);
  return duration / kHbar * g.mu1 * g.mu2 / (g.r * g.r * g.r) * angular;
}

double sensitivity_analytic(Channel channel, const GeometryDistribution& dist) {
  dist.validate();
  // sqrt(<dx^4>) for a zero-mean Gaussian.
  const auto root_fourth = [](double sigma) { return std::sqrt(3.0) * sigma * sigma; };
  switch (channel) {
    case Channel::r: return 3.0 * dist.sigma_r / dist.mean.r;
    case Channel::theta: return 3.0 * root_fourth(dist.sigma_theta);
    case Channel::theta1: return root_fourth(dist.sigma_theta1) / 2.0;
    case Channel::theta2: return root_fourth(dist.sigma_theta2) / 2.0;
    case Channel::phi2: return 0.0;
  }
  return 0.0;
}

ToleratedSpread tolerated_spread(Channel channel, double target, double mean_r) {
  if (!(target > 0.0)) throw InvalidArgument("target error must be positive");
  ToleratedSpread out;
  const auto angular = [&out](double moment) {
    out.moment = moment;
    out.spread = std::sqrt(moment);
    out.gaussian_sigma = std::sqrt(moment / std::sqrt(3.0));
  };
  switch (channel) {
    case Channel::r:
      if (!(mean_r > 0.0)) throw InvalidArgument("mean separation must be positive");
      out.moment = out.spread = out.gaussian_sigma = target * mean_r / 3.0;
      break;
    case Channel::theta: angular(target / 3.0); break;
    case Channel::theta1:
    case Channel::theta2: angular(2.0 * target); break;
    case Channel::phi2: {
      const double inf = std::numeric_limits<double>::infinity();
      out.moment = out.spread = out.gaussian_sigma = inf;
      break;
    }
  }
  return out;
}

MonteCarloResult phase_error_monte_carlo(const GeometryDistribution& dist, double duration,
                                         const MonteCarloOptions& options) {
  dist.validate();
  if (options.n_samples < 1000) throw InvalidArgument("Monte-Carlo needs at least 1000 samples");
  if (!(duration > 0.0)) throw InvalidArgument("duration must be positive");

  const std::uint64_t n = options.n_samples;
  const std::uint64_t n_blocks = (n + kBlockSize - 1) / kBlockSize;
  std::vector<double> phases(n);

  const auto fill_block = [&](std::uint64_t block) {
    auto engine = block_engine(options.seed, block, 0);
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::uint64_t begin = block * kBlockSize;
    const std::uint64_t end = std::min(n, begin + kBlockSize);
    for (std::uint64_t i = begin; i < end; ++i) {
      DipoleGeometry g = dist.mean;
      // Fixed draw order keeps samples identical whichever sigmas are zero.
      g.r += dist.sigma_r * normal(engine);
      g.theta += dist.sigma_theta * normal(engine);
      g.theta1 += dist.sigma_theta1 * normal(engine);
      g.theta2 += dist.sigma_theta2 * normal(engine);
      g.phi2 += dist.sigma_phi2 * normal(engine);
      if (!(g.r > 0.0)) {
        throw NumericalError("sampled a non-positive separation; sigma_r too large");
      }
      phases[i] = dipole_phase(g, duration);
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(options.workers, static_cast<unsigned>(n_blocks)));
  if (workers == 1) {
    for (std::uint64_t b = 0; b < n_blocks; ++b) fill_block(b);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::uint64_t b = w; b < n_blocks; b += workers) fill_block(b);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  const double nominal = dipole_phase(dist.mean, duration);
  const auto statistic = [&](std::span<const double> sample) {
    const double ref =
        options.reference == PhaseReference::nominal ? nominal : mean_of(sample);
    return relative_error(sample, ref);
  };

  const double reference =
      options.reference == PhaseReference::nominal ? nominal : mean_of(phases);
  if (reference == 0.0) {
    throw NumericalError("reference phase is zero; relative error undefined");
  }

  MonteCarloResult result;
  result.n_samples = n;
  result.reference_phase = reference;
  result.rel_rms_error = statistic(phases);

  if (options.bootstrap_resamples >= 2) {
    auto engine = block_engine(options.seed, 0, 1);
    std::uniform_int_distribution<std::uint64_t> pick(0, n - 1);
    std::vector<double> resample(n);
    std::vector<double> stats(options.bootstrap_resamples);
    for (auto& s : stats) {
      for (auto& v : resample) v = phases[pick(engine)];
      s = statistic(resample);
    }
    const double m = mean_of(stats);
    std::vector<double> dev(stats.size());
    for (std::size_t i = 0; i < stats.size(); ++i) dev[i] = (stats[i] - m) * (stats[i] - m);
    result.std_error =
        std::sqrt(detail::pairwise_sum(dev) / static_cast<double>(stats.size() - 1));
  }
  return result;
}

void LatticeConfig::validate() const {
  if (!(wavelength > 0.0) || !std::isfinite(wavelength)) {
    throw InvalidArgument("lattice wavelength must be positive");
  }
  if (!(depth_recoils > 0.0)) throw InvalidArgument("lattice depth must be positive");
  if (separation_periods < 1) throw InvalidArgument("separation must be at least one period");
}

double lattice_ground_width(const LatticeConfig& cfg) {
  cfg.validate();
  if (std::isinf(cfg.depth_recoils)) return 0.0;
  return std::pow(cfg.depth_recoils, -0.25) * cfg.wavelength / kTwoPi;
}

double lattice_phase_error(const LatticeConfig& cfg, LatticeSpread spread) {
  const double a = lattice_ground_width(cfg);
  const double mean_r = cfg.separation_periods * cfg.wavelength / 2.0;
  const double width = spread == LatticeSpread::two_molecule ? std::sqrt(2.0) * a : a;
  return 3.0 * width / mean_r;
}

void TrapGeometry::validate() const {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidArgument("trap height h must be positive");
  if (!(r > 0.0) || !std::isfinite(r)) throw InvalidArgument("trap distance r must be positive");
  require_non_negative(sigma_h, "sigma_h");
  require_non_negative(sigma_r, "sigma_r");
}

TrapPhaseError trap_phase_error(const TrapGeometry& tg) {
  tg.validate();
  return {2.0 * tg.sigma_h / tg.h, tg.sigma_r / tg.r};
}

TrapPhaseError tolerated_trap_spread(double h, double r, double target) {
  TrapGeometry{h, r, 0.0, 0.0}.validate();
  if (!(target > 0.0)) throw InvalidArgument("target error must be positive");
  return {target * h / 2.0, target * r};
}

}  // namespace dipolegate::geometry

namespace dipolegate::geometry {

bool monte_carlo_agrees(double analytic, const MonteCarloResult& mc, double n_standard_errors) {
  return std::abs(mc.rel_rms_error - analytic) <= n_standard_errors * mc.std_error;
}

}  // namespace dipolegate::geometry
