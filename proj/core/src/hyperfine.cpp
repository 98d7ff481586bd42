// 2Sigma+ rotational, spin-rotation and hyperfine Hamiltonian in the coupled
// basis |((N S) J I) F>, with S = 1/2. Matrix elements follow from spherical
// tensor algebra:
//   gamma N.S      diagonal, gamma/2 [J(J+1) - N(N+1) - S(S+1)]
//   b_F I.S        S acting on the second part of (N S)J
//   c I_z' S_z'    (c/3) I.S - (c sqrt(10)/3) [C2 x S]^1 . I
//   eQq term       eQq sqrt(6) / (4I(2I-1)) C2 . [I x I]^2
// where C2 is the rank-2 Racah tensor of the internuclear axis.

#include <algorithm>
#include <cmath>
#include <map>

#include "dipolegate/angular.hpp"
#include "dipolegate/errors.hpp"
#include "dipolegate/molecules.hpp"

namespace dipolegate::molecules {

namespace {

using angular::wigner_3j;
using angular::wigner_6j;
using angular::wigner_9j;

constexpr double kS = 0.5;

double parity(double x) {
  const long k = std::lround(x);
  return (k % 2 == 0) ? 1.0 : -1.0;
}

// <j||j||j>
double spin_reduced(double j) { return std::sqrt(j * (j + 1.0) * (2.0 * j + 1.0)); }

// <N||C2||N'>
double c2_reduced(int n, int np) {
  return parity(n) * std::sqrt((2.0 * n + 1.0) * (2.0 * np + 1.0)) * wigner_3j(n, 2, np, 0, 0, 0);
}

// <(N S) J || S || (N S) J'>
double s_in_j(int n, double j, double jp) {
  return parity(n + kS + j + 1.0) * std::sqrt((2.0 * j + 1.0) * (2.0 * jp + 1.0)) *
         wigner_6j(kS, j, n, jp, kS, 1) * spin_reduced(kS);
}

// <(N S) J || C2 || (N' S) J'>
double c2_in_j(int n, double j, int np, double jp) {
  return parity(n + kS + jp + 2.0) * std::sqrt((2.0 * j + 1.0) * (2.0 * jp + 1.0)) *
         wigner_6j(n, j, kS, jp, np, 2) * c2_reduced(n, np);
}

// <(N S) J || [C2 x S]^1 || (N' S) J'>
double c2s_in_j(int n, double j, int np, double jp) {
  return std::sqrt((2.0 * j + 1.0) * (2.0 * jp + 1.0) * 3.0) *
         wigner_9j(n, np, 2, kS, kS, 1, j, jp, 1) * c2_reduced(n, np) * spin_reduced(kS);
}

// <I || [I x I]^2 || I>
double ii2_reduced(double i) {
  return parity(2.0 + 2.0 * i) * std::sqrt(5.0) * wigner_6j(1, 1, 2, i, i, i) * i * (i + 1.0) *
         (2.0 * i + 1.0);
}

// <(J I) F | T^k . U^k | (J' I) F> given the two reduced elements.
double scalar_product(double j, double jp, double i, double f, int k, double t_red, double u_red) {
  return parity(jp + i + f) * wigner_6j(j, i, f, i, jp, k) * t_red * u_red;
}

}  // namespace

SigmaHamiltonian SigmaHamiltonian::from(const MoleculeParams& m) {
  if (m.electron_spin != kS) {
    throw InvalidArgument("molecule '" + m.name + "' is not a doublet (S = 1/2) state");
  }
  if (m.nuclear_spins.size() != 1) {
    throw InvalidArgument("molecule '" + m.name + "' needs exactly one nuclear spin");
  }
  const auto mhz = [&](const std::optional<Quantity>& q, const char* what) {
    return m.require(q, what).in(Unit::megahertz);
  };
  SigmaHamiltonian h;
  h.B = wavenumber_to_angular_frequency(m.require(m.rotational_constant, "rotational constant"))
            .in(Unit::megahertz);
  h.gamma_sr = mhz(m.hyperfine.gamma_sr, "spin-rotation constant gamma_sr");
  h.b_F = mhz(m.hyperfine.b_F, "Fermi contact constant b_F");
  h.c = mhz(m.hyperfine.c, "dipolar constant c");
  h.eQq = mhz(m.hyperfine.eQq, "quadrupole constant eQq");
  h.I = m.nuclear_spins.front();
  return h;
}

std::vector<CoupledState> coupled_basis(double I, int n_max) {
  angular::twice(I);
  if (n_max < 0) throw InvalidArgument("n_max must be non-negative");
  std::vector<CoupledState> basis;
  for (int n = 0; n <= n_max; ++n) {
    for (double j = std::abs(n - kS); j <= n + kS + 1e-9; j += 1.0) {
      for (double f = std::abs(j - I); f <= j + I + 1e-9; f += 1.0) basis.push_back({n, j, f});
    }
  }
  return basis;
}

Eigen::MatrixXd hyperfine_matrix(const SigmaHamiltonian& h, int n_max) {
  const auto basis = coupled_basis(h.I, n_max);
  const auto size = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(size, size);
  const double i = h.I;
  const double quad = i >= 1.0 ? h.eQq * std::sqrt(6.0) / (4.0 * i * (2.0 * i - 1.0)) : 0.0;
  const double i_red = spin_reduced(i);
  const double ii_red = i >= 1.0 ? ii2_reduced(i) : 0.0;

  for (Eigen::Index a = 0; a < size; ++a) {
    for (Eigen::Index b = 0; b < size; ++b) {
      const CoupledState& x = basis[a];
      const CoupledState& y = basis[b];
      if (x.F != y.F) continue;
      double v = 0.0;
      if (a == b) {
        v += h.B * x.N * (x.N + 1.0);
        v += 0.5 * h.gamma_sr * (x.J * (x.J + 1.0) - x.N * (x.N + 1.0) - kS * (kS + 1.0));
      }
      if (x.N == y.N) {
        const double is = scalar_product(x.J, y.J, i, x.F, 1, s_in_j(x.N, x.J, y.J), i_red);
        v += (h.b_F + h.c / 3.0) * is;
      }
      if (std::abs(x.N - y.N) <= 2) {
        const double c2s = scalar_product(x.J, y.J, i, x.F, 1, c2s_in_j(x.N, x.J, y.N, y.J), i_red);
        v += -h.c * std::sqrt(10.0) / 3.0 * c2s;
        if (quad != 0.0) {
          v += quad * scalar_product(x.J, y.J, i, x.F, 2, c2_in_j(x.N, x.J, y.N, y.J), ii_red);
        }
      }
      m(a, b) = v;
    }
  }
  return m;
}

std::vector<HyperfineLevel> hyperfine_levels(const SigmaHamiltonian& h, int n_max) {
  if (n_max < 0 || n_max > 4) throw InvalidArgument("n_max must lie in 0..4");
  const auto basis = coupled_basis(h.I, n_max);
  const Eigen::MatrixXd full = hyperfine_matrix(h, n_max);

  std::map<std::pair<long, int>, std::vector<Eigen::Index>> blocks;
  for (Eigen::Index k = 0; k < static_cast<Eigen::Index>(basis.size()); ++k) {
    blocks[{std::lround(2.0 * basis[k].F), basis[k].N % 2}].push_back(k);
  }

  std::vector<HyperfineLevel> levels;
  for (const auto& [key, idx] : blocks) {
    const auto n = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd block(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      for (Eigen::Index c = 0; c < n; ++c) block(r, c) = full(idx[r], idx[c]);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
    if (solver.info() != Eigen::Success) throw NumericalError("hyperfine diagonalization failed");
    for (Eigen::Index e = 0; e < n; ++e) {
      Eigen::Index dominant = 0;
      solver.eigenvectors().col(e).cwiseAbs().maxCoeff(&dominant);
      const CoupledState& s = basis[idx[dominant]];
      levels.push_back({s.N, s.J, s.F, solver.eigenvalues()(e),
                        static_cast<int>(std::lround(2.0 * s.F + 1.0))});
    }
  }

  double weight = 0.0, sum = 0.0;
  for (const auto& l : levels) {
    if (l.N == 0) {
      weight += l.degeneracy;
      sum += l.degeneracy * l.energy;
    }
  }
  const double centroid = weight > 0.0 ? sum / weight : 0.0;
  for (auto& l : levels) l.energy -= centroid;
  std::sort(levels.begin(), levels.end(), [](const HyperfineLevel& a, const HyperfineLevel& b) {
    return a.energy < b.energy;
  });
  return levels;
}

std::vector<HyperfineLevel> hyperfine_levels(const MoleculeParams& m, int n_max) {
  return hyperfine_levels(SigmaHamiltonian::from(m), n_max);
}

}  // namespace dipolegate::molecules
