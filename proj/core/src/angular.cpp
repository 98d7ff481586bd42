#include "dipolegate/angular.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>

#include "dipolegate/errors.hpp"

namespace dipolegate::angular {

namespace {

// log(n!) through lgamma keeps large arguments finite.
long double log_factorial(int n) { return std::lgamma(static_cast<long double>(n) + 1.0L); }

bool triangle2(int a, int b, int c) {
  return (a + b + c) % 2 == 0 && c >= std::abs(a - b) && c <= a + b;
}

// log of the triangle coefficient Delta(abc) for doubled arguments.
long double log_delta(int a, int b, int c) {
  return 0.5L * (log_factorial((a + b - c) / 2) + log_factorial((a - b + c) / 2) +
                 log_factorial((-a + b + c) / 2) - log_factorial((a + b + c) / 2 + 1));
}

int sign(int k) { return (k % 2 == 0) ? 1 : -1; }

double sixj2(int j1, int j2, int j3, int j4, int j5, int j6) {
  if (!triangle2(j1, j2, j3) || !triangle2(j1, j5, j6) || !triangle2(j4, j2, j6) ||
      !triangle2(j4, j5, j3)) {
    return 0.0;
  }
  const long double pref =
      log_delta(j1, j2, j3) + log_delta(j1, j5, j6) + log_delta(j4, j2, j6) + log_delta(j4, j5, j3);
  const std::array<int, 4> a{(j1 + j2 + j3) / 2, (j1 + j5 + j6) / 2, (j4 + j2 + j6) / 2,
                             (j4 + j5 + j3) / 2};
  const std::array<int, 3> b{(j1 + j2 + j4 + j5) / 2, (j2 + j3 + j5 + j6) / 2,
                             (j3 + j1 + j6 + j4) / 2};
  const int tmin = *std::max_element(a.begin(), a.end());
  const int tmax = *std::min_element(b.begin(), b.end());
  long double sum = 0.0L;
  for (int t = tmin; t <= tmax; ++t) {
    long double lg = log_factorial(t + 1);
    for (int x : a) lg -= log_factorial(t - x);
    for (int y : b) lg -= log_factorial(y - t);
    sum += sign(t) * std::exp(lg + pref);
  }
  return static_cast<double>(sum);
}

}  // namespace

bool is_half_integer(double j) {
  const double t = 2.0 * j;
  return std::isfinite(t) && std::abs(t - std::round(t)) < 1e-9;
}

int twice(double j) {
  if (!is_half_integer(j)) throw InvalidArgument("angular momentum must be a multiple of 1/2");
  return static_cast<int>(std::lround(2.0 * j));
}

bool triangle(double a, double b, double c) {
  const int ta = twice(a), tb = twice(b), tc = twice(c);
  return ta >= 0 && tb >= 0 && tc >= 0 && triangle2(ta, tb, tc);
}

double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3) {
  const int a = twice(j1), b = twice(j2), c = twice(j3);
  const int ma = twice(m1), mb = twice(m2), mc = twice(m3);
  if (a < 0 || b < 0 || c < 0) throw InvalidArgument("negative angular momentum");
  if (ma + mb + mc != 0 || !triangle2(a, b, c)) return 0.0;
  if (std::abs(ma) > a || std::abs(mb) > b || std::abs(mc) > c) return 0.0;
  if ((a + ma) % 2 != 0 || (b + mb) % 2 != 0 || (c + mc) % 2 != 0) return 0.0;

  const long double pref =
      log_delta(a, b, c) +
      0.5L * (log_factorial((a + ma) / 2) + log_factorial((a - ma) / 2) +
              log_factorial((b + mb) / 2) + log_factorial((b - mb) / 2) +
              log_factorial((c + mc) / 2) + log_factorial((c - mc) / 2));
  // Racah sum over k with all factorial arguments non-negative.
  const int k1 = (c - b + ma) / 2;  // j3 - j2 + m1
  const int k2 = (c - a - mb) / 2;  // j3 - j1 - m2
  const int k3 = (a + b - c) / 2;   // j1 + j2 - j3
  const int k4 = (a - ma) / 2;      // j1 - m1
  const int k5 = (b + mb) / 2;      // j2 + m2
  const int kmin = std::max({0, -k1, -k2});
  const int kmax = std::min({k3, k4, k5});
  long double sum = 0.0L;
  for (int k = kmin; k <= kmax; ++k) {
    const long double lg = log_factorial(k) + log_factorial(k1 + k) + log_factorial(k2 + k) +
                           log_factorial(k3 - k) + log_factorial(k4 - k) + log_factorial(k5 - k);
    sum += sign(k) * std::exp(pref - lg);
  }
  return static_cast<double>(sign((a - b - mc) / 2) * sum);
}

double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6) {
  const std::array<int, 6> t{twice(j1), twice(j2), twice(j3), twice(j4), twice(j5), twice(j6)};
  for (int v : t) {
    if (v < 0) throw InvalidArgument("negative angular momentum");
  }
  return sixj2(t[0], t[1], t[2], t[3], t[4], t[5]);
}

double wigner_9j(double j11, double j12, double j13, double j21, double j22, double j23,
                 double j31, double j32, double j33) {
  const int a = twice(j11), b = twice(j12), c = twice(j13);
  const int d = twice(j21), e = twice(j22), f = twice(j23);
  const int g = twice(j31), h = twice(j32), i = twice(j33);
  for (int v : {a, b, c, d, e, f, g, h, i}) {
    if (v < 0) throw InvalidArgument("negative angular momentum");
  }
  // Sum over x of (-1)^{2x} (2x+1) {a b c; f i x}{d e f; b x h}{g h i; x a d}.
  const int xmin = std::max({std::abs(a - i), std::abs(d - h), std::abs(b - f)});
  const int xmax = std::min({a + i, d + h, b + f});
  double sum = 0.0;
  for (int x = xmin; x <= xmax; x += 2) {
    sum += sign(x) * (x + 1) * sixj2(a, b, c, f, i, x) * sixj2(d, e, f, b, x, h) *
           sixj2(g, h, i, x, a, d);
  }
  return sum;
}

double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M) {
  const int phase = twice(j1) - twice(j2) + twice(M);
  return sign(phase / 2) * std::sqrt(2.0 * J + 1.0) * wigner_3j(j1, j2, J, m1, m2, -M);
}

}  // namespace dipolegate::angular
