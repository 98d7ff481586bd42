#pragma once

// Wigner 3j, 6j and 9j symbols and Clebsch-Gordan coefficients from the Racah
// closed forms. Arguments are (half-)integers passed as doubles; a value that
// is not a multiple of 1/2 throws InvalidArgument. Symbols violating the
// triangle or projection rules are zero.

namespace dipolegate::angular {

// Twice a half-integer as an exact integer; throws InvalidArgument otherwise.
int twice(double j);

bool is_half_integer(double j);

// Non-zero only when a, b, c satisfy the triangle rule with integer sum.
bool triangle(double a, double b, double c);

double wigner_3j(double j1, double j2, double j3, double m1, double m2, double m3);
double wigner_6j(double j1, double j2, double j3, double j4, double j5, double j6);
double wigner_9j(double j11, double j12, double j13, double j21, double j22, double j23,
                 double j31, double j32, double j33);

// <j1 m1 j2 m2 | J M>.
double clebsch_gordan(double j1, double m1, double j2, double m2, double J, double M);

}  // namespace dipolegate::angular
