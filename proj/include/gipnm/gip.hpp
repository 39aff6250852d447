#pragma once

#include "gipnm/gaussian.hpp"

// Gaussian interferometric power of a two-mode Gaussian state, computed
// from the symplectic invariants of its covariance matrix.

namespace gipnm {

struct GipValue {
  double value = 0.0;  // Q_B^G, nonnegative; zero iff product state
};

// Closed-form GIP,
//   Q = (C_x + sqrt(C_x^2 + C_y C_z)) / (2 C_y),
// with C_x, C_y, C_z polynomial in the invariants I1..I4. Pure states make
// the formula 0/0; those are handled by a controlled mixing limit (see
// gip_pure_limit_delta below).
GipValue gip_general(const TwoModeCovariance& sigma);

// Simplified form valid for standard-form states with d = -+ c:
//   Q = c^2 / (2 (a b - c^2 + sign)),
// sign = +1 for d = -c, sign = -1 for d = +c.
GipValue gip_reduced(double a, double b, double c, int sign);

// Mixing parameter for the pure-state limit: when |C_y| < 1e-9 the state is
// rescaled by (1 + delta) and the result Richardson-extrapolated from
// delta and delta/2.
inline constexpr double gip_pure_limit_delta = 1e-7;

}  // namespace gipnm
