#include "gipnm/gip.hpp"

#include <array>
#include <cmath>

namespace gipnm {
namespace {

// The GIP formula is a ratio of near-cancelling polynomials in the
// invariants; extended precision keeps the pure-state limit stable.
using Real = long double;

Real det2(Real m00, Real m01, Real m10, Real m11) { return m00 * m11 - m01 * m10; }

Real det4(const std::array<std::array<Real, 4>, 4>& m) {
  // Laplace expansion by complementary 2x2 minors of the first two rows.
  const Real s01 = det2(m[0][0], m[0][1], m[1][0], m[1][1]);
  const Real s02 = det2(m[0][0], m[0][2], m[1][0], m[1][2]);
  const Real s03 = det2(m[0][0], m[0][3], m[1][0], m[1][3]);
  const Real s12 = det2(m[0][1], m[0][2], m[1][1], m[1][2]);
  const Real s13 = det2(m[0][1], m[0][3], m[1][1], m[1][3]);
  const Real s23 = det2(m[0][2], m[0][3], m[1][2], m[1][3]);
  const Real c01 = det2(m[2][0], m[2][1], m[3][0], m[3][1]);
  const Real c02 = det2(m[2][0], m[2][2], m[3][0], m[3][2]);
  const Real c03 = det2(m[2][0], m[2][3], m[3][0], m[3][3]);
  const Real c12 = det2(m[2][1], m[2][2], m[3][1], m[3][2]);
  const Real c13 = det2(m[2][1], m[2][3], m[3][1], m[3][3]);
  const Real c23 = det2(m[2][2], m[2][3], m[3][2], m[3][3]);
  return s01 * c23 - s02 * c13 + s03 * c12 + s12 * c03 - s13 * c02 + s23 * c01;
}

struct InvL {
  Real i1, i2, i3, i4;
};

InvL invariants_ld(const Mat4& sigma, Real scale) {
  std::array<std::array<Real, 4>, 4> m;
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      m[j][k] = scale * static_cast<Real>(sigma(j, k));
    }
  }
  InvL inv;
  inv.i1 = det2(m[0][0], m[0][1], m[1][0], m[1][1]);
  inv.i2 = det2(m[2][2], m[2][3], m[3][2], m[3][3]);
  inv.i3 = det2(m[0][2], m[0][3], m[1][2], m[1][3]);
  inv.i4 = det4(m);
  return inv;
}

Real c_y(const InvL& v) { return (v.i4 - 1.0L) * (1.0L + v.i1 + v.i2 + 2.0L * v.i3 + v.i4); }

// Evaluates the closed formula; requires C_y bounded away from zero.
Real gip_formula(const InvL& v) {
  const Real cx = (v.i2 + v.i3) * (1.0L + v.i1 + v.i3 - v.i4) - v.i4 * v.i4;
  const Real cy = c_y(v);
  const Real cz = (v.i2 + v.i4) * (v.i1 * v.i2 - v.i4) + v.i3 * (1.0L + v.i1) * (2.0L * v.i2 + v.i3);
  Real rad = cx * cx + cy * cz;
  if (rad < 0.0L) {
    const Real scale = std::max({1.0L, cx * cx, fabsl(cy * cz)});
    if (rad < -1e-12L * scale) {
      throw NumericalError("gip_general: negative radicand beyond rounding tolerance");
    }
    rad = 0.0L;
  }
  return (cx + sqrtl(rad)) / (2.0L * cy);
}

double clamp_nonneg(double q) {
  if (q < 0.0) {
    if (q < -1e-12) {
      throw NumericalError("gip: negative value beyond rounding tolerance");
    }
    return 0.0;
  }
  return q;
}

}  // namespace

GipValue gip_general(const TwoModeCovariance& sigma) {
  const InvL inv = invariants_ld(sigma.matrix(), 1.0L);
  if (fabsl(c_y(inv)) >= 1e-9L) {
    return {clamp_nonneg(static_cast<double>(gip_formula(inv)))};
  }
  // Pure-state / degenerate denominator: mix by (1 + delta) and extrapolate
  // delta -> 0 from the two values at delta and delta/2.
  const Real d = gip_pure_limit_delta;
  const Real q1 = gip_formula(invariants_ld(sigma.matrix(), 1.0L + d));
  const Real q2 = gip_formula(invariants_ld(sigma.matrix(), 1.0L + d / 2.0L));
  return {clamp_nonneg(static_cast<double>(2.0L * q2 - q1))};
}

GipValue gip_reduced(double a, double b, double c, int sign) {
  if (sign != 1 && sign != -1) {
    throw ValidationError("gip_reduced: sign must be +1 (d = -c) or -1 (d = +c)");
  }
  const Real denom = 2.0L * (static_cast<Real>(a) * b - static_cast<Real>(c) * c + sign);
  if (denom <= 1e-12L) {
    throw NumericalError("gip_reduced: degenerate denominator (ab - c^2 + sign <= 0)");
  }
  return {clamp_nonneg(static_cast<double>(static_cast<Real>(c) * c / denom))};
}

}  // namespace gipnm
