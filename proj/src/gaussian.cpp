#include "gipnm/gaussian.hpp"

#include <cmath>
#include <complex>
#include <string>

namespace gipnm {

Mat4 symplectic_form() {
  Mat4 omega = Mat4::Zero();
  omega(0, 1) = 1.0;
  omega(1, 0) = -1.0;
  omega(2, 3) = 1.0;
  omega(3, 2) = -1.0;
  return omega;
}

TwoModeCovariance::TwoModeCovariance(const Mat4& entries, double sym_tol) : m_(entries) {
  for (int j = 0; j < 4; ++j) {
    for (int k = j + 1; k < 4; ++k) {
      if (std::abs(entries(j, k) - entries(k, j)) > sym_tol) {
        throw ValidationError("covariance matrix not symmetric at entries (" +
                              std::to_string(j) + "," + std::to_string(k) + ") / (" +
                              std::to_string(k) + "," + std::to_string(j) + ")");
      }
    }
  }
  // symmetrize away rounding noise
  m_ = 0.5 * (m_ + m_.transpose().eval());
}

double min_uncertainty_eigenvalue(const TwoModeCovariance& sigma) {
  using Mat4c = Eigen::Matrix4cd;
  const std::complex<double> i(0.0, 1.0);
  Mat4c h = sigma.matrix().cast<std::complex<double>>() + i * symplectic_form().cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Mat4c> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool bona_fide_check(const TwoModeCovariance& sigma, double tol) {
  return min_uncertainty_eigenvalue(sigma) >= -tol;
}

SymplecticInvariants symplectic_invariants(const TwoModeCovariance& sigma) {
  SymplecticInvariants inv;
  inv.i1 = sigma.block_a().determinant();
  inv.i2 = sigma.block_b().determinant();
  inv.i3 = sigma.block_c().determinant();
  inv.i4 = sigma.matrix().determinant();
  return inv;
}

StandardFormParams standard_form(const TwoModeCovariance& sigma) {
  const SymplecticInvariants inv = symplectic_invariants(sigma);
  if (inv.i1 < 1.0 - 1e-9 || inv.i2 < 1.0 - 1e-9) {
    throw NumericalError("invariants inconsistent with a physical state (I1 or I2 < 1)");
  }
  StandardFormParams p;
  p.a = std::sqrt(inv.i1);
  p.b = std::sqrt(inv.i2);
  const double ab = p.a * p.b;

  // Product state: both correlations vanish.
  if (std::abs(inv.i3) < 1e-14 && std::abs(inv.i4 - inv.i1 * inv.i2) < 1e-12 * std::max(1.0, inv.i1 * inv.i2)) {
    return p;
  }

  // c^2 and d^2 are roots of z^2 - S z + P with
  //   S = ((ab)^2 + I3^2 - I4) / (ab),  P = I3^2.
  const double s = ((ab * ab) + inv.i3 * inv.i3 - inv.i4) / ab;
  const double prod = inv.i3 * inv.i3;
  double disc = s * s - 4.0 * prod;
  const double scale = std::max({1.0, s * s, 4.0 * prod});
  if (disc < -1e-10 * scale) {
    throw NumericalError("invariants inconsistent with a physical state (complex root branch)");
  }
  disc = std::max(disc, 0.0);
  double z_hi = 0.5 * (s + std::sqrt(disc));
  if (z_hi < -1e-12 * scale) {
    throw NumericalError("invariants inconsistent with a physical state (negative root branch)");
  }
  z_hi = std::max(z_hi, 0.0);
  double z_lo = (z_hi > 0.0) ? prod / z_hi : 0.0;
  p.c = std::sqrt(z_hi);
  p.d = (inv.i3 < 0.0 ? -1.0 : 1.0) * std::sqrt(std::max(z_lo, 0.0));
  return p;
}

TwoModeCovariance from_standard_form(const StandardFormParams& p) {
  Mat4 m = Mat4::Zero();
  m(0, 0) = m(1, 1) = p.a;
  m(2, 2) = m(3, 3) = p.b;
  m(0, 2) = m(2, 0) = p.c;
  m(1, 3) = m(3, 1) = p.d;
  return TwoModeCovariance(m);
}

ProbeEnergy mean_excitations(const TwoModeCovariance& sigma) {
  ProbeEnergy e;
  e.nbar_a = (sigma.block_a().trace() - 2.0) / 4.0;
  e.nbar_b = (sigma.block_b().trace() - 2.0) / 4.0;
  e.total = e.nbar_a + e.nbar_b;
  e.nbar = e.total / 2.0;
  return e;
}

TwoModeCovariance make_mts(double k1, double r1) {
  if (k1 < 1.0 || r1 < 0.0) {
    throw ValidationError("make_mts requires k1 >= 1 and r1 >= 0");
  }
  const double f = k1 * std::exp(2.0 * r1);
  StandardFormParams p;
  p.a = p.b = f * std::cosh(2.0 * r1);
  p.c = p.d = f * std::sinh(2.0 * r1);
  return from_standard_form(p);
}

TwoModeCovariance make_sts(double k2, double r2) {
  if (k2 < 1.0 || r2 < 0.0) {
    throw ValidationError("make_sts requires k2 >= 1 and r2 >= 0");
  }
  StandardFormParams p;
  p.a = p.b = k2 * std::cosh(2.0 * r2);
  p.c = k2 * std::sinh(2.0 * r2);
  p.d = -p.c;
  return from_standard_form(p);
}

StateSampler::StateSampler(double nbar, std::uint64_t seed) : nbar_(nbar), rng_(seed) {
  if (nbar <= 0.0) {
    throw ValidationError("random_state requires nbar > 0");
  }
}

TwoModeCovariance StateSampler::next() {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kMaxTries = 1000;
  for (int tries = 0; tries < kMaxTries; ++tries) {
    StandardFormParams p;
    p.a = 1.0 + 4.0 * nbar_ * unit(rng_);
    p.b = 2.0 + 4.0 * nbar_ - p.a;
    p.c = std::sqrt(p.a * p.b) * unit(rng_);
    p.d = p.c * (2.0 * unit(rng_) - 1.0);
    TwoModeCovariance sigma = from_standard_form(p);
    if (bona_fide_check(sigma)) {
      return sigma;
    }
  }
  throw NumericalError("random_state: rejection sampling failed after bounded retries");
}

TwoModeCovariance random_state(double nbar, std::uint64_t seed) {
  return StateSampler(nbar, seed).next();
}

}  // namespace gipnm
