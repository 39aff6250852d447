#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <stdexcept>

// Two-mode Gaussian states represented by 4x4 covariance matrices,
// quadrature ordering (q_A, p_A, q_B, p_B), natural units with hbar = 1
// and vacuum variance 1 per quadrature.

namespace gipnm {

using Mat2 = Eigen::Matrix2d;
using Mat4 = Eigen::Matrix4d;

// Eigenvalue tolerance for the uncertainty-relation check sigma + i Omega >= 0.
inline constexpr double kPsdTol = 1e-10;

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Two-mode symplectic form, direct sum of [[0,1],[-1,0]].
Mat4 symplectic_form();

// Standard-form parameters (a, b, c, d): diagonal blocks diag(a,a),
// diag(b,b) and correlation block diag(c,d), with a,b >= 1, c >= |d|.
struct StandardFormParams {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double d = 0.0;
};

// Determinants of the covariance blocks: I1 = det alpha, I2 = det beta,
// I3 = det gamma, I4 = det sigma. Invariant under local symplectics.
struct SymplecticInvariants {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double i4 = 0.0;
};

struct ProbeEnergy {
  double nbar_a = 0.0;  // mean excitations in mode A
  double nbar_b = 0.0;  // mean excitations in mode B
  double nbar = 0.0;    // per-mode average
  double total = 0.0;   // E = nbar_a + nbar_b = 2 nbar
};

class TwoModeCovariance {
 public:
  // Validates symmetry; throws ValidationError naming the offending pair.
  explicit TwoModeCovariance(const Mat4& entries, double sym_tol = 1e-9);

  const Mat4& matrix() const { return m_; }
  Mat2 block_a() const { return m_.topLeftCorner<2, 2>(); }
  Mat2 block_b() const { return m_.bottomRightCorner<2, 2>(); }
  Mat2 block_c() const { return m_.topRightCorner<2, 2>(); }

 private:
  Mat4 m_;
};

// Minimum eigenvalue of the Hermitian matrix sigma + i Omega.
double min_uncertainty_eigenvalue(const TwoModeCovariance& sigma);

// Robertson-Schroedinger uncertainty relation: sigma + i Omega >= -tol.
bool bona_fide_check(const TwoModeCovariance& sigma, double tol = kPsdTol);

SymplecticInvariants symplectic_invariants(const TwoModeCovariance& sigma);

// Recover (a, b, c, d) from the invariants of a general covariance matrix.
// Throws NumericalError if the invariants are inconsistent with a physical
// state (negative or complex root branch).
StandardFormParams standard_form(const TwoModeCovariance& sigma);

// Assemble the block-diagonal standard-form matrix from (a, b, c, d).
TwoModeCovariance from_standard_form(const StandardFormParams& p);

ProbeEnergy mean_excitations(const TwoModeCovariance& sigma);

// Mixed thermal state, a = b = k1 e^{2 r1} cosh(2 r1), c = d = k1 e^{2 r1} sinh(2 r1).
// Always separable. Requires k1 >= 1, r1 >= 0.
TwoModeCovariance make_mts(double k1, double r1);

// Squeezed thermal state, a = b = k2 cosh(2 r2), c = -d = k2 sinh(2 r2).
// Pure two-mode squeezed vacuum for k2 = 1. Requires k2 >= 1, r2 >= 0.
TwoModeCovariance make_sts(double k2, double r2);

// Energy-constrained rejection sampler over standard-form states with
// a + b = 2 + 4 nbar. Deterministic for a fixed seed.
class StateSampler {
 public:
  StateSampler(double nbar, std::uint64_t seed);
  TwoModeCovariance next();

 private:
  double nbar_;
  std::mt19937_64 rng_;
};

TwoModeCovariance random_state(double nbar, std::uint64_t seed);

}  // namespace gipnm
