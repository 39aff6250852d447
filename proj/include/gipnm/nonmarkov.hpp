#pragma once

#include "gipnm/channels.hpp"
#include "gipnm/gip.hpp"
#include "gipnm/quadrature.hpp"

#include <cstdint>
#include <string>
#include <vector>

// Non-Markovianity detectors: the GIP flow D(t) = dQ/dt, the witness
// N_Q^sigma (positive part of the flow integrated over time), the optimized
// measure N_Q, and the divisibility-violation measure N_D.

namespace gipnm {

struct Trajectory {
  std::vector<double> times;
  std::vector<double> gip;
};

struct WitnessResult {
  std::vector<double> times;
  std::vector<double> gip;
  std::vector<double> flow;   // centered-difference derivative on the grid
  SignedIntervals intervals;  // maximal {D > 0} intervals with their integrals
  double nq_sigma = 0.0;      // sum of the interval integrals
};

struct DivisibilityResult {
  std::vector<double> times;
  std::vector<double> g;  // rate G(t)
  double nd = 0.0;
};

enum class ProbeFamily { STS, MTS, RANDOM, GENERAL };

std::string to_string(ProbeFamily family);

struct MeasureResult {
  double nq = 0.0;
  StandardFormParams argmax_probe;
  ProbeFamily family = ProbeFamily::STS;
  long evaluations = 0;
};

Trajectory gip_trajectory(const GaussianChannel& channel, const TwoModeCovariance& sigma0,
                          double t_max, double dt);

// Witness N_Q^sigma: ascent intervals of the GIP trajectory are located by
// refining the sign changes of the derivative; each interval contributes
// Q(t_end) - Q(t_start).
WitnessResult witness(const GaussianChannel& channel, const TwoModeCovariance& sigma0,
                      double t_max, double dt);

// Divisibility-violation rate at time t: builds the intermediate map over
// [t, t + eps], takes the mode-A eigenvalues nu_k of the CP-condition matrix
// and returns sum_k (|nu_k| - nu_k) / (4 eps). The normalization makes the
// rate eps-independent to first order and reproduces 2 alpha |gamma| on the
// damping channel's backflow interval.
double divisibility_G(const GaussianChannel& channel, double t, double eps);

DivisibilityResult divisibility_ND(const GaussianChannel& channel, double t_max, double dt,
                                   double eps);

struct SearchConfig {
  double t_max = 8.0;
  double dt = 0.01;
  int n_random = 200;
  std::uint64_t seed = 1;
  int pattern_iterations = 60;
};

// Staged maximization of the witness over probes at fixed per-mode energy:
// golden-section over the energy-constrained STS and MTS families, random
// restarts, then local pattern search over general (a, b, c, d).
MeasureResult measure(const GaussianChannel& channel, double nbar, const SearchConfig& cfg);

// Energy-constrained family members: per-mode mean excitations fixed to nbar.
TwoModeCovariance sts_at_energy(double k2, double nbar);
TwoModeCovariance mts_at_energy(double k1, double nbar);

}  // namespace gipnm
