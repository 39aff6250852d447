#include "gipnm/nonmarkov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

namespace gipnm {
namespace {

double gip_at(const GaussianChannel& channel, const TwoModeCovariance& sigma0, double t) {
  return gip_general(channel.evolve(sigma0, t)).value;
}

// Floor below which an ascent interval is treated as grid noise.
constexpr double kAscentFloor = 1e-13;

struct GoldenResult {
  double x = 0.0;
  double value = 0.0;
  long evaluations = 0;
};

GoldenResult golden_max(const std::function<double(double)>& f, double lo, double hi,
                        int iterations) {
  constexpr double invphi = 0.6180339887498949;
  GoldenResult best;
  auto consider = [&](double x, double v) {
    ++best.evaluations;
    if (v > best.value) {
      best.value = v;
      best.x = x;
    }
  };
  best.x = lo;
  best.value = f(lo);
  best.evaluations = 1;
  consider(hi, f(hi));
  double a = lo;
  double b = hi;
  double x1 = b - invphi * (b - a);
  double x2 = a + invphi * (b - a);
  double f1 = f(x1);
  double f2 = f(x2);
  consider(x1, f1);
  consider(x2, f2);
  for (int i = 0; i < iterations && b - a > 1e-10 * (hi - lo); ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + invphi * (b - a);
      f2 = f(x2);
      consider(x2, f2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - invphi * (b - a);
      f1 = f(x1);
      consider(x1, f1);
    }
  }
  return best;
}

}  // namespace

std::string to_string(ProbeFamily family) {
  switch (family) {
    case ProbeFamily::STS:
      return "sts";
    case ProbeFamily::MTS:
      return "mts";
    case ProbeFamily::RANDOM:
      return "random";
    case ProbeFamily::GENERAL:
      return "general";
  }
  return "?";
}

Trajectory gip_trajectory(const GaussianChannel& channel, const TwoModeCovariance& sigma0,
                          double t_max, double dt) {
  if (t_max <= 0.0 || dt <= 0.0) {
    throw ValidationError("gip_trajectory: t_max and dt must be positive");
  }
  Trajectory traj;
  const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  traj.times.reserve(n);
  traj.gip.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    traj.times.push_back(t);
    traj.gip.push_back(gip_at(channel, sigma0, t));
  }
  return traj;
}

WitnessResult witness(const GaussianChannel& channel, const TwoModeCovariance& sigma0,
                      double t_max, double dt) {
  WitnessResult res;
  Trajectory traj = gip_trajectory(channel, sigma0, t_max, dt);
  res.times = std::move(traj.times);
  res.gip = std::move(traj.gip);
  const std::size_t n = res.times.size();
  res.flow.resize(n, 0.0);
  for (std::size_t k = 1; k + 1 < n; ++k) {
    res.flow[k] = (res.gip[k + 1] - res.gip[k - 1]) / (2.0 * dt);
  }
  if (n >= 2) {
    res.flow[0] = (res.gip[1] - res.gip[0]) / dt;
    res.flow[n - 1] = (res.gip[n - 1] - res.gip[n - 2]) / dt;
  }

  auto q = [&](double t) { return gip_at(channel, sigma0, t); };
  const double h = dt / 8.0;
  auto flow_at = [&](double t) {
    const double lo = std::max(t - h, 0.0);
    const double hi = std::min(t + h, res.times.back());
    return (q(hi) - q(lo)) / (hi - lo);
  };

  const double scale = std::max(1.0, *std::max_element(res.gip.begin(), res.gip.end()));
  std::size_t i = 0;
  while (i < n) {
    if (res.flow[i] <= 0.0) {
      ++i;
      continue;
    }
    double t0 = res.times[i];
    if (i > 0) {
      t0 = refine_sign_change(flow_at, res.times[i - 1], res.times[i], 1e-8);
    }
    std::size_t j = i;
    while (j + 1 < n && res.flow[j + 1] > 0.0) {
      ++j;
    }
    double t1 = res.times[j];
    if (j + 1 < n) {
      t1 = refine_sign_change(flow_at, res.times[j], res.times[j + 1], 1e-8);
    }
    // The flow is the derivative of the trajectory, so the interval integral
    // is the GIP difference at the refined endpoints.
    const double gain = q(t1) - q(t0);
    if (gain > kAscentFloor * scale) {
      res.intervals.push_back({t0, t1, gain});
      res.nq_sigma += gain;
    }
    i = j + 1;
  }
  return res;
}

double divisibility_G(const GaussianChannel& channel, double t, double eps) {
  if (t < 0.0 || eps <= 0.0) {
    throw ValidationError("divisibility_G: require t >= 0 and eps > 0");
  }
  const ChannelSnapshot now = channel.snapshot(t);
  const ChannelSnapshot next = channel.snapshot(t + eps);
  const Eigen::FullPivLU<Mat4> lu(now.X);
  if (!lu.isInvertible()) {
    throw NumericalError("divisibility_G: singular X(t)");
  }
  const Mat4 x_eps = next.X * lu.inverse();
  const Mat4 y_eps = next.Y - x_eps * now.Y * x_eps.transpose();
  const Mat4 omega = symplectic_form();
  const std::complex<double> im(0.0, 1.0);
  Eigen::Matrix4cd m = y_eps.cast<std::complex<double>>() +
                       im * (omega - x_eps * omega * x_eps.transpose()).cast<std::complex<double>>();
  // local mode-A map: only the A block carries the condition
  Eigen::Matrix2cd ma = m.topLeftCorner<2, 2>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(ma, Eigen::EigenvaluesOnly);
  double sum = 0.0;
  for (int k = 0; k < 2; ++k) {
    const double nu = es.eigenvalues()(k);
    sum += std::abs(nu) - nu;
  }
  return sum / (4.0 * eps);
}

DivisibilityResult divisibility_ND(const GaussianChannel& channel, double t_max, double dt,
                                   double eps) {
  DivisibilityResult res;
  const auto n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9)) + 1;
  res.times.resize(n);
  res.g.resize(n);
  // G carries finite-difference noise of order machine-eps / eps; values
  // below that floor are rounding artifacts, not divisibility violations
  const double floor = 50.0 * std::numeric_limits<double>::epsilon() / eps;
  auto g_at = [&](double t) {
    const double g = divisibility_G(channel, t, eps);
    return g > floor ? g : 0.0;
  };
  for (std::size_t k = 0; k < n; ++k) {
    res.times[k] = static_cast<double>(k) * dt;
    res.g[k] = g_at(res.times[k]);
  }
  // the integration tolerance likewise cannot be tighter than the noise
  for (const SignedInterval& iv :
       positive_part_integral(res.times, res.g, g_at, 1e-8, 1e-9)) {
    res.nd += iv.integral;
  }
  return res;
}

TwoModeCovariance sts_at_energy(double k2, double nbar) {
  const double a = 1.0 + 2.0 * nbar;
  if (k2 < 1.0 || k2 > a + 1e-12) {
    throw ValidationError("sts_at_energy: need 1 <= k2 <= 1 + 2 nbar");
  }
  const double r2 = 0.5 * std::acosh(std::max(a / k2, 1.0));
  return make_sts(k2, r2);
}

TwoModeCovariance mts_at_energy(double k1, double nbar) {
  const double a = 1.0 + 2.0 * nbar;
  if (k1 < 1.0 || k1 > a + 1e-12) {
    throw ValidationError("mts_at_energy: need 1 <= k1 <= 1 + 2 nbar");
  }
  const double target = a / k1;
  // e^{2r} cosh(2r) grows monotonically from 1; bisect.
  double lo = 0.0;
  double hi = 0.5 * std::log(std::max(2.0 * target, 2.0));
  auto f = [](double r) { return std::exp(2.0 * r) * std::cosh(2.0 * r); };
  while (f(hi) < target) {
    hi *= 2.0;
  }
  for (int i = 0; i < 200 && hi - lo > 1e-15 * (1.0 + hi); ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < target ? lo : hi) = mid;
  }
  return make_mts(k1, 0.5 * (lo + hi));
}

MeasureResult measure(const GaussianChannel& channel, double nbar, const SearchConfig& cfg) {
  if (nbar <= 0.0) {
    throw ValidationError("measure: nbar must be positive");
  }
  MeasureResult best;
  auto objective = [&](const TwoModeCovariance& probe) {
    ++best.evaluations;
    return witness(channel, probe, cfg.t_max, cfg.dt).nq_sigma;
  };
  auto consider = [&](double value, const TwoModeCovariance& probe, ProbeFamily family) {
    if (value > best.nq) {
      best.nq = value;
      best.argmax_probe = standard_form(probe);
      best.family = family;
    }
  };

  const double k_max = 1.0 + 2.0 * nbar;

  // Stage 1: closed families along the energy constraint.
  {
    auto f_sts = [&](double k2) { return objective(sts_at_energy(k2, nbar)); };
    GoldenResult g = golden_max(f_sts, 1.0, k_max, 60);
    consider(g.value, sts_at_energy(g.x, nbar), ProbeFamily::STS);
    auto f_mts = [&](double k1) { return objective(mts_at_energy(k1, nbar)); };
    g = golden_max(f_mts, 1.0, k_max, 60);
    consider(g.value, mts_at_energy(g.x, nbar), ProbeFamily::MTS);
  }

  // Stage 2: seeded random restarts.
  {
    StateSampler sampler(nbar, cfg.seed);
    for (int i = 0; i < cfg.n_random; ++i) {
      TwoModeCovariance probe = sampler.next();
      consider(objective(probe), probe, ProbeFamily::RANDOM);
    }
  }

  // Stage 3: pattern search over (a, c, d) with b = 2 + 4 nbar - a.
  {
    StandardFormParams p = best.argmax_probe;
    const double e_total = 2.0 + 4.0 * nbar;
    double step = 0.05 * e_total;
    double current = best.nq;
    auto try_params = [&](const StandardFormParams& cand) -> double {
      if (cand.a <= 1.0 || cand.a >= e_total - 1.0 || cand.c < 0.0 ||
          std::abs(cand.d) > cand.c) {
        return -1.0;
      }
      TwoModeCovariance probe = from_standard_form(cand);
      if (!bona_fide_check(probe)) {
        return -1.0;
      }
      return objective(probe);
    };
    for (int iter = 0; iter < cfg.pattern_iterations && step > 1e-6; ++iter) {
      bool improved = false;
      for (int axis = 0; axis < 3; ++axis) {
        for (double dir : {+1.0, -1.0}) {
          StandardFormParams cand = p;
          if (axis == 0) {
            cand.a += dir * step;
            cand.b = e_total - cand.a;
          } else if (axis == 1) {
            cand.c += dir * step;
          } else {
            cand.d += dir * step;
          }
          const double v = try_params(cand);
          if (v > current + 1e-14) {
            current = v;
            p = cand;
            improved = true;
          }
        }
      }
      if (!improved) {
        step *= 0.5;
      }
    }
    if (current > best.nq + 1e-12) {
      best.nq = current;
      best.argmax_probe = p;
      best.family = ProbeFamily::GENERAL;
    }
  }
  return best;
}

}  // namespace gipnm
