#include "gipnm/channels.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <thread>

namespace gipnm {
namespace {

using std::numbers::pi;

// 4th-order cumulative integral of uniformly sampled f (Newton-Cotes,
// 4-point stencils at the ends).
std::vector<double> cumulative_uniform(const std::vector<double>& f, double h) {
  const std::size_t n = f.size();
  std::vector<double> c(n, 0.0);
  if (n < 4) {
    for (std::size_t j = 1; j < n; ++j) {
      c[j] = c[j - 1] + 0.5 * h * (f[j - 1] + f[j]);
    }
    return c;
  }
  c[1] = h / 24.0 * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]);
  for (std::size_t j = 1; j + 2 < n; ++j) {
    c[j + 1] = c[j] + h / 24.0 * (-f[j - 1] + 13.0 * f[j] + 13.0 * f[j + 1] - f[j + 2]);
  }
  c[n - 1] = c[n - 2] + h / 24.0 * (f[n - 4] - 5.0 * f[n - 3] + 19.0 * f[n - 2] + 9.0 * f[n - 1]);
  return c;
}

// Cubic Hermite on a uniform grid with known derivative samples.
double hermite_eval(const std::vector<double>& v, const std::vector<double>& dv, double h,
                    double t) {
  const std::size_t n = v.size();
  if (t <= 0.0) {
    return v.front();
  }
  std::size_t j = static_cast<std::size_t>(t / h);
  if (j >= n - 1) {
    return v.back();
  }
  const double u = t / h - static_cast<double>(j);
  const double u2 = u * u;
  const double u3 = u2 * u;
  return (2.0 * u3 - 3.0 * u2 + 1.0) * v[j] + (u3 - 2.0 * u2 + u) * h * dv[j] +
         (-2.0 * u3 + 3.0 * u2) * v[j + 1] + (u3 - u2) * h * dv[j + 1];
}

void parallel_fill(std::vector<double>& out, const std::function<double(std::size_t)>& fn) {
  const std::size_t n = out.size();
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      for (std::size_t j = w; j < n; j += workers) {
        out[j] = fn(j);
      }
    });
  }
  for (auto& th : threads) {
    th.join();
  }
}

}  // namespace

bool cp_condition(const ChannelSnapshot& snap, double tol) {
  using Mat4c = Eigen::Matrix4cd;
  const std::complex<double> i(0.0, 1.0);
  const Mat4 omega = symplectic_form();
  Mat4c m = snap.Y.cast<std::complex<double>>() +
            i * (omega - snap.X * omega * snap.X.transpose()).cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<Mat4c> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -tol;
}

TwoModeCovariance apply_channel(const ChannelSnapshot& snap, const TwoModeCovariance& sigma0) {
  if (!cp_condition(snap)) {
    throw NumericalError("apply_channel: snapshot violates complete positivity");
  }
  Mat4 out = snap.X * sigma0.matrix() * snap.X.transpose() + snap.Y;
  return TwoModeCovariance(out);
}

ChannelSnapshot local_mode_a_snapshot(double lambda1, double lambda2, double t) {
  ChannelSnapshot snap;
  const double s = std::sqrt(lambda1);
  snap.X = Mat4::Identity();
  snap.X(0, 0) = snap.X(1, 1) = s;
  snap.Y = Mat4::Zero();
  snap.Y(0, 0) = snap.Y(1, 1) = lambda2;
  snap.t = t;
  return snap;
}

TwoModeCovariance GaussianChannel::evolve(const TwoModeCovariance& sigma0, double t) const {
  return apply_channel(snapshot(t), sigma0);
}

// ---------------------------------------------------------------------------
// Damping channel

double damping_gamma_default(double t) {
  constexpr double t_switch = 5.0 * pi / 2.0;
  return t < t_switch ? 0.5 * std::exp(-t / 10.0) * std::sin(t) : 0.5 * std::exp(-pi / 4.0);
}

DampingModel::DampingModel(Kind kind, double alpha) : kind_(kind), alpha_(alpha) {
  if (alpha < 0.0) {
    throw ValidationError("DampingModel: coupling alpha must be >= 0");
  }
}

DampingModel DampingModel::default_pulse(double alpha) {
  DampingModel m(Kind::DefaultPulse, alpha);
  m.breakpoints_ = {5.0 * pi / 2.0};
  return m;
}

DampingModel DampingModel::constant(double alpha, double gamma0) {
  DampingModel m(Kind::Constant, alpha);
  m.gamma0_ = gamma0;
  return m;
}

DampingModel DampingModel::custom(double alpha, std::function<double(double)> gamma,
                                  std::vector<double> gamma_breakpoints) {
  DampingModel m(Kind::Custom, alpha);
  m.gamma_fn_ = std::move(gamma);
  m.breakpoints_ = std::move(gamma_breakpoints);
  return m;
}

double DampingModel::gamma(double t) const {
  switch (kind_) {
    case Kind::DefaultPulse:
      return damping_gamma_default(t);
    case Kind::Constant:
      return gamma0_;
    case Kind::Custom:
      return gamma_fn_(t);
  }
  return 0.0;
}

double DampingModel::x(double t) const {
  if (t < 0.0) {
    throw ValidationError("DampingModel::x: t must be >= 0");
  }
  switch (kind_) {
    case Kind::Constant:
      return 2.0 * alpha_ * gamma0_ * t;
    case Kind::DefaultPulse: {
      // int_0^u e^{-s/10} sin s ds = (1 - e^{-u/10}(cos u + 0.1 sin u)) / 1.01
      constexpr double t_switch = 5.0 * pi / 2.0;
      auto accum = [](double u) {
        return (1.0 - std::exp(-u / 10.0) * (std::cos(u) + 0.1 * std::sin(u))) / 1.01;
      };
      if (t <= t_switch) {
        return alpha_ * accum(t);
      }
      return alpha_ * (accum(t_switch) + std::exp(-pi / 4.0) * (t - t_switch));
    }
    case Kind::Custom: {
      auto integrand = [this](double s) { return 2.0 * gamma_fn_(s); };
      return alpha_ * integrate_adaptive(integrand, 0.0, t, 1e-11, breakpoints_).value;
    }
  }
  return 0.0;
}

ChannelSnapshot DampingModel::snapshot(double t) const {
  const double l1 = std::exp(-x(t));
  return local_mode_a_snapshot(l1, 1.0 - l1, t);
}

TwoModeCovariance DampingModel::evolve(const TwoModeCovariance& sigma0, double t) const {
  const double l1 = std::exp(-x(t));
  const double s = std::sqrt(l1);
  Mat4 out = sigma0.matrix();
  out.topLeftCorner<2, 2>() *= l1;
  out.topRightCorner<2, 2>() *= s;
  out.bottomLeftCorner<2, 2>() *= s;
  out(0, 0) += 1.0 - l1;
  out(1, 1) += 1.0 - l1;
  return TwoModeCovariance(out);
}

// ---------------------------------------------------------------------------
// Quantum Brownian motion

QbmCoefficients::QbmCoefficients(const QbmParams& params, double t_max)
    : params_(params), t_max_(t_max) {
  if (params.temperature < 0.0 || params.omega0 <= 0.0 || params.omegac <= 0.0) {
    throw ValidationError("QbmCoefficients: require T >= 0, omega0 > 0, omegac > 0");
  }
  h_ = std::min(0.005, pi / (100.0 * params_.omega0));
  build_grids();
}

std::shared_ptr<QbmCoefficients> QbmCoefficients::from_coefficients(
    std::function<double(double)> delta, std::function<double(double)> gamma, double t_max,
    double step) {
  auto c = std::shared_ptr<QbmCoefficients>(new QbmCoefficients());
  c->t_max_ = t_max;
  c->h_ = step;
  c->synthetic_ = true;
  const auto n = static_cast<std::size_t>(std::ceil(t_max / step)) + 2;
  c->times_.resize(n);
  c->delta_.resize(n);
  c->gamma_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    c->times_[j] = static_cast<double>(j) * step;
    c->delta_[j] = delta(c->times_[j]);
    c->gamma_[j] = gamma(c->times_[j]);
  }
  // derivative samples by centered differences (ends one-sided)
  auto diff = [step](const std::vector<double>& v) {
    std::vector<double> d(v.size());
    for (std::size_t j = 1; j + 1 < v.size(); ++j) {
      d[j] = (v[j + 1] - v[j - 1]) / (2.0 * step);
    }
    d.front() = (v[1] - v[0]) / step;
    d.back() = (v[v.size() - 1] - v[v.size() - 2]) / step;
    return d;
  };
  c->dkernel_ = diff(c->delta_);
  c->gkernel_ = diff(c->gamma_);
  return c;
}

double QbmCoefficients::gamma_kernel(double s) const {
  // int_0^inf omega e^{-omega/wc} sin(omega s) domega = 2 wc^3 s / (1 + wc^2 s^2)^2
  const double wc = params_.omegac;
  const double den = 1.0 + wc * wc * s * s;
  return std::sin(params_.omega0 * s) * 2.0 * wc * wc * wc * s / (den * den);
}

double QbmCoefficients::delta_kernel(double s) const {
  // Thermal weight coth(omega / 2 T) = 2 N + 1: this (rather than the bare
  // N + 1/2) is what makes Delta(inf) = gamma(inf) at T = 0, so the vacuum is
  // the stationary state of the evolved channel.
  const double wc = params_.omegac;
  const double den = 1.0 + wc * wc * s * s;
  // vacuum part: int omega e^{-omega/wc} cos(omega s) = wc^2 (1 - wc^2 s^2) / den^2
  double w = wc * wc * (1.0 - wc * wc * s * s) / (den * den);
  const double temp = params_.temperature;
  if (temp > 0.0) {
    const double tscale = temp * wc;
    auto thermal = [&](double omega) {
      if (omega < 1e-12) {
        return 2.0 * tscale;  // limit of 2 omega e^{-omega/wc} / (e^{omega/tscale} - 1)
      }
      return 2.0 * omega * std::exp(-omega / wc) * std::cos(omega * s) /
             std::expm1(omega / tscale);
    };
    const double cut = params_.omega_cutoff_mult * std::max(wc, tscale);
    // pre-split on the oscillation scale so the adaptive pass starts resolved
    std::vector<double> breaks;
    if (s > 0.5) {
      const double period = 2.0 * pi / s;
      for (double b = period; b < cut; b += period) {
        breaks.push_back(b);
      }
    }
    w += integrate_adaptive(thermal, 0.0, cut, 0.25 * params_.tol_quad, breaks).value;
  }
  return std::cos(params_.omega0 * s) * w;
}

double QbmCoefficients::gamma_kernel_numeric(double s) const {
  const double wc = params_.omegac;
  auto f = [&](double omega) { return omega * std::exp(-omega / wc) * std::sin(omega * s); };
  return std::sin(params_.omega0 * s) *
         integrate_truncated_tail(f, 0.0, wc, 0.1 * params_.tol_quad,
                                  params_.omega_cutoff_mult).value;
}

double QbmCoefficients::delta_kernel_numeric(double s) const {
  const double wc = params_.omegac;
  const double temp = params_.temperature;
  const double tscale = temp * wc;
  auto occupation = [&](double omega) {
    return temp > 0.0 ? 1.0 / std::expm1(omega / tscale) : 0.0;
  };
  auto f = [&](double omega) {
    if (omega < 1e-12) {
      return temp > 0.0 ? 2.0 * tscale : 0.0;
    }
    return omega * std::exp(-omega / wc) * (2.0 * occupation(omega) + 1.0) *
           std::cos(omega * s);
  };
  const double cut = params_.omega_cutoff_mult * std::max(wc, std::max(1.0, temp) * wc);
  std::vector<double> breaks;
  if (s > 0.5) {
    const double period = 2.0 * pi / s;
    for (double b = period; b < cut; b += period) {
      breaks.push_back(b);
    }
  }
  return std::cos(params_.omega0 * s) *
         integrate_adaptive(f, 0.0, cut, 0.1 * params_.tol_quad, breaks).value;
}

double QbmCoefficients::delta_direct(double t) const {
  auto f = [this](double s) { return delta_kernel(s); };
  return integrate_adaptive(f, 0.0, t, params_.tol_quad).value;
}

double QbmCoefficients::gamma_direct(double t) const {
  auto f = [this](double s) { return gamma_kernel(s); };
  return integrate_adaptive(f, 0.0, t, params_.tol_quad).value;
}

void QbmCoefficients::build_grids() {
  const auto n = static_cast<std::size_t>(std::ceil(t_max_ / h_)) + 2;
  times_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    times_[j] = static_cast<double>(j) * h_;
  }
  dkernel_.resize(n);
  gkernel_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    gkernel_[j] = gamma_kernel(times_[j]);
  }
  if (params_.temperature > 0.0) {
    parallel_fill(dkernel_, [this](std::size_t j) { return delta_kernel(times_[j]); });
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      dkernel_[j] = delta_kernel(times_[j]);
    }
  }
  delta_ = cumulative_uniform(dkernel_, h_);
  gamma_ = cumulative_uniform(gkernel_, h_);
}

double QbmCoefficients::delta(double t) const { return hermite_eval(delta_, dkernel_, h_, t); }

double QbmCoefficients::gamma(double t) const { return hermite_eval(gamma_, gkernel_, h_, t); }

QbmModel::QbmModel(std::shared_ptr<const QbmCoefficients> coeffs, double alpha,
                   bool lambda2_literal)
    : coeffs_(std::move(coeffs)), alpha_(alpha), literal_(lambda2_literal) {
  if (alpha < 0.0) {
    throw ValidationError("QbmModel: coupling alpha must be >= 0");
  }
  const auto& g = coeffs_->gamma_samples();
  const auto& d = coeffs_->delta_samples();
  const double h = coeffs_->step();
  const std::size_t n = g.size();
  xderiv_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    xderiv_[j] = 2.0 * alpha_ * g[j];
  }
  x_ = cumulative_uniform(xderiv_, h);
  wintderiv_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    wintderiv_[j] = std::exp(x_[j]) * d[j];
  }
  wint_ = cumulative_uniform(wintderiv_, h);
  // literal: Lambda2 = alpha e^{-x} int e^{x} Delta with the (N + 1/2)
  // diffusion weight (= Delta / 2 in the coth normalization used here)
  const double fac = literal_ ? 0.5 : 2.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double l1 = std::exp(-x_[j]);
    const double l2 = fac * alpha_ * l1 * wint_[j];
    if (l2 < std::abs(1.0 - l1) - 1e-8) {
      cp_warning_ = true;
      break;
    }
  }
}

double QbmModel::x(double t) const { return hermite_eval(x_, xderiv_, coeffs_->step(), t); }

double QbmModel::lambda1(double t) const { return std::exp(-x(t)); }

double QbmModel::lambda2(double t) const {
  const double fac = literal_ ? 0.5 : 2.0;
  return fac * alpha_ * std::exp(-x(t)) * hermite_eval(wint_, wintderiv_, coeffs_->step(), t);
}

ChannelSnapshot QbmModel::snapshot(double t) const {
  return local_mode_a_snapshot(lambda1(t), lambda2(t), t);
}

TwoModeCovariance QbmModel::evolve(const TwoModeCovariance& sigma0, double t) const {
  const double l1 = lambda1(t);
  const double l2 = lambda2(t);
  const double s = std::sqrt(l1);
  Mat4 out = sigma0.matrix();
  out.topLeftCorner<2, 2>() *= l1;
  out.topRightCorner<2, 2>() *= s;
  out.bottomLeftCorner<2, 2>() *= s;
  out(0, 0) += l2;
  out(1, 1) += l2;
  return TwoModeCovariance(out);
}

}  // namespace gipnm
