// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion is self-contained and prints a short diagnostic on
// failure.

#include "gipnm/channels.hpp"
#include "gipnm/gip.hpp"
#include "gipnm/nonmarkov.hpp"
#include "gipnm/quadrature.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cmath>
#include <cstdio>
#include <functional>
#include <future>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>
#include <vector>

using namespace gipnm;
using std::numbers::pi;

namespace {

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
  std::cout << (ok ? "[PASS]" : "[FAIL]") << " criterion " << n;
  if (!detail.empty()) {
    std::cout << " -- " << detail;
  }
  std::cout << std::endl;
  if (!ok) {
    ++failures;
  }
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// Random bona fide standard-form state with d = +-c at mixedness k and
// per-mode energy nbar (a = b = 1 + 2 nbar).
TwoModeCovariance constrained_state(double nbar, double k, bool sts_shape, double& a_out,
                                    double& c_out, int& sign_out) {
  const double target = 1.0 + 2.0 * nbar;
  const double ratio = target / k;
  double r = 0.0;
  if (sts_shape) {
    r = ratio > 1.0 ? 0.5 * std::acosh(ratio) : 0.0;
    a_out = k * std::cosh(2.0 * r);
    c_out = k * std::sinh(2.0 * r);
    sign_out = +1;
  } else {
    double lo = 0.0;
    double hi = 1.0;
    auto f = [](double x) { return std::exp(2.0 * x) * std::cosh(2.0 * x); };
    while (f(hi) < ratio) {
      hi *= 2.0;
    }
    for (int it = 0; it < 100; ++it) {
      const double mid = 0.5 * (lo + hi);
      (f(mid) < ratio ? lo : hi) = mid;
    }
    r = ratio > 1.0 ? 0.5 * (lo + hi) : 0.0;
    a_out = k * std::exp(2.0 * r) * std::cosh(2.0 * r);
    c_out = k * std::exp(2.0 * r) * std::sinh(2.0 * r);
    sign_out = -1;
  }
  return from_standard_form({a_out, a_out, c_out, sign_out == 1 ? -c_out : c_out});
}

template <typename Fn>
void parallel_for(std::size_t count, Fn&& body) {
  const unsigned n_workers = std::max(1u, std::thread::hardware_concurrency());
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> jobs;
  for (unsigned w = 0; w < n_workers; ++w) {
    jobs.push_back(std::async(std::launch::async, [&]() {
      for (;;) {
        const std::size_t j = next.fetch_add(1);
        if (j >= count) {
          return;
        }
        body(j);
      }
    }));
  }
  for (auto& job : jobs) {
    job.get();
  }
}

// --- criterion 1: GIP formula equivalence on 10^4 seeded states ---
void criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> unbar(0.1, 10.0);
  std::uniform_real_distribution<double> uk(1.01, 3.0);
  std::uniform_int_distribution<int> ushape(0, 1);
  double worst = 0.0;
  for (int j = 0; j < 10000; ++j) {
    double a, c;
    int sign;
    const auto s = constrained_state(unbar(rng), uk(rng), ushape(rng) == 0, a, c, sign);
    const double diff = std::abs(gip_reduced(a, a, c, sign).value - gip_general(s).value);
    worst = std::max(worst, diff);
  }
  const double dt = elapsed_s(t0);
  std::ostringstream ss;
  ss << "max |reduced - general| = " << worst << ", " << dt << " s";
  report(1, worst < 1e-8 && dt < 10.0, ss.str());
}

// --- criterion 2: Markovian monotonicity, constant gamma ---
void criterion_2() {
  auto model = DampingModel::constant(0.1, 1.0);
  std::atomic<bool> ok{true};
  std::atomic<double> worst_step{0.0};
  std::vector<TwoModeCovariance> probes;
  StateSampler sampler(2.0, 202);
  for (int j = 0; j < 100; ++j) {
    probes.push_back(sampler.next());
  }
  std::vector<double> witnesses(probes.size(), 0.0);
  parallel_for(probes.size(), [&](std::size_t j) {
    auto res = witness(model, probes[j], 20.0, 0.01);
    witnesses[j] = res.nq_sigma;
    for (std::size_t i = 1; i < res.gip.size(); ++i) {
      const double step = res.gip[i] - res.gip[i - 1];
      if (step > 1e-9) {
        ok = false;
      }
      double cur = worst_step.load();
      while (step > cur && !worst_step.compare_exchange_weak(cur, step)) {
      }
    }
  });
  const double max_w = *std::max_element(witnesses.begin(), witnesses.end());
  auto nd = divisibility_ND(model, 20.0, 0.01, 1e-5);
  std::ostringstream ss;
  ss << "worst GIP step = " << worst_step.load() << ", max witness = " << max_w
     << ", ND = " << nd.nd;
  report(2, ok && max_w == 0.0 && nd.nd == 0.0, ss.str());
}

// --- criterion 3: damping witness equals the analytic GIP difference ---
void criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double alpha : {0.05, 0.1, 0.5, 1.0}) {
    auto model = DampingModel::default_pulse(alpha);
    for (int p = 0; p < 2; ++p) {
      auto probe = p == 0 ? make_sts(1.0, 1.0) : make_mts(1.0, 1.0);
      auto res = witness(model, probe, 8.0, 0.01);
      const double analytic = gip_general(model.evolve(probe, 2.0 * pi)).value -
                              gip_general(model.evolve(probe, pi)).value;
      worst = std::max(worst, std::abs(res.nq_sigma - analytic));
    }
  }
  const double dt = elapsed_s(t0);
  std::ostringstream ss;
  ss << "max |NQ - analytic| = " << worst << ", " << dt << " s";
  report(3, worst < 1e-6 && dt < 30.0, ss.str());
}

// --- criterion 4: damping N_D closed form and the support of G ---
void criterion_4() {
  bool ok = true;
  std::ostringstream ss;
  for (double alpha : {0.1, 0.5}) {
    auto model = DampingModel::default_pulse(alpha);
    const double expected = alpha * (std::exp(-pi / 10.0) + std::exp(-pi / 5.0)) / 1.01;
    double nd[2];
    const double epses[2] = {1e-4, 1e-5};
    for (int j = 0; j < 2; ++j) {
      nd[j] = divisibility_ND(model, 8.0, 0.01, epses[j]).nd;
      if (std::abs(nd[j] - expected) > 0.01 * expected) {
        ok = false;
      }
    }
    if (std::abs(nd[0] - nd[1]) > 0.001 * expected) {
      ok = false;
    }
    // support endpoints of {G > 0} by bisection on the indicator; the
    // threshold sits above the finite-difference noise floor of G
    auto positive = [&](double t) { return divisibility_G(model, t, 1e-5) > 1e-9; };
    auto bisect = [&](double lo, double hi, bool rising) {
      for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const bool pos = positive(mid);
        if (pos == rising) {
          hi = mid;
        } else {
          lo = mid;
        }
      }
      return 0.5 * (lo + hi);
    };
    const double left = bisect(3.0, 3.3, true);    // crosses into G > 0 near pi
    const double right = bisect(6.2, 6.4, false);  // leaves G > 0 near 2 pi
    if (std::abs(left - pi) > 1e-3 || std::abs(right - 2.0 * pi) > 1e-3) {
      ok = false;
    }
    ss << "alpha=" << alpha << ": ND=" << nd[1] << " (expected " << expected
       << "), support=(" << left << "," << right << ") ";
  }
  report(4, ok, ss.str());
}

// --- criterion 5: Fig. 2 monotonicity of N_Q in alpha and nbar ---
void criterion_5() {
  const std::vector<double> alphas{0.1, 0.4, 0.7, 1.0};
  const std::vector<double> nbars{0.5, 1.0, 2.0, 4.0};
  double grid[4][4];
  std::atomic<bool> optimum_is_sts{true};
  parallel_for(16, [&](std::size_t cell) {
    const std::size_t ia = cell / 4;
    const std::size_t in = cell % 4;
    auto model = DampingModel::default_pulse(alphas[ia]);
    const double sts_value =
        witness(model, sts_at_energy(1.0, nbars[in]), 8.0, 0.01).nq_sigma;
    grid[ia][in] = sts_value;
    SearchConfig cfg;
    cfg.t_max = 8.0;
    cfg.dt = 0.01;
    cfg.n_random = 40;
    cfg.pattern_iterations = 30;
    cfg.seed = 5 + cell;
    auto best = measure(model, nbars[in], cfg);
    // staged search must not beat the pure STS probe by more than tolerance
    if (best.nq > sts_value * (1.0 + 1e-4) + 1e-9) {
      optimum_is_sts = false;
    }
  });
  bool monotone = true;
  std::ostringstream viol;
  for (int ia = 0; ia < 4; ++ia) {
    for (int in = 0; in < 4; ++in) {
      if (ia > 0 && grid[ia][in] <= grid[ia - 1][in]) {
        monotone = false;
        viol << " alpha " << alphas[static_cast<std::size_t>(ia - 1)] << "->"
             << alphas[static_cast<std::size_t>(ia)] << " at nbar="
             << nbars[static_cast<std::size_t>(in)] << ": "
             << grid[ia - 1][in] << "->" << grid[ia][in];
      }
      if (in > 0 && grid[ia][in] <= grid[ia][in - 1]) {
        monotone = false;
        viol << " nbar " << nbars[static_cast<std::size_t>(in - 1)] << "->"
             << nbars[static_cast<std::size_t>(in)] << " at alpha="
             << alphas[static_cast<std::size_t>(ia)] << ": "
             << grid[ia][in - 1] << "->" << grid[ia][in];
      }
    }
  }
  std::ostringstream ss;
  ss << "N_Q(0.1,0.5)=" << grid[0][0] << ", N_Q(1,4)=" << grid[3][3]
     << (optimum_is_sts ? ", STS optimum confirmed" : ", STS optimum NOT confirmed")
     << (monotone ? "" : ", non-monotone:") << viol.str();
  report(5, monotone && optimum_is_sts, ss.str());
}

// --- criterion 6: random probes never beat the TMSV curve ---
void criterion_6() {
  const auto t0 = std::chrono::steady_clock::now();
  auto model = DampingModel::default_pulse(0.1);
  const int n = 10000;
  std::vector<double> nbars(n);
  std::vector<std::uint64_t> seeds(n);
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> unbar(0.1, 5.0);
  for (int j = 0; j < n; ++j) {
    nbars[static_cast<std::size_t>(j)] = unbar(rng);
    seeds[static_cast<std::size_t>(j)] = rng();
  }
  std::atomic<double> worst_excess{-1.0};
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t j) {
    auto probe = random_state(nbars[j], seeds[j]);
    const double w_rand = witness(model, probe, 8.0, 0.01).nq_sigma;
    const double w_sts = witness(model, sts_at_energy(1.0, nbars[j]), 8.0, 0.01).nq_sigma;
    const double excess = w_rand - w_sts;
    double cur = worst_excess.load();
    while (excess > cur && !worst_excess.compare_exchange_weak(cur, excess)) {
    }
  });
  bool mts_positive = true;
  for (double nb : {0.1, 0.5, 1.0, 2.0, 5.0}) {
    if (witness(model, mts_at_energy(1.0, nb), 8.0, 0.01).nq_sigma <= 0.0) {
      mts_positive = false;
    }
  }
  const double dt = elapsed_s(t0);
  std::ostringstream ss;
  ss << "worst (random - STS) = " << worst_excess.load() << ", MTS curve "
     << (mts_positive ? "> 0" : "NOT > 0") << ", " << dt << " s";
  report(6, worst_excess.load() < 1e-6 && mts_positive && dt < 300.0, ss.str());
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double lx = std::log(x[j]);
    const double ly = std::log(y[j]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// --- criterion 7: Heisenberg vs shot-noise scaling ---
void criterion_7() {
  auto model = DampingModel::default_pulse(0.1);
  const std::vector<double> nbars{5.0, 10.0, 20.0, 50.0};
  std::vector<double> sts_w, mts_w;
  for (double nb : nbars) {
    sts_w.push_back(witness(model, sts_at_energy(1.0, nb), 8.0, 0.01).nq_sigma);
    mts_w.push_back(witness(model, mts_at_energy(1.0, nb), 8.0, 0.01).nq_sigma);
  }
  const double s_sts = loglog_slope(nbars, sts_w);
  const double s_mts = loglog_slope(nbars, mts_w);
  std::ostringstream ss;
  ss << "STS slope = " << s_sts << ", MTS slope = " << s_mts;
  report(7, s_sts >= 1.8 && s_sts <= 2.2 && s_mts > 0.0 && s_mts <= 1.2, ss.str());
}

// --- criterion 8: QBM coefficient oracles ---
void criterion_8() {
  bool ok = true;
  double worst = 0.0;
  for (double w0 : {4.0, 6.0}) {
    QbmParams params;
    params.omega0 = w0;
    QbmCoefficients coeffs(params, 30.0);
    // closed-form omega kernels vs fully numeric omega quadrature
    for (double s = 0.25; s <= 30.0; s *= 2.0) {
      worst = std::max(worst, std::abs(coeffs.delta_kernel(s) - coeffs.delta_kernel_numeric(s)));
      worst = std::max(worst, std::abs(coeffs.gamma_kernel(s) - coeffs.gamma_kernel_numeric(s)));
    }
    // s-integrated coefficients vs direct adaptive quadrature of the kernels
    for (double t : {0.5, 2.0, 8.0, 30.0}) {
      worst = std::max(worst, std::abs(coeffs.delta(t) - coeffs.delta_direct(t)));
      worst = std::max(worst, std::abs(coeffs.gamma(t) - coeffs.gamma_direct(t)));
    }
    // gamma is T-independent to machine precision
    QbmParams hot = params;
    hot.temperature = 4.0;
    QbmCoefficients coeffs_hot(hot, 30.0);
    for (std::size_t j = 0; j < coeffs.gamma_samples().size(); ++j) {
      if (coeffs.gamma_samples()[j] != coeffs_hot.gamma_samples()[j]) {
        ok = false;
      }
    }
  }
  std::ostringstream ss;
  ss << "max oracle deviation = " << worst
     << (ok ? ", gamma T-independent" : ", gamma DEPENDS on T");
  report(8, ok && worst < 1e-8, ss.str());
}

// --- criterion 9: divisibility rate agrees with the coefficient signs ---
void criterion_9() {
  bool ok = true;
  std::ostringstream ss;
  const double t_max = 15.0;
  for (double temp : {0.0, 0.5, 1.0, 4.0}) {
    for (double w0 : {4.0, 6.0}) {
      QbmParams params;
      params.temperature = temp;
      params.omega0 = w0;
      auto coeffs = std::make_shared<QbmCoefficients>(params, t_max + 0.1);
      QbmModel model(coeffs, 0.5);
      const double dt = std::min(0.01, pi / (100.0 * w0));
      std::vector<bool> gpos, cpos;
      std::vector<double> times;
      for (double t = dt; t <= t_max; t += dt) {
        times.push_back(t);
        gpos.push_back(divisibility_G(model, t, 1e-5) > 1e-7);
        const double d = coeffs->delta(t);
        const double g = coeffs->gamma(t);
        cpos.push_back(d + g < -1e-7 || d - g < -1e-7);
      }
      // indicators may disagree only within a few cells of a sign change
      auto near_flip = [&](const std::vector<bool>& v, std::size_t j) {
        const std::size_t lo = j > 5 ? j - 5 : 0;
        const std::size_t hi = std::min(v.size() - 1, j + 5);
        for (std::size_t i = lo; i < hi; ++i) {
          if (v[i] != v[i + 1]) {
            return true;
          }
        }
        return false;
      };
      for (std::size_t j = 0; j < gpos.size(); ++j) {
        if (gpos[j] != cpos[j] && !near_flip(gpos, j) && !near_flip(cpos, j)) {
          ok = false;
          ss << "mismatch T=" << temp << " w0=" << w0 << " t=" << times[j] << " ";
        }
      }
      // witness positivity implies N_D > 0
      const double w_sts = witness(model, sts_at_energy(1.0, 2.5), t_max, dt).nq_sigma;
      const double w_mts = witness(model, mts_at_energy(1.0, 2.5), t_max, dt).nq_sigma;
      const double nd = divisibility_ND(model, t_max, dt, 1e-5).nd;
      if (std::max(w_sts, w_mts) > 1e-10 && !(nd > 0.0)) {
        ok = false;
        ss << "witness>0 but ND=0 at T=" << temp << " w0=" << w0 << " ";
      }
    }
  }
  report(9, ok, ss.str().empty() ? "all 8 cells consistent" : ss.str());
}

// --- criterion 10: Fig. 4(a)/5(a) qualitative reproduction ---
void criterion_10() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<double> alphas{0.1, 0.25, 0.5, 0.75, 1.0};
  const double t_max = 15.0;
  const double nbar = 2.5;
  bool ok = true;
  std::ostringstream ss;
  for (double w0 : {4.0, 6.0}) {
    QbmParams params;
    params.omega0 = w0;
    auto coeffs = std::make_shared<QbmCoefficients>(params, t_max + 0.1);
    const double dt = std::min(0.01, pi / (50.0 * w0));
    std::vector<double> sts_w(alphas.size()), mts_w(alphas.size());
    parallel_for(alphas.size(), [&](std::size_t j) {
      // The figure phenomenology belongs to the literal (uncorrected)
      // normalization: under the vacuum-preserving default the MTS ascent
      // condition 2 gamma > 2 Delta (1 + 2 nbar) is never met at this probe
      // energy for omega0 = 4 (max gamma/Delta = 1.77), so the witness is
      // identically zero there.  See the ascent-condition unit test.
      QbmModel model(coeffs, alphas[j], /*lambda2_literal=*/true);
      sts_w[j] = witness(model, sts_at_energy(1.0, nbar), t_max, dt).nq_sigma;
      mts_w[j] = witness(model, mts_at_energy(1.0, nbar), t_max, dt).nq_sigma;
    });
    if (w0 == 4.0) {
      // MTS perceptible, STS below 1e-4 of it
      for (std::size_t j = alphas.size() / 2; j < alphas.size(); ++j) {
        if (!(mts_w[j] > 1e-4)) {
          ok = false;
          ss << "w0=4 alpha=" << alphas[j] << ": MTS witness " << mts_w[j] << " ";
        }
        if (!(sts_w[j] < 1e-4 * mts_w[j])) {
          ok = false;
          ss << "w0=4 alpha=" << alphas[j] << ": STS " << sts_w[j] << " vs MTS " << mts_w[j]
             << " ";
        }
      }
    } else {
      // STS above MTS in the upper half of the sweep
      for (std::size_t j = alphas.size() / 2; j < alphas.size(); ++j) {
        if (!(sts_w[j] > mts_w[j] && mts_w[j] >= 0.0 && sts_w[j] > 0.0)) {
          ok = false;
          ss << "w0=6 alpha=" << alphas[j] << ": STS " << sts_w[j] << " vs MTS " << mts_w[j]
             << " ";
        }
      }
    }
  }
  const double dt = elapsed_s(t0);
  std::ostringstream head;
  head << ss.str() << dt << " s";
  report(10, ok && dt < 1200.0, head.str());
}

// --- criterion 11: Fig. 6 qualitative reproduction ---
void criterion_11() {
  bool minus_negative_everywhere = true;
  bool plus_contained = true;
  std::ostringstream ss;
  for (double ratio : {2.0, 4.0, 6.0, 8.0}) {
    QbmParams params;
    params.omega0 = ratio;
    QbmCoefficients coeffs(params, 15.0);
    double min_minus = 1e300;
    bool minus_neg = false;
    for (double t = 0.01; t <= 15.0; t += 0.01) {
      const double d = coeffs.delta(t);
      const double g = coeffs.gamma(t);
      const double plus = 0.5 * (d + g);
      const double minus = 0.5 * (d - g);
      min_minus = std::min(min_minus, minus);
      if (minus < -1e-8) {
        minus_neg = true;
      }
      if (plus < -1e-8 && (t >= 5.0 || ratio < 6.0)) {
        plus_contained = false;
        ss << "(D+g)/2=" << plus << " at t=" << t << " ratio=" << ratio << " ";
      }
    }
    if (!minus_neg) {
      minus_negative_everywhere = false;
      ss << "(D-g)/2 min=" << min_minus << " at ratio=" << ratio << " ";
    }
  }
  report(11, minus_negative_everywhere && plus_contained,
         ss.str().empty() ? "negative oscillations as expected" : ss.str());
}

}  // namespace

int main() {
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  if (failures > 0) {
    std::cout << failures << " criteria failed" << std::endl;
    return 1;
  }
  std::cout << "all criteria passed" << std::endl;
  return 0;
}
