#include "gipnm/quadrature.hpp"

#include "gipnm/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gipnm {
namespace {

// Gauss-Kronrod 7/15 pair on [-1, 1] (QUADPACK qk15 constants).
constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

constexpr double kKronrodW[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

constexpr double kGaussW[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double kronrod;
  double err;
};

Panel gk15(const std::function<double(double)>& f, double lo, double hi, long& evals) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (lo + hi);
  double resk = 0.0;
  double resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double x = half * kNodes[i];
    double fsum;
    if (i == 7) {
      fsum = f(mid);
      ++evals;
    } else {
      fsum = f(mid - x) + f(mid + x);
      evals += 2;
    }
    resk += kKronrodW[i] * fsum;
    if (i % 2 == 1) {  // Gauss subset: nodes 1, 3, 5 and the midpoint (7)
      resg += kGaussW[i / 2] * fsum;
    }
  }
  return {resk * half, std::abs(resk - resg) * half};
}

void adapt(const std::function<double(double)>& f, double lo, double hi, double tol,
           int depth, int max_depth, QuadResult& out) {
  const Panel p = gk15(f, lo, hi, out.evaluations);
  if (p.err <= tol || hi - lo < 1e-15 * std::max(1.0, std::abs(lo))) {
    out.value += p.kronrod;
    out.err_estimate += p.err;
    return;
  }
  if (depth >= max_depth) {
    throw NumericalError("integrate_adaptive: max depth exceeded, best estimate " +
                         std::to_string(out.value + p.kronrod) + " with panel error " +
                         std::to_string(p.err));
  }
  const double mid = 0.5 * (lo + hi);
  // floor the per-child tolerance: halving below ~machine noise would force
  // max-depth failures on integrands with rounding-level jitter
  const double child_tol = std::max(0.5 * tol, 1e-16);
  adapt(f, lo, mid, child_tol, depth + 1, max_depth, out);
  adapt(f, mid, hi, child_tol, depth + 1, max_depth, out);
}

}  // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                              double tol, std::span<const double> breakpoints, int max_depth) {
  if (lo > hi) {
    throw ValidationError("integrate_adaptive: lo > hi");
  }
  QuadResult out;
  if (lo == hi) {
    return out;
  }
  std::vector<double> edges{lo};
  for (double b : breakpoints) {
    if (b > lo && b < hi) {
      edges.push_back(b);
    }
  }
  edges.push_back(hi);
  std::sort(edges.begin(), edges.end());
  const double total = hi - lo;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double seg_tol = tol * std::max((edges[i + 1] - edges[i]) / total, 1e-3);
    adapt(f, edges[i], edges[i + 1], seg_tol, 0, max_depth, out);
  }
  return out;
}

QuadResult integrate_truncated_tail(const std::function<double(double)>& f, double lo,
                                    double scale, double tol, double mult) {
  return integrate_adaptive(f, lo, lo + mult * scale, tol);
}

double refine_sign_change(const std::function<double(double)>& g, double lo, double hi,
                          double t_tol) {
  double glo = g(lo);
  if (glo == 0.0) {
    return lo;
  }
  while (hi - lo > t_tol) {
    const double mid = 0.5 * (lo + hi);
    const double gmid = g(mid);
    if ((gmid > 0.0) == (glo > 0.0)) {
      lo = mid;
      glo = gmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

SignedIntervals positive_part_integral(std::span<const double> times,
                                       std::span<const double> values,
                                       const std::function<double(double)>& refine,
                                       double t_tol, double int_tol) {
  if (times.size() != values.size() || times.size() < 2) {
    throw ValidationError("positive_part_integral: need matching grids with >= 2 samples");
  }
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    if (times[i + 1] <= times[i]) {
      throw ValidationError("positive_part_integral: grid must be strictly increasing");
    }
  }
  SignedIntervals out;
  const std::size_t n = times.size();
  std::size_t i = 0;
  while (i < n) {
    if (values[i] <= 0.0) {
      ++i;
      continue;
    }
    // entry edge
    double t0 = times[i];
    if (i > 0) {
      t0 = refine_sign_change(refine, times[i - 1], times[i], t_tol);
    }
    std::size_t j = i;
    while (j + 1 < n && values[j + 1] > 0.0) {
      ++j;
    }
    double t1 = times[j];
    if (j + 1 < n) {
      t1 = refine_sign_change(refine, times[j], times[j + 1], t_tol);
    }
    SignedInterval iv;
    iv.t_start = t0;
    iv.t_end = t1;
    if (t1 > t0) {
      iv.integral = integrate_adaptive(refine, t0, t1, int_tol).value;
    }
    if (iv.integral > 0.0) {
      out.push_back(iv);
    }
    i = j + 1;
  }
  return out;
}

}  // namespace gipnm
