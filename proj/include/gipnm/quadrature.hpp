#pragma once

#include <functional>
#include <span>
#include <vector>

// Adaptive one-dimensional quadrature (Gauss-Kronrod 7/15 pairs with
// interval bisection) and positive-part interval integration on grids.

namespace gipnm {

struct QuadResult {
  double value = 0.0;
  double err_estimate = 0.0;
  long evaluations = 0;
};

// Integrates f over [lo, hi] to absolute tolerance tol. Supplied breakpoints
// inside the interval force subdivision there (piecewise integrands).
// Throws NumericalError (message carries the best estimate) if the maximum
// bisection depth is exhausted before the tolerance is met.
QuadResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                              double tol, std::span<const double> breakpoints = {},
                              int max_depth = 48);

// Truncated-tail scheme for integrals over [lo, infinity) of integrands
// decaying on the given scale: integrates [lo, lo + mult * scale].
QuadResult integrate_truncated_tail(const std::function<double(double)>& f, double lo,
                                    double scale, double tol, double mult = 40.0);

// One maximal interval where a sampled function is positive, with the
// integral of the function over that interval.
struct SignedInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  double integral = 0.0;
};

using SignedIntervals = std::vector<SignedInterval>;

// Locates the maximal positivity intervals of g from its samples on a
// strictly increasing grid; sign-change roots are refined by bisection on
// `refine` (a pointwise evaluator of g) to t-tolerance t_tol, and the
// per-interval integrals are evaluated adaptively from `refine`.
SignedIntervals positive_part_integral(std::span<const double> times,
                                       std::span<const double> values,
                                       const std::function<double(double)>& refine,
                                       double t_tol = 1e-8, double int_tol = 1e-10);

// Root location only (shared with callers that integrate by other means).
double refine_sign_change(const std::function<double(double)>& g, double lo, double hi,
                          double t_tol);

}  // namespace gipnm
