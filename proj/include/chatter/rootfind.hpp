#pragma once

#include <functional>

namespace chatter {

using ScalarFn = std::function<double(double)>;

struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  double f_lo = 0.0;
  double f_hi = 0.0;
};

/// Evaluates f at both ends. Throws NoSignChange unless the values are
/// finite, nonzero and of opposite sign.
Bracket make_bracket(const ScalarFn& f, double lo, double hi);

/// Shrinks [lo, hi] inward by 1e-9*2pi at each end, for functions that
/// diverge at multiples of 2pi.
Bracket inset_bracket(const ScalarFn& f, double lo, double hi);

/// Bracketed root by TOMS 748 (inverse cubic/quadratic with bisection
/// safeguard). Stops once |f| <= tol_f or the bracket is narrower than tol_x.
/// tol_x <= 0 selects 1e-12*max(1,|hi|).
double solve_bracketed(const ScalarFn& f, const Bracket& bracket, double tol_x = -1.0,
                       double tol_f = 1e-12, int max_iter = 200);

/// Newton iteration with a finite-difference slope, falling back to a secant
/// step when the slope is unusable. Throws Diverged if an iterate leaves
/// [guard_lo, guard_hi]; a default guard of seed +- max(1,|seed|) is used
/// when guard_lo >= guard_hi.
double refine_open(const ScalarFn& f, double seed, double tol = 1e-12, double guard_lo = 0.0,
                   double guard_hi = 0.0, int max_iter = 100);

}  // namespace chatter
