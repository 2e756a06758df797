#include "chatter/rootfind.hpp"

#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "chatter/errors.hpp"

namespace chatter {

namespace {

constexpr double kEndpointInset = 1e-9 * 2.0 * std::numbers::pi;

bool opposite(double a, double b) { return (a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0); }

}  // namespace

Bracket make_bracket(const ScalarFn& f, double lo, double hi) {
  if (!(lo < hi)) throw NoSignChange("bracket requires lo < hi");
  Bracket b{lo, hi, f(lo), f(hi)};
  if (!std::isfinite(b.f_lo) || !std::isfinite(b.f_hi) || !opposite(b.f_lo, b.f_hi)) {
    throw NoSignChange("no sign change on [" + std::to_string(lo) + ", " + std::to_string(hi) +
                       "]");
  }
  return b;
}

Bracket inset_bracket(const ScalarFn& f, double lo, double hi) {
  return make_bracket(f, lo + kEndpointInset, hi - kEndpointInset);
}

double solve_bracketed(const ScalarFn& f, const Bracket& bracket, double tol_x, double tol_f,
                       int max_iter) {
  if (!(bracket.lo < bracket.hi) || !std::isfinite(bracket.f_lo) ||
      !std::isfinite(bracket.f_hi) || !opposite(bracket.f_lo, bracket.f_hi)) {
    throw NoSignChange("invalid bracket");
  }
  if (tol_x <= 0.0) tol_x = 1e-12 * std::max(1.0, std::abs(bracket.hi));

  double best_x = std::abs(bracket.f_lo) < std::abs(bracket.f_hi) ? bracket.lo : bracket.hi;
  double best_f = std::min(std::abs(bracket.f_lo), std::abs(bracket.f_hi));
  auto tracked = [&](double x) {
    const double v = f(x);
    if (std::abs(v) < best_f) {
      best_f = std::abs(v);
      best_x = x;
    }
    return v;
  };
  auto done = [&](double a, double b) { return best_f <= tol_f || std::abs(b - a) <= tol_x; };

  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  const auto [a, b] = boost::math::tools::toms748_solve(tracked, bracket.lo, bracket.hi,
                                                        bracket.f_lo, bracket.f_hi, done, iters);
  if (best_f <= tol_f) return best_x;
  if (std::abs(b - a) <= tol_x) {
    // Midpoint of the final bracket; still inside the initial one.
    return 0.5 * (a + b);
  }
  throw MaxIterations("solve_bracketed: no convergence after " + std::to_string(max_iter) +
                      " iterations");
}

double refine_open(const ScalarFn& f, double seed, double tol, double guard_lo, double guard_hi,
                   int max_iter) {
  if (!(guard_lo < guard_hi)) {
    const double w = std::max(1.0, std::abs(seed));
    guard_lo = seed - w;
    guard_hi = seed + w;
  }
  double x = seed;
  double fx = f(x);
  double x_prev = std::numeric_limits<double>::quiet_NaN();
  double f_prev = std::numeric_limits<double>::quiet_NaN();
  for (int it = 0; it < max_iter; ++it) {
    if (!std::isfinite(fx)) throw Diverged("refine_open: non-finite residual");
    if (std::abs(fx) <= tol) return x;

    const double hstep = 1e-7 * std::max(1.0, std::abs(x));
    double slope = (f(x + hstep) - f(x - hstep)) / (2.0 * hstep);
    if (!std::isfinite(slope) || slope == 0.0) {
      if (std::isnan(x_prev) || x == x_prev || fx == f_prev) {
        throw Diverged("refine_open: flat residual");
      }
      slope = (fx - f_prev) / (x - x_prev);
    }
    x_prev = x;
    f_prev = fx;
    x -= fx / slope;
    if (!(x >= guard_lo && x <= guard_hi)) {
      throw Diverged("refine_open: iterate left guard interval");
    }
    fx = f(x);
    // Converged in x but residual floor above tol: accept when no further
    // progress is representable.
    if (std::abs(x - x_prev) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(x) &&
        std::abs(fx) <= std::max(tol, 1e3 * std::numeric_limits<double>::epsilon())) {
      return x;
    }
  }
  if (std::abs(fx) <= tol) return x;
  throw MaxIterations("refine_open: no convergence");
}

}  // namespace chatter
