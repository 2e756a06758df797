#include "chatter/lobes_instant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "chatter/errors.hpp"
#include "chatter/lobes_delayed.hpp"
#include "chatter/rootfind.hpp"

namespace chatter {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kPoleTol = 1e-13;

// Both denominators vanish like a power of beta at the origin (cubic and
// quadratic), so the tolerance shrinks with beta there.
bool is_pole(double den, double beta, int order) {
  const double scale = std::min(1.0, std::pow(std::abs(beta), order));
  return !(std::abs(den) > kPoleTol * scale);
}

double one_minus_cos(double b) {
  const double s = std::sin(0.5 * b);
  return 2.0 * s * s;
}

void check_args(double xi, double q, int n) {
  if (!(xi > 0.0) || !(q > 0.0)) throw DomainError("xi and q must be positive");
  if (n < 1) throw DomainError("lobe index n must be >= 1");
  if (std::abs(xi - 2.0 * q) <= 1e-12 * std::max(1.0, 2.0 * q)) {
    throw UnsupportedParameters("xi == 2q is excluded from the boundary analysis");
  }
}

// b cot(b/2), written with sin/cos of the full angle to stay accurate near
// multiples of 2pi: cot(b/2) = sin b / (1 - cos b).
double f_cot(double b) { return b * std::sin(b) / one_minus_cos(b); }

// Root of g on [lo, hi] accepting an exact zero at either end.
double root_on(const ScalarFn& g, double lo, double hi) {
  const double glo = g(lo);
  const double ghi = g(hi);
  if (glo == 0.0) return lo;
  if (ghi == 0.0) return hi;
  return solve_bracketed(g, make_bracket(g, lo, hi));
}

}  // namespace

double tilde_beta_instant(double q, int n) {
  if (!(q > 0.0)) throw DomainError("q must be positive");
  if (n < 1) throw DomainError("lobe index n must be >= 1");
  auto f = [q](double b) { return 2.0 * q * one_minus_cos(b) + b * std::sin(b); };
  return solve_bracketed(f, inset_bracket(f, (2 * n - 1) * kPi, 2 * n * kPi));
}

double bar_beta(double q, int n) {
  if (!(q > 0.0)) throw DomainError("q must be positive");
  if (n < 1) throw DomainError("lobe index n must be >= 1");
  auto f = [q](double b) { return f_cot(b) + q; };
  return solve_bracketed(f, inset_bracket(f, (2 * n - 1) * kPi, 2 * n * kPi));
}

double instant_window(double xi, double q) {
  if (!(xi > 2.0 * q)) throw DomainError("window defined only for xi > 2q");
  return q * std::sqrt(xi / (xi - 2.0 * q));
}

int instant_n0(double xi, double q) {
  const double w = instant_window(xi, q);
  int n = static_cast<int>(std::ceil(w / (2.0 * kPi)));
  if (n < 1) n = 1;
  while (2.0 * n * kPi < w) ++n;
  while (n > 1 && 2.0 * (n - 1) * kPi >= w) --n;
  return n;
}

HDelta h2_delta_of_beta(double beta, double xi, double q) {
  const double omc = one_minus_cos(beta);
  const double s = std::sin(beta);
  const double den_h = xi * beta * omc + beta * beta * s;
  const double den_d = 2.0 * q * omc + beta * s;
  if (is_pole(den_h, beta, 3) || is_pole(den_d, beta, 2)) throw PoleAt(beta);
  HDelta out;
  out.h = (q * beta * omc - xi * beta - q * xi * s) / den_h;
  out.delta = beta * den_h / den_d;
  return out;
}

InstantLobeZeros h2_zeros(double xi, double q, int n) {
  check_args(xi, q, n);
  InstantLobeZeros z;
  z.n = n;
  z.beta_star = beta_star(xi, n);
  z.tilde_beta = tilde_beta_instant(q, n);
  const double left = 2 * (n - 1) * kPi;
  const double right = 2 * n * kPi;
  const double slope = 2.0 * q / xi - 1.0;
  // The two branches of b cot(b/2) = -q +- sqrt(q^2 + b^2 (2q/xi - 1)).
  auto root_term = [q, slope](double b) { return std::sqrt(std::max(0.0, q * q + b * b * slope)); };
  auto upper = [&](double b) { return f_cot(b) - (-q + root_term(b)); };
  auto lower = [&](double b) { return f_cot(b) - (-q - root_term(b)); };

  if (xi < 2.0 * q) {
    z.which = InstantCase::SmallDamping;
    z.gamma_star = solve_bracketed(upper, inset_bracket(upper, left, right));
    z.gamma_tilde = solve_bracketed(lower, inset_bracket(lower, left, right));
    return z;
  }

  const double w = instant_window(xi, q);
  z.window = w;
  z.n0 = instant_n0(xi, q);
  z.bar_beta = bar_beta(q, n);
  if (n > *z.n0) {
    z.which = InstantCase::BeyondN0;
  } else if (w <= (2 * n - 1) * kPi) {
    z.which = InstantCase::WindowBelow;
  } else if (*z.bar_beta > w) {
    z.which = InstantCase::BarAboveWindow;
  } else {
    z.which = InstantCase::ZerosInWindow;
    const double lo = (2 * n - 1) * kPi;
    const double hi = std::min(w, right - 1e-9 * 2.0 * kPi);
    z.gamma_star = root_on(upper, lo, hi);
    z.gamma_tilde = root_on(lower, lo, hi);
  }
  return z;
}

std::vector<Interval> positive_pair_intervals_instant(double xi, double q, int n) {
  const auto z = h2_zeros(xi, q, n);
  const double right = 2 * n * kPi;
  std::vector<Interval> out;
  if (z.which == InstantCase::SmallDamping) {
    out.push_back({*z.gamma_star, z.beta_star});
    out.push_back({*z.gamma_tilde, right});
    return out;
  }
  if (z.which == InstantCase::ZerosInWindow && *z.gamma_star < *z.gamma_tilde) {
    out.push_back({*z.gamma_star, *z.gamma_tilde});
  }
  out.push_back({z.beta_star, right});
  return out;
}

BetaBounds beta_bounds_instant(double h2, double delta, double xi, double q) {
  if (!(h2 > 0.0) || !(delta > 0.0)) throw DomainError("h2 and delta must be positive");
  BetaBounds b;
  b.lower = std::max(0.0, delta - q * xi / h2);
  const double t = delta * h2 + 2.0 * delta * h2 * h2 - xi * q;
  b.upper = (t + std::sqrt(t * t + 8.0 * delta * h2 * q * q)) / (2.0 * h2);
  return b;
}

std::vector<BoundaryBranch> sample_branches_instant(double xi, double q, int n, int samples) {
  std::vector<BoundaryBranch> out;
  for (const auto& iv : positive_pair_intervals_instant(xi, q, n)) {
    BoundaryBranch br;
    br.variant = Variant::Instant;
    br.n = n;
    br.beta_interval = iv;
    for (const double b : clustered_grid(iv, samples)) {
      const auto hd = h2_delta_of_beta(b, xi, q);
      br.points.push_back({b, hd.delta, hd.h});
    }
    out.push_back(std::move(br));
  }
  return out;
}

}  // namespace chatter
