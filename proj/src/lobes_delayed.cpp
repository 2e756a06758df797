#include "chatter/lobes_delayed.hpp"

#include <boost/math/tools/minima.hpp>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "chatter/errors.hpp"
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

double tilde_fn(double b, double q) {
  return 2.0 * q * std::cos(b) * one_minus_cos(b) + b * std::sin(b);
}

void require_xi_ne_2q(double xi, double q) {
  if (std::abs(xi - 2.0 * q) <= 1e-12 * std::max(1.0, 2.0 * q)) {
    throw UnsupportedParameters("xi == 2q is excluded from the boundary analysis");
  }
}

void require_positive(double xi, double q, int n) {
  if (!(xi > 0.0) || !(q > 0.0)) throw DomainError("xi and q must be positive");
  if (n < 1) throw DomainError("lobe index n must be >= 1");
}

}  // namespace

double beta_star(double xi, int n) {
  if (!(xi > 0.0)) throw DomainError("xi must be positive");
  if (n < 1) throw DomainError("lobe index n must be >= 1");
  auto f = [xi](double b) { return xi * one_minus_cos(b) + b * std::sin(b); };
  return solve_bracketed(f, inset_bracket(f, (2 * n - 1) * kPi, 2 * n * kPi));
}

double q_threshold(int n) {
  if (n < 1) throw DomainError("lobe index n must be >= 1");
  const double s5 = std::sqrt(5.0);
  const double beta1 = 2 * n * kPi - std::acos((s5 - 1.0) / 2.0);
  return beta1 * std::sqrt(2.0 * s5 - 2.0) / (4.0 * s5 - 8.0);
}

std::vector<double> tilde_betas(double q, int n) {
  if (!(q > 0.0)) throw DomainError("q must be positive");
  if (n < 1) throw DomainError("lobe index n must be >= 1");
  auto f = [q](double b) { return tilde_fn(b, q); };

  std::vector<double> out;
  out.push_back(solve_bracketed(f, make_bracket(f, (2 * n - 1.5) * kPi, (2 * n - 1) * kPi)));

  // On ((2n-1/2)pi, 2n pi) the function is negative at both ends and has a
  // single interior hump; its height decides between zero and two roots.
  const double lo = (2 * n - 0.5) * kPi;
  const double hi = 2 * n * kPi;
  double best = lo;
  double best_val = f(lo);
  constexpr int kScan = 512;
  for (int i = 1; i < kScan; ++i) {
    const double b = lo + (hi - lo) * i / kScan;
    if (const double v = f(b); v > best_val) {
      best_val = v;
      best = b;
    }
  }
  const double cell = (hi - lo) / kScan;
  const auto [peak, neg_val] = boost::math::tools::brent_find_minima(
      [&](double b) { return -f(b); }, std::max(lo, best - cell), std::min(hi, best + cell), 52);
  const double peak_val = -neg_val;

  // d/dq of the hump height is 2 cos(1 - cos) at the peak; a height within
  // 1e-8 q of that slope means q is within 1e-8 relative of the onset.
  const double dq = std::abs(2.0 * std::cos(peak) * one_minus_cos(peak));
  if (std::abs(peak_val) <= 1e-8 * q * dq) {
    throw DegenerateTangency("q is at the onset of the three-zero regime; zeros merge at beta=" +
                             std::to_string(peak));
  }
  if (peak_val > 0.0) {
    out.push_back(solve_bracketed(f, make_bracket(f, lo, peak)));
    out.push_back(solve_bracketed(f, inset_bracket(f, peak, hi)));
  }
  return out;
}

DelayedLobeZeros delayed_zeros(double xi, double q, int n) {
  DelayedLobeZeros z;
  z.n = n;
  z.beta_star = beta_star(xi, n);
  z.beta1 = 2 * n * kPi - std::acos((std::sqrt(5.0) - 1.0) / 2.0);
  z.q_threshold = q_threshold(n);
  z.tilde_betas = tilde_betas(q, n);
  return z;
}

HDelta h1_delta_of_beta(double beta, double xi, double q) {
  const double omc = one_minus_cos(beta);
  const double c = std::cos(beta);
  const double s = std::sin(beta);
  const double den_h = xi * beta * omc + beta * beta * s;
  const double den_d = 2.0 * q * c * omc + beta * s;
  if (is_pole(den_h, beta, 3) || is_pole(den_d, beta, 2)) throw PoleAt(beta);
  HDelta out;
  out.h = (q * beta * omc * (1.0 + 2.0 * c) - xi * beta + q * xi * s * (1.0 - 2.0 * c)) / den_h;
  out.delta = beta * den_h / den_d;
  return out;
}

DelayedPositivity delayed_positivity(double xi, double q, int n) {
  require_positive(xi, q, n);
  require_xi_ne_2q(xi, q);
  const double bs = beta_star(xi, n);
  const auto tb = tilde_betas(q, n);
  const double left = 2 * (n - 1) * kPi;
  const double right = 2 * n * kPi;

  DelayedPositivity out;
  out.intervals.push_back({left, tb[0]});
  if (tb.size() == 1) {
    out.which = DelayedCase::SingleTilde;
    out.intervals.push_back({bs, right});
    return out;
  }
  if (bs <= tb[1]) {
    out.which = DelayedCase::StarBelowSecond;
    out.intervals.push_back({bs, tb[1]});
    out.intervals.push_back({tb[2], right});
  } else if (bs <= tb[2]) {
    out.which = DelayedCase::StarBetween;
    out.intervals.push_back({tb[1], bs});
    out.intervals.push_back({tb[2], right});
  } else {
    out.which = DelayedCase::StarAboveThird;
    out.intervals.push_back({tb[1], tb[2]});
    out.intervals.push_back({bs, right});
  }
  return out;
}

std::vector<Interval> positive_delta_intervals(double xi, double q, int n) {
  return delayed_positivity(xi, q, n).intervals;
}

BetaBounds beta_bounds_delayed(double h1, double delta, double xi, double q) {
  if (!(xi > 0.0) || !(q > 0.0) || !(delta > 0.0)) {
    throw DomainError("xi, q and delta must be positive");
  }
  const double a = std::abs(h1);
  // Imaginary part: xi b <= delta |h1| + 9 delta q / (8 b).
  const double b1 = (delta * a + std::sqrt(delta * delta * a * a + 4.5 * xi * delta * q)) / (2.0 * xi);
  // Modulus: b^2 - delta <= 2 delta (|h1| + q / b), largest root of the cubic.
  const double A = delta * (1.0 + 2.0 * a);
  const double B = 2.0 * delta * q;
  double b2;
  if (4.0 * A * A * A > 27.0 * B * B) {
    b2 = 2.0 * std::sqrt(A / 3.0) *
         std::cos(std::acos(std::min(1.0, 1.5 * B / A * std::sqrt(3.0 / A))) / 3.0);
  } else {
    const double s = std::sqrt(0.25 * B * B - A * A * A / 27.0);
    b2 = std::cbrt(0.5 * B + s) + std::cbrt(0.5 * B - s);
  }
  BetaBounds b;
  b.upper = std::min(b1 * b1, b2 * b2);
  return b;
}

double frequency_estimate(double beta) {
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  return beta / (2.0 * kPi);
}

std::vector<BoundaryBranch> sample_branches_delayed(double xi, double q, int n, int samples) {
  std::vector<BoundaryBranch> out;
  for (const auto& iv : positive_delta_intervals(xi, q, n)) {
    BoundaryBranch br;
    br.variant = Variant::Delayed;
    br.n = n;
    br.beta_interval = iv;
    for (const double b : clustered_grid(iv, samples)) {
      const auto hd = h1_delta_of_beta(b, xi, q);
      br.points.push_back({b, hd.delta, hd.h});
    }
    out.push_back(std::move(br));
  }
  return out;
}

}  // namespace chatter
