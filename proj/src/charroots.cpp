#include "chatter/charroots.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <string>

#include "chatter/errors.hpp"
#include "chatter/lobes_delayed.hpp"
#include "chatter/lobes_instant.hpp"

namespace chatter {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = 1e-7;          // left edge of the counting contour
constexpr double kMinAbs = 1e-9;       // contour guard on |H|
constexpr double kMaxStep = 0.25;      // initial contour subdivision
constexpr double kMaxPhase = kPi / 4;  // accepted phase increment per piece
constexpr int kMaxDepth = 50;
constexpr double kSeriesRadius = 1e-3;

// (1 - e^-l)/l and its derivative, by series near the origin.
cplx phi(cplx l) {
  if (std::abs(l) < kSeriesRadius) {
    cplx term = 1.0;
    cplx sum = 1.0;
    for (int k = 1; k <= 8; ++k) {
      term *= -l / static_cast<double>(k + 1);
      sum += term;
    }
    return sum;
  }
  return (1.0 - std::exp(-l)) / l;
}

cplx phi_prime(cplx l) {
  if (std::abs(l) < kSeriesRadius) {
    // sum_{k>=1} k (-1)^k l^(k-1) / (k+1)!
    cplx pw = 1.0;
    double fact = 2.0;
    cplx sum = 0.0;
    for (int k = 1; k <= 8; ++k) {
      sum += (k % 2 ? -1.0 : 1.0) * static_cast<double>(k) * pw / fact;
      pw *= l;
      fact *= static_cast<double>(k + 2);
    }
    return sum;
  }
  return (std::exp(-l) * (1.0 + l) - 1.0) / (l * l);
}

double arg_ratio(cplx b, cplx a) { return std::arg(b / a); }

class PhaseTracker {
 public:
  explicit PhaseTracker(const CharParams& p) : p_(p) {}

  double edge(cplx a, cplx b) {
    const int pieces = std::max(16, static_cast<int>(std::ceil(std::abs(b - a) / kMaxStep)));
    double total = 0.0;
    cplx za = a;
    cplx ha = value(za);
    for (int i = 1; i <= pieces; ++i) {
      const cplx zb = a + (b - a) * (static_cast<double>(i) / pieces);
      const cplx hb = value(zb);
      total += piece(za, zb, ha, hb, 0);
      za = zb;
      ha = hb;
    }
    return total;
  }

 private:
  cplx value(cplx z) {
    const cplx v = eval_reduced(z, p_);
    if (!(std::abs(v) >= kMinAbs) || !std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw ContourTooClose("characteristic function nearly vanishes on the contour at " +
                            std::to_string(z.real()) + (z.imag() < 0 ? "" : "+") +
                            std::to_string(z.imag()) + "i; perturb the parameters");
    }
    return v;
  }

  double piece(cplx za, cplx zb, cplx ha, cplx hb, int depth) {
    const double d = arg_ratio(hb, ha);
    const cplx zm = 0.5 * (za + zb);
    const cplx hm = value(zm);
    if (std::abs(d) <= kMaxPhase) {
      const double d1 = arg_ratio(hm, ha);
      const double d2 = arg_ratio(hb, hm);
      if (std::abs(d1 + d2 - d) < 1e-6) return d;
    }
    if (depth >= kMaxDepth) {
      throw ContourTooClose("phase of the characteristic function unresolved on the contour; "
                            "perturb the parameters");
    }
    return piece(za, zm, ha, hm, depth + 1) + piece(zm, zb, hm, hb, depth + 1);
  }

  const CharParams& p_;
};

struct Box {
  double re_lo, re_hi, im_lo, im_hi;
};

int count_box(const CharParams& p, const Box& b) {
  PhaseTracker t(p);
  const cplx c0(b.re_lo, b.im_lo), c1(b.re_hi, b.im_lo), c2(b.re_hi, b.im_hi),
      c3(b.re_lo, b.im_hi);
  const double total = t.edge(c0, c1) + t.edge(c1, c2) + t.edge(c2, c3) + t.edge(c3, c0);
  const double w = total / (2.0 * kPi);
  const double r = std::round(w);
  if (std::abs(w - r) > 0.05 || r < 0) {
    throw ContourTooClose("winding number not an integer (" + std::to_string(w) + ")");
  }
  return static_cast<int>(r);
}

bool inside(cplx z, const Box& b, double slack) {
  return z.real() >= b.re_lo - slack && z.real() <= b.re_hi + slack &&
         z.imag() >= b.im_lo - slack && z.imag() <= b.im_hi + slack;
}

// Split fractions tried in turn when a cut runs through a root.
constexpr std::array<double, 6> kSplits{0.5, 0.4637, 0.5391, 0.4171, 0.5813, 0.3529};

void search(const CharParams& p, const Box& b, int count, std::vector<cplx>& out, int depth) {
  if (count <= 0) return;
  const double w = b.re_hi - b.re_lo;
  const double hgt = b.im_hi - b.im_lo;
  const double size = std::max(w, hgt);
  const cplx center(0.5 * (b.re_lo + b.re_hi), 0.5 * (b.im_lo + b.im_hi));

  if (count == 1 || size < 1e-7 || depth > 80) {
    try {
      const cplx r = refine_root(center, p);
      if (inside(r, b, 1e-9 * std::max(1.0, std::abs(r)))) {
        for (int i = 0; i < count; ++i) out.push_back(r);
        return;
      }
    } catch (const ChatterError&) {
    }
    if (size < 1e-7 || depth > 80) {
      for (int i = 0; i < count; ++i) out.push_back(center);
      return;
    }
  }

  const bool cut_re = w >= hgt;
  for (const double f : kSplits) {
    Box lo = b, hi = b;
    if (cut_re) {
      lo.re_hi = hi.re_lo = b.re_lo + f * w;
    } else {
      lo.im_hi = hi.im_lo = b.im_lo + f * hgt;
    }
    try {
      const int n_lo = count_box(p, lo);
      const int n_hi = count_box(p, hi);
      if (n_lo + n_hi != count) continue;
      search(p, lo, n_lo, out, depth + 1);
      search(p, hi, n_hi, out, depth + 1);
      return;
    } catch (const ContourTooClose&) {
      continue;
    }
  }
  throw ContourTooClose("could not isolate roots; perturb the parameters");
}

}  // namespace

void validate(const CharParams& p) {
  if (!(p.xi > 0.0) || !(p.delta > 0.0) || !(p.q > 0.0)) {
    throw DomainError("xi, delta and q must be positive");
  }
  if (!std::isfinite(p.xi) || !std::isfinite(p.delta) || !std::isfinite(p.q) ||
      !std::isfinite(p.h) || !std::isfinite(p.coupling)) {
    throw DomainError("characteristic parameters must be finite");
  }
}

cplx eval_char(cplx l, const CharParams& p) {
  const cplx P = l * l + p.xi * l + p.delta;
  const cplx E = 1.0 - std::exp(-l);
  const cplx kern = p.variant == Variant::Delayed ? p.h + p.q / (l * std::exp(l)) : p.h + p.q / l;
  return P + p.coupling * p.delta * kern * E;
}

cplx eval_reduced(cplx l, const CharParams& p) {
  const cplx P = l * l + p.xi * l + p.delta;
  const double cd = p.coupling * p.delta;
  if (p.variant == Variant::Delayed) {
    const cplx el = std::exp(l);
    return el * P + cd * p.h * (el - 1.0) + cd * p.q * phi(l);
  }
  return P + cd * p.h * (1.0 - std::exp(-l)) + cd * p.q * phi(l);
}

cplx eval_reduced_derivative(cplx l, const CharParams& p) {
  const cplx P = l * l + p.xi * l + p.delta;
  const cplx dP = 2.0 * l + p.xi;
  const double cd = p.coupling * p.delta;
  if (p.variant == Variant::Delayed) {
    const cplx el = std::exp(l);
    return el * (P + dP) + cd * p.h * el + cd * p.q * phi_prime(l);
  }
  return dP + cd * p.h * std::exp(-l) + cd * p.q * phi_prime(l);
}

cplx eval_entire(cplx l, const CharParams& p) { return l * eval_reduced(l, p); }

double rhp_root_radius(const CharParams& p) {
  const double cd = std::abs(p.coupling) * p.delta;
  const double c0 = p.delta + 2.0 * cd * (std::abs(p.h) + p.q);
  return std::max(1.0, 0.5 * (p.xi + std::sqrt(p.xi * p.xi + 4.0 * c0)));
}

int count_unstable(const CharParams& p, double omega_max, double sigma_max) {
  validate(p);
  if (!(omega_max > 0.0) || !(sigma_max > kEps)) {
    throw DomainError("contour needs omega_max > 0 and sigma_max > 1e-7");
  }
  return count_box(p, {kEps, sigma_max, -omega_max, omega_max});
}

int count_in_box(const CharParams& p, double re_lo, double re_hi, double im_lo, double im_hi) {
  validate(p);
  if (!(re_lo < re_hi) || !(im_lo < im_hi)) throw DomainError("empty box");
  return count_box(p, {re_lo, re_hi, im_lo, im_hi});
}

cplx refine_root(cplx seed, const CharParams& p) {
  if (seed == cplx(0.0, 0.0)) throw DomainError("refine_root: seed must be nonzero");
  const double guard = 10.0 * (1.0 + std::abs(seed));
  cplx z = seed;
  for (int it = 0; it < 100; ++it) {
    const cplx h = eval_reduced(z, p);
    const cplx dh = eval_reduced_derivative(z, p);
    if (dh == cplx(0.0, 0.0) || !std::isfinite(std::abs(dh))) {
      throw Diverged("refine_root: vanishing derivative");
    }
    const cplx step = h / dh;
    z -= step;
    if (!std::isfinite(std::abs(z)) || std::abs(z - seed) > guard) {
      throw Diverged("refine_root: iterate left the guard region");
    }
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  const double tol = 1e-12 * (1.0 + std::pow(std::abs(z), 3));
  if (std::abs(z) < 1e-12) throw Diverged("refine_root: converged to the spurious zero at 0");
  if (!(std::abs(eval_entire(z, p)) < tol * std::max(1.0, p.delta))) {
    throw Diverged("refine_root: residual above tolerance");
  }
  return z;
}

std::vector<cplx> roots_in_box(const CharParams& p, double re_lo, double re_hi, double im_lo,
                               double im_hi) {
  validate(p);
  const Box b{re_lo, re_hi, im_lo, im_hi};
  std::vector<cplx> out;
  search(p, b, count_box(p, b), out, 0);
  std::sort(out.begin(), out.end(), [](cplx a, cplx c) {
    return a.real() != c.real() ? a.real() > c.real() : a.imag() > c.imag();
  });
  return out;
}

StabilityVerdict verdict(const CharParams& p) {
  validate(p);
  const double R = rhp_root_radius(p);
  double beta2_max = 0.0;
  if (p.variant == Variant::Delayed) {
    beta2_max = beta_bounds_delayed(p.h, p.delta, p.xi, p.q).upper;
  } else if (p.h > 0.0) {
    beta2_max = beta_bounds_instant(p.h, p.delta, p.xi, p.q).upper;
  }
  const double omega = std::max(2.0 * std::sqrt(beta2_max), R) + 1.0;
  const double sigma = std::max(5.0 * std::max(1.0, p.xi), R + 1.0);

  StabilityVerdict v;
  v.unstable_count = count_unstable(p, omega, sigma);

  // Locate roots near the axis on both sides; the box edges are offset by
  // irrational-looking amounts so they rarely meet a root.
  const double left = -std::max(1.0, p.xi);
  std::vector<cplx> roots;
  for (const double shift : {0.0, 0.0173, -0.0291}) {
    try {
      roots = roots_in_box(p, left - 0.0137 + shift, sigma, -omega - 0.0091 + shift,
                           omega + 0.0123 - shift);
      break;
    } catch (const ContourTooClose&) {
      if (shift == -0.0291) throw;
    }
  }
  v.margin = -left;
  for (const cplx& r : roots) v.margin = std::min(v.margin, std::abs(r.real()));
  if (!roots.empty()) v.rightmost_root = roots.front();
  v.stable = v.unstable_count == 0 && v.margin > 1e-9;
  return v;
}

}  // namespace chatter
