// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "chatter/charroots.hpp"
#include "chatter/errors.hpp"
#include "chatter/lobes_delayed.hpp"
#include "chatter/lobes_instant.hpp"
#include "chatter/params.hpp"
#include "chatter/simulate.hpp"

using namespace chatter;

namespace {

constexpr double kPi = std::numbers::pi;

struct Preset {
  const char* name;
  Variant variant;
  double xi, q;
  double delta_max, h_min, h_max;  // figure axes
};

constexpr Preset kPresets[] = {
    {"fig4", Variant::Delayed, 0.2, 12.0, 42, -5, 20},
    {"fig6", Variant::Delayed, 0.2, 0.8, 41, -1, 20},
    {"fig7", Variant::Instant, 0.2, 0.8, 42, -1, 10},
    {"fig8", Variant::Instant, 1.62, 0.8, 360, -0.1, 1.5},
};

std::vector<BoundaryBranch> branches(const Preset& p, int n, int samples) {
  return p.variant == Variant::Delayed ? sample_branches_delayed(p.xi, p.q, n, samples)
                                       : sample_branches_instant(p.xi, p.q, n, samples);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s %d %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

void zero_regression() {
  const auto t0 = std::chrono::steady_clock::now();
  struct Item {
    std::function<double()> value;
    double expected, tol;
  };
  const std::vector<Item> items = {
      {[] { return beta_star(0.2, 1); }, 3.26398905, 1e-6},
      {[] { return beta_star(1.62, 1); }, 3.92455245, 1e-6},
      {[] { return beta_star(1.62, 2); }, 9.75394647, 1e-6},
      {[] { return tilde_betas(12, 1).at(0); }, 1.634732310091, 1e-6},
      {[] { return tilde_betas(12, 1).at(1); }, 4.99223679, 1e-6},
      {[] { return tilde_betas(12, 1).at(2); }, 5.73783731, 1e-6},
      {[] { return tilde_betas(0.8, 1).at(0); }, 2.28275758, 1e-6},
      {[] { return tilde_beta_instant(0.8, 1); }, 3.91714943, 1e-6},
      {[] { return *h2_zeros(0.2, 0.8, 1).gamma_star; }, 0.95335728, 1e-6},
      {[] { return *h2_zeros(0.2, 0.8, 1).gamma_tilde; }, 5.59545581, 1e-6},
      {[] { return bar_beta(0.8, 1); }, 3.581158, 1e-5},
      {[] { return bar_beta(0.8, 2); }, 9.591212, 1e-5},
      {[] { return instant_window(1.62, 0.8); }, 7.2, 1e-6},
      {[] { return static_cast<double>(instant_n0(1.62, 0.8)); }, 2.0, 0.0},
      {[] { return *h2_zeros(1.62, 0.8, 1).gamma_star; }, 3.19356076, 1e-6},
      {[] { return *h2_zeros(1.62, 0.8, 1).gamma_tilde; }, 3.86974862, 1e-6},
      {[] { return q_threshold(1); }, 8.955929, 1e-5},
  };
  bool ok = true;
  double worst = 0, slowest = 0;
  for (const auto& it : items) {
    const auto ti = std::chrono::steady_clock::now();
    double v = NAN;
    try {
      v = it.value();
    } catch (const ChatterError&) {
    }
    slowest = std::max(slowest, seconds_since(ti));
    const double err = std::abs(v - it.expected);
    ok = ok && err <= it.tol;
    worst = std::max(worst, std::isnan(err) ? INFINITY : err);
  }
  ok = ok && slowest < 1.0;
  report(1, ok,
         fmt("zero regression: 17 values, max |error| %.2e, slowest %.3f s, total %.3f s", worst,
             slowest, seconds_since(t0)));
}

void boundary_residual_check() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0, worst_abs = 0;
  long points = 0;
  for (const auto& p : kPresets) {
    for (int n = 1; n <= 3; ++n) {
      for (const auto& br : branches(p, n, 256)) {
        for (const auto& pt : br.points) {
          const HDelta hd{pt.h, pt.delta};
          worst = std::max(worst, boundary_residual(p.variant, pt.beta, p.xi, p.q, hd));
          worst_abs = std::max(worst_abs, boundary_residual_abs(p.variant, pt.beta, p.xi, p.q, hd));
          ++points;
        }
      }
    }
  }
  const double t = seconds_since(t0);
  report(2, worst < 1e-8 && worst_abs < 1e-8 && t < 5.0 && points > 0,
         fmt("boundary residual: %.0f points, max relative residual %.2e (max unscaled %.2e), ",
             static_cast<double>(points), worst, worst_abs) +
             fmt("%.3f s", t));
}

void positivity_check() {
  const auto t0 = std::chrono::steady_clock::now();
  long checked = 0, bad = 0;
  for (const auto& p : kPresets) {
    for (int n = 1; n <= 3; ++n) {
      std::vector<Interval> iv;
      std::vector<double> poles{beta_star(p.xi, n)};
      if (p.variant == Variant::Delayed) {
        iv = positive_delta_intervals(p.xi, p.q, n);
        for (double b : tilde_betas(p.q, n)) poles.push_back(b);
      } else {
        iv = positive_pair_intervals_instant(p.xi, p.q, n);
        poles.push_back(tilde_beta_instant(p.q, n));
      }
      for (const auto& v : iv) {
        poles.push_back(v.lo);
        poles.push_back(v.hi);
      }
      const double lo = 2 * (n - 1) * kPi, hi = 2 * n * kPi;
      for (int i = 1; i <= 1000; ++i) {
        const double b = lo + (hi - lo) * (i - 0.5) / 1000.0;
        if (std::any_of(poles.begin(), poles.end(),
                        [b](double x) { return std::abs(b - x) < 1e-6; })) {
          continue;
        }
        const HDelta hd = p.variant == Variant::Delayed ? h1_delta_of_beta(b, p.xi, p.q)
                                                        : h2_delta_of_beta(b, p.xi, p.q);
        const bool positive =
            p.variant == Variant::Delayed ? hd.delta > 0 : (hd.delta > 0 && hd.h > 0);
        const bool inside = std::any_of(iv.begin(), iv.end(),
                                        [b](const Interval& v) { return v.contains(b); });
        bad += positive != inside;
        ++checked;
      }
    }
  }
  report(3, bad == 0 && checked > 0,
         fmt("positivity intervals: %.0f sweep points, %.0f sign mismatches, %.3f s",
             static_cast<double>(checked), static_cast<double>(bad), seconds_since(t0)));
}

void spot_values() {
  double worst = 0;
  for (const auto& p : kPresets) {
    const double xi = p.xi, q = p.q;
    const auto d = h1_delta_of_beta(kPi, xi, q);
    const auto i = h2_delta_of_beta(kPi, xi, q);
    worst = std::max({worst, std::abs(d.h + (2 * q + xi) / (2 * xi)),
                      std::abs(d.delta + xi * kPi * kPi / (2 * q)),
                      std::abs(i.h - (2 * q - xi) / (2 * xi)),
                      std::abs(i.delta - xi * kPi * kPi / (2 * q))});
  }
  report(4, worst <= 1e-12, fmt("spot values at pi: max |error| %.2e", worst));
}

void origin_derivative() {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.05, 5.0), uh(-2.0, 2.0);
  double worst = 0;
  for (const Variant v : {Variant::Delayed, Variant::Instant}) {
    for (int i = 0; i < 10; ++i) {
      CharParams p{v, u(rng), u(rng), uh(rng), u(rng), 1.0};
      const double e = 1e-6;
      const cplx d = (eval_entire(e, p) - eval_entire(-e, p)) / (2 * e);
      const double want = p.delta * (p.q + 1);
      worst = std::max(worst, std::abs(d - want) / want);
    }
  }
  report(5, worst < 1e-6, fmt("origin derivative: 20 sets, max relative error %.2e", worst));
}

// Linear growth rate, with the run long enough to resolve the rate of the
// rightmost root.
double linear_rate(const CharParams& p, const StabilityVerdict& v) {
  const double scale = v.rightmost_root ? std::abs(v.rightmost_root->real()) : v.margin;
  LinearOptions opt;
  opt.renormalize = true;
  opt.eta_end = std::clamp(30.0 / scale, 300.0, 6000.0);
  opt.step = rhp_root_radius(p) > 30 ? 0.005 : 0.01;
  return integrate_linear(linearize(p), constant_history({1e-3, 1e-3, 0, 0}), opt).growth_rate;
}

void oracle_triangle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(7);
  int agree = 0, total = 0, stable = 0, crossings = 0, bad_crossings = 0;
  std::string detail;
  for (const auto& pr : kPresets) {
    // 20 points over the whole figure, 10 more from the corner at the
    // origin where the stable region lies.
    for (const double shrink : {1.0, 0.1}) {
      std::uniform_real_distribution<double> ud(0.0, pr.delta_max * shrink);
      std::uniform_real_distribution<double> uh(pr.h_min, pr.h_min + (pr.h_max - pr.h_min) * shrink);
      const int want = shrink == 1.0 ? 20 : 10;
      int taken = 0;
      for (int attempt = 0; taken < want && attempt < 400; ++attempt) {
        const double delta = ud(rng), h = uh(rng);
        if (delta <= 0) continue;
        CharParams p{pr.variant, pr.xi, delta, h, pr.q, 1.0};
        StabilityVerdict v;
        try {
          v = verdict(p);
        } catch (const ContourTooClose&) {
          continue;
        }
        if (!(v.margin > 1e-3)) continue;
        ++taken;
        ++total;
        stable += v.stable;
        const double rate = linear_rate(p, v);
        if ((rate < 0) == v.stable) {
          ++agree;
        } else if (detail.empty()) {
          detail = fmt(" (first disagreement at delta=%.6g h=%.6g, rate %.3e)", delta, h, rate);
        }
      }
    }
    // Transversal crossings of the sampled branches inside the figure.
    for (int n = 1; n <= 3; ++n) {
      for (const auto& br : branches(pr, n, 24)) {
        for (std::size_t i = 1; i + 1 < br.points.size(); ++i) {
          const auto& pt = br.points[i];
          if (pt.delta > pr.delta_max || pt.h < pr.h_min || pt.h > pr.h_max) continue;
          // Normal step in coordinates scaled to the figure axes.
          const double sx = pr.delta_max, sy = pr.h_max - pr.h_min;
          const double td = (br.points[i + 1].delta - br.points[i - 1].delta) / sx;
          const double th = (br.points[i + 1].h - br.points[i - 1].h) / sy;
          const double len = std::hypot(td, th);
          const double eps = 1e-5;
          const double nd = -th / len * eps * sx, nh = td / len * eps * sy;
          if (pt.delta - std::abs(nd) <= 0) continue;
          const CharParams a{pr.variant, pr.xi, pt.delta + nd, pt.h + nh, pr.q, 1.0};
          const CharParams b{pr.variant, pr.xi, pt.delta - nd, pt.h - nh, pr.q, 1.0};
          const double r = std::max(rhp_root_radius(a), rhp_root_radius(b)) + 1;
          try {
            const int d = count_unstable(a, r, r) - count_unstable(b, r, r);
            ++crossings;
            bad_crossings += std::abs(d) != 2;
          } catch (const ContourTooClose&) {
          }
        }
      }
    }
  }
  const double t = seconds_since(t0);
  const bool ok = total >= 120 && agree == total && crossings > 0 && bad_crossings == 0 && t < 60;
  report(6, ok,
         fmt("oracle triangle: verdict/simulation agree on %.0f of %.0f points (%.0f stable), ", agree,
                 total, stable) +
             fmt("%.0f of %.0f branch crossings change the count by 2, %.1f s",
                 crossings - bad_crossings, crossings, t) +
             detail);
}

void transform_check() {
  PhysicalParams sets[3];
  sets[0] = {1, 0.05, 0.05, 1, 1, 1, 1, 0.1, 0.75, 0.01, 0.05, 100};
  sets[1] = {1, 0.2, 0.2, 1, 1, 1, 1, 0.2, 0.75, 0.01, 0.05, 2 * kPi};
  sets[2] = {2, 0.3, 0.25, 1.5, 1.2, 0.8, 1.1, 0.15, 0.6, 0.02, 0.08, 3};
  double ws = 0, wd = 0;
  bool ok = true;
  for (const auto& ph : sets) {
    const auto st = stationary_state(ph, spindle_gain(ph));
    const auto d = compare_transform(ph, {1e-3 * st.r_star, 1e-3 * st.r_star, 0, 0}, 10.0,
                                     1.0 / 200, st.k_star / 200);
    ws = std::max(ws, d.state);
    wd = std::max(wd, d.delay);
    ok = ok && d.compared > 100;
  }
  ok = ok && ws < 1e-6 && wd < 1e-6;
  report(7, ok, fmt("transform: 3 parameter sets, max relative state gap %.2e, delay gap %.2e", ws,
                    wd));
}

void integrator_order() {
  const CharParams p{Variant::Delayed, 0.2, 0.005, 0.05, 12.0, 1.0};
  const auto sys = linearize(p);
  const auto h = constant_history({1, 0.5, 0, 0});
  const double steps[3] = {0.1, 0.05, 0.025};
  Vec4 end[3];
  for (int i = 0; i < 3; ++i) end[i] = integrate_linear(sys, h, 10.0, steps[i]).states.back();
  double n1 = 0, n2 = 0;
  for (int c = 0; c < 4; ++c) {
    n1 += std::pow(end[0][c] - end[1][c], 2);
    n2 += std::pow(end[1][c] - end[2][c], 2);
  }
  const double ratio = std::sqrt(n1 / n2);
  report(8, ratio >= 11 && ratio <= 21, fmt("integrator order: step-halving ratio %.3f", ratio));
}

}  // namespace

int main() {
  const std::vector<void (*)()> criteria{zero_regression, boundary_residual_check,
                                         positivity_check, spot_values,      origin_derivative,
                                         oracle_triangle, transform_check,  integrator_order};
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    try {
      criteria[i]();
    } catch (const std::exception& e) {
      report(static_cast<int>(i + 1), false, std::string("threw: ") + e.what());
    }
  }
  return failures == 0 ? 0 : 1;
}
