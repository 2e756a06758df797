#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "chatter/errors.hpp"
#include "chatter/lobes_delayed.hpp"
#include "chatter/lobes_instant.hpp"

using namespace chatter;

namespace {

constexpr double kPi = std::numbers::pi;

double cot_half(double b) { return 1.0 / std::tan(0.5 * b); }

}  // namespace

TEST_CASE("tilde beta") {
  const double t = tilde_beta_instant(0.8, 1);
  CHECK(std::abs(t - 3.91714943) < 1e-8);
  CHECK(beta_star(0.2, 1) < t);
  CHECK(std::abs(cot_half(t) - (-2 * 0.8 / t)) < 1e-9);
}

TEST_CASE("bar beta and window") {
  CHECK(std::abs(bar_beta(0.8, 1) - 3.581158) < 1e-6);
  CHECK(std::abs(bar_beta(0.8, 2) - 9.591212) < 1e-6);
  CHECK(std::abs(instant_window(1.62, 0.8) - 7.2) < 1e-12);
  CHECK(instant_n0(1.62, 0.8) == 2);
  CHECK_THROWS_AS(instant_window(1.0, 0.8), DomainError);
}

TEST_CASE("closed forms at pi") {
  for (double xi : {0.1, 0.2, 1.62, 3.0}) {
    for (double q : {0.5, 0.8, 12.0}) {
      const auto hd = h2_delta_of_beta(kPi, xi, q);
      CHECK(std::abs(hd.h - (2 * q - xi) / (2 * xi)) < 1e-12 * std::max(1.0, std::abs(hd.h)));
      CHECK(std::abs(hd.delta - xi * kPi * kPi / (2 * q)) < 1e-12);
    }
  }
}

TEST_CASE("boundary point at beta = 5") {
  const auto hd = h2_delta_of_beta(5.0, 0.2, 0.8);
  CHECK(std::abs(hd.h - -0.08680393813843074) < 1e-14);
  CHECK(std::abs(hd.delta - 31.871852807164749) < 1e-11);
  CHECK(boundary_residual_abs(Variant::Instant, 5.0, 0.2, 0.8, hd) < 1e-9);
}

TEST_CASE("property: evenness, residual and trigonometric consistency") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> ub(0.01, 40.0), ux(0.05, 3.0), uq(0.1, 5.0);
  for (int i = 0; i < 1000; ++i) {
    const double b = ub(rng), xi = ux(rng), q = uq(rng);
    HDelta a, m;
    try {
      a = h2_delta_of_beta(b, xi, q);
      m = h2_delta_of_beta(-b, xi, q);
    } catch (const PoleAt&) {
      continue;
    }
    CHECK(a.h == doctest::Approx(m.h).epsilon(1e-12));
    CHECK(a.delta == doctest::Approx(m.delta).epsilon(1e-12));
    CHECK(boundary_residual(Variant::Instant, b, xi, q, a) < 1e-12);
    // Real and imaginary parts of the characteristic equation at i b, solved
    // for (cos b, sin b): A c + B s = C, -B c + A s = D.
    const double d = a.delta, h = a.h;
    const double A = d * h, Bc = d * q / b;
    // F(ib) = d - b^2 + i xi b + d (h - i q/b)(1 - c + i s)
    //   real: d - b^2 + d h (1 - c) + d q s / b = 0
    //   imag: xi b + d h s - d q (1 - c) / b = 0
    // => A c - Bc s = d - b^2 + A,  Bc c + A s = -xi b + Bc
    const double det = A * A + Bc * Bc;
    const double c = (A * (d - b * b + A) + Bc * (-xi * b + Bc)) / det;
    const double s = (A * (-xi * b + Bc) - Bc * (d - b * b + A)) / det;
    CHECK(std::abs(c * c + s * s - 1.0) < 1e-10 * std::max(1.0, d * d));
  }
}

TEST_CASE("h2 zeros, small damping") {
  const auto z = h2_zeros(0.2, 0.8, 1);
  CHECK(z.which == InstantCase::SmallDamping);
  CHECK(std::abs(*z.gamma_star - 0.95335728) < 1e-8);
  CHECK(std::abs(*z.gamma_tilde - 5.59545581) < 1e-8);
  CHECK(*z.gamma_star < z.beta_star);
  CHECK(*z.gamma_tilde > z.tilde_beta);
  CHECK_FALSE(z.n0.has_value());
}

TEST_CASE("h2 zeros, large damping") {
  const auto z = h2_zeros(1.62, 0.8, 1);
  CHECK(z.which == InstantCase::ZerosInWindow);
  CHECK(std::abs(*z.gamma_star - 3.19356076) < 1e-8);
  CHECK(std::abs(*z.gamma_tilde - 3.86974862) < 1e-8);
  CHECK(*z.bar_beta <= *z.window);
  CHECK(*z.gamma_star < *z.gamma_tilde);
  CHECK(*z.gamma_tilde < z.tilde_beta);
  CHECK(z.tilde_beta < z.beta_star);

  const auto z2 = h2_zeros(1.62, 0.8, 2);
  CHECK(z2.which == InstantCase::WindowBelow);
  CHECK(*z2.bar_beta > 7.2);
  CHECK_FALSE(z2.gamma_star.has_value());
  CHECK(h2_zeros(1.62, 0.8, 3).which == InstantCase::BeyondN0);

  CHECK_THROWS_AS(h2_zeros(1.6, 0.8, 1), UnsupportedParameters);
}

TEST_CASE("property: zeros satisfy both forms of the h2 equation") {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> ux(0.05, 6.0), uq(0.1, 3.0);
  int found = 0;
  for (int i = 0; i < 400; ++i) {
    const double xi = ux(rng), q = uq(rng);
    if (std::abs(xi - 2 * q) < 1e-6) continue;
    const int n = 1 + static_cast<int>(rng() % 3);
    const auto z = h2_zeros(xi, q, n);
    // Ordering of beta* and beta~ follows the sign of 2q - xi.
    if (xi < 2 * q) {
      CHECK(z.beta_star < z.tilde_beta);
    } else {
      CHECK(z.tilde_beta < z.beta_star);
    }
    CHECK(z.beta_star > (2 * n - 1) * kPi);
    CHECK(z.tilde_beta < 2 * n * kPi);
    for (const auto& g : {z.gamma_star, z.gamma_tilde}) {
      if (!g) continue;
      ++found;
      const double b = *g;
      const double num = q * b * (1 - std::cos(b)) - xi * b - q * xi * std::sin(b);
      CHECK(std::abs(num) < 1e-9 * std::max(1.0, b * b));
      const double r = std::sqrt(std::max(0.0, 1 / (b * b) + 2 / (q * xi) - 1 / (q * q)));
      const double lhs = cot_half(b);
      const bool plus = std::abs(lhs - (-q / b + q * r)) < 1e-7 * std::max(1.0, std::abs(lhs));
      const bool minus = std::abs(lhs - (-q / b - q * r)) < 1e-7 * std::max(1.0, std::abs(lhs));
      CHECK((plus || minus));
      CHECK(std::abs(h2_delta_of_beta(b, xi, q).h) < 1e-9);
    }
    if (xi < 2 * q) {
      CHECK(*z.gamma_star > 2 * (n - 1) * kPi);
      CHECK(*z.gamma_star < z.beta_star);
      CHECK(*z.gamma_tilde > z.tilde_beta);
      CHECK(*z.gamma_tilde < 2 * n * kPi);
    } else if (z.gamma_star) {
      CHECK(*z.gamma_star <= *z.gamma_tilde);
      CHECK(*z.gamma_tilde < z.tilde_beta);
    }
  }
  CHECK(found > 300);
}

TEST_CASE("one-sided limits of h2 at beta*") {
  // Right-hand side of the numerator sign: +inf from the left and -inf from
  // the right when xi < 2q, the reverse when xi > 2q.
  const double a = beta_star(0.2, 1);
  CHECK(h2_delta_of_beta(a - 1e-4, 0.2, 0.8).h > 0);
  CHECK(h2_delta_of_beta(a + 1e-4, 0.2, 0.8).h < 0);
  CHECK(h2_delta_of_beta(a - 1e-6, 0.2, 0.8).h > 1e2);
  CHECK(h2_delta_of_beta(a + 1e-6, 0.2, 0.8).h < -1e2);
  const double b = beta_star(1.62, 1);
  CHECK(h2_delta_of_beta(b - 1e-4, 1.62, 0.8).h < 0);
  CHECK(h2_delta_of_beta(b + 1e-4, 1.62, 0.8).h > 0);
  CHECK(h2_delta_of_beta(b - 1e-6, 1.62, 0.8).h < -1e2);
  CHECK(h2_delta_of_beta(b + 1e-6, 1.62, 0.8).h > 1e2);
}

TEST_CASE("positive pair intervals") {
  const auto a = positive_pair_intervals_instant(0.2, 0.8, 1);
  REQUIRE(a.size() == 2);
  CHECK(std::abs(a[0].lo - 0.95335728) < 1e-8);
  CHECK(std::abs(a[0].hi - 3.26398905) < 1e-8);
  CHECK(std::abs(a[1].lo - 5.59545581) < 1e-8);
  CHECK(a[1].hi == 2 * kPi);

  const auto b = positive_pair_intervals_instant(1.62, 0.8, 1);
  REQUIRE(b.size() == 2);
  CHECK(std::abs(b[0].lo - 3.19356076) < 1e-8);
  CHECK(std::abs(b[0].hi - 3.86974862) < 1e-8);
  CHECK(std::abs(b[1].lo - 3.92455245) < 1e-8);

  const auto c = positive_pair_intervals_instant(1.62, 0.8, 3);
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c[0].lo - 15.910897954493087) < 1e-10);
  CHECK(c[0].hi == 6 * kPi);
}

TEST_CASE("property: sign law on dense sweeps") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> ux(0.05, 6.0), uq(0.1, 3.0);
  int checked = 0;
  for (int trial = 0; trial < 60; ++trial) {
    const double xi = ux(rng), q = uq(rng);
    if (std::abs(xi - 2 * q) < 1e-3) continue;
    const int n = 1 + static_cast<int>(rng() % 3);
    const auto iv = positive_pair_intervals_instant(xi, q, n);
    const std::vector<double> poles{beta_star(xi, n), tilde_beta_instant(q, n)};
    const double lo = 2 * (n - 1) * kPi, hi = 2 * n * kPi;
    for (int i = 1; i < 1000; ++i) {
      const double b = lo + (hi - lo) * i / 1000.0;
      bool skip = false;
      for (double p : poles) skip = skip || std::abs(b - p) < 1e-6;
      for (const auto& v : iv) skip = skip || std::abs(b - v.lo) < 1e-6;
      if (skip) continue;
      const auto hd = h2_delta_of_beta(b, xi, q);
      bool in = false;
      for (const auto& v : iv) in = in || v.contains(b);
      CHECK(in == (hd.delta > 0 && hd.h > 0));
      ++checked;
    }
  }
  CHECK(checked > 10000);
}

TEST_CASE("beta bounds") {
  const auto a = beta_bounds_instant(1.0, 1.0, 1.0, 1.0);
  CHECK(std::abs(a.upper - (1 + std::sqrt(3.0))) < 1e-14);
  CHECK(a.lower == 0.0);
  const auto b = beta_bounds_instant(2.0, 5.0, 0.2, 0.8);
  CHECK(b.lower == doctest::Approx(5.0 - 0.8 * 0.2 / 2.0));
  for (const auto& br : sample_branches_instant(0.2, 0.8, 1, 64)) {
    for (const auto& p : br.points) {
      const auto bb = beta_bounds_instant(p.h, p.delta, 0.2, 0.8);
      CHECK(p.beta * p.beta <= bb.upper * (1 + 1e-9));
      CHECK(p.beta * p.beta >= bb.lower * (1 - 1e-9));
    }
  }
}

TEST_CASE("sampled branches") {
  const auto a = sample_branches_instant(0.2, 0.8, 1, 256);
  REQUIRE(a.size() == 2);
  double dmax = 0;
  for (const auto& p : a[0].points) dmax = std::max(dmax, p.delta);
  // The left branch folds back at delta = 2.6846598861...
  CHECK(std::abs(dmax - 2.684659886147085) < 1e-4);
  CHECK(dmax < 3.0);

  int branches = 0;
  for (int n = 1; n <= 3; ++n) {
    for (const auto& br : sample_branches_instant(1.62, 0.8, n, 256)) {
      ++branches;
      for (const auto& p : br.points) {
        CHECK(p.delta > 0);
        CHECK(p.h > 0);
        CHECK(boundary_residual(Variant::Instant, p.beta, 1.62, 0.8, {p.h, p.delta}) < 1e-8);
      }
    }
  }
  CHECK(branches == 4);
}
