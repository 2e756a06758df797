#include "chatter/branch.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "chatter/errors.hpp"

namespace chatter {

std::string to_string(Variant v) { return v == Variant::Delayed ? "delayed" : "instant"; }

Variant parse_variant(const std::string& s) {
  if (s == "delayed") return Variant::Delayed;
  if (s == "instant") return Variant::Instant;
  throw DomainError("unknown variant '" + s + "' (expected delayed or instant)");
}

std::vector<double> clustered_grid(const Interval& iv, int samples) {
  std::vector<double> out;
  if (samples <= 0) return out;
  out.reserve(static_cast<std::size_t>(samples));
  const double w = iv.hi - iv.lo;
  for (int i = 0; i < samples; ++i) {
    const double theta = std::numbers::pi * (i + 0.5) / samples;
    out.push_back(iv.lo + w * 0.5 * (1.0 - std::cos(theta)));
  }
  return out;
}

namespace {

struct Terms {
  std::complex<double> poly;
  std::complex<double> delay;
};

Terms split_terms(Variant v, double beta, double xi, double q, const HDelta& hd) {
  using namespace std::complex_literals;
  const std::complex<double> lam = 1i * beta;
  const std::complex<double> P = lam * lam + xi * lam + hd.delta;
  const std::complex<double> E = 1.0 - std::exp(-lam);
  const std::complex<double> kern =
      v == Variant::Delayed ? hd.h + q / (lam * std::exp(lam)) : hd.h + q / lam;
  return {P, hd.delta * kern * E};
}

}  // namespace

double boundary_residual_abs(Variant v, double beta, double xi, double q, const HDelta& hd) {
  const auto t = split_terms(v, beta, xi, q, hd);
  return std::abs(t.poly + t.delay);
}

double boundary_residual(Variant v, double beta, double xi, double q, const HDelta& hd) {
  const double scale = beta * beta + xi * std::abs(beta) + hd.delta +
                       hd.delta * (std::abs(hd.h) + q / std::abs(beta)) * 2.0;
  return boundary_residual_abs(v, beta, xi, q, hd) / scale;
}

}  // namespace chatter
