#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "chatter/branch.hpp"

namespace chatter {

using cplx = std::complex<double>;

/// Parameters of the characteristic factor
///   delayed: P(l) + delta (h + q/(l e^l)) (1 - e^-l)
///   instant: P(l) + delta (h + q/l) (1 - e^-l)
/// with P(l) = l^2 + xi l + delta. `coupling` scales the delay term; 1 is
/// the physical value, 0 leaves P alone.
struct CharParams {
  Variant variant = Variant::Delayed;
  double xi = 0.0;
  double delta = 0.0;
  double h = 0.0;
  double q = 0.0;
  double coupling = 1.0;
};

struct StabilityVerdict {
  int unstable_count = 0;
  std::optional<cplx> rightmost_root;
  bool stable = false;
  double margin = 0.0;  ///< |Re| of the root nearest the imaginary axis
};

/// Throws DomainError unless xi, delta, q > 0 and all fields are finite.
void validate(const CharParams& p);

/// The characteristic factor itself (singular at 0).
cplx eval_char(cplx lambda, const CharParams& p);

/// Entire function with the pole cleared: l e^l F (delayed) or l F (instant).
/// Vanishes at 0 with derivative delta (q + 1).
cplx eval_entire(cplx lambda, const CharParams& p);

/// eval_entire divided by lambda; entire, nonzero at 0, and sharing every
/// characteristic root.
cplx eval_reduced(cplx lambda, const CharParams& p);
cplx eval_reduced_derivative(cplx lambda, const CharParams& p);

/// Radius outside of which no root with Re >= 0 can lie.
double rhp_root_radius(const CharParams& p);

/// Roots in (1e-7, sigma_max) x (-omega_max, omega_max) by the argument
/// principle. Throws ContourTooClose if the contour passes within reach of
/// a root.
int count_unstable(const CharParams& p, double omega_max, double sigma_max);

/// Number of roots inside an arbitrary axis-aligned box.
int count_in_box(const CharParams& p, double re_lo, double re_hi, double im_lo, double im_hi);

/// Newton refinement of a characteristic root. Throws Diverged.
cplx refine_root(cplx seed, const CharParams& p);

/// Every root in the box, each refined, sorted by decreasing real part.
std::vector<cplx> roots_in_box(const CharParams& p, double re_lo, double re_hi, double im_lo,
                               double im_hi);

StabilityVerdict verdict(const CharParams& p);

}  // namespace chatter
