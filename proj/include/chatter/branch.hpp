#pragma once

#include <string>
#include <vector>

namespace chatter {

/// Spindle control law.
enum class Variant { Delayed, Instant };

std::string to_string(Variant v);
/// Accepts "delayed" or "instant"; throws DomainError otherwise.
Variant parse_variant(const std::string& s);

/// Open interval (lo, hi).
struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x > lo && x < hi; }
};

/// Boundary coordinates at one frequency beta. h is h1 (delayed) or h2 (instant).
struct HDelta {
  double h = 0.0;
  double delta = 0.0;
};

struct BoundaryPoint {
  double beta = 0.0;
  double delta = 0.0;
  double h = 0.0;
};

struct BoundaryBranch {
  Variant variant = Variant::Delayed;
  int n = 1;
  Interval beta_interval;
  std::vector<BoundaryPoint> points;  ///< strictly increasing in beta
};

/// Bounds on beta^2 for a purely imaginary root i*beta.
struct BetaBounds {
  double lower = 0.0;
  double upper = 0.0;
};

/// `samples` interior points of (lo, hi), strictly increasing, spaced like
/// Chebyshev nodes so they crowd the endpoints.
std::vector<double> clustered_grid(const Interval& iv, int samples);

/// |F(i beta)| for the characteristic factor of the given variant, divided by
/// the sum of the magnitudes of its terms, so that points close to a pole
/// (large delta) are judged on the same footing as the rest.
double boundary_residual(Variant v, double beta, double xi, double q, const HDelta& hd);

/// Same residual without normalization.
double boundary_residual_abs(Variant v, double beta, double xi, double q, const HDelta& hd);

}  // namespace chatter
