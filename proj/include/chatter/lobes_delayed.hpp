#pragma once

#include <vector>

#include "chatter/branch.hpp"

namespace chatter {

struct DelayedLobeZeros {
  int n = 1;
  double beta_star = 0.0;
  double beta1 = 0.0;
  double q_threshold = 0.0;
  std::vector<double> tilde_betas;  ///< 1 or 3 entries, ascending
};

/// Which sign pattern of delta applies on the n-th period.
enum class DelayedCase {
  StarBelowSecond,   ///< three zeros, beta* <= beta~2
  StarBetween,       ///< three zeros, beta~2 <= beta* <= beta~3
  StarAboveThird,    ///< three zeros, beta* >= beta~3
  SingleTilde,       ///< one zero
};

struct DelayedPositivity {
  DelayedCase which = DelayedCase::SingleTilde;
  std::vector<Interval> intervals;
};

/// Zero of xi(1-cos b) + b sin b on ((2n-1)pi, 2n pi).
double beta_star(double xi, int n);

/// (2n pi - arccos((sqrt5-1)/2)) * sqrt(2 sqrt5 - 2) / (4 sqrt5 - 8).
double q_threshold(int n);

/// Zeros of 2q cos b (1 - cos b) + b sin b on (2(n-1)pi, 2n pi), ascending.
/// Throws DegenerateTangency when q sits on the onset of the three-zero regime.
std::vector<double> tilde_betas(double q, int n);

DelayedLobeZeros delayed_zeros(double xi, double q, int n);

/// Boundary point (h1, delta) at frequency beta. Throws PoleAt if either
/// denominator vanishes.
HDelta h1_delta_of_beta(double beta, double xi, double q);

/// Intervals of the n-th period on which delta(beta) > 0. Throws
/// UnsupportedParameters when xi == 2q.
DelayedPositivity delayed_positivity(double xi, double q, int n);
std::vector<Interval> positive_delta_intervals(double xi, double q, int n);

/// Bounds on beta^2 for a purely imaginary root at (h1, delta). The upper
/// bound is the smaller of the imaginary-part and modulus estimates; no
/// positive lower bound holds in general, so lower is 0.
BetaBounds beta_bounds_delayed(double h1, double delta, double xi, double q);

/// Vibration frequency estimate beta / 2pi.
double frequency_estimate(double beta);

std::vector<BoundaryBranch> sample_branches_delayed(double xi, double q, int n, int samples);

}  // namespace chatter
