#pragma once

#include <optional>
#include <vector>

#include "chatter/branch.hpp"

namespace chatter {

/// Case labels for the zeros of h2 on the n-th period.
enum class InstantCase {
  SmallDamping,    ///< xi < 2q: two zeros, one on each side of beta*
  BeyondN0,        ///< xi > 2q, n > n0: no zeros
  WindowBelow,     ///< xi > 2q, window end <= (2n-1)pi: no zeros
  BarAboveWindow,  ///< xi > 2q, bar beta beyond the window: no zeros
  ZerosInWindow,   ///< xi > 2q, two zeros below beta~
};

struct InstantLobeZeros {
  int n = 1;
  InstantCase which = InstantCase::SmallDamping;
  double beta_star = 0.0;
  double tilde_beta = 0.0;
  std::optional<double> gamma_star;
  std::optional<double> gamma_tilde;
  std::optional<double> bar_beta;  ///< xi > 2q only
  std::optional<double> window;    ///< q sqrt(xi/(xi-2q)), xi > 2q only
  std::optional<int> n0;           ///< xi > 2q only
};

/// Zero of 2q(1-cos b) + b sin b on ((2n-1)pi, 2n pi).
double tilde_beta_instant(double q, int n);

/// Solution of b cot(b/2) = -q on ((2n-1)pi, 2n pi).
double bar_beta(double q, int n);

/// q sqrt(xi/(xi-2q)); requires xi > 2q.
double instant_window(double xi, double q);

/// Smallest n with 2n pi >= instant_window(xi, q).
int instant_n0(double xi, double q);

/// Boundary point (h2, delta) at frequency beta. Throws PoleAt if either
/// denominator vanishes.
HDelta h2_delta_of_beta(double beta, double xi, double q);

/// Zeros of h2 on the n-th period with their case tag. Throws
/// UnsupportedParameters when xi == 2q.
InstantLobeZeros h2_zeros(double xi, double q, int n);

/// Intervals of the n-th period on which both delta and h2 are positive.
std::vector<Interval> positive_pair_intervals_instant(double xi, double q, int n);

/// Bounds on beta^2 for a purely imaginary root at (h2, delta); h2 > 0.
BetaBounds beta_bounds_instant(double h2, double delta, double xi, double q);

std::vector<BoundaryBranch> sample_branches_instant(double xi, double q, int n, int samples);

}  // namespace chatter
