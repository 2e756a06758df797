#pragma once

#include <array>
#include <functional>
#include <vector>

#include "chatter/branch.hpp"
#include "chatter/charroots.hpp"
#include "chatter/params.hpp"

namespace chatter {

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<Vec4, 4>;
/// (r, rho, j, l, k) for the transformed nonlinear systems.
using Vec5 = std::array<double, 5>;

/// dx/deta = A0 x + A1 x(eta-1) + int_{-1}^0 (B0 x(eta+s) + B1 x(eta+s-1)) ds.
/// B1 is zero for the instantaneous control.
struct LinearizedSystem {
  Variant variant = Variant::Delayed;
  Mat4 A0{};
  Mat4 A1{};
  Mat4 B0{};
  Mat4 B1{};
  double k_star = 1.0;
};

/// Linearization about the stationary state, with c from spindle_gain.
LinearizedSystem linearize(Variant v, const PhysicalParams& phys);

/// A linear system whose characteristic equation contains the factor
/// described by p (realized with m = k* = k_r = 1).
LinearizedSystem linearize(const CharParams& p);

/// Initial function on [-depth, 0] and its derivative.
struct History {
  std::function<Vec4(double)> value;
  std::function<Vec4(double)> derivative;
};

History constant_history(const Vec4& x);

struct Trajectory {
  std::vector<double> eta;      ///< uniform grid (t for the t-domain run)
  std::vector<Vec4> states;     ///< deviation from the stationary state
  std::vector<double> k_values; ///< delay; empty for linear runs
  std::vector<double> warp;     ///< eta(t); t-domain runs only
  std::vector<double> log_scale;///< renormalization offset of log|x|
  double growth_rate = 0.0;     ///< NaN when the state is identically zero
};

struct LinearOptions {
  double eta_end = 60.0;
  double step = 0.01;
  bool renormalize = false;  ///< rescale the stored solution, tracking log_scale
};

/// Fixed-step RK4 on a delay-aligned grid; step must divide 1. Throws
/// Diverged if |x| exceeds 1e12 without renormalization.
Trajectory integrate_linear(const LinearizedSystem& sys, const History& initial,
                            const LinearOptions& opt);
Trajectory integrate_linear(const LinearizedSystem& sys, const History& initial, double eta_end,
                            double step);

/// Right-hand side of the transformed nonlinear system for the state `now`
/// and its values one and two delay units back.
Vec5 transformed_field(Variant v, const PhysicalParams& phys, double c, const Vec5& now,
                       const Vec5& lag1, const Vec5& lag2);

/// Transformed nonlinear system in the eta-domain. `initial` gives absolute
/// (r, rho, j, l). Throws TransformViolated or NegativeChipThickness.
Trajectory integrate_nonlinear_transformed(Variant v, const PhysicalParams& phys, double c,
                                           const History& initial, double eta_end, double step);

/// Instantaneous-control system in physical time with the threshold delay
/// recovered from the cumulative integral. `initial` gives absolute (x, y, u,
/// v) for t <= 0. k_values holds tau(t), warp holds eta(t).
Trajectory integrate_original_instant(const PhysicalParams& phys, double c,
                                      const History& initial, double t_end, double step);

/// Least-squares slope of log|x| over the final third of the run.
double fit_growth_rate(const Trajectory& traj);

struct TransformDiscrepancy {
  double state = 0.0;  ///< max |state difference| / max |deviation|
  double delay = 0.0;  ///< max |tau - k| / k*
  int compared = 0;
};

/// Runs both instantaneous-control formulations from the same constant
/// history (stationary state plus `offset` in x and y) and compares them
/// after mapping t to eta.
TransformDiscrepancy compare_transform(const PhysicalParams& phys, const Vec4& offset,
                                       double eta_end, double eta_step, double t_step);

}  // namespace chatter
