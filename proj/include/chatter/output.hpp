#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chatter/branch.hpp"
#include "chatter/simulate.hpp"

namespace chatter {

struct PlotAxes {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;
};

/// Header `variant,n,branch,beta,delta,h`; branch counts from 1 within each n.
void write_lobes_csv(std::ostream& out, const std::vector<BoundaryBranch>& branches);

/// Header `eta,x1,x2,x3,x4,k`; k is left empty for linear runs.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);

/// Branches as polylines in the (delta, h) plane, clipped to the axes.
void write_lobes_svg(std::ostream& out, const std::vector<BoundaryBranch>& branches,
                     const PlotAxes& axes, const std::string& title);

}  // namespace chatter
