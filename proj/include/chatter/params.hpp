#pragma once

#include <iosfwd>
#include <string>

namespace chatter {

/// Raw machine, tool and cutting constants (SI units).
///
/// omega_cut is the depth of cut; Omega0 is the virtual constant spindle
/// speed in rad/s that the feedback gain is tuned to.
struct PhysicalParams {
  double m = 0.0;          ///< tool mass
  double c_x = 0.0;        ///< damping, x direction
  double c_y = 0.0;        ///< damping, y direction
  double k_x = 0.0;        ///< stiffness, x direction
  double k_y = 0.0;        ///< stiffness, y direction
  double K_x = 0.0;        ///< cutting coefficient, x direction
  double K_y = 0.0;        ///< cutting coefficient, y direction
  double omega_cut = 0.0;  ///< depth of cut
  double q = 0.75;         ///< cutting force exponent
  double nu = 0.0;         ///< feed speed
  double R = 0.0;          ///< workpiece radius
  double Omega0 = 0.0;     ///< virtual constant spindle speed
};

/// Reduced groups that drive the stability analysis.
struct DimensionlessParams {
  double xi = 0.0;      ///< c_x k* / m
  double delta = 0.0;   ///< k_x k*^2 / m
  double h1 = 0.0;      ///< K1 p^(q-1) (1 - p/k_r), delayed control
  double h2 = 0.0;      ///< K1 p^(q-1), instantaneous control
  double k_star = 0.0;  ///< stationary delay
  double K1 = 0.0;      ///< dimensionless depth of cut
  double k_r = 0.0;     ///< cutting force ratio K_y/K_x
  double p = 0.0;       ///< dimensionless feed per revolution
  double c_gain = 0.0;  ///< spindle feedback gain
  double q = 0.0;
};

/// Stationary cutting state; identical for both control laws.
struct StationaryState {
  double r_star = 0.0;
  double rho_star = 0.0;
  double k_star = 0.0;
  double j_star = 0.0;
  double l_star = 0.0;
};

/// Throws DomainError unless every field is strictly positive and finite.
void validate(const PhysicalParams& phys);

/// Throws DomainError unless c_x == c_y and k_x == k_y to 1e-12 relative.
/// Only the characteristic-equation paths need this.
void require_symmetric_tool(const PhysicalParams& phys);

/// Gain c making the stationary delay equal 2*pi/Omega0.
double spindle_gain(const PhysicalParams& phys);

/// Stationary delay k*(c) = (2 pi R k_x / (c K_x omega nu^q))^(1/(q+1)).
double stationary_delay(const PhysicalParams& phys, double c);

DimensionlessParams reduce(const PhysicalParams& phys);

StationaryState stationary_state(const PhysicalParams& phys, double c);

// Parameter files: one `key=value` per line, `#` starts a comment. Keys are
// the PhysicalParams field names; q may be omitted (defaults to 0.75).
PhysicalParams parse_params(std::istream& in);
PhysicalParams load_params(const std::string& path);
void write_params(std::ostream& out, const PhysicalParams& phys);

}  // namespace chatter
