#pragma once

#include <span>
#include <vector>

#include "octoarm/rod.hpp"
#include "octoarm/types.hpp"

namespace octoarm {

// Per-node view of a point target: the vector to the target, its distance and
// the bearing alpha, defined by rotating the local unit tangent onto the unit
// target direction (positive = counterclockwise, wrapped to (-pi, pi]).
struct SensoryReading {
  Vec2 target;
  std::vector<double> rho_x, rho_y;          // target vector [m]
  std::vector<double> rho;                   // distance [m]
  std::vector<double> alpha;                 // bearing [rad]
  std::vector<double> tangent_x, tangent_y;  // unit tangent used for alpha
  int closest_node = 0;
  double s_bar = 0.0;   // arclength of the closest node [m]
  double min_rho = 0.0; // [m]
};

// Tangents come from centered differences of the node positions (one-sided at
// the ends). A node within 1e-12 m of the target gets alpha = 0 and wins the
// closest-point search; otherwise ties break to the smallest arclength.
SensoryReading sense(const RodState& state, Vec2 target);

// Logistic activation: 1/2 at x = 0, and below 1.2e-4 for x <= -3*width.
double smooth_step(double x, double width);

// Gain profile mu(s) = mu_tilde * EI(s) * smooth_step(s_bar - s, width).
// width <= 0 picks the default 2*ds.
std::vector<double> gain_profile(double s_bar, std::span<const double> node_EI,
                                 double ds, double mu_tilde, double width = -1.0);

// Couple field u = -mu sin(alpha) and its split into the two muscle groups:
// u_top carries u >= 0, u_bottom carries u < 0, u = u_top + u_bottom.
struct ControlField {
  std::vector<double> u;         // [N m]
  std::vector<double> u_top;     // nonnegative part
  std::vector<double> u_bottom;  // nonpositive part
};

ControlField control_couple(const SensoryReading& reading,
                            std::span<const double> gain);

// Target-at-infinity variant: the bearing of a straight line of slope m seen
// from a cross-section at angle theta has sin(alpha) = (m cos(theta) -
// sin(theta)) / sqrt(1 + m^2), independent of position.
ControlField slope_feedback_couple(const RodState& state, double slope,
                                   std::span<const double> gain);

}  // namespace octoarm
