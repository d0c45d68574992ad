#pragma once

#include <optional>
#include <vector>

#include "octoarm/types.hpp"

namespace octoarm {

// Point pursuer with unicycle kinematics.
struct PursuitAgent {
  Vec2 position;
  double heading = 0.0;  // [rad], kept in (-pi, pi]
  double speed = 0.0;    // [m/s]
};

// Relative geometry between pursuer and target:
//   sigma  distance [m]
//   phi    bearing of the target from the pursuer's heading [rad]
//   psi    bearing of the pursuer from the target's heading [rad]
// Both bearings are counterclockwise-positive and wrapped to (-pi, pi].
// captured is set when sigma is below 1e-12 m; the bearings are then zero.
struct BearingGeometry {
  double sigma = 0.0;
  double phi = 0.0;
  double psi = 0.0;
  bool captured = false;
};

BearingGeometry bearing_geometry(const PursuitAgent& pursuer, Vec2 target_pos,
                                 double target_heading);

// Motion-camouflage steering: u = chi (sin phi + (v_T / v) sin psi).
double mc_steering(const BearingGeometry& g, double speed, double target_speed,
                   double chi);

// Classical pursuit adds the line-of-sight rate term:
// u = chi sin phi + (1/sigma)(sin phi + (v_T / v) sin psi).
// Returns nothing once sigma falls to the capture floor (the 1/sigma term
// blows up there); callers treat that as capture and stop steering.
std::optional<double> cp_steering(const BearingGeometry& g, double speed,
                                  double target_speed, double chi,
                                  double capture_floor = 1.0e-3);

// One RK4 step of x' = v cos(heading), y' = v sin(heading), heading' = u,
// with the steering input held constant over the step.
PursuitAgent unicycle_step(const PursuitAgent& agent, double steering,
                           double dt);

struct TrajectorySeries {
  std::vector<double> t, x, y;
};

// RMS pointwise distance over the overlapping time range, with the second
// trajectory linearly resampled onto the first one's timestamps. Throws
// std::invalid_argument when the time ranges do not overlap.
double trajectory_rms(const TrajectorySeries& a, const TrajectorySeries& b);

}  // namespace octoarm
