#pragma once

#include <span>
#include <vector>

#include "octoarm/rod.hpp"
#include "octoarm/types.hpp"

namespace octoarm {

// Quadratic water drag, resolved in the material frame of each cross section.
struct DragParams {
  double water_density = 1022.0;  // [kg/m^3]
  double c_tangential = 0.155;    // skin friction coefficient
  double c_normal = 5.065;        // form drag coefficient
};

struct ForceField {
  std::vector<double> fx, fy;  // node-sampled force density [N/m]
};

// f = -1/2 rho_w * (A_tan c_tan v1|v1|, A_per c_per v2|v2|) rotated to the lab
// frame, with A_tan = 2 pi r(s) (wetted perimeter) and A_per = 2 r(s)
// (projected width). Zero velocity gives exactly zero force.
ForceField drag_force(const RodState& state, const DragParams& params,
                      const RodGeometry& geom);

// Rigid circular obstacle with a one-sided penalty contact.
struct Obstacle {
  Vec2 center;
  double radius = 0.0;            // [m]
  double stiffness = 1.0e4;       // k_c [N/m^2]
  double normal_damping = 10.0;   // d_c [N s/m^2]
};

struct ContactResult {
  std::vector<double> fx, fy;    // node-sampled force density [N/m]
  double max_penetration = 0.0;  // [m]
};

// Penetration depth of node i against obstacle (c, R) is
// (R + r(s_i)) - |r_i - c|; contact force density is
// max(0, k_c * depth - d_c * (v . n)) * n along the outward normal n.
// Frictionless: no tangential component, and never attractive.
ContactResult obstacle_force(const RodState& state,
                             std::span<const Obstacle> obstacles,
                             const RodGeometry& geom);

// Straight-line target motion.
struct TargetMotion {
  Vec2 initial;
  Vec2 velocity;  // [m/s]
};

Vec2 target_update(const TargetMotion& motion, double t);

}  // namespace octoarm
