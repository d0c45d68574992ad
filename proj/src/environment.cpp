#include "octoarm/environment.hpp"

#include <cmath>

namespace octoarm {

ForceField drag_force(const RodState& st, const DragParams& params,
                      const RodGeometry& geom) {
  const int n = st.n_nodes();
  ForceField f;
  f.fx.assign(n, 0.0);
  f.fy.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    const double c = std::cos(st.theta[i]), s = std::sin(st.theta[i]);
    // velocity in the material frame of the cross section
    const double v1 = c * st.vx[i] + s * st.vy[i];
    const double v2 = -s * st.vx[i] + c * st.vy[i];
    const double r = geom.radius(st.s_at(i));
    const double a_tan = 2.0 * kPi * r;  // wetted perimeter
    const double a_per = 2.0 * r;        // projected width
    const double f1 =
        -0.5 * params.water_density * a_tan * params.c_tangential * v1 * std::abs(v1);
    const double f2 =
        -0.5 * params.water_density * a_per * params.c_normal * v2 * std::abs(v2);
    f.fx[i] = c * f1 - s * f2;
    f.fy[i] = s * f1 + c * f2;
  }
  return f;
}

ContactResult obstacle_force(const RodState& st,
                             std::span<const Obstacle> obstacles,
                             const RodGeometry& geom) {
  const int n = st.n_nodes();
  ContactResult out;
  out.fx.assign(n, 0.0);
  out.fy.assign(n, 0.0);
  for (const Obstacle& ob : obstacles) {
    for (int i = 0; i < n; ++i) {
      const double dx = st.x[i] - ob.center.x;
      const double dy = st.y[i] - ob.center.y;
      const double dist = std::sqrt(dx * dx + dy * dy);
      const double depth = (ob.radius + geom.radius(st.s_at(i))) - dist;
      if (depth <= 0.0 || dist == 0.0) continue;
      const double nx = dx / dist, ny = dy / dist;
      const double v_normal = st.vx[i] * nx + st.vy[i] * ny;
      // never attractive: damping can reduce the push to zero, not reverse it
      const double magnitude =
          std::max(0.0, ob.stiffness * depth - ob.normal_damping * v_normal);
      out.fx[i] += magnitude * nx;
      out.fy[i] += magnitude * ny;
      out.max_penetration = std::max(out.max_penetration, depth);
    }
  }
  return out;
}

Vec2 target_update(const TargetMotion& motion, double t) {
  return motion.initial + t * motion.velocity;
}

}  // namespace octoarm
