#include "octoarm/pursuit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace octoarm {

namespace {
constexpr double kDegenerateSigma = 1.0e-12;  // [m]
}

BearingGeometry bearing_geometry(const PursuitAgent& pursuer, Vec2 target_pos,
                                 double target_heading) {
  BearingGeometry g;
  const Vec2 d = target_pos - pursuer.position;
  g.sigma = d.norm();
  if (g.sigma < kDegenerateSigma) {
    g.captured = true;
    return g;
  }
  const double los = std::atan2(d.y, d.x);
  g.phi = wrap_angle(los - pursuer.heading);
  // line of sight from the target runs the opposite way
  g.psi = wrap_angle(std::atan2(-d.y, -d.x) - target_heading);
  return g;
}

double mc_steering(const BearingGeometry& g, double speed, double target_speed,
                   double chi) {
  if (!(speed > 0.0))
    throw std::invalid_argument("mc_steering: speed must be positive");
  return chi * (std::sin(g.phi) + (target_speed / speed) * std::sin(g.psi));
}

std::optional<double> cp_steering(const BearingGeometry& g, double speed,
                                  double target_speed, double chi,
                                  double capture_floor) {
  if (!(speed > 0.0))
    throw std::invalid_argument("cp_steering: speed must be positive");
  if (g.captured || g.sigma <= capture_floor) return std::nullopt;
  return chi * std::sin(g.phi) +
         (std::sin(g.phi) + (target_speed / speed) * std::sin(g.psi)) / g.sigma;
}

PursuitAgent unicycle_step(const PursuitAgent& agent, double steering,
                           double dt) {
  const double v = agent.speed;
  const double th1 = agent.heading;
  const double th2 = agent.heading + 0.5 * dt * steering;
  const double th4 = agent.heading + dt * steering;
  PursuitAgent next = agent;
  // RK4 with heading rate held constant: stages 2 and 3 coincide
  next.position.x +=
      dt * v / 6.0 * (std::cos(th1) + 4.0 * std::cos(th2) + std::cos(th4));
  next.position.y +=
      dt * v / 6.0 * (std::sin(th1) + 4.0 * std::sin(th2) + std::sin(th4));
  next.heading = wrap_angle(th4);
  return next;
}

double trajectory_rms(const TrajectorySeries& a, const TrajectorySeries& b) {
  auto check = [](const TrajectorySeries& tr, const char* name) {
    if (tr.t.empty() || tr.t.size() != tr.x.size() || tr.t.size() != tr.y.size())
      throw std::invalid_argument(std::string("trajectory_rms: malformed series ") + name);
    for (std::size_t i = 1; i < tr.t.size(); ++i)
      if (!(tr.t[i] > tr.t[i - 1]))
        throw std::invalid_argument(std::string("trajectory_rms: timestamps must ascend in ") + name);
  };
  check(a, "a");
  check(b, "b");

  const double lo = std::max(a.t.front(), b.t.front());
  const double hi = std::min(a.t.back(), b.t.back());
  if (!(lo <= hi))
    throw std::invalid_argument("trajectory_rms: time ranges do not overlap");

  double acc = 0.0;
  long count = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < a.t.size(); ++i) {
    const double t = a.t[i];
    if (t < lo || t > hi) continue;
    while (j + 1 < b.t.size() && b.t[j + 1] < t) ++j;
    double bx, by;
    if (t <= b.t.front()) {
      bx = b.x.front();
      by = b.y.front();
    } else if (t >= b.t.back()) {
      bx = b.x.back();
      by = b.y.back();
    } else {
      const double f = (t - b.t[j]) / (b.t[j + 1] - b.t[j]);
      bx = b.x[j] + f * (b.x[j + 1] - b.x[j]);
      by = b.y[j] + f * (b.y[j + 1] - b.y[j]);
    }
    const double dx = a.x[i] - bx, dy = a.y[i] - by;
    acc += dx * dx + dy * dy;
    ++count;
  }
  if (count == 0)
    throw std::invalid_argument("trajectory_rms: no samples in the overlap");
  return std::sqrt(acc / count);
}

}  // namespace octoarm
