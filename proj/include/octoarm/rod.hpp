#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "octoarm/rod_geometry.hpp"

namespace octoarm {

// Thrown when a time step produces a non-finite field.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double time)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_ = 0.0;
};

// Snapshot of the discretized arm. All arrays are node-valued on the uniform
// arclength grid s_i = i * ds. The internal force components n1 (tangential)
// and n2 (normal) and the bending couple m are element resultants averaged to
// nodes; the tip entries are exactly zero (free end).
struct RodState {
  double time = 0.0;
  double ds = 0.0;
  std::vector<double> x, y;      // centerline [m]
  std::vector<double> theta;     // cross-section angle [rad]
  std::vector<double> vx, vy;    // [m/s]
  std::vector<double> omega;     // [rad/s]
  std::vector<double> kappa;     // theta_s [1/m]
  std::vector<double> n1, n2;    // internal force, material frame [N]
  std::vector<double> m;         // internal couple [N m]
  double max_stretch_dev = 0.0;  // max_i | |r_s| - 1 | at the last update

  int n_nodes() const { return static_cast<int>(x.size()); }
  double s_at(int i) const { return ds * i; }
};

struct EnergyBreakdown {
  double kinetic = 0.0;  // [J]
  double elastic = 0.0;  // bending energy, trapezoid on node arrays [J]
};

// Explicit dynamics of one arm on a fixed grid. A Rod instance is meant to be
// stepped from a single thread; independent instances share nothing.
class Rod {
 public:
  explicit Rod(const RodGeometry& geom);

  const RodGeometry& geometry() const { return geom_; }
  int n_nodes() const { return geom_.n_nodes(); }
  double ds() const { return geom_.ds(); }

  // Largest safe explicit step for the stretch wave: 0.25 * ds * sqrt(rho/E).
  double default_dt() const;

  RodState straight_state() const;
  // kappa_of_s == nullptr means straight. Builds positions by exact unit-speed
  // integration of the angle, so the initial discrete stretch is exactly 1.
  RodState state_from_curvature(const std::function<double(double)>& kappa_of_s) const;

  // One position-Verlet step (drift-kick-drift). external_fx/fy are force
  // densities [N/m] and couple_density is a couple density [N m / m], all
  // node-sampled and held fixed over the step. Damping is applied as an exact
  // exponential substep after the kick. The base node stays clamped.
  // Throws NumericalError if any field becomes non-finite.
  void step(RodState& state, std::span<const double> external_fx,
            std::span<const double> external_fy,
            std::span<const double> couple_density, double dt);

  // Trapezoidal quadrature of node arrays: kinetic and bending energy.
  EnergyBreakdown energy_diagnostics(const RodState& state) const;
  // Discrete energies the stepper actually works with (for budget checks).
  double element_bending_energy(const RodState& state) const;
  double constraint_energy(const RodState& state) const;
  double max_stretch_deviation(const RodState& state) const;

  const std::vector<double>& node_bending_stiffness() const { return node_EI_; }
  const std::vector<double>& node_weights() const { return node_w_; }

 private:
  void refresh_derived(RodState& state) const;
  void check_finite(const RodState& state) const;

  RodGeometry geom_;
  // node caches
  std::vector<double> node_w_;        // trapezoid weights [m]
  std::vector<double> node_mass_;     // rho A w [kg]
  std::vector<double> node_inertia_;  // rho I w [kg m^2]
  std::vector<double> node_EI_;       // [N m^2]
  // element caches (midpoint values)
  std::vector<double> elem_EA_;  // stretch rigidity [N]
  std::vector<double> elem_GA_;  // shear rigidity [N]
  std::vector<double> elem_EI_;  // [N m^2]
  // damping factors cached for the last dt
  double cached_dt_ = -1.0;
  std::vector<double> damp_trans_;
  std::vector<double> damp_rot_;
  // scratch
  std::vector<double> qnx_, qny_, me_, taue_;
};

// Centered finite difference of a node couple field, one-sided at both ends.
std::vector<double> couple_gradient(std::span<const double> u, double ds);

}  // namespace octoarm
