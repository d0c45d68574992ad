#pragma once

namespace octoarm {

// Tapered circular rod, radius linear in arclength. Default values describe
// the reference arm used throughout: 0.2 m long, 10 kPa soft material,
// base radius 10 mm tapering to 1 mm.
struct RodGeometry {
  double rest_length = 0.2;       // [m]
  int n_elements = 100;           // uniform grid elements
  double base_radius = 0.01;      // [m]
  double tip_radius = 0.001;      // [m]
  double density = 1042.0;        // [kg/m^3]
  double youngs_modulus = 1.0e4;  // [Pa]
  double damping = 0.01;          // translational/rotational damping [kg/s]

  int n_nodes() const { return n_elements + 1; }
  double ds() const { return rest_length / n_elements; }

  double radius(double s) const;          // linear taper [m]
  double area(double s) const;            // pi r^2 [m^2]
  double second_moment(double s) const;   // A^2 / (4 pi) [m^4]
  double bending_stiffness(double s) const;  // E I [N m^2]

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

}  // namespace octoarm
