#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "octoarm/rod_geometry.hpp"
#include "octoarm/types.hpp"

namespace octoarm {

struct Scenario;

// Steady-state bearing/distance profile along the arm, integrated in
// arclength from the base with an adaptive embedded Runge-Kutta pair:
//   rho'   = -cos(alpha)
//   alpha' = (1/rho - mu_tilde * sigma(s_bar - s)) sin(alpha)
//   theta' = mu_tilde * sigma(s_bar - s) sin(alpha)
//   x'     = cos(theta),  y' = sin(theta)
// The bending stiffness cancels from the feedback, so only the activation
// profile enters. Integration stops early when rho falls to the capture
// floor (1e-4 * rest length); the profile is then padded with its last value
// so the output grid stays uniform.
struct EquilibriumProfile {
  std::vector<double> s, rho, alpha, theta, x, y;
  bool captured = false;
  double capture_s = std::nan("");  // arclength at the capture floor [m]
  double min_rho = 0.0;
  double s_at_min_rho = 0.0;
  double cos_alpha_tip() const { return std::cos(alpha.back()); }
};

struct EquilibriumOptions {
  int n_output = 2001;
  double rtol = 1.0e-10;
  double atol = 1.0e-13;
  double smooth_width = -1.0;      // <= 0: 2 * geom.ds()
  double capture_floor_rel = 1.0e-4;  // times rest length
};

EquilibriumProfile integrate_equilibrium(double rho0, double alpha0,
                                         double mu_tilde, double s_bar,
                                         const RodGeometry& geom,
                                         const EquilibriumOptions& opt = {});

// Bend angle profile for a target at infinity along a line of slope m,
// closed form of theta' = mu_tilde 1{s <= s_bar} (m cos th - sin th)/sqrt(1+m^2)
// with theta(0) = 0:
//   theta(s) = 2 atan( (sqrt(1+m^2)/m) tanh( mu_tilde s/2 + atanh(1/sqrt(1+m^2)) ) - 1/m )
// clamped at s_bar, approaching atan(m) as mu_tilde s grows.
double closed_form_theta(double s, double slope, double mu_tilde, double s_bar);

// Same ODE integrated numerically on a caller-supplied grid (the activation
// is the sharp indicator here, to match the closed form).
std::vector<double> integrate_slope_equilibrium(double slope, double mu_tilde,
                                                double s_bar,
                                                std::span<const double> s_grid,
                                                double rtol = 1.0e-12);

// Gain sweeps. A reach row succeeds when min rho <= eps; a pointing row when
// cos(alpha) at the tip >= 1 - eps.
struct SweepRow {
  double mu_tilde = 0.0;
  double min_rho = 0.0;
  double cos_alpha_tip = 0.0;
  bool success = false;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  bool any_success = false;
  double smallest_success_mu = std::nan("");
  bool monotone_min_rho = true;  // min rho non-increasing along the sweep
};

// Default gain grid: mu_tilde * L in {0, 1, 2, 4, ..., 4096}.
std::vector<double> default_mu_grid(double rest_length);

SweepResult verify_reach(double rho0, double eps, const RodGeometry& geom,
                         std::span<const double> mu_grid = {},
                         double alpha0 = 0.5 * kPi);

SweepResult verify_pointing(double rho0, double eps, const RodGeometry& geom,
                            std::span<const double> mu_grid = {},
                            double alpha0 = 0.5 * kPi);

// Dynamic stability probe around a converged closed-loop run. Runs the
// scenario to its end, perturbs the element curvatures by uniform noise of
// relative size kappa_noise_rel (times the peak curvature), rebuilds the
// shape, and then advances the perturbed and unperturbed states side by side
// for settle_time. distance(t) is the L2 curvature distance between the twin
// runs, so zero noise gives identically zero distance.
struct StabilityReport {
  double initial_distance = 0.0;
  std::vector<double> t, distance;
  double final_ratio = 0.0;  // distance at the end / initial distance
  bool decayed = false;      // final_ratio < 0.1
};

StabilityReport verify_stability(const Scenario& scenario,
                                 double kappa_noise_rel, double settle_time,
                                 unsigned seed);

}  // namespace octoarm
