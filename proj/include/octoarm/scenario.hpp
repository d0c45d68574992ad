#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "octoarm/environment.hpp"
#include "octoarm/rod_geometry.hpp"
#include "octoarm/types.hpp"

namespace octoarm {

// Thrown for missing files, malformed lines, unknown keys and invalid values.
// The message always names the offending field or line.
class ConfigError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Initial centerline shape, given as a curvature profile.
struct InitialShape {
  enum class Kind { Straight, Bump, Arc };
  Kind kind = Kind::Straight;
  double amplitude = 0.0;  // bump peak curvature [1/m]
  double center = 0.0;     // bump center arclength [m]
  double width = 0.0;      // bump Gaussian width [m]
  double arc_curvature = 0.0;  // constant curvature [1/m]

  // nullptr for a straight rod.
  std::function<double(double)> curvature() const;
};

enum class ControlMode { Target, Slope };

// Settings for the equilibrium subcommand.
struct EquilibriumJob {
  std::string mode = "profile";  // profile | reach | pointing
  double rho0 = 0.0;
  double alpha0 = 0.5 * kPi;
  double eps = 0.0;
  double mu_tilde = 0.0;  // profile mode only
  double s_bar = -1.0;    // < 0: rest length
};

struct PursuitSettings {
  double chi = 25.0;
  double capture_floor = 1.0e-3;  // [m]
};

// One fully described run, loadable from an INI-style config file.
struct Scenario {
  RodGeometry rod;
  InitialShape initial;

  ControlMode control_mode = ControlMode::Target;
  double mu_tilde = 0.0;     // gain scale [1/m]
  double step_width = -1.0;  // activation width [m], <= 0: 2 * ds
  double slope = 0.0;        // slope mode only

  bool drag_enabled = true;
  DragParams drag;
  std::vector<Obstacle> obstacles;
  TargetMotion target;

  double duration = 0.0;   // [s]
  double dt = -1.0;        // [s], <= 0: stability-bound default
  double output_hz = 100.0;

  std::string out_dir = "out";

  std::optional<EquilibriumJob> equilibrium;
  PursuitSettings pursuit;

  // Throws ConfigError naming the field.
  void validate() const;
};

// Parses a config file and applies overrides of the form "section.key=value".
Scenario load_scenario(const std::filesystem::path& path,
                       std::span<const std::string> overrides = {});

}  // namespace octoarm
