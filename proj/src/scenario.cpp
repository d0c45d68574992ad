#include "octoarm/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace octoarm {

std::function<double(double)> InitialShape::curvature() const {
  switch (kind) {
    case Kind::Straight:
      return nullptr;
    case Kind::Bump: {
      const double a = amplitude, c = center, w = width;
      return [a, c, w](double s) {
        const double z = (s - c) / w;
        return a * std::exp(-0.5 * z * z);
      };
    }
    case Kind::Arc: {
      const double k = arc_curvature;
      return [k](double) { return k; };
    }
  }
  return nullptr;
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, const std::string& where) {
  char* end = nullptr;
  const double x = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError(where + ": not a number: '" + v + "'");
  return x;
}

int parse_int(const std::string& v, const std::string& where) {
  const double x = parse_double(v, where);
  const int i = static_cast<int>(x);
  if (static_cast<double>(i) != x)
    throw ConfigError(where + ": not an integer: '" + v + "'");
  return i;
}

bool parse_bool(const std::string& v, const std::string& where) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw ConfigError(where + ": expected on/off: '" + v + "'");
}

std::vector<double> parse_numbers(const std::string& v,
                                  const std::string& where) {
  std::istringstream iss(v);
  std::vector<double> out;
  std::string tok;
  while (iss >> tok) out.push_back(parse_double(tok, where));
  return out;
}

Vec2 parse_vec2(const std::string& v, const std::string& where) {
  const auto nums = parse_numbers(v, where);
  if (nums.size() != 2)
    throw ConfigError(where + ": expected two numbers: '" + v + "'");
  return {nums[0], nums[1]};
}

struct Loader {
  Scenario sc;
  bool has_equilibrium = false;
  EquilibriumJob eq;

  void apply(const std::string& section, const std::string& key,
             const std::string& value, const std::string& where) {
    const std::string full = section + "." + key;
    auto unknown = [&]() -> double {
      throw ConfigError(where + ": unknown key '" + full + "'");
    };

    if (section == "rod") {
      if (key == "rest_length") sc.rod.rest_length = parse_double(value, where);
      else if (key == "n_elements") sc.rod.n_elements = parse_int(value, where);
      else if (key == "base_radius") sc.rod.base_radius = parse_double(value, where);
      else if (key == "tip_radius") sc.rod.tip_radius = parse_double(value, where);
      else if (key == "density") sc.rod.density = parse_double(value, where);
      else if (key == "youngs_modulus") sc.rod.youngs_modulus = parse_double(value, where);
      else if (key == "damping") sc.rod.damping = parse_double(value, where);
      else if (key == "initial_shape") {
        if (value == "straight") sc.initial.kind = InitialShape::Kind::Straight;
        else if (value == "bump") sc.initial.kind = InitialShape::Kind::Bump;
        else if (value == "arc") sc.initial.kind = InitialShape::Kind::Arc;
        else throw ConfigError(where + ": unknown initial_shape '" + value + "'");
      }
      else if (key == "bend_amplitude") sc.initial.amplitude = parse_double(value, where);
      else if (key == "bend_center") sc.initial.center = parse_double(value, where);
      else if (key == "bend_width") sc.initial.width = parse_double(value, where);
      else if (key == "arc_curvature") sc.initial.arc_curvature = parse_double(value, where);
      else unknown();
    } else if (section == "control") {
      if (key == "mode") {
        if (value == "target") sc.control_mode = ControlMode::Target;
        else if (value == "slope") sc.control_mode = ControlMode::Slope;
        else throw ConfigError(where + ": unknown control mode '" + value + "'");
      }
      else if (key == "mu_tilde") sc.mu_tilde = parse_double(value, where);
      else if (key == "step_width") sc.step_width = parse_double(value, where);
      else if (key == "slope") sc.slope = parse_double(value, where);
      else unknown();
    } else if (section == "environment") {
      if (key == "drag") sc.drag_enabled = parse_bool(value, where);
      else if (key == "water_density") sc.drag.water_density = parse_double(value, where);
      else if (key == "c_tangential") sc.drag.c_tangential = parse_double(value, where);
      else if (key == "c_normal") sc.drag.c_normal = parse_double(value, where);
      else if (key == "obstacle") {
        const auto nums = parse_numbers(value, where);
        if (nums.size() != 3 && nums.size() != 5)
          throw ConfigError(where +
                            ": obstacle wants 'cx cy radius [stiffness damping]'");
        Obstacle ob;
        ob.center = {nums[0], nums[1]};
        ob.radius = nums[2];
        if (nums.size() == 5) {
          ob.stiffness = nums[3];
          ob.normal_damping = nums[4];
        }
        sc.obstacles.push_back(ob);
      }
      else if (key == "target_position") sc.target.initial = parse_vec2(value, where);
      else if (key == "target_velocity") sc.target.velocity = parse_vec2(value, where);
      else unknown();
    } else if (section == "integration") {
      if (key == "duration") sc.duration = parse_double(value, where);
      else if (key == "dt") sc.dt = parse_double(value, where);
      else if (key == "output_hz") sc.output_hz = parse_double(value, where);
      else unknown();
    } else if (section == "output") {
      if (key == "dir") sc.out_dir = value;
      else unknown();
    } else if (section == "equilibrium") {
      has_equilibrium = true;
      if (key == "mode") eq.mode = value;
      else if (key == "rho0") eq.rho0 = parse_double(value, where);
      else if (key == "alpha0") eq.alpha0 = parse_double(value, where);
      else if (key == "eps") eq.eps = parse_double(value, where);
      else if (key == "mu_tilde") eq.mu_tilde = parse_double(value, where);
      else if (key == "s_bar") eq.s_bar = parse_double(value, where);
      else unknown();
    } else if (section == "pursuit") {
      if (key == "chi") sc.pursuit.chi = parse_double(value, where);
      else if (key == "capture_floor") sc.pursuit.capture_floor = parse_double(value, where);
      else unknown();
    } else {
      throw ConfigError(where + ": unknown section [" + section + "]");
    }
  }
};

}  // namespace

void Scenario::validate() const {
  rod.validate();
  auto fail = [](const std::string& field, const std::string& why) {
    throw ConfigError(field + ": " + why);
  };

  if (initial.kind == InitialShape::Kind::Bump && !(initial.width > 0.0))
    fail("rod.bend_width", "must be positive for a bump shape");
  if (mu_tilde < 0.0) fail("control.mu_tilde", "must be nonnegative");
  if (duration < 0.0) fail("integration.duration", "must be nonnegative");
  if (!(output_hz > 0.0)) fail("integration.output_hz", "must be positive");
  if (dt > 0.0 && output_hz > 1.0 / dt + 1.0e-9)
    fail("integration.output_hz", "exceeds the step rate");
  if (!(drag.water_density > 0.0)) fail("environment.water_density", "must be positive");
  if (drag.c_tangential < 0.0) fail("environment.c_tangential", "must be nonnegative");
  if (drag.c_normal < 0.0) fail("environment.c_normal", "must be nonnegative");
  for (std::size_t i = 0; i < obstacles.size(); ++i) {
    const auto tag = "environment.obstacle[" + std::to_string(i) + "]";
    if (!(obstacles[i].radius > 0.0)) fail(tag, "radius must be positive");
    if (obstacles[i].stiffness < 0.0) fail(tag, "stiffness must be nonnegative");
    if (obstacles[i].normal_damping < 0.0) fail(tag, "damping must be nonnegative");
  }
  if (!(pursuit.chi >= 0.0)) fail("pursuit.chi", "must be nonnegative");
  if (!(pursuit.capture_floor > 0.0)) fail("pursuit.capture_floor", "must be positive");
  if (equilibrium) {
    const auto& eq = *equilibrium;
    if (eq.mode != "profile" && eq.mode != "reach" && eq.mode != "pointing")
      fail("equilibrium.mode", "must be profile, reach or pointing");
    if (!(eq.rho0 > 0.0)) fail("equilibrium.rho0", "must be positive");
    if (eq.mode != "profile" && !(eq.eps > 0.0))
      fail("equilibrium.eps", "must be positive for sweeps");
    if (eq.mu_tilde < 0.0) fail("equilibrium.mu_tilde", "must be nonnegative");
  }
}

Scenario load_scenario(const std::filesystem::path& path,
                       std::span<const std::string> overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config not found: " + path.string());

  Loader loader;
  std::string line;
  std::string section;
  long ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    const std::string where = path.string() + ":" + std::to_string(ln);
    // strip comments
    for (const char marker : {'#', ';'}) {
      const auto pos = line.find(marker);
      if (pos != std::string::npos) line.erase(pos);
    }
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(where + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq_pos = line.find('=');
    if (eq_pos == std::string::npos)
      throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq_pos));
    const std::string value = trim(line.substr(eq_pos + 1));
    if (section.empty())
      throw ConfigError(where + ": key outside any [section]");
    if (key.empty()) throw ConfigError(where + ": empty key");
    loader.apply(section, key, value, where);
  }

  for (const std::string& ov : overrides) {
    const auto eq_pos = ov.find('=');
    const auto dot_pos = ov.find('.');
    if (eq_pos == std::string::npos || dot_pos == std::string::npos ||
        dot_pos > eq_pos)
      throw ConfigError("override must look like section.key=value: '" + ov + "'");
    loader.apply(trim(ov.substr(0, dot_pos)),
                 trim(ov.substr(dot_pos + 1, eq_pos - dot_pos - 1)),
                 trim(ov.substr(eq_pos + 1)), "override '" + ov + "'");
  }

  if (loader.has_equilibrium) loader.sc.equilibrium = loader.eq;

  loader.sc.validate();
  return loader.sc;
}

}  // namespace octoarm
