#include "octoarm/rod_geometry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "octoarm/types.hpp"

namespace octoarm {

double RodGeometry::radius(double s) const {
  const double a = s / rest_length;
  return tip_radius * a + base_radius * (1.0 - a);
}

double RodGeometry::area(double s) const {
  const double r = radius(s);
  return kPi * r * r;
}

double RodGeometry::second_moment(double s) const {
  const double a = area(s);
  return a * a / (4.0 * kPi);
}

double RodGeometry::bending_stiffness(double s) const {
  return youngs_modulus * second_moment(s);
}

void RodGeometry::validate() const {
  auto fail = [](const std::string& field, const std::string& why) {
    throw std::invalid_argument("rod." + field + ": " + why);
  };
  if (!(rest_length > 0.0)) fail("rest_length", "must be positive");
  if (n_elements < 2) fail("n_elements", "needs at least 2 elements");
  if (!(base_radius > 0.0)) fail("base_radius", "must be positive");
  if (!(tip_radius > 0.0)) fail("tip_radius", "must be positive");
  if (!(density > 0.0)) fail("density", "must be positive");
  if (!(youngs_modulus > 0.0)) fail("youngs_modulus", "must be positive");
  if (damping < 0.0) fail("damping", "must be nonnegative");
}

}  // namespace octoarm
