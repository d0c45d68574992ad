#pragma once

#include <optional>
#include <span>
#include <vector>

namespace octoarm {

// Arclength of the curvature extremum: grid argmax of |kappa| (ties keep the
// smallest arclength) refined by a three-point parabolic fit when the maximum
// is interior. Returns nothing when max |kappa| < 1e-9 (no bend to track).
std::optional<double> bend_location(std::span<const double> kappa, double ds);

// Speed of a tracked point from its lab-frame trajectory: centered
// differences inside, one-sided at the ends. Requires at least 3 samples and
// a uniform cadence (relative tolerance 1e-9); throws std::invalid_argument
// otherwise.
std::vector<double> bend_velocity(std::span<const double> t,
                                  std::span<const double> x,
                                  std::span<const double> y);

// Zero-phase second-order Butterworth low-pass (bilinear design, applied
// forward and backward over odd-reflection padding with steady-state filter
// initialization). DC gain is exactly 1 by construction, so constant series
// pass through unchanged. Requires sample_rate > 2 * cutoff and a series
// longer than the warm-up padding; throws std::invalid_argument otherwise.
std::vector<double> lowpass(std::span<const double> series, double sample_rate,
                            double cutoff = 1.0);

// Bend track assembled over an output-cadence frame series.
struct BendTrack {
  std::vector<double> t;        // [s]
  std::vector<double> s_bend;   // arclength of the bend [m]
  std::vector<double> x, y;     // lab position of the bend [m]
  std::vector<double> speed;    // |d/dt (x, y)| [m/s]
  std::vector<double> speed_filtered;  // low-passed speed [m/s]
};

}  // namespace octoarm
