#include "octoarm/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "octoarm/types.hpp"

namespace octoarm {

namespace {
constexpr double kNoBendThreshold = 1.0e-9;  // [1/m]
constexpr int kFilterPad = 9;                // warm-up samples per end
}  // namespace

std::optional<double> bend_location(std::span<const double> kappa, double ds) {
  const int n = static_cast<int>(kappa.size());
  if (n < 2) throw std::invalid_argument("bend_location: needs >= 2 samples");
  if (!(ds > 0.0)) throw std::invalid_argument("bend_location: ds must be positive");

  int best = 0;
  for (int i = 1; i < n; ++i)
    if (std::abs(kappa[i]) > std::abs(kappa[best])) best = i;  // ties: smallest s
  const double peak = std::abs(kappa[best]);
  if (peak < kNoBendThreshold) return std::nullopt;

  double offset = 0.0;
  if (best > 0 && best < n - 1) {
    // parabola through the three samples around the peak
    const double ym = std::abs(kappa[best - 1]);
    const double y0 = peak;
    const double yp = std::abs(kappa[best + 1]);
    const double denom = ym - 2.0 * y0 + yp;
    if (denom < 0.0) offset = std::clamp(0.5 * (ym - yp) / denom, -0.5, 0.5);
  }
  return (best + offset) * ds;
}

std::vector<double> bend_velocity(std::span<const double> t,
                                  std::span<const double> x,
                                  std::span<const double> y) {
  const int n = static_cast<int>(t.size());
  if (n < 3) throw std::invalid_argument("bend_velocity: needs >= 3 samples");
  if (x.size() != t.size() || y.size() != t.size())
    throw std::invalid_argument("bend_velocity: series lengths differ");
  const double dt = t[1] - t[0];
  if (!(dt > 0.0))
    throw std::invalid_argument("bend_velocity: timestamps must ascend");
  // Timestamps reloaded from CSV carry 9-significant-digit rounding, so the
  // tolerance must scale with the absolute time as well as the cadence.
  const double cadence_tol =
      1.0e-6 * dt + 1.0e-8 * std::max(std::abs(t.front()), std::abs(t.back()));
  for (int i = 1; i < n; ++i)
    if (std::abs((t[i] - t[i - 1]) - dt) > cadence_tol)
      throw std::invalid_argument("bend_velocity: cadence is not uniform");

  std::vector<double> speed(n);
  auto norm = [](double a, double b) { return std::sqrt(a * a + b * b); };
  speed[0] = norm(x[1] - x[0], y[1] - y[0]) / dt;
  for (int i = 1; i < n - 1; ++i)
    speed[i] = norm(x[i + 1] - x[i - 1], y[i + 1] - y[i - 1]) / (2.0 * dt);
  speed[n - 1] = norm(x[n - 1] - x[n - 2], y[n - 1] - y[n - 2]) / dt;
  return speed;
}

namespace {

struct Biquad {
  double b0, b1, b2, a1, a2;
};

// Bilinear-transform Butterworth low-pass of order two. The numerator and
// denominator coefficient sums are equal by construction, so DC gain is 1.
Biquad design_lowpass(double sample_rate, double cutoff) {
  const double k = std::tan(kPi * cutoff / sample_rate);
  const double sqrt2 = std::sqrt(2.0);
  const double norm = 1.0 / (1.0 + sqrt2 * k + k * k);
  Biquad q;
  q.b0 = k * k * norm;
  q.b1 = 2.0 * q.b0;
  q.b2 = q.b0;
  q.a1 = 2.0 * (k * k - 1.0) * norm;
  q.a2 = (1.0 - sqrt2 * k + k * k) * norm;
  return q;
}

// One pass, transposed direct form II, with the state preloaded to the
// steady-state response of the first sample (removes start-up transients
// for series that begin near a plateau).
void filter_pass(const Biquad& q, std::vector<double>& v) {
  double z1 = (1.0 - q.b0) * v[0];
  double z2 = (q.b2 - q.a2) * v[0];
  for (double& s : v) {
    const double x = s;
    const double y = q.b0 * x + z1;
    z1 = q.b1 * x - q.a1 * y + z2;
    z2 = q.b2 * x - q.a2 * y;
    s = y;
  }
}

}  // namespace

std::vector<double> lowpass(std::span<const double> series, double sample_rate,
                            double cutoff) {
  const int n = static_cast<int>(series.size());
  if (!(cutoff > 0.0)) throw std::invalid_argument("lowpass: cutoff must be positive");
  if (!(sample_rate > 2.0 * cutoff))
    throw std::invalid_argument("lowpass: sample rate must exceed twice the cutoff");
  if (n <= kFilterPad)
    throw std::invalid_argument("lowpass: series shorter than the filter warm-up");

  const Biquad q = design_lowpass(sample_rate, cutoff);

  // odd reflection on both ends
  std::vector<double> work;
  work.reserve(n + 2 * kFilterPad);
  for (int i = kFilterPad; i >= 1; --i)
    work.push_back(2.0 * series[0] - series[i]);
  work.insert(work.end(), series.begin(), series.end());
  for (int i = 1; i <= kFilterPad; ++i)
    work.push_back(2.0 * series[n - 1] - series[n - 1 - i]);

  filter_pass(q, work);
  std::reverse(work.begin(), work.end());
  filter_pass(q, work);
  std::reverse(work.begin(), work.end());

  return std::vector<double>(work.begin() + kFilterPad,
                             work.begin() + kFilterPad + n);
}

}  // namespace octoarm
