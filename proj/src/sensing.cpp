#include "octoarm/sensing.hpp"

#include <cmath>

namespace octoarm {

namespace {
constexpr double kDegenerateRho = 1.0e-12;  // target sits on a node [m]
}

SensoryReading sense(const RodState& st, Vec2 target) {
  const int n = st.n_nodes();
  if (n < 2) throw std::invalid_argument("sense: needs >= 2 nodes");

  SensoryReading r;
  r.target = target;
  r.rho_x.resize(n);
  r.rho_y.resize(n);
  r.rho.resize(n);
  r.alpha.resize(n);
  r.tangent_x.resize(n);
  r.tangent_y.resize(n);

  int best = -1;        // node sitting on the target, if any
  int argmin = 0;
  for (int i = 0; i < n; ++i) {
    // centered-difference tangent, one-sided at the ends
    double tx, ty;
    if (i == 0) {
      tx = st.x[1] - st.x[0];
      ty = st.y[1] - st.y[0];
    } else if (i == n - 1) {
      tx = st.x[n - 1] - st.x[n - 2];
      ty = st.y[n - 1] - st.y[n - 2];
    } else {
      tx = st.x[i + 1] - st.x[i - 1];
      ty = st.y[i + 1] - st.y[i - 1];
    }
    const double tn = std::sqrt(tx * tx + ty * ty);
    tx /= tn;
    ty /= tn;
    r.tangent_x[i] = tx;
    r.tangent_y[i] = ty;

    const double px = target.x - st.x[i];
    const double py = target.y - st.y[i];
    const double rho = std::sqrt(px * px + py * py);
    r.rho_x[i] = px;
    r.rho_y[i] = py;
    r.rho[i] = rho;

    if (rho < kDegenerateRho) {
      r.alpha[i] = 0.0;
      if (best < 0) best = i;
    } else {
      r.alpha[i] = wrap_angle(std::atan2(tx * py - ty * px, tx * px + ty * py));
    }
    if (r.rho[i] < r.rho[argmin]) argmin = i;  // strict: ties keep smallest s
  }

  r.closest_node = best >= 0 ? best : argmin;
  r.s_bar = st.s_at(r.closest_node);
  r.min_rho = r.rho[r.closest_node];
  return r;
}

double smooth_step(double x, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("smooth_step: width must be positive");
  // value 1/2 at x = 0; the rate makes sigma(-3w) ~ 1.2e-4, so the gain is
  // negligible three widths beyond the activation edge
  return 1.0 / (1.0 + std::exp(-3.0 * x / width));
}

std::vector<double> gain_profile(double s_bar, std::span<const double> node_EI,
                                 double ds, double mu_tilde, double width) {
  if (mu_tilde < 0.0)
    throw std::invalid_argument("gain_profile: mu_tilde must be nonnegative");
  const double w = width > 0.0 ? width : 2.0 * ds;
  const int n = static_cast<int>(node_EI.size());
  std::vector<double> mu(n);
  for (int i = 0; i < n; ++i)
    mu[i] = mu_tilde * node_EI[i] * smooth_step(s_bar - ds * i, w);
  return mu;
}

namespace {

ControlField split_couple(std::vector<double> u) {
  ControlField f;
  const int n = static_cast<int>(u.size());
  f.u_top.resize(n);
  f.u_bottom.resize(n);
  for (int i = 0; i < n; ++i) {
    f.u_top[i] = u[i] >= 0.0 ? u[i] : 0.0;
    f.u_bottom[i] = u[i] < 0.0 ? u[i] : 0.0;
  }
  f.u = std::move(u);
  return f;
}

}  // namespace

ControlField control_couple(const SensoryReading& reading,
                            std::span<const double> gain) {
  const int n = static_cast<int>(reading.alpha.size());
  if (static_cast<int>(gain.size()) != n)
    throw std::invalid_argument("control_couple: gain size mismatch");
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) u[i] = -gain[i] * std::sin(reading.alpha[i]);
  return split_couple(std::move(u));
}

ControlField slope_feedback_couple(const RodState& st, double slope,
                                   std::span<const double> gain) {
  const int n = st.n_nodes();
  if (static_cast<int>(gain.size()) != n)
    throw std::invalid_argument("slope_feedback_couple: gain size mismatch");
  const double norm = std::sqrt(1.0 + slope * slope);
  std::vector<double> u(n);
  for (int i = 0; i < n; ++i) {
    const double sin_alpha =
        (slope * std::cos(st.theta[i]) - std::sin(st.theta[i])) / norm;
    u[i] = -gain[i] * sin_alpha;
  }
  return split_couple(std::move(u));
}

}  // namespace octoarm
