#include "octoarm/equilibrium.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "octoarm/scenario.hpp"
#include "octoarm/sensing.hpp"
#include "octoarm/simulation.hpp"

namespace octoarm {

namespace {

// Dormand-Prince 5(4) embedded pair with FSAL.
template <int N>
using Arr = std::array<double, N>;

template <int N, class Rhs>
void dp45_step(const Rhs& rhs, double s, const Arr<N>& y, const Arr<N>& f1,
               double h, Arr<N>& y_out, Arr<N>& f_out, Arr<N>& y_err) {
  constexpr double a21 = 1.0 / 5.0;
  constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
  constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
  constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                   a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
  constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0,
                   a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                   a65 = -5103.0 / 18656.0;
  constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                   b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
  // fifth-order minus fourth-order weights
  constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0,
                   e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                   e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

  Arr<N> k2, k3, k4, k5, k6, tmp;
  for (int i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * f1[i];
  k2 = rhs(s + h / 5.0, tmp);
  for (int i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * f1[i] + a32 * k2[i]);
  k3 = rhs(s + 3.0 * h / 10.0, tmp);
  for (int i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a41 * f1[i] + a42 * k2[i] + a43 * k3[i]);
  k4 = rhs(s + 4.0 * h / 5.0, tmp);
  for (int i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a51 * f1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
  k5 = rhs(s + 8.0 * h / 9.0, tmp);
  for (int i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (a61 * f1[i] + a62 * k2[i] + a63 * k3[i] +
                         a64 * k4[i] + a65 * k5[i]);
  k6 = rhs(s + h, tmp);
  for (int i = 0; i < N; ++i)
    y_out[i] = y[i] + h * (b1 * f1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] +
                           b6 * k6[i]);
  f_out = rhs(s + h, y_out);
  for (int i = 0; i < N; ++i)
    y_err[i] = h * (e1 * f1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                    e6 * k6[i] + e7 * f_out[i]);
}

// Cubic Hermite value of one component on the step [0, 1].
double hermite(double tau, double y0, double d0, double y1, double d1,
               double h) {
  const double t2 = tau * tau, t3 = t2 * tau;
  return (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + tau) * h * d0 +
         (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * h * d1;
}

double hermite_derivative(double tau, double y0, double d0, double y1,
                          double d1, double h) {
  const double t2 = tau * tau;
  return ((6 * t2 - 6 * tau) * y0 + (3 * t2 - 4 * tau + 1) * h * d0 +
          (-6 * t2 + 6 * tau) * y1 + (3 * t2 - 2 * tau) * h * d1) /
         h;
}

}  // namespace

EquilibriumProfile integrate_equilibrium(double rho0, double alpha0,
                                         double mu_tilde, double s_bar,
                                         const RodGeometry& geom,
                                         const EquilibriumOptions& opt) {
  geom.validate();
  if (!(rho0 > 0.0))
    throw std::invalid_argument("integrate_equilibrium: rho0 must be positive");
  if (mu_tilde < 0.0)
    throw std::invalid_argument("integrate_equilibrium: mu_tilde must be nonnegative");
  const double L = geom.rest_length;
  if (s_bar < 0.0 || s_bar > L)
    throw std::invalid_argument("integrate_equilibrium: s_bar outside [0, L]");
  if (opt.n_output < 2)
    throw std::invalid_argument("integrate_equilibrium: n_output must be >= 2");

  const double width = opt.smooth_width > 0.0 ? opt.smooth_width : 2.0 * geom.ds();
  const double floor = opt.capture_floor_rel * L;

  auto rhs = [&](double s, const Arr<5>& y) -> Arr<5> {
    const double mu = mu_tilde * smooth_step(s_bar - s, width);
    const double sa = std::sin(y[1]), ca = std::cos(y[1]);
    return {-ca, (1.0 / y[0] - mu) * sa, mu * sa, std::cos(y[2]),
            std::sin(y[2])};
  };

  EquilibriumProfile out;
  const int n = opt.n_output;
  out.s.resize(n);
  out.rho.resize(n);
  out.alpha.resize(n);
  out.theta.resize(n);
  out.x.resize(n);
  out.y.resize(n);

  Arr<5> y = {rho0, alpha0, 0.0, 0.0, 0.0};
  Arr<5> f = rhs(0.0, y);
  double s = 0.0;
  double h_try = L / 1000.0;
  out.min_rho = rho0;
  out.s_at_min_rho = 0.0;

  auto record = [&](int k) {
    out.s[k] = L * k / (n - 1);
    out.rho[k] = y[0];
    out.alpha[k] = y[1];
    out.theta[k] = y[2];
    out.x[k] = y[3];
    out.y[k] = y[4];
  };
  record(0);

  if (rho0 <= floor) {
    out.captured = true;
    out.capture_s = 0.0;
  }

  long evals = 0;
  for (int k = 1; k < n && !out.captured; ++k) {
    const double s_goal = L * k / (n - 1);
    while (s < s_goal) {
      const double h = std::min(h_try, s_goal - s);
      Arr<5> y1, f1, err;
      dp45_step<5>(rhs, s, y, f, h, y1, f1, err);
      if (++evals > 2'000'000)
        throw std::runtime_error("integrate_equilibrium: step budget exceeded");

      double err_norm = 0.0;
      for (int i = 0; i < 5; ++i) {
        const double scale =
            opt.atol + opt.rtol * std::max(std::abs(y[i]), std::abs(y1[i]));
        err_norm = std::max(err_norm, std::abs(err[i]) / scale);
      }
      if (err_norm > 1.0) {
        h_try = h * std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
        continue;
      }

      // interior distance minimum: rho' changes sign from - to +
      if (f[0] < 0.0 && f1[0] > 0.0) {
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (hermite_derivative(mid, y[0], f[0], y1[0], f1[0], h) < 0.0 ? lo : hi) = mid;
        }
        const double tau = 0.5 * (lo + hi);
        const double rho_min = hermite(tau, y[0], f[0], y1[0], f1[0], h);
        if (rho_min < out.min_rho) {
          out.min_rho = rho_min;
          out.s_at_min_rho = s + tau * h;
        }
      }

      if (y1[0] <= floor) {
        // locate the crossing on the Hermite interpolant and stop there
        double lo = 0.0, hi = 1.0;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          (hermite(mid, y[0], f[0], y1[0], f1[0], h) > floor ? lo : hi) = mid;
        }
        const double tau = 0.5 * (lo + hi);
        Arr<5> yc;
        for (int i = 0; i < 5; ++i)
          yc[i] = hermite(tau, y[i], f[i], y1[i], f1[i], h);
        y = yc;
        out.captured = true;
        out.capture_s = s + tau * h;
        if (y[0] < out.min_rho) {
          out.min_rho = y[0];
          out.s_at_min_rho = out.capture_s;
        }
        break;
      }

      s += h;
      y = y1;
      f = f1;
      if (y[0] < out.min_rho) {
        out.min_rho = y[0];
        out.s_at_min_rho = s;
      }
      if (err_norm > 0.0)
        h_try = h * std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)));
      else
        h_try = h * 5.0;
    }
    record(k);
  }

  // captured: the arm's remaining arclength stays at the capture point
  if (out.captured) {
    int k_from = static_cast<int>(std::ceil(out.capture_s / L * (n - 1)));
    k_from = std::max(k_from, 1);
    for (int k = k_from; k < n; ++k) record(k);
  }
  return out;
}

double closed_form_theta(double s, double slope, double mu_tilde,
                         double s_bar) {
  if (slope == 0.0) return 0.0;
  const double q = std::sqrt(1.0 + slope * slope);
  const double s_eff = std::min(s, s_bar);
  const double t = std::tanh(0.5 * mu_tilde * s_eff + std::atanh(1.0 / q));
  return 2.0 * std::atan((q * t - 1.0) / slope);
}

std::vector<double> integrate_slope_equilibrium(double slope, double mu_tilde,
                                                double s_bar,
                                                std::span<const double> s_grid,
                                                double rtol) {
  if (mu_tilde < 0.0)
    throw std::invalid_argument("integrate_slope_equilibrium: mu_tilde must be nonnegative");
  const double q = std::sqrt(1.0 + slope * slope);
  auto rhs = [&](double, const Arr<1>& y) -> Arr<1> {
    return {mu_tilde * (slope * std::cos(y[0]) - std::sin(y[0])) / q};
  };

  std::vector<double> theta(s_grid.size());
  Arr<1> y = {0.0};
  Arr<1> f = rhs(0.0, y);
  double s = 0.0;
  double h_try = 1.0 / std::max(mu_tilde, 1.0);
  for (std::size_t k = 0; k < s_grid.size(); ++k) {
    if (s_grid[k] < s)
      throw std::invalid_argument("integrate_slope_equilibrium: grid must ascend from 0");
    // beyond the activation edge the angle is frozen
    const double s_goal = std::min(s_grid[k], s_bar);
    while (s < s_goal) {
      const double h = std::min(h_try, s_goal - s);
      Arr<1> y1, f1, err;
      dp45_step<1>(rhs, s, y, f, h, y1, f1, err);
      const double scale =
          1.0e-14 + rtol * std::max(std::abs(y[0]), std::abs(y1[0]));
      const double err_norm = std::abs(err[0]) / scale;
      if (err_norm > 1.0) {
        h_try = h * std::max(0.2, 0.9 * std::pow(err_norm, -0.2));
        continue;
      }
      s += h;
      y = y1;
      f = f1;
      h_try = err_norm > 0.0
                  ? h * std::min(5.0, std::max(0.2, 0.9 * std::pow(err_norm, -0.2)))
                  : h * 5.0;
    }
    theta[k] = y[0];
  }
  return theta;
}

std::vector<double> default_mu_grid(double rest_length) {
  std::vector<double> grid = {0.0};
  for (double v = 1.0; v <= 4096.0; v *= 2.0) grid.push_back(v / rest_length);
  return grid;
}

namespace {

SweepResult run_sweep(double rho0, double eps, const RodGeometry& geom,
                      std::span<const double> mu_grid, double alpha0,
                      bool reach) {
  if (!(eps > 0.0)) throw std::invalid_argument("sweep: eps must be positive");
  std::vector<double> fallback;
  if (mu_grid.empty()) {
    fallback = default_mu_grid(geom.rest_length);
    mu_grid = fallback;
  }

  SweepResult res;
  EquilibriumOptions opt;
  opt.n_output = 801;
  double prev = std::numeric_limits<double>::infinity();
  for (double mu : mu_grid) {
    const auto prof =
        integrate_equilibrium(rho0, alpha0, mu, geom.rest_length, geom, opt);
    SweepRow row;
    row.mu_tilde = mu;
    row.min_rho = prof.min_rho;
    row.cos_alpha_tip = prof.captured ? 1.0 : prof.cos_alpha_tip();
    row.success = reach ? prof.min_rho <= eps
                        : (prof.captured || row.cos_alpha_tip >= 1.0 - eps);
    if (row.min_rho > prev + 1.0e-12) res.monotone_min_rho = false;
    prev = row.min_rho;
    if (row.success && !res.any_success) {
      res.any_success = true;
      res.smallest_success_mu = mu;
    }
    res.rows.push_back(row);
  }
  return res;
}

}  // namespace

SweepResult verify_reach(double rho0, double eps, const RodGeometry& geom,
                         std::span<const double> mu_grid, double alpha0) {
  return run_sweep(rho0, eps, geom, mu_grid, alpha0, true);
}

SweepResult verify_pointing(double rho0, double eps, const RodGeometry& geom,
                            std::span<const double> mu_grid, double alpha0) {
  return run_sweep(rho0, eps, geom, mu_grid, alpha0, false);
}

StabilityReport verify_stability(const Scenario& scenario,
                                 double kappa_noise_rel, double settle_time,
                                 unsigned seed) {
  if (kappa_noise_rel < 0.0)
    throw std::invalid_argument("verify_stability: noise must be nonnegative");
  if (!(settle_time > 0.0))
    throw std::invalid_argument("verify_stability: settle_time must be positive");

  SimulationResult base = simulate(scenario);
  if (!base.stats.completed)
    throw NumericalError("verify_stability: base run failed at t = " +
                             std::to_string(base.stats.fail_time),
                         base.stats.fail_time);

  Rod rod(scenario.rod);
  const int ne = scenario.rod.n_elements;
  const double ds = rod.ds();

  // element curvatures of the converged state
  std::vector<double> k_eq(ne);
  double peak = 0.0;
  for (int e = 0; e < ne; ++e) {
    k_eq[e] = (base.final_state.theta[e + 1] - base.final_state.theta[e]) / ds;
    peak = std::max(peak, std::abs(k_eq[e]));
  }

  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<double> k_pert(ne);
  for (int e = 0; e < ne; ++e)
    k_pert[e] = k_eq[e] + kappa_noise_rel * peak * uni(rng);

  // both twins rebuilt through the same path, velocities zeroed
  auto rebuild = [&](const std::vector<double>& k_elem) {
    RodState st = rod.straight_state();
    for (int e = 0; e < ne; ++e) {
      st.theta[e + 1] = st.theta[e] + k_elem[e] * ds;
      const double th = 0.5 * (st.theta[e] + st.theta[e + 1]);
      st.x[e + 1] = st.x[e] + ds * std::cos(th);
      st.y[e + 1] = st.y[e] + ds * std::sin(th);
    }
    st.time = base.final_state.time;
    return st;
  };
  RodState st_a = rebuild(k_eq);
  RodState st_b = rebuild(k_pert);

  auto distance = [&](const RodState& a, const RodState& b) {
    double acc = 0.0;
    for (int e = 0; e < ne; ++e) {
      const double da = (a.theta[e + 1] - a.theta[e]) / ds;
      const double db = (b.theta[e + 1] - b.theta[e]) / ds;
      acc += (da - db) * (da - db) * ds;
    }
    return std::sqrt(acc);
  };

  Rod rod_b(scenario.rod);
  const double dt = scenario.dt > 0.0 ? scenario.dt : rod.default_dt();
  const long n_steps = std::lround(settle_time / dt);
  const long stride =
      std::max<long>(1, std::lround(1.0 / (scenario.output_hz * dt)));

  StabilityReport rep;
  rep.initial_distance = distance(st_a, st_b);
  rep.t.push_back(0.0);
  rep.distance.push_back(rep.initial_distance);
  for (long i = 0; i < n_steps; ++i) {
    closed_loop_step(rod, st_a, scenario, dt);
    closed_loop_step(rod_b, st_b, scenario, dt);
    if ((i + 1) % stride == 0 || i + 1 == n_steps) {
      rep.t.push_back((i + 1) * dt);
      rep.distance.push_back(distance(st_a, st_b));
    }
  }
  rep.final_ratio = rep.initial_distance > 0.0
                        ? rep.distance.back() / rep.initial_distance
                        : 0.0;
  rep.decayed = rep.initial_distance == 0.0 || rep.final_ratio < 0.1;
  return rep;
}

}  // namespace octoarm
