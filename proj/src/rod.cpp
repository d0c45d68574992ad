#include "octoarm/rod.hpp"

#include <cmath>

#include "octoarm/types.hpp"

namespace octoarm {

namespace {

// Shear rigidity: incompressible material (G = E/3) with the standard 4/3
// cross-section factor for circular sections.
constexpr double kShearFactor = 4.0 / 3.0;

// Stretch and shear act as penalties enforcing the inextensible, unshearable
// limit; scaling them up tightens the constraint. With the default time step
// the axial wave frequency satisfies omega*dt = 0.5*sqrt(scale), so 4 keeps
// a factor-2 margin under the Verlet stability threshold omega*dt = 2.
constexpr double kPenaltyScale = 4.0;

}  // namespace

Rod::Rod(const RodGeometry& geom) : geom_(geom) {
  geom_.validate();
  const int n = geom_.n_nodes();
  const int ne = geom_.n_elements;
  const double ds = geom_.ds();

  node_w_.resize(n);
  node_mass_.resize(n);
  node_inertia_.resize(n);
  node_EI_.resize(n);
  for (int i = 0; i < n; ++i) {
    const double s = ds * i;
    node_w_[i] = (i == 0 || i == n - 1) ? 0.5 * ds : ds;
    node_mass_[i] = geom_.density * geom_.area(s) * node_w_[i];
    node_inertia_[i] = geom_.density * geom_.second_moment(s) * node_w_[i];
    node_EI_[i] = geom_.bending_stiffness(s);
  }

  elem_EA_.resize(ne);
  elem_GA_.resize(ne);
  elem_EI_.resize(ne);
  const double shear_modulus = geom_.youngs_modulus / 3.0;
  for (int e = 0; e < ne; ++e) {
    const double s_mid = ds * (e + 0.5);
    const double area = geom_.area(s_mid);
    elem_EA_[e] = kPenaltyScale * geom_.youngs_modulus * area;
    elem_GA_[e] = kPenaltyScale * kShearFactor * shear_modulus * area;
    elem_EI_[e] = geom_.bending_stiffness(s_mid);
  }

  qnx_.resize(ne);
  qny_.resize(ne);
  me_.resize(ne);
  taue_.resize(ne);
}

double Rod::default_dt() const {
  return 0.25 * geom_.ds() *
         std::sqrt(geom_.density / geom_.youngs_modulus);
}

RodState Rod::straight_state() const { return state_from_curvature(nullptr); }

RodState Rod::state_from_curvature(
    const std::function<double(double)>& kappa_of_s) const {
  const int n = geom_.n_nodes();
  const double ds = geom_.ds();

  RodState st;
  st.ds = ds;
  st.x.assign(n, 0.0);
  st.y.assign(n, 0.0);
  st.theta.assign(n, 0.0);
  st.vx.assign(n, 0.0);
  st.vy.assign(n, 0.0);
  st.omega.assign(n, 0.0);
  st.kappa.assign(n, 0.0);
  st.n1.assign(n, 0.0);
  st.n2.assign(n, 0.0);
  st.m.assign(n, 0.0);

  // Angle from midpoint curvature samples, positions by exact unit-speed
  // increments: the initial discrete stretch is exactly 1 on every element.
  for (int i = 0; i + 1 < n; ++i) {
    double k_mid = 0.0;
    if (kappa_of_s) {
      k_mid = kappa_of_s(ds * (i + 0.5));
      if (!std::isfinite(k_mid))
        throw std::invalid_argument(
            "initial curvature profile is not finite at s = " +
            std::to_string(ds * (i + 0.5)));
    }
    st.theta[i + 1] = st.theta[i] + k_mid * ds;
    const double th_mid = 0.5 * (st.theta[i] + st.theta[i + 1]);
    st.x[i + 1] = st.x[i] + ds * std::cos(th_mid);
    st.y[i + 1] = st.y[i] + ds * std::sin(th_mid);
  }

  refresh_derived(st);
  return st;
}

void Rod::step(RodState& st, std::span<const double> external_fx,
               std::span<const double> external_fy,
               std::span<const double> couple_density, double dt) {
  const int n = geom_.n_nodes();
  const int ne = geom_.n_elements;
  const double ds = geom_.ds();

  if (!(dt > 0.0)) throw std::invalid_argument("step: dt must be positive");
  if (st.n_nodes() != n) throw std::invalid_argument("step: state grid mismatch");
  if (static_cast<int>(external_fx.size()) != n ||
      static_cast<int>(external_fy.size()) != n ||
      static_cast<int>(couple_density.size()) != n)
    throw std::invalid_argument("step: field size mismatch");

  if (dt != cached_dt_) {
    damp_trans_.resize(n);
    damp_rot_.resize(n);
    for (int i = 0; i < n; ++i) {
      const double s = ds * i;
      damp_trans_[i] = std::exp(-geom_.damping * dt /
                                (geom_.density * geom_.area(s)));
      damp_rot_[i] = std::exp(-geom_.damping * dt /
                              (geom_.density * geom_.second_moment(s)));
    }
    cached_dt_ = dt;
  }

  const double half = 0.5 * dt;

  // drift
  for (int i = 1; i < n; ++i) {
    st.x[i] += half * st.vx[i];
    st.y[i] += half * st.vy[i];
    st.theta[i] += half * st.omega[i];
  }

  // element resultants at the half-step configuration
  for (int e = 0; e < ne; ++e) {
    const int i = e, j = e + 1;
    const double dx = (st.x[j] - st.x[i]) / ds;
    const double dy = (st.y[j] - st.y[i]) / ds;
    const double th = 0.5 * (st.theta[i] + st.theta[j]);
    const double c = std::cos(th), s = std::sin(th);
    const double nu1 = c * dx + s * dy;
    const double nu2 = -s * dx + c * dy;
    const double n1e = elem_EA_[e] * (nu1 - 1.0);
    const double n2e = elem_GA_[e] * nu2;
    qnx_[e] = c * n1e - s * n2e;
    qny_[e] = s * n1e + c * n2e;
    me_[e] = elem_EI_[e] * (st.theta[j] - st.theta[i]) / ds;
    // torque each element exerts on both of its nodes through the angle
    // dependence of the strain measures
    taue_[e] = 0.5 * ds * (n2e * nu1 - n1e * nu2);
  }

  // kick (base node stays clamped)
  for (int i = 1; i < n; ++i) {
    const double fx_int = (i < ne ? qnx_[i] : 0.0) - qnx_[i - 1];
    const double fy_int = (i < ne ? qny_[i] : 0.0) - qny_[i - 1];
    const double torque = ((i < ne ? me_[i] : 0.0) - me_[i - 1]) +
                          (i < ne ? taue_[i] : 0.0) + taue_[i - 1];
    const double fx = fx_int + external_fx[i] * node_w_[i];
    const double fy = fy_int + external_fy[i] * node_w_[i];
    const double tq = torque + couple_density[i] * node_w_[i];
    st.vx[i] += dt * fx / node_mass_[i];
    st.vy[i] += dt * fy / node_mass_[i];
    st.omega[i] += dt * tq / node_inertia_[i];
    // exact damping substep; unconditionally stable even where the
    // rotational damping rate far exceeds 1/dt (thin tip)
    st.vx[i] *= damp_trans_[i];
    st.vy[i] *= damp_trans_[i];
    st.omega[i] *= damp_rot_[i];
  }

  // drift
  for (int i = 1; i < n; ++i) {
    st.x[i] += half * st.vx[i];
    st.y[i] += half * st.vy[i];
    st.theta[i] += half * st.omega[i];
  }

  st.x[0] = st.y[0] = st.theta[0] = 0.0;
  st.vx[0] = st.vy[0] = st.omega[0] = 0.0;

  st.time += dt;
  refresh_derived(st);
  check_finite(st);
}

void Rod::refresh_derived(RodState& st) const {
  const int n = geom_.n_nodes();
  const int ne = geom_.n_elements;
  const double ds = geom_.ds();

  // node curvature: centered inside, one-sided at the ends
  st.kappa[0] = (st.theta[1] - st.theta[0]) / ds;
  for (int i = 1; i < n - 1; ++i)
    st.kappa[i] = (st.theta[i + 1] - st.theta[i - 1]) / (2.0 * ds);
  st.kappa[n - 1] = (st.theta[n - 1] - st.theta[n - 2]) / ds;

  // element resultants at the current configuration, averaged to nodes
  double worst = 0.0;
  double prev_n1 = 0.0, prev_n2 = 0.0, prev_m = 0.0;
  for (int e = 0; e < ne; ++e) {
    const int i = e, j = e + 1;
    const double dx = (st.x[j] - st.x[i]) / ds;
    const double dy = (st.y[j] - st.y[i]) / ds;
    const double th = 0.5 * (st.theta[i] + st.theta[j]);
    const double c = std::cos(th), s = std::sin(th);
    const double nu1 = c * dx + s * dy;
    const double nu2 = -s * dx + c * dy;
    const double n1e = elem_EA_[e] * (nu1 - 1.0);
    const double n2e = elem_GA_[e] * nu2;
    const double me = elem_EI_[e] * (st.theta[j] - st.theta[i]) / ds;
    worst = std::max(worst, std::abs(std::sqrt(nu1 * nu1 + nu2 * nu2) - 1.0));
    if (e == 0) {
      st.n1[0] = n1e;
      st.n2[0] = n2e;
      st.m[0] = me;
    } else {
      st.n1[e] = 0.5 * (prev_n1 + n1e);
      st.n2[e] = 0.5 * (prev_n2 + n2e);
      st.m[e] = 0.5 * (prev_m + me);
    }
    prev_n1 = n1e;
    prev_n2 = n2e;
    prev_m = me;
  }
  st.n1[n - 1] = 0.0;  // free end
  st.n2[n - 1] = 0.0;
  st.m[n - 1] = 0.0;
  st.max_stretch_dev = worst;
}

void Rod::check_finite(const RodState& st) const {
  auto bad = [](const std::vector<double>& v) {
    for (double a : v)
      if (!std::isfinite(a)) return true;
    return false;
  };
  if (bad(st.x) || bad(st.y) || bad(st.theta) || bad(st.vx) || bad(st.vy) ||
      bad(st.omega) || bad(st.kappa) || bad(st.n1) || bad(st.n2) || bad(st.m))
    throw NumericalError(
        "non-finite state at t = " + std::to_string(st.time), st.time);
}

EnergyBreakdown Rod::energy_diagnostics(const RodState& st) const {
  const int n = geom_.n_nodes();
  const double ds = geom_.ds();
  EnergyBreakdown out;
  for (int i = 0; i < n; ++i) {
    const double s = ds * i;
    const double w = node_w_[i];
    const double v2 = st.vx[i] * st.vx[i] + st.vy[i] * st.vy[i];
    out.kinetic += w * 0.5 *
                   (geom_.density * geom_.area(s) * v2 +
                    geom_.density * geom_.second_moment(s) * st.omega[i] *
                        st.omega[i]);
    out.elastic += w * 0.5 * node_EI_[i] * st.kappa[i] * st.kappa[i];
  }
  return out;
}

double Rod::element_bending_energy(const RodState& st) const {
  const double ds = geom_.ds();
  double e_sum = 0.0;
  for (int e = 0; e < geom_.n_elements; ++e) {
    const double ke = (st.theta[e + 1] - st.theta[e]) / ds;
    e_sum += 0.5 * elem_EI_[e] * ke * ke * ds;
  }
  return e_sum;
}

double Rod::constraint_energy(const RodState& st) const {
  const double ds = geom_.ds();
  double e_sum = 0.0;
  for (int e = 0; e < geom_.n_elements; ++e) {
    const int i = e, j = e + 1;
    const double dx = (st.x[j] - st.x[i]) / ds;
    const double dy = (st.y[j] - st.y[i]) / ds;
    const double th = 0.5 * (st.theta[i] + st.theta[j]);
    const double c = std::cos(th), s = std::sin(th);
    const double nu1 = c * dx + s * dy;
    const double nu2 = -s * dx + c * dy;
    e_sum += 0.5 * ds *
             (elem_EA_[e] * (nu1 - 1.0) * (nu1 - 1.0) +
              elem_GA_[e] * nu2 * nu2);
  }
  return e_sum;
}

double Rod::max_stretch_deviation(const RodState& st) const {
  const double ds = geom_.ds();
  double worst = 0.0;
  for (int e = 0; e < geom_.n_elements; ++e) {
    const double dx = (st.x[e + 1] - st.x[e]) / ds;
    const double dy = (st.y[e + 1] - st.y[e]) / ds;
    worst = std::max(worst, std::abs(std::sqrt(dx * dx + dy * dy) - 1.0));
  }
  return worst;
}

std::vector<double> couple_gradient(std::span<const double> u, double ds) {
  const int n = static_cast<int>(u.size());
  if (n < 2) throw std::invalid_argument("couple_gradient: needs >= 2 nodes");
  std::vector<double> g(n);
  g[0] = (u[1] - u[0]) / ds;
  for (int i = 1; i < n - 1; ++i) g[i] = (u[i + 1] - u[i - 1]) / (2.0 * ds);
  g[n - 1] = (u[n - 1] - u[n - 2]) / ds;
  return g;
}

}  // namespace octoarm
