#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "octoarm/equilibrium.hpp"
#include "octoarm/pursuit.hpp"
#include "octoarm/rod.hpp"
#include "octoarm/scenario.hpp"
#include "octoarm/sensing.hpp"
#include "octoarm/types.hpp"

using namespace octoarm;

namespace {

// Fixed-step classic fourth-order integrator of the gain-free profile
// rho' = -cos(alpha), alpha' = sin(alpha) / rho, used as an oracle.
void rk4_free_profile(double& rho, double& alpha, double length, int steps) {
  const double h = length / steps;
  auto f_rho = [](double, double a) { return -std::cos(a); };
  auto f_alpha = [](double r, double a) { return std::sin(a) / r; };
  for (int k = 0; k < steps; ++k) {
    const double k1r = f_rho(rho, alpha), k1a = f_alpha(rho, alpha);
    const double k2r = f_rho(rho + 0.5 * h * k1r, alpha + 0.5 * h * k1a);
    const double k2a = f_alpha(rho + 0.5 * h * k1r, alpha + 0.5 * h * k1a);
    const double k3r = f_rho(rho + 0.5 * h * k2r, alpha + 0.5 * h * k2a);
    const double k3a = f_alpha(rho + 0.5 * h * k2r, alpha + 0.5 * h * k2a);
    const double k4r = f_rho(rho + h * k3r, alpha + h * k3a);
    const double k4a = f_alpha(rho + h * k3r, alpha + h * k3a);
    rho += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
    alpha += h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
  }
}

}  // namespace

TEST_CASE("zero bearing rides straight along the distance axis") {
  RodGeometry geom;
  const auto prof = integrate_equilibrium(0.3, 0.0, 50.0, geom.rest_length, geom);
  REQUIRE(!prof.captured);
  for (std::size_t k = 0; k < prof.s.size(); ++k) {
    CHECK(prof.rho[k] == doctest::Approx(0.3 - prof.s[k]).epsilon(1e-9));
    CHECK(prof.alpha[k] == 0.0);
    CHECK(prof.theta[k] == 0.0);
    CHECK(prof.x[k] == doctest::Approx(prof.s[k]).epsilon(1e-9));
    CHECK(std::abs(prof.y[k]) < 1e-12);
  }
  CHECK(prof.min_rho == doctest::Approx(0.1).epsilon(1e-9));
}

TEST_CASE("a target dead behind recedes as the arm advances") {
  RodGeometry geom;
  const auto prof = integrate_equilibrium(0.3, kPi, 40.0, geom.rest_length, geom);
  REQUIRE(!prof.captured);
  for (std::size_t k = 0; k < prof.s.size(); ++k)
    CHECK(prof.rho[k] == doctest::Approx(0.3 + prof.s[k]).epsilon(1e-8));
}

TEST_CASE("gain-free profile: conserved moment and an independent integrator") {
  RodGeometry geom;
  const double rho0 = 0.25, alpha0 = 0.7;
  const auto prof = integrate_equilibrium(rho0, alpha0, 0.0, geom.rest_length, geom);
  REQUIRE(!prof.captured);

  // rho * sin(alpha) is a first integral of the gain-free system
  const double c0 = rho0 * std::sin(alpha0);
  for (std::size_t k = 0; k < prof.s.size(); ++k)
    CHECK(prof.rho[k] * std::sin(prof.alpha[k]) ==
          doctest::Approx(c0).epsilon(1e-9));

  double rho = rho0, alpha = alpha0;
  rk4_free_profile(rho, alpha, geom.rest_length, 20000);
  CHECK(prof.rho.back() == doctest::Approx(rho).epsilon(1e-8));
  CHECK(prof.alpha.back() == doctest::Approx(alpha).epsilon(1e-8));

  // no steering ever happens
  for (double th : prof.theta) CHECK(th == 0.0);
}

TEST_CASE("strong gain captures a close perpendicular target") {
  RodGeometry geom;
  const double mu = 200.0 / geom.rest_length;
  const auto prof =
      integrate_equilibrium(0.1, 0.5 * kPi, mu, geom.rest_length, geom);
  CHECK(prof.captured);
  CHECK(prof.capture_s > 0.0);
  CHECK(prof.capture_s < geom.rest_length);
  CHECK(prof.min_rho <= 1e-4 * geom.rest_length * 1.05);
  CHECK(prof.min_rho <= 0.01 * geom.rest_length);
  // beyond the capture point the profile is padded with its final value
  CHECK(prof.rho.back() <= 1e-4 * geom.rest_length * 1.05);
}

TEST_CASE("input validation names the bad argument") {
  RodGeometry geom;
  CHECK_THROWS_AS(integrate_equilibrium(0.0, 0.1, 1.0, 0.1, geom),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_equilibrium(0.1, 0.1, -1.0, 0.1, geom),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_equilibrium(0.1, 0.1, 1.0, 0.3, geom),
                  std::invalid_argument);
  EquilibriumOptions opt;
  opt.n_output = 1;
  CHECK_THROWS_AS(integrate_equilibrium(0.1, 0.1, 1.0, 0.1, geom, opt),
                  std::invalid_argument);
}

TEST_CASE("closed-form bend angle") {
  const double L = 0.2;

  SUBCASE("starts flat for any slope") {
    for (double m : {0.5, 1.0, 2.0, -1.0})
      CHECK(std::abs(closed_form_theta(0.0, m, 150.0, L)) < 1e-12);
  }

  SUBCASE("approaches the line direction when the gain-length product is large") {
    const double m = 1.5;
    const double mu = 40.0 / L;
    CHECK(std::abs(closed_form_theta(L, m, mu, L) - std::atan(m)) < 1e-3);
  }

  SUBCASE("monotone rise bounded by the line direction") {
    const double m = 1.2;
    double prev = -1.0;
    for (int k = 0; k <= 100; ++k) {
      const double th = closed_form_theta(L * k / 100.0, m, 60.0, L);
      CHECK(th >= prev - 1e-12);
      CHECK(th <= std::atan(m) + 1e-12);
      prev = th;
    }
  }

  SUBCASE("frozen beyond the activation edge") {
    const double s_bar = 0.12;
    CHECK(closed_form_theta(0.19, 1.0, 80.0, s_bar) ==
          closed_form_theta(s_bar, 1.0, 80.0, s_bar));
  }

  SUBCASE("zero slope never bends") {
    CHECK(closed_form_theta(0.15, 0.0, 500.0, L) == 0.0);
  }
}

TEST_CASE("closed form and numerical integration agree") {
  const double L = 0.2;
  std::vector<double> grid(2001);
  for (int k = 0; k < 2001; ++k) grid[k] = L * k / 2000.0;

  auto compare = [&](double m, double mu, double s_bar) {
    const auto theta = integrate_slope_equilibrium(m, mu, s_bar, grid);
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.size(); ++k)
      worst = std::max(worst,
                       std::abs(theta[k] - closed_form_theta(grid[k], m, mu, s_bar)));
    return worst;
  };
  CHECK(compare(1.0, 150.0, 0.15) < 1e-6);
  CHECK(compare(-0.8, 300.0, L) < 1e-6);
  CHECK(compare(2.5, 50.0, 0.05) < 1e-6);
}

TEST_CASE("slope integrator rejects bad grids and gains") {
  const std::vector<double> descending{0.1, 0.05};
  CHECK_THROWS_AS(integrate_slope_equilibrium(1.0, 10.0, 0.2, descending),
                  std::invalid_argument);
  const std::vector<double> fine{0.0, 0.1};
  CHECK_THROWS_AS(integrate_slope_equilibrium(1.0, -10.0, 0.2, fine),
                  std::invalid_argument);
}

TEST_CASE("reach sweep: success, monotonicity and grid echo") {
  RodGeometry geom;
  const double L = geom.rest_length;

  SUBCASE("half an arm away is reachable and the sweep is monotone") {
    const auto res = verify_reach(0.5 * L, 0.01 * L, geom);
    CHECK(res.any_success);
    CHECK(res.monotone_min_rho);
    CHECK(res.rows.size() == 14);  // 0 plus 13 doublings
    CHECK(res.rows[0].mu_tilde == 0.0);
    // without gain the perpendicular start keeps the distance
    CHECK(res.rows[0].min_rho == doctest::Approx(0.5 * L).epsilon(1e-6));
    CHECK(res.smallest_success_mu > 0.0);
  }

  SUBCASE("a tolerance wider than the start needs no gain") {
    const auto res = verify_reach(0.5 * L, 0.6 * L, geom);
    CHECK(res.any_success);
    CHECK(res.smallest_success_mu == 0.0);
  }

  SUBCASE("a farther target never needs less gain") {
    const auto near = verify_reach(0.5 * L, 0.01 * L, geom);
    const auto far = verify_reach(0.9 * L, 0.01 * L, geom);
    REQUIRE(near.any_success);
    REQUIRE(far.any_success);
    CHECK(far.smallest_success_mu >= near.smallest_success_mu);
  }

  SUBCASE("a caller grid is echoed row by row") {
    const std::vector<double> grid{0.0, 40.0, 600.0};
    const auto res = verify_reach(0.5 * L, 0.01 * L, geom, grid);
    REQUIRE(res.rows.size() == 3);
    CHECK(res.rows[1].mu_tilde == 40.0);
    CHECK(res.rows[2].mu_tilde == 600.0);
  }

  SUBCASE("eps must be positive") {
    CHECK_THROWS_AS(verify_reach(0.1, 0.0, geom), std::invalid_argument);
  }
}

TEST_CASE("pointing sweep aligns the tip with the target direction") {
  RodGeometry geom;
  const double L = geom.rest_length;

  SUBCASE("two arm lengths away, the default grid finds an aligning gain") {
    const auto res = verify_pointing(2.0 * L, 0.01, geom);
    CHECK(res.any_success);
    bool some_row = false;
    for (const auto& row : res.rows)
      if (row.success) {
        CHECK(row.cos_alpha_tip >= 0.99);
        some_row = true;
      }
    CHECK(some_row);
  }

  SUBCASE("an already-aligned start needs no gain") {
    const auto res = verify_pointing(2.0 * L, 0.01, geom, {}, 0.0);
    CHECK(res.rows[0].success);
    CHECK(res.smallest_success_mu == 0.0);
  }

  SUBCASE("a looser tolerance never needs more gain") {
    const auto tight = verify_pointing(2.0 * L, 0.01, geom);
    const auto loose = verify_pointing(2.0 * L, 0.5, geom);
    REQUIRE(tight.any_success);
    REQUIRE(loose.any_success);
    CHECK(loose.smallest_success_mu <= tight.smallest_success_mu);
  }
}

TEST_CASE("twin-run stability probe") {
  Scenario sc;
  sc.rod.n_elements = 25;
  sc.control_mode = ControlMode::Target;
  sc.mu_tilde = 150.0;
  sc.target.initial = {0.1, 0.05};
  sc.duration = 0.4;
  sc.output_hz = 100.0;

  SUBCASE("zero noise leaves the twins identical") {
    const StabilityReport rep = verify_stability(sc, 0.0, 0.1, 1u);
    CHECK(rep.initial_distance == 0.0);
    CHECK(rep.final_ratio == 0.0);
    CHECK(rep.decayed);
    for (double d : rep.distance) CHECK(d == 0.0);
  }

  SUBCASE("noise produces a positive distance that is tracked from the start") {
    const StabilityReport rep = verify_stability(sc, 0.05, 0.1, 2u);
    CHECK(rep.initial_distance > 0.0);
    CHECK(rep.distance.front() == doctest::Approx(rep.initial_distance));
    CHECK(rep.t.front() == 0.0);
    CHECK(rep.distance.size() == rep.t.size());
  }

  SUBCASE("bad probe parameters throw") {
    CHECK_THROWS_AS(verify_stability(sc, -0.01, 0.1, 1u), std::invalid_argument);
    CHECK_THROWS_AS(verify_stability(sc, 0.01, 0.0, 1u), std::invalid_argument);
  }
}

TEST_CASE("radial distance slope matches the bearing cosine on a bent arm") {
  RodGeometry geom;
  Rod rod(geom);
  const RodState st = rod.state_from_curvature([](double s) {
    const double z = (s - 0.07) / 0.05;
    return 14.0 * std::exp(-0.5 * z * z);
  });
  const SensoryReading r = sense(st, {0.16, 0.10});
  const double ds = rod.ds();
  for (int i = 1; i < st.n_nodes() - 1; ++i) {
    if (r.rho[i] < 0.04) continue;  // the slope diverges near the target
    const double fd = (r.rho[i + 1] - r.rho[i - 1]) / (2.0 * ds);
    CHECK(std::abs(fd + std::cos(r.alpha[i])) < 1.5 * ds);
  }
}

TEST_CASE("profile centerline equals a unicycle driven by its own turning rate") {
  RodGeometry geom;
  const auto prof =
      integrate_equilibrium(0.15, 1.0, 30.0, geom.rest_length, geom);
  REQUIRE(!prof.captured);
  const double h = prof.s[1] - prof.s[0];
  PursuitAgent agent;
  agent.position = {0.0, 0.0};
  agent.heading = prof.theta.front();
  agent.speed = 1.0;  // arclength as time
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < prof.s.size(); ++k) {
    const double steering = (prof.theta[k + 1] - prof.theta[k]) / h;
    agent = unicycle_step(agent, steering, h);
    worst = std::max(worst, std::hypot(agent.position.x - prof.x[k + 1],
                                       agent.position.y - prof.y[k + 1]));
  }
  CHECK(worst < 1e-6);
}
