#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "octoarm/rod.hpp"
#include "octoarm/types.hpp"

using namespace octoarm;

namespace {

RodGeometry uniform_geometry() {
  RodGeometry g;
  g.tip_radius = g.base_radius;  // constant cross section
  return g;
}

std::vector<double> zeros(int n) { return std::vector<double>(n, 0.0); }

// Discrete energy the stepper works with: exact kinetic plus element bending
// plus the stretch/shear penalty energy.
double total_energy(const Rod& rod, const RodState& st) {
  return rod.energy_diagnostics(st).kinetic + rod.element_bending_energy(st) +
         rod.constraint_energy(st);
}

}  // namespace

TEST_CASE("taper is linear in arclength and sections are circular") {
  RodGeometry g;
  CHECK(g.radius(0.0) == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(g.radius(g.rest_length) == doctest::Approx(0.001).epsilon(1e-14));
  CHECK(g.radius(0.5 * g.rest_length) == doctest::Approx(0.0055).epsilon(1e-14));
  for (double s : {0.0, 0.03, 0.11, 0.2}) {
    const double r = g.radius(s);
    CHECK(g.area(s) == doctest::Approx(kPi * r * r).epsilon(1e-14));
    // pi r^4 / 4 written through the area
    CHECK(g.second_moment(s) ==
          doctest::Approx(g.area(s) * g.area(s) / (4.0 * kPi)).epsilon(1e-14));
    CHECK(g.bending_stiffness(s) ==
          doctest::Approx(g.youngs_modulus * g.second_moment(s)).epsilon(1e-14));
  }
}

TEST_CASE("geometry validation names the offending field") {
  auto expect_throw = [](RodGeometry g, const char* field) {
    try {
      g.validate();
      FAIL_CHECK("expected a throw for ", field);
    } catch (const std::invalid_argument& e) {
      CHECK(std::string(e.what()).find(field) != std::string::npos);
    }
  };
  RodGeometry g;
  g.rest_length = 0.0;
  expect_throw(g, "rest_length");
  g = RodGeometry{};
  g.n_elements = 1;
  expect_throw(g, "n_elements");
  g = RodGeometry{};
  g.tip_radius = -0.001;
  expect_throw(g, "tip_radius");
  g = RodGeometry{};
  g.youngs_modulus = 0.0;
  expect_throw(g, "youngs_modulus");
  g = RodGeometry{};
  g.damping = -1.0;
  expect_throw(g, "damping");
  CHECK_NOTHROW(RodGeometry{}.validate());
}

TEST_CASE("straight state lies on the axis with zero strain everywhere") {
  Rod rod((RodGeometry()));
  const RodState st = rod.straight_state();
  const int n = rod.n_nodes();
  for (int i = 0; i < n; ++i) {
    CHECK(st.x[i] == doctest::Approx(rod.ds() * i).epsilon(1e-12));
    CHECK(st.y[i] == 0.0);
    CHECK(st.theta[i] == 0.0);
    CHECK(st.kappa[i] == 0.0);
    CHECK(st.n1[i] == doctest::Approx(0.0).scale(1.0).epsilon(1e-9));
    CHECK(st.n2[i] == 0.0);
    CHECK(st.m[i] == 0.0);
  }
  CHECK(st.max_stretch_dev < 1e-12);
  CHECK(rod.max_stretch_deviation(st) < 1e-12);
}

TEST_CASE("constant curvature builds a circular arc") {
  RodGeometry g;
  Rod rod(g);
  const double c = 5.0;
  const RodState st = rod.state_from_curvature([&](double) { return c; });
  const int n = rod.n_nodes();
  const double ds = rod.ds();
  const double L = g.rest_length;

  for (int i = 0; i < n; ++i)
    CHECK(st.theta[i] == doctest::Approx(c * ds * i).epsilon(1e-12));
  for (int i = 0; i < n; ++i)
    CHECK(st.kappa[i] == doctest::Approx(c).epsilon(1e-10));

  // closed form of the midpoint-angle sum (Lagrange identity), exact for the
  // discrete construction
  const double denom = 2.0 * std::sin(0.5 * c * ds);
  CHECK(st.x[n - 1] == doctest::Approx(ds * std::sin(c * L) / denom).epsilon(1e-12));
  CHECK(st.y[n - 1] ==
        doctest::Approx(ds * (1.0 - std::cos(c * L)) / denom).epsilon(1e-12));

  // and the continuum circle of radius 1/c to discretization accuracy
  CHECK(st.x[n - 1] == doctest::Approx(std::sin(c * L) / c).epsilon(1e-4));
  CHECK(st.y[n - 1] == doctest::Approx((1.0 - std::cos(c * L)) / c).epsilon(1e-4));

  CHECK(rod.max_stretch_deviation(st) < 1e-12);
}

TEST_CASE("a non-finite curvature profile is rejected") {
  Rod rod((RodGeometry()));
  CHECK_THROWS_AS(rod.state_from_curvature([](double s) {
                    return s > 0.1 ? std::nan("") : 0.0;
                  }),
                  std::invalid_argument);
}

TEST_CASE("energy diagnostics vanish at rest and match closed forms") {
  SUBCASE("straight rest state carries no energy") {
    Rod rod((RodGeometry()));
    const auto e = rod.energy_diagnostics(rod.straight_state());
    CHECK(e.kinetic == 0.0);
    CHECK(e.elastic == 0.0);
    CHECK(rod.constraint_energy(rod.straight_state()) < 1e-15);
  }

  SUBCASE("uniform bend of a uniform rod: E = EI c^2 L / 2") {
    const RodGeometry g = uniform_geometry();
    Rod rod(g);
    const double c = 3.0;
    const RodState st = rod.state_from_curvature([&](double) { return c; });
    const double EI = g.bending_stiffness(0.0);
    const double expected = 0.5 * EI * c * c * g.rest_length;
    CHECK(rod.energy_diagnostics(st).elastic ==
          doctest::Approx(expected).epsilon(1e-12));
    CHECK(rod.element_bending_energy(st) ==
          doctest::Approx(expected).epsilon(1e-12));
  }

  SUBCASE("tapered rod matches an independent trapezoid sum") {
    RodGeometry g;
    Rod rod(g);
    RodState st = rod.state_from_curvature(
        [](double s) { return 12.0 * std::exp(-80.0 * (s - 0.07) * (s - 0.07)); });
    const int n = rod.n_nodes();
    const double ds = rod.ds();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    for (int i = 0; i < n; ++i) {
      st.vx[i] = 0.2 * uni(rng);
      st.vy[i] = 0.2 * uni(rng);
      st.omega[i] = 2.0 * uni(rng);
    }
    double kinetic = 0.0, elastic = 0.0;
    for (int i = 0; i < n; ++i) {
      const double w = (i == 0 || i == n - 1) ? 0.5 * ds : ds;
      const double s = ds * i;
      kinetic += w * 0.5 * g.density *
                 (g.area(s) * (st.vx[i] * st.vx[i] + st.vy[i] * st.vy[i]) +
                  g.second_moment(s) * st.omega[i] * st.omega[i]);
      elastic += w * 0.5 * g.bending_stiffness(s) * st.kappa[i] * st.kappa[i];
    }
    const auto e = rod.energy_diagnostics(st);
    CHECK(e.kinetic == doctest::Approx(kinetic).epsilon(1e-12));
    CHECK(e.elastic == doctest::Approx(elastic).epsilon(1e-12));
  }
}

TEST_CASE("zero fields leave the straight rod at rest") {
  Rod rod((RodGeometry()));
  RodState st = rod.straight_state();
  const RodState ref = st;
  const int n = rod.n_nodes();
  const auto fx = zeros(n), fy = zeros(n), cpl = zeros(n);
  const double dt = rod.default_dt();
  for (int k = 0; k < 200; ++k) rod.step(st, fx, fy, cpl, dt);
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(st.x[i] - ref.x[i]) < 1e-12);
    CHECK(std::abs(st.y[i]) < 1e-12);
    CHECK(std::abs(st.theta[i]) < 1e-12);
    CHECK(std::abs(st.vx[i]) < 1e-10);
    CHECK(std::abs(st.vy[i]) < 1e-10);
    CHECK(std::abs(st.omega[i]) < 1e-10);
  }
  CHECK(st.time == doctest::Approx(200 * dt).epsilon(1e-12));
}

TEST_CASE("a tip couple holds the matching bend as a fixed point") {
  // kappa(s) = M / EI(s) balances a point couple M at the free end exactly on
  // the discrete grid, so the state must not move.
  auto run_case = [](const RodGeometry& g, double M) {
    Rod rod(g);
    RodState st = rod.state_from_curvature(
        [&](double s) { return M / g.bending_stiffness(s); });
    const RodState ref = st;
    const int n = rod.n_nodes();
    auto fx = zeros(n), fy = zeros(n), cpl = zeros(n);
    cpl[n - 1] = M / rod.node_weights()[n - 1];
    const double dt = rod.default_dt();
    for (int k = 0; k < 500; ++k) rod.step(st, fx, fy, cpl, dt);
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::abs(st.x[i] - ref.x[i]));
      worst = std::max(worst, std::abs(st.y[i] - ref.y[i]));
      worst = std::max(worst, std::abs(st.theta[i] - ref.theta[i]));
      worst = std::max(worst, std::abs(st.vx[i]));
      worst = std::max(worst, std::abs(st.vy[i]));
    }
    CHECK(worst < 1e-9);
  };
  run_case(uniform_geometry(), 2.0e-5);
  run_case(RodGeometry{}, 1.0e-8);
}

TEST_CASE("free release never gains energy") {
  RodGeometry g;
  Rod rod(g);
  RodState st = rod.state_from_curvature([](double s) {
    const double z = (s - 0.08) / 0.03;
    return 20.0 * std::exp(-0.5 * z * z);
  });
  const int n = rod.n_nodes();
  const auto fx = zeros(n), fy = zeros(n), cpl = zeros(n);
  const double dt = rod.default_dt();
  double prev = total_energy(rod, st);
  for (int k = 0; k < 3000; ++k) {
    rod.step(st, fx, fy, cpl, dt);
    const double now = total_energy(rod, st);
    REQUIRE(now <= prev + 1e-9);
    prev = now;
  }
  // damping must have removed a visible share of the initial store
  CHECK(prev < 0.999 * total_energy(rod, rod.state_from_curvature([](double s) {
          const double z = (s - 0.08) / 0.03;
          return 20.0 * std::exp(-0.5 * z * z);
        })));
}

TEST_CASE("base stays clamped and the tip carries no resultant") {
  RodGeometry g;
  Rod rod(g);
  RodState st = rod.state_from_curvature([](double s) { return 30.0 * s; });
  const int n = rod.n_nodes();
  std::vector<double> fx(n), fy(n), cpl(n);
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  const double dt = rod.default_dt();
  for (int k = 0; k < 50; ++k) {
    for (int i = 0; i < n; ++i) {
      fx[i] = 0.5 * uni(rng);
      fy[i] = 0.5 * uni(rng);
      cpl[i] = 1e-4 * uni(rng);
    }
    rod.step(st, fx, fy, cpl, dt);
    CHECK(st.x[0] == 0.0);
    CHECK(st.y[0] == 0.0);
    CHECK(st.theta[0] == 0.0);
    CHECK(st.vx[0] == 0.0);
    CHECK(st.vy[0] == 0.0);
    CHECK(st.omega[0] == 0.0);
    CHECK(st.n1[n - 1] == 0.0);
    CHECK(st.n2[n - 1] == 0.0);
    CHECK(st.m[n - 1] == 0.0);
  }
}

TEST_CASE("reflection symmetry of the dynamics") {
  RodGeometry g;
  Rod rod_a(g), rod_b(g);
  auto kappa0 = [](double s) {
    const double z = (s - 0.07) / 0.04;
    return 18.0 * std::exp(-0.5 * z * z);
  };
  RodState a = rod_a.state_from_curvature(kappa0);
  RodState b = rod_b.state_from_curvature([&](double s) { return -kappa0(s); });
  const int n = rod_a.n_nodes();
  const double ds = rod_a.ds();
  std::vector<double> fx(n), fy(n), cpl(n), fy_m(n), cpl_m(n);
  for (int i = 0; i < n; ++i) {
    const double s = ds * i;
    fx[i] = 0.3 * std::sin(7.0 * s);
    fy[i] = 0.2 * std::cos(9.0 * s);
    cpl[i] = 1e-5 * std::sin(5.0 * s);
    fy_m[i] = -fy[i];
    cpl_m[i] = -cpl[i];
  }
  const double dt = rod_a.default_dt();
  for (int k = 0; k < 300; ++k) {
    rod_a.step(a, fx, fy, cpl, dt);
    rod_b.step(b, fx, fy_m, cpl_m, dt);
  }
  for (int i = 0; i < n; ++i) {
    CHECK(std::abs(b.x[i] - a.x[i]) < 1e-10);
    CHECK(std::abs(b.y[i] + a.y[i]) < 1e-10);
    CHECK(std::abs(b.theta[i] + a.theta[i]) < 1e-10);
    CHECK(std::abs(b.vx[i] - a.vx[i]) < 1e-10);
    CHECK(std::abs(b.vy[i] + a.vy[i]) < 1e-10);
    CHECK(std::abs(b.omega[i] + a.omega[i]) < 1e-10);
  }
}

TEST_CASE("an oversized step fails loudly with the failure time attached") {
  RodGeometry g;
  Rod rod(g);
  RodState st = rod.state_from_curvature([](double s) {
    const double z = (s - 0.1) / 0.03;
    return 30.0 * std::exp(-0.5 * z * z);
  });
  const int n = rod.n_nodes();
  const auto fx = zeros(n), fy = zeros(n), cpl = zeros(n);
  const double dt = 100.0 * rod.default_dt();
  bool threw = false;
  double t_fail = -1.0;
  try {
    for (int k = 0; k < 20000; ++k) rod.step(st, fx, fy, cpl, dt);
  } catch (const NumericalError& e) {
    threw = true;
    t_fail = e.time();
    CHECK(std::string(e.what()).find("non-finite") != std::string::npos);
  }
  CHECK(threw);
  CHECK(t_fail > 0.0);
}

TEST_CASE("step rejects malformed inputs") {
  Rod rod((RodGeometry()));
  RodState st = rod.straight_state();
  const int n = rod.n_nodes();
  const auto good = zeros(n);
  const auto bad = zeros(n - 1);
  CHECK_THROWS_AS(rod.step(st, bad, good, good, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(rod.step(st, good, good, bad, 1e-4), std::invalid_argument);
  CHECK_THROWS_AS(rod.step(st, good, good, good, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rod.step(st, good, good, good, -1e-4), std::invalid_argument);
}

TEST_CASE("default step obeys the stretch-wave bound") {
  RodGeometry g;
  g.n_elements = 80;
  g.youngs_modulus = 2.5e4;
  Rod rod(g);
  CHECK(rod.default_dt() ==
        doctest::Approx(0.25 * g.ds() * std::sqrt(g.density / g.youngs_modulus))
            .epsilon(1e-14));
}

TEST_CASE("couple gradient differentiates exactly up to quadratics inside") {
  const double ds = 0.002;
  const int n = 101;
  std::vector<double> lin(n), quad(n);
  for (int i = 0; i < n; ++i) {
    const double s = ds * i;
    lin[i] = 3.0 * s + 0.5;
    quad[i] = 4.0 * s * s;
  }
  const auto g_lin = couple_gradient(lin, ds);
  for (int i = 0; i < n; ++i)
    CHECK(g_lin[i] == doctest::Approx(3.0).epsilon(1e-10));
  const auto g_quad = couple_gradient(quad, ds);
  for (int i = 1; i < n - 1; ++i)
    CHECK(g_quad[i] == doctest::Approx(8.0 * ds * i).epsilon(1e-9));
  CHECK_THROWS_AS(couple_gradient(std::vector<double>{1.0}, ds),
                  std::invalid_argument);
}
