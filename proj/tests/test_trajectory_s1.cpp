#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "uavris/channel.hpp"
#include "uavris/trajectory_s1.hpp"

using namespace uavris;

namespace {
double product_kb(const Vec2& q, const Vec2& a, const Vec2& b, double H) {
  const double d1 = (q - a).norm2() + H * H;
  const double d2 = (q - b).norm2() + H * H;
  return d1 * d2;
}
}  // namespace

TEST_CASE("aligned phase schedule") {
  ScenarioConfig cfg = default_paper_scenario();
  SUBCASE("first element carries the reference phase") {
    const auto theta = aligned_phases({120, 40}, {300, 300}, cfg.bs_pos, cfg);
    CHECK(theta[0] == 0.0);
  }
  SUBCASE("coincident directions need no correction") {
    const auto theta = aligned_phases({50, 90}, cfg.bs_pos, cfg.bs_pos, cfg);
    for (double t : theta) CHECK(t == doctest::Approx(0.0));
  }
  SUBCASE("wrapped into [0, 2pi)") {
    oracles::Rng rng(8);
    for (int i = 0; i < 100; ++i) {
      const auto theta = aligned_phases(rng.point(-400, 400), rng.point(-400, 400),
                                        cfg.bs_pos, cfg);
      for (double t : theta) {
        CHECK(t >= 0.0);
        CHECK(t < 2.0 * std::numbers::pi);
      }
    }
  }
}

TEST_CASE("slack rate curve and its tangent") {
  SUBCASE("tangency") {
    oracles::Rng rng(21);
    for (int i = 0; i < 100; ++i) {
      const double z_ref = std::pow(10.0, rng.uniform(2.0, 11.0));
      const double b = std::pow(10.0, rng.uniform(-4.0, 4.0));
      const RateSlackTangent t = linearize_rate_slack(z_ref, b);
      CHECK(t.at(z_ref) == doctest::Approx(rate_in_slack(z_ref, b)).epsilon(1e-12));
    }
  }
  SUBCASE("reference numbers at B = 1 and midpoint convexity") {
    CHECK(rate_in_slack(1.0, 1.0) == doctest::Approx(1.0));
    CHECK(rate_in_slack(2.0, 1.0) == doctest::Approx(0.5849625007211562));
    CHECK(rate_in_slack(3.0, 1.0) == doctest::Approx(0.4150374992788437));
    CHECK(rate_in_slack(2.0, 1.0) <=
          0.5 * (rate_in_slack(1.0, 1.0) + rate_in_slack(3.0, 1.0)));
  }
  SUBCASE("no signal, no rate") {
    CHECK(rate_in_slack(5.0, 0.0) == 0.0);
    const RateSlackTangent t = linearize_rate_slack(5.0, 0.0);
    CHECK(t.at(1.0) == 0.0);
    CHECK(t.at(9.0) == 0.0);
  }
  SUBCASE("global minorant") {
    oracles::Rng rng(22);
    for (int i = 0; i < 10000; ++i) {
      const double z_ref = std::pow(10.0, rng.uniform(1.0, 10.0));
      const double z = std::pow(10.0, rng.uniform(1.0, 10.0));
      const double b = std::pow(10.0, rng.uniform(-4.0, 4.0));
      const RateSlackTangent t = linearize_rate_slack(z_ref, b);
      const double exact = rate_in_slack(z, b);
      CHECK(t.at(z) <= exact + 1e-12 * (1.0 + std::abs(exact)));
    }
  }
}

TEST_CASE("majorant of the toward-BS distance product") {
  oracles::Rng rng(31);
  const double H = 100.0;
  SUBCASE("touch point") {
    for (int i = 0; i < 100; ++i) {
      const Vec2 q_ref = rng.point(-400, 400);
      const Vec2 w_k = rng.point(-400, 400);
      const Vec2 w_b = rng.point(-100, 100);
      CHECK(product_upper_bound_f(q_ref, q_ref, w_k, w_b, H) ==
            doctest::Approx(product_kb(q_ref, w_k, w_b, H)).epsilon(1e-9));
    }
  }
  SUBCASE("upper bound near and far") {
    for (int i = 0; i < 10000; ++i) {
      const Vec2 q_ref = rng.point(-400, 400);
      const Vec2 w_k = rng.point(-400, 400);
      const Vec2 w_b = rng.point(-100, 100);
      const double radius = i % 2 == 0 ? 333.4 : 1200.0;
      const Vec2 q = q_ref + rng.point(-radius, radius);
      const double f = product_upper_bound_f(q, q_ref, w_k, w_b, H);
      const double exact = product_kb(q, w_k, w_b, H);
      CHECK(f >= exact * (1.0 - 1e-12) - 1e-9);
    }
  }
  SUBCASE("coincident endpoints majorize the fourth power") {
    const Vec2 w{120, -60};
    const Vec2 q_ref{40, 35};
    const Vec2 q{180, 90};
    const double d2 = (q - w).norm2() + H * H;
    CHECK(product_upper_bound_f(q, q_ref, w, w, H) >= d2 * d2 * (1.0 - 1e-12));
  }
}

TEST_CASE("minorant of the toward-eavesdropper distance product") {
  oracles::Rng rng(32);
  const double H = 100.0;
  SUBCASE("touch point") {
    for (int i = 0; i < 100; ++i) {
      const Vec2 q_ref = rng.point(-400, 400);
      const Vec2 w_k = rng.point(-400, 400);
      const Vec2 w_e = rng.point(-200, 200);
      CHECK(product_lower_bound_g(q_ref, q_ref, w_k, w_e, H) ==
            doctest::Approx(product_kb(q_ref, w_k, w_e, H)).epsilon(1e-9));
    }
  }
  SUBCASE("lower bound near and far") {
    for (int i = 0; i < 10000; ++i) {
      const Vec2 q_ref = rng.point(-400, 400);
      const Vec2 w_k = rng.point(-400, 400);
      const Vec2 w_e = rng.point(-200, 200);
      const double radius = i % 2 == 0 ? 333.4 : 1200.0;
      const Vec2 q = q_ref + rng.point(-radius, radius);
      const double g = product_lower_bound_g(q, q_ref, w_k, w_e, H);
      const double exact = product_kb(q, w_k, w_e, H);
      CHECK(g <= exact * (1.0 + 1e-12) + 1e-9);
    }
  }
  SUBCASE("coincident endpoints minorize the fourth power") {
    const Vec2 w{-80, 150};
    const Vec2 q_ref{10, -25};
    const Vec2 q{90, 60};
    const double d2 = (q - w).norm2() + H * H;
    CHECK(product_lower_bound_g(q, q_ref, w, w, H) <= d2 * d2 * (1.0 + 1e-12));
  }
}

TEST_CASE("tangent of the concave power") {
  SUBCASE("identity at alpha = 2") {
    oracles::Rng rng(41);
    for (int i = 0; i < 100; ++i) {
      const double v_ref = std::pow(10.0, rng.uniform(2.0, 10.0));
      const double v = std::pow(10.0, rng.uniform(2.0, 10.0));
      CHECK(concave_tangent_h(v, v_ref, 2.0) == doctest::Approx(v).epsilon(1e-12));
    }
  }
  SUBCASE("tangency") {
    const double v_ref = 3.7e8;
    CHECK(concave_tangent_h(v_ref, v_ref, 2.2) ==
          doctest::Approx(std::pow(v_ref, 2.0 / 2.2)).epsilon(1e-12));
  }
  SUBCASE("majorant at alpha = 2.2") {
    oracles::Rng rng(42);
    for (int i = 0; i < 10000; ++i) {
      const double v_ref = std::pow(10.0, rng.uniform(2.0, 11.0));
      const double v = std::pow(10.0, rng.uniform(2.0, 11.0));
      const double h = concave_tangent_h(v, v_ref, 2.2);
      const double exact = std::pow(v, 2.0 / 2.2);
      CHECK(h >= exact * (1.0 - 1e-12));
    }
  }
}

namespace {

struct TrajFixture {
  ScenarioConfig cfg;
  Trajectory traj;
  PhaseSchedule phases;
  Eigen::MatrixXd assoc;
  Eigen::MatrixXd power;

  explicit TrajFixture(const ScenarioConfig& c) : cfg(c) {
    traj = initial_trajectory(cfg);
    assoc = Eigen::MatrixXd::Zero(cfg.num_users, cfg.num_slots);
    power = Eigen::MatrixXd::Zero(cfg.num_users, cfg.num_slots);
    for (int n = 0; n < cfg.num_slots; ++n) {
      const int k = n % cfg.num_users;
      assoc(k, n) = 1.0;
      power(k, n) = cfg.max_power(k);
    }
    phases = realign_phases(traj, assoc, PhaseSchedule(cfg.ris_elements, cfg.num_slots), cfg);
  }

  double exact_zeta(const Trajectory& t, const PhaseSchedule& ph) const {
    Allocation alloc(cfg.num_users, cfg.num_slots);
    for (int n = 1; n <= cfg.num_slots; ++n)
      for (int k = 0; k < cfg.num_users; ++k) {
        alloc.a(k, n) = assoc(k, n - 1);
        alloc.p(k, n) = power(k, n - 1);
      }
    return evaluate_detailed(cfg, t, ph, alloc).zeta_exact;
  }
};

}  // namespace

TEST_CASE("zero speed keeps the path fixed") {
  ScenarioConfig cfg = oracles::mini_scenario();
  cfg.v_max_mps = 0.0;
  TrajFixture fx(cfg);
  TrajectoryStep step = solve_trajectory_subproblem(fx.assoc, fx.power, fx.traj, fx.cfg);
  CHECK(step.solver_ok);
  for (size_t i = 0; i < fx.traj.points.size(); ++i) {
    CHECK(step.trajectory.points[i].x == fx.traj.points[i].x);
    CHECK(step.trajectory.points[i].y == fx.traj.points[i].y);
  }
}

TEST_CASE("one convex step returns a feasible loop") {
  TrajFixture fx(oracles::mini_scenario());
  TrajectoryStep step = solve_trajectory_subproblem(fx.assoc, fx.power, fx.traj, fx.cfg);
  REQUIRE(step.solver_ok);
  CHECK((step.trajectory.points.back() - step.trajectory.points.front()).norm() <= 1e-9);
  for (int n = 1; n <= fx.cfg.num_slots; ++n)
    CHECK((step.trajectory.at(n) - step.trajectory.at(n - 1)).norm() <=
          fx.cfg.s_max() + 1e-6);
}

TEST_CASE("with the eavesdropper out of reach the block strictly improves") {
  ScenarioConfig cfg = oracles::mini_scenario();
  cfg.eve_pos = {0.0, 2.0e8};  // effectively absent
  TrajFixture fx(cfg);
  const double before = fx.exact_zeta(fx.traj, fx.phases);
  TrajectoryRunResult run =
      optimize_trajectory_s1(fx.assoc, fx.power, fx.traj, fx.phases, fx.cfg);
  const double after = fx.exact_zeta(run.trajectory, run.phases);
  CHECK(after > before);
  CHECK(trajectory_feasible(run.trajectory, cfg, 1e-6));
}

TEST_CASE("objective never decreases across the block") {
  TrajFixture fx(oracles::mini_scenario());
  const double before = fx.exact_zeta(fx.traj, fx.phases);
  TrajectoryRunResult run =
      optimize_trajectory_s1(fx.assoc, fx.power, fx.traj, fx.phases, fx.cfg);
  const double after = fx.exact_zeta(run.trajectory, run.phases);
  CHECK(after >= before);
}

TEST_CASE("a converged block is a fixed point of itself") {
  TrajFixture fx(oracles::mini_scenario());
  TrajectoryRunResult first =
      optimize_trajectory_s1(fx.assoc, fx.power, fx.traj, fx.phases, fx.cfg);
  const double z1 = fx.exact_zeta(first.trajectory, first.phases);
  TrajectoryRunResult second =
      optimize_trajectory_s1(fx.assoc, fx.power, first.trajectory, first.phases, fx.cfg);
  const double z2 = fx.exact_zeta(second.trajectory, second.phases);
  CHECK(z2 >= z1);
  CHECK((z2 - z1) <= fx.cfg.sca_tol * std::max(z2, 1e-300) * 2.0);
}

TEST_CASE("silent slots keep their previous phases") {
  ScenarioConfig cfg = oracles::mini_scenario();
  TrajFixture fx(cfg);
  fx.assoc.col(2).setZero();  // silence slot 3
  fx.power.col(2).setZero();
  PhaseSchedule marked = fx.phases;
  for (int m = 0; m < cfg.ris_elements; ++m) marked.at(m, 3) = 1.2345;
  PhaseSchedule out = realign_phases(fx.traj, fx.assoc, marked, cfg);
  for (int m = 0; m < cfg.ris_elements; ++m) CHECK(out.at(m, 3) == 1.2345);
}
