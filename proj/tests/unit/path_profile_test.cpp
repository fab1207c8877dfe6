#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mrmc/planner.hpp"
#include "mrmc/profile.hpp"
#include "oracles.hpp"

namespace mrmc {
namespace {

const Limits kLimits{2, 115, 2, 115};

LatticeSpec lattice() { return LatticeSpec::make(kLimits, 0.05, 0.1); }

Path straight_path(Vec2 a, Vec2 b) {
  const std::vector<Vec2> wp{b};
  return make_path(a, std::atan2(b.y - a.y, b.x - a.x), wp, lattice());
}

TEST(Lattice, Make) {
  const LatticeSpec l = lattice();
  EXPECT_EQ(l.substeps, 2);
  EXPECT_NEAR(l.dv, 0.2, 1e-12);
  EXPECT_EQ(l.levels, 10);
  EXPECT_NEAR(l.unit, 0.01, 1e-12);
  EXPECT_DOUBLE_EQ(l.speed(10), 2.0);
  EXPECT_THROW(LatticeSpec::make(kLimits, 0.05, 0.12), std::invalid_argument);
  EXPECT_THROW(LatticeSpec::make(kLimits, 0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(LatticeSpec::make({0.1, 1, 2, 1}, 0.05, 0.1), std::invalid_argument);
}

TEST(MakePath, LegsAndCreep) {
  const std::vector<Vec2> wp{{3.005, 0}, {3.005, 2}, {3.005, 2}};
  const Path p = make_path({0, 0}, 0.0, wp, lattice());
  ASSERT_EQ(p.legs.size(), 2u);  // repeated point dropped
  EXPECT_EQ(p.legs[0].lattice_units, 300);
  EXPECT_NEAR(p.legs[0].creep, 0.005, 1e-9);
  EXPECT_EQ(p.legs[0].rotation_steps, 0);
  EXPECT_GT(p.legs[1].rotation_steps, 0);
  EXPECT_NEAR(p.legs[1].heading, std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(p.length(), 5.005, 1e-9);
  EXPECT_EQ(p.end(), (Vec2{3.005, 2}));
}

TEST(Rotation, WithinLimitsAndExact) {
  const LatticeSpec l = lattice();
  for (double delta : {0.1, 1.0, std::numbers::pi / 2, 3.0, -2.0}) {
    const RotationProfile r = plan_rotation(0.0, delta, l);
    ASSERT_EQ(r.alpha.size(), static_cast<std::size_t>(r.plan_steps * l.substeps));
    double w = 0.0;
    double theta = 0.0;
    for (double a : r.alpha) {
      EXPECT_LE(std::abs(a), kLimits.tau_max + 1e-9);
      theta += w * l.dt + 0.5 * a * l.dt * l.dt;
      w += a * l.dt;
      EXPECT_LE(std::abs(w), kLimits.omega_max + 1e-9);
    }
    EXPECT_NEAR(w, 0.0, 1e-9);
    EXPECT_NEAR(theta, delta, 1e-9);
  }
  EXPECT_EQ(plan_rotation(1.0, 1.0, l).plan_steps, 0);
}

struct Lane {
  Workspace ws{{0, 0, 6, 1}, {}, 0.5};
  Path path = straight_path({0.5, 0.5}, {4.5, 0.5});
};

// 1 s at +F_max covers 1 m; the rest is cruise at v_max.
TEST(Profile, FreeTerminalFourMetres) {
  Lane s;
  ProfileOptions o;
  o.terminal = Terminal::Free;
  const ProfileResult r = plan_profile(s.path, oracle::rest_start(s.path, 0, 0.05).cursor, 0.0, {}, 0.0,
                                       s.ws.grid(), lattice(), o);
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.steps, 25);
}

// Trapezoid with braking: 1 s up, 1 s at v_max, 1 s down.
TEST(Profile, StopTerminalFourMetres) {
  Lane s;
  const PlanStart start = oracle::rest_start(s.path, 0, 0.05);
  const ProfileResult r = plan_profile(s.path, start.cursor, 0.0, {}, 0.0, s.ws.grid(), lattice());
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(r.steps, 30);
  EXPECT_EQ(oracle::brute_force_profile(s.path, lattice(), 0.0, s.ws.grid(), {}, 0.0), 30);
  const MotionPlan plan = build_plan(start, r.actions, lattice());
  EXPECT_NEAR(plan.arrival_time(), 3.0, 1e-9);
  EXPECT_NEAR(plan.trajectory.back().x, 4.5, 1e-9);
  EXPECT_EQ(plan.trajectory.back().v, 0.0);
  EXPECT_TRUE(satisfies_limits(plan.trajectory, kLimits));
}

TEST(Profile, WindowAheadDelaysEntry) {
  Lane s;
  const PlanStart start = oracle::rest_start(s.path, 0, 0.05);
  WindowMap w;
  const CellIndex cell{5, 1};  // x in [2.5, 3.0], two metres ahead of the start
  w[cell].insert({0.0, 2.0});
  const double radius = 0.2;
  const ProfileResult r = plan_profile(s.path, start.cursor, 0.0, w, radius, s.ws.grid(), lattice());
  ASSERT_TRUE(r.feasible);
  EXPECT_GT(r.steps, 30);
  EXPECT_EQ(oracle::brute_force_profile(s.path, lattice(), radius, s.ws.grid(), w, 0.0), r.steps);
  const MotionPlan plan = build_plan(start, r.actions, lattice());
  const PositionTrajectory p = project_position(plan.trajectory);
  EXPECT_FALSE(oracle::dense_hits(p, radius, s.ws.grid(), cell, {0.0, 2.0}));
  EXPECT_TRUE(complies(plan.trajectory, 0.0, radius, w, s.ws.grid()));
  EXPECT_TRUE(satisfies_limits(plan.trajectory, kLimits));
}

TEST(Profile, WholePathForbiddenForever) {
  const Workspace ws({0, 0, 2, 2}, {}, 2.0);
  const Path path = straight_path({0.5, 1.0}, {1.5, 1.0});
  WindowMap w;
  w[{0, 0}].insert({0.0, kForever});
  const ProfileResult r = plan_profile(path, oracle::rest_start(path, 0, 0.05).cursor, 0.0, w, 0.2, ws.grid(),
                                       lattice());
  EXPECT_FALSE(r.feasible);
  EXPECT_EQ(oracle::brute_force_profile(path, lattice(), 0.2, ws.grid(), w, 0.0), std::nullopt);
}

TEST(Profile, TurnsAndCreep) {
  const Workspace ws({0, 0, 4, 4}, {}, 0.5);
  const std::vector<Vec2> wp{{2.013, 0.5}, {2.013, 2.0}, {0.5, 3.5}};
  const Path path = make_path({0.5, 0.5}, 0.0, wp, lattice());
  const PlanStart start = oracle::rest_start(path, 1.0, 0.05);
  const ProfileResult r = plan_profile(path, start.cursor, 1.0, {}, 0.2, ws.grid(), lattice());
  ASSERT_TRUE(r.feasible);
  EXPECT_EQ(oracle::brute_force_profile(path, lattice(), 0.2, ws.grid(), {}, 1.0), r.steps);
  const MotionPlan plan = build_plan(start, r.actions, lattice());
  EXPECT_TRUE(satisfies_limits(plan.trajectory, kLimits));
  EXPECT_NEAR(distance(plan.trajectory.back().position(), Vec2{0.5, 3.5}), 0.0, 1e-6);
  // Replaying the inputs through the integrator reproduces the samples.
  RobotState x = plan.trajectory.state(0);
  for (std::size_t k = 1; k < plan.trajectory.size(); ++k) {
    x = integrate_step(x, plan.trajectory.input(k - 1), 0.05);
    EXPECT_NEAR(x.x, plan.trajectory.state(k).x, 1e-6);
    EXPECT_NEAR(x.y, plan.trajectory.state(k).y, 1e-6);
  }
}

TEST(Profile, BranchMidMotion) {
  Lane s;
  const PlanStart start = oracle::rest_start(s.path, 0, 0.05);
  const MotionPlan free = build_plan(start, plan_profile(s.path, start.cursor, 0.0, {}, 0.2, s.ws.grid(),
                                                         lattice()).actions,
                                     lattice());
  const PlanStart mid = branch_point(free, 0.75);
  EXPECT_GE(mid.t_branch(), 0.75 - 1e-9);
  EXPECT_TRUE(mid.cursor.decision);
  WindowMap w;
  w[{7, 1}].insert({0.0, 3.0});
  const ProfileResult r = plan_profile(mid.path, mid.cursor, mid.t_branch(), w, 0.2, s.ws.grid(), lattice());
  ASSERT_TRUE(r.feasible);
  const MotionPlan plan = build_plan(mid, r.actions, lattice());
  EXPECT_NEAR(plan.start_time(), 0.75, 1e-9);
  EXPECT_GT(plan.arrival_time(), 3.0);
  EXPECT_TRUE(complies(plan.trajectory, 0.75, 0.2, w, s.ws.grid()));
  EXPECT_TRUE(satisfies_limits(plan.trajectory, kLimits));
}

TEST(Profile, RandomWindowsMatchBruteForce) {
  std::mt19937_64 rng(77);
  const Workspace ws({0, 0, 3, 3}, {}, 0.5);
  std::uniform_int_distribution<int> uc(0, 5);
  std::uniform_real_distribution<double> ut(0.0, 3.0);
  for (int trial = 0; trial < 15; ++trial) {
    const std::vector<Vec2> wp{{2.5, 0.5}, {2.5, 1.5}};
    const Path path = make_path({0.5, 0.5}, 0.0, wp, lattice());
    WindowMap w;
    for (int k = 0; k < 3; ++k) {
      const double lo = ut(rng);
      w[{uc(rng), uc(rng)}].insert({lo, lo + ut(rng) / 2});
    }
    const ProfileResult r = plan_profile(path, oracle::rest_start(path, 0, 0.05).cursor, 0.0, w, 0.2, ws.grid(),
                                         lattice());
    const auto bf = oracle::brute_force_profile(path, lattice(), 0.2, ws.grid(), w, 0.0);
    ASSERT_EQ(r.feasible, bf.has_value()) << trial;
    if (bf) EXPECT_EQ(r.steps, *bf) << trial;
  }
}

TEST(Profile, AddedWindowNeverHelps) {
  std::mt19937_64 rng(5);
  Lane s;
  const Cursor c = oracle::rest_start(s.path, 0, 0.05).cursor;
  std::uniform_int_distribution<int> col(0, 11);
  std::uniform_real_distribution<double> ut(0.0, 4.0);
  WindowMap w;
  int prev = plan_profile(s.path, c, 0.0, w, 0.2, s.ws.grid(), lattice()).steps;
  for (int k = 0; k < 20; ++k) {
    const double lo = ut(rng);
    w[{col(rng), static_cast<int>(rng() % 2)}].insert({lo, lo + ut(rng) / 4});
    const ProfileResult r = plan_profile(s.path, c, 0.0, w, 0.2, s.ws.grid(), lattice());
    if (!r.feasible) break;
    EXPECT_GE(r.steps, prev);
    prev = r.steps;
  }
}

TEST(Complies, DetectsViolation) {
  Lane s;
  const PlanStart start = oracle::rest_start(s.path, 0, 0.05);
  const MotionPlan plan =
      build_plan(start, plan_profile(s.path, start.cursor, 0.0, {}, 0.2, s.ws.grid(), lattice()).actions, lattice());
  WindowMap w;
  w[{5, 1}].insert({1.0, 2.0});
  EXPECT_FALSE(complies(plan.trajectory, 0.0, 0.2, w, s.ws.grid()));
  WindowMap late;
  late[{0, 0}].insert({10.0, 11.0});
  EXPECT_TRUE(complies(plan.trajectory, 0.0, 0.2, late, s.ws.grid()));
  WindowMap end;
  end[{9, 1}].insert({10.0, 11.0});  // final pose sits there forever
  EXPECT_FALSE(complies(plan.trajectory, 0.0, 0.2, end, s.ws.grid()));
}

}  // namespace
}  // namespace mrmc
