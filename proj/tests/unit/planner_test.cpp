#include <gtest/gtest.h>

#include "mrmc/planner.hpp"
#include "oracles.hpp"

namespace mrmc {
namespace {

const Limits kLimits{2, 115, 2, 115};

PlannerConfig config(double radius = 0.2) {
  PlannerConfig c;
  c.lattice = LatticeSpec::make(kLimits, 0.05, 0.1);
  c.radius = radius;
  return c;
}

TEST(GoalPoint, CenterOrShifted) {
  const Workspace ws({0, 0, 10, 10}, {{4, 4, 6, 6}}, 0.5);
  EXPECT_EQ(goal_point(ws, {1, 1, 2, 2}, 0.2), (Vec2{1.5, 1.5}));
  const auto shifted = goal_point(ws, {3, 4.5, 5, 5.5}, 0.2);  // center inside the obstacle
  ASSERT_TRUE(shifted.has_value());
  EXPECT_TRUE(ws.is_region_free(Disc{*shifted, 0.2}));
  EXPECT_TRUE(footprint_inside({3, 4.5, 5, 5.5}, *shifted, 0.2));
  EXPECT_FALSE(goal_point(ws, {4.5, 4.5, 5.5, 5.5}, 0.2).has_value());
  EXPECT_FALSE(goal_point(ws, {1, 1, 1.3, 1.3}, 0.2).has_value());  // too small for the disc
}

TEST(InitialPlan, TrapezoidOnStraightRun) {
  const Workspace ws({0, 0, 10, 2}, {}, 0.5);
  const MotionPlan p = initial_plan(ws, {1, 1, 0, 0, 0}, {4.75, 0.75, 5.25, 1.25}, config(), 0.0);
  // 4 m with v_max^2 / F_max = 2 m: d / v_max + v_max / F_max.
  EXPECT_NEAR(p.arrival_time(), 3.0, 1e-9);
  EXPECT_NEAR(distance(p.trajectory.back().position(), Vec2{5, 1}), 0.0, 1e-6);
  EXPECT_EQ(p.trajectory.back().v, 0.0);
  EXPECT_TRUE(satisfies_limits(p.trajectory, kLimits));
}

TEST(InitialPlan, AlreadyInsideGoal) {
  const Workspace ws({0, 0, 10, 10}, {}, 0.5);
  const MotionPlan p = initial_plan(ws, {2, 2, 0.3, 0, 0}, {1, 1, 3, 3}, config(), 4.0);
  EXPECT_EQ(p.trajectory.size(), 1u);
  EXPECT_DOUBLE_EQ(p.arrival_time(), 4.0);
}

TEST(InitialPlan, WalledOff) {
  const Workspace ws({0, 0, 10, 10}, {{6, 6, 10, 7}, {6, 7, 7, 10}}, 0.5);
  EXPECT_THROW(initial_plan(ws, {1, 1, 0, 0, 0}, {8, 8, 9, 9}, config(), 0.0), InfeasibleError);
}

TEST(InitialPlan, AvoidsObstacles) {
  const Workspace ws({0, 0, 10, 10}, {{3, 0, 4, 7}, {6, 3, 7, 10}}, 0.5);
  const MotionPlan p = initial_plan(ws, {1, 1, 0, 0, 0}, {8.5, 8.5, 9.5, 9.5}, config(), 0.0);
  for (std::size_t k = 0; k + 1 < p.trajectory.size(); ++k) {
    const Capsule c{p.trajectory.state(k).position(), p.trajectory.state(k + 1).position(), 0.2};
    EXPECT_TRUE(ws.is_region_free(c)) << k;
  }
  EXPECT_TRUE(satisfies_limits(p.trajectory, kLimits));
  EXPECT_TRUE(footprint_inside({8.5, 8.5, 9.5, 9.5}, p.trajectory.back().position(), 0.2));
}

struct Lane {
  Workspace ws{{0, 0, 10, 4}, {}, 0.5};
  PlannerConfig cfg = config();
  MotionPlan current = initial_plan(ws, {0.75, 1.75, 0, 0, 0}, {8.5, 1.5, 9.0, 2.0}, cfg, 0.0);
  Vec2 goal{8.75, 1.75};
};

TEST(Cascade, FixedPathWhenFeasible) {
  Lane l;
  WindowMap w;
  w[{8, 3}].insert({0.0, 3.0});
  const CascadeResult r = plan(l.ws, l.current, 0.0, l.goal, w, w, l.cfg);
  EXPECT_EQ(r.result.outcome, PlanOutcome::FixedPath);
  EXPECT_EQ(r.mode, Mode::Free);
  EXPECT_TRUE(r.fixed_path_tried);
  EXPECT_FALSE(r.trajectory_tried);
  EXPECT_GT(r.result.plan->arrival_time(), l.current.arrival_time());
  EXPECT_TRUE(complies(r.result.plan->trajectory, 0.0, 0.2, w, l.ws.grid()));
}

TEST(Cascade, TrajectoryWhenPathBlocked) {
  Lane l;
  WindowMap w;
  w[{8, 3}].insert({0.0, kForever});  // sits on the straight path for good
  const CascadeResult r = plan(l.ws, l.current, 0.0, l.goal, w, w, l.cfg);
  EXPECT_TRUE(r.trajectory_tried);
  EXPECT_EQ(r.result.outcome, PlanOutcome::Replanned);
  EXPECT_EQ(r.mode, Mode::Free);
  EXPECT_TRUE(complies(r.result.plan->trajectory, 0.0, 0.2, w, l.ws.grid()));
  EXPECT_NEAR(distance(r.result.plan->trajectory.back().position(), l.goal), 0.0, 1e-6);
}

TEST(Cascade, EmergWhenBothFail) {
  Lane l;
  WindowMap w;
  for (int row = 0; row < 8; ++row) w[{8, row}].insert({0.0, kForever});  // wall across the lane
  const CascadeResult r = plan(l.ws, l.current, 0.0, l.goal, w, w, l.cfg);
  EXPECT_TRUE(r.fixed_path_tried);
  EXPECT_TRUE(r.trajectory_tried);
  EXPECT_EQ(r.result.outcome, PlanOutcome::Infeasible);
  EXPECT_EQ(r.mode, Mode::Emerg);
}

TEST(Cascade, MidMotionKeepsPrefix) {
  Lane l;
  WindowMap w;
  w[{12, 3}].insert({0.0, 4.0});
  const double t_c = 1.0;
  const CascadeResult r = plan(l.ws, l.current, t_c, l.goal, w, w, l.cfg);
  ASSERT_TRUE(r.result.feasible());
  const Trajectory& t = r.result.plan->trajectory;
  EXPECT_NEAR(t.start_time(), t_c, 1e-9);
  const RobotState a = t.state(0);
  const RobotState b = l.current.trajectory.state_at(t_c);
  EXPECT_NEAR(a.x, b.x, 1e-9);
  EXPECT_NEAR(a.v, b.v, 1e-9);
  EXPECT_TRUE(satisfies_limits(t, kLimits));
}

TEST(Stops, BrakeWithinLimits) {
  Lane l;
  const MotionPlan b = brake_plan(l.current, 1.0, l.cfg.lattice);
  EXPECT_EQ(b.trajectory.back().v, 0.0);
  EXPECT_TRUE(satisfies_limits(b.trajectory, kLimits));
  const RobotState moving = l.current.trajectory.state_at(1.0);
  ASSERT_GT(moving.v, 0.0);
  const MotionPlan h = halt_plan(moving, 1.0, 0.05);
  EXPECT_EQ(h.trajectory.size(), 1u);
  EXPECT_EQ(h.trajectory.back().v, 0.0);
  EXPECT_EQ(h.trajectory.back().position(), moving.position());
}

TEST(RestrictWindows, KeepsOnlyGivenCells) {
  WindowMap w;
  w[{0, 0}].insert({0, 1});
  w[{1, 0}].insert({0, 1});
  const WindowMap r = restrict_windows(w, {{1, 0}, {5, 5}});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r.begin()->first, (CellIndex{1, 0}));
}

TEST(AddWindows, RestrictedToCells) {
  OccupancyMap occ;
  occ[{0, 0}].insert({0, 1});
  occ[{2, 2}].insert({3, 4});
  WindowMap w;
  const CellSet only{{2, 2}};
  add_windows(w, occ, &only);
  ASSERT_EQ(w.size(), 1u);
  add_windows(w, occ);
  EXPECT_EQ(w.size(), 2u);
}

}  // namespace
}  // namespace mrmc
