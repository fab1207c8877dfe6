#include <gtest/gtest.h>

#include <set>

#include "mrmc/sim.hpp"
#include "mrmc/trace.hpp"
#include "oracles.hpp"

namespace mrmc {
namespace {

RobotSpec robot(int id, int prio, Vec2 start, double theta, Rect goal, double activation = 0.0) {
  RobotSpec r;
  r.id = id;
  r.base_priority = prio;
  r.radius = 0.2;
  r.limits = {2, 115, 2, 115};
  r.start = {start.x, start.y, theta, 0, 0};
  r.goal = goal;
  r.activation_time = activation;
  return r;
}

Scenario base(Rect bounds, std::vector<RobotSpec> robots) {
  Scenario sc;
  sc.name = "test";
  sc.bounds = bounds;
  sc.max_time = 60;
  sc.robots = std::move(robots);
  validate(sc);
  return sc;
}

bool allowed(Mode a, Mode b) {
  if (a == b) return true;
  return (a == Mode::Free && b == Mode::Busy) || (a == Mode::Busy && b == Mode::Free) ||
         (a == Mode::Busy && b == Mode::Emerg) || (a == Mode::Emerg && b == Mode::Free);
}

void expect_valid_modes(const RunResult& r) {
  std::set<std::pair<int, double>> emerg_entries;
  for (const Event& e : r.events) {
    if (e.kind != "mode") continue;
    const std::size_t arrow = e.detail.find("->");
    ASSERT_NE(arrow, std::string::npos) << e.detail;
    const std::string from = e.detail.substr(0, arrow);
    const std::string to = e.detail.substr(arrow + 2);
    const auto mode = [](const std::string& s) { return s == "Free" ? Mode::Free : s == "Busy" ? Mode::Busy : Mode::Emerg; };
    EXPECT_TRUE(allowed(mode(from), mode(to))) << "robot " << e.robot << " t=" << e.t << " " << e.detail;
    if (e.detail == "Busy->Emerg") emerg_entries.insert({e.robot, e.t});
  }
  for (const auto& [id, rows] : r.traces) {
    for (std::size_t k = 1; k < rows.size(); ++k) {
      // A round can pass through Busy between two rows.
      const bool via_busy = rows[k - 1].mode == Mode::Free && rows[k].mode == Mode::Emerg &&
                            emerg_entries.contains({id, rows[k].t});
      EXPECT_TRUE(allowed(rows[k - 1].mode, rows[k].mode) || via_busy)
          << "robot " << id << " t=" << rows[k].t << " " << to_string(rows[k - 1].mode) << "->"
          << to_string(rows[k].mode);
      if (rows[k - 1].lifecycle == Lifecycle::Passive) EXPECT_EQ(rows[k].lifecycle, Lifecycle::Passive);
    }
  }
}

TEST(NeighborGraph, ClosedBall) {
  const NeighborGraph g = neighbor_graph({{1, {0, 0}}, {2, {5, 0}}, {3, {20, 0}}}, 5.0);
  EXPECT_EQ(g.neighbors(1), (std::set<int>{2}));
  EXPECT_EQ(g.neighbors(2), (std::set<int>{1}));
  EXPECT_TRUE(g.neighbors(3).empty());
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_EQ(g.components(), (std::vector<std::vector<int>>{{1, 2}, {3}}));
}

TEST(NeighborGraph, FarApart) {
  const NeighborGraph g = neighbor_graph({{1, {0, 0}}, {2, {6, 0}}, {3, {0, 6}}}, 5.0);
  EXPECT_EQ(g.edge_count(), 0u);
  EXPECT_EQ(g.components().size(), 3u);
}

TEST(NeighborGraph, SevenRobotLayout) {
  const Scenario sc = load_scenario_file(std::string(MRMC_SCENARIO_DIR) + "/seven_robots.json");
  std::map<int, Vec2> pos;
  for (const RobotSpec& r : sc.robots) pos[r.id] = r.start.position();
  const NeighborGraph g = neighbor_graph(pos, sc.sensing_radius);
  for (const auto& [i, pi] : pos) {
    for (const auto& [j, pj] : pos) {
      if (i != j) EXPECT_EQ(g.neighbors(i).contains(j), distance(pi, pj) <= 5.0);
    }
  }
  std::set<int> seen;
  for (const auto& comp : g.components()) {
    for (int id : comp) EXPECT_TRUE(seen.insert(id).second);
  }
  EXPECT_EQ(seen.size(), 7u);
}

TEST(SweptSafety, PairsAndObstacles) {
  const Workspace ws({0, 0, 10, 10}, {{4, 4, 6, 6}}, 0.5);
  const std::vector<SweptDisc> touching_obstacle{{1, 0.5, {3.5, 5}, {3.5, 5}}};
  EXPECT_FALSE(check_swept_safety(ws, touching_obstacle, 0, 0.05).has_value());
  const std::vector<SweptDisc> into{{1, 0.5, {3.4, 5}, {3.6, 5}}};
  const auto v = check_swept_safety(ws, into, 0, 0.05);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->other, -1);
  // Two discs swapping places meet halfway through the tick.
  const std::vector<SweptDisc> swap{{1, 0.2, {1, 1}, {2, 1}}, {2, 0.2, {2, 1}, {1, 1}}};
  const auto c = check_swept_safety(ws, swap, 3.0, 0.05);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->other, 2);
  EXPECT_GT(c->t, 3.0);
  const std::vector<SweptDisc> tangent{{1, 0.2, {1, 1}, {1, 1}}, {2, 0.2, {1.4, 1}, {1.4, 1}}};
  EXPECT_TRUE(check_swept_safety(ws, tangent, 0, 0.05).has_value());
  const std::vector<SweptDisc> out{{1, 0.2, {0.1, 1}, {0.1, 1}}};
  EXPECT_TRUE(check_swept_safety(ws, out, 0, 0.05).has_value());
}

TEST(Run, SingleRobotTrapezoid) {
  const Scenario sc = base({0, 0, 10, 4}, {robot(1, 1, {1, 2}, 0, {4.75, 1.75, 5.25, 2.25})});
  const RunResult r = run(sc);
  EXPECT_EQ(r.summary.status, RunStatus::Completed);
  ASSERT_TRUE(r.summary.robots[0].completion_time.has_value());
  // 3 s of motion plus one tick at rest.
  EXPECT_NEAR(*r.summary.robots[0].completion_time, 3.05, 1e-9);
  EXPECT_TRUE(r.summary.conflict_pairs.empty());
  EXPECT_EQ(r.summary.rounds, 0);
  EXPECT_EQ(r.traces.at(1).size(), static_cast<std::size_t>(r.summary.ticks));
}

Scenario crossing() {
  return base({0, 0, 12, 12}, {robot(1, 2, {1, 6}, 0, {10, 5.25, 11.5, 6.75}),
                               robot(2, 1, {6, 1}, 1.5707963267948966, {5.25, 10, 6.75, 11.5})});
}

TEST(Run, CrossingRobotsYield) {
  const RunResult r = run(crossing());
  EXPECT_EQ(r.summary.status, RunStatus::Completed);
  EXPECT_EQ(r.summary.conflict_pairs, (std::set<std::pair<int, int>>{{1, 2}}));
  int changed = 0;
  for (const RobotSummary& s : r.summary.robots) {
    EXPECT_TRUE(s.completion_time.has_value());
    changed += s.replanning_instants.empty() ? 0 : 1;
  }
  EXPECT_EQ(changed, 1);  // exactly one robot yields
  expect_valid_modes(r);
  // Dense re-check of the traces at 1 ms.
  const Workspace ws(crossing().bounds, {}, 0.5);
  const auto& a = r.traces.at(1);
  const auto& b = r.traces.at(2);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k + 1 < a.size(); ++k) {
    const std::vector<SweptDisc> d{{1, 0.2, a[k].state.position(), a[k + 1].state.position()},
                                   {2, 0.2, b[k].state.position(), b[k + 1].state.position()}};
    ASSERT_FALSE(check_swept_safety(ws, d, a[k].t, 0.05).has_value()) << a[k].t;
  }
}

TEST(Run, TraceRowsPerTick) {
  RunOptions o;
  o.max_time = 0.5;
  const RunResult r = run(base({0, 0, 10, 4}, {robot(1, 1, {1, 2}, 0, {8, 1.5, 9, 2.5})}), o);
  EXPECT_EQ(r.summary.status, RunStatus::Deadline);
  EXPECT_EQ(r.summary.ticks, 10);
  ASSERT_EQ(r.traces.at(1).size(), 10u);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_NEAR(r.traces.at(1)[k].t, 0.05 * k, 1e-12);
}

TEST(Run, InactiveUntilActivation) {
  const Scenario sc = base({0, 0, 10, 4}, {robot(1, 1, {1, 2}, 0, {8, 1.5, 9, 2.5}, 1.0)});
  const RunResult r = run(sc);
  const auto& rows = r.traces.at(1);
  for (const TraceRecord& row : rows) {
    if (row.t < 1.0 - 1e-9) {
      EXPECT_EQ(row.lifecycle, Lifecycle::Inactive);
      EXPECT_EQ(row.state.position(), (Vec2{1, 2}));
    }
  }
  EXPECT_EQ(rows.back().lifecycle, Lifecycle::Active);  // settles on the tick after the last row
  EXPECT_EQ(r.summary.status, RunStatus::Completed);
}

TEST(Run, Deterministic) {
  const Scenario sc = random_scenario(42);
  const RunResult a = run(sc);
  const RunResult b = run(sc);
  ASSERT_EQ(a.traces.size(), b.traces.size());
  for (const auto& [id, rows] : a.traces) EXPECT_EQ(trace_csv(rows), trace_csv(b.traces.at(id)));
  EXPECT_EQ(events_csv(a.events), events_csv(b.events));
  EXPECT_EQ(summary_json(a.summary), summary_json(b.summary));
}

// Robots 1 and 2 interact near the left edge; robot 3 works more than R away.
// Moving robot 3 elsewhere (still out of range) must not change what 1 and 2 do.
TEST(Run, Locality) {
  auto make = [](Vec2 start3, Rect goal3) {
    return base({0, 0, 30, 12}, {robot(1, 2, {1, 6}, 0, {10, 5.25, 11.5, 6.75}),
                                 robot(2, 1, {6, 1}, 1.5707963267948966, {5.25, 10, 6.75, 11.5}),
                                 robot(3, 3, start3, 0, goal3)});
  };
  const RunResult a = run(make({20, 2}, {27, 9, 28, 10}));
  const RunResult b = run(make({28, 10}, {22, 1, 23, 2}));
  for (int id : {1, 2}) {
    const auto& ra = a.traces.at(id);
    const auto& rb = b.traces.at(id);
    const std::size_t n = std::min(ra.size(), rb.size());
    ASSERT_GT(n, 0u);
    for (std::size_t k = 0; k < n; ++k) {
      EXPECT_EQ(ra[k].state, rb[k].state) << id << " " << ra[k].t;
      EXPECT_EQ(ra[k].mode, rb[k].mode);
    }
  }
  auto local = [](const std::vector<Event>& events) {
    std::vector<std::string> out;
    for (const Event& e : events) {
      if ((e.robot == 1 || e.robot == 2) && e.kind != "round") out.push_back(events_csv({e}));
    }
    return out;
  };
  EXPECT_EQ(local(a.events), local(b.events));
  // Robot 3 really did stay out of range.
  for (std::size_t k = 0; k < std::min(a.traces.at(1).size(), a.traces.at(3).size()); ++k) {
    EXPECT_GT(distance(a.traces.at(1)[k].state.position(), a.traces.at(3)[k].state.position()), 5.0);
    EXPECT_GT(distance(a.traces.at(2)[k].state.position(), a.traces.at(3)[k].state.position()), 5.0);
  }
}

TEST(Run, ModeTransitionsOnRandomScenarios) {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    const RunResult r = run(random_scenario(seed));
    EXPECT_EQ(r.summary.status, RunStatus::Completed) << seed;
    expect_valid_modes(r);
    for (const auto& [id, rows] : r.traces) {
      for (const TraceRecord& row : rows) EXPECT_TRUE(check_limits(row.state, row.input, {2, 115, 2, 115}));
    }
  }
}

TEST(Run, StagesNeverExceedComponent) {
  const Scenario sc = load_scenario_file(std::string(MRMC_SCENARIO_DIR) + "/seven_robots.json");
  const RunResult r = run(sc);
  EXPECT_GE(r.summary.rounds, 1);
  EXPECT_LE(r.summary.max_stages, 7);
  for (const Event& e : r.events) {
    if (e.kind != "round") continue;
    const auto members = std::count(e.detail.begin(), e.detail.begin() + static_cast<long>(e.detail.find(';')), ' ') + 1;
    const auto stages = std::count(e.detail.begin(), e.detail.end(), '[');
    EXPECT_LE(stages, members) << e.detail;
  }
}

TEST(Run, ImmediateBrakingOption) {
  Scenario sc = load_scenario_file(std::string(MRMC_SCENARIO_DIR) + "/cascade_emergency.json");
  sc.braking = EmergencyBraking::Immediate;
  const RunResult r = run(sc);
  EXPECT_NE(r.summary.status, RunStatus::SafetyViolation);
  bool emerg = false;
  for (const auto& [id, rows] : r.traces) {
    for (const TraceRecord& row : rows) emerg = emerg || row.mode == Mode::Emerg;
  }
  EXPECT_TRUE(emerg);
}

}  // namespace
}  // namespace mrmc
