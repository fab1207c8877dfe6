#include "mrmc/planner.hpp"

#include <algorithm>
#include <cmath>

namespace mrmc {

namespace {

// Next plan starting from a robot stopped at the end of `settled`, following
// `path` from its beginning.
PlanStart restart(const MotionPlan& settled, Path path, double t_c) {
  PlanStart out;
  out.t_c = t_c;
  out.prefix = settled.trajectory;
  out.prefix_cursors = settled.cursors;
  for (Cursor& c : out.prefix_cursors) c.decision = false;
  out.cursor = {0, 0, 0, !path.legs.empty() && path.legs.front().rotation_steps > 0, true};
  out.prefix_cursors.back() = out.cursor;
  out.path = std::move(path);
  return out;
}

bool acceptable(const MotionPlan& plan, double t_c, const WindowMap& windows, const Workspace& ws,
                const PlannerConfig& config) {
  return satisfies_limits(plan.trajectory, config.lattice.limits) &&
         complies(plan.trajectory, t_c, config.radius, windows, ws.grid());
}

std::optional<MotionPlan> profile_along(const Workspace& ws, const PlanStart& start, const WindowMap& windows,
                                        const PlannerConfig& config) {
  SpeedProfiler profiler(start.path, config.lattice, config.radius, ws.grid(), windows, start.t_branch(),
                         config.profile);
  const ProfileResult r = profiler.solve(start.cursor);
  if (!r.feasible) return std::nullopt;
  MotionPlan plan = build_plan(start, r.actions, config.lattice);
  if (!acceptable(plan, start.t_c, windows, ws, config)) return std::nullopt;
  return plan;
}

// Drops intermediate waypoints where the direction does not change.
std::vector<Vec2> merge_straight_runs(Vec2 origin, const std::vector<Primitive>& primitives) {
  std::vector<Vec2> out;
  Vec2 prev = origin;
  for (const Primitive& p : primitives) {
    if (p.hold) continue;
    if (out.size() >= 1) {
      const Vec2 a = prev - (out.size() >= 2 ? out[out.size() - 2] : origin);
      const Vec2 b = p.target - prev;
      const double cross = a.x * b.y - a.y * b.x;
      if (std::abs(cross) <= 1e-12 * a.norm() * b.norm() && dot(a, b) > 0.0) {
        out.back() = p.target;
        prev = p.target;
        continue;
      }
    }
    out.push_back(p.target);
    prev = p.target;
  }
  return out;
}

}  // namespace

const char* to_string(PlanOutcome o) {
  switch (o) {
    case PlanOutcome::FixedPath: return "FixedPath";
    case PlanOutcome::Replanned: return "Replanned";
    case PlanOutcome::Infeasible: return "Infeasible";
  }
  return "?";
}

bool footprint_inside(const Rect& region, Vec2 p, double radius) {
  return region.contains(Rect{p.x - radius, p.y - radius, p.x + radius, p.y + radius});
}

std::optional<Vec2> goal_point(const Workspace& ws, const Rect& goal, double radius) {
  const double r = radius + kGeomEps;
  const Rect inner{goal.xmin + r, goal.ymin + r, goal.xmax - r, goal.ymax - r};
  if (inner.xmax < inner.xmin || inner.ymax < inner.ymin) return std::nullopt;
  const Vec2 c = inner.center();
  if (ws.is_region_free(Disc{c, r})) return c;
  const double step = ws.cell_size() / 4.0;
  const int nx = static_cast<int>(std::floor(inner.width() / step));
  const int ny = static_cast<int>(std::floor(inner.height() / step));
  std::vector<Vec2> candidates;
  for (int i = 0; i <= nx; ++i) {
    for (int j = 0; j <= ny; ++j) candidates.push_back({inner.xmin + i * step, inner.ymin + j * step});
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](Vec2 a, Vec2 b) { return distance(a, c) < distance(b, c); });
  for (const Vec2& p : candidates) {
    if (ws.is_region_free(Disc{p, r})) return p;
  }
  return std::nullopt;
}

bool satisfies_limits(const Trajectory& trajectory, const Limits& limits) {
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    if (!check_limits(trajectory.state(k), trajectory.input(k), limits)) return false;
  }
  return true;
}

WindowMap restrict_windows(const WindowMap& windows, const CellSet& cells) {
  WindowMap out;
  for (const auto& [cell, intervals] : windows) {
    if (cells.contains(cell)) out.emplace(cell, intervals);
  }
  return out;
}

MotionPlan initial_plan(const Workspace& ws, const RobotState& start, const Rect& goal,
                        const PlannerConfig& config, double t0) {
  if (start.v != 0.0 || start.omega != 0.0) throw std::invalid_argument("initial plan needs a start at rest");
  const MotionPlan still = stationary_plan(start, t0, config.lattice.dt);
  if (footprint_inside(goal, start.position(), config.radius)) return still;
  const auto g = goal_point(ws, goal, config.radius);
  if (!g) throw InfeasibleError("goal region has no free point for the footprint");
  PlanResult r = trajectory_plan(ws, branch_point(still, t0), *g, {}, config);
  if (!r.plan) throw InfeasibleError("goal unreachable");
  return std::move(*r.plan);
}

PlanResult fixed_path_plan(const Workspace& ws, const PlanStart& start, const WindowMap& windows,
                           const PlannerConfig& config) {
  PlanResult out;
  if (auto plan = profile_along(ws, start, windows, config)) {
    out.outcome = PlanOutcome::FixedPath;
    out.plan = std::move(plan);
  }
  return out;
}

PlanResult trajectory_plan(const Workspace& ws, const PlanStart& start, Vec2 goal, const WindowMap& windows,
                           const PlannerConfig& config) {
  PlanResult out;
  const LatticeSpec& lattice = config.lattice;

  PlanBuilder braking(lattice, start);
  while (braking.cursor().level > 0) braking.apply(Action::Brake);
  const MotionPlan settled = std::move(braking).finish();
  const RobotState stop = settled.trajectory.back();
  const double t_stop = settled.trajectory.end_time();

  SpaceTimeLattice search(ws, lattice, config.radius, windows, t_stop, stop.position(), goal, config.search);
  std::optional<MotionPlan> best;
  auto consider = [&](std::optional<MotionPlan> candidate) {
    if (!candidate) return;
    if (!best || candidate->arrival_time() < best->arrival_time() - 1e-9) best = std::move(candidate);
  };

  const std::vector<Vec2> route = search.static_route();
  if (route.empty() && !(stop.position() == goal)) return out;
  consider(profile_along(ws, restart(settled, make_path(stop.position(), stop.theta, route, lattice), start.t_c),
                         windows, config));

  if (!windows.empty()) {
    const SpaceTimeResult found = space_time_search(search, stop.theta);
    if (found.feasible) {
      const std::vector<Vec2> merged = merge_straight_runs(stop.position(), found.primitives);
      consider(profile_along(ws, restart(settled, make_path(stop.position(), stop.theta, merged, lattice), start.t_c),
                             windows, config));

      const Path raw_path = primitives_path(stop.position(), stop.theta, found.primitives, lattice);
      MoveTable moves(lattice);
      const PlanStart raw_start = restart(settled, raw_path, start.t_c);
      MotionPlan raw = build_plan(raw_start, primitives_actions(raw_path, found.primitives, moves), lattice);
      if (acceptable(raw, start.t_c, windows, ws, config)) consider(std::move(raw));
    }
  }
  if (best) {
    out.outcome = PlanOutcome::Replanned;
    out.plan = std::move(best);
  }
  return out;
}

CascadeResult plan(const Workspace& ws, const MotionPlan& current, double t_c, Vec2 goal,
                   const WindowMap& fixed_path_windows, const WindowMap& trajectory_windows,
                   const PlannerConfig& config) {
  CascadeResult out;
  const PlanStart start = branch_point(current, t_c);
  out.fixed_path_tried = true;
  out.result = fixed_path_plan(ws, start, fixed_path_windows, config);
  if (out.result.feasible()) {
    out.mode = Mode::Free;
    return out;
  }
  out.trajectory_tried = true;
  out.result = trajectory_plan(ws, start, goal, trajectory_windows, config);
  out.mode = out.result.feasible() ? Mode::Free : Mode::Emerg;
  return out;
}

MotionPlan brake_plan(const MotionPlan& current, double t_c, const LatticeSpec& lattice) {
  PlanBuilder builder(lattice, branch_point(current, t_c));
  while (builder.cursor().level > 0) builder.apply(Action::Brake);
  return std::move(builder).finish();
}

MotionPlan halt_plan(const RobotState& state, double t_c, double dt) { return stationary_plan(state, t_c, dt); }

}  // namespace mrmc
