#include "mrmc/path.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mrmc {

namespace {
constexpr double kTimeSlack = 1e-9;
constexpr double kLengthSlack = 1e-9;
}  // namespace

double LatticeSpec::speed(int level) const {
  return std::min(static_cast<double>(level) * dv, limits.v_max);
}

LatticeSpec LatticeSpec::make(const Limits& limits, double dt, double dt_plan) {
  if (!limits.valid()) throw std::invalid_argument("limits must be positive");
  if (!(dt > 0.0) || !(dt_plan > 0.0)) throw std::invalid_argument("time steps must be positive");
  const double ratio = dt_plan / dt;
  const double m = std::round(ratio);
  if (m < 1.0 || std::abs(ratio - m) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("dt_plan must be an integer multiple of dt");
  }
  LatticeSpec out;
  out.limits = limits;
  out.dt = dt;
  out.substeps = static_cast<int>(m);
  out.dv = limits.F_max * out.dt_plan();
  out.levels = static_cast<int>(std::floor(limits.v_max / out.dv + 1e-9));
  out.unit = 0.5 * limits.F_max * out.dt_plan() * out.dt_plan();
  if (out.levels < 1) throw std::invalid_argument("v_max is below one speed step F_max * dt_plan");
  return out;
}

double Path::length() const {
  double s = 0.0;
  for (const Leg& l : legs) s += l.length;
  return s;
}

std::vector<Vec2> Path::waypoints() const {
  std::vector<Vec2> out{origin};
  for (const Leg& l : legs) out.push_back(l.end);
  return out;
}

RotationProfile plan_rotation(double from, double to, const LatticeSpec& lattice) {
  RotationProfile out;
  const double delta = normalize_angle(to - from);
  if (std::abs(delta) < 1e-12) return out;
  const double sign = delta > 0 ? 1.0 : -1.0;
  const double dt = lattice.dt;
  const Limits& lim = lattice.limits;
  // Accelerate n samples, coast c, decelerate n; the turn angle is
  // alpha * dt^2 * (n^2 + n*c). Shortest total length first, then the most
  // triangular split.
  for (int total = 2;; ++total) {
    for (int n = total / 2; n >= 1; --n) {
      const int c = total - 2 * n;
      const double alpha = std::abs(delta) / (dt * dt * (static_cast<double>(n) * n + static_cast<double>(n) * c));
      if (alpha > lim.tau_max || alpha * dt * n > lim.omega_max) continue;
      out.alpha.assign(static_cast<std::size_t>(n), sign * alpha);
      out.alpha.insert(out.alpha.end(), static_cast<std::size_t>(c), 0.0);
      out.alpha.insert(out.alpha.end(), static_cast<std::size_t>(n), -sign * alpha);
      out.plan_steps = (total + lattice.substeps - 1) / lattice.substeps;
      out.alpha.resize(static_cast<std::size_t>(out.plan_steps * lattice.substeps), 0.0);
      return out;
    }
  }
}

Path make_path(Vec2 origin, double initial_heading, std::span<const Vec2> waypoints,
               const LatticeSpec& lattice) {
  Path path;
  path.origin = origin;
  path.initial_heading = normalize_angle(initial_heading);
  Vec2 at = origin;
  double heading = path.initial_heading;
  for (const Vec2& w : waypoints) {
    const Vec2 d = w - at;
    const double len = d.norm();
    if (len < kLengthSlack) continue;
    Leg leg;
    leg.start = at;
    leg.end = w;
    leg.dir = (1.0 / len) * d;
    leg.heading = std::atan2(d.y, d.x);
    leg.length = len;
    int units = static_cast<int>(std::floor(len / lattice.unit + 1e-9));
    units -= units % 2;
    leg.lattice_units = units;
    leg.creep = std::max(0.0, len - units * lattice.unit);
    if (leg.creep < kLengthSlack) leg.creep = 0.0;
    leg.heading_before = heading;
    leg.rotation_steps = plan_rotation(heading, leg.heading, lattice).plan_steps;
    path.legs.push_back(leg);
    at = w;
    heading = leg.heading;
  }
  return path;
}

MotionPlan stationary_plan(const RobotState& state, double t, double dt) {
  MotionPlan plan;
  RobotState s = state;
  s.v = s.omega = 0.0;
  plan.trajectory = Trajectory(t, dt);
  plan.trajectory.push_back(s);
  plan.path.origin = s.position();
  plan.path.initial_heading = s.theta;
  plan.cursors.push_back({0, 0, 0, false, true});
  return plan;
}

PlanStart branch_point(const MotionPlan& plan, double t_c) {
  if (plan.empty()) throw std::invalid_argument("empty plan");
  const Trajectory& traj = plan.trajectory;
  if (t_c < traj.start_time() - kTimeSlack) throw std::invalid_argument("t_c precedes the plan");

  PlanStart out;
  out.t_c = t_c;
  if (t_c >= traj.end_time() - kTimeSlack) {
    RobotState s = traj.back();
    s.v = s.omega = 0.0;
    out.prefix = Trajectory(t_c, traj.dt());
    out.prefix.push_back(s);
    out.path.origin = s.position();
    out.path.initial_heading = s.theta;
    out.cursor = {0, 0, 0, false, true};
    out.prefix_cursors.push_back(out.cursor);
    return out;
  }

  const std::size_t k0 = traj.index_at(t_c);
  if (std::abs(traj.time(k0) - t_c) > 1e-6) throw std::invalid_argument("t_c is not a sample time");
  std::size_t kb = k0;
  while (kb + 1 < traj.size() && !plan.cursors[kb].decision) ++kb;

  out.prefix = Trajectory(t_c, traj.dt());
  out.prefix.push_back(traj.state(k0));
  for (std::size_t k = k0 + 1; k <= kb; ++k) out.prefix.push_back(traj.state(k), traj.input(k - 1));

  const Cursor& c = plan.cursors[kb];
  const int first = std::min(c.leg, static_cast<int>(plan.path.legs.size()));
  if (first < static_cast<int>(plan.path.legs.size())) {
    const Leg& leg = plan.path.legs[static_cast<std::size_t>(first)];
    out.path.origin = leg.start;
    out.path.initial_heading = leg.heading_before;
    out.path.legs.assign(plan.path.legs.begin() + first, plan.path.legs.end());
  } else {
    out.path.origin = traj.state(kb).position();
    out.path.initial_heading = traj.state(kb).theta;
  }
  out.cursor = c;
  out.cursor.leg -= first;
  out.cursor.decision = true;
  for (std::size_t k = k0; k < kb; ++k) out.prefix_cursors.push_back({-1, 0, 0, false, false});
  out.prefix_cursors.push_back(out.cursor);
  return out;
}

int accel_of(Action a) {
  switch (a) {
    case Action::Accelerate: return 1;
    case Action::Brake: return -1;
    default: return 0;
  }
}

PlanBuilder::PlanBuilder(const LatticeSpec& lattice, const PlanStart& start)
    : lattice_(lattice), cursor_(start.cursor) {
  plan_.trajectory = start.prefix;
  plan_.path = start.path;
  plan_.cursors = start.prefix_cursors;
  if (plan_.trajectory.empty() || plan_.cursors.size() != plan_.trajectory.size()) {
    throw std::invalid_argument("plan start needs one cursor per prefix sample");
  }
  if (std::abs(lattice.dt - plan_.trajectory.dt()) > 1e-12) {
    throw std::invalid_argument("plan start sampled with a different dt");
  }
}

void PlanBuilder::push(const RobotState& s, const ControlInput& u, const Cursor& c) {
  plan_.trajectory.push_back(s, u);
  plan_.cursors.push_back(c);
}

void PlanBuilder::normalize_cursor() {
  const int n = static_cast<int>(plan_.path.legs.size());
  while (cursor_.leg < n) {
    const Leg& leg = plan_.path.legs[static_cast<std::size_t>(cursor_.leg)];
    if (cursor_.before_rotation || cursor_.level != 0 || cursor_.s_units != leg.lattice_units ||
        leg.has_creep()) {
      break;
    }
    ++cursor_.leg;
    cursor_.s_units = 0;
    cursor_.before_rotation =
        cursor_.leg < n && plan_.path.legs[static_cast<std::size_t>(cursor_.leg)].rotation_steps > 0;
  }
}

void PlanBuilder::apply(Action action) {
  const int m = lattice_.substeps;
  const double dt = lattice_.dt;
  const Limits& lim = lattice_.limits;
  const int n = static_cast<int>(plan_.path.legs.size());
  const bool on_leg = cursor_.leg < n;
  RobotState s = state();
  Cursor mid = cursor_;
  mid.decision = false;

  switch (action) {
    case Action::Hold: {
      if (cursor_.level != 0) throw std::logic_error("hold while moving");
      s.v = s.omega = 0.0;
      for (int j = 0; j < m; ++j) {
        Cursor c = j + 1 == m ? cursor_ : mid;
        if (j + 1 == m) c.decision = true;
        push(s, {}, c);
      }
      cursor_.decision = true;
      return;
    }
    case Action::Accelerate:
    case Action::Cruise:
    case Action::Brake: {
      if (!on_leg || cursor_.before_rotation) throw std::logic_error("translation off the lattice");
      const Leg& leg = plan_.path.legs[static_cast<std::size_t>(cursor_.leg)];
      const int a = accel_of(action);
      const int next_level = cursor_.level + a;
      const int next_s = cursor_.s_units + 2 * cursor_.level + a;
      if (next_level < 0 || next_level > lattice_.levels || next_s > leg.lattice_units) {
        throw std::logic_error("translation leaves the lattice");
      }
      const ControlInput u{a * lim.F_max, 0.0};
      s.theta = normalize_angle(leg.heading);
      s.omega = 0.0;
      for (int j = 1; j <= m; ++j) {
        RobotState next = integrate_step(s, u, dt);
        next.theta = s.theta;
        next.omega = 0.0;
        next.v = std::clamp(cursor_.level * lattice_.dv + a * lim.F_max * dt * j, 0.0, lim.v_max);
        Cursor c = mid;
        if (j == m) {
          cursor_.level = next_level;
          cursor_.s_units = next_s;
          const Vec2 p = leg.at(next_s * lattice_.unit);
          next.x = p.x;
          next.y = p.y;
          next.v = lattice_.speed(next_level);
          normalize_cursor();
          cursor_.decision = true;
          c = cursor_;
        }
        push(next, u, c);
        s = next;
      }
      return;
    }
    case Action::Rotate: {
      if (!on_leg || !cursor_.before_rotation) throw std::logic_error("rotation not pending");
      const Leg& leg = plan_.path.legs[static_cast<std::size_t>(cursor_.leg)];
      const RotationProfile rot = plan_rotation(leg.heading_before, leg.heading, lattice_);
      s.v = 0.0;
      double omega = 0.0;
      for (std::size_t j = 0; j < rot.alpha.size(); ++j) {
        const ControlInput u{0.0, rot.alpha[j]};
        RobotState next = integrate_step(s, u, dt);
        omega += rot.alpha[j] * dt;
        if (std::abs(omega) < 1e-12) omega = 0.0;
        next.omega = std::clamp(omega, -lim.omega_max, lim.omega_max);
        next.v = 0.0;
        next.x = leg.start.x;
        next.y = leg.start.y;
        Cursor c = mid;
        if (j + 1 == rot.alpha.size()) {
          next.theta = normalize_angle(leg.heading);
          next.omega = 0.0;
          cursor_.before_rotation = false;
          normalize_cursor();
          cursor_.decision = true;
          c = cursor_;
        }
        push(next, u, c);
        s = next;
      }
      if (rot.alpha.empty()) {
        cursor_.before_rotation = false;
        normalize_cursor();
      }
      return;
    }
    case Action::Creep: {
      if (!on_leg || cursor_.before_rotation || cursor_.level != 0) throw std::logic_error("creep not possible");
      const Leg& leg = plan_.path.legs[static_cast<std::size_t>(cursor_.leg)];
      if (!leg.has_creep() || cursor_.s_units != leg.lattice_units) throw std::logic_error("creep not possible");
      const double dtp = lattice_.dt_plan();
      const double ac = leg.creep / (dtp * dtp);
      s.theta = normalize_angle(leg.heading);
      for (int j = 1; j <= 2 * m; ++j) {
        const ControlInput u{j <= m ? ac : -ac, 0.0};
        RobotState next = integrate_step(s, u, dt);
        next.theta = s.theta;
        next.omega = 0.0;
        next.v = std::clamp(j <= m ? ac * dt * j : ac * dt * (2 * m - j), 0.0, lim.v_max);
        Cursor c = mid;
        if (j == 2 * m) {
          next.x = leg.end.x;
          next.y = leg.end.y;
          next.v = 0.0;
          ++cursor_.leg;
          cursor_.s_units = 0;
          cursor_.level = 0;
          cursor_.before_rotation =
              cursor_.leg < n && plan_.path.legs[static_cast<std::size_t>(cursor_.leg)].rotation_steps > 0;
          normalize_cursor();
          cursor_.decision = true;
          c = cursor_;
        }
        push(next, u, c);
        s = next;
      }
      return;
    }
  }
}

MotionPlan PlanBuilder::finish() && { return std::move(plan_); }

WindowMap to_window_map(std::span<const ForbiddenWindow> windows) {
  WindowMap out;
  for (const ForbiddenWindow& w : windows) out[w.cell].insert(w.interval);
  return out;
}

void add_windows(WindowMap& windows, const OccupancyMap& occupancy, const CellSet* cells) {
  for (const auto& [cell, intervals] : occupancy) {
    if (cells != nullptr && !cells->contains(cell)) continue;
    windows[cell].insert(intervals);
  }
}

bool complies(const Trajectory& trajectory, double from, double radius, const WindowMap& windows,
              const CellGrid& grid) {
  if (windows.empty()) return true;
  const PositionTrajectory positions = project_position(trajectory);
  const double start = std::max(from, positions.t0);
  const OccupancyMap occ = occupancy_map(positions, start, positions.end_time(), radius, grid);
  for (const auto& [cell, intervals] : occ) {
    auto it = windows.find(cell);
    if (it != windows.end() && it->second.intersects(intervals)) return false;
  }
  const Interval rest{positions.end_time(), kForever};
  for (const CellIndex& c : cells_intersecting(grid, Disc{positions.points.back(), radius})) {
    auto it = windows.find(c);
    if (it != windows.end() && it->second.intersects(rest)) return false;
  }
  return true;
}

}  // namespace mrmc
