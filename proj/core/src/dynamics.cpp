#include "mrmc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mrmc {

namespace {

struct Derivative {
  double dx, dy, dtheta, dv, domega;
};

Derivative f(const RobotState& s, const ControlInput& u) {
  return {s.v * std::cos(s.theta), s.v * std::sin(s.theta), s.omega, u.F, u.tau};
}

RobotState advance(const RobotState& s, const Derivative& d, double h) {
  return {s.x + h * d.dx, s.y + h * d.dy, s.theta + h * d.dtheta, s.v + h * d.dv,
          s.omega + h * d.domega};
}

// Sample times are compared with this slack so that accumulated rounding in
// t0 + k*dt does not push a query off the stored range.
constexpr double kTimeSlack = 1e-9;

}  // namespace

RobotState integrate_step(const RobotState& state, const ControlInput& input, double dt) {
  const Derivative k1 = f(state, input);
  const Derivative k2 = f(advance(state, k1, 0.5 * dt), input);
  const Derivative k3 = f(advance(state, k2, 0.5 * dt), input);
  const Derivative k4 = f(advance(state, k3, dt), input);
  const double w = dt / 6.0;
  RobotState next{
      state.x + w * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx),
      state.y + w * (k1.dy + 2.0 * k2.dy + 2.0 * k3.dy + k4.dy),
      state.theta + w * (k1.dtheta + 2.0 * k2.dtheta + 2.0 * k3.dtheta + k4.dtheta),
      state.v + w * (k1.dv + 2.0 * k2.dv + 2.0 * k3.dv + k4.dv),
      state.omega + w * (k1.domega + 2.0 * k2.domega + 2.0 * k3.domega + k4.domega),
  };
  next.theta = normalize_angle(next.theta);
  return next;
}

bool check_limits(const RobotState& state, const ControlInput& input, const Limits& limits) {
  return std::abs(state.v) <= limits.v_max && std::abs(state.omega) <= limits.omega_max &&
         std::abs(input.F) <= limits.F_max && std::abs(input.tau) <= limits.tau_max;
}

Trajectory::Trajectory(double t0, double dt) : t0_(t0), dt_(dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("trajectory dt must be positive");
}

Trajectory::Trajectory(double t0, double dt, std::vector<RobotState> states,
                       std::vector<ControlInput> inputs)
    : t0_(t0), dt_(dt), states_(std::move(states)), inputs_(std::move(inputs)) {
  if (!(dt > 0.0)) throw std::invalid_argument("trajectory dt must be positive");
  if (inputs_.size() != states_.size()) {
    throw std::invalid_argument("trajectory needs one input per state");
  }
}

double Trajectory::end_time() const {
  return states_.empty() ? t0_ : time(states_.size() - 1);
}

void Trajectory::push_back(const RobotState& s, const ControlInput& applied_before) {
  if (!inputs_.empty()) inputs_.back() = applied_before;
  states_.push_back(s);
  inputs_.push_back({});
}

std::size_t Trajectory::index_at(double t) const {
  if (states_.empty()) throw std::out_of_range("empty trajectory");
  const double k = std::round((t - t0_) / dt_);
  if (k <= 0.0) return 0;
  return std::min(static_cast<std::size_t>(k), states_.size() - 1);
}

RobotState Trajectory::state_at(double t) const {
  if (states_.empty()) throw std::out_of_range("empty trajectory");
  if (t >= end_time() - kTimeSlack) {
    RobotState s = states_.back();
    if (t > end_time() + kTimeSlack) s.v = s.omega = 0.0;
    return s;
  }
  if (t <= t0_) return states_.front();
  const double u = (t - t0_) / dt_;
  const double nearest = std::round(u);
  if (std::abs(u - nearest) < 1e-9) return states_[static_cast<std::size_t>(nearest)];
  const auto k = static_cast<std::size_t>(std::floor(u));
  const double a = u - static_cast<double>(k);
  const RobotState& s0 = states_[k];
  const RobotState& s1 = states_[k + 1];
  RobotState s = s0;
  s.x = s0.x + a * (s1.x - s0.x);
  s.y = s0.y + a * (s1.y - s0.y);
  s.theta = normalize_angle(s0.theta + a * normalize_angle(s1.theta - s0.theta));
  return s;
}

Vec2 Trajectory::position_at(double t) const { return state_at(t).position(); }

Trajectory Trajectory::tail(std::size_t first) const {
  Trajectory out(time(first), dt_);
  out.states_.assign(states_.begin() + static_cast<std::ptrdiff_t>(first), states_.end());
  out.inputs_.assign(inputs_.begin() + static_cast<std::ptrdiff_t>(first), inputs_.end());
  return out;
}

double PositionTrajectory::end_time() const {
  return points.empty() ? t0 : time(points.size() - 1);
}

Vec2 PositionTrajectory::at(double t) const {
  if (points.empty()) throw std::out_of_range("empty trajectory");
  if (t <= t0) return points.front();
  if (t >= end_time()) return points.back();
  const double u = (t - t0) / dt;
  const auto k = std::min(static_cast<std::size_t>(std::floor(u)), points.size() - 2);
  const double a = u - static_cast<double>(k);
  return points[k] + a * (points[k + 1] - points[k]);
}

PositionTrajectory project_position(const Trajectory& trajectory) {
  PositionTrajectory out{trajectory.start_time(), trajectory.dt(), {}};
  out.points.reserve(trajectory.size());
  for (const RobotState& s : trajectory.states()) out.points.push_back(s.position());
  return out;
}

double first_leave_time(const PositionTrajectory& trajectory, Vec2 center, double radius,
                        double t_c) {
  if (trajectory.empty() || t_c < trajectory.t0 - kTimeSlack ||
      t_c > trajectory.end_time() + kTimeSlack) {
    throw std::invalid_argument("trajectory does not cover t_c");
  }
  for (std::size_t k = 0; k < trajectory.size(); ++k) {
    const double t = trajectory.time(k);
    if (t <= t_c + kTimeSlack) continue;
    if (distance(trajectory.points[k], center) > radius) return t;
  }
  return trajectory.end_time();
}

double first_leave_time(const Trajectory& trajectory, Vec2 center, double radius, double t_c) {
  return first_leave_time(project_position(trajectory), center, radius, t_c);
}

}  // namespace mrmc
