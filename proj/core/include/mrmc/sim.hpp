#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "mrmc/agent.hpp"
#include "mrmc/scenario.hpp"

namespace mrmc {

/// Undirected sensing graph: i ~ j iff |p_i - p_j| <= R.
struct NeighborGraph {
  std::map<int, std::set<int>> adjacency;

  [[nodiscard]] const std::set<int>& neighbors(int id) const;
  /// Connected components, each sorted, ordered by smallest id.
  [[nodiscard]] std::vector<std::vector<int>> components() const;
  [[nodiscard]] std::size_t edge_count() const;
};

NeighborGraph neighbor_graph(const std::map<int, Vec2>& positions, double sensing_radius);

struct TraceRecord {
  double t = 0.0;
  int id = 0;
  RobotState state;
  ControlInput input;
  Mode mode = Mode::Free;
  Lifecycle lifecycle = Lifecycle::Inactive;
};

struct Event {
  double t = 0.0;
  std::string kind;
  int robot = -1;  // -1: not robot specific
  int peer = -1;
  std::string detail;
};

/// A disc moving on a straight segment over one tick.
struct SweptDisc {
  int id = 0;
  double radius = 0.0;
  Vec2 from;
  Vec2 to;
};

struct SafetyViolation {
  double t = 0.0;
  int robot = 0;
  int other = -1;  // -1: obstacle or workspace boundary
  double clearance = 0.0;
};

std::string to_string(const SafetyViolation& v);

/// Samples [t0, t0 + dt] every `resolution` seconds (endpoints included) and
/// reports the first sample where two footprints meet (closed discs, so
/// distance <= r_i + r_j) or a footprint pokes into an obstacle or out of
/// the bounds (touching is allowed).
std::optional<SafetyViolation> check_swept_safety(const Workspace& ws, std::span<const SweptDisc> discs, double t0,
                                                  double dt, double resolution = 1e-3);

enum class RunStatus { Completed = 0, SafetyViolation = 2, Deadline = 3 };

const char* to_string(RunStatus s);

struct RobotSummary {
  int id = 0;
  std::optional<double> completion_time;
  std::vector<double> replanning_instants;
  std::map<std::string, int> outcomes;  // planner outcome -> count
  int emergencies = 0;
  int recoveries = 0;
};

struct RunSummary {
  std::string scenario;
  std::uint64_t seed = 0;
  RunStatus status = RunStatus::Deadline;
  double end_time = 0.0;
  long ticks = 0;
  std::set<std::pair<int, int>> conflict_pairs;
  long rounds = 0;
  int max_stages = 0;
  std::vector<RobotSummary> robots;
  std::optional<SafetyViolation> violation;
};

struct RunOptions {
  std::optional<double> max_time;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
  bool assert_safety = true;
};

struct RunResult {
  Scenario scenario;
  std::map<int, std::vector<TraceRecord>> traces;
  std::vector<Event> events;
  RunSummary summary;
};

/// Raised when the planning-order digraph of a component has a cycle.
class PriorityCycleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Synchronous tick engine. Per tick: activation, neighbor graph, horizon
/// views, conflict detection by Free robots, one coordination round per
/// component with Busy or Emerg robots, trace rows, safety check over the
/// coming tick, state advance, goal settling.
class Simulator {
 public:
  explicit Simulator(Scenario scenario, const RunOptions& options = {});
  Simulator(const Simulator&) = delete;
  Simulator& operator=(const Simulator&) = delete;

  void step();
  [[nodiscard]] bool finished() const { return finished_; }
  [[nodiscard]] RunStatus status() const { return summary_.status; }
  [[nodiscard]] double time() const;
  [[nodiscard]] const Scenario& scenario() const { return scenario_; }
  [[nodiscard]] const Workspace& workspace() const { return *ws_; }
  [[nodiscard]] const std::vector<Agent>& agents() const { return agents_; }
  [[nodiscard]] const Agent& agent(int id) const;
  [[nodiscard]] const std::vector<Event>& events() const { return events_; }
  [[nodiscard]] const RunSummary& summary() const { return summary_; }

  RunResult take() &&;

 private:
  Agent& mutable_agent(int id);
  const HorizonView& view(int id);
  void log(std::string kind, int robot, int peer, std::string detail);
  void mode_change(const Agent& a, Mode before);
  void coordination_round(const std::vector<int>& component);
  void record_trace();
  bool check_safety();

  Scenario scenario_;
  bool assert_safety_ = true;
  std::unique_ptr<Workspace> ws_;
  std::vector<Agent> agents_;
  std::map<int, std::size_t> index_;
  std::map<int, std::vector<TraceRecord>> traces_;
  std::vector<Event> events_;
  RunSummary summary_;
  long tick_ = 0;
  bool finished_ = false;

  // Per-tick scratch.
  NeighborGraph graph_;
  std::map<int, HorizonView> views_;
  std::set<int> entered_emerg_;
};

RunResult run(const Scenario& scenario, const RunOptions& options = {});

}  // namespace mrmc
