#include "mrmc/sim.hpp"

#include <algorithm>
#include <cmath>

#include "mrmc/format.hpp"

namespace mrmc {

namespace {

constexpr double kTickSlack = 1e-9;

std::string join_ids(const std::set<int>& ids) {
  std::string out;
  for (int id : ids) out += (out.empty() ? "" : " ") + std::to_string(id);
  return out;
}

// Same samples from t on, up to rounding.
bool same_motion(const Trajectory& a, const Trajectory& b, double t) {
  if (std::abs(a.end_time() - b.end_time()) > 1e-9) return false;
  const std::size_t ka = a.index_at(t);
  const std::size_t kb = b.index_at(t);
  if (a.size() - ka != b.size() - kb) return false;
  for (std::size_t k = 0; ka + k < a.size(); ++k) {
    const RobotState& s = a.state(ka + k);
    const RobotState& u = b.state(kb + k);
    if (distance(s.position(), u.position()) > 1e-9 || std::abs(s.v - u.v) > 1e-9) return false;
  }
  return true;
}

}  // namespace

const std::set<int>& NeighborGraph::neighbors(int id) const {
  static const std::set<int> none;
  auto it = adjacency.find(id);
  return it == adjacency.end() ? none : it->second;
}

std::vector<std::vector<int>> NeighborGraph::components() const {
  std::vector<std::vector<int>> out;
  std::set<int> seen;
  for (const auto& [root, unused] : adjacency) {
    if (seen.contains(root)) continue;
    std::vector<int> comp;
    std::vector<int> stack{root};
    seen.insert(root);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      comp.push_back(u);
      for (int w : neighbors(u)) {
        if (seen.insert(w).second) stack.push_back(w);
      }
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

std::size_t NeighborGraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& [u, adj] : adjacency) n += adj.size();
  return n / 2;
}

NeighborGraph neighbor_graph(const std::map<int, Vec2>& positions, double sensing_radius) {
  NeighborGraph g;
  for (const auto& [i, p] : positions) {
    g.adjacency[i];
    for (const auto& [j, q] : positions) {
      if (j <= i) continue;
      if (distance(p, q) <= sensing_radius) {
        g.adjacency[i].insert(j);
        g.adjacency[j].insert(i);
      }
    }
  }
  return g;
}

std::string to_string(const SafetyViolation& v) {
  std::string who = "robot " + std::to_string(v.robot);
  who += v.other >= 0 ? " and robot " + std::to_string(v.other) : " and the workspace";
  return who + " at t=" + format_number(v.t) + " (clearance " + format_number(v.clearance) + ")";
}

std::optional<SafetyViolation> check_swept_safety(const Workspace& ws, std::span<const SweptDisc> discs, double t0,
                                                  double dt, double resolution) {
  const int n = std::max(1, static_cast<int>(std::lround(dt / resolution)));
  auto at = [&](const SweptDisc& d, int s) { return d.from + (d.to - d.from) * (static_cast<double>(s) / n); };

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t a = 0; a < discs.size(); ++a) {
    for (std::size_t b = a + 1; b < discs.size(); ++b) {
      const double travel = (discs[a].to - discs[a].from).norm() + (discs[b].to - discs[b].from).norm();
      if (distance(discs[a].from, discs[b].from) - travel > discs[a].radius + discs[b].radius) continue;
      pairs.emplace_back(a, b);
    }
  }
  std::vector<std::pair<std::size_t, const Rect*>> near;
  for (std::size_t a = 0; a < discs.size(); ++a) {
    for (const Rect& o : ws.obstacles()) {
      if (distance(discs[a].from, discs[a].to, o) < discs[a].radius) near.emplace_back(a, &o);
    }
  }
  const Rect& bounds = ws.bounds();
  for (int s = 0; s <= n; ++s) {
    const double t = t0 + dt * static_cast<double>(s) / n;
    for (const auto& [a, b] : pairs) {
      const double gap = distance(at(discs[a], s), at(discs[b], s)) - discs[a].radius - discs[b].radius;
      if (gap <= 0.0) return SafetyViolation{t, discs[a].id, discs[b].id, gap};
    }
    for (const auto& [a, o] : near) {
      const double gap = distance(at(discs[a], s), *o) - discs[a].radius;
      if (gap < 0.0) return SafetyViolation{t, discs[a].id, -1, gap};
    }
    for (const SweptDisc& d : discs) {
      const Vec2 p = at(d, s);
      const double gap = std::min({p.x - bounds.xmin, bounds.xmax - p.x, p.y - bounds.ymin, bounds.ymax - p.y}) -
                         d.radius;
      if (gap < 0.0) return SafetyViolation{t, d.id, -1, gap};
    }
  }
  return std::nullopt;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::Completed: return "completed";
    case RunStatus::SafetyViolation: return "safety_violation";
    case RunStatus::Deadline: return "deadline";
  }
  return "?";
}

Simulator::Simulator(Scenario scenario, const RunOptions& options)
    : scenario_(std::move(scenario)), assert_safety_(options.assert_safety) {
  if (options.max_time) scenario_.max_time = *options.max_time;
  if (options.dt) scenario_.dt = *options.dt;
  if (options.seed) scenario_.seed = *options.seed;
  validate(scenario_);
  ws_ = std::make_unique<Workspace>(scenario_.bounds, scenario_.obstacles, scenario_.cell_size);
  std::vector<RobotSpec> specs = scenario_.robots;
  std::sort(specs.begin(), specs.end(), [](const RobotSpec& a, const RobotSpec& b) { return a.id < b.id; });
  agents_.reserve(specs.size());
  for (const RobotSpec& spec : specs) {
    PlannerConfig config{LatticeSpec::make(spec.limits, scenario_.dt, scenario_.dt_plan), spec.radius, {}, {}};
    index_[spec.id] = agents_.size();
    agents_.emplace_back(spec, *ws_, config, scenario_.braking);
    summary_.robots.push_back({spec.id, std::nullopt, {}, {}, 0, 0});
  }
  summary_.scenario = scenario_.name;
  summary_.seed = scenario_.seed;
}

double Simulator::time() const { return static_cast<double>(tick_) * scenario_.dt; }

const Agent& Simulator::agent(int id) const { return agents_.at(index_.at(id)); }

Agent& Simulator::mutable_agent(int id) { return agents_.at(index_.at(id)); }

const HorizonView& Simulator::view(int id) {
  auto it = views_.find(id);
  if (it == views_.end()) it = views_.emplace(id, agent(id).publish(time(), scenario_.sensing_radius)).first;
  return it->second;
}

void Simulator::log(std::string kind, int robot, int peer, std::string detail) {
  events_.push_back({time(), std::move(kind), robot, peer, std::move(detail)});
}

void Simulator::mode_change(const Agent& a, Mode before) {
  if (a.mode() == before) return;
  log("mode", a.id(), -1, std::string(to_string(before)) + "->" + to_string(a.mode()));
  RobotSummary& rs = summary_.robots[index_.at(a.id())];
  if (a.mode() == Mode::Emerg) {
    ++rs.emergencies;
    entered_emerg_.insert(a.id());
  }
}

void Simulator::step() {
  if (finished_) return;
  const double t = time();
  views_.clear();
  entered_emerg_.clear();

  for (Agent& a : agents_) {
    if (a.activate(t)) {
      log("activate", a.id(), -1, std::string("mode=") + to_string(a.mode()));
      if (a.mode() == Mode::Emerg) {
        ++summary_.robots[index_.at(a.id())].emergencies;
        entered_emerg_.insert(a.id());
      }
    }
  }

  std::map<int, Vec2> positions;
  for (const Agent& a : agents_) positions[a.id()] = a.state().position();
  graph_ = neighbor_graph(positions, scenario_.sensing_radius);

  for (Agent& a : agents_) {
    if (a.lifecycle() != Lifecycle::Active || a.mode() != Mode::Free) continue;
    const std::set<int>& nbrs = graph_.neighbors(a.id());
    if (nbrs.empty()) continue;
    std::map<int, OccupancyMap> maps;
    for (int j : nbrs) maps[j] = view(j).occupancy;
    const ConflictReport report = a.detect(view(a.id()).occupancy, maps);
    for (const auto& [j, cells] : report.cells) {
      std::string detail;
      for (const CellConflict& c : cells) {
        detail += (detail.empty() ? "" : ";") + to_string(c.cell) + "@" + to_string(c.overlap);
      }
      log("conflict", a.id(), j, detail);
      summary_.conflict_pairs.insert(std::minmax(a.id(), j));
    }
    mode_change(a, Mode::Free);
  }

  for (const std::vector<int>& comp : graph_.components()) {
    const bool needs_round = std::any_of(comp.begin(), comp.end(), [&](int id) {
      const Agent& a = agent(id);
      return a.lifecycle() == Lifecycle::Active && a.mode() != Mode::Free;
    });
    if (needs_round) coordination_round(comp);
  }

  record_trace();
  if (assert_safety_ && !check_safety()) {
    summary_.status = RunStatus::SafetyViolation;
    summary_.end_time = t;
    summary_.ticks = tick_ + 1;
    finished_ = true;
    return;
  }

  for (Agent& a : agents_) a.advance(t, scenario_.dt);
  ++tick_;
  const double next = time();
  for (Agent& a : agents_) {
    if (a.settle(next, scenario_.dt)) {
      summary_.robots[index_.at(a.id())].completion_time = next;
      events_.push_back({next, "passive", a.id(), -1, ""});
    }
  }
  summary_.ticks = tick_;
  summary_.end_time = next;
  const bool done = std::all_of(agents_.begin(), agents_.end(),
                                [](const Agent& a) { return a.lifecycle() == Lifecycle::Passive; });
  if (done) {
    summary_.status = RunStatus::Completed;
    finished_ = true;
  } else if (next >= scenario_.max_time - kTickSlack) {
    summary_.status = RunStatus::Deadline;
    events_.push_back({next, "deadline", -1, -1, ""});
    finished_ = true;
  }
}

void Simulator::coordination_round(const std::vector<int>& component) {
  const double t = time();
  std::map<int, PriorityContext> contexts;
  for (int i : component) {
    double entry = kForever;
    const HorizonView& vi = view(i);
    for (int j : graph_.neighbors(i)) {
      entry = std::min(entry, earliest_entry_time(conflict_region(vi.occupancy, view(j).occupancy), vi.occupancy, t));
    }
    contexts[i] = agent(i).context(static_cast<int>(graph_.neighbors(i).size()), entry);
  }

  PriorityDigraph digraph;
  std::map<int, std::set<int>> before;
  for (int i : component) {
    digraph.add_node(i);
    std::vector<PriorityContext> nbrs;
    for (int j : graph_.neighbors(i)) nbrs.push_back(contexts[j]);
    before[i] = determine_order(contexts[i], nbrs);
    for (int j : before[i]) digraph.add_edge(j, i);
  }
  if (!digraph.find_cycle().empty()) {
    log("cycle", -1, -1, digraph.dump());
    throw PriorityCycleError("planning order has a cycle at t=" + format_number(t) + "\n" + digraph.dump());
  }
  const std::vector<std::vector<int>> stages = digraph.stages();
  ++summary_.rounds;
  summary_.max_stages = std::max(summary_.max_stages, static_cast<int>(stages.size()));
  std::string layout;
  for (const auto& stage : stages) layout += "[" + join_ids({stage.begin(), stage.end()}) + "]";
  log("round", -1, -1, "members=" + join_ids({component.begin(), component.end()}) + ";stages=" + layout);

  std::set<int> pending;
  for (int i : component) {
    const Agent& a = agent(i);
    if (a.lifecycle() == Lifecycle::Active && a.mode() == Mode::Busy) pending.insert(i);
  }
  for (int i : component) {
    if (!before[i].empty()) log("order", i, -1, "before=" + join_ids(before[i]));
  }

  for (const auto& stage : stages) {
    std::set<int> planned;
    for (int i : stage) {
      Agent& a = mutable_agent(i);
      if (a.lifecycle() != Lifecycle::Active || a.mode() == Mode::Free) continue;
      if (a.mode() == Mode::Emerg && entered_emerg_.contains(i)) continue;

      // Everyone whose plan is settled by now constrains i: Y_i, and all
      // neighbors that are not waiting to replan in this round.
      const HorizonView& mine = view(i);
      const CellSet my_cells = mine.cells();
      const CellSet ball = cells_intersecting(ws_->grid(), Disc{a.state().position(), scenario_.sensing_radius});
      WindowMap fixed_path_windows;
      WindowMap trajectory_windows;
      for (int j : graph_.neighbors(i)) {
        if (pending.contains(j)) continue;
        const HorizonView& other = view(j);
        if (spatial_conflict(my_cells, other.cells())) add_windows(fixed_path_windows, other.occupancy);
        add_windows(trajectory_windows, other.occupancy, &ball);
      }

      const Mode mode = a.mode();
      RobotSummary& rs = summary_.robots[index_.at(i)];
      if (mode == Mode::Busy) {
        const Trajectory previous = a.plan().trajectory;
        const CascadeResult r = a.replan(t, fixed_path_windows, trajectory_windows);
        const bool changed = r.result.feasible() && !same_motion(previous, a.plan().trajectory, t);
        const bool fixed_ok = r.result.outcome == PlanOutcome::FixedPath;
        std::string detail = std::string("fppp=") + (fixed_ok ? "feasible" : "infeasible");
        detail += std::string(";tpp=") +
                  (!r.trajectory_tried ? "skipped" : (r.result.feasible() ? "feasible" : "infeasible"));
        detail += std::string(";outcome=") + to_string(r.result.outcome);
        if (r.result.feasible()) {
          detail += ";arrival=" + format_time(a.plan().arrival_time());
          detail += std::string(";changed=") + (changed ? "yes" : "no");
        }
        log("plan", i, -1, detail);
        ++rs.outcomes[to_string(r.result.outcome)];
        if (changed) rs.replanning_instants.push_back(t);
        planned.insert(i);
      } else {
        const PlanResult r = a.recover(t, trajectory_windows);
        if (r.feasible()) {
          log("recover", i, -1, "tpp=feasible;arrival=" + format_time(a.plan().arrival_time()));
          ++rs.recoveries;
        }
      }
      mode_change(a, mode);
      views_.erase(i);
    }
    for (int i : planned) pending.erase(i);
  }
}

void Simulator::record_trace() {
  const double t = time();
  for (const Agent& a : agents_) {
    traces_[a.id()].push_back({t, a.id(), a.state(), a.control(t), a.mode(), a.lifecycle()});
  }
}

bool Simulator::check_safety() {
  const double t = time();
  std::vector<SweptDisc> discs;
  for (const Agent& a : agents_) {
    const Vec2 from = a.state().position();
    const Vec2 to = a.lifecycle() == Lifecycle::Active ? a.plan().trajectory.position_at(t + scenario_.dt) : from;
    discs.push_back({a.id(), a.spec().radius, from, to});
  }
  const auto violation = check_swept_safety(*ws_, discs, t, scenario_.dt);
  if (!violation) return true;
  summary_.violation = violation;
  events_.push_back({violation->t, "safety_violation", violation->robot, violation->other,
                     "clearance=" + format_number(violation->clearance)});
  return false;
}

RunResult Simulator::take() && {
  RunResult out;
  out.scenario = std::move(scenario_);
  out.traces = std::move(traces_);
  out.events = std::move(events_);
  out.summary = std::move(summary_);
  return out;
}

RunResult run(const Scenario& scenario, const RunOptions& options) {
  Simulator sim(scenario, options);
  while (!sim.finished()) sim.step();
  return std::move(sim).take();
}

}  // namespace mrmc
