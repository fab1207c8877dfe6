#include "mrmc/spacetime.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <unordered_set>

namespace mrmc {

namespace {

constexpr int kNoRoute = std::numeric_limits<int>::max();
constexpr double kWindowSlack = 1e-7;

long long quantize(double v) { return std::llround(v * 1e6); }

struct KeyHash {
  std::size_t operator()(const SpaceTimeLattice::Key& k) const {
    std::size_t h = 1469598103934665603ULL;
    for (long long v : k) {
      h ^= static_cast<std::size_t>(v);
      h *= 1099511628211ULL;
    }
    return h;
  }
};

}  // namespace

const std::vector<Action>& MoveTable::actions(int units) {
  auto it = cache_.find(units);
  if (it != cache_.end()) return it->second;
  std::vector<Action> out;
  if (units > 0) {
    const std::vector<Vec2> end{{units * lattice_.unit, 0.0}};
    const Path path = make_path({0.0, 0.0}, 0.0, end, lattice_);
    const CellGrid grid({-1.0, -1.0, units * lattice_.unit + 1.0, 1.0}, 1.0);
    const ProfileResult r = plan_profile(path, {0, 0, 0, false, true}, 0.0, {}, 0.0, grid, lattice_);
    if (!r.feasible) throw std::logic_error("unconstrained straight move has no profile");
    out = r.actions;
  }
  return cache_.emplace(units, std::move(out)).first->second;
}

int MoveTable::steps(const Leg& leg) {
  return leg.rotation_steps + static_cast<int>(actions(leg.lattice_units).size()) + (leg.has_creep() ? 2 : 0);
}

std::vector<double> MoveTable::arc_samples(const Leg& leg) {
  std::vector<double> out;
  int s = 0;
  int level = 0;
  for (Action a : actions(leg.lattice_units)) {
    const int acc = accel_of(a);
    s += 2 * level + acc;
    level += acc;
    out.push_back(s * lattice_.unit);
  }
  return out;
}

SpaceTimeLattice::SpaceTimeLattice(const Workspace& ws, const LatticeSpec& lattice, double radius,
                                   const WindowMap& windows, double t0, Vec2 start, Vec2 goal,
                                   SearchOptions options)
    : ws_(&ws),
      lattice_(lattice),
      radius_(radius),
      windows_(&windows),
      t0_(t0),
      start_(start),
      goal_(goal),
      options_(options),
      moves_(lattice) {
  double horizon = t0;
  for (const auto& [_, intervals] : windows) {
    for (const Interval& iv : intervals) horizon = std::max(horizon, std::isinf(iv.hi) ? iv.lo : iv.hi);
  }
  layer_limit_ = static_cast<int>(std::ceil((horizon - t0) / lattice_.dt_plan())) + options_.extra_layers;
  for (const Interval& iv : point_windows(goal_)) goal_block_until_ = std::max(goal_block_until_, iv.hi);
  build_heuristic();
}

double SpaceTimeLattice::time(int layer) const {
  return t0_ + static_cast<double>(layer) * lattice_.dt_plan();
}

int SpaceTimeLattice::kind(Vec2 p) const {
  if (p == goal_) return 2;
  if (p == start_) return 1;
  return 0;
}

SpaceTimeLattice::Key SpaceTimeLattice::key(const Node& n) const {
  const CellGrid& grid = ws_->grid();
  return {kind(n.pos), grid.linear(grid.locate(n.pos)), quantize(n.heading), n.layer};
}

std::vector<Vec2> SpaceTimeLattice::targets(Vec2 p) const {
  const CellGrid& grid = ws_->grid();
  const CellIndex c = grid.locate(p);
  std::vector<Vec2> out;
  for (int dr = -1; dr <= 1; ++dr) {
    for (int dc = -1; dc <= 1; ++dc) {
      const CellIndex n{c.col + dc, c.row + dr};
      if (!grid.valid(n)) continue;
      const Vec2 q = grid.center(n);
      if (q == p || q == goal_) continue;
      out.push_back(q);
    }
  }
  const CellIndex g = grid.locate(goal_);
  if (!(p == goal_) && std::abs(g.col - c.col) <= 1 && std::abs(g.row - c.row) <= 1) out.push_back(goal_);
  return out;
}

const SpaceTimeLattice::MoveGeometry& SpaceTimeLattice::geometry(Vec2 from, double heading, Vec2 to) {
  const std::array<long long, 5> k{quantize(from.x), quantize(from.y), quantize(to.x), quantize(to.y),
                                   quantize(heading)};
  auto it = geometry_cache_.find(k);
  if (it != geometry_cache_.end()) return it->second;
  MoveGeometry g;
  const double r = radius_ + options_.inflate;
  const std::vector<Vec2> end{to};
  const Path path = make_path(from, heading, end, lattice_);
  g.leg = path.legs.front();
  g.free = ws_->is_region_free(Capsule{from, to, r});
  if (g.free && !windows_->empty()) {
    const CellGrid& grid = ws_->grid();
    for (const CellIndex& c : cells_intersecting(grid, Capsule{from, to, r})) {
      auto w = windows_->find(c);
      if (w == windows_->end()) continue;
      const auto range = line_range_near_rect(g.leg.start, g.leg.dir, g.leg.length, grid.box(c), r);
      if (!range) continue;
      for (const Interval& iv : w->second) {
        g.boxes.push_back({range->lo, range->hi, iv.lo - kWindowSlack, iv.hi + kWindowSlack});
      }
    }
  }
  return geometry_cache_.emplace(k, std::move(g)).first->second;
}

const IntervalSet& SpaceTimeLattice::point_windows(Vec2 p) {
  const std::array<long long, 2> k{quantize(p.x), quantize(p.y)};
  auto it = point_cache_.find(k);
  if (it != point_cache_.end()) return it->second;
  IntervalSet set;
  for (const CellIndex& c : cells_intersecting(ws_->grid(), Disc{p, radius_ + options_.inflate})) {
    auto w = windows_->find(c);
    if (w != windows_->end()) set.insert(w->second);
  }
  return point_cache_.emplace(k, std::move(set)).first->second;
}

bool SpaceTimeLattice::blocked(const std::vector<Box>& boxes, double s_lo, double s_hi, int layer) const {
  const double a = time(layer);
  const double b = time(layer + 1);
  for (const Box& box : boxes) {
    if (box.t_lo <= b && a <= box.t_hi && box.s_lo <= s_hi && s_lo <= box.s_hi) return true;
  }
  return false;
}

void SpaceTimeLattice::successors(const Node& n, std::vector<Successor>& out) {
  out.clear();
  const IntervalSet& here = point_windows(n.pos);
  if (!here.intersects(Interval{time(n.layer) - kWindowSlack, time(n.layer + 1) + kWindowSlack})) {
    out.push_back({{true, n.pos}, {n.pos, n.heading, n.layer + 1}});
  }
  for (const Vec2& q : targets(n.pos)) {
    const MoveGeometry& g = geometry(n.pos, n.heading, q);
    if (!g.free) continue;
    const Leg& leg = g.leg;
    int layer = n.layer;
    bool ok = true;
    for (int j = 0; j < leg.rotation_steps && ok; ++j, ++layer) ok = !blocked(g.boxes, 0.0, 0.0, layer);
    if (!ok) continue;
    double s = 0.0;
    for (double s_next : moves_.arc_samples(leg)) {
      if (blocked(g.boxes, s, s_next, layer)) {
        ok = false;
        break;
      }
      s = s_next;
      ++layer;
    }
    if (!ok) continue;
    if (leg.has_creep()) {
      if (blocked(g.boxes, s, leg.length, layer) || blocked(g.boxes, s, leg.length, layer + 1)) continue;
      layer += 2;
    }
    out.push_back({{false, q}, {q, leg.heading, layer}});
  }
}

bool SpaceTimeLattice::is_goal(const Node& n) const {
  return n.pos == goal_ && time(n.layer) > goal_block_until_ + kWindowSlack;
}

int SpaceTimeLattice::heuristic(const Node& n) const {
  const int k = kind(n.pos);
  if (k == 2) return 0;
  if (k == 1) return h_start_;
  return h_cell_[static_cast<std::size_t>(ws_->grid().linear(ws_->grid().locate(n.pos)))];
}

bool SpaceTimeLattice::meets_closed(Vec2 a, Vec2 b) const {
  if (closed_.empty()) return false;
  const CellGrid& grid = ws_->grid();
  const double r = radius_ + options_.inflate;
  const double length = distance(a, b);
  const Vec2 dir = length > 0.0 ? (1.0 / length) * (b - a) : Vec2{1.0, 0.0};
  for (const CellIndex& c : cells_intersecting(grid, Capsule{a, b, r})) {
    if (!closed_.contains(c)) continue;
    if (line_range_near_rect(a, dir, length, grid.box(c), r)) return true;
  }
  return false;
}

void SpaceTimeLattice::build_heuristic() {
  // Translation time only; turns are free in the bound.
  // Cells closed from t0 on are left out: no move can ever touch them.
  const CellGrid& grid = ws_->grid();
  const double r = radius_ + options_.inflate;
  for (const auto& [cell, intervals] : *windows_) {
    for (const Interval& iv : intervals) {
      if (iv.lo <= t0_ && std::isinf(iv.hi)) closed_.insert(cell);
    }
  }
  h_cell_.assign(grid.size(), kNoRoute);
  auto cost = [&](Vec2 a, Vec2 b) {
    const std::vector<Vec2> end{b};
    const Path p = make_path(a, std::atan2(b.y - a.y, b.x - a.x), end, lattice_);
    return moves_.steps(p.legs.front());
  };
  using Item = std::pair<int, int>;  // (cost, cell linear)
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (const Vec2& q : targets(goal_)) {
    if (!ws_->is_region_free(Capsule{goal_, q, r}) || meets_closed(goal_, q)) continue;
    const int c = grid.linear(grid.locate(q));
    const int d = cost(goal_, q);
    if (d < h_cell_[static_cast<std::size_t>(c)]) {
      h_cell_[static_cast<std::size_t>(c)] = d;
      queue.emplace(d, c);
    }
  }
  while (!queue.empty()) {
    const auto [d, c] = queue.top();
    queue.pop();
    if (d != h_cell_[static_cast<std::size_t>(c)]) continue;
    const Vec2 p = grid.center(grid.from_linear(c));
    for (const Vec2& q : targets(p)) {
      if (q == goal_) continue;
      if (!ws_->is_region_free(Capsule{p, q, r}) || meets_closed(p, q)) continue;
      const int n = grid.linear(grid.locate(q));
      const int nd = d + cost(p, q);
      if (nd < h_cell_[static_cast<std::size_t>(n)]) {
        h_cell_[static_cast<std::size_t>(n)] = nd;
        queue.emplace(nd, n);
      }
    }
  }

  h_start_ = kNoRoute;
  if (start_ == goal_) h_start_ = 0;
  for (const Vec2& q : targets(start_)) {
    if (!ws_->is_region_free(Capsule{start_, q, r}) || meets_closed(start_, q)) continue;
    const int rest = q == goal_ ? 0 : h_cell_[static_cast<std::size_t>(grid.linear(grid.locate(q)))];
    if (rest != kNoRoute) h_start_ = std::min(h_start_, cost(start_, q) + rest);
  }
}

std::vector<Vec2> SpaceTimeLattice::static_route() const {
  const CellGrid& grid = ws_->grid();
  const double r = radius_ + options_.inflate;
  // Node ids: cells by linear index, then the start and goal points.
  const int cells = static_cast<int>(grid.size());
  const int start_id = cells;
  const int goal_id = cells + 1;
  auto point = [&](int id) {
    if (id == start_id) return start_;
    if (id == goal_id) return goal_;
    return grid.center(grid.from_linear(id));
  };
  auto id_of = [&](Vec2 p) {
    if (p == goal_) return goal_id;
    if (p == start_) return start_id;
    return grid.linear(grid.locate(p));
  };
  std::vector<double> dist(static_cast<std::size_t>(cells + 2), kForever);
  std::vector<int> parent(static_cast<std::size_t>(cells + 2), -1);
  using Item = std::pair<double, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  dist[static_cast<std::size_t>(start_id)] = 0.0;
  queue.emplace(0.0, start_id);
  while (!queue.empty()) {
    const auto [d, u] = queue.top();
    queue.pop();
    if (d != dist[static_cast<std::size_t>(u)]) continue;
    if (u == goal_id) break;
    const Vec2 p = point(u);
    for (const Vec2& q : targets(p)) {
      if (!ws_->is_region_free(Capsule{p, q, r})) continue;
      const int v = id_of(q);
      const double nd = d + distance(p, q);
      if (nd < dist[static_cast<std::size_t>(v)]) {
        dist[static_cast<std::size_t>(v)] = nd;
        parent[static_cast<std::size_t>(v)] = u;
        queue.emplace(nd, v);
      }
    }
  }
  if (start_ == goal_) return {};
  if (parent[static_cast<std::size_t>(goal_id)] < 0) return {};
  std::vector<Vec2> chain;
  for (int v = goal_id; v != -1; v = parent[static_cast<std::size_t>(v)]) chain.push_back(point(v));
  std::reverse(chain.begin(), chain.end());

  std::vector<Vec2> out;
  std::size_t i = 0;
  while (i + 1 < chain.size()) {
    std::size_t k = chain.size() - 1;
    while (k > i + 1 && !ws_->is_region_free(Capsule{chain[i], chain[k], r})) --k;
    out.push_back(chain[k]);
    i = k;
  }
  return out;
}

SpaceTimeResult space_time_search(SpaceTimeLattice& lattice, double start_heading) {
  SpaceTimeResult result;
  struct Record {
    SpaceTimeLattice::Node node;
    int parent;
    Primitive primitive;
  };
  struct Entry {
    int f;
    int g;
    SpaceTimeLattice::Key key;
    long seq;
    int record;
  };
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.f != b.f) return a.f > b.f;
    if (a.g != b.g) return a.g < b.g;
    if (a.key != b.key) return a.key > b.key;
    return a.seq > b.seq;
  };
  constexpr int kNoHeuristic = std::numeric_limits<int>::max();
  if (lattice.goal_blocked_forever()) return result;

  std::vector<Record> records;
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
  std::unordered_set<SpaceTimeLattice::Key, KeyHash> closed;
  long seq = 0;

  const SpaceTimeLattice::Node start{lattice.start(), start_heading, 0};
  const int h0 = lattice.heuristic(start);
  if (h0 == kNoHeuristic) return result;
  records.push_back({start, -1, {}});
  open.push({h0, 0, lattice.key(start), seq++, 0});

  std::vector<SpaceTimeLattice::Successor> next;
  while (!open.empty()) {
    const Entry e = open.top();
    open.pop();
    if (!closed.insert(e.key).second) continue;
    ++result.expansions;
    const SpaceTimeLattice::Node node = records[static_cast<std::size_t>(e.record)].node;
    if (lattice.is_goal(node)) {
      for (int r = e.record; records[static_cast<std::size_t>(r)].parent >= 0;
           r = records[static_cast<std::size_t>(r)].parent) {
        result.primitives.push_back(records[static_cast<std::size_t>(r)].primitive);
      }
      std::reverse(result.primitives.begin(), result.primitives.end());
      result.feasible = true;
      result.steps = node.layer;
      return result;
    }
    if (result.expansions >= lattice.options().max_expansions) break;
    lattice.successors(node, next);
    for (const auto& [primitive, succ] : next) {
      if (succ.layer > lattice.layer_limit()) continue;
      const int h = lattice.heuristic(succ);
      if (h == kNoHeuristic) continue;
      SpaceTimeLattice::Key k = lattice.key(succ);
      if (closed.contains(k)) continue;
      records.push_back({succ, e.record, primitive});
      open.push({succ.layer + h, succ.layer, k, seq++, static_cast<int>(records.size()) - 1});
    }
  }
  return result;
}

Path primitives_path(Vec2 start, double heading, const std::vector<Primitive>& primitives,
                     const LatticeSpec& lattice) {
  std::vector<Vec2> waypoints;
  for (const Primitive& p : primitives) {
    if (!p.hold) waypoints.push_back(p.target);
  }
  return make_path(start, heading, waypoints, lattice);
}

std::vector<Action> primitives_actions(const Path& path, const std::vector<Primitive>& primitives,
                                       MoveTable& moves) {
  std::vector<Action> out;
  std::size_t k = 0;
  for (const Primitive& p : primitives) {
    if (p.hold) {
      out.push_back(Action::Hold);
      continue;
    }
    const Leg& leg = path.legs.at(k++);
    if (leg.rotation_steps > 0) out.push_back(Action::Rotate);
    const auto& a = moves.actions(leg.lattice_units);
    out.insert(out.end(), a.begin(), a.end());
    if (leg.has_creep()) out.push_back(Action::Creep);
  }
  return out;
}

}  // namespace mrmc
