#include "mrmc/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>

namespace mrmc {

namespace {

constexpr int kUnreached = std::numeric_limits<int>::max();
// Window end points and layer times come from different sums of dt; widen
// boxes so that touching never slips through on rounding.
constexpr double kWindowSlack = 1e-7;

void merge_ranges(std::vector<ParamRange>& r) {
  std::sort(r.begin(), r.end(), [](const ParamRange& a, const ParamRange& b) { return a.lo < b.lo; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (out > 0 && r[i].lo <= r[out - 1].hi) {
      r[out - 1].hi = std::max(r[out - 1].hi, r[i].hi);
    } else {
      r[out++] = r[i];
    }
  }
  r.resize(out);
}

bool overlaps(const std::vector<ParamRange>& ranges, double lo, double hi) {
  auto it = std::lower_bound(ranges.begin(), ranges.end(), lo,
                             [](const ParamRange& r, double v) { return r.hi < v; });
  return it != ranges.end() && it->lo <= hi;
}

bool test_bit(const std::vector<std::uint64_t>& bits, int i) {
  return (bits[static_cast<std::size_t>(i) >> 6] >> (i & 63)) & 1U;
}

void set_bit(std::vector<std::uint64_t>& bits, int i) {
  bits[static_cast<std::size_t>(i) >> 6] |= std::uint64_t{1} << (i & 63);
}

}  // namespace

SpeedProfiler::SpeedProfiler(const Path& path, const LatticeSpec& lattice, double radius,
                             const CellGrid& grid, const WindowMap& windows, double t0,
                             ProfileOptions options)
    : path_(path), lattice_(lattice), radius_(radius), grid_(&grid), t0_(t0), options_(options) {
  geom_ = path_.legs;
  if (geom_.empty()) {
    Leg still;
    still.start = still.end = path_.origin;
    still.dir = {1.0, 0.0};
    geom_.push_back(still);
  }
  build_nodes();
  build_edges();
  build_boxes(windows);
  static_table();
}

int SpeedProfiler::entry_node(int leg) const {
  if (leg >= static_cast<int>(path_.legs.size())) return end_node_;
  const int w = w_base_[static_cast<std::size_t>(leg)];
  return w >= 0 ? w : t_node(leg, 0, 0);
}

int SpeedProfiler::t_node(int leg, int s, int level) const {
  const Leg& l = path_.legs[static_cast<std::size_t>(leg)];
  if (s == l.lattice_units && level == 0 && !l.has_creep()) return entry_node(leg + 1);
  return t_base_[static_cast<std::size_t>(leg)] + s * (lattice_.levels + 1) + level;
}

int SpeedProfiler::node_of(const Cursor& c) const {
  if (c.leg < 0) throw std::invalid_argument("cursor outside the path");
  if (c.leg >= static_cast<int>(path_.legs.size())) return end_node_;
  const Leg& l = path_.legs[static_cast<std::size_t>(c.leg)];
  if (c.s_units < 0 || c.s_units > l.lattice_units || c.level < 0 || c.level > lattice_.levels) {
    throw std::invalid_argument("cursor outside the lattice");
  }
  if (c.before_rotation) return entry_node(c.leg);
  return t_node(c.leg, c.s_units, c.level);
}

void SpeedProfiler::build_nodes() {
  int next = 0;
  const int levels = lattice_.levels + 1;
  for (std::size_t k = 0; k < path_.legs.size(); ++k) {
    const Leg& l = path_.legs[k];
    if (l.rotation_steps > 0) {
      w_base_.push_back(next++);
      node_leg_.push_back(static_cast<int>(k));
    } else {
      w_base_.push_back(-1);
    }
    t_base_.push_back(next);
    const int count = (l.lattice_units + 1) * levels;
    next += count;
    node_leg_.insert(node_leg_.end(), static_cast<std::size_t>(count), static_cast<int>(k));
  }
  end_node_ = next;
  node_leg_.push_back(static_cast<int>(geom_.size()) - 1);
}

void SpeedProfiler::build_edges() {
  const int n = static_cast<int>(node_leg_.size());
  out_.assign(static_cast<std::size_t>(n), {});
  const int legs = static_cast<int>(path_.legs.size());
  const double unit = lattice_.unit;
  const bool free_end = options_.terminal == Terminal::Free;

  for (int k = 0; k < legs; ++k) {
    const Leg& l = path_.legs[static_cast<std::size_t>(k)];
    const int w = w_base_[static_cast<std::size_t>(k)];
    if (w >= 0) {
      out_[static_cast<std::size_t>(w)].push_back({t_node(k, 0, 0), Action::Rotate, l.rotation_steps, k, 0.0, 0.0});
      out_[static_cast<std::size_t>(w)].push_back({w, Action::Hold, 1, k, 0.0, 0.0});
    }
    for (int s = 0; s <= l.lattice_units; ++s) {
      for (int lv = 0; lv <= lattice_.levels; ++lv) {
        if (s == l.lattice_units && lv == 0 && !l.has_creep()) continue;  // alias of the next entry
        const int id = t_node(k, s, lv);
        auto& edges = out_[static_cast<std::size_t>(id)];
        for (Action a : {Action::Accelerate, Action::Cruise, Action::Brake}) {
          const int acc = accel_of(a);
          const int nl = lv + acc;
          if (nl < 0 || nl > lattice_.levels || (lv == 0 && acc <= 0)) continue;
          const int ns = s + 2 * lv + acc;
          if (ns > l.lattice_units) {
            if (free_end && k + 1 == legs) edges.push_back({end_node_, a, 1, k, s * unit, l.length});
            continue;
          }
          edges.push_back({t_node(k, ns, nl), a, 1, k, s * unit, ns * unit});
        }
        if (lv == 0 && s == l.lattice_units && l.has_creep()) {
          edges.push_back({entry_node(k + 1), Action::Creep, 2, k, s * unit, l.length});
        }
        if (lv == 0) edges.push_back({id, Action::Hold, 1, k, s * unit, s * unit});
      }
    }
  }
  const int last = static_cast<int>(geom_.size()) - 1;
  const double s_end = geom_.back().length;
  out_[static_cast<std::size_t>(end_node_)].push_back({end_node_, Action::Hold, 1, last, s_end, s_end});

  in_.assign(static_cast<std::size_t>(n), {});
  for (int u = 0; u < n; ++u) {
    const auto& edges = out_[static_cast<std::size_t>(u)];
    for (int e = 0; e < static_cast<int>(edges.size()); ++e) {
      in_[static_cast<std::size_t>(edges[static_cast<std::size_t>(e)].to)].emplace_back(u, e);
    }
  }

  goals_.push_back(end_node_);
  if (free_end && legs > 0) {
    const Leg& l = path_.legs.back();
    if (!l.has_creep()) {
      for (int lv = 1; lv <= lattice_.levels; ++lv) goals_.push_back(t_node(legs - 1, l.lattice_units, lv));
    }
  }
}

void SpeedProfiler::build_boxes(const WindowMap& windows) {
  boxes_.assign(geom_.size(), {});
  const double r = radius_ + options_.inflate;
  double horizon = -kForever;
  for (std::size_t g = 0; g < geom_.size(); ++g) {
    const Leg& l = geom_[g];
    if (windows.empty()) break;
    const CellSet cells = l.length > 0.0 ? cells_intersecting(*grid_, Capsule{l.start, l.end, r})
                                         : cells_intersecting(*grid_, Disc{l.start, r});
    for (const CellIndex& c : cells) {
      auto it = windows.find(c);
      if (it == windows.end()) continue;
      const auto range = line_range_near_rect(l.start, l.dir, l.length, grid_->box(c), r);
      if (!range) continue;
      for (const Interval& iv : it->second) {
        boxes_[g].push_back({range->lo, range->hi, iv.lo - kWindowSlack, iv.hi + kWindowSlack});
        horizon = std::max(horizon, std::isinf(iv.hi) ? iv.lo : iv.hi);
      }
    }
  }

  const double dtp = lattice_.dt_plan();
  horizon_layer_ = 0;
  if (horizon > -kForever) {
    const double raw = std::floor((horizon + kWindowSlack - t0_) / dtp) + 1.0;
    if (raw >= options_.max_layers) {
      horizon_layer_ = options_.max_layers;
    } else {
      horizon_layer_ = std::max(0, static_cast<int>(raw));
      while (horizon_layer_ > 0 && layer_time(horizon_layer_ - 1) > horizon + kWindowSlack) --horizon_layer_;
      while (layer_time(horizon_layer_) <= horizon + kWindowSlack) ++horizon_layer_;
    }
  }
  horizon_layer_ = std::min(horizon_layer_, options_.max_layers);

  // Past the horizon layer only windows still open matter, and they stay open.
  const double settle = layer_time(horizon_layer_);
  static_ranges_.assign(geom_.size(), {});
  for (std::size_t g = 0; g < geom_.size(); ++g) {
    for (const Box& b : boxes_[g]) {
      if (b.t_hi >= settle) static_ranges_[g].push_back({b.s_lo, b.s_hi});
    }
    merge_ranges(static_ranges_[g]);
  }
  const double s_end = geom_.back().length;
  for (const Box& b : boxes_.back()) {
    if (b.s_lo <= s_end && s_end <= b.s_hi) {
      end_block_until_ = std::max(end_block_until_, b.t_hi);
      if (b.t_hi >= settle) end_static_block_ = true;
    }
  }
}

double SpeedProfiler::layer_time(int layer) const {
  return t0_ + static_cast<double>(layer) * lattice_.dt_plan();
}

const std::vector<ParamRange>& SpeedProfiler::active(int leg, int layer) {
  const auto idx = static_cast<std::size_t>(layer);
  if (idx >= active_.size()) {
    active_.resize(idx + 1);
    active_built_.resize(idx + 1, 0);
  }
  if (!active_built_[idx]) {
    const double a = layer_time(layer);
    const double b = layer_time(layer + 1);
    auto& per_leg = active_[idx];
    per_leg.assign(geom_.size(), {});
    for (std::size_t g = 0; g < geom_.size(); ++g) {
      for (const Box& box : boxes_[g]) {
        if (box.t_lo <= b && a <= box.t_hi) per_leg[g].push_back({box.s_lo, box.s_hi});
      }
      merge_ranges(per_leg[g]);
    }
    active_built_[idx] = 1;
  }
  return active_[idx][static_cast<std::size_t>(leg)];
}

bool SpeedProfiler::edge_valid(const Edge& e, int layer) {
  for (int j = 0; j < e.duration; ++j) {
    if (overlaps(active(e.leg, layer + j), e.s_lo, e.s_hi)) return false;
  }
  return true;
}

bool SpeedProfiler::static_valid(const Edge& e) const {
  return !overlaps(static_ranges_[static_cast<std::size_t>(e.leg)], e.s_lo, e.s_hi);
}

bool SpeedProfiler::end_valid(int layer) const {
  if (options_.terminal == Terminal::Free) return true;
  return layer_time(layer) > end_block_until_;
}

bool SpeedProfiler::is_goal(int node, int layer) const {
  if (node == end_node_) return end_valid(layer);
  return options_.terminal == Terminal::Free &&
         std::find(goals_.begin(), goals_.end(), node) != goals_.end();
}

void SpeedProfiler::static_table() {
  const int n = static_cast<int>(node_leg_.size());
  h_.assign(static_cast<std::size_t>(n), kUnreached);
  using Item = std::pair<int, int>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
  for (int g : goals_) {
    if (g == end_node_ && options_.terminal == Terminal::Stop && end_static_block_) continue;
    h_[static_cast<std::size_t>(g)] = 0;
    queue.emplace(0, g);
  }
  while (!queue.empty()) {
    const auto [d, x] = queue.top();
    queue.pop();
    if (d != h_[static_cast<std::size_t>(x)]) continue;
    for (const auto& [p, ei] : in_[static_cast<std::size_t>(x)]) {
      const Edge& e = out_[static_cast<std::size_t>(p)][static_cast<std::size_t>(ei)];
      if (!static_valid(e)) continue;
      const int nd = d + e.duration;
      if (nd < h_[static_cast<std::size_t>(p)]) {
        h_[static_cast<std::size_t>(p)] = nd;
        queue.emplace(nd, p);
      }
    }
  }
}

ProfileResult SpeedProfiler::solve(const Cursor& start) {
  ProfileResult result;
  const int n = static_cast<int>(node_leg_.size());
  const int source = node_of(start);
  const std::size_t words = (static_cast<std::size_t>(n) + 63) / 64;
  int max_duration = 2;
  for (const Leg& l : path_.legs) max_duration = std::max(max_duration, l.rotation_steps);
  const int last_layer = horizon_layer_ + max_duration;
  std::vector<std::vector<std::uint64_t>> reached(static_cast<std::size_t>(last_layer) + 1,
                                                  std::vector<std::uint64_t>(words, 0));
  set_bit(reached[0], source);

  int goal_node = -1;
  int goal_layer = -1;
  bool settled = false;  // goal met inside the time-varying part
  for (int layer = 0; layer < horizon_layer_ && goal_node < 0; ++layer) {
    const auto& bits = reached[static_cast<std::size_t>(layer)];
    for (int g : goals_) {
      if (test_bit(bits, g) && is_goal(g, layer)) {
        goal_node = g;
        goal_layer = layer;
        settled = true;
        break;
      }
    }
    if (goal_node >= 0) break;
    for (std::size_t w = 0; w < words; ++w) {
      std::uint64_t word = bits[w];
      while (word != 0) {
        const int x = static_cast<int>(w * 64 + static_cast<std::size_t>(__builtin_ctzll(word)));
        word &= word - 1;
        for (const Edge& e : out_[static_cast<std::size_t>(x)]) {
          if (edge_valid(e, layer)) set_bit(reached[static_cast<std::size_t>(layer + e.duration)], e.to);
        }
      }
    }
  }

  if (goal_node < 0) {
    long best = kUnreached;
    for (int layer = horizon_layer_; layer <= last_layer; ++layer) {
      const auto& bits = reached[static_cast<std::size_t>(layer)];
      for (int x = 0; x < n; ++x) {
        if (!test_bit(bits, x) || h_[static_cast<std::size_t>(x)] == kUnreached) continue;
        const long cand = layer + static_cast<long>(h_[static_cast<std::size_t>(x)]);
        if (cand < best) {
          best = cand;
          goal_node = x;
          goal_layer = layer;
        }
      }
    }
    if (goal_node < 0) return result;
  }

  // Back through the layers to the source.
  std::vector<Action> back;
  int x = goal_node;
  int layer = goal_layer;
  while (layer > 0) {
    bool stepped = false;
    for (const auto& [p, ei] : in_[static_cast<std::size_t>(x)]) {
      const Edge& e = out_[static_cast<std::size_t>(p)][static_cast<std::size_t>(ei)];
      const int from = layer - e.duration;
      if (from < 0 || !test_bit(reached[static_cast<std::size_t>(from)], p) || !edge_valid(e, from)) continue;
      back.push_back(e.action);
      x = p;
      layer = from;
      stepped = true;
      break;
    }
    if (!stepped) throw std::logic_error("profile reconstruction lost its predecessor");
  }
  if (x != source) throw std::logic_error("profile reconstruction missed the source");
  result.actions.assign(back.rbegin(), back.rend());

  // Forward through the time-invariant remainder.
  x = goal_node;
  int steps = goal_layer;
  while (!settled && h_[static_cast<std::size_t>(x)] > 0) {
    const int hx = h_[static_cast<std::size_t>(x)];
    bool stepped = false;
    for (const Edge& e : out_[static_cast<std::size_t>(x)]) {
      if (e.to == x || !static_valid(e) || h_[static_cast<std::size_t>(e.to)] == kUnreached) continue;
      if (h_[static_cast<std::size_t>(e.to)] + e.duration != hx) continue;
      result.actions.push_back(e.action);
      steps += e.duration;
      x = e.to;
      stepped = true;
      break;
    }
    if (!stepped) throw std::logic_error("profile completion lost its successor");
  }
  result.feasible = true;
  result.steps = steps;
  return result;
}

ProfileResult plan_profile(const Path& path, const Cursor& start, double t0, const WindowMap& windows,
                           double radius, const CellGrid& grid, const LatticeSpec& lattice,
                           ProfileOptions options) {
  SpeedProfiler profiler(path, lattice, radius, grid, windows, t0, options);
  return profiler.solve(start);
}

MotionPlan build_plan(const PlanStart& start, const std::vector<Action>& actions, const LatticeSpec& lattice) {
  PlanBuilder builder(lattice, start);
  for (Action a : actions) builder.apply(a);
  return std::move(builder).finish();
}

}  // namespace mrmc
