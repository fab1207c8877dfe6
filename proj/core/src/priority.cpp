#include "mrmc/priority.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace mrmc {

const char* to_string(Lifecycle l) {
  switch (l) {
    case Lifecycle::Inactive: return "Inactive";
    case Lifecycle::Active: return "Active";
    case Lifecycle::Passive: return "Passive";
  }
  return "?";
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Free: return "Free";
    case Mode::Busy: return "Busy";
    case Mode::Emerg: return "Emerg";
  }
  return "?";
}

double earliest_entry_time(const CellSet& conflict_cells, const OccupancyMap& occupancy, double t_c) {
  double best = kForever;
  for (const CellIndex& c : conflict_cells) {
    auto it = occupancy.find(c);
    if (it == occupancy.end() || it->second.empty()) continue;
    best = std::min(best, std::max(it->second.front().lo, t_c));
  }
  return best;
}

bool has_advantage(const PriorityContext& i, const PriorityContext& j) {
  if (i.neighbor_count != j.neighbor_count) return i.neighbor_count > j.neighbor_count;
  return i.earliest_entry < j.earliest_entry;
}

std::set<int> determine_order(const PriorityContext& self, std::span<const PriorityContext> neighbors) {
  std::set<int> seen{self.base_priority};
  for (const PriorityContext& n : neighbors) {
    if (!seen.insert(n.base_priority).second) {
      throw std::invalid_argument("duplicate base priority " + std::to_string(n.base_priority));
    }
  }
  // Fixed robots first (not Active, then Emerg); within a tier the advantage
  // relation, then base priority. A lexicographic order, so never a cycle.
  auto tier = [](const PriorityContext& c) {
    if (c.lifecycle != Lifecycle::Active) return 0;
    return c.mode == Mode::Emerg ? 1 : 2;
  };
  std::set<int> higher;
  for (const PriorityContext& j : neighbors) {
    if (tier(j) != tier(self)) {
      if (tier(j) < tier(self)) higher.insert(j.id);
    } else if (has_advantage(j, self)) {
      higher.insert(j.id);
    } else if (!has_advantage(self, j) && j.base_priority > self.base_priority) {
      higher.insert(j.id);
    }
  }
  return higher;
}

void PriorityDigraph::add_node(int id) {
  nodes_.insert(id);
  out_[id];
}

void PriorityDigraph::add_edge(int from, int to) {
  add_node(from);
  add_node(to);
  out_[from].insert(to);
}

std::size_t PriorityDigraph::edge_count() const {
  std::size_t n = 0;
  for (const auto& [_, succ] : out_) n += succ.size();
  return n;
}

std::vector<int> PriorityDigraph::find_cycle() const {
  enum class Color { White, Grey, Black };
  std::map<int, Color> color;
  for (int n : nodes_) color[n] = Color::White;
  std::vector<int> stack;
  std::vector<int> cycle;

  std::function<bool(int)> visit = [&](int u) {
    color[u] = Color::Grey;
    stack.push_back(u);
    for (int w : out_.at(u)) {
      if (color[w] == Color::Grey) {
        auto it = std::find(stack.begin(), stack.end(), w);
        cycle.assign(it, stack.end());
        cycle.push_back(w);
        return true;
      }
      if (color[w] == Color::White && visit(w)) return true;
    }
    stack.pop_back();
    color[u] = Color::Black;
    return false;
  };

  for (int n : nodes_) {
    if (color[n] == Color::White && visit(n)) return cycle;
  }
  return {};
}

std::vector<std::vector<int>> PriorityDigraph::stages() const {
  std::map<int, int> indegree;
  for (int n : nodes_) indegree[n] = 0;
  for (const auto& [_, succ] : out_) {
    for (int w : succ) ++indegree[w];
  }
  std::map<int, int> depth;
  std::vector<int> frontier;
  for (const auto& [n, d] : indegree) {
    if (d == 0) frontier.push_back(n);
  }
  std::size_t visited = 0;
  std::vector<std::vector<int>> out;
  while (!frontier.empty()) {
    out.push_back(frontier);
    visited += frontier.size();
    std::vector<int> next;
    for (int u : frontier) {
      for (int w : out_.at(u)) {
        if (--indegree[w] == 0) next.push_back(w);
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  if (visited != nodes_.size()) throw std::logic_error("priority digraph has a cycle:\n" + dump());
  return out;
}

std::string PriorityDigraph::dump() const {
  std::string s;
  for (const auto& [u, succ] : out_) {
    s += std::to_string(u) + " ->";
    for (int w : succ) s += " " + std::to_string(w);
    s += "\n";
  }
  return s;
}

bool check_acyclic(const PriorityDigraph& digraph) { return digraph.find_cycle().empty(); }

}  // namespace mrmc
