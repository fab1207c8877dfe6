#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "mrmc/priority.hpp"

namespace mrmc {
namespace {

PriorityContext ctx(int id, int count, double entry, int base) {
  PriorityContext c;
  c.id = id;
  c.neighbor_count = count;
  c.earliest_entry = entry;
  c.base_priority = base;
  return c;
}

// Digraph of one component from pairwise orders over the adjacency.
PriorityDigraph build(const std::vector<PriorityContext>& all, const std::vector<std::set<int>>& adjacency) {
  PriorityDigraph g;
  for (std::size_t i = 0; i < all.size(); ++i) {
    g.add_node(all[i].id);
    std::vector<PriorityContext> nbrs;
    for (int j : adjacency[i]) nbrs.push_back(all[static_cast<std::size_t>(j)]);
    for (int j : determine_order(all[i], nbrs)) g.add_edge(j, all[i].id);
  }
  return g;
}

TEST(EarliestEntry, Cases) {
  OccupancyMap m;
  m[{0, 0}].insert({5.0, 6.0});
  m[{1, 0}].insert({2.5, 3.0});
  m[{2, 0}].insert({7.1, 8.0});
  m[{3, 0}].insert({3.2, 4.0});
  EXPECT_EQ(earliest_entry_time({}, m, 0.0), kForever);
  EXPECT_DOUBLE_EQ(earliest_entry_time({{3, 0}}, m, 0.0), 3.2);
  EXPECT_DOUBLE_EQ(earliest_entry_time({{0, 0}, {1, 0}, {2, 0}}, m, 0.0), 2.5);
}

TEST(Advantage, Cases) {
  EXPECT_TRUE(has_advantage(ctx(1, 2, 9, 1), ctx(2, 1, 1, 2)));
  EXPECT_TRUE(has_advantage(ctx(1, 2, 2.5, 1), ctx(2, 2, 3.0, 2)));
  EXPECT_FALSE(has_advantage(ctx(1, 2, 3.0, 1), ctx(2, 2, 3.0, 2)));
  EXPECT_FALSE(has_advantage(ctx(2, 2, 3.0, 2), ctx(1, 2, 3.0, 1)));
}

TEST(Advantage, ScaleInvariant) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> uc(0, 3);
  std::uniform_real_distribution<double> ut(0.0, 10.0);
  for (int k = 0; k < 1000; ++k) {
    PriorityContext a = ctx(1, uc(rng), ut(rng), 1);
    PriorityContext b = ctx(2, uc(rng), ut(rng), 2);
    const bool before = has_advantage(a, b);
    a.earliest_entry *= 3.7;
    b.earliest_entry *= 3.7;
    EXPECT_EQ(has_advantage(a, b), before);
  }
}

TEST(Order, PassiveFirst) {
  PriorityContext j = ctx(2, 0, kForever, 1);
  j.lifecycle = Lifecycle::Passive;
  const PriorityContext i = ctx(1, 5, 0.0, 9);
  EXPECT_EQ(determine_order(i, std::vector{j}), (std::set<int>{2}));
}

TEST(Order, EmergBeforeActive) {
  PriorityContext j = ctx(2, 0, kForever, 1);
  j.mode = Mode::Emerg;
  EXPECT_EQ(determine_order(ctx(1, 5, 0.0, 9), std::vector{j}), (std::set<int>{2}));
}

TEST(Order, BaseTieBreak) {
  EXPECT_EQ(determine_order(ctx(1, 1, 2.0, 3), std::vector{ctx(2, 1, 2.0, 7)}), (std::set<int>{2}));
  EXPECT_TRUE(determine_order(ctx(2, 1, 2.0, 7), std::vector{ctx(1, 1, 2.0, 3)}).empty());
}

TEST(Order, AdvantageWins) {
  EXPECT_TRUE(determine_order(ctx(1, 2, 2.0, 1), std::vector{ctx(2, 1, 0.0, 7)}).empty());
}

TEST(Order, DuplicateBaseRejected) {
  EXPECT_THROW(determine_order(ctx(1, 1, 1, 4), std::vector{ctx(2, 1, 2, 4)}), std::invalid_argument);
}

TEST(Digraph, PairAndTriangle) {
  {
    const PriorityDigraph g = build({ctx(1, 1, 1.0, 1), ctx(2, 1, 2.0, 2)}, {{1}, {0}});
    EXPECT_EQ(g.edge_count(), 1u);
    EXPECT_TRUE(check_acyclic(g));
    EXPECT_EQ(g.stages(), (std::vector<std::vector<int>>{{1}, {2}}));
  }
  const PriorityDigraph g =
      build({ctx(1, 2, 3.0, 1), ctx(2, 2, 1.0, 2), ctx(3, 2, 2.0, 3)}, {{1, 2}, {0, 2}, {0, 1}});
  EXPECT_EQ(g.edge_count(), 3u);
  EXPECT_TRUE(check_acyclic(g));
  EXPECT_EQ(g.stages(), (std::vector<std::vector<int>>{{2}, {3}, {1}}));
}

TEST(Digraph, ChainOfThreeStages) {
  // 1 - 2 - 3 path graph; middle has more neighbors and plans first.
  const PriorityDigraph g =
      build({ctx(1, 1, 1.0, 1), ctx(2, 2, 5.0, 2), ctx(3, 1, 2.0, 3)}, {{1}, {0, 2}, {1}});
  EXPECT_EQ(g.stages(), (std::vector<std::vector<int>>{{2}, {1, 3}}));
}

TEST(Digraph, CycleDetected) {
  PriorityDigraph g;
  g.add_edge(1, 2);
  g.add_edge(2, 3);
  g.add_edge(3, 1);
  EXPECT_FALSE(check_acyclic(g));
  const std::vector<int> cycle = g.find_cycle();
  ASSERT_GE(cycle.size(), 4u);
  EXPECT_EQ(cycle.front(), cycle.back());
  EXPECT_NE(g.dump().find("1 -> 2"), std::string::npos);
  EXPECT_THROW((void)g.stages(), std::logic_error);
}

// Random graphs with random, mutually inconsistent contexts; the order is a
// lexicographic key, so any such instance must stay acyclic and every pair of
// neighbors must be ordered exactly one way.
TEST(Digraph, RandomContextsAcyclic) {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + static_cast<int>(rng() % 9);
    std::vector<int> bases(static_cast<std::size_t>(n));
    std::iota(bases.begin(), bases.end(), 1);
    std::shuffle(bases.begin(), bases.end(), rng);
    std::vector<PriorityContext> all;
    for (int i = 0; i < n; ++i) {
      PriorityContext c = ctx(i, static_cast<int>(rng() % 4), (rng() % 5 == 0) ? kForever : (rng() % 40) * 0.05,
                              bases[static_cast<std::size_t>(i)]);
      const int kind = static_cast<int>(rng() % 10);
      if (kind == 0) c.lifecycle = Lifecycle::Passive;
      if (kind == 1) c.lifecycle = Lifecycle::Inactive;
      if (kind == 2) c.mode = Mode::Emerg;
      if (kind >= 3 && kind < 7) c.mode = Mode::Busy;
      all.push_back(c);
    }
    std::vector<std::set<int>> adj(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
      for (int j = i + 1; j < n; ++j) {
        if (rng() % 2) {
          adj[static_cast<std::size_t>(i)].insert(j);
          adj[static_cast<std::size_t>(j)].insert(i);
        }
      }
    }
    const PriorityDigraph g = build(all, adj);
    ASSERT_TRUE(check_acyclic(g)) << g.dump();
    for (int i = 0; i < n; ++i) {
      for (int j : adj[static_cast<std::size_t>(i)]) {
        const auto& out = g.edges().at(j);
        const auto& back = g.edges().at(i);
        EXPECT_NE(out.contains(i), back.contains(j));
      }
    }
  }
}

}  // namespace
}  // namespace mrmc
