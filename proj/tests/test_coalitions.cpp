#include <gtest/gtest.h>

#include <random>
#include <set>

#include "oracles/oracles.hpp"
#include "support.hpp"

using namespace cpareto;
using testsupport::cs;

TEST(Enumerate, CountsMatchBellTriangle) {
  const auto bell = oracle::bell_numbers(8);
  for (std::size_t n = 1; n <= 8; ++n) EXPECT_EQ(enumerate_structures(AgentSet(n)).size(), bell[n]) << "n=" << n;
}

TEST(Enumerate, SmallCases) {
  const auto one = enumerate_structures(AgentSet(1));
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].key(), "{1}");
  EXPECT_EQ(enumerate_structures(AgentSet(3)).size(), 5u);
  EXPECT_EQ(enumerate_structures(AgentSet(4)).size(), 15u);
}

TEST(Enumerate, RejectsThirteenAgents) {
  try {
    (void)enumerate_structures(AgentSet(13));
    FAIL() << "expected AgentCountTooLarge";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::AgentCountTooLarge);
  }
}

TEST(Enumerate, OrderIsLevelThenKey) {
  const auto all = enumerate_structures(AgentSet(4));
  EXPECT_TRUE(all.front().is_grand());
  EXPECT_TRUE(all.back().is_singletons());
  for (std::size_t i = 1; i < all.size(); ++i) {
    const bool ordered = all[i - 1].size() < all[i].size() ||
                         (all[i - 1].size() == all[i].size() && all[i - 1].key() < all[i].key());
    EXPECT_TRUE(ordered) << all[i - 1].key() << " before " << all[i].key();
  }
}

TEST(Enumerate, MatchesBruteForcePartitionsAndCovers) {
  for (std::size_t n = 1; n <= 6; ++n) {
    std::set<std::string> engine;
    for (const auto& s : enumerate_structures(AgentSet(n))) {
      AgentMask seen = 0;
      for (const auto& c : s.coalitions()) {
        EXPECT_EQ(seen & c.mask(), 0u) << s.key();
        seen |= c.mask();
      }
      EXPECT_EQ(seen, CoalitionStructure::full_mask(n));
      EXPECT_TRUE(engine.insert(s.key()).second) << "duplicate " << s.key();
    }
    std::set<std::string> brute;
    for (const auto& p : oracle::partitions(n)) {
      std::vector<Coalition> cols;
      for (const auto& block : p) {
        AgentMask m = 0;
        for (auto a : block) m |= AgentMask{1} << a;
        cols.emplace_back(m);
      }
      brute.insert(CoalitionStructure(n, cols).key());
    }
    EXPECT_EQ(engine, brute) << "n=" << n;
  }
}

TEST(Structure, CanonicalKeyIgnoresInputOrder) {
  const CoalitionStructure a(4, {Coalition::of({3, 1}), Coalition::of({2, 0})});
  const CoalitionStructure b(4, {Coalition::of({0, 2}), Coalition::of({1, 3})});
  EXPECT_EQ(a.key(), "{1,3}|{2,4}");
  EXPECT_EQ(a.key(), b.key());
  EXPECT_EQ(cs("{2,4}|{1,3}", 4).key(), "{1,3}|{2,4}");
}

TEST(Structure, RejectsBadPartitions) {
  EXPECT_THROW(CoalitionStructure(3, {Coalition::of({0, 1}), Coalition::of({1, 2})}), Error);
  EXPECT_THROW(CoalitionStructure(3, {Coalition::of({0, 1})}), Error);
  EXPECT_THROW(cs("{1,2}|{4}", 3), Error);
  EXPECT_THROW(cs("{1,2", 3), Error);
}

TEST(Refinement, Examples) {
  EXPECT_TRUE(is_refinement(cs("{1}|{2}|{3}|{4}", 4), cs("{1,3}|{2,4}", 4)));
  EXPECT_TRUE(is_refinement(cs("{1,2}|{3}", 3), cs("{1,2}|{3}", 3)));
  EXPECT_FALSE(is_refinement(cs("{1,2}|{3}", 3), cs("{1,3}|{2}", 3)));
  EXPECT_THROW((void)is_refinement(cs("{1}|{2}", 2), cs("{1,2,3}", 3)), Error);
}

TEST(Refinement, MatchesUnionCheckAndIsPartialOrder) {
  std::mt19937 rng(7);
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto all = enumerate_structures(AgentSet(n));
    std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
    for (int trial = 0; trial < 300; ++trial) {
      const auto& a = all[pick(rng)];
      const auto& b = all[pick(rng)];
      const auto& c = all[pick(rng)];
      // Union oracle: every coarse coalition equals the union of fine coalitions inside it.
      bool unions = true;
      for (const auto& d : b.coalitions()) {
        AgentMask u = 0;
        for (const auto& f : a.coalitions())
          if ((f.mask() & d.mask()) == f.mask()) u |= f.mask();
        unions = unions && u == d.mask();
      }
      EXPECT_EQ(is_refinement(a, b), unions);
      EXPECT_TRUE(is_refinement(a, a));
      if (is_refinement(a, b) && is_refinement(b, a)) EXPECT_EQ(a.key(), b.key());
      if (is_refinement(a, b) && is_refinement(b, c)) EXPECT_TRUE(is_refinement(a, c));
    }
  }
}

TEST(Graph, EdgeCounts) {
  EXPECT_EQ(build_graph(AgentSet(1)).edges.size(), 0u);
  EXPECT_EQ(build_graph(AgentSet(2)).edges.size(), 1u);
  EXPECT_EQ(build_graph(AgentSet(3)).edges.size(), 6u);
}

TEST(Graph, EdgesMatchSplitOracle) {
  for (std::size_t n = 2; n <= 5; ++n) {
    const auto g = build_graph(AgentSet(n));
    std::set<std::pair<std::string, std::string>> edges;
    for (const auto& [a, b] : g.edges) {
      EXPECT_EQ(g.level(a) + 1, g.level(b));
      edges.emplace(g.nodes[a].key(), g.nodes[b].key());
    }
    EXPECT_EQ(edges.size(), g.edges.size());
    // Oracle: b has one more coalition than a and refines it.
    std::size_t expected = 0;
    for (const auto& a : g.nodes)
      for (const auto& b : g.nodes)
        if (b.size() == a.size() + 1 && is_refinement(b, a)) {
          ++expected;
          EXPECT_TRUE(edges.count({a.key(), b.key()})) << a.key() << " -> " << b.key();
        }
    EXPECT_EQ(expected, g.edges.size());
  }
}

TEST(Graph, TwoCoalitionNodesTouchGrand) {
  const auto g = build_graph(AgentSet(4));
  for (std::size_t i = 0; i < g.nodes.size(); ++i) {
    if (g.nodes[i].size() != 2) continue;
    EXPECT_TRUE(std::find(g.edges.begin(), g.edges.end(), std::make_pair(std::size_t{0}, i)) != g.edges.end());
  }
}

TEST(Coarsenings, Examples) {
  const auto g3 = build_graph(AgentSet(3));
  EXPECT_TRUE(coarsenings_of(CoalitionStructure::grand(3), g3).empty());
  EXPECT_EQ(coarsenings_of(CoalitionStructure::singletons(3), g3).size(), 4u);
  const auto g4 = build_graph(AgentSet(4));
  const auto up = coarsenings_of(cs("{1,3}|{2}|{4}", 4), g4);
  EXPECT_TRUE(std::any_of(up.begin(), up.end(), [](const auto& c) { return c.key() == "{1,3}|{2,4}"; }));
  EXPECT_THROW((void)coarsenings_of(CoalitionStructure::singletons(4), g3), Error);
}

TEST(Aggregation, Matrices) {
  EXPECT_EQ(aggregation_map(cs("{1,2}|{3}", 3)), (std::vector<std::vector<int>>{{1, 1, 0}, {0, 0, 1}}));
  EXPECT_EQ(aggregation_map(CoalitionStructure::singletons(3)),
            (std::vector<std::vector<int>>{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}));
  EXPECT_EQ(aggregation_map(CoalitionStructure::grand(3)), (std::vector<std::vector<int>>{{1, 1, 1}}));
  for (const auto& s : enumerate_structures(AgentSet(5))) {
    const auto m = aggregation_map(s);
    for (std::size_t a = 0; a < 5; ++a) {
      int col = 0;
      for (const auto& row : m) col += row[a];
      EXPECT_EQ(col, 1);
    }
  }
}
