#include "rrdvcr/topology.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace rrdvcr;

using oracle::random_graph;

TEST(Poisson, NodeCountNearExpectation) {
  double total = 0.0;
  for (std::uint64_t s = 1; s <= 40; ++s) {
    const auto t = deploy_poisson(200, 200, 0.005, s);
    EXPECT_GT(t.size(), 140u);
    EXPECT_LT(t.size(), 260u);
    total += static_cast<double>(t.size());
  }
  // Mean of 40 Poisson(200) draws has sd ~2.2.
  EXPECT_NEAR(total / 40.0, 200.0, 10.0);
}

TEST(Poisson, DeterministicPerSeed) {
  const auto a = deploy_poisson(10, 10, 0.01, 77);
  const auto b = deploy_poisson(10, 10, 0.01, 77);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.nodes[i].pos, b.nodes[i].pos);
  EXPECT_EQ(a.adjacency, b.adjacency);
}

TEST(Poisson, RejectsDegenerateInput) {
  EXPECT_THROW(deploy_poisson(0, 200, 0.005, 1), std::invalid_argument);
  EXPECT_THROW(deploy_poisson(200, 200, 0.0, 1), std::invalid_argument);
}

TEST(RadioNeighbors, UnitDisk) {
  const auto near = make_topology({{0, 0}, {5, 0}}, 20, 20, 10);
  EXPECT_EQ(radio_neighbors(near, 0), std::vector<NodeId>{1});
  EXPECT_EQ(radio_neighbors(near, 1), std::vector<NodeId>{0});
  const auto far = make_topology({{0, 0}, {15, 0}}, 20, 20, 10);
  EXPECT_TRUE(radio_neighbors(far, 0).empty());
  EXPECT_TRUE(radio_neighbors(far, 1).empty());
  EXPECT_THROW(radio_neighbors(far, 2), std::out_of_range);
}

TEST(RadioNeighbors, MatchPairwiseOracle) {
  for (std::uint64_t s = 1; s <= 10; ++s) {
    const auto t = deploy_poisson(200, 200, 0.005, s);
    ASSERT_EQ(t.adjacency, oracle::adjacency(t)) << "seed " << s;
  }
}

TEST(Gradient, Chain) {
  const auto t = make_topology({{0, 0}, {10, 0}, {20, 0}}, 30, 10, 12);
  const auto g = build_height_gradient(t, 2);
  EXPECT_EQ(g.heights[2], Height{0});
  EXPECT_EQ(g.heights[1], Height{1});
  EXPECT_EQ(g.heights[0], Height{2});
}

TEST(Gradient, IsolatedNodeUnreachable) {
  const auto t = make_topology({{0, 0}, {10, 0}, {90, 90}}, 100, 100, 12);
  const auto g = build_height_gradient(t, 0);
  EXPECT_EQ(g.heights[1], Height{1});
  EXPECT_EQ(g.heights[2], kUnreachable);
}

TEST(Gradient, EqualsBfsOnRandomGraphs) {
  for (std::uint64_t s = 1; s <= 100; ++s) {
    const std::size_t n = 10 + s % 60;
    auto t = random_graph(s, n, 100.0, 25.0);
    // Some graphs get dead nodes too.
    if (s % 3 == 0) t.nodes[(s * 7) % n].alive = false;
    const NodeId sink = static_cast<NodeId>(s % n);
    const auto g = build_height_gradient(t, sink);
    ASSERT_EQ(g.heights, oracle::bfs(t, sink)) << "graph " << s;
  }
}

TEST(Gradient, ReliablePredicateProperties) {
  for (std::uint64_t s = 1; s <= 50; ++s) {
    const auto t = random_graph(s, 60, 100.0, 25.0);
    const NodeId sink = 0;
    std::mt19937_64 rng(s);
    std::bernoulli_distribution good(0.6);
    std::vector<std::vector<char>> ok(t.size(), std::vector<char>(t.size(), 0));
    for (NodeId a = 0; a < t.size(); ++a) {
      for (NodeId b : t.adjacency[a]) ok[a][b] = good(rng);
    }
    const auto reliable = [&](NodeId from, NodeId to) { return ok[from][to] != 0; };
    const auto g = build_height_gradient(t, sink, {}, reliable);
    const auto plain = oracle::bfs(t, sink);
    for (NodeId a = 0; a < t.size(); ++a) {
      // Same reachability, never shorter than the hop-count minimum.
      ASSERT_EQ(g.heights[a].has_value(), plain[a].has_value());
      if (!g.heights[a]) continue;
      ASSERT_GE(*g.heights[a], *plain[a]);
      if (a == sink) continue;
      bool parent = false;
      for (NodeId b : t.adjacency[a]) parent |= g.heights[b] && *g.heights[b] + 1 == *g.heights[a];
      ASSERT_TRUE(parent) << "node " << a << " has no neighbour one level down";
    }
    const auto all_ok = build_height_gradient(t, sink, {}, [](NodeId, NodeId) { return true; });
    ASSERT_EQ(all_ok.heights, plain);
  }
}

TEST(Gradient, CountsAdvBroadcasts) {
  const auto t = make_topology({{0, 0}, {10, 0}, {20, 0}}, 30, 10, 12);
  const auto g = build_height_gradient(t, 2);
  EXPECT_EQ(g.adv_broadcasts, 3u);
}

TEST(Gradient, DeadSinkLeavesEverythingUnreachable) {
  auto t = make_topology({{0, 0}, {10, 0}}, 30, 10, 12);
  t.nodes[1].alive = false;
  const auto g = build_height_gradient(t, 1);
  EXPECT_EQ(g.heights[0], kUnreachable);
  EXPECT_EQ(g.heights[1], kUnreachable);
}

TEST(Corridor, LineLikeAndDeterministic) {
  const auto a = deploy_corridor(20, 12.0, 20.0, 4);
  const auto b = deploy_corridor(20, 12.0, 20.0, 4);
  ASSERT_EQ(a.size(), 20u);
  EXPECT_EQ(a.adjacency, b.adjacency);
  for (std::size_t i = 1; i < a.size(); ++i) EXPECT_GT(a.nodes[i].pos.x, a.nodes[i - 1].pos.x);
  const auto g = build_height_gradient(a, 19);
  ASSERT_TRUE(g.heights[0].has_value());
  EXPECT_GE(*g.heights[0], 6u); // 234 m at 40 m range
}

TEST(TopologyJson, RoundTrip) {
  const auto t = deploy_poisson(100, 80, 0.01, 12);
  const auto back = topology_from_json(nlohmann::json::parse(to_json(t).dump()));
  ASSERT_EQ(back.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(back.nodes[i].pos, t.nodes[i].pos);
    EXPECT_EQ(back.nodes[i].energy_initial, t.nodes[i].energy_initial);
  }
  EXPECT_EQ(back.adjacency, t.adjacency);
  EXPECT_EQ(back.seed, t.seed);
  EXPECT_EQ(back.radio_range, t.radio_range);
}

TEST(NearestNode, SkipsExcludedAndDead) {
  auto t = make_topology({{0, 0}, {1, 0}, {5, 0}}, 10, 10, 3);
  EXPECT_EQ(nearest_node(t, {0, 0}), 0u);
  EXPECT_EQ(nearest_node(t, {0, 0}, {0}), 1u);
  t.nodes[1].alive = false;
  EXPECT_EQ(nearest_node(t, {0, 0}, {0}), 2u);
}
