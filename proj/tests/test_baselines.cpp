#include "rrdvcr/baselines.hpp"

#include <gtest/gtest.h>

#include <map>

using namespace rrdvcr;

namespace {

struct GeoFake {
  NodeId sink_id = 0;
  Topology topo;
  std::vector<Height> h;
  std::map<std::pair<NodeId, NodeId>, double> eds, ps;
  std::vector<Energy> res;

  NodeId sink() const { return sink_id; }
  std::span<const Height> heights() const { return h; }
  bool alive(NodeId a) const { return topo.nodes[a].alive; }
  double ed(NodeId a, NodeId b) const { return eds.at({a, b}); }
  double psucc(NodeId a, NodeId b) const { return ps.at({a, b}); }
  double mtx(NodeId, NodeId) const { return 1.0; }
  Energy energy_residual(NodeId a) const { return res[a]; }
  Energy energy_initial(NodeId a) const { return topo.nodes[a].energy_initial; }
  Position position(NodeId a) const { return topo.nodes[a].pos; }
};
static_assert(GeoView<GeoFake>);

GeoFake fixture(std::vector<Position> pos, double range, NodeId sink) {
  GeoFake v;
  v.sink_id = sink;
  v.topo = make_topology(pos, 100, 100, range);
  v.h = build_height_gradient(v.topo, sink).heights;
  for (NodeId a = 0; a < v.topo.size(); ++a) {
    v.res.push_back(Energy::joules(4.0));
    for (NodeId b : v.topo.adjacency[a]) {
      v.eds[{a, b}] = 0.01;
      v.ps[{a, b}] = 0.9;
    }
  }
  return v;
}

const DeadlineState kLoose{1.0, 1.0, 0, 0};

} // namespace

TEST(Speed, ChainForwardsToProgressNeighbour) {
  // 0 - 1 - 2(sink)
  const auto v = fixture({{0, 50}, {10, 50}, {20, 50}}, 11, 2);
  const auto t = collect_two_hop(v.topo, 0);
  const auto d = speed_baseline_select(0, DeadlineState{1.0, 1.0, 2, 2}, t, v, MetricConfig{});
  ASSERT_TRUE(std::holds_alternative<Forward>(d));
  EXPECT_EQ(std::get<Forward>(d).j, 1u);
  EXPECT_NEAR(std::get<Forward>(d).score, 1.0 / 0.01, 1e-9);
}

TEST(Speed, PicksHighestVelocityAndAdjacentSink) {
  // 0 sees 1 and 2 at height 1 and nothing else nearer.
  auto v = fixture({{0, 50}, {10, 45}, {10, 55}, {20, 50}}, 12, 3);
  v.eds[{0, 1}] = 0.02;
  v.eds[{0, 2}] = 0.01;
  const auto t = collect_two_hop(v.topo, 0);
  auto d = speed_baseline_select(0, DeadlineState{1.0, 1.0, 2, 2}, t, v, MetricConfig{});
  EXPECT_EQ(next_hop(d), 2u);

  // An adjacent sink competes on velocity like any other neighbour.
  auto w = fixture({{0, 50}, {6, 50}, {11, 50}}, 12, 2);
  const auto tw = collect_two_hop(w.topo, 0);
  EXPECT_EQ(next_hop(speed_baseline_select(0, DeadlineState{1.0, 1.0, 1, 1}, tw, w, MetricConfig{})), 2u);
}

TEST(Speed, VoidAndSlowDrops) {
  auto chain = fixture({{0, 50}, {10, 50}, {20, 50}}, 11, 2);
  const auto tc = collect_two_hop(chain.topo, 0);
  // Needs 2 hops in 0.01 s: 200 hops/s, the link offers 100.
  auto d = speed_baseline_select(0, DeadlineState{1.0, 0.01, 2, 2}, tc, chain, MetricConfig{});
  ASSERT_TRUE(std::holds_alternative<Drop>(d));
  EXPECT_EQ(std::get<Drop>(d).reason, DropReason::SpeedUnmet);

  // Local minimum: the only neighbour advertises a larger height.
  chain.h = {Height{2}, Height{3}, Height{0}};
  d = speed_baseline_select(0, kLoose, tc, chain, MetricConfig{});
  ASSERT_TRUE(std::holds_alternative<Drop>(d));
  EXPECT_EQ(std::get<Drop>(d).reason, DropReason::NoRoute);

  auto isolated = fixture({{0, 50}, {10, 50}, {60, 50}}, 11, 2);
  const auto ti = collect_two_hop(isolated.topo, 0);
  d = speed_baseline_select(0, kLoose, ti, isolated, MetricConfig{});
  ASSERT_TRUE(std::holds_alternative<Drop>(d));
  EXPECT_EQ(std::get<Drop>(d).reason, DropReason::NoRoute);
}

TEST(Thvr, AdjacentSinkTakenDirectly) {
  const auto v = fixture({{0, 50}, {10, 50}}, 11, 1);
  const auto t = collect_two_hop(v.topo, 0);
  const auto d = thvr_select(0, kLoose, t, v, MetricConfig{});
  ASSERT_TRUE(std::holds_alternative<Forward>(d));
  EXPECT_EQ(std::get<Forward>(d).j, 1u);
}

TEST(Thvr, IgnoresLinkQualityAndWeighsRelayEnergy) {
  // Two relays 1 and 2 with the same geometry towards the sink 3.
  auto v = fixture({{0, 50}, {10, 45}, {10, 55}, {20, 50}}, 12, 3);
  v.ps[{0, 1}] = 0.05; // terrible link, THVR does not look
  v.res[1] = Energy::joules(5.0);
  v.res[2] = Energy::joules(1.0);
  const auto t = collect_two_hop(v.topo, 0);
  MetricConfig cfg;
  cfg.beta = 0.1; // mostly energy
  const auto d = thvr_select(0, kLoose, t, v, cfg);
  ASSERT_TRUE(std::holds_alternative<Forward>(d));
  EXPECT_EQ(std::get<Forward>(d).j, 1u);
  EXPECT_EQ(std::get<Forward>(d).k, 3u);
}

TEST(Thvr, GeographicFallbackAndDrop) {
  auto v = fixture({{0, 50}, {10, 45}, {10, 55}, {20, 50}}, 12, 3);
  v.res[2] = Energy::joules(4.5);
  const auto t = collect_two_hop(v.topo, 0);
  // 20 m in 0.001 s is far beyond any offered speed.
  auto d = thvr_select(0, DeadlineState{1.0, 0.001, 0, 0}, t, v, MetricConfig{});
  ASSERT_TRUE(std::holds_alternative<FallbackForward>(d));
  EXPECT_EQ(std::get<FallbackForward>(d).j, 2u);

  v.res[1] = v.res[2] = Energy::joules(0.1);
  d = thvr_select(0, DeadlineState{1.0, 0.001, 0, 0}, t, v, MetricConfig{});
  ASSERT_TRUE(std::holds_alternative<Drop>(d));
  d = thvr_select(0, DeadlineState{1.0, 0.0, 0, 0}, t, v, MetricConfig{});
  EXPECT_EQ(std::get<Drop>(d).reason, DropReason::DeadlineMissed);
}
