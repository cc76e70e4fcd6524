#include "rrdvcr/link_quality.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

using namespace rrdvcr;

TEST(Psucc, ProductOfBothDirections) {
  EXPECT_DOUBLE_EQ(psucc(1.0, 1.0), 1.0);
  EXPECT_DOUBLE_EQ(psucc(0.0, 0.9), 0.0);
  EXPECT_NEAR(psucc(0.8, 0.9), 0.72, 1e-12);
}

TEST(Psucc, RejectsOutOfRange) {
  EXPECT_THROW(psucc(1.1, 0.5), std::invalid_argument);
  EXPECT_THROW(psucc(0.5, -0.1), std::invalid_argument);
  EXPECT_THROW(psucc(std::nan(""), 0.5), std::invalid_argument);
}

TEST(Etx, ReciprocalWithInfiniteSentinel) {
  EXPECT_DOUBLE_EQ(etx(1.0), 1.0);
  EXPECT_NEAR(etx(0.72), 1.3888888889, 1e-9);
  EXPECT_TRUE(std::isinf(etx(0.0)));
  EXPECT_EQ(etx(0.0), kInfiniteEtx);
}

TEST(PlMin, InverseRetryCap) {
  EXPECT_NEAR(pl_min(7), 0.142857, 1e-6);
  EXPECT_DOUBLE_EQ(pl_min(1), 1.0);
  EXPECT_DOUBLE_EQ(pl_min(4), 0.25);
  EXPECT_THROW(pl_min(0), std::invalid_argument);
}

TEST(Mtx, BothBranches) {
  EXPECT_DOUBLE_EQ(mtx(0.2, 7), 5.0);
  EXPECT_DOUBLE_EQ(mtx(1.0, 7), 1.0);
  EXPECT_DOUBLE_EQ(mtx(0.05, 7), 7.0);
  EXPECT_DOUBLE_EQ(mtx(0.0, 7), 7.0);
  // Exactly at the floor the upper branch applies.
  EXPECT_DOUBLE_EQ(mtx(0.25, 4), 4.0);
}

TEST(Mtx, BoundedOverRandomInputs) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> p(0.0, 1.0);
  std::uniform_int_distribution<int> retry(1, 15);
  for (int n = 0; n < 100000; ++n) {
    const int r = retry(rng);
    const double v = mtx(p(rng), r);
    ASSERT_GE(v, 1.0);
    ASSERT_LE(v, static_cast<double>(r));
  }
}

TEST(Mtx, NonIncreasingInProbability) {
  double prev = mtx(0.0, 7);
  for (int s = 1; s <= 1000; ++s) {
    const double v = mtx(s / 1000.0, 7);
    ASSERT_LE(v, prev + 1e-12);
    prev = v;
  }
}

TEST(Window, CountsOutcomes) {
  LinkStats s;
  s.window_size = 20;
  s = record_outcome(s, true);
  EXPECT_DOUBLE_EQ(s.cur_psucc, 1.0);

  LinkStats t;
  t.window_size = 20;
  for (bool b : {true, true, false, false}) t = record_outcome(t, b);
  EXPECT_DOUBLE_EQ(t.cur_psucc, 0.5);
}

TEST(Window, MatchesRecountOverRandomOutcomes) {
  std::mt19937 rng(5);
  std::bernoulli_distribution coin(0.63);
  LinkStats s;
  s.window_size = 20;
  std::vector<bool> all;
  for (int n = 0; n < 100; ++n) {
    const bool b = coin(rng);
    all.push_back(b);
    s = record_outcome(s, b);
    const std::size_t from = all.size() > 20 ? all.size() - 20 : 0;
    int ok = 0;
    for (std::size_t k = from; k < all.size(); ++k) ok += all[k] ? 1 : 0;
    ASSERT_DOUBLE_EQ(s.cur_psucc, static_cast<double>(ok) / static_cast<double>(all.size() - from));
    ASSERT_LE(s.window.size(), 20u);
  }
}

TEST(Window, SeedStartsAtGroundTruth) {
  for (double p : {0.0, 0.05, 0.35, 0.5, 0.72, 1.0}) {
    LinkStats s;
    s.window_size = 20;
    s = seed_window(s, p);
    EXPECT_EQ(s.window.size(), 20u);
    EXPECT_NEAR(s.cur_psucc, std::round(p * 20.0) / 20.0, 1e-12) << p;
  }
}

TEST(Latency, Ewma) {
  LinkStats s;
  s.ed = 1.0;
  s = record_latency(s, 2.0, 0.25);
  EXPECT_DOUBLE_EQ(s.ed, 1.25);
  s = record_latency(s, 0.0, 1.0);
  EXPECT_DOUBLE_EQ(s.ed, 0.0);
}

TEST(Publish, CachesFollowWindow) {
  LinkStats s;
  s.window_size = 4;
  for (bool b : {true, false, false, false}) s = record_outcome(s, b);
  s.ed = 0.3;
  publish(s, 7);
  EXPECT_DOUBLE_EQ(s.psucc_cached, 0.25);
  EXPECT_DOUBLE_EQ(s.mtx_cached, 4.0);
  EXPECT_DOUBLE_EQ(s.ed_cached, 0.3);
}

TEST(Channel, DistanceCurve) {
  ChannelModel c;
  c.exponent = 2.0;
  c.edge_loss = 1.0;
  c.p_min = 0.05;
  c.spread = 0.0;
  EXPECT_DOUBLE_EQ(c.delivery(0.0, 40.0), 1.0);
  EXPECT_DOUBLE_EQ(c.delivery(20.0, 40.0), 0.75);
  EXPECT_DOUBLE_EQ(c.delivery(40.0, 40.0), 0.05);
  double prev = 1.0;
  for (int d = 0; d <= 40; ++d) {
    const double v = c.delivery(d, 40.0);
    ASSERT_LE(v, prev);
    ASSERT_GE(v, c.p_min);
    prev = v;
  }
}

TEST(Channel, Validation) {
  ChannelModel c;
  c.spread = 1.5;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = {};
  c.exponent = 0.0;
  EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(LinkTable, SeededFromGroundTruthBothDirections) {
  const auto topo = make_topology({{0, 0}, {10, 0}, {30, 0}}, 50, 10, 25.0);
  ChannelModel channel;
  LinkQualityConfig cfg;
  const LinkTable links(topo, channel, cfg, 0.1, 3);
  EXPECT_EQ(links.size(), 4u); // 0<->1, 1<->2
  EXPECT_FALSE(links.contains(0, 2));
  const auto& ab = links.at(0, 1);
  const auto& ba = links.at(1, 0);
  EXPECT_DOUBLE_EQ(ab.d_f, ba.d_r);
  EXPECT_DOUBLE_EQ(ab.d_r, ba.d_f);
  EXPECT_DOUBLE_EQ(ab.true_psucc(), ab.d_f * ab.d_r);
  EXPECT_DOUBLE_EQ(ab.ed, 0.1);
  EXPECT_DOUBLE_EQ(ab.mtx_cached, mtx(ab.cur_psucc, cfg.max_retry));
}

TEST(LinkTable, DeterministicPerSeed) {
  const auto topo = deploy_poisson(100, 100, 0.01, 9);
  const LinkTable a(topo, {}, {}, 0.1, 9);
  const LinkTable b(topo, {}, {}, 0.1, 9);
  for (const auto& n : topo.nodes) {
    for (NodeId m : topo.adjacency[n.id]) ASSERT_EQ(a.at(n.id, m).d_f, b.at(n.id, m).d_f);
  }
}
