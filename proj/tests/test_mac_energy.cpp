#include "rrdvcr/mac_energy.hpp"

#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace rrdvcr;

namespace {

NodeState node(NodeId id, double joules = 5.0) {
  NodeState n;
  n.id = id;
  n.energy_initial = Energy::joules(joules);
  n.energy_residual = n.energy_initial;
  return n;
}

} // namespace

TEST(EstimateEd, HandValue) {
  MediaDelayParams p;
  p.t_boff_max = 0.004;
  p.bitrate = 1.0 / 0.005; // one bit takes T_Data
  p.t_sifs = 0.0001;
  p.t_ack = 0.0005;
  EXPECT_NEAR(estimate_ed(p, 1.0, 2), 0.0082, 1e-12);
  EXPECT_NEAR(estimate_ed(p, 1.0, 0), 0.007, 1e-12);
  EXPECT_NEAR(estimate_ed(p, 0.0, 3), 0.002 + 3 * 0.0006, 1e-12);
}

TEST(EstimateEd, AffineInCandidateIndex) {
  MediaDelayParams p;
  const double slope = p.t_sifs + p.t_ack;
  for (unsigned j = 0; j < 10; ++j) {
    EXPECT_NEAR(estimate_ed(p, 1200, j + 1) - estimate_ed(p, 1200, j), slope, 1e-12);
  }
}

TEST(Charge, DebitsPerBit) {
  EnergyModel m;
  const auto n = charge(node(0), 1200, Direction::Tx, m);
  EXPECT_EQ(Energy::joules(5.0) - n.energy_residual, Energy::joules(2.52e-3));
  EXPECT_TRUE(n.alive);
  const auto r = charge(node(0), 1200, Direction::Rx, m);
  EXPECT_EQ(Energy::joules(5.0) - r.energy_residual, Energy::joules(0.78e-6) * 1200);
}

TEST(Charge, ZeroBitsIsFree) {
  const auto n = charge(node(0), 0, Direction::Tx, {});
  EXPECT_EQ(n.energy_residual, Energy::joules(5.0));
}

TEST(Charge, ClampsAtZeroAndKills) {
  const auto n = charge(node(0, 1e-4), 1200, Direction::Tx, {});
  EXPECT_EQ(n.energy_residual, Energy{});
  EXPECT_FALSE(n.alive);
  const auto again = charge(n, 1200, Direction::Tx, {});
  EXPECT_EQ(again.energy_residual, Energy{});
}

TEST(AttemptHop, PerfectLinkTakesOneSlot) {
  MediaDelayParams p;
  p.t_boff_max = 0.0;
  LinkStats link;
  link.window_size = 20;
  auto s = node(0);
  auto r = node(1);
  Rng rng(1);
  HopRequest req;
  req.true_p = 1.0;
  const auto out = attempt_hop(link, s, r, req, p, {}, rng);
  EXPECT_TRUE(out.delivered);
  EXPECT_EQ(out.attempts, 1);
  EXPECT_NEAR(out.elapsed, estimate_ed(p, req.bits, 1), 1e-12);
  ASSERT_EQ(out.charges.size(), 2u);
  EXPECT_EQ(out.charges[0].dir, Direction::Tx);
  EXPECT_EQ(out.charges[1].dir, Direction::Rx);
  EXPECT_DOUBLE_EQ(link.cur_psucc, 1.0);
}

TEST(AttemptHop, DeadLinkExhaustsRetries) {
  MediaDelayParams p;
  p.t_boff_max = 0.0;
  LinkStats link;
  link.window_size = 20;
  auto s = node(0);
  auto r = node(1);
  Rng rng(1);
  HopRequest req;
  req.true_p = 0.0;
  req.max_retry = 7;
  const auto out = attempt_hop(link, s, r, req, p, {}, rng);
  EXPECT_FALSE(out.delivered);
  EXPECT_EQ(out.attempts, 7);
  EXPECT_NEAR(out.elapsed, 7 * estimate_ed(p, req.bits, 1), 1e-12);
  EXPECT_EQ(out.charges.size(), 7u);
  EXPECT_EQ(r.energy_residual, r.energy_initial);
  EXPECT_DOUBLE_EQ(link.cur_psucc, 0.0);
}

TEST(AttemptHop, EdSampleIsWholeHop) {
  MediaDelayParams p;
  p.t_boff_max = 0.0;
  LinkStats link;
  link.ed = 0.0;
  auto s = node(0);
  auto r = node(1);
  Rng rng(1);
  HopRequest req;
  req.true_p = 0.0;
  req.max_retry = 3;
  req.ed_smoothing = 1.0;
  const auto out = attempt_hop(link, s, r, req, p, {}, rng);
  EXPECT_NEAR(link.ed, out.elapsed, 1e-12);
}

TEST(AttemptHop, TruncatedGeometricMean) {
  const double p = 0.5;
  const int cap = 7;
  const double expect = oracle::truncated_geometric_mean(p, cap);
  EXPECT_DOUBLE_EQ(expect, 1.984375);
  const double sigma = oracle::truncated_geometric_sigma(p, cap);

  const int trials = 10000;
  Rng rng(2024);
  double sum = 0.0;
  int max_seen = 0;
  for (int t = 0; t < trials; ++t) {
    LinkStats link;
    auto s = node(0);
    auto r = node(1);
    HopRequest req;
    req.true_p = p;
    req.max_retry = cap;
    const auto out = attempt_hop(link, s, r, req, {}, {}, rng);
    sum += out.attempts;
    max_seen = std::max(max_seen, out.attempts);
  }
  const double mean = sum / trials;
  EXPECT_NEAR(mean, expect, 3.0 * sigma / std::sqrt(static_cast<double>(trials)));
  EXPECT_LE(max_seen, cap);
}

TEST(AttemptHop, StopsWhenSenderDies) {
  LinkStats link;
  auto s = node(0, 3e-3); // enough for one transmission only
  auto r = node(1);
  Rng rng(1);
  HopRequest req;
  req.true_p = 0.0;
  const auto out = attempt_hop(link, s, r, req, {}, {}, rng);
  EXPECT_FALSE(s.alive);
  EXPECT_LT(out.attempts, 7);
  Energy spent;
  for (const auto& c : out.charges) spent += c.amount;
  EXPECT_EQ(spent, Energy::joules(3e-3));
}
