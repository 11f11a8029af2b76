#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "molsmooth/error.hpp"
#include "molsmooth/motion.hpp"

using namespace molsmooth;

namespace {

const NoiseField kNoise(0xC0FFEE);

ReactionScript test_script() {
  ReactionScript s;
  s.partner_a = 3;
  s.partner_b = 11;
  s.t_start = 6.25;
  s.target = {8.0, 4.5, 2.0};
  s.bond_offset = {0.2, -0.1, 0.0};
  return s;
}

BrownianMotion test_motion(double speed = 0.1, double tau = 0.0) {
  MotionParams p;
  p.speed = speed;
  p.tau = tau;
  return BrownianMotion(kNoise, p, Box{});
}

}  // namespace

TEST(ContextPosition, TauOneDropsNestedTerm) {
  std::mt19937_64 gen(3);
  MotionParams p;
  p.tau = 1.0;
  for (int k = 0; k < 2000; ++k) {
    const auto i = static_cast<MoleculeId>(gen() % 1000);
    const int c = static_cast<int>(gen() % 3);
    const double t = std::ldexp(static_cast<double>(gen() >> 11), -53) * 20.0;
    p.speed = 0.01 + std::ldexp(static_cast<double>(gen() >> 11), -53);
    const double s = seed_offset(i, c, p);
    EXPECT_EQ(context_position(kNoise, i, c, t, p), kNoise.sample(s + t * p.speed));
  }
}

TEST(ContextPosition, TauZeroIsNestedNoise) {
  MotionParams p;
  p.speed = 0.15;
  for (MoleculeId i : {0u, 1u, 500u, 999u})
    for (int c = 0; c < 3; ++c)
      for (double t : {0.0, 0.5, 7.25, 19.99}) {
        const double u = seed_offset(i, c, p) + t * p.speed;
        EXPECT_EQ(context_position(kNoise, i, c, t, p), kNoise.sample(u + kNoise.sample(u)));
      }
}

TEST(ContextPosition, SpeedIrrelevantAtTimeZero) {
  MotionParams slow, fast;
  slow.speed = 0.05;
  fast.speed = 0.2;
  for (MoleculeId i = 0; i < 50; ++i)
    for (int c = 0; c < 3; ++c)
      EXPECT_EQ(context_position(kNoise, i, c, 0.0, slow), context_position(kNoise, i, c, 0.0, fast));
}

TEST(ContextPosition, SeedOffsetsFollowStrides) {
  MotionParams p;
  std::vector<double> phases;
  for (MoleculeId i = 0; i < 1000; ++i)
    for (int c = 0; c < 3; ++c) {
      const double s = seed_offset(i, c, p);
      ASSERT_EQ(std::floor(s), (c + 1) * 1'000'003.0 + i * 101.0);
      phases.push_back(s - std::floor(s));
    }
  // Sub-lattice phases spread over the cell instead of all sitting at 0.
  double mean = 0.0;
  for (double f : phases) mean += f;
  mean /= static_cast<double>(phases.size());
  EXPECT_NEAR(mean, 0.5, 0.02);
  EXPECT_EQ(seed_offset(7, 2, p), seed_offset(7, 2, p));
}

TEST(MotionParams, Validation) {
  MotionParams p;
  EXPECT_NO_THROW(p.validate());
  p.tau = 1.5;
  EXPECT_THROW(p.validate(), InvalidInput);
  p.tau = 0.5;
  p.speed = 0.0;
  EXPECT_THROW(p.validate(), InvalidInput);
  p.speed = 0.1;
  p.molecule_stride = 0;
  EXPECT_THROW(p.validate(), InvalidInput);
}

TEST(BrownianMotion, StaysInBox) {
  const BrownianMotion m = test_motion(0.2);
  const Box box;
  for (MoleculeId i = 0; i < 200; ++i)
    for (int f = 0; f < 240; f += 7) ASSERT_TRUE(box.contains(m.position(i, f / 12.0)));
}

TEST(BrownianMotion, MapsNoiseCoordinatesOntoBox) {
  const BrownianMotion m = test_motion(0.1, 0.25);
  const Vec3 p = m.position(17, 3.5);
  for (int c = 0; c < 3; ++c)
    EXPECT_DOUBLE_EQ(p[c], Box{}.max[c] * context_position(kNoise, 17, c, 3.5, m.params()));
}

TEST(FocusPosition, MatchesContextOutsideWindow) {
  const ReactionScript s = test_script();
  const BrownianMotion m = test_motion();
  for (double t : {0.0, 3.0, 6.2}) {
    EXPECT_EQ(focus_position(s.partner_a, t, s, m), m.position(s.partner_a, t));
    EXPECT_EQ(focus_position(s.partner_b, t, s, m), m.position(s.partner_b, t));
  }
  EXPECT_EQ(focus_position(s.partner_a, s.end() + 0.5, s, m), m.position(s.partner_a, s.end() + 0.5));
}

TEST(FocusPosition, IgnoresContextSmoothing) {
  const ReactionScript s = test_script();
  const BrownianMotion raw = test_motion(0.1, 0.0);
  const BrownianMotion smooth = test_motion(0.1, 1.0);
  for (double t : {1.0, 7.0, 11.5, 14.0})
    EXPECT_EQ(focus_position(s.partner_b, t, s, smooth), focus_position(s.partner_b, t, s, raw));
}

TEST(FocusPosition, BondStartPlacesPartnersAtOffset) {
  const ReactionScript s = test_script();
  const BrownianMotion m = test_motion();
  const double t = s.bond_start();
  const Vec3 a = focus_position(s.partner_a, t, s, m);
  const Vec3 b = focus_position(s.partner_b, t, s, m);
  EXPECT_NEAR(norm(a - b), norm(s.bond_offset), 1e-12);
  EXPECT_NEAR(norm(0.5 * (a + b) - s.target), 0.0, 1e-12);
}

TEST(FocusPosition, BondOffsetConstant) {
  const ReactionScript s = test_script();
  for (double speed : {0.05, 0.2}) {
    const BrownianMotion m = test_motion(speed);
    for (int f = 0; f <= 120; ++f) {
      const double t = s.bond_start() + f * s.d_bond / 120.0;
      if (phase_at(s, t) != ReactionPhase::bond) continue;
      const Vec3 d = focus_position(s.partner_a, t, s, m) - focus_position(s.partner_b, t, s, m);
      for (int c = 0; c < 3; ++c) ASSERT_NEAR(d[c], s.bond_offset[c], 1e-12);
    }
  }
}

TEST(FocusPosition, PartnersDriftTogetherDuringBond) {
  const ReactionScript s = test_script();
  const BrownianMotion m = test_motion(0.2);
  const Vec3 a0 = focus_position(s.partner_a, s.bond_start(), s, m);
  const Vec3 a1 = focus_position(s.partner_a, s.bond_start() + 0.9, s, m);
  EXPECT_GT(norm(a1 - a0), 0.0);
}

TEST(FocusPosition, ContinuousAcrossPhases) {
  const ReactionScript s = test_script();
  const BrownianMotion m = test_motion(0.2);
  const double dt = 1.0 / 120.0;
  std::vector<double> context_jumps;
  for (MoleculeId i = 20; i < 220; ++i)
    for (int f = 0; f < 240; ++f)
      context_jumps.push_back(norm(m.position(i, (f + 1) * dt) - m.position(i, f * dt)));
  std::nth_element(context_jumps.begin(), context_jumps.begin() + context_jumps.size() * 99 / 100,
                   context_jumps.end());
  const double p99 = context_jumps[context_jumps.size() * 99 / 100];

  for (MoleculeId id : {s.partner_a, s.partner_b}) {
    double worst = 0.0;
    for (int f = 0; f < 20 * 120; ++f) {
      const double t = f * dt;
      worst = std::max(worst, norm(focus_position(id, t + dt, s, m) - focus_position(id, t, s, m)));
    }
    EXPECT_LE(worst, 3.0 * p99) << "partner " << id;
  }
}

TEST(FocusPosition, RejectsNonPartner) {
  EXPECT_THROW(focus_position(4, 7.0, test_script(), test_motion()), ContractViolation);
}

TEST(ReactionScript, PhasesAndValidation) {
  const ReactionScript s = test_script();
  EXPECT_EQ(phase_at(s, 6.0), ReactionPhase::before);
  EXPECT_EQ(phase_at(s, 6.25), ReactionPhase::attract);
  EXPECT_EQ(phase_at(s, 11.25), ReactionPhase::bond);
  EXPECT_EQ(phase_at(s, 12.25), ReactionPhase::repulse);
  EXPECT_EQ(phase_at(s, 17.3), ReactionPhase::after);
  EXPECT_DOUBLE_EQ(s.duration(), 11.0);
  EXPECT_STREQ(to_string(ReactionPhase::bond), "bond");
  ReactionScript bad = s;
  bad.partner_b = bad.partner_a;
  EXPECT_THROW(bad.validate(), InvalidInput);
  bad = s;
  bad.d_attract = 0.0;
  EXPECT_THROW(bad.validate(), InvalidInput);
}

TEST(DisplacementStats, SingleStepMatchesDirectComputation) {
  const BrownianMotion m = test_motion(0.1, 0.5);
  double direct = 0.0;
  for (MoleculeId i = 0; i < 100; ++i) direct += norm(m.position(i, 1.0 / 120.0) - m.position(i, 0.0));
  EXPECT_DOUBLE_EQ(displacement_stats(m, 100, 1, 120.0), direct / 100.0);
}

TEST(DisplacementStats, NonIncreasingInTau) {
  // Once (1 - tau) * max|n'| < 1 (tau above ~0.47) the nested factor averages
  // to exactly 1, so the upper steps are flat up to sampling noise.
  for (double speed : {0.05, 0.1, 0.15, 0.2}) {
    std::vector<double> d;
    for (double tau : {0.0, 0.25, 0.5, 0.75, 1.0})
      d.push_back(displacement_stats(test_motion(speed, tau), 1000, 600, 120.0));
    EXPECT_GT(d[0], d[4]) << "speed " << speed;
    EXPECT_GT(d[0], d[1]);
    EXPECT_GT(d[1], d[2]);
    for (std::size_t k = 1; k < d.size(); ++k) EXPECT_LE(d[k], d[k - 1] * 1.01) << speed << " " << k;
  }
}

TEST(DisplacementStats, GrowsWithSpeed) {
  for (double tau : {0.0, 1.0}) {
    const double slow = displacement_stats(test_motion(0.05, tau), 300, 240, 120.0);
    const double fast = displacement_stats(test_motion(0.10, tau), 300, 240, 120.0);
    EXPECT_GT(fast, slow);
    EXPECT_NEAR(fast / slow, 2.0, 0.5);
  }
}

TEST(DisplacementStats, RejectsEmptySample) {
  EXPECT_THROW(displacement_stats(test_motion(), 0, 10, 120.0), InvalidInput);
  EXPECT_THROW(displacement_stats(test_motion(), 10, 10, 0.0), InvalidInput);
}
