#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "fishtrack/locomotion.hpp"
#include "fishtrack/mot_io.hpp"
#include "fishtrack/random.hpp"
#include "fishtrack/synth.hpp"

namespace fishtrack {
namespace {

TEST(RandomTest, ReferenceSequence) {
  // splitmix64 reference outputs for state 0 (Vigna's published values).
  std::uint64_t state = 0;
  EXPECT_EQ(splitmix64(state), 0xE220A8397B1DCDAFull);
  EXPECT_EQ(splitmix64(state), 0x6E789E6AA1B965F4ull);
  EXPECT_EQ(splitmix64(state), 0x06C45D188009454Full);
}

TEST(RandomTest, JumpGivesDistinctStream) {
  Xoshiro256 a(42), b(42);
  b.jump();
  EXPECT_NE(a(), b());
  Xoshiro256 c(42);
  EXPECT_EQ(Xoshiro256(42)(), c());
}

TEST(RandomTest, DistributionMoments) {
  Xoshiro256 rng(7);
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0, sp = 0, sp_big = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
    sp += static_cast<double>(rng.poisson(2.0));
  }
  for (int i = 0; i < 20000; ++i) sp_big += static_cast<double>(rng.poisson(80.0));
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
  EXPECT_NEAR(sp / n, 2.0, 0.02);
  EXPECT_NEAR(sp_big / 20000, 80.0, 0.3);
  EXPECT_EQ(rng.poisson(0.0), 0u);
}

TEST(GenerateTest, Deterministic) {
  ShoalScenario sc;
  sc.seed = 99;
  EXPECT_EQ(to_mot_string(generate(sc), MotKind::ground_truth), to_mot_string(generate(sc), MotKind::ground_truth));
  sc.seed = 100;
  ShoalScenario other;
  other.seed = 99;
  EXPECT_NE(to_mot_string(generate(sc), MotKind::ground_truth),
            to_mot_string(generate(other), MotKind::ground_truth));
}

TEST(GenerateTest, Census) {
  const auto gt = generate(ShoalScenario{});
  const auto hist = gt.histories();
  ASSERT_EQ(hist.size(), 20u);
  for (const auto& [id, h] : hist) EXPECT_EQ(h.size(), 200u) << id;
  EXPECT_EQ(gt.length(), 200);
  ASSERT_TRUE(gt.image_size.has_value());
  EXPECT_EQ(gt.image_size->width, 1280);
}

TEST(GenerateTest, BoxesInsideTank) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ShoalScenario sc;
    sc.seed = seed;
    sc.speed_max = 25.0;
    sc.turn_probability = 0.1;
    sc.heading_noise_sigma = 30.0;
    const auto gt = generate(sc);
    for (const auto& [f, boxes] : gt.frames) {
      for (const auto& a : boxes) {
        ASSERT_TRUE(a.box.is_valid());
        EXPECT_GE(a.box.left, 0.0);
        EXPECT_GE(a.box.top, 0.0);
        EXPECT_LE(a.box.right(), sc.tank_width + 1e-9);
        EXPECT_LE(a.box.bottom(), sc.tank_height + 1e-9);
      }
    }
  }
}

TEST(GenerateTest, HorizontalShoalHasZeroAngles) {
  ShoalScenario sc;
  sc.heading_noise_sigma = 0.0;
  sc.turn_probability = 0.0;
  sc.heading_spread = 0.0;
  const auto samples = sequence_directions(generate(sc));
  ASSERT_FALSE(samples.empty());
  for (const auto& s : samples) EXPECT_EQ(s.angle_deg, 0.0);
}

TEST(GenerateTest, RejectsInvalidScenario) {
  ShoalScenario sc;
  sc.tank_width = 0;
  EXPECT_THROW(generate(sc), InvalidInput);
  sc = {};
  sc.box_max = 2000;
  EXPECT_THROW(generate(sc), InvalidInput);
  sc = {};
  sc.speed_min = 7.0;
  EXPECT_THROW(generate(sc), InvalidInput);
}

TEST(CorruptTest, IdentityModel) {
  ShoalScenario sc;
  sc.frames = 30;
  const auto gt = generate(sc);
  CorruptionModel cm;
  cm.score_sigma = 0.0;
  const auto dets = corrupt(gt, cm, 3);
  ASSERT_EQ(dets.box_count(), gt.box_count());
  for (const auto& [f, boxes] : gt.frames) {
    const auto& d = dets.at(f);
    ASSERT_EQ(d.size(), boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      EXPECT_EQ(d[i].box, boxes[i].box);
      EXPECT_FALSE(d[i].id.has_value());
      EXPECT_DOUBLE_EQ(d[i].score, 0.9);
    }
  }
}

TEST(CorruptTest, MissRateConcentration) {
  ShoalScenario sc;
  sc.fish_count = 20;
  sc.frames = 500;  // 10,000 boxes
  const auto gt = generate(sc);
  ASSERT_EQ(gt.box_count(), 10000u);
  CorruptionModel cm;
  cm.miss_rate = 0.5;
  const auto dets = corrupt(gt, cm, 77);
  const double dropped = 1.0 - static_cast<double>(dets.box_count()) / 10000.0;
  EXPECT_NEAR(dropped, 0.5, 0.02);
}

TEST(CorruptTest, FalsePositiveConcentration) {
  ShoalScenario sc;
  sc.fish_count = 1;
  sc.frames = 1000;
  const auto gt = generate(sc);
  CorruptionModel cm;
  cm.fp_rate_per_frame = 2.0;
  const auto dets = corrupt(gt, cm, 5);
  const double fps = static_cast<double>(dets.box_count()) - 1000.0;
  EXPECT_NEAR(fps, 2000.0, 3.0 * std::sqrt(2000.0));
  for (const auto& [f, boxes] : dets.frames) {
    for (const auto& a : boxes) {
      EXPECT_FALSE(a.id.has_value());
      EXPECT_GE(a.score, 0.0);
      EXPECT_LE(a.score, 1.0);
      EXPECT_GE(a.box.left, 0.0);
      EXPECT_LE(a.box.right(), 1280.0 + 1e-9);
    }
  }
}

TEST(CorruptTest, DeterministicInSeed) {
  ShoalScenario sc;
  sc.frames = 50;
  const auto gt = generate(sc);
  CorruptionModel cm;
  cm.miss_rate = 0.2;
  cm.jitter_sigma = 3.0;
  cm.fp_rate_per_frame = 1.0;
  EXPECT_EQ(to_mot_string(corrupt(gt, cm, 8), MotKind::detections),
            to_mot_string(corrupt(gt, cm, 8), MotKind::detections));
  EXPECT_NE(to_mot_string(corrupt(gt, cm, 8), MotKind::detections),
            to_mot_string(corrupt(gt, cm, 9), MotKind::detections));
}

TEST(CorruptTest, RejectsInvalidModel) {
  CorruptionModel cm;
  cm.miss_rate = 1.5;
  EXPECT_THROW(corrupt(generate(ShoalScenario{}), cm, 1), InvalidInput);
}

}  // namespace
}  // namespace fishtrack
