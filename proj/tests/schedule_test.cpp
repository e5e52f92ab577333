// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/schedule.hpp"

#include <cmath>
#include <tuple>

#include <gtest/gtest.h>

namespace blockopt {
namespace {

constexpr std::int64_t kT = 3519;
constexpr std::int64_t kWarm = 1500;
constexpr std::int64_t kConst = 963;

// Closed form of sum_t rate(t): warmup eta (Tw+1)/2, plateau eta Tc, decay
// eta (D-1)/2 with D = T - Tw - Tc.
double closed_form_area(double eta, std::int64_t total, std::int64_t warmup,
                        std::int64_t constant) {
  const double d = static_cast<double>(total - warmup - constant);
  return eta * ((warmup + 1) / 2.0 + static_cast<double>(constant) + (d - 1) / 2.0);
}

TEST(WarmupDecayTest, Examples) {
  EXPECT_EQ(lr_warmup_decay(1500, 0.007, kT, kWarm), 0.007);
  EXPECT_EQ(lr_warmup_decay(kT, 0.007, kT, kWarm), 0.0);
  EXPECT_DOUBLE_EQ(lr_warmup_decay(750, 0.007, kT, kWarm), 0.0035);
  EXPECT_DOUBLE_EQ(lr_warmup_decay(1, 0.007, kT, kWarm), 0.007 / 1500);
}

TEST(WarmupDecayTest, RangeErrors) {
  EXPECT_THROW(lr_warmup_decay(0, 0.007, kT, kWarm), ScheduleRangeError);
  EXPECT_THROW(lr_warmup_decay(kT + 1, 0.007, kT, kWarm), ScheduleRangeError);
  EXPECT_THROW(lr_warmup_decay(5, 0.007, 10, 10), ScheduleRangeError);
  EXPECT_THROW(lr_warmup_decay(5, 0.007, 10, 0), ScheduleRangeError);
  const Schedule s = Schedule::warmup_decay(0.01, 100, 10);
  EXPECT_THROW((void)s.rate(0), ScheduleRangeError);
  EXPECT_THROW((void)s.rate(101), ScheduleRangeError);
}

TEST(WarmupConstDecayTest, Examples) {
  EXPECT_EQ(lr_warmup_const_decay(2000, 0.007, kT, kWarm, kConst), 0.007);
  EXPECT_EQ(lr_warmup_const_decay(kT, 0.007, kT, kWarm, kConst), 0.0);
  EXPECT_THROW(lr_warmup_const_decay(1, 0.007, 10, 5, 5), ScheduleRangeError);
}

TEST(WarmupConstDecayTest, ZeroPlateauIsWarmupDecay) {
  for (std::int64_t t = 1; t <= kT; ++t) {
    ASSERT_EQ(lr_warmup_const_decay(t, 0.007, kT, kWarm, 0), lr_warmup_decay(t, 0.007, kT, kWarm));
  }
}

TEST(ScheduleTest, PlateauIsBitExact) {
  const Schedule s(0.00675, kT, kWarm, kConst);
  for (std::int64_t t = kWarm; t <= kWarm + kConst; ++t) ASSERT_EQ(s.rate(t), 0.00675) << t;
}

TEST(ScheduleTest, MonotonePhasesAndBounds) {
  const Schedule s(0.01, 500, 37, 111);
  for (std::int64_t t = 2; t <= 37; ++t) ASSERT_GE(s.rate(t), s.rate(t - 1));
  for (std::int64_t t = 37 + 111 + 1; t <= 500; ++t) ASSERT_LE(s.rate(t), s.rate(t - 1));
  for (std::int64_t t = 1; t <= 500; ++t) {
    ASSERT_GE(s.rate(t), 0.0);
    ASSERT_LE(s.rate(t), 0.01);
  }
}

TEST(ScheduleTest, InvalidConstruction) {
  EXPECT_THROW(Schedule(0.0, 10, 1), InvalidScheduleError);
  EXPECT_THROW(Schedule(-1.0, 10, 1), InvalidScheduleError);
  EXPECT_THROW(Schedule(0.1, 0, 0), InvalidScheduleError);
  EXPECT_THROW(Schedule(0.1, 10, 6, 5), InvalidScheduleError);
  EXPECT_THROW(Schedule(0.1, 10, -1), InvalidScheduleError);
}

TEST(SqrtScaleTest, Examples) {
  EXPECT_DOUBLE_EQ(sqrt_scale_lr(0.003, 1000, 4000), 0.006);
  EXPECT_EQ(sqrt_scale_lr(0.003, 1000, 1000), 0.003);
  EXPECT_DOUBLE_EQ(sqrt_scale_lr(0.005, 32768, 131072), 0.01);
  EXPECT_THROW(sqrt_scale_lr(0.1, 0, 10), ScheduleRangeError);
  EXPECT_THROW(sqrt_scale_lr(0.1, 10, -1), ScheduleRangeError);
}

TEST(ScheduleAreaTest, MatchesClosedForm) {
  for (auto [eta, w, c] : {std::tuple{0.01, kWarm, std::int64_t{0}}, std::tuple{0.007, kWarm, kConst},
                           std::tuple{0.3, std::int64_t{1}, std::int64_t{5}}}) {
    const double area = schedule_area(Schedule(eta, kT, w, c));
    EXPECT_NEAR(area, closed_form_area(eta, kT, w, c), 1e-12 * area);
  }
}

TEST(ScheduleAreaTest, ReferenceGaps) {
  const double high = schedule_area(Schedule::warmup_decay(0.01, kT, kWarm));
  const double low = schedule_area(Schedule::warmup_decay(0.007, kT, kWarm));
  const double plateau = schedule_area(Schedule(0.007, kT, kWarm, kConst));
  EXPECT_NEAR(high - low, 5.28, 0.02);
  EXPECT_NEAR(high - plateau, 1.91, 0.02);
  EXPECT_EQ(high - high, 0.0);
}

TEST(ScheduleAreaTest, PlateauGapGrowsWithConstPhase) {
  const double base = schedule_area(Schedule::warmup_decay(0.007, kT, kWarm));
  double previous = base;
  for (std::int64_t c = 1; c < kT - kWarm; c += 97) {
    const double area = schedule_area(Schedule(0.007, kT, kWarm, c));
    EXPECT_GT(area, base);
    EXPECT_GT(area, previous);
    previous = area;
  }
}

TEST(StageToScheduleTest, ReferenceStages) {
  const Schedule first = stage_to_schedule({0.00675, 42.65, 27.35}, 3519);
  EXPECT_EQ(first.warmup_steps(), 1501);
  EXPECT_EQ(first.const_steps(), 962);
  EXPECT_EQ(first.eta(), 0.00675);
  EXPECT_LE(std::abs(first.warmup_steps() - kWarm), 1);
  EXPECT_LE(std::abs(first.const_steps() - kConst), 1);

  const Schedule second = stage_to_schedule({0.005, 19.2, 10.8}, 782);
  EXPECT_EQ(second.warmup_steps(), 150);
  EXPECT_EQ(second.const_steps(), 84);
}

TEST(StageToScheduleTest, RoundHalfUp) {
  EXPECT_EQ(stage_to_schedule({0.1, 25, 0}, 10).warmup_steps(), 3);   // 2.5 -> 3
  EXPECT_EQ(stage_to_schedule({0.1, 24.9, 0}, 10).warmup_steps(), 2);
}

TEST(StageToScheduleTest, ZeroRatiosArePureDecay) {
  const Schedule s = stage_to_schedule({0.02, 0, 0}, 100);
  EXPECT_EQ(s.warmup_steps(), 0);
  EXPECT_EQ(s.const_steps(), 0);
  EXPECT_DOUBLE_EQ(s.rate(1), 0.02 * 99 / 100);
  EXPECT_EQ(s.rate(100), 0.0);
}

TEST(StageToScheduleTest, Errors) {
  EXPECT_THROW(stage_to_schedule({0.1, 60, 40}, 100), InvalidScheduleError);
  EXPECT_THROW(stage_to_schedule({0.1, 70, 40}, 100), InvalidScheduleError);
  EXPECT_THROW(stage_to_schedule({0.1, -1, 0}, 100), InvalidScheduleError);
  EXPECT_THROW(stage_to_schedule({0.1, 10, 10}, 0), InvalidScheduleError);
  EXPECT_THROW(stage_to_schedule({0.0, 10, 10}, 100), InvalidScheduleError);
}

}  // namespace
}  // namespace blockopt
