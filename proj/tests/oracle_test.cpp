// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/oracle_compare.hpp"

#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "blockopt/oracle/scalar_oracle.hpp"

namespace blockopt {
namespace {

TEST(OracleCompareTest, LansDefaultConfig) {
  const OracleCase oc{OptimizerKind::kLans, OptimizerConfig{}, "lans default"};
  const auto r = compare_with_oracle(oc, 1000, 77, {5, 6, 5});
  EXPECT_EQ(r.steps, 1000);
  EXPECT_LE(r.max_rel_deviation, 1e-12);
}

TEST(OracleCompareTest, LambNoDecayNoMomentum) {
  OptimizerConfig config;
  config.weight_decay = {0};
  config.beta1 = 0;
  const auto r = compare_with_oracle({OptimizerKind::kLamb, config, "lamb"}, 1000, 78);
  EXPECT_LE(r.max_rel_deviation, 1e-12);
}

TEST(OracleCompareTest, EpsilonFloorPolicy) {
  OptimizerConfig config;
  config.normalization.zero_policy = ZeroGradPolicy::kEpsilonFloor;
  for (auto kind : {OptimizerKind::kLans, OptimizerKind::kAdamW}) {
    config.normalize_grads = true;
    const auto r = compare_with_oracle({kind, config, "floor"}, 300, 79);
    EXPECT_LE(r.max_rel_deviation, 1e-12) << to_string(kind);
  }
}

TEST(OracleCompareTest, PerBlockDecay) {
  OptimizerConfig config;
  config.weight_decay = {0.0, 0.05, 0.01};
  for (auto kind : {OptimizerKind::kLamb, OptimizerKind::kLans, OptimizerKind::kAdamW}) {
    const auto r = compare_with_oracle({kind, config, "per-block"}, 300, 80);
    EXPECT_LE(r.max_rel_deviation, 1e-12) << to_string(kind);
  }
}

TEST(OracleCompareTest, GridCoversEveryRule) {
  const auto grid = default_oracle_grid();
  for (auto kind : {OptimizerKind::kLamb, OptimizerKind::kLans, OptimizerKind::kAdamW,
                    OptimizerKind::kSgdMomentum, OptimizerKind::kNag}) {
    const auto n = std::count_if(grid.begin(), grid.end(),
                                 [&](const OracleCase& c) { return c.kind == kind; });
    EXPECT_GE(n, 2) << to_string(kind);
  }
}

TEST(OracleCompareTest, RejectsZeroSteps) {
  EXPECT_THROW(compare_with_oracle({}, 0, 1), std::invalid_argument);
}

// With every intermediate exactly representable the transcription and the
// production step must agree to the last bit.
TEST(ScalarOracleTest, ExactAnalyticStep) {
  oracle::Hyper h;
  h.beta1 = 0.9;  // the double values, as the production step sees them
  h.beta2 = 0.999;
  h.epsilon = 0;
  h.lambda = {0};
  oracle::State s({2}, {0.5, 0.25});
  oracle::step(oracle::Rule::kAdamW, s, {1, -1}, 0.125L, h);

  const auto layout = BlockLayout::partition({2});
  BlockedVector x(layout, {0.5, 0.25});
  auto state = OptimizerState::zeros(layout);
  OptimizerConfig config;
  config.epsilon = 0;
  config.weight_decay = {0};
  adamw_step(x, state, BlockedVector(layout, {1, -1}), 0.125, config);

  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_EQ(relative_deviation(x[i], s.x[i], 0), 0.0);
    EXPECT_EQ(relative_deviation(state.m[i], s.m[i], 0), 0.0);
    EXPECT_EQ(relative_deviation(state.v[i], s.v[i], 0), 0.0);
  }
}

TEST(ScalarOracleTest, LansFirstStepClosedForm) {
  oracle::Hyper h;
  h.epsilon = 0;
  h.lambda = {0};
  oracle::State s({2}, {1, 0});
  oracle::step(oracle::Rule::kLans, s, {3, 4}, 0.05L, h);
  const long double r = 1 / std::sqrt(2.0L);
  EXPECT_NEAR(static_cast<double>(s.x[0] - (1 - 0.05L * r)), 0.0, 1e-18);
  EXPECT_NEAR(static_cast<double>(s.x[1] + 0.05L * r), 0.0, 1e-18);
}

TEST(RelativeDeviationTest, FloorApplies) {
  EXPECT_DOUBLE_EQ(relative_deviation(1.5, 1.0L, 0), 0.5);
  EXPECT_DOUBLE_EQ(relative_deviation(1e-20, 0.0L, 1.0L), 1e-20);
}

}  // namespace
}  // namespace blockopt
