// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/blocks.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include <gtest/gtest.h>

namespace blockopt {
namespace {

TEST(BlockLayoutTest, TwoBlocks) {
  const auto layout = BlockLayout::partition({3, 2});
  EXPECT_EQ(layout.num_blocks(), 2u);
  EXPECT_EQ(layout.total_dim(), 5u);
  EXPECT_EQ(layout.offset(0), 0u);
  EXPECT_EQ(layout.size(0), 3u);
  EXPECT_EQ(layout.offset(1), 3u);
  EXPECT_EQ(layout.size(1), 2u);
}

TEST(BlockLayoutTest, SingleBlock) {
  const auto layout = BlockLayout::partition({5});
  EXPECT_EQ(layout.num_blocks(), 1u);
  EXPECT_EQ(layout.size(0), 5u);
}

TEST(BlockLayoutTest, Singletons) {
  const auto layout = BlockLayout::partition({1, 1, 1});
  EXPECT_EQ(layout.num_blocks(), 3u);
  EXPECT_EQ(layout.total_dim(), 3u);
  EXPECT_EQ(layout.sizes(), (std::vector<std::size_t>{1, 1, 1}));
}

TEST(BlockLayoutTest, RejectsEmptyAndZeroSizes) {
  EXPECT_THROW(BlockLayout::partition(std::span<const std::size_t>{}), InvalidLayoutError);
  EXPECT_THROW(BlockLayout::partition({2, 0, 1}), InvalidLayoutError);
}

TEST(BlockLayoutTest, OutOfRangeBlock) {
  const auto layout = BlockLayout::partition({2, 2});
  EXPECT_THROW((void)layout.size(2), std::out_of_range);
  EXPECT_THROW((void)layout.offset(7), std::out_of_range);
}

TEST(BlockNormTest, Examples) {
  const auto layout = BlockLayout::partition({2, 2, 1});
  const BlockedVector v(layout, {3, 4, 0, 0, 1});
  EXPECT_EQ(block_norm(v, 0), 5.0);
  EXPECT_EQ(block_norm(v, 1), 0.0);
  EXPECT_EQ(block_norm(v, 2), 1.0);
  EXPECT_THROW((void)block_norm(v, 3), std::out_of_range);
}

TEST(BlockNormTest, MatchesSquaredSum) {
  const auto layout = BlockLayout::partition({4, 3});
  const BlockedVector v(layout, {0.5, -1.25, 2, 3, 1e-3, -7, 0.125});
  for (std::size_t b = 0; b < 2; ++b) {
    long double sq = 0;
    for (double e : v.block(b)) sq += static_cast<long double>(e) * e;
    EXPECT_NEAR(block_norm(v, b), static_cast<double>(std::sqrt(sq)), 1e-15 * std::sqrt(sq));
  }
}

TEST(ViewBlockTest, WriteThrough) {
  auto v = BlockedVector::zeros(BlockLayout::partition({3, 2}));
  auto blk = v.block(1);
  blk[0] = 9;
  blk[1] = 9;
  EXPECT_EQ(v.values(), (std::vector<double>{0, 0, 0, 9, 9}));
}

TEST(ViewBlockTest, Read) {
  const BlockedVector v(BlockLayout::partition({3, 2}), {1, 2, 3, 4, 5});
  const auto blk = v.block(0);
  EXPECT_EQ(std::vector<double>(blk.begin(), blk.end()), (std::vector<double>{1, 2, 3}));
  EXPECT_THROW((void)v.block(2), std::out_of_range);
}

TEST(BlockedVectorTest, DataSizeMustMatchLayout) {
  EXPECT_THROW(BlockedVector(BlockLayout::partition({2}), {1, 2, 3}), InvalidLayoutError);
}

TEST(BlockedVectorTest, AllFinite) {
  std::vector<double> v{1, 2, 3};
  EXPECT_TRUE(all_finite(v));
  v[1] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_FALSE(all_finite(v));
  v[1] = std::numeric_limits<double>::infinity();
  EXPECT_FALSE(all_finite(v));
}

}  // namespace
}  // namespace blockopt
