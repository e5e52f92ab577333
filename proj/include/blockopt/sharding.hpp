// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dataset sharding across logical workers, per-shard without-replacement
// mini-batch sampling, fixed-order gradient averaging and a Monte-Carlo
// study of mini-batch gradient variance.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "blockopt/blocks.hpp"
#include "blockopt/problems.hpp"

namespace blockopt {

class InvalidPlanError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ShardPlan {
  std::size_t n = 0;
  std::vector<std::vector<std::size_t>> shards;  // one per worker

  std::size_t num_workers() const { return shards.size(); }
};

/// Seeded permutation of [0, n) cut into W contiguous chunks; the first
/// n % W workers get one extra index. Throws InvalidPlanError unless
/// 1 <= W <= n.
ShardPlan make_shards(std::size_t n, std::size_t workers, std::uint64_t seed);

/// One worker's view of its shard. Epoch e uses the shard shuffled with
/// seed ^ e, so any epoch can be regenerated on its own.
class ShardSampler {
 public:
  ShardSampler(std::vector<std::size_t> shard, std::uint64_t seed);

  /// Sampler for worker w of a plan, seeded from a per-worker substream.
  static ShardSampler for_worker(const ShardPlan& plan, std::size_t worker,
                                 std::uint64_t seed);

  /// Next local_k indices of the current permutation. Batches never straddle
  /// epochs: if fewer than local_k indices remain, the rest of the epoch is
  /// dropped and the next epoch starts. Throws std::invalid_argument when
  /// local_k is 0 or exceeds the shard size.
  std::vector<std::size_t> next_minibatch(std::size_t local_k);

  std::size_t shard_size() const { return shard_.size(); }
  std::size_t cursor() const { return cursor_; }
  std::uint64_t epoch() const { return epoch_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const std::size_t> permutation() const { return permutation_; }

 private:
  void reshuffle();

  std::vector<std::size_t> shard_;
  std::vector<std::size_t> permutation_;
  std::size_t cursor_ = 0;
  std::uint64_t epoch_ = 0;
  std::uint64_t seed_;
};

/// Coordinate-wise mean of the worker gradients, summed in worker-index
/// order. Throws std::invalid_argument on an empty list and
/// InvalidLayoutError on a layout mismatch.
BlockedVector aggregate_gradients(std::span<const BlockedVector> worker_grads);

enum class SamplingScheme { kWithReplacement, kWithoutReplacement };

std::string_view to_string(SamplingScheme scheme);

struct VarianceReport {
  SamplingScheme scheme = SamplingScheme::kWithoutReplacement;
  std::size_t k = 0;
  double variance = 0;        // mean over trials of ||g_batch - g_full||^2
  double standard_error = 0;  // of `variance`
  std::size_t trials = 0;
};

/// Monte-Carlo estimate of the trace variance of the mini-batch mean
/// gradient at a fixed point x. Sampled indices are summed in ascending
/// order, so a without-replacement batch of size n reproduces the full
/// gradient exactly. Throws std::invalid_argument for k = 0, trials = 0,
/// a deterministic problem, or k > n without replacement.
VarianceReport estimate_gradient_variance(const Problem& problem, const BlockedVector& x,
                                          std::size_t k, SamplingScheme scheme,
                                          std::size_t trials, std::uint64_t seed);

/// Same estimate when the batch is assembled from W shards, each drawing
/// k / W indices without replacement from its own shard (k must be a
/// multiple of W). Reported separately; the classical bounds assume
/// sampling from the whole dataset.
VarianceReport estimate_sharded_variance(const Problem& problem, const BlockedVector& x,
                                         std::size_t k, std::size_t workers, std::size_t trials,
                                         std::uint64_t seed);

}  // namespace blockopt
