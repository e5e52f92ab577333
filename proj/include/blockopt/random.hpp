// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Portable random streams. std::mt19937_64 output is fully specified by the
// standard, but the std distributions and std::shuffle are not, so the few
// transforms we need are written out here to keep runs replayable across
// standard libraries.

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace blockopt {

std::uint64_t splitmix64(std::uint64_t x);

/// Seed of the named substream of `seed` (e.g. "sampler", "init").
std::uint64_t substream_seed(std::uint64_t seed, std::string_view name);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer on [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller (one draw per call, the pair's sine half
  /// is discarded).
  double normal();

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace blockopt
