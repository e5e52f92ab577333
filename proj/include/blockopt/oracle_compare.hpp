// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Runs the production optimizers and their extended-precision transcriptions
// side by side on one random gradient stream.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "blockopt/optimizers.hpp"

namespace blockopt {

struct OracleCase {
  OptimizerKind kind = OptimizerKind::kLans;
  OptimizerConfig config;
  std::string label;
};

struct OracleResult {
  std::string label;
  OptimizerKind kind = OptimizerKind::kLans;
  std::int64_t steps = 0;
  double max_rel_deviation = 0;
};

inline constexpr double kOracleFailThreshold = 1e-10;

/// |actual - reference| / max(|reference|, floor).
double relative_deviation(double actual, long double reference, long double floor);

/// Max relative deviation over parameters and moments after each of `steps`
/// steps, each coordinate floored at its block's largest reference
/// magnitude. Gradients are standard normal per coordinate with a per-block,
/// per-step magnitude in [1e-3, 1e3]; about one block in fifty is all zero.
OracleResult compare_with_oracle(const OracleCase& oracle_case, std::int64_t steps,
                                 std::uint64_t seed,
                                 const std::vector<std::size_t>& block_sizes = {5, 6, 5});

/// Every rule over the grid beta1 in {0, 0.9}, beta2 in {0.9, 0.999},
/// epsilon in {0, 1e-6}, lambda in {0, 0.01}; LAMB and AdamW additionally
/// with normalize_grads, LAMB/LANS additionally with phi = clamp(0.5, 2).
std::vector<OracleCase> default_oracle_grid();

std::vector<OracleResult> oracle_compare(std::int64_t steps, std::uint64_t seed);

}  // namespace blockopt
