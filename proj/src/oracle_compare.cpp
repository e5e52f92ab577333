// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/oracle_compare.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "blockopt/oracle/scalar_oracle.hpp"
#include "blockopt/random.hpp"
#include "blockopt/schedule.hpp"

namespace blockopt {
namespace {

oracle::Rule to_rule(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kLamb: return oracle::Rule::kLamb;
    case OptimizerKind::kLans: return oracle::Rule::kLans;
    case OptimizerKind::kAdamW: return oracle::Rule::kAdamW;
    case OptimizerKind::kSgdMomentum: return oracle::Rule::kSgdMomentum;
    case OptimizerKind::kNag: return oracle::Rule::kNag;
  }
  return oracle::Rule::kLamb;
}

oracle::Hyper to_hyper(const OptimizerConfig& c, std::size_t num_blocks) {
  oracle::Hyper h;
  h.beta1 = c.beta1;
  h.beta2 = c.beta2;
  h.epsilon = c.epsilon;
  for (std::size_t b = 0; b < num_blocks; ++b) h.lambda.push_back(c.decay(b));
  h.normalize_grads = c.normalize_grads;
  h.epsilon_floor = c.normalization.zero_policy == ZeroGradPolicy::kEpsilonFloor;
  h.floor_epsilon = c.normalization.floor_epsilon;
  h.clamp_phi = c.phi.kind == ScalingFunction::Kind::kClamp;
  h.phi_lo = c.phi.lo;
  h.phi_hi = c.phi.hi;
  h.mu = c.momentum;
  return h;
}

// Each coordinate is compared relative to the largest magnitude in its block:
// the rules normalize per block, and a coordinate that is itself the result
// of cancellation near zero carries no independent relative accuracy.
double max_deviation(const BlockLayout& layout, std::span<const double> actual,
                     const std::vector<long double>& reference) {
  double worst = 0;
  for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
    const std::size_t begin = layout.offset(b);
    const std::size_t end = begin + layout.size(b);
    long double scale = 0;
    for (std::size_t i = begin; i < end; ++i) scale = std::max(scale, std::abs(reference[i]));
    if (scale == 0) scale = 1;
    for (std::size_t i = begin; i < end; ++i) {
      worst = std::max(worst, relative_deviation(actual[i], reference[i], scale));
    }
  }
  return worst;
}

}  // namespace

double relative_deviation(double actual, long double reference, long double floor) {
  const long double diff = std::abs(static_cast<long double>(actual) - reference);
  return static_cast<double>(diff / std::max(std::abs(reference), floor));
}

OracleResult compare_with_oracle(const OracleCase& oc, std::int64_t steps, std::uint64_t seed,
                                 const std::vector<std::size_t>& block_sizes) {
  if (steps < 1) throw std::invalid_argument("oracle comparison needs steps >= 1");
  const BlockLayout layout = BlockLayout::partition(block_sizes);
  Rng rng(seed);

  BlockedVector params(layout);
  for (double& e : params.data()) e = rng.uniform(-1, 1);
  OptimizerState state = OptimizerState::zeros(layout);
  oracle::State reference(block_sizes, params.values());
  const oracle::Hyper hyper = to_hyper(oc.config, layout.num_blocks());
  const Schedule schedule(0.01, steps, steps / 10, (2 * steps) / 5);

  OracleResult result{oc.label, oc.kind, steps, 0};
  BlockedVector grad(layout);
  for (std::int64_t t = 1; t <= steps; ++t) {
    for (std::size_t b = 0; b < layout.num_blocks(); ++b) {
      const double magnitude = std::pow(10.0, rng.uniform(-3, 3));
      const bool zero_block = rng.below(50) == 0;
      for (double& e : grad.block(b)) e = zero_block ? 0.0 : magnitude * rng.normal();
    }
    const double lr = schedule.rate(t);
    apply_step(oc.kind, params, state, grad, lr, oc.config);
    oracle::step(to_rule(oc.kind), reference, grad.values(), lr, hyper);

    result.max_rel_deviation =
        std::max({result.max_rel_deviation, max_deviation(layout, params.data(), reference.x),
                  max_deviation(layout, state.m.data(), reference.m)});
    if (oc.kind != OptimizerKind::kSgdMomentum && oc.kind != OptimizerKind::kNag) {
      result.max_rel_deviation =
          std::max(result.max_rel_deviation, max_deviation(layout, state.v.data(), reference.v));
    }
  }
  return result;
}

std::vector<OracleCase> default_oracle_grid() {
  std::vector<OracleCase> cases;
  const OptimizerKind kinds[] = {OptimizerKind::kLamb, OptimizerKind::kLans, OptimizerKind::kAdamW,
                                 OptimizerKind::kSgdMomentum, OptimizerKind::kNag};
  for (OptimizerKind kind : kinds) {
    const bool momentum_rule = kind == OptimizerKind::kSgdMomentum || kind == OptimizerKind::kNag;
    for (double beta1 : {0.0, 0.9}) {
      for (double beta2 : {0.9, 0.999}) {
        for (double eps : {0.0, 1e-6}) {
          for (double lambda : {0.0, 0.01}) {
            for (int variant = 0; variant < 3; ++variant) {
              const bool normalize = variant == 1;
              const bool clamp = variant == 2;
              if (normalize && kind != OptimizerKind::kLamb && kind != OptimizerKind::kAdamW) {
                continue;
              }
              if (clamp && kind != OptimizerKind::kLamb && kind != OptimizerKind::kLans) continue;
              OracleCase oc;
              oc.kind = kind;
              oc.config.beta1 = beta1;
              oc.config.beta2 = beta2;
              oc.config.epsilon = eps;
              oc.config.weight_decay = {lambda};
              oc.config.normalize_grads = normalize;
              if (clamp) oc.config.phi = ScalingFunction::clamp(0.5, 2.0);
              oc.config.momentum = beta1;
              oc.label = momentum_rule
                             ? fmt::format("{} mu={}", to_string(kind), beta1)
                             : fmt::format("{} b1={} b2={} eps={} wd={}{}{}", to_string(kind), beta1,
                                           beta2, eps, lambda, normalize ? " norm" : "",
                                           clamp ? " clamp" : "");
              const bool duplicate = std::any_of(cases.begin(), cases.end(), [&](const auto& c) {
                return c.label == oc.label;
              });
              if (!duplicate) cases.push_back(std::move(oc));
            }
          }
        }
      }
    }
  }
  return cases;
}

std::vector<OracleResult> oracle_compare(std::int64_t steps, std::uint64_t seed) {
  std::vector<OracleResult> results;
  std::uint64_t case_seed = seed;
  for (const auto& oc : default_oracle_grid()) {
    results.push_back(compare_with_oracle(oc, steps, splitmix64(case_seed++)));
  }
  return results;
}

}  // namespace blockopt
