// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Block-wise update rules: LAMB, LANS, AdamW, heavy-ball momentum and
// Nesterov momentum. Every step validates its inputs before touching any
// state, so a thrown error leaves params and state unchanged.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blockopt/blocks.hpp"

namespace blockopt {

class NonFiniteGradientError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class InvalidConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// What to do with a block whose gradient norm is exactly zero.
enum class ZeroGradPolicy {
  kZeroPassthrough,  // g~ = 0
  kEpsilonFloor,     // g~ = g / (||g|| + floor_epsilon), applied to every block
};

struct NormalizationPolicy {
  ZeroGradPolicy zero_policy = ZeroGradPolicy::kZeroPassthrough;
  Scalar floor_epsilon = 1e-12;
};

/// phi in the trust scale phi(||x_b||) / ||u_b||.
struct ScalingFunction {
  enum class Kind { kIdentity, kClamp };

  Kind kind = Kind::kIdentity;
  Scalar lo = 0;
  Scalar hi = 0;

  static ScalingFunction identity() { return {}; }
  static ScalingFunction clamp(Scalar lo, Scalar hi) { return {Kind::kClamp, lo, hi}; }

  Scalar operator()(Scalar norm) const;
};

struct OptimizerConfig {
  Scalar beta1 = 0.9;
  Scalar beta2 = 0.999;
  Scalar epsilon = 1e-6;
  // One entry broadcast to every block, or exactly one entry per block.
  std::vector<Scalar> weight_decay{0.01};
  ScalingFunction phi;
  // LAMB/AdamW only; LANS always normalizes.
  bool normalize_grads = false;
  NormalizationPolicy normalization;
  // mu for the momentum-SGD and NAG rules.
  Scalar momentum = 0.9;

  /// Throws InvalidConfigError.
  void validate(std::size_t num_blocks) const;
  Scalar decay(std::size_t b) const {
    return weight_decay.size() == 1 ? weight_decay.front() : weight_decay.at(b);
  }
};

struct OptimizerState {
  BlockedVector m;
  BlockedVector v;
  std::int64_t t = 0;

  static OptimizerState zeros(const BlockLayout& layout) {
    return {BlockedVector::zeros(layout), BlockedVector::zeros(layout), 0};
  }
};

/// Per-block diagnostics of one step. update_norms holds ||d_b|| before the
/// learning rate is applied.
struct StepReport {
  std::vector<Scalar> update_norms;
  // LAMB: phi(||x||)/||r + lambda x||. LANS: the same factor for the momentum
  // term; the gradient-term factor is in grad_trust_ratios.
  std::vector<Scalar> trust_ratios;
  std::vector<Scalar> grad_trust_ratios;
  Scalar learning_rate = 0;
};

/// Per-block loops either run in order or fan out one thread per block.
/// Both produce bit-identical results.
enum class Execution { kSequential, kParallel };

/// Writes g / ||g||_2 into out. The norm is taken after dividing by max|g_i|,
/// which avoids overflow and makes the result depend only on the direction
/// of g whenever g is an exact multiple of another gradient.
/// Throws NonFiniteGradientError on NaN/Inf input.
void normalize_gradient_block(std::span<const Scalar> g, std::span<Scalar> out,
                              const NormalizationPolicy& policy = {});
std::vector<Scalar> normalize_gradient_block(std::span<const Scalar> g,
                                             const NormalizationPolicy& policy = {});

struct BiasCorrected {
  std::vector<Scalar> m_hat;
  std::vector<Scalar> v_hat;
};

/// m / (1 - beta1^t), v / (1 - beta2^t). Throws std::invalid_argument for t < 1.
BiasCorrected bias_correct(std::span<const Scalar> m, std::span<const Scalar> v, std::int64_t t,
                           Scalar beta1, Scalar beta2);

/// phi(||x||) / ||u||, or 1 when either norm is zero.
Scalar trust_scale(std::span<const Scalar> x, std::span<const Scalar> u,
                   const ScalingFunction& phi);

StepReport lamb_step(BlockedVector& params, OptimizerState& state, const BlockedVector& grad,
                     Scalar lr, const OptimizerConfig& config,
                     Execution exec = Execution::kSequential);

StepReport lans_step(BlockedVector& params, OptimizerState& state, const BlockedVector& grad,
                     Scalar lr, const OptimizerConfig& config,
                     Execution exec = Execution::kSequential);

StepReport adamw_step(BlockedVector& params, OptimizerState& state, const BlockedVector& grad,
                      Scalar lr, const OptimizerConfig& config,
                      Execution exec = Execution::kSequential);

/// m <- mu m + g;  x <- x - lr m.
void sgd_momentum_step(BlockedVector& params, BlockedVector& m, const BlockedVector& grad,
                       Scalar lr, Scalar mu);

/// m <- mu m + g;  x <- x - lr (mu m + g).
void nag_step(BlockedVector& params, BlockedVector& m, const BlockedVector& grad, Scalar lr,
              Scalar mu);

enum class OptimizerKind { kLamb, kLans, kAdamW, kSgdMomentum, kNag };

std::string_view to_string(OptimizerKind kind);
/// Accepts "lamb", "lans", "adamw", "sgd_momentum", "nag".
std::optional<OptimizerKind> parse_optimizer_kind(std::string_view name);

/// Uniform entry point used by the harness. The momentum rules keep their
/// buffer in state.m and also advance state.t.
StepReport apply_step(OptimizerKind kind, BlockedVector& params, OptimizerState& state,
                      const BlockedVector& grad, Scalar lr, const OptimizerConfig& config,
                      Execution exec = Execution::kSequential);

}  // namespace blockopt
