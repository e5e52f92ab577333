// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Reference transcriptions of the update rules in extended precision
// (long double), written coordinate by coordinate straight from the
// algorithm listings. Nothing here is shared with the production
// optimizers; the two only agree on conventions for degenerate inputs:
//   - a zero-norm gradient block normalizes to zero (or to g/(||g||+eps_n)
//     under the epsilon-floor policy),
//   - the trust factor is 1 when ||x_b|| or ||u_b|| is zero,
//   - m~/(sqrt(v~)+eps) with a zero denominator is 0.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace blockopt::oracle {

using Real = long double;

enum class Rule { kLamb, kLans, kAdamW, kSgdMomentum, kNag };

struct Hyper {
  Real beta1 = 0.9L;
  Real beta2 = 0.999L;
  Real epsilon = 1e-6L;
  std::vector<Real> lambda;  // one per block
  bool normalize_grads = false;
  bool epsilon_floor = false;
  Real floor_epsilon = 1e-12L;
  bool clamp_phi = false;
  Real phi_lo = 0;
  Real phi_hi = 0;
  Real mu = 0.9L;
};

struct State {
  std::vector<std::size_t> block_sizes;
  std::vector<Real> x;
  std::vector<Real> m;
  std::vector<Real> v;
  std::int64_t t = 0;

  State(std::vector<std::size_t> sizes, const std::vector<double>& x0);
};

/// Advances the state by one step of `rule` with gradient g and rate lr.
void step(Rule rule, State& state, const std::vector<double>& g, Real lr, const Hyper& hyper);

}  // namespace blockopt::oracle
