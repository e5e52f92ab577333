// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/optimizers.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <thread>

namespace blockopt {
namespace {

void for_each_block(std::size_t num_blocks, Execution exec,
                    const std::function<void(std::size_t)>& body) {
  if (exec == Execution::kSequential || num_blocks < 2) {
    for (std::size_t b = 0; b < num_blocks; ++b) body(b);
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(num_blocks);
  for (std::size_t b = 0; b < num_blocks; ++b) {
    workers.emplace_back([&body, b] { body(b); });
  }
}

void require_same_layout(const BlockedVector& a, const BlockedVector& b, const char* what) {
  if (!(a.layout() == b.layout())) {
    throw InvalidLayoutError(std::string(what) + ": block layouts differ");
  }
}

void require_finite_gradient(const BlockedVector& grad) {
  if (!all_finite(grad.data())) {
    throw NonFiniteGradientError("gradient contains NaN or Inf");
  }
}

void require_learning_rate(Scalar lr) {
  if (!(lr >= 0) || !std::isfinite(lr)) {
    throw std::invalid_argument("learning rate must be finite and non-negative");
  }
}

void validate_adaptive_step(const BlockedVector& params, const OptimizerState& state,
                            const BlockedVector& grad, Scalar lr, const OptimizerConfig& config) {
  require_same_layout(params, grad, "gradient");
  require_same_layout(params, state.m, "first moment");
  require_same_layout(params, state.v, "second moment");
  config.validate(params.num_blocks());
  require_learning_rate(lr);
  require_finite_gradient(grad);
}

// Moment update and bias-corrected ratios for one block. g is the (possibly
// normalized) gradient; fills r = m~/(sqrt(v~)+eps) and, when c is non-empty,
// c = g/(sqrt(v~)+eps). A zero denominator only arises with eps = 0 and
// v~ = 0; the ratio is taken as 0 there.
void update_moments(std::span<const Scalar> g, std::span<Scalar> m, std::span<Scalar> v,
                    Scalar beta1, Scalar beta2, Scalar eps, Scalar bc1, Scalar bc2,
                    std::span<Scalar> r, std::span<Scalar> c) {
  for (std::size_t i = 0; i < g.size(); ++i) {
    m[i] = beta1 * m[i] + (1 - beta1) * g[i];
    v[i] = beta2 * v[i] + (1 - beta2) * g[i] * g[i];
    const Scalar m_hat = m[i] / bc1;
    const Scalar v_hat = v[i] / bc2;
    const Scalar denom = std::sqrt(v_hat) + eps;
    r[i] = denom > 0 ? m_hat / denom : Scalar{0};
    if (!c.empty()) c[i] = denom > 0 ? g[i] / denom : Scalar{0};
  }
}

Scalar bias_factor(Scalar beta, std::int64_t t) {
  return 1 - std::pow(beta, static_cast<Scalar>(t));
}

StepReport make_report(std::size_t num_blocks, Scalar lr) {
  StepReport report;
  report.update_norms.assign(num_blocks, 0);
  report.trust_ratios.assign(num_blocks, 1);
  report.learning_rate = lr;
  return report;
}

}  // namespace

Scalar ScalingFunction::operator()(Scalar norm) const {
  if (kind == Kind::kClamp) return std::min(std::max(norm, lo), hi);
  return norm;
}

void OptimizerConfig::validate(std::size_t num_blocks) const {
  if (!(beta1 >= 0 && beta1 < 1)) throw InvalidConfigError("beta1 must lie in [0, 1)");
  if (!(beta2 >= 0 && beta2 < 1)) throw InvalidConfigError("beta2 must lie in [0, 1)");
  if (!(epsilon >= 0) || !std::isfinite(epsilon)) {
    throw InvalidConfigError("epsilon must be finite and non-negative");
  }
  if (weight_decay.empty()) throw InvalidConfigError("weight_decay needs at least one value");
  if (weight_decay.size() != 1 && weight_decay.size() != num_blocks) {
    throw InvalidConfigError("weight_decay must have 1 or " + std::to_string(num_blocks) +
                             " entries, got " + std::to_string(weight_decay.size()));
  }
  for (Scalar lambda : weight_decay) {
    if (!(lambda >= 0) || !std::isfinite(lambda)) {
      throw InvalidConfigError("weight decay must be finite and non-negative");
    }
  }
  if (phi.kind == ScalingFunction::Kind::kClamp && !(phi.lo > 0 && phi.lo <= phi.hi)) {
    throw InvalidConfigError("clamp scaling needs 0 < lo <= hi");
  }
  if (!(normalization.floor_epsilon >= 0)) {
    throw InvalidConfigError("normalization floor epsilon must be non-negative");
  }
  if (!(momentum >= 0 && momentum < 1)) throw InvalidConfigError("momentum must lie in [0, 1)");
}

void normalize_gradient_block(std::span<const Scalar> g, std::span<Scalar> out,
                              const NormalizationPolicy& policy) {
  if (out.size() != g.size()) throw std::invalid_argument("normalize: size mismatch");
  if (!all_finite(g)) throw NonFiniteGradientError("gradient block contains NaN or Inf");

  Scalar max_abs = 0;
  for (Scalar x : g) max_abs = std::max(max_abs, std::abs(x));

  if (policy.zero_policy == ZeroGradPolicy::kEpsilonFloor) {
    Scalar scaled_sq = 0;
    if (max_abs > 0) {
      for (Scalar x : g) scaled_sq += (x / max_abs) * (x / max_abs);
    }
    const Scalar denom = max_abs * std::sqrt(scaled_sq) + policy.floor_epsilon;
    for (std::size_t i = 0; i < g.size(); ++i) out[i] = denom > 0 ? g[i] / denom : Scalar{0};
    return;
  }

  if (max_abs == 0) {
    std::fill(out.begin(), out.end(), Scalar{0});
    return;
  }
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] / max_abs;
  const Scalar norm = l2_norm(out);
  for (Scalar& x : out) x /= norm;
}

std::vector<Scalar> normalize_gradient_block(std::span<const Scalar> g,
                                             const NormalizationPolicy& policy) {
  std::vector<Scalar> out(g.size());
  normalize_gradient_block(g, out, policy);
  return out;
}

BiasCorrected bias_correct(std::span<const Scalar> m, std::span<const Scalar> v, std::int64_t t,
                           Scalar beta1, Scalar beta2) {
  if (t < 1) throw std::invalid_argument("bias correction needs t >= 1");
  if (m.size() != v.size()) throw std::invalid_argument("bias correction: size mismatch");
  const Scalar bc1 = bias_factor(beta1, t);
  const Scalar bc2 = bias_factor(beta2, t);
  BiasCorrected out{std::vector<Scalar>(m.size()), std::vector<Scalar>(v.size())};
  for (std::size_t i = 0; i < m.size(); ++i) {
    out.m_hat[i] = m[i] / bc1;
    out.v_hat[i] = v[i] / bc2;
  }
  return out;
}

Scalar trust_scale(std::span<const Scalar> x, std::span<const Scalar> u,
                   const ScalingFunction& phi) {
  const Scalar x_norm = l2_norm(x);
  const Scalar u_norm = l2_norm(u);
  if (x_norm == 0 || u_norm == 0) return 1;
  return phi(x_norm) / u_norm;
}

StepReport lamb_step(BlockedVector& params, OptimizerState& state, const BlockedVector& grad,
                     Scalar lr, const OptimizerConfig& config, Execution exec) {
  validate_adaptive_step(params, state, grad, lr, config);

  const std::int64_t t = state.t + 1;
  const Scalar bc1 = bias_factor(config.beta1, t);
  const Scalar bc2 = bias_factor(config.beta2, t);
  StepReport report = make_report(params.num_blocks(), lr);

  for_each_block(params.num_blocks(), exec, [&](std::size_t b) {
    auto x = params.block(b);
    const std::size_t n = x.size();
    std::vector<Scalar> g(grad.block(b).begin(), grad.block(b).end());
    if (config.normalize_grads) normalize_gradient_block(grad.block(b), g, config.normalization);

    std::vector<Scalar> u(n);
    update_moments(g, state.m.block(b), state.v.block(b), config.beta1, config.beta2,
                   config.epsilon, bc1, bc2, u, {});
    const Scalar lambda = config.decay(b);
    for (std::size_t i = 0; i < n; ++i) u[i] += lambda * x[i];

    const Scalar scale = trust_scale(x, u, config.phi);
    for (std::size_t i = 0; i < n; ++i) x[i] -= lr * (scale * u[i]);
    report.trust_ratios[b] = scale;
    report.update_norms[b] = scale * l2_norm(u);
  });

  state.t = t;
  return report;
}

StepReport lans_step(BlockedVector& params, OptimizerState& state, const BlockedVector& grad,
                     Scalar lr, const OptimizerConfig& config, Execution exec) {
  validate_adaptive_step(params, state, grad, lr, config);

  const std::int64_t t = state.t + 1;
  const Scalar beta1 = config.beta1;
  const Scalar bc1 = bias_factor(beta1, t);
  const Scalar bc2 = bias_factor(config.beta2, t);
  StepReport report = make_report(params.num_blocks(), lr);
  report.grad_trust_ratios.assign(params.num_blocks(), 1);

  for_each_block(params.num_blocks(), exec, [&](std::size_t b) {
    auto x = params.block(b);
    const std::size_t n = x.size();
    std::vector<Scalar> g(n);
    normalize_gradient_block(grad.block(b), g, config.normalization);

    // u_r = r + lambda x (momentum term), u_c = c + lambda x (gradient term).
    std::vector<Scalar> u_r(n);
    std::vector<Scalar> u_c(n);
    update_moments(g, state.m.block(b), state.v.block(b), beta1, config.beta2, config.epsilon,
                   bc1, bc2, u_r, u_c);
    const Scalar lambda = config.decay(b);
    for (std::size_t i = 0; i < n; ++i) {
      u_r[i] += lambda * x[i];
      u_c[i] += lambda * x[i];
    }

    const Scalar scale_r = trust_scale(x, u_r, config.phi);
    const Scalar scale_c = trust_scale(x, u_c, config.phi);
    std::vector<Scalar> d(n);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] = beta1 * (scale_r * u_r[i]) + (1 - beta1) * (scale_c * u_c[i]);
    }
    for (std::size_t i = 0; i < n; ++i) x[i] -= lr * d[i];
    report.trust_ratios[b] = scale_r;
    report.grad_trust_ratios[b] = scale_c;
    report.update_norms[b] = l2_norm(d);
  });

  state.t = t;
  return report;
}

StepReport adamw_step(BlockedVector& params, OptimizerState& state, const BlockedVector& grad,
                      Scalar lr, const OptimizerConfig& config, Execution exec) {
  validate_adaptive_step(params, state, grad, lr, config);

  const std::int64_t t = state.t + 1;
  const Scalar bc1 = bias_factor(config.beta1, t);
  const Scalar bc2 = bias_factor(config.beta2, t);
  StepReport report = make_report(params.num_blocks(), lr);

  for_each_block(params.num_blocks(), exec, [&](std::size_t b) {
    auto x = params.block(b);
    const std::size_t n = x.size();
    std::vector<Scalar> g(grad.block(b).begin(), grad.block(b).end());
    if (config.normalize_grads) normalize_gradient_block(grad.block(b), g, config.normalization);

    std::vector<Scalar> d(n);
    update_moments(g, state.m.block(b), state.v.block(b), config.beta1, config.beta2,
                   config.epsilon, bc1, bc2, d, {});
    const Scalar lambda = config.decay(b);
    for (std::size_t i = 0; i < n; ++i) {
      d[i] += lambda * x[i];
      x[i] -= lr * d[i];
    }
    report.update_norms[b] = l2_norm(d);
  });

  state.t = t;
  return report;
}

namespace {

void validate_momentum_step(const BlockedVector& params, const BlockedVector& m,
                            const BlockedVector& grad, Scalar lr, Scalar mu) {
  require_same_layout(params, grad, "gradient");
  require_same_layout(params, m, "momentum buffer");
  require_learning_rate(lr);
  if (!(mu >= 0 && mu < 1)) throw InvalidConfigError("momentum must lie in [0, 1)");
  require_finite_gradient(grad);
}

}  // namespace

void sgd_momentum_step(BlockedVector& params, BlockedVector& m, const BlockedVector& grad,
                       Scalar lr, Scalar mu) {
  validate_momentum_step(params, m, grad, lr, mu);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = mu * m[i] + grad[i];
    params[i] -= lr * m[i];
  }
}

void nag_step(BlockedVector& params, BlockedVector& m, const BlockedVector& grad, Scalar lr,
              Scalar mu) {
  validate_momentum_step(params, m, grad, lr, mu);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m[i] = mu * m[i] + grad[i];
    params[i] -= lr * (mu * m[i] + grad[i]);
  }
}

std::string_view to_string(OptimizerKind kind) {
  switch (kind) {
    case OptimizerKind::kLamb: return "lamb";
    case OptimizerKind::kLans: return "lans";
    case OptimizerKind::kAdamW: return "adamw";
    case OptimizerKind::kSgdMomentum: return "sgd_momentum";
    case OptimizerKind::kNag: return "nag";
  }
  return "unknown";
}

std::optional<OptimizerKind> parse_optimizer_kind(std::string_view name) {
  for (auto kind : {OptimizerKind::kLamb, OptimizerKind::kLans, OptimizerKind::kAdamW,
                    OptimizerKind::kSgdMomentum, OptimizerKind::kNag}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

StepReport apply_step(OptimizerKind kind, BlockedVector& params, OptimizerState& state,
                      const BlockedVector& grad, Scalar lr, const OptimizerConfig& config,
                      Execution exec) {
  switch (kind) {
    case OptimizerKind::kLamb: return lamb_step(params, state, grad, lr, config, exec);
    case OptimizerKind::kLans: return lans_step(params, state, grad, lr, config, exec);
    case OptimizerKind::kAdamW: return adamw_step(params, state, grad, lr, config, exec);
    case OptimizerKind::kSgdMomentum:
    case OptimizerKind::kNag: {
      if (kind == OptimizerKind::kSgdMomentum) {
        sgd_momentum_step(params, state.m, grad, lr, config.momentum);
      } else {
        nag_step(params, state.m, grad, lr, config.momentum);
      }
      ++state.t;
      StepReport report = make_report(params.num_blocks(), lr);
      for (std::size_t b = 0; b < params.num_blocks(); ++b) {
        if (kind == OptimizerKind::kSgdMomentum) {
          report.update_norms[b] = l2_norm(state.m.block(b));
          continue;
        }
        Scalar sq = 0;
        auto m = state.m.block(b);
        auto g = grad.block(b);
        for (std::size_t i = 0; i < m.size(); ++i) {
          const Scalar d = config.momentum * m[i] + g[i];
          sq += d * d;
        }
        report.update_norms[b] = std::sqrt(sq);
      }
      return report;
    }
  }
  throw std::invalid_argument("unknown optimizer kind");
}

}  // namespace blockopt
