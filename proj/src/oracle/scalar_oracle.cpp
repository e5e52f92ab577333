// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/oracle/scalar_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace blockopt::oracle {
namespace {

Real norm_of(const std::vector<Real>& v) {
  Real s = 0;
  for (Real e : v) s += e * e;
  return std::sqrt(s);
}

Real phi(const Hyper& h, Real n) {
  if (!h.clamp_phi) return n;
  if (n < h.phi_lo) return h.phi_lo;
  if (n > h.phi_hi) return h.phi_hi;
  return n;
}

Real trust(const Hyper& h, const std::vector<Real>& x, const std::vector<Real>& u) {
  const Real xn = norm_of(x);
  const Real un = norm_of(u);
  if (xn == 0 || un == 0) return 1;
  return phi(h, xn) / un;
}

std::vector<Real> normalized(const Hyper& h, const std::vector<Real>& g) {
  const Real n = norm_of(g);
  std::vector<Real> out(g.size(), 0);
  if (h.epsilon_floor) {
    const Real denom = n + h.floor_epsilon;
    if (denom > 0) {
      for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] / denom;
    }
    return out;
  }
  if (n == 0) return out;
  for (std::size_t i = 0; i < g.size(); ++i) out[i] = g[i] / n;
  return out;
}

}  // namespace

State::State(std::vector<std::size_t> sizes, const std::vector<double>& x0)
    : block_sizes(std::move(sizes)), x(x0.begin(), x0.end()), m(x0.size(), 0), v(x0.size(), 0) {}

void step(Rule rule, State& s, const std::vector<double>& g_in, Real lr, const Hyper& h) {
  if (g_in.size() != s.x.size()) throw std::invalid_argument("oracle: gradient size mismatch");

  if (rule == Rule::kSgdMomentum || rule == Rule::kNag) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      const Real g = g_in[i];
      s.m[i] = h.mu * s.m[i] + g;
      if (rule == Rule::kSgdMomentum) {
        s.x[i] = s.x[i] - lr * s.m[i];
      } else {
        s.x[i] = s.x[i] - lr * (h.mu * s.m[i] + g);
      }
    }
    s.t += 1;
    return;
  }

  const std::int64_t t = s.t + 1;
  const Real bc1 = 1 - std::pow(h.beta1, static_cast<Real>(t));
  const Real bc2 = 1 - std::pow(h.beta2, static_cast<Real>(t));

  std::size_t offset = 0;
  for (std::size_t b = 0; b < s.block_sizes.size(); ++b) {
    const std::size_t n = s.block_sizes[b];
    const Real lambda = h.lambda.at(b);

    std::vector<Real> x(s.x.begin() + offset, s.x.begin() + offset + n);
    std::vector<Real> g(g_in.begin() + offset, g_in.begin() + offset + n);
    if (rule == Rule::kLans || h.normalize_grads) g = normalized(h, g);

    std::vector<Real> r(n), c(n);
    for (std::size_t i = 0; i < n; ++i) {
      Real& m = s.m[offset + i];
      Real& v = s.v[offset + i];
      m = h.beta1 * m + (1 - h.beta1) * g[i];
      v = h.beta2 * v + (1 - h.beta2) * g[i] * g[i];
      const Real m_tilde = m / bc1;
      const Real v_tilde = v / bc2;
      const Real denom = std::sqrt(v_tilde) + h.epsilon;
      r[i] = denom > 0 ? m_tilde / denom : 0;
      c[i] = denom > 0 ? g[i] / denom : 0;
    }

    std::vector<Real> delta(n);
    if (rule == Rule::kLamb) {
      std::vector<Real> u(n);
      for (std::size_t i = 0; i < n; ++i) u[i] = r[i] + lambda * x[i];
      const Real scale = trust(h, x, u);
      for (std::size_t i = 0; i < n; ++i) delta[i] = scale * u[i];
    } else if (rule == Rule::kLans) {
      std::vector<Real> ur(n), uc(n);
      for (std::size_t i = 0; i < n; ++i) {
        ur[i] = r[i] + lambda * x[i];
        uc[i] = c[i] + lambda * x[i];
      }
      const Real sr = trust(h, x, ur);
      const Real sc = trust(h, x, uc);
      for (std::size_t i = 0; i < n; ++i) {
        delta[i] = h.beta1 * sr * ur[i] + (1 - h.beta1) * sc * uc[i];
      }
    } else {
      for (std::size_t i = 0; i < n; ++i) delta[i] = r[i] + lambda * x[i];
    }

    for (std::size_t i = 0; i < n; ++i) s.x[offset + i] = x[i] - lr * delta[i];
    offset += n;
  }
  s.t = t;
}

}  // namespace blockopt::oracle
