// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "blockopt/random.hpp"

namespace blockopt {
namespace {

BlockLayout layout_for(std::size_t d, const std::vector<std::size_t>& blocks) {
  if (blocks.empty()) return BlockLayout::partition({d});
  auto layout = BlockLayout::partition(blocks);
  if (layout.total_dim() != d) {
    throw InvalidLayoutError("block sizes sum to " + std::to_string(layout.total_dim()) +
                             ", problem dimension is " + std::to_string(d));
  }
  return layout;
}

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

double sigmoid(double z) {
  if (z >= 0) return 1 / (1 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1 + e);
}

// Solves S x = rhs for symmetric positive definite S (row-major) by Cholesky.
std::vector<double> cholesky_solve(std::vector<double> s, std::vector<double> rhs) {
  const std::size_t d = rhs.size();
  for (std::size_t j = 0; j < d; ++j) {
    double diag = s[j * d + j];
    for (std::size_t k = 0; k < j; ++k) diag -= s[j * d + k] * s[j * d + k];
    if (!(diag > 0)) throw std::invalid_argument("quadratic matrix is not positive definite");
    s[j * d + j] = std::sqrt(diag);
    for (std::size_t i = j + 1; i < d; ++i) {
      double v = s[i * d + j];
      for (std::size_t k = 0; k < j; ++k) v -= s[i * d + k] * s[j * d + k];
      s[i * d + j] = v / s[j * d + j];
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t k = 0; k < i; ++k) rhs[i] -= s[i * d + k] * rhs[k];
    rhs[i] /= s[i * d + i];
  }
  for (std::size_t i = d; i-- > 0;) {
    for (std::size_t k = i + 1; k < d; ++k) rhs[i] -= s[k * d + i] * rhs[k];
    rhs[i] /= s[i * d + i];
  }
  return rhs;
}

}  // namespace

std::string_view to_string(ProblemKind kind) {
  switch (kind) {
    case ProblemKind::kQuadratic: return "quadratic";
    case ProblemKind::kRosenbrock: return "rosenbrock";
    case ProblemKind::kLogisticRegression: return "logistic_regression";
    case ProblemKind::kMlp1: return "mlp1";
  }
  return "unknown";
}

std::optional<ProblemKind> parse_problem_kind(std::string_view name) {
  for (auto kind : {ProblemKind::kQuadratic, ProblemKind::kRosenbrock,
                    ProblemKind::kLogisticRegression, ProblemKind::kMlp1}) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

Problem Problem::from_spec(const ProblemSpec& spec) {
  switch (spec.kind) {
    case ProblemKind::kQuadratic: {
      // A = I + M^T M / d with standard-normal M; b standard normal.
      Rng rng(substream_seed(spec.seed, "quadratic"));
      const std::size_t d = spec.d;
      std::vector<double> m(d * d);
      for (double& e : m) e = rng.normal();
      std::vector<double> a(d * d, 0);
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          double s = 0;
          for (std::size_t k = 0; k < d; ++k) s += m[k * d + i] * m[k * d + j];
          a[i * d + j] = s / static_cast<double>(d) + (i == j ? 1.0 : 0.0);
        }
      }
      std::vector<double> b(d);
      for (double& e : b) e = rng.normal();
      return quadratic(std::move(a), std::move(b), spec.l2_reg, spec.blocks);
    }
    case ProblemKind::kRosenbrock:
      return rosenbrock(spec.d, spec.l2_reg, spec.blocks);
    case ProblemKind::kLogisticRegression:
      return logistic_regression(spec.n, spec.d, spec.seed, spec.l2_reg, spec.label_noise,
                                 spec.blocks);
    case ProblemKind::kMlp1:
      return mlp1(spec.n, spec.d, spec.hidden, spec.seed, spec.l2_reg);
  }
  throw std::invalid_argument("unknown problem kind");
}

Problem Problem::quadratic(std::vector<double> a, std::vector<double> b, double l2_reg,
                           std::vector<std::size_t> blocks) {
  const std::size_t d = b.size();
  if (d == 0 || a.size() != d * d) throw std::invalid_argument("quadratic: A must be d x d");
  if (!(l2_reg >= 0)) throw std::invalid_argument("l2_reg must be non-negative");
  Problem p(ProblemKind::kQuadratic, layout_for(d, blocks), l2_reg);
  p.matrix_ = std::move(a);
  p.vector_ = std::move(b);
  return p;
}

Problem Problem::rosenbrock(std::size_t d, double l2_reg, std::vector<std::size_t> blocks) {
  if (d < 2) throw std::invalid_argument("rosenbrock needs d >= 2");
  if (!(l2_reg >= 0)) throw std::invalid_argument("l2_reg must be non-negative");
  return Problem(ProblemKind::kRosenbrock, layout_for(d, blocks), l2_reg);
}

Problem Problem::logistic_regression(std::size_t n, std::size_t d, std::uint64_t seed,
                                     double l2_reg, double label_noise,
                                     std::vector<std::size_t> blocks) {
  if (n == 0 || d == 0) throw std::invalid_argument("logistic regression needs n, d >= 1");
  if (!(l2_reg >= 0)) throw std::invalid_argument("l2_reg must be non-negative");
  if (!(label_noise >= 0 && label_noise <= 1)) {
    throw std::invalid_argument("label noise must lie in [0, 1]");
  }
  Problem p(ProblemKind::kLogisticRegression, layout_for(d, blocks), l2_reg);
  p.num_samples_ = n;
  p.features_ = d;

  Rng feature_rng(substream_seed(seed, "features"));
  Rng label_rng(substream_seed(seed, "labels"));
  std::vector<double> planted(d);
  for (double& w : planted) w = label_rng.normal();
  p.inputs_.resize(n * d);
  p.targets_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double score = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const double a = feature_rng.normal();
      p.inputs_[i * d + j] = a;
      score += a * planted[j];
    }
    double label = score >= 0 ? 1.0 : -1.0;
    if (label_rng.uniform01() < label_noise) label = -label;
    p.targets_[i] = label;
  }
  return p;
}

Problem Problem::mlp1(std::size_t n, std::size_t features, std::size_t hidden,
                      std::uint64_t seed, double l2_reg) {
  if (n == 0 || features == 0 || hidden == 0) {
    throw std::invalid_argument("mlp1 needs n, features, hidden >= 1");
  }
  if (!(l2_reg >= 0)) throw std::invalid_argument("l2_reg must be non-negative");
  Problem p(ProblemKind::kMlp1, BlockLayout::partition({hidden * features, hidden, hidden, 1}),
            l2_reg);
  p.num_samples_ = n;
  p.features_ = features;
  p.hidden_ = hidden;

  Rng input_rng(substream_seed(seed, "features"));
  Rng teacher_rng(substream_seed(seed, "teacher"));
  std::vector<double> teacher(p.dim());
  const double fan_in = 1 / std::sqrt(static_cast<double>(features));
  for (std::size_t i = 0; i < teacher.size(); ++i) {
    teacher[i] = teacher_rng.normal() * (i < hidden * features ? fan_in : 1.0);
  }
  p.inputs_.resize(n * features);
  for (double& a : p.inputs_) a = input_rng.normal();

  // Teacher forward pass produces the regression targets.
  p.targets_.assign(n, 0);
  std::vector<double> scratch(p.dim());
  for (std::size_t i = 0; i < n; ++i) {
    double loss = 0;
    std::fill(scratch.begin(), scratch.end(), 0.0);
    p.accumulate_sample(i, teacher, loss, scratch);
    // With a zero target, loss = yhat^2 / 2 and d loss / d b2 = yhat.
    p.targets_[i] = scratch.back() + 0.1 * teacher_rng.normal();
  }
  return p;
}

void Problem::accumulate_sample(std::size_t i, std::span<const double> x, double& loss,
                                std::span<double> grad) const {
  const std::size_t p = features_;
  const double* a = inputs_.data() + i * p;
  if (kind_ == ProblemKind::kLogisticRegression) {
    double score = 0;
    for (std::size_t j = 0; j < p; ++j) score += a[j] * x[j];
    const double z = -targets_[i] * score;
    loss += softplus(z);
    const double coeff = -targets_[i] * sigmoid(z);
    for (std::size_t j = 0; j < p; ++j) grad[j] += coeff * a[j];
    return;
  }

  // mlp1: x = [W1 (h x p, row-major) | b1 (h) | W2 (h) | b2].
  const std::size_t h = hidden_;
  const double* w1 = x.data();
  const double* b1 = w1 + h * p;
  const double* w2 = b1 + h;
  const double b2 = w2[h];
  std::vector<double> act(h);
  double yhat = b2;
  for (std::size_t k = 0; k < h; ++k) {
    double z = b1[k];
    for (std::size_t j = 0; j < p; ++j) z += w1[k * p + j] * a[j];
    act[k] = std::tanh(z);
    yhat += w2[k] * act[k];
  }
  const double err = yhat - targets_[i];
  loss += 0.5 * err * err;

  double* gw1 = grad.data();
  double* gb1 = gw1 + h * p;
  double* gw2 = gb1 + h;
  for (std::size_t k = 0; k < h; ++k) {
    gw2[k] += err * act[k];
    const double dz = err * w2[k] * (1 - act[k] * act[k]);
    gb1[k] += dz;
    for (std::size_t j = 0; j < p; ++j) gw1[k * p + j] += dz * a[j];
  }
  gw2[h] += err;
}

EvalResult Problem::eval(const BlockedVector& x) const {
  std::vector<std::size_t> all(num_samples_);
  std::iota(all.begin(), all.end(), std::size_t{0});
  return eval(x, all);
}

EvalResult Problem::eval(const BlockedVector& x, std::span<const std::size_t> samples) const {
  if (!(x.layout() == layout_)) {
    throw InvalidLayoutError("parameter layout does not match the problem");
  }
  const std::size_t d = dim();
  const auto xs = x.data();
  EvalResult out{0, BlockedVector::zeros(layout_)};
  auto g = out.grad.data();

  switch (kind_) {
    case ProblemKind::kQuadratic: {
      double quad = 0;
      double lin = 0;
      for (std::size_t i = 0; i < d; ++i) {
        double ax = 0;
        for (std::size_t j = 0; j < d; ++j) ax += matrix_[i * d + j] * xs[j];
        quad += xs[i] * ax;
        lin += vector_[i] * xs[i];
        g[i] = ax - vector_[i];
      }
      out.loss = 0.5 * quad - lin;
      break;
    }
    case ProblemKind::kRosenbrock: {
      for (std::size_t i = 0; i + 1 < d; ++i) {
        const double s = xs[i + 1] - xs[i] * xs[i];
        const double r = 1 - xs[i];
        out.loss += 100 * s * s + r * r;
        g[i] += -400 * xs[i] * s - 2 * r;
        g[i + 1] += 200 * s;
      }
      break;
    }
    case ProblemKind::kLogisticRegression:
    case ProblemKind::kMlp1: {
      if (samples.empty()) throw std::invalid_argument("empty sample set");
      for (std::size_t i : samples) {
        if (i >= num_samples_) {
          throw std::out_of_range("sample index " + std::to_string(i) + " >= n = " +
                                  std::to_string(num_samples_));
        }
      }
      double loss = 0;
      for (std::size_t i : samples) accumulate_sample(i, xs, loss, g);
      const auto count = static_cast<double>(samples.size());
      out.loss = loss / count;
      for (double& e : g) e /= count;
      break;
    }
  }

  if (l2_reg_ > 0) {
    double sq = 0;
    for (std::size_t i = 0; i < d; ++i) {
      sq += xs[i] * xs[i];
      g[i] += l2_reg_ * xs[i];
    }
    out.loss += 0.5 * l2_reg_ * sq;
  }
  return out;
}

std::optional<BlockedVector> Problem::initial_point() const {
  if (kind_ != ProblemKind::kRosenbrock) return std::nullopt;
  BlockedVector x(layout_);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = (i % 2 == 0) ? -1.2 : 1.0;
  return x;
}

ReferenceOptimum reference_optimum(const Problem& problem) {
  const std::size_t d = problem.dim();
  switch (problem.kind()) {
    case ProblemKind::kQuadratic: {
      std::vector<double> s = problem.quadratic_matrix();
      for (std::size_t i = 0; i < d; ++i) s[i * d + i] += problem.l2_reg();
      BlockedVector x(problem.layout(), cholesky_solve(std::move(s), problem.quadratic_vector()));
      const double f = problem.eval(x).loss;
      return {std::move(x), f};
    }
    case ProblemKind::kRosenbrock: {
      if (problem.l2_reg() != 0) {
        throw UnsupportedProblemError("regularized rosenbrock has no closed-form optimum");
      }
      BlockedVector x(problem.layout(), std::vector<double>(d, 1.0));
      return {std::move(x), 0.0};
    }
    case ProblemKind::kLogisticRegression: {
      if (!(problem.l2_reg() > 0)) {
        throw UnsupportedProblemError("logistic optimum is only certified with l2_reg > 0");
      }
      // Smoothness: L = lambda_max(A^T A / n) / 4 + l2_reg, lambda_max by power iteration.
      const std::size_t n = problem.num_samples();
      const auto& a = problem.inputs();
      std::vector<double> q(d, 1.0 / std::sqrt(static_cast<double>(d)));
      double lambda_max = 0;
      for (int it = 0; it < 500; ++it) {
        std::vector<double> aq(n, 0), next(d, 0);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < d; ++j) aq[i] += a[i * d + j] * q[j];
        }
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < d; ++j) next[j] += a[i * d + j] * aq[i];
        }
        double norm = 0;
        for (double& e : next) {
          e /= static_cast<double>(n);
          norm += e * e;
        }
        norm = std::sqrt(norm);
        lambda_max = norm;
        for (std::size_t j = 0; j < d; ++j) q[j] = next[j] / norm;
      }
      const double step = 1 / (1.05 * lambda_max / 4 + problem.l2_reg());

      BlockedVector x = BlockedVector::zeros(problem.layout());
      constexpr int kMaxIterations = 1'000'000;
      for (int it = 0; it < kMaxIterations; ++it) {
        EvalResult r = problem.eval(x);
        if (l2_norm(r.grad.data()) <= 1e-10) return {std::move(x), r.loss};
        for (std::size_t j = 0; j < d; ++j) x[j] -= step * r.grad[j];
      }
      throw std::runtime_error("logistic reference optimum did not reach ||grad|| <= 1e-10");
    }
    case ProblemKind::kMlp1:
      throw UnsupportedProblemError("mlp1 is non-convex; no certified optimum");
  }
  throw UnsupportedProblemError("unknown problem kind");
}

double finite_diff_check(const Problem& problem, const BlockedVector& x, double h) {
  if (!(h > 0)) throw std::invalid_argument("finite difference step must be positive");
  const EvalResult analytic = problem.eval(x);
  double worst = 0;
  BlockedVector probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + h;
    const double up = problem.eval(probe).loss;
    probe[i] = x[i] - h;
    const double down = problem.eval(probe).loss;
    probe[i] = x[i];
    const double central = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(analytic.grad[i] - central) / (std::abs(analytic.grad[i]) + h));
  }
  return worst;
}

}  // namespace blockopt
