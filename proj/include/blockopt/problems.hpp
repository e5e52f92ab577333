// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Small differentiable objectives with hand-written gradients:
//
//   F(x) = mean_{i in S} f(x, xi_i) + l2_reg / 2 * ||x||^2
//
// Quadratic and Rosenbrock are deterministic (no samples; any sample set
// passed to eval is ignored). Logistic regression and the one-hidden-layer
// tanh MLP carry a seeded synthetic dataset.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "blockopt/blocks.hpp"

namespace blockopt {

enum class ProblemKind { kQuadratic, kRosenbrock, kLogisticRegression, kMlp1 };

std::string_view to_string(ProblemKind kind);
std::optional<ProblemKind> parse_problem_kind(std::string_view name);

class UnsupportedProblemError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct ProblemSpec {
  ProblemKind kind = ProblemKind::kQuadratic;
  // Parameter dimension, except for mlp1 where it is the input feature count.
  std::size_t d = 10;
  std::size_t n = 200;  // samples, stochastic kinds only
  std::uint64_t seed = 0;
  double l2_reg = 0;
  std::size_t hidden = 8;  // mlp1 only
  double label_noise = 0.1;  // logistic only
  // Optional block sizes; must sum to the parameter dimension. mlp1 always
  // uses {W1, b1, W2, b2}.
  std::vector<std::size_t> blocks;
};

struct EvalResult {
  double loss = 0;
  BlockedVector grad;
};

class Problem {
 public:
  static Problem from_spec(const ProblemSpec& spec);

  /// 1/2 x^T A x - b^T x with A symmetric positive definite (row-major, d x d).
  static Problem quadratic(std::vector<double> a, std::vector<double> b, double l2_reg = 0,
                           std::vector<std::size_t> blocks = {});
  static Problem rosenbrock(std::size_t d, double l2_reg = 0,
                            std::vector<std::size_t> blocks = {});
  /// Standard-normal features, labels +-1 from a planted weight vector with
  /// a fraction label_noise flipped.
  static Problem logistic_regression(std::size_t n, std::size_t d, std::uint64_t seed,
                                     double l2_reg, double label_noise = 0.1,
                                     std::vector<std::size_t> blocks = {});
  /// Squared-error regression with one tanh hidden layer against a planted
  /// teacher network of the same shape plus noise.
  static Problem mlp1(std::size_t n, std::size_t features, std::size_t hidden,
                      std::uint64_t seed, double l2_reg);

  ProblemKind kind() const { return kind_; }
  std::size_t dim() const { return layout_.total_dim(); }
  const BlockLayout& layout() const { return layout_; }
  double l2_reg() const { return l2_reg_; }
  bool is_stochastic() const { return num_samples_ > 0; }
  std::size_t num_samples() const { return num_samples_; }

  /// Full objective (all samples in index order).
  EvalResult eval(const BlockedVector& x) const;
  /// Objective over the given samples. Throws std::out_of_range for a bad
  /// index and std::invalid_argument for an empty set on a stochastic problem.
  EvalResult eval(const BlockedVector& x, std::span<const std::size_t> samples) const;

  /// Problem-supplied starting point, if any (Rosenbrock's (-1.2, 1, ...)).
  std::optional<BlockedVector> initial_point() const;

  // Exposed for the reference optimum solvers.
  const std::vector<double>& quadratic_matrix() const { return matrix_; }
  const std::vector<double>& quadratic_vector() const { return vector_; }
  const std::vector<double>& inputs() const { return inputs_; }
  std::size_t features() const { return features_; }

 private:
  Problem(ProblemKind kind, BlockLayout layout, double l2_reg)
      : kind_(kind), layout_(std::move(layout)), l2_reg_(l2_reg) {}

  void accumulate_sample(std::size_t i, std::span<const double> x, double& loss,
                         std::span<double> grad) const;

  ProblemKind kind_;
  BlockLayout layout_;
  double l2_reg_;
  std::size_t num_samples_ = 0;
  std::size_t features_ = 0;
  std::size_t hidden_ = 0;
  std::vector<double> matrix_;  // quadratic A
  std::vector<double> vector_;  // quadratic b
  std::vector<double> inputs_;  // n x features, row-major
  std::vector<double> targets_;
};

struct ReferenceOptimum {
  BlockedVector x;
  double f = 0;
};

/// Certified minimizer: closed form for the quadratic, the all-ones point for
/// unregularized Rosenbrock, and full-batch gradient descent to
/// ||grad|| <= 1e-10 for regularized logistic regression. Throws
/// UnsupportedProblemError for mlp1 and other uncertifiable setups.
ReferenceOptimum reference_optimum(const Problem& problem);

/// max_i |analytic_i - central_i| / (|analytic_i| + h) over the full objective.
double finite_diff_check(const Problem& problem, const BlockedVector& x, double h);

}  // namespace blockopt
