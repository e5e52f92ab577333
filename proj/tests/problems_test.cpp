// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/problems.hpp"

#include <cmath>
#include <limits>
#include <thread>
#include <vector>

#include <gtest/gtest.h>

#include "blockopt/random.hpp"

namespace blockopt {
namespace {

BlockedVector random_point(const Problem& p, std::uint64_t seed, double radius = 1.0) {
  BlockedVector x(p.layout());
  Rng rng(seed);
  for (double& e : x.data()) e = rng.uniform(-radius, radius);
  return x;
}

Problem quadratic(std::size_t d, std::uint64_t seed, double l2) {
  ProblemSpec spec;
  spec.d = d;
  spec.seed = seed;
  spec.l2_reg = l2;
  return Problem::from_spec(spec);
}

std::vector<double> identity(std::size_t d) {
  std::vector<double> a(d * d, 0.0);
  for (std::size_t i = 0; i < d; ++i) a[i * d + i] = 1.0;
  return a;
}

TEST(QuadraticTest, StationaryAtB) {
  const std::vector<double> b{1, -2, 0.5};
  const auto p = Problem::quadratic(identity(3), b);
  const auto r = p.eval(BlockedVector(p.layout(), b));
  for (double g : r.grad.data()) EXPECT_EQ(g, 0.0);
  EXPECT_DOUBLE_EQ(r.loss, -0.5 * (1 + 4 + 0.25));
}

TEST(QuadraticTest, ReferenceOptimumIdentity) {
  const std::vector<double> b{3, 1, -4, 1, 5};
  const auto opt = reference_optimum(Problem::quadratic(identity(5), b));
  for (std::size_t i = 0; i < b.size(); ++i) EXPECT_NEAR(opt.x[i], b[i], 1e-15);
}

TEST(QuadraticTest, ReferenceOptimumIsStationary) {
  ProblemSpec spec;
  spec.d = 12;
  spec.seed = 4;
  spec.l2_reg = 0.1;
  spec.blocks = {5, 7};
  const auto p = Problem::from_spec(spec);
  EXPECT_EQ(p.layout().num_blocks(), 2u);
  const auto opt = reference_optimum(p);
  const auto r = p.eval(opt.x);
  EXPECT_LT(l2_norm(r.grad.data()), 1e-12);
  EXPECT_DOUBLE_EQ(r.loss, opt.f);
}

TEST(QuadraticTest, FiniteDifferenceIsExact) {
  const auto p = quadratic(10, 1, 0.0);
  EXPECT_LT(finite_diff_check(p, random_point(p, 2), 1e-5), 1e-8);
}

TEST(RosenbrockTest, Minimizer) {
  const auto p = Problem::rosenbrock(2);
  const auto r = p.eval(BlockedVector(p.layout(), {1, 1}));
  EXPECT_EQ(r.loss, 0.0);
  EXPECT_EQ(r.grad.values(), (std::vector<double>{0, 0}));
  const auto opt = reference_optimum(p);
  EXPECT_EQ(opt.x.values(), (std::vector<double>{1, 1}));
  EXPECT_EQ(opt.f, 0.0);
}

TEST(RosenbrockTest, ClassicValue) {
  const auto p = Problem::rosenbrock(2);
  const auto r = p.eval(BlockedVector(p.layout(), {-1.2, 1}));
  // 100 (1 - 1.44)^2 + (2.2)^2
  EXPECT_DOUBLE_EQ(r.loss, 100 * 0.44 * 0.44 + 2.2 * 2.2);
  EXPECT_EQ(p.initial_point()->values(), (std::vector<double>{-1.2, 1}));
}

TEST(RosenbrockTest, FiniteDifference) {
  const auto p = Problem::rosenbrock(6);
  EXPECT_LT(finite_diff_check(p, random_point(p, 3), 1e-6), 1e-5);
}

TEST(RosenbrockTest, RegularizedOptimumUnsupported) {
  EXPECT_THROW(reference_optimum(Problem::rosenbrock(3, 0.1)), UnsupportedProblemError);
}

TEST(LogisticTest, FiniteDifference) {
  const auto p = Problem::logistic_regression(200, 10, 5, 0.01);
  EXPECT_LT(finite_diff_check(p, random_point(p, 4), 1e-6), 1e-5);
}

TEST(LogisticTest, ReferenceOptimumCertified) {
  const auto p = Problem::logistic_regression(200, 10, 5, 0.01);
  const auto opt = reference_optimum(p);
  EXPECT_LE(l2_norm(p.eval(opt.x).grad.data()), 1e-10);
  // Any other point is no better.
  for (std::uint64_t s = 0; s < 5; ++s) {
    EXPECT_GE(p.eval(random_point(p, s, 0.5)).loss, opt.f);
  }
  EXPECT_THROW(reference_optimum(Problem::logistic_regression(50, 3, 1, 0.0)),
               UnsupportedProblemError);
}

TEST(LogisticTest, SeededDataIsReproducible) {
  const auto a = Problem::logistic_regression(30, 4, 9, 0.0);
  const auto b = Problem::logistic_regression(30, 4, 9, 0.0);
  const auto c = Problem::logistic_regression(30, 4, 10, 0.0);
  EXPECT_EQ(a.inputs(), b.inputs());
  EXPECT_NE(a.inputs(), c.inputs());
  const auto x = random_point(a, 1);
  EXPECT_EQ(a.eval(x).loss, b.eval(x).loss);
}

TEST(LogisticTest, LossAtZeroIsLogTwo) {
  const auto p = Problem::logistic_regression(40, 3, 2, 0.0);
  EXPECT_NEAR(p.eval(BlockedVector(p.layout())).loss, std::log(2.0), 1e-15);
}

TEST(Mlp1Test, LayoutAndFiniteDifference) {
  const auto p = Problem::mlp1(50, 3, 8, 7, 0.0);
  EXPECT_EQ(p.layout().sizes(), (std::vector<std::size_t>{24, 8, 8, 1}));
  EXPECT_LT(finite_diff_check(p, random_point(p, 5), 1e-6), 1e-4);
  EXPECT_THROW(reference_optimum(p), UnsupportedProblemError);
}

TEST(ProblemPropertyTest, GradientChecksAllKinds) {
  for (auto kind : {ProblemKind::kQuadratic, ProblemKind::kRosenbrock,
                    ProblemKind::kLogisticRegression, ProblemKind::kMlp1}) {
    ProblemSpec spec;
    spec.kind = kind;
    spec.d = 6;
    spec.n = 60;
    spec.seed = 11;
    spec.l2_reg = 0.01;
    const auto p = Problem::from_spec(spec);
    for (std::uint64_t s = 0; s < 20; ++s) {
      EXPECT_LT(finite_diff_check(p, random_point(p, 100 + s), 1e-6), 1e-4)
          << to_string(kind) << " point " << s;
    }
  }
}

TEST(ProblemPropertyTest, StochasticConsistency) {
  for (const auto& p : {Problem::logistic_regression(64, 5, 3, 0.0), Problem::mlp1(40, 3, 4, 3, 0.0)}) {
    const auto x = random_point(p, 8);
    const auto full = p.eval(x).grad;
    std::vector<double> sum(full.size(), 0.0);
    std::vector<double> abs_sum(full.size(), 0.0);
    for (std::size_t i = 0; i < p.num_samples(); ++i) {
      const std::vector<std::size_t> one{i};
      const auto g = p.eval(x, one).grad;
      for (std::size_t j = 0; j < g.size(); ++j) {
        sum[j] += g[j];
        abs_sum[j] += std::abs(g[j]);
      }
    }
    const double n = static_cast<double>(p.num_samples());
    for (std::size_t j = 0; j < full.size(); ++j) {
      EXPECT_LE(std::abs(sum[j] / n - full[j]),
                8 * std::numeric_limits<double>::epsilon() * abs_sum[j] / n)
          << to_string(p.kind()) << " coordinate " << j;
    }
  }
}

TEST(ProblemPropertyTest, RegularizerAdditivity) {
  const double lambda = 0.03;
  std::vector<std::pair<Problem, Problem>> pairs;
  pairs.emplace_back(quadratic(8, 2, 0.0),
                     quadratic(8, 2, lambda));
  pairs.emplace_back(Problem::rosenbrock(5, 0.0), Problem::rosenbrock(5, lambda));
  pairs.emplace_back(Problem::logistic_regression(50, 4, 1, 0.0),
                     Problem::logistic_regression(50, 4, 1, lambda));
  pairs.emplace_back(Problem::mlp1(30, 2, 3, 1, 0.0), Problem::mlp1(30, 2, 3, 1, lambda));
  for (const auto& [plain, reg] : pairs) {
    const auto x = random_point(plain, 21);
    const auto a = plain.eval(x);
    const auto b = reg.eval(x);
    double sq = 0;
    for (double e : x.data()) sq += e * e;
    EXPECT_NEAR(b.loss - a.loss, lambda / 2 * sq,
                4 * std::numeric_limits<double>::epsilon() * std::abs(b.loss))
        << to_string(plain.kind());
    for (std::size_t i = 0; i < x.size(); ++i) {
      EXPECT_DOUBLE_EQ(b.grad[i], a.grad[i] + lambda * x[i]);
    }
  }
}

TEST(ProblemPropertyTest, ConcurrentEvalMatchesSequential) {
  const auto p = Problem::logistic_regression(400, 6, 2, 0.01);
  const auto x = random_point(p, 1);
  std::vector<std::vector<std::size_t>> sets(4);
  for (std::size_t i = 0; i < 400; ++i) sets[i % 4].push_back(i);
  std::vector<EvalResult> seq(4), par(4);
  for (std::size_t w = 0; w < 4; ++w) seq[w] = p.eval(x, sets[w]);
  {
    std::vector<std::jthread> threads;
    for (std::size_t w = 0; w < 4; ++w) threads.emplace_back([&, w] { par[w] = p.eval(x, sets[w]); });
  }
  for (std::size_t w = 0; w < 4; ++w) {
    EXPECT_EQ(seq[w].loss, par[w].loss);
    EXPECT_EQ(seq[w].grad, par[w].grad);
  }
}

TEST(ProblemErrorTest, EvalErrors) {
  const auto p = Problem::logistic_regression(10, 3, 1, 0.0);
  const auto x = random_point(p, 1);
  const std::vector<std::size_t> empty;
  const std::vector<std::size_t> bad{3, 10};
  EXPECT_THROW(p.eval(x, empty), std::invalid_argument);
  EXPECT_THROW(p.eval(x, bad), std::out_of_range);
  EXPECT_THROW(p.eval(BlockedVector(BlockLayout::partition({2}))), InvalidLayoutError);
  EXPECT_THROW(Problem::rosenbrock(1), std::invalid_argument);
  EXPECT_THROW(Problem::quadratic({1, 2, 3}, {1, 2}), std::invalid_argument);
  EXPECT_THROW(Problem::logistic_regression(10, 3, 1, -1.0), std::invalid_argument);
  EXPECT_THROW(Problem::rosenbrock(4, 0, {2, 3}), InvalidLayoutError);
}

TEST(ProblemErrorTest, DeterministicKindsIgnoreSamples) {
  const auto p = Problem::rosenbrock(3);
  const auto x = random_point(p, 2);
  const std::vector<std::size_t> some{0, 5, 9};
  EXPECT_EQ(p.eval(x).loss, p.eval(x, some).loss);
  EXPECT_FALSE(p.is_stochastic());
}

TEST(ProblemKindTest, RoundTrip) {
  for (auto kind : {ProblemKind::kQuadratic, ProblemKind::kRosenbrock,
                    ProblemKind::kLogisticRegression, ProblemKind::kMlp1}) {
    EXPECT_EQ(parse_problem_kind(to_string(kind)), kind);
  }
  EXPECT_FALSE(parse_problem_kind("bert").has_value());
}

}  // namespace
}  // namespace blockopt
