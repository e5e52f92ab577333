// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/sharding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "blockopt/random.hpp"

namespace blockopt {

ShardPlan make_shards(std::size_t n, std::size_t workers, std::uint64_t seed) {
  if (workers == 0 || workers > n) {
    throw InvalidPlanError("need 1 <= workers <= n (workers=" + std::to_string(workers) +
                           ", n=" + std::to_string(n) + ")");
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(seed);
  rng.shuffle(std::span<std::size_t>(order));

  ShardPlan plan;
  plan.n = n;
  plan.shards.resize(workers);
  const std::size_t base = n / workers;
  const std::size_t extra = n % workers;
  std::size_t begin = 0;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t len = base + (w < extra ? 1 : 0);
    plan.shards[w].assign(order.begin() + static_cast<std::ptrdiff_t>(begin),
                          order.begin() + static_cast<std::ptrdiff_t>(begin + len));
    begin += len;
  }
  return plan;
}

ShardSampler::ShardSampler(std::vector<std::size_t> shard, std::uint64_t seed)
    : shard_(std::move(shard)), seed_(seed) {
  if (shard_.empty()) throw InvalidPlanError("shard is empty");
  reshuffle();
}

ShardSampler ShardSampler::for_worker(const ShardPlan& plan, std::size_t worker,
                                      std::uint64_t seed) {
  return ShardSampler(plan.shards.at(worker),
                      substream_seed(seed, "worker" + std::to_string(worker)));
}

void ShardSampler::reshuffle() {
  permutation_ = shard_;
  Rng rng(seed_ ^ epoch_);
  rng.shuffle(std::span<std::size_t>(permutation_));
  cursor_ = 0;
}

std::vector<std::size_t> ShardSampler::next_minibatch(std::size_t local_k) {
  if (local_k == 0 || local_k > shard_.size()) {
    throw std::invalid_argument("local batch " + std::to_string(local_k) +
                                " must lie in [1, shard size " + std::to_string(shard_.size()) +
                                "]");
  }
  if (cursor_ + local_k > permutation_.size()) {
    ++epoch_;
    reshuffle();
  }
  const auto first = permutation_.begin() + static_cast<std::ptrdiff_t>(cursor_);
  std::vector<std::size_t> batch(first, first + static_cast<std::ptrdiff_t>(local_k));
  cursor_ += local_k;
  return batch;
}

BlockedVector aggregate_gradients(std::span<const BlockedVector> worker_grads) {
  if (worker_grads.empty()) throw std::invalid_argument("no worker gradients to aggregate");
  const BlockLayout& layout = worker_grads.front().layout();
  // Extended-precision running sum in worker order; W identical inputs sum
  // exactly, so their mean is the input itself.
  std::vector<long double> sum(layout.total_dim(), 0.0L);
  for (const auto& g : worker_grads) {
    if (!(g.layout() == layout)) {
      throw InvalidLayoutError("worker gradients have different block layouts");
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += g[i];
  }
  const auto count = static_cast<long double>(worker_grads.size());
  BlockedVector mean(layout);
  for (std::size_t i = 0; i < sum.size(); ++i) mean[i] = static_cast<double>(sum[i] / count);
  return mean;
}

std::string_view to_string(SamplingScheme scheme) {
  return scheme == SamplingScheme::kWithReplacement ? "with_replacement"
                                                     : "without_replacement";
}

namespace {

struct PerSampleGradients {
  std::size_t n = 0;
  std::size_t d = 0;
  std::vector<double> rows;  // n x d
  std::vector<double> full;  // mean of all rows in index order
};

PerSampleGradients per_sample_gradients(const Problem& problem, const BlockedVector& x) {
  if (!problem.is_stochastic()) {
    throw std::invalid_argument("variance study needs a problem with samples");
  }
  PerSampleGradients out;
  out.n = problem.num_samples();
  out.d = problem.dim();
  out.rows.resize(out.n * out.d);
  for (std::size_t i = 0; i < out.n; ++i) {
    const std::size_t idx[] = {i};
    const EvalResult r = problem.eval(x, idx);
    std::copy(r.grad.data().begin(), r.grad.data().end(),
              out.rows.begin() + static_cast<std::ptrdiff_t>(i * out.d));
  }
  std::vector<std::size_t> all(out.n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  out.full.assign(out.d, 0);
  for (std::size_t i : all) {
    for (std::size_t j = 0; j < out.d; ++j) out.full[j] += out.rows[i * out.d + j];
  }
  for (double& e : out.full) e /= static_cast<double>(out.n);
  return out;
}

// ||mean(rows[batch]) - full||^2 with the batch summed in ascending order.
double squared_deviation(const PerSampleGradients& psg, std::vector<std::size_t>& batch,
                         std::vector<double>& scratch) {
  std::sort(batch.begin(), batch.end());
  std::fill(scratch.begin(), scratch.end(), 0.0);
  for (std::size_t i : batch) {
    for (std::size_t j = 0; j < psg.d; ++j) scratch[j] += psg.rows[i * psg.d + j];
  }
  double sq = 0;
  for (std::size_t j = 0; j < psg.d; ++j) {
    const double diff = scratch[j] / static_cast<double>(batch.size()) - psg.full[j];
    sq += diff * diff;
  }
  return sq;
}

VarianceReport summarize(SamplingScheme scheme, std::size_t k,
                         const std::vector<double>& samples) {
  VarianceReport report;
  report.scheme = scheme;
  report.k = k;
  report.trials = samples.size();
  double mean = 0;
  for (double s : samples) mean += s;
  mean /= static_cast<double>(samples.size());
  double var = 0;
  for (double s : samples) var += (s - mean) * (s - mean);
  if (samples.size() > 1) var /= static_cast<double>(samples.size() - 1);
  report.variance = mean;
  report.standard_error = std::sqrt(var / static_cast<double>(samples.size()));
  return report;
}

}  // namespace

VarianceReport estimate_gradient_variance(const Problem& problem, const BlockedVector& x,
                                          std::size_t k, SamplingScheme scheme,
                                          std::size_t trials, std::uint64_t seed) {
  if (k == 0 || trials == 0) throw std::invalid_argument("k and trials must be >= 1");
  const PerSampleGradients psg = per_sample_gradients(problem, x);
  if (scheme == SamplingScheme::kWithoutReplacement && k > psg.n) {
    throw std::invalid_argument("k = " + std::to_string(k) + " exceeds n = " +
                                std::to_string(psg.n) + " without replacement");
  }

  Rng rng(seed);
  std::vector<std::size_t> pool(psg.n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  std::vector<std::size_t> batch(k);
  std::vector<double> scratch(psg.d);
  std::vector<double> samples;
  samples.reserve(trials);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    if (scheme == SamplingScheme::kWithReplacement) {
      for (auto& i : batch) i = static_cast<std::size_t>(rng.below(psg.n));
    } else {
      // Partial Fisher-Yates: the first k slots become a uniform k-subset.
      for (std::size_t j = 0; j < k; ++j) {
        const std::size_t pick = j + static_cast<std::size_t>(rng.below(psg.n - j));
        std::swap(pool[j], pool[pick]);
        batch[j] = pool[j];
      }
    }
    samples.push_back(squared_deviation(psg, batch, scratch));
  }
  return summarize(scheme, k, samples);
}

VarianceReport estimate_sharded_variance(const Problem& problem, const BlockedVector& x,
                                         std::size_t k, std::size_t workers, std::size_t trials,
                                         std::uint64_t seed) {
  if (k == 0 || trials == 0 || workers == 0 || k % workers != 0) {
    throw std::invalid_argument("sharded study needs k a positive multiple of workers");
  }
  const PerSampleGradients psg = per_sample_gradients(problem, x);
  const ShardPlan plan = make_shards(psg.n, workers, substream_seed(seed, "plan"));
  const std::size_t local_k = k / workers;
  for (const auto& shard : plan.shards) {
    if (local_k > shard.size()) throw std::invalid_argument("k / workers exceeds a shard");
  }

  Rng rng(substream_seed(seed, "draws"));
  std::vector<std::vector<std::size_t>> pools = plan.shards;
  std::vector<std::size_t> batch;
  std::vector<double> scratch(psg.d);
  std::vector<double> samples;
  samples.reserve(trials);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    batch.clear();
    for (auto& pool : pools) {
      for (std::size_t j = 0; j < local_k; ++j) {
        const std::size_t pick = j + static_cast<std::size_t>(rng.below(pool.size() - j));
        std::swap(pool[j], pool[pick]);
        batch.push_back(pool[j]);
      }
    }
    samples.push_back(squared_deviation(psg, batch, scratch));
  }
  return summarize(SamplingScheme::kWithoutReplacement, k, samples);
}

}  // namespace blockopt
