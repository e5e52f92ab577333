// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include <fmt/format.h>

#include "blockopt/problems.hpp"
#include "blockopt/random.hpp"
#include "blockopt/schedule.hpp"
#include "blockopt/sharding.hpp"

namespace blockopt {
namespace {

BlockedVector initial_params(const Problem& problem, std::uint64_t seed) {
  if (auto x = problem.initial_point()) return *x;
  BlockedVector x(problem.layout());
  Rng rng(substream_seed(seed, "init"));
  for (double& e : x.data()) e = rng.uniform(-0.1, 0.1);
  return x;
}

struct BatchEval {
  double loss = 0;
  BlockedVector grad;
};

class BatchSource {
 public:
  BatchSource(const Problem& problem, const ExperimentConfig& config)
      : problem_(problem), local_batch_(config.local_batch), parallel_(config.parallel) {
    if (!problem.is_stochastic()) return;
    const ShardPlan plan = make_shards(problem.num_samples(), config.workers,
                                       config.resolved_shard_seed());
    const std::uint64_t sampler_seed = substream_seed(config.seed, "sampler");
    for (std::size_t w = 0; w < plan.num_workers(); ++w) {
      if (config.local_batch > plan.shards[w].size()) {
        throw ConfigError(fmt::format("local_batch {} exceeds shard {} of size {}",
                                      config.local_batch, w, plan.shards[w].size()));
      }
      samplers_.push_back(ShardSampler::for_worker(plan, w, sampler_seed));
    }
  }

  BatchEval next(const BlockedVector& x) {
    if (samplers_.empty()) {
      EvalResult r = problem_.eval(x);
      return {r.loss, std::move(r.grad)};
    }
    const std::size_t workers = samplers_.size();
    std::vector<std::vector<std::size_t>> batches;
    batches.reserve(workers);
    for (auto& s : samplers_) batches.push_back(s.next_minibatch(local_batch_));

    std::vector<EvalResult> results(workers);
    auto eval_worker = [&](std::size_t w) { results[w] = problem_.eval(x, batches[w]); };
    if (parallel_ && workers > 1) {
      std::vector<std::jthread> threads;
      for (std::size_t w = 0; w < workers; ++w) threads.emplace_back(eval_worker, w);
    } else {
      for (std::size_t w = 0; w < workers; ++w) eval_worker(w);
    }

    // Fixed worker order for both the loss and the gradient mean.
    std::vector<BlockedVector> grads;
    grads.reserve(workers);
    double loss = 0;
    for (auto& r : results) {
      loss += r.loss;
      grads.push_back(std::move(r.grad));
    }
    return {loss / static_cast<double>(workers), aggregate_gradients(grads)};
  }

 private:
  const Problem& problem_;
  std::size_t local_batch_;
  bool parallel_;
  std::vector<ShardSampler> samplers_;
};

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ';';
    out += fmt::format("{:.17g}", values[i]);
  }
  return out;
}

nlohmann::json number_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options) {
  const auto started = std::chrono::steady_clock::now();
  const Problem problem = Problem::from_spec(config.problem);
  config.optimizer_config.validate(problem.layout().num_blocks());
  const std::vector<Schedule> schedules = resolve_schedules(config);

  RunResult result;
  result.initial_params = initial_params(problem, config.seed);
  result.final_params = result.initial_params;
  std::optional<BlockedVector> x_star;
  if (options.compute_reference) {
    try {
      ReferenceOptimum opt = reference_optimum(problem);
      result.f_star = opt.f;
      x_star = std::move(opt.x);
    } catch (const UnsupportedProblemError&) {
      result.f_star = std::nullopt;
    }
  }

  BatchSource batches(problem, config);
  const Execution exec = config.parallel ? Execution::kParallel : Execution::kSequential;
  BlockedVector& params = result.final_params;
  OptimizerState state = OptimizerState::zeros(problem.layout());
  std::int64_t step = 0;

  for (const Schedule& schedule : schedules) {
    for (std::int64_t t = 1; t <= schedule.total_steps() && !result.diverged; ++t) {
      BatchEval batch = batches.next(params);
      if (!std::isfinite(batch.loss) || !all_finite(batch.grad.data())) {
        result.diverged = true;
        result.divergence_reason = fmt::format("non-finite loss or gradient at step {}", step + 1);
        break;
      }
      const double lr = schedule.rate(t);
      const BlockedVector before = params;
      StepReport report =
          apply_step(config.optimizer, params, state, batch.grad, lr, config.optimizer_config, exec);
      if (!all_finite(params.data())) {
        params = before;
        result.diverged = true;
        result.divergence_reason = fmt::format("non-finite parameters after step {}", step + 1);
        break;
      }
      ++step;
      result.rows.push_back({step, lr, batch.loss, l2_norm(batch.grad.data()),
                             std::move(report.update_norms), std::move(report.trust_ratios)});
    }
    if (result.diverged) break;
  }

  result.steps_completed = step;
  result.final_loss =
      result.diverged ? std::numeric_limits<double>::quiet_NaN() : problem.eval(params).loss;
  if (!std::isfinite(result.final_loss) && !result.diverged) {
    result.diverged = true;
    result.divergence_reason = "non-finite final loss";
  }
  if (x_star && !result.diverged) {
    std::vector<double> diff(params.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = params[i] - (*x_star)[i];
    result.distance_to_optimum = l2_norm(diff);
  }
  result.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return result;
}

std::string metrics_csv(const std::vector<MetricsRow>& rows) {
  std::string out = kMetricsHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += fmt::format("{},{:.17g},{:.17g},{:.17g},{},{}\n", r.step, r.learning_rate, r.loss,
                       r.grad_norm, join(r.block_update_norms), join(r.block_trust_ratios));
  }
  return out;
}

nlohmann::json summary_json(const RunResult& result) {
  nlohmann::json j;
  j["final_loss"] = number_or_null(result.final_loss);
  j["f_star"] = result.f_star ? number_or_null(*result.f_star) : nlohmann::json(nullptr);
  const auto gap = result.f_star_gap();
  j["f_star_gap"] = gap ? number_or_null(*gap) : nlohmann::json(nullptr);
  j["distance_to_optimum"] = result.distance_to_optimum
                                  ? number_or_null(*result.distance_to_optimum)
                                  : nlohmann::json(nullptr);
  j["diverged"] = result.diverged;
  if (result.diverged) j["divergence_reason"] = result.divergence_reason;
  j["steps_completed"] = result.steps_completed;
  j["wall_seconds"] = result.wall_seconds;
  j["final_params"] = result.final_params.values();
  return j;
}

void write_run_outputs(const RunResult& result, const ExperimentConfig& config,
                       const std::string& base_path) {
  const std::filesystem::path base(base_path);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  auto write = [&](const std::string& suffix, const std::string& text) {
    std::ofstream out(base_path + suffix, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + base_path + suffix);
    out << text;
  };
  write(".csv", metrics_csv(result.rows));
  write(".config.json", to_json(config).dump(2) + "\n");
  write(".summary.json", summary_json(result).dump(2) + "\n");
}

std::vector<ScalingRow> batch_scaling_study(const ExperimentConfig& config,
                                            const std::vector<std::size_t>& global_batches) {
  if (global_batches.empty()) throw std::invalid_argument("batch list must not be empty");
  const double reference_batch = static_cast<double>(config.workers * config.local_batch);

  std::vector<ScalingRow> rows;
  for (std::size_t batch : global_batches) {
    if (batch == 0 || batch % config.workers != 0) {
      throw std::invalid_argument(
          fmt::format("global batch {} is not a multiple of {} workers", batch, config.workers));
    }
    for (OptimizerKind kind : {OptimizerKind::kLamb, OptimizerKind::kLans}) {
      for (ScheduleKind sched : {ScheduleKind::kWarmupDecay, ScheduleKind::kWarmupConstDecay}) {
        ExperimentConfig c = config;
        c.optimizer = kind;
        c.local_batch = batch / config.workers;
        const double scale =
            sqrt_scale_lr(1.0, reference_batch, static_cast<double>(batch));
        c.schedule.kind = sched;
        c.schedule.eta = config.schedule.eta * scale;
        if (sched == ScheduleKind::kWarmupDecay) {
          c.schedule.ratio_const.reset();
          c.schedule.const_steps.reset();
        }
        for (auto& stage : c.stages) {
          stage.spec.eta *= scale;
          if (sched == ScheduleKind::kWarmupDecay) stage.spec.ratio_const = 0;
        }
        const RunResult r = run_experiment(c, RunOptions{.compute_reference = false});
        rows.push_back({batch, kind, sched,
                        c.stages.empty() ? c.schedule.eta : c.stages.front().spec.eta,
                        r.final_loss, r.diverged});
      }
    }
  }
  return rows;
}

std::string scaling_csv(const std::vector<ScalingRow>& rows) {
  std::string out = "global_batch,optimizer,schedule,eta,final_loss,diverged\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{:.17g},{:.17g},{}\n", r.global_batch, to_string(r.optimizer),
                       r.schedule == ScheduleKind::kWarmupDecay ? "warmup_decay"
                                                                : "warmup_const_decay",
                       r.eta, r.final_loss, r.diverged ? 1 : 0);
  }
  return out;
}

}  // namespace blockopt
