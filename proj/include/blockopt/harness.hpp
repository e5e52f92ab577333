// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Experiment driver: problem + sharded sampling + optimizer + schedule.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockopt/blocks.hpp"
#include "blockopt/config.hpp"
#include "blockopt/optimizers.hpp"

namespace blockopt {

struct MetricsRow {
  std::int64_t step = 0;
  double learning_rate = 0;
  double loss = 0;
  double grad_norm = 0;
  std::vector<double> block_update_norms;
  std::vector<double> block_trust_ratios;
};

struct RunResult {
  std::vector<MetricsRow> rows;
  BlockedVector initial_params;
  BlockedVector final_params;  // last finite iterate
  double final_loss = 0;       // full objective at final_params
  std::optional<double> f_star;
  std::optional<double> distance_to_optimum;  // ||final_params - x*||
  bool diverged = false;
  std::string divergence_reason;
  std::int64_t steps_completed = 0;
  double wall_seconds = 0;

  std::optional<double> f_star_gap() const {
    if (!f_star || diverged) return std::nullopt;
    return final_loss - *f_star;
  }
};

struct RunOptions {
  // Solve for the reference optimum (when the problem admits one) so the
  // summary can report f_star_gap.
  bool compute_reference = true;
};

/// Runs the configured number of steps. Batches come from per-worker shard
/// samplers, gradients are averaged in worker order, and each step's rate
/// comes from the stage schedule. A non-finite loss, gradient or iterate
/// stops the run with diverged = true; it is not an exception.
RunResult run_experiment(const ExperimentConfig& config, const RunOptions& options = {});

inline constexpr const char* kMetricsHeader =
    "step,lr,loss,grad_norm,block_update_norms,block_trust_ratios";

/// Metrics CSV; per-block lists are ';'-separated, numbers use %.17g.
std::string metrics_csv(const std::vector<MetricsRow>& rows);

nlohmann::json summary_json(const RunResult& result);

/// Writes <base>.csv, <base>.config.json and <base>.summary.json, creating
/// parent directories as needed.
void write_run_outputs(const RunResult& result, const ExperimentConfig& config,
                       const std::string& base_path);

struct ScalingRow {
  std::size_t global_batch = 0;
  OptimizerKind optimizer = OptimizerKind::kLans;
  ScheduleKind schedule = ScheduleKind::kWarmupConstDecay;
  double eta = 0;
  double final_loss = 0;
  bool diverged = false;
};

/// For every global batch size, runs LAMB and LANS under both the
/// warmup-decay and warmup-constant-decay schedules with the peak rate
/// square-root scaled from the config's own global batch. Workers stay as
/// configured; each batch size must be a multiple of the worker count.
std::vector<ScalingRow> batch_scaling_study(const ExperimentConfig& config,
                                            const std::vector<std::size_t>& global_batches);

std::string scaling_csv(const std::vector<ScalingRow>& rows);

}  // namespace blockopt
