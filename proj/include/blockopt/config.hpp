// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// JSON experiment configuration.
//
//   {
//     "problem":   {"kind": "logistic_regression", "d": 20, "n": 1000,
//                   "seed": 1, "l2_reg": 0.01, "blocks": [10, 10]},
//     "optimizer": {"name": "lans", "beta1": 0.9, "beta2": 0.999,
//                   "epsilon": 1e-6, "weight_decay": 0.01,
//                   "phi": {"kind": "identity"}, "normalize_grads": false,
//                   "zero_grad_policy": "zero_passthrough", "momentum": 0.9},
//     "schedule":  {"kind": "warmup_const_decay", "eta": 0.01,
//                   "ratio_warmup": 42.65, "ratio_const": 27.35},
//     "workers": 4, "local_batch": 25, "total_steps": 2000,
//     "seed": 0, "output": "runs/logistic_lans"
//   }
//
// Ratios are percentages of the stage's steps. "warmup_steps"/"const_steps"
// may be given instead of ratios. A two-stage run replaces "schedule" and
// "total_steps" with
//   "stages": [{"eta": 0.00675, "ratio_warmup": 42.65, "ratio_const": 27.35,
//               "steps": 3519}, ...]

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blockopt/optimizers.hpp"
#include "blockopt/problems.hpp"
#include "blockopt/schedule.hpp"

namespace blockopt {

enum class ScheduleKind { kWarmupDecay, kWarmupConstDecay };

struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::kWarmupConstDecay;
  double eta = 0.01;
  std::optional<double> ratio_warmup;  // percent
  std::optional<double> ratio_const;   // percent
  std::optional<std::int64_t> warmup_steps;
  std::optional<std::int64_t> const_steps;
};

struct StagePlan {
  StageSpec spec;
  std::int64_t steps = 0;
};

struct ExperimentConfig {
  ProblemSpec problem;
  OptimizerKind optimizer = OptimizerKind::kLans;
  OptimizerConfig optimizer_config;
  ScheduleSpec schedule;
  std::vector<StagePlan> stages;  // non-empty overrides schedule/total_steps
  std::size_t workers = 1;
  std::size_t local_batch = 1;
  std::int64_t total_steps = 100;
  std::uint64_t seed = 0;
  std::optional<std::uint64_t> shard_seed;  // defaults to a substream of seed
  bool parallel = false;
  std::string output;

  std::int64_t planned_steps() const;
  std::uint64_t resolved_shard_seed() const;
};

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws ConfigError on unknown names, wrong types or invalid values.
ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

/// Fully resolved echo with defaults filled in.
nlohmann::json to_json(const ExperimentConfig& config);

/// One (schedule, steps) pair per stage. Empty when no steps are planned.
std::vector<Schedule> resolve_schedules(const ExperimentConfig& config);

}  // namespace blockopt
