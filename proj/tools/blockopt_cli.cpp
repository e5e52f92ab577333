// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// blockopt command line: run experiments and the built-in checks.
//
// Exit status: 0 success, 1 usage or config error, 2 a check failed,
// 3 the run diverged.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "blockopt/config.hpp"
#include "blockopt/harness.hpp"
#include "blockopt/oracle_compare.hpp"
#include "blockopt/problems.hpp"
#include "blockopt/random.hpp"
#include "blockopt/schedule.hpp"
#include "blockopt/sharding.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitCheckFailed = 2;
constexpr int kExitDiverged = 3;

// Reference schedule: T = 3519, T_warmup = 1500, T_const = 963.
constexpr std::int64_t kFigTotal = 3519;
constexpr std::int64_t kFigWarmup = 1500;
constexpr std::int64_t kFigConst = 963;

int cmd_run(const std::string& config_path, const std::string& output_override) {
  const blockopt::ExperimentConfig config = blockopt::load_config(config_path);
  std::string base = output_override.empty() ? config.output : output_override;
  if (base.empty()) base = std::filesystem::path(config_path).replace_extension().string();

  const blockopt::RunResult result = blockopt::run_experiment(config);
  blockopt::write_run_outputs(result, config, base);

  std::cout << fmt::format("steps={} final_loss={:.10g}", result.steps_completed,
                           result.final_loss);
  if (const auto gap = result.f_star_gap()) std::cout << fmt::format(" f_star_gap={:.3e}", *gap);
  std::cout << fmt::format(" diverged={} wall={:.3f}s\n", result.diverged, result.wall_seconds);
  std::cout << "wrote " << base << ".{csv,config.json,summary.json}\n";
  if (result.diverged) {
    std::cerr << "diverged: " << result.divergence_reason << "\n";
    return kExitDiverged;
  }
  return kExitOk;
}

int cmd_schedule_check() {
  using blockopt::Schedule;
  const double decay_high = blockopt::schedule_area(Schedule::warmup_decay(0.01, kFigTotal, kFigWarmup));
  const double decay_low = blockopt::schedule_area(Schedule::warmup_decay(0.007, kFigTotal, kFigWarmup));
  const double plateau_low =
      blockopt::schedule_area(Schedule(0.007, kFigTotal, kFigWarmup, kFigConst));
  const double gap_decay = decay_high - decay_low;
  const double gap_plateau = decay_high - plateau_low;
  const bool ok_decay = std::abs(gap_decay - 5.28) <= 0.02;
  const bool ok_plateau = std::abs(gap_plateau - 1.91) <= 0.02;
  std::cout << fmt::format("area(warmup_decay, eta=0.01) - area(warmup_decay, eta=0.007) = {:.4f}"
                           " (expected 5.28 +- 0.02) {}\n",
                           gap_decay, ok_decay ? "PASS" : "FAIL");
  std::cout << fmt::format("area(warmup_decay, eta=0.01) - area(warmup_const_decay, eta=0.007) = "
                           "{:.4f} (expected 1.91 +- 0.02) {}\n",
                           gap_plateau, ok_plateau ? "PASS" : "FAIL");
  return ok_decay && ok_plateau ? kExitOk : kExitCheckFailed;
}

int cmd_oracle_compare(std::int64_t steps, std::uint64_t seed) {
  const auto results = blockopt::oracle_compare(steps, seed);
  double worst = 0;
  for (const auto& r : results) {
    std::cout << fmt::format("{:<48} steps={} max_rel_dev={:.3e}\n", r.label, r.steps,
                             r.max_rel_deviation);
    worst = std::max(worst, r.max_rel_deviation);
  }
  const bool ok = worst <= blockopt::kOracleFailThreshold;
  std::cout << fmt::format("worst={:.3e} threshold={:.0e} {}\n", worst,
                           blockopt::kOracleFailThreshold, ok ? "PASS" : "FAIL");
  return ok ? kExitOk : kExitCheckFailed;
}

int cmd_variance_study(std::size_t n, std::size_t d, const std::vector<std::size_t>& ks,
                       std::size_t trials, std::uint64_t seed, std::size_t workers) {
  const auto problem = blockopt::Problem::logistic_regression(n, d, seed, 0.0);
  blockopt::BlockedVector x(problem.layout());
  blockopt::Rng rng(blockopt::substream_seed(seed, "point"));
  for (double& e : x.data()) e = rng.uniform(-1, 1);

  std::cout << "scheme,k,variance,trials\n";
  for (std::size_t k : ks) {
    for (auto scheme : {blockopt::SamplingScheme::kWithReplacement,
                        blockopt::SamplingScheme::kWithoutReplacement}) {
      const auto r = blockopt::estimate_gradient_variance(problem, x, k, scheme, trials,
                                                          blockopt::substream_seed(seed, "draws"));
      std::cout << fmt::format("{},{},{:.17g},{}\n", blockopt::to_string(scheme), k, r.variance,
                               r.trials);
    }
    if (workers > 1 && k % workers == 0 && k / workers <= n / workers) {
      const auto r = blockopt::estimate_sharded_variance(problem, x, k, workers, trials,
                                                         blockopt::substream_seed(seed, "shard"));
      std::cout << fmt::format("sharded_w{},{},{:.17g},{}\n", workers, k, r.variance, r.trials);
    }
  }
  return kExitOk;
}

int cmd_batch_scaling(const std::string& config_path, const std::vector<std::size_t>& batches,
                      const std::string& output) {
  const blockopt::ExperimentConfig config = blockopt::load_config(config_path);
  const auto rows = blockopt::batch_scaling_study(config, batches);
  const std::string csv = blockopt::scaling_csv(rows);
  if (output.empty()) {
    std::cout << csv;
  } else {
    std::ofstream(output) << csv;
    std::cout << "wrote " << output << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Block-wise large-batch optimizers: experiments and checks"};
  app.require_subcommand(1);

  std::string run_config;
  std::string run_output;
  auto* run = app.add_subcommand("run", "Run an experiment config; writes CSV and summaries");
  run->add_option("config", run_config, "experiment config (JSON)")->required();
  run->add_option("-o,--output", run_output, "output base path (overrides config.output)");

  auto* schedule_check =
      app.add_subcommand("schedule-check", "Print the learning-rate area differences");

  std::int64_t oracle_steps = 1000;
  std::uint64_t oracle_seed = 2024;
  auto* oracle_cmd =
      app.add_subcommand("oracle-compare", "Compare optimizers with extended-precision oracles");
  oracle_cmd->add_option("--steps", oracle_steps, "steps per case")->check(CLI::PositiveNumber);
  oracle_cmd->add_option("--seed", oracle_seed, "gradient stream seed");

  std::size_t var_n = 100;
  std::size_t var_d = 5;
  std::vector<std::size_t> var_k{10, 50, 100};
  std::size_t var_trials = 10000;
  std::uint64_t var_seed = 7;
  std::size_t var_workers = 4;
  auto* variance = app.add_subcommand(
      "variance-study", "Mini-batch gradient variance with and without replacement (CSV)");
  variance->add_option("--n", var_n, "dataset size");
  variance->add_option("--d", var_d, "feature dimension");
  variance->add_option("--k", var_k, "batch sizes")->delimiter(',');
  variance->add_option("--trials", var_trials, "Monte-Carlo trials")->check(CLI::PositiveNumber);
  variance->add_option("--seed", var_seed, "seed");
  variance->add_option("--workers", var_workers, "also report W-shard sampling (1 disables)");

  std::string scaling_config;
  std::vector<std::size_t> scaling_batches;
  std::string scaling_output;
  auto* scaling = app.add_subcommand("batch-scaling", "LAMB/LANS across global batch sizes (CSV)");
  scaling->add_option("config", scaling_config, "base experiment config (JSON)")->required();
  scaling->add_option("--batches", scaling_batches, "global batch sizes, e.g. 10,100,1000")
      ->delimiter(',')
      ->required();
  scaling->add_option("-o,--output", scaling_output, "write CSV here instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return cmd_run(run_config, run_output);
    if (*schedule_check) return cmd_schedule_check();
    if (*oracle_cmd) return cmd_oracle_compare(oracle_steps, oracle_seed);
    if (*variance) {
      return cmd_variance_study(var_n, var_d, var_k, var_trials, var_seed, var_workers);
    }
    if (*scaling) return cmd_batch_scaling(scaling_config, scaling_batches, scaling_output);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
