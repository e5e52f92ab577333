// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0
//
// Piecewise-linear learning-rate schedules. Steps are 1-indexed; asking for a
// rate outside [1, T] is an error.

#pragma once

#include <cstdint>
#include <stdexcept>

namespace blockopt {

class ScheduleRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

class InvalidScheduleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Linear warmup to eta over warmup_steps, eta held for const_steps, then a
/// linear decay reaching 0 at total_steps. const_steps == 0 gives the plain
/// warmup-decay schedule.
class Schedule {
 public:
  /// Throws InvalidScheduleError unless eta > 0, total >= 1 and
  /// warmup + constant <= total.
  Schedule(double eta, std::int64_t total_steps, std::int64_t warmup_steps,
           std::int64_t const_steps = 0);

  static Schedule warmup_decay(double eta, std::int64_t total, std::int64_t warmup) {
    return Schedule(eta, total, warmup, 0);
  }

  double eta() const { return eta_; }
  std::int64_t total_steps() const { return total_; }
  std::int64_t warmup_steps() const { return warmup_; }
  std::int64_t const_steps() const { return const_; }

  /// Rate at step t in [1, T]. Throws ScheduleRangeError otherwise.
  double rate(std::int64_t t) const;

  bool operator==(const Schedule&) const = default;

 private:
  double eta_;
  std::int64_t total_;
  std::int64_t warmup_;
  std::int64_t const_;
};

/// Warmup-decay rate; needs 1 <= t <= T and 1 <= T_warmup < T.
double lr_warmup_decay(std::int64_t t, double eta, std::int64_t total, std::int64_t warmup);

/// Warmup-constant-decay rate; needs 1 <= t <= T and T_warmup + T_const < T.
double lr_warmup_const_decay(std::int64_t t, double eta, std::int64_t total,
                             std::int64_t warmup, std::int64_t constant);

/// eta_ref * sqrt(k / k_ref). Throws ScheduleRangeError for non-positive sizes.
double sqrt_scale_lr(double eta_ref, double k_ref, double k);

/// Discrete area sum_{t=1}^{T} rate(t).
double schedule_area(const Schedule& schedule);

/// A training stage described the way the hyperparameter tables do it:
/// warmup and constant phases as percentages of the stage's step budget.
struct StageSpec {
  double eta = 0;
  double ratio_warmup = 0;  // percent
  double ratio_const = 0;   // percent
};

/// Converts percentages to step counts with round-half-up. Throws
/// InvalidScheduleError when the ratios are out of range or the resulting
/// warmup + constant phases would consume all total_steps.
Schedule stage_to_schedule(const StageSpec& spec, std::int64_t total_steps);

}  // namespace blockopt
