// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/schedule.hpp"

#include <cmath>
#include <string>

namespace blockopt {
namespace {

void require_step(std::int64_t t, std::int64_t total) {
  if (t < 1 || t > total) {
    throw ScheduleRangeError("step " + std::to_string(t) + " outside [1, " +
                             std::to_string(total) + "]");
  }
}

// Each phase computes its fraction first so the knots land exactly on eta.
double piecewise_rate(std::int64_t t, double eta, std::int64_t total, std::int64_t warmup,
                      std::int64_t constant) {
  if (t <= warmup) {
    return eta * (static_cast<double>(t) / static_cast<double>(warmup));
  }
  if (t <= warmup + constant) return eta;
  const auto decay_len = static_cast<double>(total - warmup - constant);
  return eta * (static_cast<double>(total - t) / decay_len);
}

}  // namespace

Schedule::Schedule(double eta, std::int64_t total_steps, std::int64_t warmup_steps,
                   std::int64_t const_steps)
    : eta_(eta), total_(total_steps), warmup_(warmup_steps), const_(const_steps) {
  if (!(eta > 0) || !std::isfinite(eta)) throw InvalidScheduleError("eta must be positive");
  if (total_steps < 1) throw InvalidScheduleError("total steps must be >= 1");
  if (warmup_steps < 0 || const_steps < 0) {
    throw InvalidScheduleError("phase lengths must be non-negative");
  }
  if (warmup_steps + const_steps > total_steps) {
    throw InvalidScheduleError("warmup + constant steps exceed total steps");
  }
}

double Schedule::rate(std::int64_t t) const {
  require_step(t, total_);
  return piecewise_rate(t, eta_, total_, warmup_, const_);
}

double lr_warmup_decay(std::int64_t t, double eta, std::int64_t total, std::int64_t warmup) {
  if (warmup < 1 || warmup >= total) {
    throw ScheduleRangeError("warmup-decay needs 1 <= T_warmup < T");
  }
  require_step(t, total);
  return piecewise_rate(t, eta, total, warmup, 0);
}

double lr_warmup_const_decay(std::int64_t t, double eta, std::int64_t total,
                             std::int64_t warmup, std::int64_t constant) {
  if (warmup < 0 || constant < 0 || warmup + constant >= total) {
    throw ScheduleRangeError("warmup-constant-decay needs T_warmup + T_const < T");
  }
  require_step(t, total);
  return piecewise_rate(t, eta, total, warmup, constant);
}

double sqrt_scale_lr(double eta_ref, double k_ref, double k) {
  if (!(k_ref > 0) || !(k > 0)) throw ScheduleRangeError("batch sizes must be positive");
  return eta_ref * std::sqrt(k / k_ref);
}

double schedule_area(const Schedule& schedule) {
  double area = 0;
  for (std::int64_t t = 1; t <= schedule.total_steps(); ++t) area += schedule.rate(t);
  return area;
}

Schedule stage_to_schedule(const StageSpec& spec, std::int64_t total_steps) {
  if (total_steps < 1) throw InvalidScheduleError("stage needs at least one step");
  if (spec.ratio_warmup < 0 || spec.ratio_const < 0 ||
      spec.ratio_warmup + spec.ratio_const > 100) {
    throw InvalidScheduleError("stage ratios must be non-negative and sum to at most 100%");
  }
  const auto steps = static_cast<double>(total_steps);
  const auto warmup = static_cast<std::int64_t>(std::floor(spec.ratio_warmup * steps / 100 + 0.5));
  const auto constant = static_cast<std::int64_t>(std::floor(spec.ratio_const * steps / 100 + 0.5));
  if (warmup + constant >= total_steps) {
    throw InvalidScheduleError("stage leaves no decay phase: warmup " + std::to_string(warmup) +
                               " + constant " + std::to_string(constant) + " >= " +
                               std::to_string(total_steps));
  }
  return Schedule(spec.eta, total_steps, warmup, constant);
}

}  // namespace blockopt
