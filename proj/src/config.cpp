// Copyright 2026 The blockopt Authors
// SPDX-License-Identifier: Apache-2.0

#include "blockopt/config.hpp"

#include <fstream>

#include "blockopt/random.hpp"

namespace blockopt {
namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config key '") + key + "': " + e.what());
  }
}

template <typename T>
std::optional<T> get_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return get_or<T>(j, key, T{});
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  for (const auto& [key, _] : j.items()) {
    bool found = false;
    for (const char* k : known) found = found || key == k;
    if (!found) throw ConfigError(std::string("unknown key '") + key + "' in " + where);
  }
}

ProblemSpec parse_problem(const json& j) {
  reject_unknown(j, {"kind", "d", "n", "seed", "l2_reg", "hidden", "label_noise", "blocks"},
                 "problem");
  ProblemSpec p;
  const auto kind = get_or<std::string>(j, "kind", "quadratic");
  const auto parsed = parse_problem_kind(kind);
  if (!parsed) throw ConfigError("unknown problem kind '" + kind + "'");
  p.kind = *parsed;
  p.d = get_or<std::size_t>(j, "d", p.d);
  p.n = get_or<std::size_t>(j, "n", p.n);
  p.seed = get_or<std::uint64_t>(j, "seed", p.seed);
  p.l2_reg = get_or<double>(j, "l2_reg", p.l2_reg);
  p.hidden = get_or<std::size_t>(j, "hidden", p.hidden);
  p.label_noise = get_or<double>(j, "label_noise", p.label_noise);
  p.blocks = get_or<std::vector<std::size_t>>(j, "blocks", {});
  return p;
}

void parse_optimizer(const json& j, ExperimentConfig& cfg) {
  reject_unknown(j,
                 {"name", "beta1", "beta2", "epsilon", "weight_decay", "phi", "normalize_grads",
                  "zero_grad_policy", "norm_floor_epsilon", "momentum"},
                 "optimizer");
  const auto name = get_or<std::string>(j, "name", "lans");
  const auto kind = parse_optimizer_kind(name);
  if (!kind) throw ConfigError("unknown optimizer '" + name + "'");
  cfg.optimizer = *kind;

  OptimizerConfig& o = cfg.optimizer_config;
  o.beta1 = get_or<double>(j, "beta1", o.beta1);
  o.beta2 = get_or<double>(j, "beta2", o.beta2);
  o.epsilon = get_or<double>(j, "epsilon", o.epsilon);
  o.momentum = get_or<double>(j, "momentum", o.momentum);
  o.normalize_grads = get_or<bool>(j, "normalize_grads", o.normalize_grads);
  if (j.contains("weight_decay")) {
    const auto& wd = j.at("weight_decay");
    o.weight_decay = wd.is_array() ? wd.get<std::vector<double>>()
                                   : std::vector<double>{get_or<double>(j, "weight_decay", 0)};
  }
  if (j.contains("phi")) {
    const auto& phi = j.at("phi");
    const auto phi_kind = get_or<std::string>(phi, "kind", "identity");
    if (phi_kind == "identity") {
      o.phi = ScalingFunction::identity();
    } else if (phi_kind == "clamp") {
      o.phi = ScalingFunction::clamp(get_or<double>(phi, "lo", 0), get_or<double>(phi, "hi", 0));
    } else {
      throw ConfigError("unknown phi kind '" + phi_kind + "'");
    }
  }
  const auto policy = get_or<std::string>(j, "zero_grad_policy", "zero_passthrough");
  if (policy == "zero_passthrough") {
    o.normalization.zero_policy = ZeroGradPolicy::kZeroPassthrough;
  } else if (policy == "epsilon_floor") {
    o.normalization.zero_policy = ZeroGradPolicy::kEpsilonFloor;
  } else {
    throw ConfigError("unknown zero_grad_policy '" + policy + "'");
  }
  o.normalization.floor_epsilon =
      get_or<double>(j, "norm_floor_epsilon", o.normalization.floor_epsilon);
}

ScheduleSpec parse_schedule(const json& j) {
  reject_unknown(j,
                 {"kind", "eta", "ratio_warmup", "ratio_const", "warmup_steps", "const_steps"},
                 "schedule");
  ScheduleSpec s;
  const auto kind = get_or<std::string>(j, "kind", "warmup_const_decay");
  if (kind == "warmup_decay") {
    s.kind = ScheduleKind::kWarmupDecay;
  } else if (kind == "warmup_const_decay") {
    s.kind = ScheduleKind::kWarmupConstDecay;
  } else {
    throw ConfigError("unknown schedule kind '" + kind + "'");
  }
  s.eta = get_or<double>(j, "eta", s.eta);
  s.ratio_warmup = get_opt<double>(j, "ratio_warmup");
  s.ratio_const = get_opt<double>(j, "ratio_const");
  s.warmup_steps = get_opt<std::int64_t>(j, "warmup_steps");
  s.const_steps = get_opt<std::int64_t>(j, "const_steps");
  if (s.ratio_warmup && s.warmup_steps) {
    throw ConfigError("schedule: give ratio_warmup or warmup_steps, not both");
  }
  if (s.ratio_const && s.const_steps) {
    throw ConfigError("schedule: give ratio_const or const_steps, not both");
  }
  if (s.kind == ScheduleKind::kWarmupDecay &&
      ((s.ratio_const && *s.ratio_const != 0) || (s.const_steps && *s.const_steps != 0))) {
    throw ConfigError("warmup_decay schedule has no constant phase");
  }
  return s;
}

}  // namespace

std::int64_t ExperimentConfig::planned_steps() const {
  if (stages.empty()) return total_steps;
  std::int64_t sum = 0;
  for (const auto& s : stages) sum += s.steps;
  return sum;
}

std::uint64_t ExperimentConfig::resolved_shard_seed() const {
  return shard_seed ? *shard_seed : substream_seed(seed, "shards");
}

ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  reject_unknown(j,
                 {"problem", "optimizer", "schedule", "stages", "workers", "local_batch",
                  "total_steps", "seed", "shard_seed", "parallel", "output", "resolved_stages"},
                 "config");
  ExperimentConfig cfg;
  if (j.contains("problem")) cfg.problem = parse_problem(j.at("problem"));
  if (j.contains("optimizer")) parse_optimizer(j.at("optimizer"), cfg);
  if (j.contains("schedule")) cfg.schedule = parse_schedule(j.at("schedule"));
  if (j.contains("stages")) {
    if (j.contains("schedule") || j.contains("total_steps")) {
      throw ConfigError("'stages' replaces 'schedule' and 'total_steps'");
    }
    for (const auto& s : j.at("stages")) {
      reject_unknown(s, {"eta", "ratio_warmup", "ratio_const", "steps"}, "stage");
      StagePlan plan;
      plan.spec.eta = get_or<double>(s, "eta", 0);
      plan.spec.ratio_warmup = get_or<double>(s, "ratio_warmup", 0);
      plan.spec.ratio_const = get_or<double>(s, "ratio_const", 0);
      plan.steps = get_or<std::int64_t>(s, "steps", 0);
      cfg.stages.push_back(plan);
    }
    if (cfg.stages.empty()) throw ConfigError("'stages' must not be empty");
  }
  cfg.workers = get_or<std::size_t>(j, "workers", cfg.workers);
  cfg.local_batch = get_or<std::size_t>(j, "local_batch", cfg.local_batch);
  cfg.total_steps = get_or<std::int64_t>(j, "total_steps", cfg.total_steps);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.shard_seed = get_opt<std::uint64_t>(j, "shard_seed");
  cfg.parallel = get_or<bool>(j, "parallel", cfg.parallel);
  cfg.output = get_or<std::string>(j, "output", "");

  if (cfg.total_steps < 0) throw ConfigError("total_steps must be >= 0");
  if (cfg.workers == 0 || cfg.local_batch == 0) {
    throw ConfigError("workers and local_batch must be >= 1");
  }
  for (const auto& s : cfg.stages) {
    if (s.steps < 1) throw ConfigError("every stage needs steps >= 1");
  }
  try {
    cfg.optimizer_config.validate(cfg.problem.kind == ProblemKind::kMlp1
                                      ? 4
                                      : (cfg.problem.blocks.empty() ? 1 : cfg.problem.blocks.size()));
    resolve_schedules(cfg);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return parse_config(j);
}

std::vector<Schedule> resolve_schedules(const ExperimentConfig& config) {
  std::vector<Schedule> out;
  if (!config.stages.empty()) {
    for (const auto& stage : config.stages) out.push_back(stage_to_schedule(stage.spec, stage.steps));
    return out;
  }
  if (config.total_steps == 0) return out;
  const ScheduleSpec& s = config.schedule;
  if (s.warmup_steps || s.const_steps) {
    const std::int64_t warmup = s.warmup_steps.value_or(0);
    const std::int64_t constant =
        s.kind == ScheduleKind::kWarmupDecay ? 0 : s.const_steps.value_or(0);
    out.emplace_back(s.eta, config.total_steps, warmup, constant);
    return out;
  }
  StageSpec spec{s.eta, s.ratio_warmup.value_or(0),
                 s.kind == ScheduleKind::kWarmupDecay ? 0.0 : s.ratio_const.value_or(0)};
  out.push_back(stage_to_schedule(spec, config.total_steps));
  return out;
}

nlohmann::json to_json(const ExperimentConfig& c) {
  json j;
  j["problem"] = {{"kind", to_string(c.problem.kind)},
                  {"d", c.problem.d},
                  {"n", c.problem.n},
                  {"seed", c.problem.seed},
                  {"l2_reg", c.problem.l2_reg},
                  {"hidden", c.problem.hidden},
                  {"label_noise", c.problem.label_noise},
                  {"blocks", c.problem.blocks}};
  const OptimizerConfig& o = c.optimizer_config;
  json phi = {{"kind", o.phi.kind == ScalingFunction::Kind::kClamp ? "clamp" : "identity"}};
  if (o.phi.kind == ScalingFunction::Kind::kClamp) {
    phi["lo"] = o.phi.lo;
    phi["hi"] = o.phi.hi;
  }
  j["optimizer"] = {{"name", to_string(c.optimizer)},
                    {"beta1", o.beta1},
                    {"beta2", o.beta2},
                    {"epsilon", o.epsilon},
                    {"weight_decay", o.weight_decay},
                    {"phi", phi},
                    {"normalize_grads", o.normalize_grads},
                    {"zero_grad_policy", o.normalization.zero_policy == ZeroGradPolicy::kEpsilonFloor
                                             ? "epsilon_floor"
                                             : "zero_passthrough"},
                    {"norm_floor_epsilon", o.normalization.floor_epsilon},
                    {"momentum", o.momentum}};
  // Echo the resolved step counts rather than the percentages.
  json stages = json::array();
  const auto schedules = resolve_schedules(c);
  for (const auto& s : schedules) {
    stages.push_back({{"eta", s.eta()},
                      {"steps", s.total_steps()},
                      {"warmup_steps", s.warmup_steps()},
                      {"const_steps", s.const_steps()}});
  }
  j["resolved_stages"] = stages;
  if (c.stages.empty()) {
    json sched = {{"kind", c.schedule.kind == ScheduleKind::kWarmupDecay ? "warmup_decay"
                                                                          : "warmup_const_decay"},
                  {"eta", c.schedule.eta}};
    if (c.schedule.ratio_warmup) sched["ratio_warmup"] = *c.schedule.ratio_warmup;
    if (c.schedule.ratio_const) sched["ratio_const"] = *c.schedule.ratio_const;
    if (c.schedule.warmup_steps) sched["warmup_steps"] = *c.schedule.warmup_steps;
    if (c.schedule.const_steps) sched["const_steps"] = *c.schedule.const_steps;
    j["schedule"] = sched;
    j["total_steps"] = c.total_steps;
  } else {
    json list = json::array();
    for (const auto& s : c.stages) {
      list.push_back({{"eta", s.spec.eta},
                      {"ratio_warmup", s.spec.ratio_warmup},
                      {"ratio_const", s.spec.ratio_const},
                      {"steps", s.steps}});
    }
    j["stages"] = list;
  }
  j["workers"] = c.workers;
  j["local_batch"] = c.local_batch;
  j["seed"] = c.seed;
  j["shard_seed"] = c.resolved_shard_seed();
  j["parallel"] = c.parallel;
  j["output"] = c.output;
  return j;
}

}  // namespace blockopt
