#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipit/config.h"
#include "flipit/game_env.h"
#include "flipit/oracle.h"
#include "flipit/policies.h"
#include "flipit/simulate.h"

namespace flipit {

// Everything drawn for one trial before any policy runs.
struct TrialInstance {
  int trial = 0;
  std::uint64_t seed = 0;  // base seed + trial
  LossSpec spec;
  AttackModel model;
  nlohmann::json params;  // drawn parameter values
  PeriodBounds bounds{};
};

TrialInstance make_instance(const ExperimentConfig& config, int trial);

// Arms a policy plays on this instance: the configured periods, or the
// discretization grid for alg2.
std::vector<double> policy_periods(const ExperimentConfig& config, PolicyKind kind);

// Oracle the policy's regret is measured against. alg2 is measured against the
// continuous optimum.
OracleTable policy_table(const ExperimentConfig& config, const TrialInstance& instance,
                         PolicyKind kind);

std::unique_ptr<Policy> make_policy(PolicyKind kind, const std::vector<double>& periods,
                                    long horizon, const LossShape& shape);

// Runs one policy on a fresh environment seeded from the instance, so every
// policy of a trial faces the same attack sequence.
RegretTrace run_policy(const ExperimentConfig& config, const TrialInstance& instance,
                       PolicyKind kind, bool keep_rounds);

struct TrialResult {
  int trial = 0;
  std::uint64_t seed = 0;
  nlohmann::json params;
  std::vector<RegretTrace> traces;  // config.policies order
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<TrialResult> trials;  // trial order regardless of scheduling
};

struct RunOptions {
  int jobs = 1;
  bool keep_rounds = true;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& opts = {});
// Same as run_experiment; requires config.nodes >= 2.
ExperimentResult run_multinode(const ExperimentConfig& config, const RunOptions& opts = {});

struct AggregateRow {
  std::string policy;
  long checkpoint = 0;
  double mean = 0;
  double stderr_ = 0;  // sample std (n - 1) / sqrt(n)
};

// Mean and standard error of cumulative regret per policy at every checkpoint.
// Throws std::invalid_argument when horizons differ.
std::vector<AggregateRow> aggregate(const std::vector<const RegretTrace*>& traces);
std::vector<AggregateRow> aggregate(const ExperimentResult& result);

struct BoundCheck {
  std::string policy;
  std::string bound_name;
  double measured_mean = 0;
  double bound_mean = 0;  // mean of the per-trial bound values
  double bound_min = 0;
  bool holds = true;
};

// One row per policy covered by a regret bound.
std::vector<BoundCheck> theorem_report(const ExperimentResult& result);

}  // namespace flipit
