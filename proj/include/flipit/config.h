#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipit/attack_model.h"
#include "flipit/loss.h"
#include "flipit/random.h"

namespace flipit {

// Every problem found while reading a config, each prefixed by its field path
// (e.g. "model.scale: expected a number or a [lo, hi] pair").
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

// A scalar or a closed range drawn uniformly once per trial.
struct ParamSpec {
  double lo = 0;
  double hi = 0;

  bool ranged() const { return hi > lo; }
  double draw(RandomStream& rng) const { return ranged() ? rng.uniform(lo, hi) : lo; }
};

enum class ModelFamily { kWeibull, kUniform, kExponential, kEmpirical };

struct ModelSpec {
  ModelFamily family = ModelFamily::kWeibull;
  // Family parameters in draw order: weibull (scale, shape), uniform (low,
  // high), exponential (rate). Empty for empirical.
  std::vector<std::pair<std::string, ParamSpec>> params;
  std::vector<double> samples;  // empirical only

  // Draws ranged parameters from `rng` and records the drawn values.
  AttackModel instantiate(RandomStream& rng, nlohmann::json* drawn = nullptr) const;
  nlohmann::json to_json() const;
};

enum class CostKind { kNone, kFixed, kRandom };

struct CostSpec {
  CostKind kind = CostKind::kNone;
  double threshold = 0;                  // kFixed
  std::optional<ModelSpec> threshold_model;  // kRandom
};

struct PeriodSpec {
  std::vector<double> values;  // discrete arms, ascending; empty when continuous
  double min = 0;
  double max = 0;
  bool continuous = false;
};

enum class PolicyKind {
  kAlg1,
  kAlg1Aggressive,
  kAlg2,
  kTucb,
  kTucbSide,
  kFixedCost,
  kRandomCost,
};

std::string_view policy_name(PolicyKind kind);
std::optional<PolicyKind> parse_policy(std::string_view name);

struct ExperimentConfig {
  ModelSpec model;
  LossFlavor flavor = LossFlavor::kBinary;
  double defense_cost = 0.1;
  std::optional<double> x_max_norm;  // linear flavor; defaults to the longest period
  CostSpec cost;
  PeriodSpec periods;
  std::vector<PolicyKind> policies;
  long horizon = 1;
  int trials = 1;
  std::uint64_t seed = 0;
  int nodes = 1;

  // Normalizing constant actually used by the linear loss.
  double effective_x_max_norm() const;
  nlohmann::json to_json() const;
};

// Parses and validates; throws ConfigError listing every problem found.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
// Re-checks cross-field constraints after command-line overrides.
void validate_config(const ExperimentConfig& config);

// Weibull shape 2 with the scale drawn from [1, 20] per trial, 19 arms in
// [1, 10], c_d = 0.1, 100 trials, T = 10^4, four policies.
nlohmann::json fig2_preset(LossFlavor flavor);

}  // namespace flipit
