#include "flipit/harness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <map>
#include <stdexcept>
#include <thread>

#include "flipit/theorem_bounds.h"

namespace flipit {
namespace {

LossSpec make_spec(const ExperimentConfig& config, RandomStream& rng, nlohmann::json& params) {
  CostVariant cost = NoCost{};
  switch (config.cost.kind) {
    case CostKind::kNone:
      break;
    case CostKind::kFixed:
      cost = FixedCost{config.cost.threshold};
      break;
    case CostKind::kRandom: {
      nlohmann::json drawn = nlohmann::json::object();
      cost = RandomCost{config.cost.threshold_model->instantiate(rng, &drawn)};
      params["threshold_model"] = drawn;
      break;
    }
  }
  return make_loss_spec(config.flavor, config.defense_cost, config.effective_x_max_norm(),
                        std::move(cost));
}

void fill_bound(const ExperimentConfig& config, const TrialInstance& instance, PolicyKind kind,
                const OracleTable& table, RegretTrace& trace) {
  auto& meta = trace.meta;
  const long horizon = config.horizon;
  switch (kind) {
    case PolicyKind::kAlg1:
      meta.gamma = table_gamma(table);
      meta.bound_name = "finite-arms";
      meta.bound = finite_arm_bound(table, horizon);
      break;
    case PolicyKind::kAlg2: {
      const double r = instance.bounds.max / instance.bounds.min;
      meta.gamma = (1 + r) * (1 + r);
      const auto lc = lipschitz_constants(instance.spec, instance.model, instance.bounds.min,
                                          instance.bounds.max);
      meta.bound_name = "continuous";
      meta.bound = lc.l_prime > 0
                       ? continuous_bound(lc.l_prime, static_cast<long>(table.size()), horizon,
                                          meta.gamma, table.gap_max)
                       : 0.0;
      break;
    }
    case PolicyKind::kFixedCost:
      meta.gamma = table_gamma(table);
      meta.b_terms = cost_b_terms(table, horizon);
      meta.bound_name = "fixed-cost";
      meta.bound = fixed_cost_bound(table, horizon, config.cost.threshold, meta.damage_probs);
      break;
    case PolicyKind::kRandomCost:
      meta.gamma = table_gamma(table);
      meta.b_terms = cost_b_terms(table, horizon);
      meta.bound_name = "random-cost";
      meta.bound = random_cost_bound(table, horizon);
      break;
    case PolicyKind::kAlg1Aggressive:
    case PolicyKind::kTucb:
    case PolicyKind::kTucbSide:
      meta.gamma = table_gamma(table);
      break;
  }
}

}  // namespace

TrialInstance make_instance(const ExperimentConfig& config, int trial) {
  TrialInstance out{.trial = trial,
                    .seed = config.seed + static_cast<std::uint64_t>(trial),
                    .spec = {},
                    .model = AttackModel::exponential(1.0),
                    .params = nlohmann::json::object(),
                    .bounds = {config.periods.min, config.periods.max}};
  RandomStream rng = make_stream(out.seed, StreamId::kParameters);
  nlohmann::json drawn = nlohmann::json::object();
  out.model = config.model.instantiate(rng, &drawn);
  out.params["model"] = drawn;
  out.spec = make_spec(config, rng, out.params);
  return out;
}

std::vector<double> policy_periods(const ExperimentConfig& config, PolicyKind kind) {
  if (kind == PolicyKind::kAlg2) {
    return alg2_grid(config.periods.min, config.periods.max, alg2_arm_count(config.horizon));
  }
  return config.periods.values;
}

OracleTable policy_table(const ExperimentConfig& config, const TrialInstance& instance,
                         PolicyKind kind) {
  const auto periods = policy_periods(config, kind);
  if (kind == PolicyKind::kAlg2) {
    const auto ref = continuous_optimum(instance.spec, instance.model, config.periods.min,
                                        config.periods.max);
    return build_table(instance.spec, instance.model, periods, ref);
  }
  return build_table(instance.spec, instance.model, periods);
}

std::unique_ptr<Policy> make_policy(PolicyKind kind, const std::vector<double>& periods,
                                    long horizon, const LossShape& shape) {
  switch (kind) {
    case PolicyKind::kAlg1:
    case PolicyKind::kAlg2:
      return std::make_unique<ImprovedUcbSide>(periods, horizon, EliminationRule::kPaper, shape);
    case PolicyKind::kAlg1Aggressive:
      return std::make_unique<ImprovedUcbSide>(periods, horizon, EliminationRule::kAggressive,
                                               shape);
    case PolicyKind::kTucb:
      return std::make_unique<Tucb>(periods, shape, false);
    case PolicyKind::kTucbSide:
      return std::make_unique<Tucb>(periods, shape, true);
    case PolicyKind::kFixedCost:
      return std::make_unique<FixedCostImprovedUcb>(periods, horizon, shape);
    case PolicyKind::kRandomCost:
      return std::make_unique<RandomCostImprovedUcb>(periods, horizon);
  }
  throw std::logic_error("unhandled policy kind");
}

RegretTrace run_policy(const ExperimentConfig& config, const TrialInstance& instance,
                       PolicyKind kind, bool keep_rounds) {
  const OracleTable table = policy_table(config, instance, kind);
  auto policy = make_policy(kind, table.periods, config.horizon, instance.spec.shape);
  GameEnv env(instance.spec, instance.model, instance.bounds, config.nodes, instance.seed);
  RegretTrace trace =
      simulate(*policy, env, table, config.horizon, {.keep_rounds = keep_rounds,
                                                     .nodes = config.nodes});
  trace.meta.policy = std::string(policy_name(kind));
  for (double x : table.periods) {
    trace.meta.damage_probs.push_back(damage_probability(instance.spec, instance.model, x));
  }
  fill_bound(config, instance, kind, table, trace);
  return trace;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const RunOptions& opts) {
  validate_config(config);
  ExperimentResult result{config, std::vector<TrialResult>(config.trials)};
  std::vector<std::exception_ptr> errors(config.trials);

  std::atomic<int> next{0};
  auto worker = [&] {
    for (int t = next++; t < config.trials; t = next++) {
      try {
        const TrialInstance instance = make_instance(config, t);
        TrialResult& out = result.trials[t];
        out.trial = t;
        out.seed = instance.seed;
        out.params = instance.params;
        for (PolicyKind kind : config.policies) {
          out.traces.push_back(run_policy(config, instance, kind, opts.keep_rounds));
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    }
  };

  const int jobs = std::clamp(opts.jobs, 1, config.trials);
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return result;
}

ExperimentResult run_multinode(const ExperimentConfig& config, const RunOptions& opts) {
  if (config.nodes < 2) throw std::invalid_argument("multi-node runs need at least two nodes");
  return run_experiment(config, opts);
}

std::vector<AggregateRow> aggregate(const std::vector<const RegretTrace*>& traces) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RegretTrace*>> groups;
  for (const RegretTrace* t : traces) {
    if (t->horizon != traces.front()->horizon) {
      throw std::invalid_argument("cannot aggregate traces with different horizons");
    }
    auto [it, fresh] = groups.try_emplace(t->meta.policy);
    if (fresh) order.push_back(t->meta.policy);
    it->second.push_back(t);
  }

  std::vector<AggregateRow> out;
  for (const auto& name : order) {
    const auto& group = groups[name];
    const auto& checkpoints = group.front()->checkpoints;
    const double n = static_cast<double>(group.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
      double sum = 0;
      for (const auto* t : group) sum += t->checkpoint_regret.at(c);
      const double mean = sum / n;
      double ss = 0;
      for (const auto* t : group) {
        const double d = t->checkpoint_regret[c] - mean;
        ss += d * d;
      }
      const double se = group.size() > 1 ? std::sqrt(ss / (n - 1)) / std::sqrt(n) : 0.0;
      out.push_back({name, checkpoints[c], mean, se});
    }
  }
  return out;
}

std::vector<AggregateRow> aggregate(const ExperimentResult& result) {
  std::vector<const RegretTrace*> traces;
  for (const auto& trial : result.trials) {
    for (const auto& t : trial.traces) traces.push_back(&t);
  }
  return aggregate(traces);
}

std::vector<BoundCheck> theorem_report(const ExperimentResult& result) {
  std::vector<BoundCheck> out;
  const auto& policies = result.config.policies;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    const auto& first = result.trials.front().traces[p];
    if (first.meta.bound_name.empty()) continue;
    BoundCheck row;
    row.policy = first.meta.policy;
    row.bound_name = first.meta.bound_name;
    row.bound_min = first.meta.bound;
    double regret = 0;
    double bound = 0;
    for (const auto& trial : result.trials) {
      const auto& t = trial.traces[p];
      regret += t.final_regret;
      bound += t.meta.bound;
      row.bound_min = std::min(row.bound_min, t.meta.bound);
    }
    const double n = static_cast<double>(result.trials.size());
    row.measured_mean = regret / n;
    row.bound_mean = bound / n;
    row.holds = row.measured_mean <= row.bound_mean;
    out.push_back(row);
  }
  return out;
}

}  // namespace flipit
