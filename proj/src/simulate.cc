#include "flipit/simulate.h"

#include <algorithm>
#include <limits>
#include <optional>
#include <stdexcept>

namespace flipit {

std::vector<long> log_checkpoints(long horizon) {
  std::vector<long> out;
  for (long decade = 1; decade <= horizon; decade *= 10) {
    for (long m : {1L, 2L, 5L}) {
      if (m * decade < horizon) out.push_back(m * decade);
    }
    if (decade > std::numeric_limits<long>::max() / 10) break;
  }
  out.push_back(horizon);
  return out;
}

RegretTrace simulate(Policy& policy, GameEnv& env, const OracleTable& table, long horizon,
                     const SimulateOptions& opts) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  if (opts.nodes < 1 || opts.nodes > env.node_count()) {
    throw std::invalid_argument("node count does not match the environment");
  }
  if (policy.periods() != table.periods) {
    throw std::invalid_argument("policy arms and oracle table differ");
  }

  RegretTrace out;
  out.horizon = horizon;
  out.meta.policy = policy.name();
  out.meta.seed = env.trace().seed();
  out.meta.oracle_digest = table.digest();
  out.meta.gap_min = table.gap_min;
  out.meta.gap_max = table.gap_max;
  out.checkpoints = log_checkpoints(horizon);
  out.plays.assign(table.size(), 0);
  if (opts.keep_rounds) out.rounds.reserve(static_cast<std::size_t>(horizon));

  const auto nodes = static_cast<std::size_t>(opts.nodes);
  std::vector<double> ready_at(nodes, 0.0);
  std::vector<std::optional<FeedbackRecord>> in_flight(nodes);

  double regret = 0.0;
  double realized = 0.0;
  double elapsed = 0.0;
  std::size_t next_checkpoint = 0;

  for (long t = 1; t <= horizon; ++t) {
    const double now = *std::min_element(ready_at.begin(), ready_at.end());

    // Deliver everything that ended by now, by end time then node id.
    for (;;) {
      std::size_t pick = nodes;
      for (std::size_t s = 0; s < nodes; ++s) {
        if (!in_flight[s] || in_flight[s]->end_time() > now) continue;
        if (pick == nodes || in_flight[s]->end_time() < in_flight[pick]->end_time()) pick = s;
      }
      if (pick == nodes) break;
      policy.observe(*in_flight[pick]);
      in_flight[pick].reset();
    }

    std::size_t node = 0;
    while (ready_at[node] != now) ++node;

    const std::size_t arm = policy.next_arm();
    const double period = table.periods.at(arm);
    FeedbackRecord rec = env.play_round(static_cast<int>(node) + 1, period);
    ready_at[node] = rec.end_time();

    ++out.plays[arm];
    regret += table.gaps[arm];
    realized += rec.realized_loss;
    elapsed += period;
    if (opts.keep_rounds) {
      out.rounds.push_back({period, rec.realized_loss, table.losses[arm], regret});
    }
    while (next_checkpoint < out.checkpoints.size() && out.checkpoints[next_checkpoint] == t) {
      out.checkpoint_regret.push_back(regret);
      ++next_checkpoint;
    }
    in_flight[node] = std::move(rec);
  }

  out.final_regret = regret;
  out.empirical_regret = realized - table.lambda_star * elapsed;
  out.wall_time = *std::max_element(ready_at.begin(), ready_at.end());
  return out;
}

RegretTrace alg1_run(GameEnv& env, const std::vector<double>& periods, long horizon,
                     EliminationRule rule) {
  const OracleTable table = build_table(env.spec(), env.model(), periods);
  ImprovedUcbSide policy(periods, horizon, rule, env.spec().shape);
  return simulate(policy, env, table, horizon);
}

RegretTrace alg2_run(GameEnv& env, double x_min, double x_max, long horizon) {
  const auto periods = alg2_grid(x_min, x_max, alg2_arm_count(horizon));
  const auto reference = continuous_optimum(env.spec(), env.model(), x_min, x_max);
  const OracleTable table = build_table(env.spec(), env.model(), periods, reference);
  ImprovedUcbSide policy(periods, horizon, EliminationRule::kPaper, env.spec().shape);
  return simulate(policy, env, table, horizon);
}

RegretTrace tucb_run(GameEnv& env, const std::vector<double>& periods, long horizon, bool side) {
  const OracleTable table = build_table(env.spec(), env.model(), periods);
  Tucb policy(periods, env.spec().shape, side);
  return simulate(policy, env, table, horizon);
}

RegretTrace alg_fixed_cost_run(GameEnv& env, const std::vector<double>& periods, long horizon) {
  const OracleTable table = build_table(env.spec(), env.model(), periods);
  FixedCostImprovedUcb policy(periods, horizon, env.spec().shape);
  return simulate(policy, env, table, horizon);
}

RegretTrace alg_random_cost_run(GameEnv& env, const std::vector<double>& periods, long horizon) {
  const OracleTable table = build_table(env.spec(), env.model(), periods);
  RandomCostImprovedUcb policy(periods, horizon);
  return simulate(policy, env, table, horizon);
}

}  // namespace flipit
