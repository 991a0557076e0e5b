#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flipit/game_env.h"
#include "flipit/oracle.h"
#include "flipit/policies.h"

namespace flipit {

struct RoundRecord {
  double period;
  double loss;           // realized
  double expected_loss;  // oracle l(x)
  double cum_regret;     // cumulative pseudo-regret
};

// Bound inputs reported next to measured regret.
struct TraceMetadata {
  std::uint64_t seed = 0;
  std::string policy;
  std::string oracle_digest;
  double gamma = 0;
  double gap_min = 0;
  double gap_max = 0;
  std::vector<double> b_terms;       // B_i per arm
  std::vector<double> damage_probs;  // p_i per arm
  std::string bound_name;            // empty when no bound covers the policy
  double bound = 0;
};

struct RegretTrace {
  TraceMetadata meta;
  long horizon = 0;
  std::vector<RoundRecord> rounds;  // empty unless requested
  std::vector<long> checkpoints;
  std::vector<double> checkpoint_regret;
  std::vector<long> plays;  // per arm
  double final_regret = 0;
  double empirical_regret = 0;  // realized losses; logged, never used for acceptance
  double wall_time = 0;         // largest node wall time at the end
};

// Rounds {1, 2, 5} x 10^k up to the horizon, plus the horizon itself.
std::vector<long> log_checkpoints(long horizon);

struct SimulateOptions {
  bool keep_rounds = true;
  int nodes = 1;
};

// Drives `policy` for `horizon` dispatched rounds. With several nodes, rounds
// are dispatched in wall-time order (ties by node id) and each decision sees
// the feedback of every round that ended by then.
RegretTrace simulate(Policy& policy, GameEnv& env, const OracleTable& table, long horizon,
                     const SimulateOptions& opts = {});

RegretTrace alg1_run(GameEnv& env, const std::vector<double>& periods, long horizon,
                     EliminationRule rule);
// Regret is measured against the continuous optimum over [x_min, x_max].
RegretTrace alg2_run(GameEnv& env, double x_min, double x_max, long horizon);
RegretTrace tucb_run(GameEnv& env, const std::vector<double>& periods, long horizon, bool side);
RegretTrace alg_fixed_cost_run(GameEnv& env, const std::vector<double>& periods, long horizon);
RegretTrace alg_random_cost_run(GameEnv& env, const std::vector<double>& periods, long horizon);

}  // namespace flipit
