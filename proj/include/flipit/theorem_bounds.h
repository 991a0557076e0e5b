#pragma once

#include <vector>

#include "flipit/oracle.h"

namespace flipit {

// Regret bounds evaluated from oracle quantities. Every log argument is
// clamped to e, the same clamp the learners apply to their stage schedule.

// (1 + x_max / x_min)^2 over the table's periods.
double table_gamma(const OracleTable& table);

// Finite arms, no attack cost. Zero when every gap is zero.
double finite_arm_bound(const OracleTable& table, long horizon);

// Continuous periods discretized into n arms. `gap_max` is the largest gap of
// the discretized table against the continuous optimum.
double continuous_bound(double l_prime, long n, long horizon, double gamma, double gap_max);

// B_i = 32 gamma log(T (K + 1) Delta_i^2 / 4) per arm.
std::vector<double> cost_b_terms(const OracleTable& table, long horizon);

// Fixed hidden threshold x0; `damage_probs` holds p_i per arm.
double fixed_cost_bound(const OracleTable& table, long horizon, double threshold,
                        const std::vector<double>& damage_probs);

// Per-round random threshold: every active arm explored on its own.
double random_cost_bound(const OracleTable& table, long horizon);

}  // namespace flipit
