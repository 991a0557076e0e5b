#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flipit/attack_model.h"
#include "flipit/loss.h"

namespace flipit {

// Gaps below this are treated as ties with the optimum.
inline constexpr double kGapTolerance = 1e-12;

// Ground truth for a fixed set of candidate periods. Evaluator-only.
struct OracleTable {
  std::vector<double> periods;  // strictly ascending
  std::vector<double> losses;   // l(x_i)
  std::vector<double> rates;    // lambda(x_i) = l(x_i) / x_i
  std::vector<double> gaps;     // Delta_i = l_i - x_i * lambda_star, >= 0
  double x_star = 0;
  double lambda_star = 0;
  std::size_t best_index = 0;  // arm with the smallest rate
  double gap_min = 0;          // smallest gap above kGapTolerance; 0 if none
  double gap_max = 0;

  std::size_t size() const { return periods.size(); }
  // Throws std::out_of_range if the period is not one of the table's arms.
  std::size_t index_of(double period) const;
  std::string digest() const;
};

struct RateReference {
  double period;
  double rate;
};

// Evaluates every period exactly. With a reference, lambda_star is measured
// against it (e.g. the continuous optimum) instead of the best listed arm.
OracleTable build_table(const LossSpec& spec, const AttackModel& model,
                        std::span<const double> periods,
                        std::optional<RateReference> reference = std::nullopt);

// argmin of lambda(x) over [x_min, x_max]: dense scan plus Brent refinement.
RateReference continuous_optimum(const LossSpec& spec, const AttackModel& model, double x_min,
                                 double x_max);

struct PseudoRegret {
  double total = 0;     // sum l(x_t) - lambda_star * sum x_t
  double via_gaps = 0;  // sum_i Delta_i n_i
  std::vector<double> cumulative;
};

// Throws std::out_of_range on a period that is not in the table.
PseudoRegret pseudo_regret(std::span<const double> played, const OracleTable& table);

struct LipschitzConstants {
  double l;
  double l_prime;  // L * x_max (x_max - x_min) / x_min
};

LipschitzConstants lipschitz_constants(const LossSpec& spec, const AttackModel& model,
                                       double x_min, double x_max);

// CSV columns: period,l,lambda,gap
void write_table_csv(const OracleTable& table, std::ostream& out);

}  // namespace flipit
