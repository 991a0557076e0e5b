#include "flipit/theorem_bounds.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace flipit {
namespace {

double clamped_log(double arg) { return std::log(std::max(std::numbers::e, arg)); }

double arms_plus_one(const OracleTable& table) { return static_cast<double>(table.size() + 1); }

// sum over positive gaps of (Delta_i + 48 / Delta_i)
double tail_terms(const OracleTable& table) {
  double sum = 0;
  for (double g : table.gaps) {
    if (g > kGapTolerance) sum += g + 48.0 / g;
  }
  return sum;
}

double leading_term(const OracleTable& table, long horizon) {
  if (table.gap_min <= 0) return 0;
  const double t = static_cast<double>(horizon);
  return 48.0 * table_gamma(table) *
         clamped_log(t * arms_plus_one(table) * table.gap_max * table.gap_max / 4.0) /
         table.gap_min;
}

}  // namespace

double table_gamma(const OracleTable& table) {
  if (table.size() == 0) throw std::invalid_argument("empty oracle table");
  const double r = table.periods.back() / table.periods.front();
  return (1.0 + r) * (1.0 + r);
}

double finite_arm_bound(const OracleTable& table, long horizon) {
  return leading_term(table, horizon) + tail_terms(table);
}

double continuous_bound(double l_prime, long n, long horizon, double gamma, double gap_max) {
  if (l_prime <= 0 || n < 1) throw std::invalid_argument("need L' > 0 and n >= 1");
  const double t = static_cast<double>(horizon);
  const double nd = static_cast<double>(n);
  return 3.0 * l_prime * t / nd + 48.0 * gamma * clamped_log(t * (nd + 1.0)) / (l_prime / nd) +
         48.0 * nd * nd / l_prime + nd * gap_max;
}

std::vector<double> cost_b_terms(const OracleTable& table, long horizon) {
  const double gamma = table_gamma(table);
  const double t = static_cast<double>(horizon);
  std::vector<double> out;
  out.reserve(table.size());
  for (double g : table.gaps) {
    out.push_back(32.0 * gamma * clamped_log(t * arms_plus_one(table) * g * g / 4.0));
  }
  return out;
}

double fixed_cost_bound(const OracleTable& table, long horizon, double threshold,
                        const std::vector<double>& damage_probs) {
  if (damage_probs.size() != table.size()) {
    throw std::invalid_argument("one damage probability per arm required");
  }
  const auto b = cost_b_terms(table, horizon);
  double sum = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const double g = table.gaps[i];
    if (g <= kGapTolerance) continue;
    double term = b[i] / g;
    if (table.periods[i] > threshold && damage_probs[i] > 0) {
      term = std::min(term, g / damage_probs[i]);
    }
    sum += term;
  }
  return sum + leading_term(table, horizon) + tail_terms(table);
}

double random_cost_bound(const OracleTable& table, long horizon) {
  const auto b = cost_b_terms(table, horizon);
  double sum = 0;
  for (std::size_t i = 0; i < table.size(); ++i) {
    if (table.gaps[i] > kGapTolerance) sum += b[i] / table.gaps[i];
  }
  return sum + tail_terms(table);
}

}  // namespace flipit
