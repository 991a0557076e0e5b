#include "flipit/policies.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace flipit {

Policy::Policy(std::vector<double> periods) : periods_(std::move(periods)) {
  if (periods_.empty()) throw std::invalid_argument("a policy needs at least one period");
  for (std::size_t i = 0; i < periods_.size(); ++i) {
    if (!(periods_[i] > 0.0)) throw std::invalid_argument("periods must be > 0");
    if (i > 0 && !(periods_[i] > periods_[i - 1])) {
      throw std::invalid_argument("periods must be strictly ascending");
    }
  }
}

std::size_t Policy::arm_of(double period) const {
  auto it = std::lower_bound(periods_.begin(), periods_.end(), period);
  if (it == periods_.end() || *it != period) {
    throw std::out_of_range(fmt::format("feedback for unknown period {}", period));
  }
  return static_cast<std::size_t>(it - periods_.begin());
}

double stage_log_term(double gap_guess, long horizon, long arms) {
  const double arg = static_cast<double>(horizon) * static_cast<double>(arms + 1) *
                     gap_guess * gap_guess;
  return std::log(std::max(std::numbers::e, arg));
}

bool stage_log_clamped(double gap_guess, long horizon, long arms) {
  const double arg = static_cast<double>(horizon) * static_cast<double>(arms + 1) *
                     gap_guess * gap_guess;
  return arg <= std::numbers::e;
}

double stage_gamma(double shortest, double longest) {
  const double r = 1.0 + longest / shortest;
  return r * r;
}

long alg1_stage_target(double gap_guess, double gamma, long horizon, long arms) {
  const double n =
      2.0 * gamma * stage_log_term(gap_guess, horizon, arms) / (gap_guess * gap_guess);
  if (n >= static_cast<double>(std::numeric_limits<long>::max() / 2)) {
    return std::numeric_limits<long>::max() / 2;
  }
  return static_cast<long>(std::ceil(n));
}

double alg1_confidence(double gap_guess, long stage_target, long horizon, long arms) {
  if (stage_target < 1) throw std::invalid_argument("stage target must be >= 1");
  return std::sqrt(stage_log_term(gap_guess, horizon, arms) /
                   (2.0 * static_cast<double>(stage_target)));
}

double alg1_lambda_bar(std::span<const ArmStats> stats, std::span<const std::size_t> active,
                       double confidence) {
  if (active.empty()) throw std::logic_error("lambda_bar over an empty active set");
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i : active) {
    const ArmStats& s = stats[i];
    if (s.count < 1) {
      throw std::logic_error(fmt::format("active period {} has no samples", s.period));
    }
    best = std::min(best, s.time_avg() + confidence / s.period);
  }
  return best;
}

std::vector<std::size_t> alg1_eliminate(std::span<const ArmStats> stats,
                                        std::span<const std::size_t> active, double lambda_bar,
                                        double confidence, double shortest,
                                        EliminationRule rule) {
  auto relative = [&](std::size_t i) { return stats[i].mean_loss() - stats[i].period * lambda_bar; };

  double threshold = std::numeric_limits<double>::infinity();
  std::size_t best = active.front();
  for (std::size_t j : active) {
    const double rel = relative(j);
    if (rel < relative(best)) best = j;
    switch (rule) {
      case EliminationRule::kPaper:
        threshold = std::min(threshold,
                             rel + 2.0 * (1.0 + stats[j].period / shortest) * confidence);
        break;
      case EliminationRule::kAggressive:
        threshold = std::min(threshold, rel);
        break;
    }
  }
  if (rule == EliminationRule::kAggressive) threshold += 4.0 * confidence;

  std::vector<std::size_t> survivors;
  for (std::size_t i : active) {
    if (relative(i) < threshold) survivors.push_back(i);
  }
  if (survivors.empty()) survivors.push_back(best);
  return survivors;
}

long alg2_arm_count(long horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  long n = std::max(1L, static_cast<long>(std::cbrt(static_cast<double>(horizon))) - 1);
  while (n * n * n < horizon) ++n;
  return n;
}

std::vector<double> alg2_grid(double x_min, double x_max, long n) {
  if (n < 1 || !(x_min > 0.0) || !(x_max > x_min)) {
    throw std::invalid_argument("discretization needs n >= 1 and 0 < x_min < x_max");
  }
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n));
  const double width = (x_max - x_min) / static_cast<double>(n);
  for (long k = 1; k < n; ++k) grid.push_back(x_min + static_cast<double>(k) * width);
  grid.push_back(x_max);
  return grid;
}

}  // namespace flipit
