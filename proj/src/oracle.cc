#include "flipit/oracle.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <stdexcept>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>

namespace flipit {
namespace {

std::uint64_t fnv1a(std::string_view bytes, std::uint64_t h = 1469598103934665603ULL) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

constexpr int kOptimumScanPoints = 20001;
constexpr int kLipschitzGridPoints = 10000;

}  // namespace

std::size_t OracleTable::index_of(double period) const {
  auto it = std::lower_bound(periods.begin(), periods.end(), period);
  if (it == periods.end() || *it != period) {
    throw std::out_of_range(fmt::format("period {} is not an arm of the oracle table", period));
  }
  return static_cast<std::size_t>(it - periods.begin());
}

std::string OracleTable::digest() const {
  std::uint64_t h = fnv1a("oracle-table-v1");
  for (std::size_t i = 0; i < periods.size(); ++i) {
    h = fnv1a(fmt::format("{}:{}:{};", periods[i], losses[i], gaps[i]), h);
  }
  h = fnv1a(fmt::format("{}:{}", x_star, lambda_star), h);
  return fmt::format("{:016x}", h);
}

OracleTable build_table(const LossSpec& spec, const AttackModel& model,
                        std::span<const double> periods, std::optional<RateReference> reference) {
  if (periods.empty()) throw std::invalid_argument("oracle table needs at least one period");
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (!(periods[i] > 0.0)) throw std::invalid_argument("periods must be > 0");
    if (i > 0 && !(periods[i] > periods[i - 1])) {
      throw std::invalid_argument("periods must be strictly ascending");
    }
  }

  OracleTable t;
  t.periods.assign(periods.begin(), periods.end());
  t.losses.reserve(periods.size());
  t.rates.reserve(periods.size());
  for (double x : periods) {
    const double l = expected_loss(spec, model, x);
    t.losses.push_back(l);
    t.rates.push_back(l / x);
  }

  // Strict comparison keeps the shortest period on ties.
  t.best_index = 0;
  for (std::size_t i = 1; i < t.rates.size(); ++i) {
    if (t.rates[i] < t.rates[t.best_index]) t.best_index = i;
  }
  t.x_star = t.periods[t.best_index];
  t.lambda_star = t.rates[t.best_index];
  const bool external = reference && reference->rate < t.lambda_star;
  if (external) {
    t.x_star = reference->period;
    t.lambda_star = reference->rate;
  }

  t.gaps.resize(periods.size());
  for (std::size_t i = 0; i < periods.size(); ++i) {
    t.gaps[i] = std::max(0.0, t.losses[i] - t.periods[i] * t.lambda_star);
  }
  if (!external) t.gaps[t.best_index] = 0.0;

  t.gap_max = *std::max_element(t.gaps.begin(), t.gaps.end());
  t.gap_min = 0.0;
  for (double g : t.gaps) {
    if (g > kGapTolerance && (t.gap_min == 0.0 || g < t.gap_min)) t.gap_min = g;
  }
  return t;
}

RateReference continuous_optimum(const LossSpec& spec, const AttackModel& model, double x_min,
                                 double x_max) {
  if (!(x_min > 0.0) || x_max < x_min) {
    throw std::invalid_argument("continuous optimum needs 0 < x_min <= x_max");
  }
  auto rate = [&](double x) { return expected_loss(spec, model, x) / x; };
  if (x_min == x_max) return {x_min, rate(x_min)};

  const double step = (x_max - x_min) / (kOptimumScanPoints - 1);
  RateReference best{x_min, rate(x_min)};
  int best_k = 0;
  for (int k = 1; k < kOptimumScanPoints; ++k) {
    const double x = k + 1 == kOptimumScanPoints ? x_max : x_min + k * step;
    const double r = rate(x);
    if (r < best.rate) {
      best = {x, r};
      best_k = k;
    }
  }
  const double lo = std::max(x_min, x_min + (best_k - 1) * step);
  const double hi = std::min(x_max, x_min + (best_k + 1) * step);
  const auto [x_ref, r_ref] =
      boost::math::tools::brent_find_minima(rate, lo, hi, std::numeric_limits<double>::digits);
  if (r_ref < best.rate) best = {x_ref, r_ref};
  return best;
}

PseudoRegret pseudo_regret(std::span<const double> played, const OracleTable& table) {
  PseudoRegret out;
  out.cumulative.reserve(played.size());
  std::vector<long> counts(table.size(), 0);
  double loss_sum = 0.0;
  double time_sum = 0.0;
  double running = 0.0;
  for (double x : played) {
    const std::size_t i = table.index_of(x);
    ++counts[i];
    loss_sum += table.losses[i];
    time_sum += x;
    running += table.gaps[i];
    out.cumulative.push_back(running);
  }
  out.total = loss_sum - table.lambda_star * time_sum;
  for (std::size_t i = 0; i < table.size(); ++i) {
    out.via_gaps += table.gaps[i] * static_cast<double>(counts[i]);
  }
  return out;
}

LipschitzConstants lipschitz_constants(const LossSpec& spec, const AttackModel& model,
                                       double x_min, double x_max) {
  double l = 0.0;
  const auto* uniform = std::get_if<UniformParams>(&model.params());
  if (uniform && spec.shape.flavor == LossFlavor::kBinary && !spec.has_cost()) {
    l = 1.0 / (uniform->high - uniform->low);
  } else if (x_max > x_min) {
    const double h = (x_max - x_min) / (kLipschitzGridPoints - 1);
    double prev = expected_loss(spec, model, x_min);
    for (int k = 1; k < kLipschitzGridPoints; ++k) {
      const double x = k + 1 == kLipschitzGridPoints ? x_max : x_min + k * h;
      const double cur = expected_loss(spec, model, x);
      l = std::max(l, std::abs(cur - prev) / h);
      prev = cur;
    }
  }
  return {l, l * x_max * (x_max - x_min) / x_min};
}

void write_table_csv(const OracleTable& table, std::ostream& out) {
  out << "period,l,lambda,gap\n";
  for (std::size_t i = 0; i < table.size(); ++i) {
    out << fmt::format("{},{},{},{}\n", table.periods[i], table.losses[i], table.rates[i],
                       table.gaps[i]);
  }
}

}  // namespace flipit
