#include "flipit/loss.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "flipit/quadrature.h"

namespace flipit {
namespace {

void check_period(const LossShape& shape, double period) {
  if (!(period > 0.0) || !std::isfinite(period)) {
    throw std::domain_error(fmt::format("defense period must be > 0 (got {})", period));
  }
  if (shape.flavor == LossFlavor::kLinear && period > shape.x_max_norm) {
    throw std::domain_error(fmt::format(
        "linear loss requires period <= x_max_norm ({} > {})", period, shape.x_max_norm));
  }
}

double integrated_cdf(const AttackModel& model, double x) {
  double closed = 0.0;
  if (model.integrated_cdf_closed_form(x, closed)) return closed;
  return adaptive_simpson([&model](double u) { return model.cdf(u); }, 0.0, x).value;
}

double expected_loss_uncosted(const LossShape& shape, const AttackModel& model, double x) {
  switch (shape.flavor) {
    case LossFlavor::kBinary:
      // Ties a == x cause no damage, hence P(a < x) rather than F(x).
      return model.prob_below(x) + shape.defense_cost;
    case LossFlavor::kLinear:
      return integrated_cdf(model, x) / shape.x_max_norm + shape.defense_cost;
  }
  return 0.0;
}

}  // namespace

double LossShape::damage(double compromised) const {
  if (compromised <= 0.0) return 0.0;
  switch (flavor) {
    case LossFlavor::kBinary:
      return 1.0;
    case LossFlavor::kLinear:
      return compromised / x_max_norm;
  }
  return 0.0;
}

double LossShape::loss(double period, double attack_time) const {
  return damage(std::max(0.0, period - attack_time)) + defense_cost;
}

void LossSpec::validate() const {
  if (!(shape.defense_cost >= 0.0 && shape.defense_cost < 1.0)) {
    throw std::invalid_argument(
        fmt::format("defense cost must lie in [0, 1) (got {})", shape.defense_cost));
  }
  if (shape.flavor == LossFlavor::kLinear &&
      !(shape.x_max_norm > 0.0 && std::isfinite(shape.x_max_norm))) {
    throw std::invalid_argument(
        fmt::format("x_max_norm must be > 0 (got {})", shape.x_max_norm));
  }
  if (const auto* fixed = std::get_if<FixedCost>(&cost)) {
    if (!std::isfinite(fixed->threshold)) {
      throw std::invalid_argument("fixed attack-cost threshold must be finite");
    }
  }
}

LossSpec make_loss_spec(LossFlavor flavor, double defense_cost, double x_max_norm,
                        CostVariant cost) {
  LossSpec spec{LossShape{flavor, x_max_norm, defense_cost}, std::move(cost)};
  spec.validate();
  return spec;
}

bool attack_launched(double period, std::optional<double> threshold) {
  return !threshold || period > *threshold;
}

double round_loss(const LossSpec& spec, double period, double attack_time,
                  std::optional<double> threshold) {
  check_period(spec.shape, period);
  if (attack_time < 0.0) {
    throw std::domain_error(fmt::format("attack time must be >= 0 (got {})", attack_time));
  }
  if (spec.has_cost() != threshold.has_value()) {
    throw std::invalid_argument(spec.has_cost()
                                    ? "cost variant active but no x0 realization supplied"
                                    : "x0 realization supplied without a cost variant");
  }
  if (!attack_launched(period, threshold)) return spec.shape.defense_cost;
  return spec.shape.loss(period, attack_time);
}

double expected_loss(const LossSpec& spec, const AttackModel& model, double period) {
  check_period(spec.shape, period);
  const double c_d = spec.shape.defense_cost;
  return std::visit(
      [&](const auto& cost) -> double {
        using T = std::decay_t<decltype(cost)>;
        if constexpr (std::is_same_v<T, NoCost>) {
          return expected_loss_uncosted(spec.shape, model, period);
        } else if constexpr (std::is_same_v<T, FixedCost>) {
          if (period <= cost.threshold) return c_d;
          return expected_loss_uncosted(spec.shape, model, period);
        } else {
          const double p_attack = cost.threshold_model.prob_below(period);
          if (p_attack == 0.0) return c_d;
          return c_d * (1.0 - p_attack) +
                 expected_loss_uncosted(spec.shape, model, period) * p_attack;
        }
      },
      spec.cost);
}

double damage_probability(const LossSpec& spec, const AttackModel& model, double period) {
  const double p_complete = model.prob_below(period);
  return std::visit(
      [&](const auto& cost) -> double {
        using T = std::decay_t<decltype(cost)>;
        if constexpr (std::is_same_v<T, NoCost>) {
          return p_complete;
        } else if constexpr (std::is_same_v<T, FixedCost>) {
          return period > cost.threshold ? p_complete : 0.0;
        } else {
          return cost.threshold_model.prob_below(period) * p_complete;
        }
      },
      spec.cost);
}

}  // namespace flipit
