#pragma once

#include <optional>
#include <variant>

#include "flipit/attack_model.h"

namespace flipit {

enum class LossFlavor { kBinary, kLinear };

// The part of the loss the defender knows: the damage function f and the
// per-update defense cost c_d.
struct LossShape {
  LossFlavor flavor = LossFlavor::kBinary;
  double x_max_norm = 1.0;  // only meaningful for kLinear
  double defense_cost = 0.0;

  // f(s) for compromise duration s >= 0. f(0) = 0, range [0, 1].
  double damage(double compromised) const;
  // f[(x - a)^+] + c_d, the loss when the attack is not deterred by a cost.
  double loss(double period, double attack_time) const;
};

struct NoCost {};
// The attacker attacks only when the period exceeds a fixed threshold x0.
struct FixedCost {
  double threshold;
};
// x0 is redrawn every round from threshold_model.
struct RandomCost {
  AttackModel threshold_model;
};
using CostVariant = std::variant<NoCost, FixedCost, RandomCost>;

struct LossSpec {
  LossShape shape;
  CostVariant cost = NoCost{};

  bool has_cost() const { return !std::holds_alternative<NoCost>(cost); }
  // Throws std::invalid_argument if any field is out of range.
  void validate() const;
};

LossSpec make_loss_spec(LossFlavor flavor, double defense_cost, double x_max_norm = 1.0,
                        CostVariant cost = NoCost{});

// Realized loss of one round. `threshold` is the round's x0 and must be present
// exactly when the LossSpec has a cost variant.
double round_loss(const LossSpec& spec, double period, double attack_time,
                  std::optional<double> threshold);

// Whether an attack is launched in a round with the given period and x0.
bool attack_launched(double period, std::optional<double> threshold);

// l(x) = E_a[l(x, a)] (and E over x0 for RandomCost). Closed form where one
// exists, adaptive Simpson (abs tol 1e-9) otherwise.
double expected_loss(const LossSpec& spec, const AttackModel& model, double period);

// P(the attack inflicts damage | period): probability an attack is launched
// and completes before the next update.
double damage_probability(const LossSpec& spec, const AttackModel& model, double period);

}  // namespace flipit
