#include <cmath>
#include <limits>

#include "flipit/policies.h"

namespace flipit {

Tucb::Tucb(std::vector<double> periods, LossShape shape, bool side_observations,
           double attackable_from)
    : Policy(std::move(periods)),
      shape_(shape),
      side_(side_observations),
      attackable_from_(attackable_from),
      pending_(periods_.size(), 0) {
  for (double x : periods_) stats_.push_back(ArmStats{x, 0, 0.0});
}

std::string Tucb::name() const { return side_ ? "tucb-side" : "tucb"; }

std::size_t Tucb::next_arm() {
  std::size_t arm = periods_.size();
  if (side_) {
    // One play of the longest period seeds every shorter arm.
    for (const auto& s : stats_) {
      if (s.count == 0) {
        arm = periods_.size() - 1;
        break;
      }
    }
  } else {
    for (std::size_t i = 0; i < stats_.size(); ++i) {
      if (stats_[i].count == 0 && pending_[i] == 0) {
        arm = i;
        break;
      }
    }
  }

  if (arm == periods_.size()) {
    const double log_t = std::log(static_cast<double>(std::max(1L, observed_rounds_)));
    double best = std::numeric_limits<double>::infinity();
    arm = 0;
    for (std::size_t i = 0; i < stats_.size(); ++i) {
      const auto& s = stats_[i];
      if (s.count == 0) continue;
      const double index =
          s.time_avg() - std::sqrt(2.0 * log_t / static_cast<double>(s.count)) / s.period;
      if (index < best) {
        best = index;
        arm = i;
      }
    }
  }
  ++pending_[arm];
  return arm;
}

void Tucb::observe(const FeedbackRecord& record) {
  const std::size_t played = arm_of(record.period);
  --pending_[played];
  ++observed_rounds_;
  if (!side_) {
    stats_[played].add(record.realized_loss);
    return;
  }
  const auto losses = side_observations(shape_, record, periods_, attackable_from_);
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (losses[i]) stats_[i].add(*losses[i]);
  }
}

}  // namespace flipit
