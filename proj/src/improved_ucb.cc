#include <algorithm>
#include <stdexcept>

#include "flipit/policies.h"

namespace flipit {

ImprovedUcbSide::ImprovedUcbSide(std::vector<double> periods, long horizon,
                                 EliminationRule rule, LossShape shape)
    : Policy(std::move(periods)), horizon_(horizon), rule_(rule), shape_(shape) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  stats_.reserve(periods_.size());
  for (double x : periods_) stats_.push_back(ArmStats{x, 0, 0.0});
  active_.resize(periods_.size());
  for (std::size_t i = 0; i < active_.size(); ++i) active_[i] = i;
  start_stage();
}

std::string ImprovedUcbSide::name() const {
  return rule_ == EliminationRule::kPaper ? "alg1" : "alg1-aggressive";
}

void ImprovedUcbSide::start_stage() {
  const long arms = static_cast<long>(periods_.size());
  gamma_ = stage_gamma(periods_[active_.front()], periods_[active_.back()]);
  target_ = alg1_stage_target(gap_guess_, gamma_, horizon_, arms);
  if (stage_log_clamped(gap_guess_, horizon_, arms)) clamped_ = true;
}

bool ImprovedUcbSide::close_stage() {
  for (std::size_t i : active_) {
    if (stats_[i].count < 1) return false;  // feedback still in flight
  }
  const long arms = static_cast<long>(periods_.size());
  StageRecord rec;
  rec.stage = stage_;
  rec.gap_guess = gap_guess_;
  rec.gamma = gamma_;
  rec.target = target_;
  rec.round = dispatched_;
  rec.confidence = alg1_confidence(gap_guess_, target_, horizon_, arms);
  rec.lambda_bar = alg1_lambda_bar(stats_, active_, rec.confidence);
  rec.active = active_;
  for (std::size_t i : active_) {
    rec.counts.push_back(stats_[i].count);
    rec.means.push_back(stats_[i].mean_loss());
  }
  rec.survivors = alg1_eliminate(stats_, active_, rec.lambda_bar, rec.confidence,
                                 periods_[active_.front()], rule_);
  active_ = rec.survivors;
  log_.push_back(std::move(rec));

  ++stage_;
  if (!clamped_) gap_guess_ *= 0.5;
  start_stage();
  return true;
}

std::size_t ImprovedUcbSide::next_arm() {
  // Stages whose target is already met close without new rounds.
  while (active_.size() > 1 && dispatched_ >= target_) {
    const long before = target_;
    if (!close_stage()) break;
    if (clamped_ && target_ <= before) {
      target_ = horizon_;  // nothing left to halve; run the horizon out
      break;
    }
  }
  ++dispatched_;
  return active_.back();
}

void ImprovedUcbSide::observe(const FeedbackRecord& record) {
  std::vector<double> active_periods;
  active_periods.reserve(active_.size());
  for (std::size_t i : active_) active_periods.push_back(periods_[i]);
  const auto losses = side_observations(shape_, record, active_periods);
  for (std::size_t k = 0; k < active_.size(); ++k) {
    if (losses[k]) stats_[active_[k]].add(*losses[k]);
  }
}

}  // namespace flipit
