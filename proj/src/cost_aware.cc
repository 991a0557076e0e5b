#include <algorithm>
#include <limits>
#include <stdexcept>

#include "flipit/policies.h"

namespace flipit {
namespace {

constexpr int kMaxStageClosesPerStep = 64;

}  // namespace

// -- FixedCostImprovedUcb -----------------------------------------------------

FixedCostImprovedUcb::FixedCostImprovedUcb(std::vector<double> periods, long horizon,
                                           LossShape shape)
    : Policy(std::move(periods)),
      horizon_(horizon),
      shape_(shape),
      pending_(periods_.size(), 0),
      in_y_(periods_.size(), false) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  for (double x : periods_) stats_.push_back(ArmStats{x, 0, 0.0});
  active_.resize(periods_.size());
  for (std::size_t i = 0; i < active_.size(); ++i) active_[i] = i;
  start_stage();
}

std::vector<std::size_t> FixedCostImprovedUcb::certified() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < in_y_.size(); ++i) {
    if (in_y_[i]) out.push_back(i);
  }
  return out;
}

void FixedCostImprovedUcb::start_stage() {
  const long arms = static_cast<long>(periods_.size());
  gamma_ = stage_gamma(periods_[active_.front()], periods_[active_.back()]);
  target_ = alg1_stage_target(gap_guess_, gamma_, horizon_, arms);
  if (stage_log_clamped(gap_guess_, horizon_, arms)) clamped_ = true;
}

long FixedCostImprovedUcb::y_unit_count() const {
  long count = std::numeric_limits<long>::max();
  std::size_t longest = periods_.size();
  for (std::size_t i : active_) {
    if (!in_y_[i]) continue;
    count = std::min(count, stats_[i].count);
    longest = i;
  }
  if (longest == periods_.size()) return std::numeric_limits<long>::max();
  return count + pending_[longest];
}

bool FixedCostImprovedUcb::stage_complete() const {
  if (y_unit_count() < target_) return false;
  for (std::size_t i : active_) {
    if (!in_y_[i] && stats_[i].count + pending_[i] < target_) return false;
  }
  return true;
}

bool FixedCostImprovedUcb::close_stage() {
  for (std::size_t i : active_) {
    if (stats_[i].count < 1) return false;
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
    if (in_y_[i]) rec.certified.push_back(i);
  }
  rec.survivors = alg1_eliminate(stats_, active_, rec.lambda_bar, rec.confidence,
                                 periods_[active_.front()], EliminationRule::kPaper);
  active_ = rec.survivors;
  log_.push_back(std::move(rec));

  ++stage_;
  if (!clamped_) gap_guess_ *= 0.5;
  start_stage();
  return true;
}

std::size_t FixedCostImprovedUcb::next_arm() {
  for (int guard = 0; active_.size() > 1 && guard < kMaxStageClosesPerStep; ++guard) {
    if (!stage_complete()) break;
    const long before = target_;
    if (!close_stage()) break;
    if (clamped_ && target_ <= before) {
      target_ = horizon_;
      break;
    }
  }

  std::size_t arm = active_.back();
  if (active_.size() > 1) {
    // Units: the Y group (played through its longest member) and every
    // uncertified active period. Least-played unit first, shortest on ties.
    long best_count = std::numeric_limits<long>::max();
    for (std::size_t i : active_) {
      if (in_y_[i]) continue;
      const long c = stats_[i].count + pending_[i];
      if (c < best_count) {
        best_count = c;
        arm = i;
      }
    }
    const long y_count = y_unit_count();
    if (y_count < best_count) {
      for (std::size_t i : active_) {
        if (in_y_[i]) arm = i;
      }
    }
  }
  ++pending_[arm];
  ++dispatched_;
  return arm;
}

void FixedCostImprovedUcb::observe(const FeedbackRecord& record) {
  const std::size_t played = arm_of(record.period);
  if (pending_[played] > 0) --pending_[played];
  const bool played_active = std::binary_search(active_.begin(), active_.end(), played);
  if (played_active) stats_[played].add(record.realized_loss);

  if (in_y_[played]) {
    // Every certified period shorter than the played one is attacked whenever
    // the played one is, so its loss is determined by this round.
    std::vector<std::size_t> covered;
    std::vector<double> covered_periods;
    double attackable_from = record.period;
    for (std::size_t i : active_) {
      if (in_y_[i] && i < played) {
        covered.push_back(i);
        covered_periods.push_back(periods_[i]);
        attackable_from = std::min(attackable_from, periods_[i]);
      }
    }
    const auto losses = side_observations(shape_, record, covered_periods, attackable_from);
    for (std::size_t k = 0; k < covered.size(); ++k) {
      if (losses[k]) stats_[covered[k]].add(*losses[k]);
    }
  }

  if (record.observed()) {
    for (std::size_t j = played; j < in_y_.size(); ++j) in_y_[j] = true;
  }
}

// -- RandomCostImprovedUcb ----------------------------------------------------

RandomCostImprovedUcb::RandomCostImprovedUcb(std::vector<double> periods, long horizon)
    : Policy(std::move(periods)),
      horizon_(horizon),
      gamma_(stage_gamma(periods_.front(), periods_.back())),
      dispatched_per_arm_(periods_.size(), 0),
      stage_plays_(periods_.size(), 0) {
  if (horizon < 1) throw std::invalid_argument("horizon must be >= 1");
  for (double x : periods_) stats_.push_back(ArmStats{x, 0, 0.0});
  active_.resize(periods_.size());
  for (std::size_t i = 0; i < active_.size(); ++i) active_[i] = i;
  const long arms = static_cast<long>(periods_.size());
  target_ = alg1_stage_target(gap_guess_, gamma_, horizon_, arms);
  clamped_ = stage_log_clamped(gap_guess_, horizon_, arms);
}

bool RandomCostImprovedUcb::close_stage() {
  for (std::size_t i : active_) {
    if (stats_[i].count < 1) return false;
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
    rec.counts.push_back(stage_plays_[i]);
    rec.means.push_back(stats_[i].mean_loss());
  }
  rec.survivors = alg1_eliminate(stats_, active_, rec.lambda_bar, rec.confidence,
                                 periods_[active_.front()], EliminationRule::kPaper);
  active_ = rec.survivors;
  log_.push_back(std::move(rec));
  std::fill(stage_plays_.begin(), stage_plays_.end(), 0);

  ++stage_;
  if (!clamped_) gap_guess_ *= 0.5;
  target_ = alg1_stage_target(gap_guess_, gamma_, horizon_, arms);
  if (stage_log_clamped(gap_guess_, horizon_, arms)) clamped_ = true;
  return true;
}

std::size_t RandomCostImprovedUcb::next_arm() {
  auto stage_done = [this] {
    return std::all_of(active_.begin(), active_.end(),
                       [this](std::size_t i) { return dispatched_per_arm_[i] >= target_; });
  };
  for (int guard = 0; active_.size() > 1 && guard < kMaxStageClosesPerStep; ++guard) {
    if (!stage_done()) break;
    const long before = target_;
    if (!close_stage()) break;
    if (clamped_ && target_ <= before) {
      target_ = horizon_;
      break;
    }
  }

  std::size_t arm = active_.front();
  for (std::size_t i : active_) {
    if (dispatched_per_arm_[i] < dispatched_per_arm_[arm]) arm = i;
  }
  ++dispatched_per_arm_[arm];
  ++stage_plays_[arm];
  ++dispatched_;
  return arm;
}

void RandomCostImprovedUcb::observe(const FeedbackRecord& record) {
  const std::size_t played = arm_of(record.period);
  if (std::binary_search(active_.begin(), active_.end(), played)) {
    stats_[played].add(record.realized_loss);
  }
}

}  // namespace flipit
