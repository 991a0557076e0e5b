#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "flipit/game_env.h"
#include "flipit/loss.h"

namespace flipit {

// Running loss statistics for one candidate period.
struct ArmStats {
  double period = 0;
  long count = 0;
  double loss_sum = 0;

  void add(double loss) {
    ++count;
    loss_sum += loss;
  }
  double mean_loss() const { return count > 0 ? loss_sum / static_cast<double>(count) : 0.0; }
  double time_avg() const { return mean_loss() / period; }
};

// Uniform step interface: the driver asks for an arm, plays it, and feeds the
// resulting record back. Feedback may lag dispatch when several nodes share
// one learner.
class Policy {
 public:
  virtual ~Policy() = default;

  virtual std::string name() const = 0;
  virtual std::size_t next_arm() = 0;
  virtual void observe(const FeedbackRecord& record) = 0;

  const std::vector<double>& periods() const { return periods_; }
  std::size_t arm_count() const { return periods_.size(); }

 protected:
  // Periods must be strictly ascending and positive.
  explicit Policy(std::vector<double> periods);
  std::size_t arm_of(double period) const;

  std::vector<double> periods_;
};

// ---------------------------------------------------------------------------
// Stage arithmetic shared by the elimination learners.

// ln(max(e, T (K + 1) gap^2)). The clamp keeps the log >= 1 once the gap guess
// drops below 1 / sqrt(T (K + 1)).
double stage_log_term(double gap_guess, long horizon, long arms);
bool stage_log_clamped(double gap_guess, long horizon, long arms);

// (1 + x_(2) / x_(1))^2 for the shortest and longest active periods.
double stage_gamma(double shortest, double longest);

// n_m = ceil(2 gamma log(.) / gap^2).
long alg1_stage_target(double gap_guess, double gamma, long horizon, long arms);

// c_m = sqrt(log(.) / (2 n_m)).
double alg1_confidence(double gap_guess, long stage_target, long horizon, long arms);

// min over active arms of (lambda_bar_i + c / x_i). Throws std::logic_error if
// an active arm has no samples.
double alg1_lambda_bar(std::span<const ArmStats> stats, std::span<const std::size_t> active,
                       double confidence);

enum class EliminationRule { kPaper, kAggressive };

// Surviving arms (ascending). `shortest` is x_(1), the shortest active period.
// Never returns an empty set.
std::vector<std::size_t> alg1_eliminate(std::span<const ArmStats> stats,
                                        std::span<const std::size_t> active, double lambda_bar,
                                        double confidence, double shortest, EliminationRule rule);

// Diagnostic snapshot taken when a stage closes.
struct StageRecord {
  int stage = 0;
  double gap_guess = 0;
  double gamma = 0;
  long target = 0;
  long round = 0;  // rounds dispatched when the stage closed
  double confidence = 0;
  double lambda_bar = 0;
  std::vector<std::size_t> active;     // arms active during the stage
  std::vector<long> counts;            // per active arm
  std::vector<double> means;           // per active arm
  std::vector<std::size_t> survivors;  // active set of the next stage
  std::vector<std::size_t> certified;  // fixed-cost learner only: Y_m
};

// ---------------------------------------------------------------------------
// Improved UCB with side observations. Plays the longest active period; every
// round's feedback updates all shorter active periods.
class ImprovedUcbSide : public Policy {
 public:
  ImprovedUcbSide(std::vector<double> periods, long horizon, EliminationRule rule,
                  LossShape shape);

  std::string name() const override;
  std::size_t next_arm() override;
  void observe(const FeedbackRecord& record) override;

  const std::vector<ArmStats>& stats() const { return stats_; }
  const std::vector<std::size_t>& active() const { return active_; }
  const std::vector<StageRecord>& stage_log() const { return log_; }
  int stage() const { return stage_; }
  double gap_guess() const { return gap_guess_; }
  long stage_target() const { return target_; }

 private:
  bool close_stage();
  void start_stage();

  long horizon_;
  EliminationRule rule_;
  LossShape shape_;
  std::vector<ArmStats> stats_;
  std::vector<std::size_t> active_;
  std::vector<StageRecord> log_;
  int stage_ = 0;
  double gap_guess_ = 1.0;
  double gamma_ = 0;
  long target_ = 0;
  long dispatched_ = 0;
  bool clamped_ = false;
};

// Time-associative UCB baseline. Plays argmin_i lambda_bar_i - sqrt(2 ln t / n_i) / x_i.
// With side observations it credits every arm whose loss the round reveals.
class Tucb : public Policy {
 public:
  Tucb(std::vector<double> periods, LossShape shape, bool side_observations,
       double attackable_from = 0.0);

  std::string name() const override;
  std::size_t next_arm() override;
  void observe(const FeedbackRecord& record) override;

  const std::vector<ArmStats>& stats() const { return stats_; }

 private:
  LossShape shape_;
  bool side_;
  double attackable_from_;
  std::vector<ArmStats> stats_;
  std::vector<long> pending_;
  long observed_rounds_ = 0;
};

// Elimination learner for a fixed hidden attack threshold x0. Keeps the set Y
// of periods certified to exceed x0; Y is covered by playing its longest
// active member, every other active period is played on its own.
class FixedCostImprovedUcb : public Policy {
 public:
  FixedCostImprovedUcb(std::vector<double> periods, long horizon, LossShape shape);

  std::string name() const override { return "fixed-cost"; }
  std::size_t next_arm() override;
  void observe(const FeedbackRecord& record) override;

  const std::vector<ArmStats>& stats() const { return stats_; }
  const std::vector<std::size_t>& active() const { return active_; }
  std::vector<std::size_t> certified() const;
  const std::vector<StageRecord>& stage_log() const { return log_; }

 private:
  bool stage_complete() const;
  bool close_stage();
  void start_stage();
  long y_unit_count() const;

  long horizon_;
  LossShape shape_;
  std::vector<ArmStats> stats_;
  std::vector<long> pending_;
  std::vector<bool> in_y_;
  std::vector<std::size_t> active_;
  std::vector<StageRecord> log_;
  int stage_ = 0;
  double gap_guess_ = 1.0;
  double gamma_ = 0;
  long target_ = 0;
  long dispatched_ = 0;
  bool clamped_ = false;
};

// Elimination learner for a per-round random threshold: no side observations,
// every active period is played until its own count reaches n_m.
class RandomCostImprovedUcb : public Policy {
 public:
  RandomCostImprovedUcb(std::vector<double> periods, long horizon);

  std::string name() const override { return "random-cost"; }
  std::size_t next_arm() override;
  void observe(const FeedbackRecord& record) override;

  const std::vector<ArmStats>& stats() const { return stats_; }
  const std::vector<std::size_t>& active() const { return active_; }
  const std::vector<StageRecord>& stage_log() const { return log_; }
  // Plays dispatched per arm in the current stage.
  const std::vector<long>& stage_plays() const { return stage_plays_; }

 private:
  bool close_stage();

  long horizon_;
  double gamma_;
  std::vector<ArmStats> stats_;
  std::vector<long> dispatched_per_arm_;
  std::vector<long> stage_plays_;
  std::vector<std::size_t> active_;
  std::vector<StageRecord> log_;
  int stage_ = 0;
  double gap_guess_ = 1.0;
  long target_ = 0;
  long dispatched_ = 0;
  bool clamped_ = false;
};

// Continuous periods: n = ceil(T^(1/3)) arms at the right endpoints of n equal
// subintervals of [x_min, x_max].
long alg2_arm_count(long horizon);
std::vector<double> alg2_grid(double x_min, double x_max, long n);

}  // namespace flipit
