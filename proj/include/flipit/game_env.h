#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "flipit/attack_model.h"
#include "flipit/loss.h"
#include "flipit/random.h"

namespace flipit {

// What the defender learns when a round ends.
struct FeedbackRecord {
  long round = 0;       // 1-based round index on this node
  int node = 1;         // 1-based node id
  double tau_start = 0;  // wall time of the update that opened the round
  double period = 0;
  std::optional<double> attack_time;  // present iff an attack completed before the update
  double realized_loss = 0;
  // Environment metadata: a cost variant is active and no attack was launched.
  // Learners must not rely on it.
  bool threshold_observable = false;

  bool observed() const { return attack_time.has_value(); }
  double end_time() const { return tau_start + period; }
};

// Raw per-round draws. Hidden from learners; see testing/sealed_access.h.
struct SealedDraw {
  double attack_time;
  std::optional<double> threshold;
};

// Deterministic per-trial source of (a_t, x0_t) draws, indexed by dispatch order.
class AttackStream {
 public:
  AttackStream(const LossSpec& spec, const AttackModel& model, std::uint64_t seed);
  SealedDraw next();

 private:
  const LossSpec* spec_;
  const AttackModel* model_;
  RandomStream rng_;
};

class GameTrace {
 public:
  struct NodeTrace {
    std::vector<FeedbackRecord> records;
    double wall_time = 0;
  };

  GameTrace(int nodes, std::uint64_t seed) : nodes_(nodes), sealed_(nodes), seed_(seed) {}

  int node_count() const { return static_cast<int>(nodes_.size()); }
  const NodeTrace& node(int id) const { return nodes_.at(id - 1); }
  std::uint64_t seed() const { return seed_; }
  std::size_t total_rounds() const;

  void append(const FeedbackRecord& record, const SealedDraw& draw);

 private:
  friend class SealedAccess;
  std::vector<NodeTrace> nodes_;
  std::vector<std::vector<SealedDraw>> sealed_;
  std::uint64_t seed_;
};

struct PeriodBounds {
  double min;
  double max;
};

// One trial's FlipIt-variant environment. The attacker is myopic: it attacks
// right after every update unless deterred by the cost variant.
class GameEnv {
 public:
  GameEnv(LossSpec spec, AttackModel model, PeriodBounds bounds, int nodes, std::uint64_t seed);
  GameEnv(const GameEnv&) = delete;
  GameEnv& operator=(const GameEnv&) = delete;

  // Plays one round of length `period` on `node`. Throws std::out_of_range for
  // an unknown node and std::domain_error for a period outside the bounds.
  FeedbackRecord play_round(int node, double period);

  const GameTrace& trace() const { return trace_; }
  const LossSpec& spec() const { return spec_; }
  const AttackModel& model() const { return model_; }
  int node_count() const { return trace_.node_count(); }

 private:
  LossSpec spec_;
  AttackModel model_;
  PeriodBounds bounds_;
  AttackStream stream_;
  GameTrace trace_;
};

// Builds the realized feedback of one round from its raw draws.
FeedbackRecord resolve_round(const LossSpec& spec, const SealedDraw& draw, double period);

// Losses deducible for each candidate period from one round's feedback;
// nullopt where the loss cannot be determined. Periods at or above
// `attackable_from` are known to draw an attack whenever one is launched at
// the played period (pass 0 when there is no attack cost).
std::vector<std::optional<double>> side_observations(const LossShape& shape,
                                                     const FeedbackRecord& record,
                                                     std::span<const double> periods,
                                                     double attackable_from = 0.0);

// All records that ended at or before `before`, ordered by end time, ties by node.
std::vector<FeedbackRecord> pooled_feedback(const GameTrace& trace, double before);

// CSV columns: node,round,tau_start,period,observed,attack_time_or_empty,loss
void write_trace_csv(const GameTrace& trace, std::ostream& out);
void write_trace_json(const GameTrace& trace, std::ostream& out);

}  // namespace flipit
