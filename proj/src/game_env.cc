#include "flipit/game_env.h"

#include <algorithm>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace flipit {

AttackStream::AttackStream(const LossSpec& spec, const AttackModel& model, std::uint64_t seed)
    : spec_(&spec), model_(&model), rng_(make_stream(seed, StreamId::kAttacks)) {}

SealedDraw AttackStream::next() {
  SealedDraw draw{model_->sample(rng_), std::nullopt};
  if (const auto* fixed = std::get_if<FixedCost>(&spec_->cost)) {
    draw.threshold = fixed->threshold;
  } else if (const auto* random = std::get_if<RandomCost>(&spec_->cost)) {
    draw.threshold = random->threshold_model.sample(rng_);
  }
  return draw;
}

std::size_t GameTrace::total_rounds() const {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node.records.size();
  return n;
}

void GameTrace::append(const FeedbackRecord& record, const SealedDraw& draw) {
  auto& node = nodes_.at(record.node - 1);
  node.records.push_back(record);
  node.wall_time = record.end_time();
  sealed_.at(record.node - 1).push_back(draw);
}

GameEnv::GameEnv(LossSpec spec, AttackModel model, PeriodBounds bounds, int nodes,
                 std::uint64_t seed)
    : spec_(std::move(spec)),
      model_(std::move(model)),
      bounds_(bounds),
      stream_(spec_, model_, seed),
      trace_(nodes, seed) {
  if (nodes < 1) throw std::invalid_argument("environment needs at least one node");
  if (!(bounds.min > 0.0) || bounds.max < bounds.min) {
    throw std::invalid_argument(
        fmt::format("period bounds must satisfy 0 < min <= max (got {}, {})", bounds.min,
                    bounds.max));
  }
  spec_.validate();
}

FeedbackRecord resolve_round(const LossSpec& spec, const SealedDraw& draw, double period) {
  FeedbackRecord rec;
  rec.period = period;
  const bool launched = attack_launched(period, draw.threshold);
  rec.realized_loss = round_loss(spec, period, draw.attack_time, draw.threshold);
  if (launched && draw.attack_time < period) rec.attack_time = draw.attack_time;
  rec.threshold_observable = spec.has_cost() && !launched;
  return rec;
}

FeedbackRecord GameEnv::play_round(int node, double period) {
  if (node < 1 || node > trace_.node_count()) {
    throw std::out_of_range(fmt::format("unknown node id {}", node));
  }
  if (period < bounds_.min || period > bounds_.max) {
    throw std::domain_error(fmt::format("period {} outside [{}, {}]", period, bounds_.min,
                                        bounds_.max));
  }
  const SealedDraw draw = stream_.next();
  FeedbackRecord rec = resolve_round(spec_, draw, period);
  const auto& history = trace_.node(node);
  rec.node = node;
  rec.round = static_cast<long>(history.records.size()) + 1;
  rec.tau_start = history.wall_time;
  trace_.append(rec, draw);
  return rec;
}

std::vector<std::optional<double>> side_observations(const LossShape& shape,
                                                     const FeedbackRecord& record,
                                                     std::span<const double> periods,
                                                     double attackable_from) {
  std::vector<std::optional<double>> out(periods.size());
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const double p = periods[i];
    if (record.observed()) {
      const double a = *record.attack_time;
      if (p <= a) {
        out[i] = shape.defense_cost;  // no damage whether or not attacked
      } else if (p >= record.period || p >= attackable_from) {
        out[i] = shape.loss(p, a);
      }
    } else if (p <= record.period) {
      out[i] = shape.defense_cost;
    }
  }
  return out;
}

std::vector<FeedbackRecord> pooled_feedback(const GameTrace& trace, double before) {
  std::vector<FeedbackRecord> out;
  for (int id = 1; id <= trace.node_count(); ++id) {
    for (const auto& rec : trace.node(id).records) {
      if (rec.end_time() <= before) out.push_back(rec);
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const auto& l, const auto& r) {
    if (l.end_time() != r.end_time()) return l.end_time() < r.end_time();
    return l.node < r.node;
  });
  return out;
}

void write_trace_csv(const GameTrace& trace, std::ostream& out) {
  out << "node,round,tau_start,period,observed,attack_time_or_empty,loss\n";
  for (int id = 1; id <= trace.node_count(); ++id) {
    for (const auto& r : trace.node(id).records) {
      out << fmt::format("{},{},{},{},{},{},{}\n", r.node, r.round, r.tau_start, r.period,
                         r.observed() ? 1 : 0,
                         r.observed() ? fmt::format("{}", *r.attack_time) : std::string(),
                         r.realized_loss);
    }
  }
}

void write_trace_json(const GameTrace& trace, std::ostream& out) {
  nlohmann::json doc;
  doc["seed"] = trace.seed();
  doc["nodes"] = nlohmann::json::array();
  for (int id = 1; id <= trace.node_count(); ++id) {
    nlohmann::json rounds = nlohmann::json::array();
    for (const auto& r : trace.node(id).records) {
      nlohmann::json row{{"round", r.round},
                         {"tau_start", r.tau_start},
                         {"period", r.period},
                         {"observed", r.observed()},
                         {"loss", r.realized_loss}};
      row["attack_time"] = r.observed() ? nlohmann::json(*r.attack_time) : nlohmann::json();
      rounds.push_back(std::move(row));
    }
    doc["nodes"].push_back({{"node", id},
                            {"wall_time", trace.node(id).wall_time},
                            {"rounds", std::move(rounds)}});
  }
  out << doc.dump(2) << '\n';
}

}  // namespace flipit
