#include "flipit/output.h"

#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

namespace flipit {
namespace {

constexpr const char* kTrialsHeader = "trial,policy,round,period,loss,expected_loss,cum_regret";

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Regenerates one (trial, policy) block row by row.
struct ReplayCursor {
  int trial = -1;
  std::string policy;
  std::unique_ptr<TrialInstance> instance;
  std::unique_ptr<AttackStream> stream;
  OracleTable table;
  long round = 0;
  double regret = 0;
};

}  // namespace

std::string format_number(double v) { return fmt::format("{}", v); }

void write_trials_csv(const ExperimentResult& result, std::ostream& out) {
  out << kTrialsHeader << '\n';
  for (const auto& trial : result.trials) {
    for (const auto& trace : trial.traces) {
      long round = 0;
      for (const auto& r : trace.rounds) {
        out << fmt::format("{},{},{},{},{},{},{}\n", trial.trial, trace.meta.policy, ++round,
                           r.period, r.loss, r.expected_loss, r.cum_regret);
      }
    }
  }
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out) {
  out << "policy,checkpoint,mean,stderr\n";
  for (const auto& r : rows) {
    out << fmt::format("{},{},{},{}\n", r.policy, r.checkpoint, r.mean, r.stderr_);
  }
}

nlohmann::json make_manifest(const ExperimentResult& result) {
  nlohmann::json m;
  m["format"] = "flipit-run-1";
  m["config"] = result.config.to_json();
  nlohmann::json trials = nlohmann::json::array();
  for (const auto& trial : result.trials) {
    nlohmann::json t;
    t["trial"] = trial.trial;
    t["seed"] = trial.seed;
    t["params"] = trial.params;
    nlohmann::json digests = nlohmann::json::object();
    nlohmann::json regret = nlohmann::json::object();
    for (const auto& trace : trial.traces) {
      digests[trace.meta.policy] = trace.meta.oracle_digest;
      regret[trace.meta.policy] = trace.final_regret;
    }
    t["oracle_digest"] = digests;
    t["final_regret"] = regret;
    trials.push_back(std::move(t));
  }
  m["trials"] = std::move(trials);
  return m;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
    out << content;
    if (!out.flush()) throw std::runtime_error(fmt::format("cannot write {}", tmp.string()));
  }
  std::filesystem::rename(tmp, path);
}

void write_run_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::ostringstream trials;
  write_trials_csv(result, trials);
  std::ostringstream agg;
  write_aggregate_csv(aggregate(result), agg);
  write_file_atomic(dir / "trials.csv", trials.str());
  write_file_atomic(dir / "aggregate.csv", agg.str());
  write_file_atomic(dir / "manifest.json", make_manifest(result).dump(2) + "\n");
}

ReplayReport replay_trials(std::istream& trials_csv, const nlohmann::json& manifest) {
  ReplayReport report;
  auto mismatch = [&](long line, std::string detail) {
    report.verified = false;
    report.mismatch_line = line;
    report.detail = std::move(detail);
    return report;
  };

  const ExperimentConfig config = parse_config(manifest.at("config"));
  const auto& trials = manifest.at("trials");

  std::string line;
  long line_no = 1;
  if (!std::getline(trials_csv, line) || line != kTrialsHeader) {
    return mismatch(1, "unexpected header");
  }

  ReplayCursor cur;
  while (std::getline(trials_csv, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 7) return mismatch(line_no, "expected 7 columns");

    int trial = 0;
    long round = 0;
    double period = 0;
    try {
      trial = std::stoi(cells[0]);
      round = std::stol(cells[2]);
      period = std::stod(cells[3]);
    } catch (const std::exception&) {
      return mismatch(line_no, "malformed number");
    }
    const auto kind = parse_policy(cells[1]);
    if (!kind) return mismatch(line_no, fmt::format("unknown policy '{}'", cells[1]));
    if (trial < 0 || trial >= config.trials) return mismatch(line_no, "trial out of range");

    if (trial != cur.trial || cells[1] != cur.policy) {
      cur.trial = trial;
      cur.policy = cells[1];
      cur.instance = std::make_unique<TrialInstance>(make_instance(config, trial));
      if (trials.at(trial).at("seed").get<std::uint64_t>() != cur.instance->seed) {
        return mismatch(line_no, "manifest seed does not match the base seed");
      }
      cur.table = policy_table(config, *cur.instance, *kind);
      cur.stream = std::make_unique<AttackStream>(cur.instance->spec, cur.instance->model,
                                                  cur.instance->seed);
      cur.round = 0;
      cur.regret = 0;
    }

    if (round != ++cur.round) {
      return mismatch(line_no, fmt::format("round {} where {} was expected", round, cur.round));
    }
    std::size_t arm = 0;
    try {
      arm = cur.table.index_of(period);
    } catch (const std::out_of_range&) {
      return mismatch(line_no, fmt::format("period {} is not an arm", cells[3]));
    }
    const FeedbackRecord rec = resolve_round(cur.instance->spec, cur.stream->next(), period);
    cur.regret += cur.table.gaps[arm];

    const std::string expect[3] = {format_number(rec.realized_loss),
                                   format_number(cur.table.losses[arm]),
                                   format_number(cur.regret)};
    const char* names[3] = {"loss", "expected_loss", "cum_regret"};
    for (int k = 0; k < 3; ++k) {
      if (cells[4 + k] != expect[k]) {
        return mismatch(line_no, fmt::format("{} is {}, recomputed {}", names[k], cells[4 + k],
                                             expect[k]));
      }
    }
    ++report.rows;
  }
  return report;
}

}  // namespace flipit
