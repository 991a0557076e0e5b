#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "flipit/harness.h"

namespace flipit {

// Shortest decimal text that reads back to the same double.
std::string format_number(double v);

// Columns: trial,policy,round,period,loss,expected_loss,cum_regret
void write_trials_csv(const ExperimentResult& result, std::ostream& out);
// Columns: policy,checkpoint,mean,stderr
void write_aggregate_csv(const std::vector<AggregateRow>& rows, std::ostream& out);
// Config echo, per-trial seeds and drawn parameters, oracle digests.
nlohmann::json make_manifest(const ExperimentResult& result);

// Writes trials.csv, aggregate.csv and manifest.json into `dir`.
void write_run_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

struct ReplayReport {
  bool verified = true;
  long rows = 0;
  long mismatch_line = 0;  // 1-based CSV line of the first mismatch
  std::string detail;
};

// Recomputes every row of a trials CSV from the manifest: the instance and the
// sealed attack draws are regenerated from the trial seed.
ReplayReport replay_trials(std::istream& trials_csv, const nlohmann::json& manifest);

}  // namespace flipit
