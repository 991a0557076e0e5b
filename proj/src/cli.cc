#include "flipit/cli.h"

#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "flipit/config.h"
#include "flipit/harness.h"
#include "flipit/output.h"

namespace flipit {
namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  std::optional<long> horizon;
  std::optional<std::string> policies;
  int jobs = 1;
};

void add_overrides(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--seed", o.seed, "Base seed; trial t uses seed + t");
  cmd->add_option("--trials", o.trials, "Number of trials");
  cmd->add_option("--horizon", o.horizon, "Rounds per trial (total over all nodes)");
  cmd->add_option("--policies", o.policies, "Comma-separated policy names");
  cmd->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
}

void apply_overrides(ExperimentConfig& c, const Overrides& o) {
  if (o.seed) c.seed = *o.seed;
  if (o.trials) c.trials = *o.trials;
  if (o.horizon) c.horizon = *o.horizon;
  if (o.policies) {
    std::vector<std::string> problems;
    c.policies.clear();
    std::istringstream in(*o.policies);
    std::string name;
    while (std::getline(in, name, ',')) {
      if (auto kind = parse_policy(name)) {
        c.policies.push_back(*kind);
      } else {
        problems.push_back(fmt::format("--policies: unknown policy '{}'", name));
      }
    }
    if (!problems.empty()) throw ConfigError(std::move(problems));
  }
  validate_config(c);
}

int cmd_run(const std::string& config_path, const std::string& out_dir, const Overrides& o,
            std::ostream& out) {
  ExperimentConfig config = load_config(config_path);
  apply_overrides(config, o);
  const auto result = run_experiment(config, {.jobs = o.jobs, .keep_rounds = true});
  write_run_outputs(result, out_dir);
  for (const auto& row : aggregate(result)) {
    if (row.checkpoint == config.horizon) {
      out << fmt::format("{:<16} mean regret {:.4f} (stderr {:.4f})\n", row.policy, row.mean,
                         row.stderr_);
    }
  }
  return kExitOk;
}

int cmd_fig2(const std::string& config_path, const std::string& out_dir, const Overrides& o,
             std::ostream& out) {
  nlohmann::json manifest;
  std::vector<std::pair<std::string, std::string>> files;
  // Parse and validate both flavors before running anything.
  std::vector<std::pair<std::string, ExperimentConfig>> runs;
  for (LossFlavor flavor : {LossFlavor::kBinary, LossFlavor::kLinear}) {
    const std::string name = flavor == LossFlavor::kBinary ? "binary" : "linear";
    nlohmann::json doc = fig2_preset(flavor);
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw ConfigError({fmt::format("<file>: cannot read {}", config_path)});
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError({fmt::format("<file>: not valid JSON: {}", e.what())});
      }
      if (!doc.is_object() || !doc.contains("loss") || !doc["loss"].is_object()) {
        throw ConfigError({"loss: missing"});
      }
      doc["loss"]["flavor"] = name;
      if (flavor == LossFlavor::kBinary) doc["loss"].erase("x_max_norm");
    }
    ExperimentConfig config = parse_config(doc);
    apply_overrides(config, o);
    runs.emplace_back(name, std::move(config));
  }

  for (const auto& [name, config] : runs) {
    const auto result = run_experiment(config, {.jobs = o.jobs, .keep_rounds = false});
    std::ostringstream csv;
    const auto rows = aggregate(result);
    write_aggregate_csv(rows, csv);
    files.emplace_back("aggregate_" + name + ".csv", csv.str());
    manifest[name] = make_manifest(result);
    for (const auto& row : rows) {
      if (row.checkpoint == config.horizon) {
        out << fmt::format("{:<7} {:<16} mean regret {:.4f} (stderr {:.4f})\n", name, row.policy,
                           row.mean, row.stderr_);
      }
    }
  }
  std::filesystem::create_directories(out_dir);
  for (const auto& [file, content] : files) {
    write_file_atomic(std::filesystem::path(out_dir) / file, content);
  }
  write_file_atomic(std::filesystem::path(out_dir) / "manifest.json", manifest.dump(2) + "\n");
  return kExitOk;
}

int cmd_oracle_dump(const std::string& config_path, int trial, const std::string& out_path,
                    std::ostream& out) {
  const ExperimentConfig config = load_config(config_path);
  if (trial < 0 || trial >= config.trials) {
    throw ConfigError({fmt::format("--trial: must be in [0, {})", config.trials)});
  }
  const TrialInstance instance = make_instance(config, trial);
  const OracleTable table = policy_table(config, instance, config.policies.front());
  std::ostringstream csv;
  write_table_csv(table, csv);
  if (out_path.empty()) {
    out << csv.str();
  } else {
    write_file_atomic(out_path, csv.str());
  }
  return kExitOk;
}

int cmd_theorem_check(const std::string& config_path, const Overrides& o, std::ostream& out) {
  ExperimentConfig config = load_config(config_path);
  apply_overrides(config, o);
  const auto result = run_experiment(config, {.jobs = o.jobs, .keep_rounds = false});
  const auto report = theorem_report(result);
  bool ok = true;
  for (const auto& r : report) {
    out << fmt::format("{:<16} {:<12} measured {:.4f} bound {:.4f} (min {:.4f}) {}\n", r.policy,
                       r.bound_name, r.measured_mean, r.bound_mean, r.bound_min,
                       r.holds ? "ok" : "VIOLATED");
    ok = ok && r.holds;
  }
  if (report.empty()) out << "no configured policy has a regret bound\n";
  return ok ? kExitOk : kExitBoundViolated;
}

int cmd_replay(const std::string& dir, std::string trace_path, std::string manifest_path,
               std::ostream& out) {
  if (trace_path.empty()) trace_path = (std::filesystem::path(dir) / "trials.csv").string();
  if (manifest_path.empty()) {
    manifest_path = (std::filesystem::path(dir) / "manifest.json").string();
  }
  std::ifstream trace(trace_path);
  if (!trace) throw std::runtime_error(fmt::format("cannot read {}", trace_path));
  std::ifstream mf(manifest_path);
  if (!mf) throw std::runtime_error(fmt::format("cannot read {}", manifest_path));
  const auto manifest = nlohmann::json::parse(mf);
  const ReplayReport report = replay_trials(trace, manifest);
  if (report.verified) {
    out << fmt::format("verified ({} rows)\n", report.rows);
    return kExitOk;
  }
  out << fmt::format("mismatch at line {}: {}\n", report.mismatch_line, report.detail);
  return kExitReplayMismatch;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Security update scheduling against stealthy attacks: learners and experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  Overrides overrides;

  auto* run = app.add_subcommand("run", "Run an experiment from a JSON config");
  run->add_option("--config", config_path, "Experiment config (JSON)")->required();
  run->add_option("--out", out_dir, "Output directory")->required();
  add_overrides(run, overrides);

  auto* fig2 = app.add_subcommand("reproduce-fig2",
                                  "Four-policy comparison for the binary and linear losses");
  fig2->add_option("--config", config_path, "Preset to use instead of the built-in one");
  fig2->add_option("--out", out_dir, "Output directory")->required();
  add_overrides(fig2, overrides);

  int trial = 0;
  auto* dump = app.add_subcommand("oracle-dump", "Print the oracle table of one trial");
  dump->add_option("--config", config_path, "Experiment config (JSON)")->required();
  dump->add_option("--trial", trial, "Trial index");
  dump->add_option("--out", out_dir, "Write the CSV here instead of stdout");

  auto* check = app.add_subcommand("theorem-check", "Compare measured regret with the bounds");
  check->add_option("--config", config_path, "Experiment config (JSON)")->required();
  add_overrides(check, overrides);

  std::string trace_path;
  std::string manifest_path;
  auto* replay = app.add_subcommand("replay", "Recompute a trials CSV from its manifest");
  replay->add_option("--out", out_dir, "Run directory holding trials.csv and manifest.json");
  replay->add_option("--trace", trace_path, "Trials CSV");
  replay->add_option("--manifest", manifest_path, "Run manifest");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(config_path, out_dir, overrides, out);
    if (*fig2) return cmd_fig2(config_path, out_dir, overrides, out);
    if (*dump) return cmd_oracle_dump(config_path, trial, out_dir, out);
    if (*check) return cmd_theorem_check(config_path, overrides, out);
    if (*replay) {
      if (out_dir.empty() && (trace_path.empty() || manifest_path.empty())) {
        err << "replay: give --out or both --trace and --manifest\n";
        return kExitConfig;
      }
      return cmd_replay(out_dir, trace_path, manifest_path, out);
    }
  } catch (const ConfigError& e) {
    err << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitConfig;
}

}  // namespace flipit
