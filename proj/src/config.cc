#include "flipit/config.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <set>

#include <fmt/format.h>

namespace flipit {
namespace {

using nlohmann::json;

constexpr std::array<std::pair<PolicyKind, std::string_view>, 7> kPolicyNames{{
    {PolicyKind::kAlg1, "alg1"},
    {PolicyKind::kAlg1Aggressive, "alg1-aggressive"},
    {PolicyKind::kAlg2, "alg2"},
    {PolicyKind::kTucb, "tucb"},
    {PolicyKind::kTucbSide, "tucb-side"},
    {PolicyKind::kFixedCost, "fixed-cost"},
    {PolicyKind::kRandomCost, "random-cost"},
}};

std::string join_path(const std::string& base, const std::string& key) {
  return base.empty() ? key : base + "." + key;
}

// Collects problems instead of stopping at the first one.
class Reader {
 public:
  std::vector<std::string> problems;

  void fail(const std::string& path, const std::string& what) {
    problems.push_back(fmt::format("{}: {}", path.empty() ? "<root>" : path, what));
  }

  const json* object(const json& parent, const std::string& path, const char* key,
                     bool required) {
    const std::string p = join_path(path, key);
    if (!parent.contains(key)) {
      if (required) fail(p, "missing");
      return nullptr;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      fail(p, "expected an object");
      return nullptr;
    }
    return &v;
  }

  std::optional<double> number(const json& parent, const std::string& path, const char* key,
                               bool required) {
    const std::string p = join_path(path, key);
    if (!parent.contains(key)) {
      if (required) fail(p, "missing");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if (!v.is_number() || !std::isfinite(v.get<double>())) {
      fail(p, "expected a finite number");
      return std::nullopt;
    }
    return v.get<double>();
  }

  std::optional<long long> integer(const json& parent, const std::string& path, const char* key,
                                   bool required) {
    const std::string p = join_path(path, key);
    if (!parent.contains(key)) {
      if (required) fail(p, "missing");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if (!v.is_number_integer()) {
      fail(p, "expected an integer");
      return std::nullopt;
    }
    return v.get<long long>();
  }

  std::optional<std::string> string(const json& parent, const std::string& path,
                                    const char* key, bool required) {
    const std::string p = join_path(path, key);
    if (!parent.contains(key)) {
      if (required) fail(p, "missing");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if (!v.is_string()) {
      fail(p, "expected a string");
      return std::nullopt;
    }
    return v.get<std::string>();
  }

  // A number or a [lo, hi] pair.
  std::optional<ParamSpec> param(const json& parent, const std::string& path, const char* key) {
    const std::string p = join_path(path, key);
    if (!parent.contains(key)) {
      fail(p, "missing");
      return std::nullopt;
    }
    const json& v = parent.at(key);
    if (v.is_number()) return ParamSpec{v.get<double>(), v.get<double>()};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
      const double lo = v[0].get<double>();
      const double hi = v[1].get<double>();
      if (!(lo <= hi)) {
        fail(p, "range must satisfy lo <= hi");
        return std::nullopt;
      }
      return ParamSpec{lo, hi};
    }
    fail(p, "expected a number or a [lo, hi] pair");
    return std::nullopt;
  }

  void only_keys(const json& obj, const std::string& path,
                 std::initializer_list<std::string_view> allowed) {
    for (const auto& [k, _] : obj.items()) {
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
        fail(join_path(path, k), "unknown field");
      }
    }
  }
};

std::optional<ModelSpec> read_model(Reader& r, const json& obj, const std::string& path) {
  const auto family = r.string(obj, path, "family", true);
  if (!family) return std::nullopt;

  ModelSpec spec;
  auto positive = [&](const char* key) {
    auto p = r.param(obj, path, key);
    if (p && !(p->lo > 0)) {
      r.fail(join_path(path, key), "must be > 0");
      p.reset();
    }
    return p;
  };

  if (*family == "weibull") {
    r.only_keys(obj, path, {"family", "scale", "shape"});
    spec.family = ModelFamily::kWeibull;
    auto scale = positive("scale");
    auto shape = positive("shape");
    if (!scale || !shape) return std::nullopt;
    spec.params = {{"scale", *scale}, {"shape", *shape}};
  } else if (*family == "uniform") {
    r.only_keys(obj, path, {"family", "low", "high"});
    spec.family = ModelFamily::kUniform;
    auto low = r.param(obj, path, "low");
    auto high = r.param(obj, path, "high");
    if (!low || !high) return std::nullopt;
    if (low->lo < 0) {
      r.fail(join_path(path, "low"), "must be >= 0");
      return std::nullopt;
    }
    if (!(low->hi < high->lo)) {
      r.fail(join_path(path, "high"), "must exceed every value of low");
      return std::nullopt;
    }
    spec.params = {{"low", *low}, {"high", *high}};
  } else if (*family == "exponential") {
    r.only_keys(obj, path, {"family", "rate"});
    spec.family = ModelFamily::kExponential;
    auto rate = positive("rate");
    if (!rate) return std::nullopt;
    spec.params = {{"rate", *rate}};
  } else if (*family == "empirical") {
    r.only_keys(obj, path, {"family", "samples"});
    spec.family = ModelFamily::kEmpirical;
    const std::string p = join_path(path, "samples");
    if (!obj.contains("samples") || !obj["samples"].is_array() || obj["samples"].empty()) {
      r.fail(p, "expected a non-empty array of numbers");
      return std::nullopt;
    }
    for (const auto& s : obj["samples"]) {
      if (!s.is_number() || s.get<double>() < 0) {
        r.fail(p, "samples must be numbers >= 0");
        return std::nullopt;
      }
      spec.samples.push_back(s.get<double>());
    }
  } else {
    r.fail(join_path(path, "family"),
           fmt::format("unknown family '{}' (weibull, uniform, exponential, empirical)", *family));
    return std::nullopt;
  }
  return spec;
}

std::optional<PeriodSpec> read_periods(Reader& r, const json& obj, const std::string& path) {
  PeriodSpec spec;
  if (obj.contains("values")) {
    r.only_keys(obj, path, {"values"});
    const std::string p = join_path(path, "values");
    if (!obj["values"].is_array() || obj["values"].empty()) {
      r.fail(p, "expected a non-empty array");
      return std::nullopt;
    }
    for (const auto& v : obj["values"]) {
      if (!v.is_number()) {
        r.fail(p, "values must be numbers");
        return std::nullopt;
      }
      spec.values.push_back(v.get<double>());
    }
    for (std::size_t i = 0; i < spec.values.size(); ++i) {
      if (!(spec.values[i] > 0) || (i > 0 && !(spec.values[i] > spec.values[i - 1]))) {
        r.fail(p, "values must be positive and strictly ascending");
        return std::nullopt;
      }
    }
    spec.min = spec.values.front();
    spec.max = spec.values.back();
    return spec;
  }

  r.only_keys(obj, path, {"min", "max", "step", "continuous"});
  const auto lo = r.number(obj, path, "min", true);
  const auto hi = r.number(obj, path, "max", true);
  if (!lo || !hi) return std::nullopt;
  if (!(*lo > 0 && *lo <= *hi)) {
    r.fail(path, "period bounds must satisfy 0 < min <= max");
    return std::nullopt;
  }
  spec.min = *lo;
  spec.max = *hi;

  const bool continuous = obj.contains("continuous") && obj["continuous"].is_boolean() &&
                          obj["continuous"].get<bool>();
  if (obj.contains("continuous") && !obj["continuous"].is_boolean()) {
    r.fail(join_path(path, "continuous"), "expected a boolean");
    return std::nullopt;
  }
  if (continuous) {
    if (obj.contains("step")) {
      r.fail(join_path(path, "step"), "not allowed with continuous periods");
      return std::nullopt;
    }
    spec.continuous = true;
    return spec;
  }

  const auto step = r.number(obj, path, "step", true);
  if (!step) return std::nullopt;
  if (!(*step > 0)) {
    r.fail(join_path(path, "step"), "must be > 0");
    return std::nullopt;
  }
  const auto count = static_cast<long>(std::floor((*hi - *lo) / *step + 1e-9)) + 1;
  if (count > 100000) {
    r.fail(join_path(path, "step"), "more than 100000 arms");
    return std::nullopt;
  }
  for (long k = 0; k < count; ++k) spec.values.push_back(*lo + static_cast<double>(k) * *step);
  spec.max = spec.values.back();
  return spec;
}

std::optional<CostSpec> read_cost(Reader& r, const json& obj, const std::string& path) {
  CostSpec spec;
  const auto variant = r.string(obj, path, "variant", true);
  if (!variant) return std::nullopt;
  if (*variant == "none") {
    r.only_keys(obj, path, {"variant"});
  } else if (*variant == "fixed") {
    r.only_keys(obj, path, {"variant", "threshold"});
    const auto x0 = r.number(obj, path, "threshold", true);
    if (!x0) return std::nullopt;
    if (*x0 < 0) {
      r.fail(join_path(path, "threshold"), "must be >= 0");
      return std::nullopt;
    }
    spec.kind = CostKind::kFixed;
    spec.threshold = *x0;
  } else if (*variant == "random") {
    r.only_keys(obj, path, {"variant", "model"});
    const json* m = r.object(obj, path, "model", true);
    if (!m) return std::nullopt;
    auto model = read_model(r, *m, join_path(path, "model"));
    if (!model) return std::nullopt;
    spec.kind = CostKind::kRandom;
    spec.threshold_model = std::move(model);
  } else {
    r.fail(join_path(path, "variant"), fmt::format("unknown variant '{}' (none, fixed, random)",
                                                   *variant));
    return std::nullopt;
  }
  return spec;
}

void cross_checks(const ExperimentConfig& c, std::vector<std::string>& problems) {
  auto fail = [&](const std::string& path, const std::string& what) {
    problems.push_back(fmt::format("{}: {}", path, what));
  };
  if (c.horizon < 1) fail("horizon", "must be >= 1");
  if (c.trials < 1) fail("trials", "must be >= 1");
  if (c.nodes < 1) fail("nodes", "must be >= 1");
  if (!(c.defense_cost >= 0 && c.defense_cost < 1)) fail("loss.defense_cost", "must be in [0, 1)");
  if (c.policies.empty()) fail("policies", "at least one policy required");
  if (c.flavor == LossFlavor::kLinear && c.x_max_norm && *c.x_max_norm < c.periods.max) {
    fail("loss.x_max_norm", "must be >= the longest period");
  }

  std::set<PolicyKind> seen;
  for (std::size_t i = 0; i < c.policies.size(); ++i) {
    const PolicyKind p = c.policies[i];
    const std::string path = fmt::format("policies[{}]", i);
    if (!seen.insert(p).second) fail(path, "duplicate policy");
    const bool needs_continuous = p == PolicyKind::kAlg2;
    if (needs_continuous != c.periods.continuous) {
      fail(path, needs_continuous ? "alg2 needs continuous periods"
                                  : "continuous periods are only supported by alg2");
    }
    const CostKind want = p == PolicyKind::kFixedCost    ? CostKind::kFixed
                          : p == PolicyKind::kRandomCost ? CostKind::kRandom
                                                         : CostKind::kNone;
    if (want != c.cost.kind) {
      fail(path, fmt::format("{} does not match loss.cost.variant", policy_name(p)));
    }
  }
  if (c.periods.continuous && c.horizon < 8) fail("horizon", "alg2 needs horizon >= 8");
}

json param_json(const ParamSpec& p) {
  if (p.ranged()) return json::array({p.lo, p.hi});
  return p.lo;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error([&] {
        std::string msg = "invalid config";
        for (const auto& p : problems) msg += "\n  " + p;
        return msg;
      }()),
      problems_(std::move(problems)) {}

std::string_view policy_name(PolicyKind kind) {
  for (const auto& [k, name] : kPolicyNames) {
    if (k == kind) return name;
  }
  return "?";
}

std::optional<PolicyKind> parse_policy(std::string_view name) {
  for (const auto& [k, n] : kPolicyNames) {
    if (n == name) return k;
  }
  return std::nullopt;
}

AttackModel ModelSpec::instantiate(RandomStream& rng, json* drawn) const {
  std::vector<double> v;
  for (const auto& [name, p] : params) {
    v.push_back(p.draw(rng));
    if (drawn) (*drawn)[name] = v.back();
  }
  switch (family) {
    case ModelFamily::kWeibull:
      return AttackModel::weibull(v.at(0), v.at(1));
    case ModelFamily::kUniform:
      return AttackModel::uniform(v.at(0), v.at(1));
    case ModelFamily::kExponential:
      return AttackModel::exponential(v.at(0));
    case ModelFamily::kEmpirical:
      return AttackModel::empirical(samples);
  }
  throw std::logic_error("unhandled model family");
}

json ModelSpec::to_json() const {
  json out;
  switch (family) {
    case ModelFamily::kWeibull: out["family"] = "weibull"; break;
    case ModelFamily::kUniform: out["family"] = "uniform"; break;
    case ModelFamily::kExponential: out["family"] = "exponential"; break;
    case ModelFamily::kEmpirical: out["family"] = "empirical"; break;
  }
  for (const auto& [name, p] : params) out[name] = param_json(p);
  if (family == ModelFamily::kEmpirical) out["samples"] = samples;
  return out;
}

double ExperimentConfig::effective_x_max_norm() const {
  return x_max_norm.value_or(periods.max);
}

json ExperimentConfig::to_json() const {
  json out;
  out["model"] = model.to_json();
  json loss;
  loss["flavor"] = flavor == LossFlavor::kBinary ? "binary" : "linear";
  loss["defense_cost"] = defense_cost;
  if (flavor == LossFlavor::kLinear) loss["x_max_norm"] = effective_x_max_norm();
  json cost;
  switch (this->cost.kind) {
    case CostKind::kNone: cost["variant"] = "none"; break;
    case CostKind::kFixed:
      cost["variant"] = "fixed";
      cost["threshold"] = this->cost.threshold;
      break;
    case CostKind::kRandom:
      cost["variant"] = "random";
      cost["model"] = this->cost.threshold_model->to_json();
      break;
  }
  loss["cost"] = cost;
  out["loss"] = loss;
  if (periods.continuous) {
    out["periods"] = {{"min", periods.min}, {"max", periods.max}, {"continuous", true}};
  } else {
    out["periods"] = {{"values", periods.values}};
  }
  json names = json::array();
  for (PolicyKind p : policies) names.push_back(policy_name(p));
  out["policies"] = names;
  out["horizon"] = horizon;
  out["trials"] = trials;
  out["seed"] = seed;
  out["nodes"] = nodes;
  return out;
}

ExperimentConfig parse_config(const json& doc) {
  Reader r;
  ExperimentConfig c;
  if (!doc.is_object()) throw ConfigError({"<root>: expected a JSON object"});
  r.only_keys(doc, "", {"model", "loss", "periods", "policies", "horizon", "trials", "seed",
                        "nodes"});

  if (const json* m = r.object(doc, "", "model", true)) {
    if (auto model = read_model(r, *m, "model")) c.model = std::move(*model);
  }

  if (const json* loss = r.object(doc, "", "loss", true)) {
    r.only_keys(*loss, "loss", {"flavor", "defense_cost", "x_max_norm", "cost"});
    if (auto flavor = r.string(*loss, "loss", "flavor", true)) {
      if (*flavor == "binary") {
        c.flavor = LossFlavor::kBinary;
      } else if (*flavor == "linear") {
        c.flavor = LossFlavor::kLinear;
      } else {
        r.fail("loss.flavor", fmt::format("unknown flavor '{}' (binary, linear)", *flavor));
      }
    }
    if (auto cd = r.number(*loss, "loss", "defense_cost", true)) c.defense_cost = *cd;
    if (auto norm = r.number(*loss, "loss", "x_max_norm", false)) {
      if (*norm > 0) {
        c.x_max_norm = *norm;
      } else {
        r.fail("loss.x_max_norm", "must be > 0");
      }
    }
    if (const json* cost = r.object(*loss, "loss", "cost", false)) {
      if (auto spec = read_cost(r, *cost, "loss.cost")) c.cost = std::move(*spec);
    }
  }

  if (const json* periods = r.object(doc, "", "periods", true)) {
    if (auto spec = read_periods(r, *periods, "periods")) c.periods = std::move(*spec);
  }

  if (!doc.contains("policies") || !doc["policies"].is_array()) {
    r.fail("policies", "expected an array of policy names");
  } else {
    const auto& arr = doc["policies"];
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string path = fmt::format("policies[{}]", i);
      if (!arr[i].is_string()) {
        r.fail(path, "expected a string");
        continue;
      }
      const auto kind = parse_policy(arr[i].get<std::string>());
      if (!kind) {
        r.fail(path, fmt::format("unknown policy '{}'", arr[i].get<std::string>()));
        continue;
      }
      c.policies.push_back(*kind);
    }
  }

  if (auto t = r.integer(doc, "", "horizon", true)) c.horizon = static_cast<long>(*t);
  if (auto n = r.integer(doc, "", "trials", true)) {
    c.trials = static_cast<int>(std::clamp<long long>(*n, -1, 1'000'000'000));
  }
  if (auto s = r.integer(doc, "", "seed", false)) {
    if (*s < 0) {
      r.fail("seed", "must be >= 0");
    } else {
      c.seed = static_cast<std::uint64_t>(*s);
    }
  }
  if (auto n = r.integer(doc, "", "nodes", false)) {
    c.nodes = static_cast<int>(std::clamp<long long>(*n, -1, 1'000'000));
  }

  if (r.problems.empty()) cross_checks(c, r.problems);
  if (!r.problems.empty()) throw ConfigError(std::move(r.problems));
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({fmt::format("<file>: cannot read {}", path.string())});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({fmt::format("<file>: {} is not valid JSON: {}", path.string(), e.what())});
  }
  return parse_config(doc);
}

void validate_config(const ExperimentConfig& config) {
  std::vector<std::string> problems;
  cross_checks(config, problems);
  if (!problems.empty()) throw ConfigError(std::move(problems));
}

json fig2_preset(LossFlavor flavor) {
  json doc;
  doc["model"] = {{"family", "weibull"}, {"scale", json::array({1.0, 20.0})}, {"shape", 2.0}};
  doc["loss"] = {{"flavor", flavor == LossFlavor::kBinary ? "binary" : "linear"},
                 {"defense_cost", 0.1},
                 {"cost", {{"variant", "none"}}}};
  if (flavor == LossFlavor::kLinear) doc["loss"]["x_max_norm"] = 10.0;
  doc["periods"] = {{"min", 1.0}, {"max", 10.0}, {"step", 0.5}};
  doc["policies"] = {"alg1-aggressive", "alg1", "tucb-side", "tucb"};
  doc["horizon"] = 10000;
  doc["trials"] = 100;
  doc["seed"] = 1;
  doc["nodes"] = 1;
  return doc;
}

}  // namespace flipit
