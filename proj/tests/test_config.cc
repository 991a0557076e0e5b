#include <doctest.h>

#include <algorithm>
#include <fstream>

#include "flipit/config.h"
#include "support.h"

using namespace flipit;
using nlohmann::json;

namespace {

std::vector<std::string> problems_of(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.problems();
  }
  return {};
}

bool mentions(const std::vector<std::string>& problems, const std::string& path) {
  return std::any_of(problems.begin(), problems.end(),
                     [&](const std::string& p) { return p.rfind(path + ":", 0) == 0; });
}

}  // namespace

TEST_CASE("preset parses into the 19-arm weibull setup") {
  const auto c = parse_config(fig2_preset(LossFlavor::kBinary));
  REQUIRE(c.periods.values.size() == 19);
  CHECK(c.periods.values.front() == 1);
  CHECK(c.periods.values.back() == 10);
  CHECK(c.periods.values[1] == 1.5);
  CHECK(c.model.family == ModelFamily::kWeibull);
  CHECK(c.model.params[0].second.lo == 1);
  CHECK(c.model.params[0].second.hi == 20);
  CHECK(c.policies.size() == 4);
  CHECK(c.horizon == 10000);
  CHECK(c.trials == 100);
  CHECK(c.defense_cost == 0.1);

  const auto lin = parse_config(fig2_preset(LossFlavor::kLinear));
  CHECK(lin.flavor == LossFlavor::kLinear);
  CHECK(lin.effective_x_max_norm() == 10);
}

TEST_CASE("checked-in preset matches the built-in one") {
  const auto file = load_config(std::string(FLIPIT_CONFIG_DIR) + "/fig2.json");
  const auto builtin = parse_config(fig2_preset(LossFlavor::kBinary));
  CHECK(file.to_json() == builtin.to_json());
}

TEST_CASE("config echo round-trips") {
  for (const char* name : {"fig2", "fixed_cost", "random_cost", "continuous", "multinode"}) {
    const auto c = load_config(std::string(FLIPIT_CONFIG_DIR) + "/" + name + ".json");
    const auto again = parse_config(c.to_json());
    CHECK(again.to_json() == c.to_json());
  }
}

TEST_CASE("ranged parameters draw inside their range, scalars stay fixed") {
  const auto c = parse_config(fig2_preset(LossFlavor::kBinary));
  RandomStream rng(5, 1);
  for (int i = 0; i < 1000; ++i) {
    json drawn;
    c.model.instantiate(rng, &drawn);
    CHECK(drawn["scale"].get<double>() >= 1);
    CHECK(drawn["scale"].get<double>() < 20);
    CHECK(drawn["shape"].get<double>() == 2);
  }
}

TEST_CASE("errors carry field paths") {
  json doc = fig2_preset(LossFlavor::kBinary);
  doc["horizon"] = 0;
  doc["loss"]["defense_cost"] = 1.5;
  auto p = problems_of(doc);
  CHECK(mentions(p, "horizon"));
  CHECK(mentions(p, "loss.defense_cost"));

  doc = fig2_preset(LossFlavor::kBinary);
  doc["model"]["scale"] = "big";
  doc["periods"]["step"] = -1;
  doc["policies"] = {"alg1", "nope"};
  doc["extra"] = 1;
  p = problems_of(doc);
  CHECK(mentions(p, "model.scale"));
  CHECK(mentions(p, "periods.step"));
  CHECK(mentions(p, "policies[1]"));
  CHECK(mentions(p, "extra"));

  doc = fig2_preset(LossFlavor::kBinary);
  doc.erase("model");
  CHECK(mentions(problems_of(doc), "model"));

  doc = fig2_preset(LossFlavor::kBinary);
  doc["model"] = {{"family", "uniform"}, {"low", 3}, {"high", 1}};
  CHECK(mentions(problems_of(doc), "model.high"));

  doc = fig2_preset(LossFlavor::kBinary);
  doc["model"]["scale"] = json::array({5, 1});
  CHECK(mentions(problems_of(doc), "model.scale"));

  CHECK(mentions(problems_of(json::array()), "<root>"));
}

TEST_CASE("policies must match the periods and the cost variant") {
  json doc = fig2_preset(LossFlavor::kBinary);
  doc["policies"] = {"alg2"};
  CHECK(mentions(problems_of(doc), "policies[0]"));

  doc["periods"] = {{"min", 1}, {"max", 10}, {"continuous", true}};
  CHECK(problems_of(doc).empty());
  doc["policies"] = {"alg1"};
  CHECK(mentions(problems_of(doc), "policies[0]"));

  doc = fig2_preset(LossFlavor::kBinary);
  doc["policies"] = {"fixed-cost"};
  CHECK(mentions(problems_of(doc), "policies[0]"));
  doc["loss"]["cost"] = {{"variant", "fixed"}, {"threshold", 3.2}};
  CHECK(problems_of(doc).empty());
  doc["policies"] = {"fixed-cost", "alg1"};
  CHECK(mentions(problems_of(doc), "policies[1]"));

  doc = fig2_preset(LossFlavor::kBinary);
  doc["policies"] = {"alg1", "alg1"};
  CHECK(mentions(problems_of(doc), "policies[1]"));

  doc = fig2_preset(LossFlavor::kLinear);
  doc["loss"]["x_max_norm"] = 5;
  CHECK(mentions(problems_of(doc), "loss.x_max_norm"));
}

TEST_CASE("period forms") {
  json doc = fig2_preset(LossFlavor::kBinary);
  doc["periods"] = {{"values", {1, 2.5, 7}}};
  CHECK(parse_config(doc).periods.values == std::vector<double>{1, 2.5, 7});
  doc["periods"] = {{"values", {2, 1}}};
  CHECK(mentions(problems_of(doc), "periods.values"));
  doc["periods"] = {{"min", 0}, {"max", 3}, {"step", 1}};
  CHECK(mentions(problems_of(doc), "periods"));
  doc["periods"] = {{"min", 1}, {"max", 2}, {"step", 0.3}};
  const auto c = parse_config(doc);
  REQUIRE(c.periods.values.size() == 4);
  CHECK(c.periods.max == doctest::Approx(1.9));
}

TEST_CASE("cost variants") {
  json doc = fig2_preset(LossFlavor::kBinary);
  doc["policies"] = {"random-cost"};
  doc["loss"]["cost"] = {{"variant", "random"},
                         {"model", {{"family", "uniform"}, {"low", 0}, {"high", 5}}}};
  const auto c = parse_config(doc);
  CHECK(c.cost.kind == CostKind::kRandom);
  REQUIRE(c.cost.threshold_model);
  CHECK(c.cost.threshold_model->family == ModelFamily::kUniform);

  doc["loss"]["cost"] = {{"variant", "sometimes"}};
  CHECK(mentions(problems_of(doc), "loss.cost.variant"));
  doc["loss"]["cost"] = {{"variant", "fixed"}};
  CHECK(mentions(problems_of(doc), "loss.cost.threshold"));
}

TEST_CASE("files") {
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), ConfigError);
  testing::TempDir dir("config");
  const auto path = dir.path() / "broken.json";
  std::ofstream(path) << "{ not json";
  CHECK_THROWS_AS(load_config(path), ConfigError);
}

TEST_CASE("policy names") {
  for (const char* n :
       {"alg1", "alg1-aggressive", "alg2", "tucb", "tucb-side", "fixed-cost", "random-cost"}) {
    const auto k = parse_policy(n);
    REQUIRE(k);
    CHECK(policy_name(*k) == n);
  }
  CHECK_FALSE(parse_policy("ucb1"));
}
