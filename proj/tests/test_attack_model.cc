#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "flipit/attack_model.h"
#include "support.h"

using namespace flipit;

TEST_CASE("inverse transform draws") {
  CHECK(AttackModel::weibull(7, 2).quantile_draw(std::exp(-1.0)) == doctest::Approx(7.0));
  CHECK(AttackModel::uniform(1, 3).quantile_draw(0.5) == doctest::Approx(2.0));
  CHECK(AttackModel::exponential(2).quantile_draw(std::exp(-1.0)) == doctest::Approx(0.5));

  const auto emp = AttackModel::empirical({3, 1, 2, 4});
  CHECK(emp.quantile_draw(0.25) == 1);
  CHECK(emp.quantile_draw(0.26) == 2);
  CHECK(emp.quantile_draw(1.0) == 4);
  CHECK(emp.quantile_draw(1e-300) == 1);
}

TEST_CASE("weibull sample mean matches scale * Gamma(1 + 1/shape)") {
  const auto m = AttackModel::weibull(5, 2);
  RandomStream rng(42, 0);
  const int n = 10'000'000;
  double sum = 0;
  for (int i = 0; i < n; ++i) sum += m.sample(rng);
  const double expect = 5.0 * boost::math::tgamma(1.5);
  CHECK(expect == doctest::Approx(4.43113462726379).epsilon(1e-12));
  CHECK(std::abs(sum / n - expect) < 0.01);
}

TEST_CASE("cdf values") {
  CHECK(AttackModel::weibull(5, 2).cdf(2) == doctest::Approx(0.14785621103378865).epsilon(1e-14));
  CHECK(AttackModel::uniform(1, 3).cdf(2) == 0.5);
  CHECK(AttackModel::uniform(1, 3).cdf(1) == 0.0);
  CHECK(AttackModel::uniform(1, 3).cdf(3) == 1.0);
  CHECK(AttackModel::exponential(1).cdf(1) == doctest::Approx(1 - std::exp(-1.0)));
  for (const auto& m : {AttackModel::weibull(5, 2), AttackModel::uniform(1, 3),
                        AttackModel::exponential(0.3), AttackModel::empirical({0, 1})}) {
    CHECK(m.cdf(-1) == 0.0);
    CHECK(m.prob_below(-1) == 0.0);
  }
}

TEST_CASE("empirical cdf is a right-continuous step") {
  const auto m = AttackModel::empirical({1, 2, 2, 5});
  CHECK(m.cdf(0.999) == 0.0);
  CHECK(m.cdf(1) == 0.25);
  CHECK(m.cdf(2) == 0.75);
  CHECK(m.prob_below(2) == 0.25);
  CHECK(m.cdf(5) == 1.0);
  CHECK(m.prob_below(5) == 0.75);

  double v = 0;
  REQUIRE(m.integrated_cdf_closed_form(3, v));
  // (3-1) + (3-2) + (3-2) over 4 samples
  CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("factories reject invalid parameters") {
  CHECK_THROWS_AS(AttackModel::weibull(0, 2), std::invalid_argument);
  CHECK_THROWS_AS(AttackModel::weibull(1, -1), std::invalid_argument);
  CHECK_THROWS_AS(AttackModel::uniform(3, 1), std::invalid_argument);
  CHECK_THROWS_AS(AttackModel::uniform(-1, 1), std::invalid_argument);
  CHECK_THROWS_AS(AttackModel::exponential(0), std::invalid_argument);
  CHECK_THROWS_AS(AttackModel::empirical({}), std::invalid_argument);
  CHECK_THROWS_AS(AttackModel::empirical({1, -2}), std::invalid_argument);
}

TEST_CASE("cdf is non-decreasing and tends to one") {
  RandomStream rng(7, 0);
  for (int k = 0; k < 200; ++k) {
    const auto m = testing::random_model(rng);
    double prev = 0;
    for (int i = 0; i <= 400; ++i) {
      const double t = -1.0 + 0.05 * i;
      const double c = m.cdf(t);
      CHECK(c >= prev);
      CHECK(c >= 0.0);
      CHECK(c <= 1.0);
      prev = c;
    }
    CHECK(m.cdf(1e6) == doctest::Approx(1.0));
  }
}

TEST_CASE("empirical cdf of a million draws stays within 0.01 of the model") {
  const std::vector<AttackModel> models = {AttackModel::weibull(5, 2), AttackModel::uniform(1, 3),
                                           AttackModel::exponential(0.4),
                                           AttackModel::weibull(3, 0.7)};
  for (const auto& m : models) {
    RandomStream rng(99, 1);
    std::vector<double> draws(1'000'000);
    for (double& d : draws) d = m.sample(rng);
    std::sort(draws.begin(), draws.end());
    double sup = 0;
    const double n = static_cast<double>(draws.size());
    for (std::size_t i = 0; i < draws.size(); i += 97) {
      const double f = m.cdf(draws[i]);
      sup = std::max({sup, std::abs(f - (i + 1) / n), std::abs(f - i / n)});
    }
    INFO(m.describe());
    CHECK(sup < 0.01);
  }
}

TEST_CASE("sampling is deterministic per seed and never negative") {
  const auto m = AttackModel::weibull(5, 2);
  RandomStream a(3, 2);
  RandomStream b(3, 2);
  RandomStream c(4, 2);
  bool differs = false;
  for (int i = 0; i < 1000; ++i) {
    const double x = m.sample(a);
    CHECK(x == m.sample(b));
    CHECK(x >= 0.0);
    differs = differs || x != m.sample(c);
  }
  CHECK(differs);
}

TEST_CASE("weibull max density") {
  // shape 2: density peaks at scale / sqrt(2)
  const double s = 5;
  const double mode = s / std::sqrt(2.0);
  const double peak = (2.0 / s) * (mode / s) * std::exp(-0.5);
  CHECK(AttackModel::weibull(s, 2).max_density() == doctest::Approx(peak));
  CHECK(AttackModel::uniform(1, 3).max_density() == doctest::Approx(0.5));
}
