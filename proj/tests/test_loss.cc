#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "flipit/loss.h"
#include "flipit/quadrature.h"
#include "support.h"

using namespace flipit;

namespace {

const LossSpec kBinary = make_loss_spec(LossFlavor::kBinary, 0.1);
const LossSpec kLinear = make_loss_spec(LossFlavor::kLinear, 0.1, 10.0);

// int_0^x F for Weibull via the lower incomplete gamma function.
double weibull_integrated_cdf(double scale, double shape, double x) {
  return x - (scale / shape) * boost::math::tgamma_lower(1.0 / shape, std::pow(x / scale, shape));
}

}  // namespace

TEST_CASE("round loss") {
  CHECK(round_loss(kBinary, 3, 2, std::nullopt) == doctest::Approx(1.1));
  CHECK(round_loss(kBinary, 3, 5, std::nullopt) == doctest::Approx(0.1));
  CHECK(round_loss(kBinary, 3, 3, std::nullopt) == doctest::Approx(0.1));  // tie: no damage

  const auto fixed = make_loss_spec(LossFlavor::kBinary, 0.1, 1.0, FixedCost{4});
  CHECK(round_loss(fixed, 3, 2, 4.0) == doctest::Approx(0.1));
  CHECK(round_loss(fixed, 5, 2, 4.0) == doctest::Approx(1.1));
  CHECK(round_loss(fixed, 4, 2, 4.0) == doctest::Approx(0.1));

  CHECK(round_loss(kLinear, 3, 2, std::nullopt) == doctest::Approx(0.2));
  CHECK(round_loss(kLinear, 3, 0, std::nullopt) == doctest::Approx(0.4));
}

TEST_CASE("round loss rejects bad input") {
  CHECK_THROWS_AS(round_loss(kLinear, 11, 2, std::nullopt), std::domain_error);
  CHECK_THROWS_AS(round_loss(kBinary, 0, 2, std::nullopt), std::domain_error);
  CHECK_THROWS_AS(round_loss(kBinary, -1, 2, std::nullopt), std::domain_error);
  CHECK_THROWS_AS(round_loss(kBinary, 3, 2, 1.0), std::invalid_argument);
  const auto fixed = make_loss_spec(LossFlavor::kBinary, 0.1, 1.0, FixedCost{4});
  CHECK_THROWS_AS(round_loss(fixed, 3, 2, std::nullopt), std::invalid_argument);
  CHECK_THROWS_AS(make_loss_spec(LossFlavor::kBinary, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_loss_spec(LossFlavor::kLinear, 0.1, 0.0), std::invalid_argument);
}

TEST_CASE("damage function") {
  for (const auto& spec : {kBinary, kLinear}) {
    CHECK(spec.shape.damage(0) == 0.0);
    double prev = 0;
    for (int i = 0; i <= 100; ++i) {
      const double f = spec.shape.damage(0.1 * i);
      CHECK(f >= prev);
      CHECK(f <= 1.0);
      prev = f;
    }
  }
}

TEST_CASE("expected loss values") {
  const auto w = AttackModel::weibull(5, 2);
  CHECK(expected_loss(kBinary, w, 2) == doctest::Approx(0.24785621103378866).epsilon(1e-14));
  CHECK(expected_loss(kBinary, AttackModel::uniform(1, 3), 1) == doctest::Approx(0.1));
  CHECK(expected_loss(kLinear, AttackModel::uniform(1, 3), 2) == doctest::Approx(0.125));

  // Weibull linear loss goes through adaptive Simpson.
  const double integral = weibull_integrated_cdf(5, 2, 4);
  CHECK(integral == doctest::Approx(0.71165071835802).epsilon(1e-12));
  CHECK(std::abs(expected_loss(kLinear, w, 4) - (0.1 + integral / 10)) < 1e-9);
  for (double x : {0.3, 1.7, 6.2, 9.9}) {
    for (double k : {0.7, 1.5, 3.0}) {
      const double ref = 0.1 + weibull_integrated_cdf(5, k, x) / 10;
      CHECK(std::abs(expected_loss(kLinear, AttackModel::weibull(5, k), x) - ref) < 1e-9);
    }
  }
}

TEST_CASE("expected loss with attack costs") {
  const auto w = AttackModel::weibull(5, 2);
  const auto fixed = make_loss_spec(LossFlavor::kBinary, 0.1, 1.0, FixedCost{3.2});
  CHECK(expected_loss(fixed, w, 3) == doctest::Approx(0.1));
  CHECK(expected_loss(fixed, w, 3.2) == doctest::Approx(0.1));
  CHECK(expected_loss(fixed, w, 4) == doctest::Approx(expected_loss(kBinary, w, 4)));

  const auto random =
      make_loss_spec(LossFlavor::kBinary, 0.1, 1.0, RandomCost{AttackModel::uniform(0, 5)});
  const double p = 0.4;  // P(x0 < 2)
  CHECK(expected_loss(random, w, 2) ==
        doctest::Approx(0.1 * (1 - p) + expected_loss(kBinary, w, 2) * p));

  const auto never = make_loss_spec(LossFlavor::kBinary, 0.1, 1.0, FixedCost{100});
  CHECK(damage_probability(never, w, 9) == 0.0);
  CHECK(damage_probability(kBinary, w, 2) == doctest::Approx(w.cdf(2)));
}

TEST_CASE("expected loss is non-decreasing in the period") {
  RandomStream rng(11, 0);
  for (int k = 0; k < 300; ++k) {
    const auto model = testing::random_model(rng);
    const auto spec = testing::random_spec(rng, 12.0);
    double x1 = rng.uniform(0.01, 12.0);
    double x2 = rng.uniform(0.01, 12.0);
    if (x1 > x2) std::swap(x1, x2);
    INFO(model.describe(), " x1=", x1, " x2=", x2);
    CHECK(expected_loss(spec, model, x1) <= expected_loss(spec, model, x2) + 1e-12);
  }
}

TEST_CASE("Monte-Carlo mean of round losses is within 4 standard errors of the expected loss") {
  RandomStream rng(12, 0);
  for (int k = 0; k < 12; ++k) {
    const auto model = testing::random_model(rng);
    auto spec = testing::random_spec(rng, 12.0);
    if (k % 3 == 1) spec.cost = FixedCost{rng.uniform(0.0, 6.0)};
    if (k % 3 == 2) spec.cost = RandomCost{AttackModel::uniform(0, rng.uniform(1.0, 8.0))};
    const double x = rng.uniform(0.5, 12.0);

    RandomStream draws(1000 + k, 0);
    const int n = 1'000'000;
    double sum = 0;
    double sq = 0;
    for (int i = 0; i < n; ++i) {
      const double a = model.sample(draws);
      std::optional<double> x0;
      if (const auto* f = std::get_if<FixedCost>(&spec.cost)) x0 = f->threshold;
      if (const auto* r = std::get_if<RandomCost>(&spec.cost)) {
        x0 = r->threshold_model.sample(draws);
      }
      const double l = round_loss(spec, x, a, x0);
      sum += l;
      sq += l * l;
    }
    const double mean = sum / n;
    const double sd = std::sqrt(std::max(0.0, sq / n - mean * mean));
    INFO(model.describe(), " x=", x);
    CHECK(std::abs(mean - expected_loss(spec, model, x)) <= 4 * sd / std::sqrt(n) + 1e-9);
  }
}

TEST_CASE("binary loss under uniform attacks is Lipschitz with L = 1/(a2-a1)") {
  RandomStream rng(13, 0);
  for (int k = 0; k < 500; ++k) {
    const double lo = rng.uniform(0.0, 4.0);
    const double hi = lo + rng.uniform(0.1, 5.0);
    const auto m = AttackModel::uniform(lo, hi);
    const double x1 = rng.uniform(0.01, 10.0);
    const double x2 = rng.uniform(0.01, 10.0);
    const double diff = std::abs(expected_loss(kBinary, m, x1) - expected_loss(kBinary, m, x2));
    CHECK(diff <= std::abs(x1 - x2) / (hi - lo) + 1e-12);
  }
}

TEST_CASE("adaptive Simpson") {
  CHECK(adaptive_simpson([](double x) { return x * x; }, 0, 3).value ==
        doctest::Approx(9.0).epsilon(1e-12));
  CHECK(std::abs(adaptive_simpson([](double x) { return std::sin(x); }, 0, M_PI).value - 2.0) <
        1e-9);
  CHECK(adaptive_simpson([](double) { return 1.0; }, 2, 2).value == 0.0);
  CHECK_THROWS_AS(adaptive_simpson([](double x) { return x > 0 ? 1 / std::sqrt(x) : 0.0; }, 0, 1,
                                   {1e-14, 50}),
                  QuadratureError);
}
