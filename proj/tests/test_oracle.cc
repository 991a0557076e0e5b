#include <doctest.h>

#include <cmath>
#include <sstream>

#include "flipit/oracle.h"
#include "support.h"

using namespace flipit;

namespace {

const LossSpec kBinary = make_loss_spec(LossFlavor::kBinary, 0.1);

std::vector<double> nineteen_arms() {
  std::vector<double> p;
  for (int i = 0; i < 19; ++i) p.push_back(1 + 0.5 * i);
  return p;
}

}  // namespace

TEST_CASE("single arm") {
  const double p[] = {4};
  const auto t = build_table(kBinary, AttackModel::weibull(5, 2), p);
  CHECK(t.x_star == 4);
  CHECK(t.gaps[0] == 0.0);
  CHECK(t.gap_min == 0.0);
  CHECK(t.gap_max == 0.0);
}

TEST_CASE("weibull 19-arm table") {
  const auto arms = nineteen_arms();
  const auto model = AttackModel::weibull(5, 2);
  const auto t = build_table(kBinary, model, arms);
  CHECK(t.x_star == 10);
  CHECK(t.lambda_star == doctest::Approx(0.10816843611112659).epsilon(1e-13));
  CHECK(t.rates[2] == doctest::Approx(0.12392810551689433).epsilon(1e-13));

  // Independent evaluation of the rate formula.
  double best = 1e9;
  double best_x = 0;
  for (double x : arms) {
    const double rate = (1 - std::exp(-(x / 5) * (x / 5)) + 0.1) / x;
    if (rate < best) {
      best = rate;
      best_x = x;
    }
  }
  CHECK(best_x == t.x_star);
  CHECK(best == doctest::Approx(t.lambda_star).epsilon(1e-14));

  // Monte-Carlo estimates of l(x) back up the exact values.
  RandomStream rng(31, 0);
  const int n = 400'000;
  std::vector<double> mc(arms.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    const double a = model.sample(rng);
    for (std::size_t k = 0; k < arms.size(); ++k) mc[k] += arms[k] > a ? 1.1 : 0.1;
  }
  for (std::size_t k = 0; k < arms.size(); ++k) {
    CHECK(std::abs(mc[k] / n - t.losses[k]) < 5e-3);
  }
}

TEST_CASE("uniform three-arm table") {
  const double p[] = {1, 2, 3};
  const auto t = build_table(kBinary, AttackModel::uniform(1, 3), p);
  CHECK(t.rates[0] == doctest::Approx(0.1));
  CHECK(t.rates[1] == doctest::Approx(0.3));
  CHECK(t.rates[2] == doctest::Approx(1.1 / 3));
  CHECK(t.x_star == 1);
  CHECK(t.gaps[1] == doctest::Approx(0.6 - 0.2));
}

TEST_CASE("ties go to the shortest period") {
  // Exponential with c_d = 0: l(x) = 1 - e^{-x} is concave, so equal rates are
  // rare; force a tie with a constant loss instead.
  const auto spec = make_loss_spec(LossFlavor::kBinary, 0.5);
  const double p[] = {2, 3};
  // prob_below = 1 everywhere beyond the support.
  const auto t = build_table(spec, AttackModel::uniform(0, 0.5), p);
  CHECK(t.rates[0] > t.rates[1]);
  const auto u = build_table(make_loss_spec(LossFlavor::kBinary, 0.0),
                             AttackModel::empirical({100}), p);
  CHECK(u.rates[0] == u.rates[1]);
  CHECK(u.x_star == 2);
  CHECK(u.best_index == 0);
}

TEST_CASE("table invariants on random instances") {
  RandomStream rng(32, 0);
  for (int k = 0; k < 100; ++k) {
    const auto model = testing::random_model(rng);
    const auto spec = testing::random_spec(rng, 12.0);
    std::vector<double> p;
    double x = rng.uniform(0.1, 1.0);
    for (int i = 0; i < 12; ++i) {
      p.push_back(x);
      x += rng.uniform(0.05, 1.0);
    }
    const auto t = build_table(spec, model, p);
    double min_rate = 1e300;
    for (std::size_t i = 0; i < t.size(); ++i) {
      min_rate = std::min(min_rate, t.losses[i] / t.periods[i]);
      CHECK(t.gaps[i] >= 0.0);
      CHECK(t.rates[i] * t.periods[i] == doctest::Approx(t.losses[i]));
      CHECK(std::abs(t.gaps[i] - std::max(0.0, t.losses[i] - t.periods[i] * t.lambda_star)) <
            1e-12);
    }
    CHECK(t.lambda_star == min_rate);
    CHECK(t.gaps[t.best_index] == 0.0);
  }
}

TEST_CASE("build_table preconditions") {
  const auto m = AttackModel::weibull(5, 2);
  CHECK_THROWS_AS(build_table(kBinary, m, std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(build_table(kBinary, m, std::vector<double>{2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(build_table(kBinary, m, std::vector<double>{0, 1}), std::invalid_argument);
}

TEST_CASE("pseudo regret") {
  const auto arms = nineteen_arms();
  const auto t = build_table(kBinary, AttackModel::weibull(5, 2), arms);
  std::vector<double> star(50, t.x_star);
  CHECK(pseudo_regret(star, t).total == doctest::Approx(0.0).epsilon(1e-12));

  // 100 plays of one arm cost 100 times its gap.
  const std::size_t k = 3;
  std::vector<double> same(100, arms[k]);
  const auto r = pseudo_regret(same, t);
  CHECK(r.total == doctest::Approx(100 * t.gaps[k]));

  RandomStream rng(33, 0);
  std::vector<double> mixed;
  for (int i = 0; i < 5000; ++i) mixed.push_back(arms[rng.next_u64() % arms.size()]);
  const auto m = pseudo_regret(mixed, t);
  CHECK(std::abs(m.total - m.via_gaps) < 1e-9);
  CHECK(m.total >= 0);
  REQUIRE(m.cumulative.size() == mixed.size());
  for (std::size_t i = 1; i < m.cumulative.size(); ++i) {
    CHECK(m.cumulative[i] >= m.cumulative[i - 1]);
  }

  std::vector<double> bad{2.25};
  CHECK_THROWS_AS(pseudo_regret(bad, t), std::out_of_range);
}

TEST_CASE("continuous optimum") {
  const auto u = continuous_optimum(kBinary, AttackModel::uniform(1, 3), 1, 10);
  CHECK(u.period == doctest::Approx(1.0));
  CHECK(u.rate == doctest::Approx(0.1));

  // Weibull(5,2): rate keeps falling once F saturates; optimum at x_max.
  const auto w = continuous_optimum(kBinary, AttackModel::weibull(5, 2), 1, 10);
  CHECK(w.period == doctest::Approx(10.0));

  // Interior optimum: compare with a fine brute-force scan.
  const auto model = AttackModel::weibull(12, 2);
  const auto c = continuous_optimum(kBinary, model, 1, 10);
  double best = 1e9;
  for (int i = 0; i <= 900000; ++i) {
    const double x = 1 + 9.0 * i / 900000;
    best = std::min(best, expected_loss(kBinary, model, x) / x);
  }
  CHECK(c.rate <= best + 1e-12);
  CHECK(c.rate == doctest::Approx(best).epsilon(1e-9));
}

TEST_CASE("Lipschitz constants") {
  auto lc = lipschitz_constants(kBinary, AttackModel::uniform(1, 3), 1, 10);
  CHECK(lc.l == doctest::Approx(0.5));
  CHECK(lc.l_prime == doctest::Approx(45));
  lc = lipschitz_constants(kBinary, AttackModel::uniform(0, 20), 1, 10);
  CHECK(lc.l == doctest::Approx(0.05));
  CHECK(lc.l_prime == doctest::Approx(4.5));

  const auto w = AttackModel::weibull(5, 2);
  lc = lipschitz_constants(kBinary, w, 1, 10);
  CHECK(lc.l == doctest::Approx(w.max_density()).epsilon(1e-4));
  CHECK(lc.l <= w.max_density() + 1e-12);
}

TEST_CASE("discretization gap bounds for uniform attacks") {
  const auto model = AttackModel::uniform(1, 3);
  const auto lc = lipschitz_constants(kBinary, model, 1, 10);
  const auto ref = continuous_optimum(kBinary, model, 1, 10);
  RandomStream rng(34, 0);
  for (long n : {5L, 10L, 20L, 37L}) {
    std::vector<double> grid;
    for (long k = 1; k <= n; ++k) grid.push_back(1 + 9.0 * static_cast<double>(k) / n);
    const auto t = build_table(kBinary, model, grid, ref);
    const double bound = lc.l_prime / static_cast<double>(n);
    const double rate_k = t.rates[t.best_index];
    CHECK(expected_loss(kBinary, model, grid[t.best_index]) - grid[t.best_index] * ref.rate <=
          bound);
    for (int i = 0; i < 1000; ++i) {
      const double x = rng.uniform(1, 10);
      const double l = expected_loss(kBinary, model, x);
      const double delta = l - x * ref.rate;
      const double delta_prime = l - x * rate_k;
      CHECK(delta - delta_prime <= bound);
    }
  }
}

TEST_CASE("table csv and digest") {
  const double p[] = {1, 2, 3};
  const auto t = build_table(kBinary, AttackModel::uniform(1, 3), p);
  std::ostringstream out;
  write_table_csv(t, out);
  CHECK(out.str().rfind("period,l,lambda,gap\n1,", 0) == 0);
  const auto same = build_table(kBinary, AttackModel::uniform(1, 3), p);
  CHECK(t.digest() == same.digest());
  const auto other = build_table(kBinary, AttackModel::uniform(1, 4), p);
  CHECK(t.digest() != other.digest());
  CHECK(t.index_of(2) == 1);
  CHECK_THROWS_AS(t.index_of(2.5), std::out_of_range);
}
