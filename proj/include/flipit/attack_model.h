#pragma once

#include <string>
#include <variant>
#include <vector>

#include "flipit/random.h"

namespace flipit {

struct WeibullParams {
  double scale;
  double shape;
};

struct UniformParams {
  double low;
  double high;
};

struct ExponentialParams {
  double rate;
};

struct EmpiricalParams {
  std::vector<double> samples;  // sorted ascending
};

// Distribution F_a of the time an attack needs to compromise the resource.
// Immutable after construction; shareable across threads.
class AttackModel {
 public:
  using Params =
      std::variant<WeibullParams, UniformParams, ExponentialParams, EmpiricalParams>;

  static AttackModel weibull(double scale, double shape);
  static AttackModel uniform(double low, double high);
  static AttackModel exponential(double rate);
  static AttackModel empirical(std::vector<double> samples);

  const Params& params() const { return params_; }
  std::string describe() const;

  // P(a <= t). Right-continuous; zero for t < 0.
  double cdf(double t) const;
  // P(a < t). Equal to cdf for the continuous families.
  double prob_below(double t) const;
  // P(a >= t).
  double survival_inclusive(double t) const { return 1.0 - prob_below(t); }

  // Inverse-transform draw from a uniform variate u in (0, 1].
  double quantile_draw(double u) const;
  double sample(RandomStream& rng) const { return quantile_draw(rng.uniform_open0()); }

  // Largest Lipschitz-relevant density value if known in closed form, else 0.
  double max_density() const;

  // Closed-form integral of the CDF over [0, x] where one exists.
  // Returns false when the caller has to integrate numerically.
  bool integrated_cdf_closed_form(double x, double& out) const;

 private:
  explicit AttackModel(Params p) : params_(std::move(p)) {}
  Params params_;
};

}  // namespace flipit
