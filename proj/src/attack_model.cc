#include "flipit/attack_model.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace flipit {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool positive_finite(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

AttackModel AttackModel::weibull(double scale, double shape) {
  if (!positive_finite(scale) || !positive_finite(shape)) {
    throw std::invalid_argument(
        fmt::format("weibull requires scale > 0 and shape > 0 (got {}, {})", scale, shape));
  }
  return AttackModel(WeibullParams{scale, shape});
}

AttackModel AttackModel::uniform(double low, double high) {
  if (!std::isfinite(low) || !std::isfinite(high) || low < 0.0 || high <= low) {
    throw std::invalid_argument(
        fmt::format("uniform requires 0 <= low < high (got {}, {})", low, high));
  }
  return AttackModel(UniformParams{low, high});
}

AttackModel AttackModel::exponential(double rate) {
  if (!positive_finite(rate)) {
    throw std::invalid_argument(fmt::format("exponential requires rate > 0 (got {})", rate));
  }
  return AttackModel(ExponentialParams{rate});
}

AttackModel AttackModel::empirical(std::vector<double> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("empirical distribution needs at least one sample");
  }
  for (double s : samples) {
    if (!std::isfinite(s) || s < 0.0) {
      throw std::invalid_argument(fmt::format("empirical sample {} is not a time >= 0", s));
    }
  }
  std::sort(samples.begin(), samples.end());
  return AttackModel(EmpiricalParams{std::move(samples)});
}

std::string AttackModel::describe() const {
  return std::visit(
      Overloaded{
          [](const WeibullParams& p) {
            return fmt::format("weibull(scale={}, shape={})", p.scale, p.shape);
          },
          [](const UniformParams& p) {
            return fmt::format("uniform(low={}, high={})", p.low, p.high);
          },
          [](const ExponentialParams& p) { return fmt::format("exponential(rate={})", p.rate); },
          [](const EmpiricalParams& p) {
            return fmt::format("empirical(n={})", p.samples.size());
          },
      },
      params_);
}

double AttackModel::cdf(double t) const {
  if (t < 0.0) return 0.0;
  return std::visit(
      Overloaded{
          [t](const WeibullParams& p) { return -std::expm1(-std::pow(t / p.scale, p.shape)); },
          [t](const UniformParams& p) {
            if (t <= p.low) return 0.0;
            if (t >= p.high) return 1.0;
            return (t - p.low) / (p.high - p.low);
          },
          [t](const ExponentialParams& p) { return -std::expm1(-p.rate * t); },
          [t](const EmpiricalParams& p) {
            auto it = std::upper_bound(p.samples.begin(), p.samples.end(), t);
            return static_cast<double>(it - p.samples.begin()) /
                   static_cast<double>(p.samples.size());
          },
      },
      params_);
}

double AttackModel::prob_below(double t) const {
  if (const auto* e = std::get_if<EmpiricalParams>(&params_)) {
    if (t <= 0.0) return 0.0;
    auto it = std::lower_bound(e->samples.begin(), e->samples.end(), t);
    return static_cast<double>(it - e->samples.begin()) /
           static_cast<double>(e->samples.size());
  }
  return cdf(t);
}

double AttackModel::quantile_draw(double u) const {
  return std::visit(
      Overloaded{
          [u](const WeibullParams& p) {
            return p.scale * std::pow(-std::log(u), 1.0 / p.shape);
          },
          [u](const UniformParams& p) { return p.low + (p.high - p.low) * u; },
          [u](const ExponentialParams& p) { return -std::log(u) / p.rate; },
          [u](const EmpiricalParams& p) {
            const auto n = p.samples.size();
            auto idx = static_cast<std::size_t>(std::ceil(u * static_cast<double>(n)));
            idx = std::clamp<std::size_t>(idx, 1, n);
            return p.samples[idx - 1];
          },
      },
      params_);
}

double AttackModel::max_density() const {
  return std::visit(
      Overloaded{
          [](const WeibullParams& p) {
            if (p.shape < 1.0) return 0.0;  // unbounded at the origin
            if (p.shape == 1.0) return 1.0 / p.scale;
            const double k = p.shape;
            const double mode = p.scale * std::pow((k - 1.0) / k, 1.0 / k);
            const double z = mode / p.scale;
            return (k / p.scale) * std::pow(z, k - 1.0) * std::exp(-std::pow(z, k));
          },
          [](const UniformParams& p) { return 1.0 / (p.high - p.low); },
          [](const ExponentialParams& p) { return p.rate; },
          [](const EmpiricalParams&) { return 0.0; },
      },
      params_);
}

bool AttackModel::integrated_cdf_closed_form(double x, double& out) const {
  if (x <= 0.0) {
    out = 0.0;
    return true;
  }
  return std::visit(
      Overloaded{
          [](const WeibullParams&) { return false; },
          [x, &out](const UniformParams& p) {
            if (x <= p.low) {
              out = 0.0;
            } else if (x <= p.high) {
              out = (x - p.low) * (x - p.low) / (2.0 * (p.high - p.low));
            } else {
              out = 0.5 * (p.high - p.low) + (x - p.high);
            }
            return true;
          },
          [x, &out](const ExponentialParams& p) {
            out = x + std::expm1(-p.rate * x) / p.rate;
            return true;
          },
          [x, &out](const EmpiricalParams& p) {
            // F is a step function, so its integral is piecewise linear:
            // int_0^x F = (1/n) * sum_i (x - s_i)^+.
            double acc = 0.0;
            for (double s : p.samples) {
              if (s >= x) break;
              acc += x - s;
            }
            out = acc / static_cast<double>(p.samples.size());
            return true;
          },
      },
      params_);
}

}  // namespace flipit
