#pragma once

#include <functional>
#include <stdexcept>

namespace flipit {

class QuadratureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SimpsonOptions {
  double abs_tol = 1e-9;
  int max_subdivisions = 10000;
};

struct QuadratureResult {
  double value;
  int subdivisions;
};

// Adaptive Simpson on [a, b]. Throws QuadratureError when the subdivision
// budget runs out before every panel meets its share of the tolerance.
QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const SimpsonOptions& opts = {});

}  // namespace flipit
