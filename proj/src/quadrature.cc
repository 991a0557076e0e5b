#include "flipit/quadrature.h"

#include <cmath>
#include <vector>

#include <fmt/format.h>

namespace flipit {
namespace {

struct Panel {
  double a, m, b;
  double fa, fm, fb;
  double whole;
  double tol;
  int depth;
};

double simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

constexpr int kMaxDepth = 60;

}  // namespace

QuadratureResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                                  const SimpsonOptions& opts) {
  if (a == b) return {0.0, 0};
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  std::vector<Panel> stack;
  stack.push_back({a, m, b, fa, fm, fb, simpson(a, b, fa, fm, fb), opts.abs_tol, 0});

  double total = 0.0;
  int subdivisions = 0;
  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();

    const double lm = 0.5 * (p.a + p.m);
    const double rm = 0.5 * (p.m + p.b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(p.a, p.m, p.fa, flm, p.fm);
    const double right = simpson(p.m, p.b, p.fm, frm, p.fb);
    const double diff = left + right - p.whole;

    if (std::abs(diff) <= 15.0 * p.tol) {
      total += left + right + diff / 15.0;
      continue;
    }
    if (++subdivisions > opts.max_subdivisions || p.depth >= kMaxDepth) {
      throw QuadratureError(fmt::format(
          "adaptive Simpson did not converge on [{}, {}] (tol {}, {} subdivisions)", a, b,
          opts.abs_tol, subdivisions));
    }
    stack.push_back({p.m, rm, p.b, p.fm, frm, p.fb, right, 0.5 * p.tol, p.depth + 1});
    stack.push_back({p.a, lm, p.m, p.fa, flm, p.fm, left, 0.5 * p.tol, p.depth + 1});
  }
  return {total, subdivisions};
}

}  // namespace flipit
