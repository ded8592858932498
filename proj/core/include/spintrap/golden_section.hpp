#pragma once

#include <cmath>
#include <functional>

namespace spintrap {

struct ScalarOptimum {
  double x;
  double value;
};

/// Golden-section search for the maximum of a unimodal f on [lo, hi]. Stops
/// once the bracket is narrower than `tol`. The returned point is the best
/// interior probe or bracket end seen.
template <class F>
ScalarOptimum golden_section_maximize(F&& f, double lo, double hi, double tol) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (b - a > tol) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  ScalarOptimum best = fc >= fd ? ScalarOptimum{c, fc} : ScalarOptimum{d, fd};
  for (double x : {a, b}) {
    const double fx = f(x);
    if (fx > best.value) best = {x, fx};
  }
  return best;
}

}  // namespace spintrap
