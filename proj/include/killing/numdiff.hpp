#pragma once

#include <algorithm>
#include <cmath>
#include <type_traits>

namespace killing::numdiff {

/// Step used by the oracles: 1e-4 scaled by the magnitude of the coordinate.
inline double oracle_step(double x) { return 1e-4 * std::max(1.0, std::abs(x)); }

/// Central first derivative with one Richardson level (O(h^4)).
/// `f` may return any type with vector-space arithmetic (double, Eigen objects).
template <class F>
auto central(F&& f, double x, double h) {
  using T = std::decay_t<decltype(f(x))>;
  const T dh = (f(x + h) - f(x - h)) / (2.0 * h);
  const T dh2 = (f(x + 0.5 * h) - f(x - 0.5 * h)) / h;
  return T((4.0 * dh2 - dh) / 3.0);
}

/// Central second derivative with one Richardson level.
template <class F>
auto central2(F&& f, double x, double h) {
  using T = std::decay_t<decltype(f(x))>;
  const T f0 = f(x);
  const T dh = (f(x + h) - 2.0 * f0 + f(x - h)) / (h * h);
  const double hh = 0.5 * h;
  const T dh2 = (f(x + hh) - 2.0 * f0 + f(x - hh)) / (hh * hh);
  return T((4.0 * dh2 - dh) / 3.0);
}

}  // namespace killing::numdiff
