#pragma once

#include <span>

#include <Eigen/Core>

namespace killing {

/// Second-order Taylor data of a scalar function of up to three variables:
/// value, gradient and (symmetric) Hessian at a point.
///
/// Only the leading `dim` entries of `grad` and the leading `dim x dim` block
/// of `hess` are meaningful; the rest is kept at zero.
struct Jet {
  static constexpr int kMaxDim = 3;

  int dim = 0;
  double value = 0.0;
  Eigen::Vector3d grad = Eigen::Vector3d::Zero();
  Eigen::Matrix3d hess = Eigen::Matrix3d::Zero();

  static Jet constant(int dim, double v);
  /// The coordinate function x_index evaluated at `v`.
  static Jet variable(int dim, int index, double v);

  double d(int i) const { return grad[i]; }
  double dd(int i, int j) const { return hess(i, j); }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator*(const Jet& a, const Jet& b);
Jet operator/(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator+(const Jet& a, double b);
Jet operator*(double a, const Jet& b);

/// Applies a scalar function with value f0 and derivatives f1, f2 at a.value.
Jet apply_univariate(const Jet& a, double f0, double f1, double f2);

/// Second-order chain rule: outer(inner_0, ..., inner_{m-1}).
/// `outer` has dim m; every inner jet shares the same dim n.
/// Throws ArityMismatch when the counts or dims disagree.
Jet compose_jet(const Jet& outer, std::span<const Jet> inners);

/// Re-expresses a jet of fewer variables as a jet of `dim` variables,
/// keeping the existing variables in their positions.
Jet widen(const Jet& a, int dim);

}  // namespace killing
