#include "killing/jet.hpp"

#include <string>

#include "killing/errors.hpp"

namespace killing {

namespace {

void require_same_dim(const Jet& a, const Jet& b) {
  if (a.dim != b.dim) {
    throw ArityMismatch("jet dimensions differ: " + std::to_string(a.dim) + " vs " +
                        std::to_string(b.dim));
  }
}

}  // namespace

Jet Jet::constant(int dim, double v) {
  Jet j;
  j.dim = dim;
  j.value = v;
  return j;
}

Jet Jet::variable(int dim, int index, double v) {
  Jet j = constant(dim, v);
  j.grad[index] = 1.0;
  return j;
}

Jet operator+(const Jet& a, const Jet& b) {
  require_same_dim(a, b);
  Jet r = a;
  r.value += b.value;
  r.grad += b.grad;
  r.hess += b.hess;
  return r;
}

Jet operator-(const Jet& a, const Jet& b) {
  require_same_dim(a, b);
  Jet r = a;
  r.value -= b.value;
  r.grad -= b.grad;
  r.hess -= b.hess;
  return r;
}

Jet operator-(const Jet& a) {
  Jet r = a;
  r.value = -r.value;
  r.grad = -r.grad;
  r.hess = -r.hess;
  return r;
}

Jet operator+(const Jet& a, double b) {
  Jet r = a;
  r.value += b;
  return r;
}

Jet operator*(double a, const Jet& b) {
  Jet r = b;
  r.value *= a;
  r.grad *= a;
  r.hess *= a;
  return r;
}

Jet operator*(const Jet& a, const Jet& b) {
  require_same_dim(a, b);
  Jet r;
  r.dim = a.dim;
  r.value = a.value * b.value;
  r.grad = a.value * b.grad + b.value * a.grad;
  const Eigen::Matrix3d cross = a.grad * b.grad.transpose();
  r.hess = a.value * b.hess + b.value * a.hess + cross + cross.transpose();
  return r;
}

Jet operator/(const Jet& a, const Jet& b) {
  require_same_dim(a, b);
  const double inv = 1.0 / b.value;
  // 1/b has derivatives -1/b^2 and 2/b^3.
  return a * apply_univariate(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

Jet apply_univariate(const Jet& a, double f0, double f1, double f2) {
  Jet r;
  r.dim = a.dim;
  r.value = f0;
  r.grad = f1 * a.grad;
  r.hess = f1 * a.hess + f2 * (a.grad * a.grad.transpose());
  return r;
}

Jet compose_jet(const Jet& outer, std::span<const Jet> inners) {
  if (static_cast<int>(inners.size()) != outer.dim) {
    throw ArityMismatch("outer jet has " + std::to_string(outer.dim) + " variables but " +
                        std::to_string(inners.size()) + " inner jets were given");
  }
  if (inners.empty()) return outer;
  const int n = inners.front().dim;
  for (const Jet& in : inners) {
    if (in.dim != n) throw ArityMismatch("inner jets have different dimensions");
  }

  Jet r;
  r.dim = n;
  r.value = outer.value;
  for (int i = 0; i < outer.dim; ++i) {
    r.grad += outer.grad[i] * inners[i].grad;
    r.hess += outer.grad[i] * inners[i].hess;
    for (int l = 0; l < outer.dim; ++l) {
      r.hess += outer.hess(i, l) * (inners[i].grad * inners[l].grad.transpose());
    }
  }
  // Rounding can leave the two halves a few ulps apart.
  r.hess = 0.5 * (r.hess + r.hess.transpose()).eval();
  return r;
}

Jet widen(const Jet& a, int dim) {
  if (dim < a.dim) throw ArityMismatch("cannot narrow a jet");
  Jet r = a;
  r.dim = dim;
  return r;
}

}  // namespace killing
