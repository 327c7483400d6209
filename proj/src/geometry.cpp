#include "killing/geometry.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include <Eigen/LU>

#include "killing/errors.hpp"
#include "killing/numdiff.hpp"

namespace killing {

namespace {

const std::vector<std::string> kBaseVars = {"x", "y"};

constexpr int kValidationGrid = 9;

std::string point_text(double x, double y) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "(%.6g, %.6g)", x, y);
  return buf;
}

void require_margin(const KillingData& k, const Point3& p, const Eigen::Vector3d& dir, double h) {
  const Rect& d = k.domain();
  for (double s : {-h, h}) {
    const Eigen::Vector3d q = p + s * dir;
    if (!d.contains(q.x(), q.y())) {
      throw InsufficientMargin("finite-difference stencil around " + point_text(p.x(), p.y()) +
                               " leaves the domain");
    }
  }
}

double step_for(const Point3& p) { return numdiff::oracle_step(std::max(std::abs(p.x()), std::abs(p.y()))); }

}  // namespace

double Rect::diameter() const { return std::hypot(xmax - xmin, ymax - ymin); }

std::string format_constant(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

KillingData::KillingData(Expr lambda, Expr a, Expr b, Rect domain, std::string description)
    : lambda_(std::move(lambda)),
      a_(std::move(a)),
      b_(std::move(b)),
      domain_(domain),
      description_(std::move(description)) {
  for (const Expr* e : {&lambda_, &a_, &b_}) {
    if (e->empty() || e->vars() != kBaseVars) {
      throw InvalidData("lambda, a and b must be expressions in the variables {x, y}");
    }
  }
  if (!(domain_.xmax > domain_.xmin) || !(domain_.ymax > domain_.ymin)) {
    throw InvalidData("the domain must have positive area");
  }
  for (int i = 0; i < kValidationGrid; ++i) {
    for (int j = 0; j < kValidationGrid; ++j) {
      const double x = domain_.xmin + (i + 0.5) / kValidationGrid * (domain_.xmax - domain_.xmin);
      const double y = domain_.ymin + (j + 0.5) / kValidationGrid * (domain_.ymax - domain_.ymin);
      const double pt[] = {x, y};
      double lam = 0.0;
      try {
        lam = lambda_.evaluate(pt);
        a_.evaluate(pt);
        b_.evaluate(pt);
      } catch (const DomainError& e) {
        throw InvalidData(std::string("metric data undefined at ") + point_text(x, y) + ": " +
                          e.what());
      }
      if (!(lam > 0.0)) {
        throw InvalidData("lambda must be positive; lambda" + point_text(x, y) + " = " +
                          format_constant(lam));
      }
    }
  }
}

KillingData KillingData::from_text(const std::string& lambda, const std::string& a,
                                   const std::string& b, Rect domain, std::string description) {
  return KillingData(Expr::parse(lambda, kBaseVars), Expr::parse(a, kBaseVars),
                     Expr::parse(b, kBaseVars), domain, std::move(description));
}

void KillingData::require_inside(double x, double y) const {
  if (!domain_.contains(x, y)) {
    throw OutsideDomain("point " + point_text(x, y) + " lies outside the domain");
  }
}

BaseJets KillingData::jets(double x, double y) const {
  require_inside(x, y);
  const double pt[] = {x, y};
  return BaseJets{eval_jet(lambda_, pt), eval_jet(a_, pt), eval_jet(b_, pt)};
}

BundleCurvature bundle_curvature(const BaseJets& j) {
  // 2r = ((lambda b)_x - (lambda a)_y) / lambda^2; the product jets carry the
  // second derivatives needed for the gradient of the numerator.
  const Jet lb = j.lambda * j.b;
  const Jet la = j.lambda * j.a;
  const double num = lb.d(0) - la.d(1);
  const Eigen::Vector2d grad_num(lb.dd(0, 0) - la.dd(1, 0), lb.dd(0, 1) - la.dd(1, 1));
  const double lam = j.lambda.value;
  const Eigen::Vector2d grad_lam(j.lambda.d(0), j.lambda.d(1));

  BundleCurvature out;
  out.r = num / (2.0 * lam * lam);
  out.grad = grad_num / (2.0 * lam * lam) - num * grad_lam / (lam * lam * lam);
  return out;
}

BundleCurvature bundle_curvature(const KillingData& k, double x, double y) {
  return bundle_curvature(k.jets(x, y));
}

double gauss_curvature(const BaseJets& j) {
  const Jet& l = j.lambda;
  const double lam = l.value;
  const double lap_log =
      (l.dd(0, 0) + l.dd(1, 1)) / lam - (l.d(0) * l.d(0) + l.d(1) * l.d(1)) / (lam * lam);
  return -lap_log / (lam * lam);
}

double gauss_curvature(const KillingData& k, double x, double y) {
  return gauss_curvature(k.jets(x, y));
}

PointGeometry point_geometry(const BaseJets& j) {
  const BundleCurvature bc = bundle_curvature(j);
  return PointGeometry{j.lambda.value, bc.r, bc.grad, gauss_curvature(j)};
}

PointGeometry point_geometry(const KillingData& k, double x, double y) {
  return point_geometry(k.jets(x, y));
}

Eigen::Matrix3d frame_vectors(double lambda, double a, double b) {
  Eigen::Matrix3d f;
  f << 1.0 / lambda, 0.0, 0.0,  //
      0.0, 1.0 / lambda, 0.0,   //
      a, b, 1.0;
  return f;
}

Vec3 to_frame(double lambda, double a, double b, const Eigen::Vector3d& v) {
  // Dual coframe: lambda dx, lambda dy, dz - lambda (a dx + b dy).
  return Vec3(lambda * v.x(), lambda * v.y(), v.z() - lambda * (a * v.x() + b * v.y()));
}

FramePoint frame(const KillingData& k, const Point3& p) {
  FramePoint fp;
  fp.point = p;
  fp.jets = k.jets(p.x(), p.y());
  fp.vectors = frame_vectors(fp.jets.lambda.value, fp.jets.a.value, fp.jets.b.value);
  return fp;
}

Eigen::Matrix3d coordinate_metric(const KillingData& k, double x, double y) {
  k.require_inside(x, y);
  const double pt[] = {x, y};
  const double l = k.lambda().evaluate(pt);
  const double a = k.a().evaluate(pt);
  const double b = k.b().evaluate(pt);
  const double l2 = l * l;
  Eigen::Matrix3d g;
  g << l2 * (1.0 + a * a), l2 * a * b, -l * a,  //
      l2 * a * b, l2 * (1.0 + b * b), -l * b,   //
      -l * a, -l * b, 1.0;
  return g;
}

Vec3 ConnectionTable::covariant(const Vec3& x, const Vec3& y) const {
  Vec3 out = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const double w = x[i] * y[j];
      if (w == 0.0) continue;
      for (int m = 0; m < 3; ++m) out[m] += w * (*this)(i, j, m);
    }
  }
  return out;
}

double ConnectionTable::max_abs_difference(const ConnectionTable& other) const {
  double m = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) m = std::max(m, std::abs(c[i] - other.c[i]));
  return m;
}

ConnectionTable connection(const BaseJets& j) {
  const double lam = j.lambda.value;
  const double px = j.lambda.d(0) / (lam * lam);
  const double py = j.lambda.d(1) / (lam * lam);
  const double r = bundle_curvature(j).r;

  ConnectionTable t;
  t(0, 0, 1) = -py;
  t(0, 1, 0) = py;
  t(0, 1, 2) = r;
  t(0, 2, 1) = -r;
  t(1, 0, 1) = px;
  t(1, 0, 2) = -r;
  t(1, 1, 0) = -px;
  t(1, 2, 0) = r;
  t(2, 0, 1) = -r;
  t(2, 1, 0) = r;
  return t;
}

ConnectionTable connection(const KillingData& k, const Point3& p) {
  return connection(k.jets(p.x(), p.y()));
}

ConnectionTable connection_oracle(const KillingData& k, const Point3& p) {
  const double h = step_for(p);
  for (int a = 0; a < 2; ++a) require_margin(k, p, Eigen::Vector3d::Unit(a), h);

  auto metric_at = [&](const Point3& q) { return coordinate_metric(k, q.x(), q.y()); };
  auto frame_at = [&](const Point3& q) {
    const double pt[] = {q.x(), q.y()};
    return frame_vectors(k.lambda().evaluate(pt), k.a().evaluate(pt), k.b().evaluate(pt));
  };

  std::array<Eigen::Matrix3d, 3> dg;
  std::array<Eigen::Matrix3d, 3> dframe;
  for (int a = 0; a < 3; ++a) {
    const Eigen::Vector3d e = Eigen::Vector3d::Unit(a);
    dg[a] = numdiff::central([&](double s) { return metric_at(p + s * e); }, 0.0, h);
    dframe[a] = numdiff::central([&](double s) { return frame_at(p + s * e); }, 0.0, h);
  }

  const Eigen::Matrix3d g = metric_at(p);
  const Eigen::Matrix3d ginv = g.inverse();
  // Coordinate Christoffel symbols christ[c](a, b) = Gamma^c_{ab}.
  std::array<Eigen::Matrix3d, 3> christ;
  for (int c = 0; c < 3; ++c) {
    christ[c].setZero();
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        double s = 0.0;
        for (int d = 0; d < 3; ++d) {
          s += ginv(c, d) * (dg[a](b, d) + dg[b](a, d) - dg[d](a, b));
        }
        christ[c](a, b) = 0.5 * s;
      }
    }
  }

  const Eigen::Matrix3d f = frame_at(p);
  ConnectionTable t;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      Eigen::Vector3d v = Eigen::Vector3d::Zero();
      for (int a = 0; a < 3; ++a) v += f(a, i) * dframe[a].col(j);
      for (int c = 0; c < 3; ++c) v[c] += f.col(i).dot(christ[c] * f.col(j));
      const Eigen::Vector3d lowered = g * v;
      for (int m = 0; m < 3; ++m) t(i, j, m) = lowered.dot(f.col(m));
    }
  }
  return t;
}

Vec3 bracket(const BaseJets& j, int i, int k) {
  if (i == k) return Vec3::Zero();
  if (i == 2 || k == 2) return Vec3::Zero();
  const double lam = j.lambda.value;
  const Vec3 e12(j.lambda.d(1) / (lam * lam), -j.lambda.d(0) / (lam * lam),
                 2.0 * bundle_curvature(j).r);
  return i == 0 ? e12 : Vec3(-e12);
}

Vec3 bracket(const KillingData& k, const Point3& p, int i, int j) {
  return bracket(k.jets(p.x(), p.y()), i, j);
}

Vec3 bracket_oracle(const KillingData& k, const Point3& p, int i, int j) {
  const double h = step_for(p);
  const FramePoint fp = frame(k, p);
  auto field = [&](int idx, const Point3& q) -> Eigen::Vector3d {
    const double pt[] = {q.x(), q.y()};
    return frame_vectors(k.lambda().evaluate(pt), k.a().evaluate(pt), k.b().evaluate(pt))
        .col(idx);
  };
  auto derivative = [&](int along, int of) -> Eigen::Vector3d {
    const Eigen::Vector3d dir = fp.vectors.col(along);
    require_margin(k, p, dir, h);
    return numdiff::central([&](double s) { return field(of, p + s * dir); }, 0.0, h);
  };
  const Eigen::Vector3d coord = derivative(i, j) - derivative(j, i);
  return to_frame(fp.jets.lambda.value, fp.jets.a.value, fp.jets.b.value, coord);
}

Vec3 rotate_J(const Vec3& v) { return Vec3(-v.y(), v.x(), 0.0); }

Vec3 wedge(const Vec3& v, const Vec3& w) { return v.cross(w); }

double riemann_closed(const PointGeometry& g, const Vec3& x, const Vec3& y, const Vec3& z,
                      const Vec3& w) {
  const double r2 = g.r * g.r;
  const double xy_term = y.dot(z) * x.dot(w) - x.dot(z) * y.dot(w);
  const double vertical = y.z() * z.z() * x.dot(w) - x.z() * z.z() * y.dot(w) +
                          x.z() * y.dot(z) * w.z() - y.z() * x.dot(z) * w.z();
  const double gradient = z.dot(rotate_J(w)) * g.dr(rotate_J(wedge(x, y))) +
                          x.dot(rotate_J(y)) * g.dr(rotate_J(wedge(z, w)));
  return (g.G - 3.0 * r2) * xy_term - (g.G - 4.0 * r2) * vertical + gradient;
}

double riemann_closed(const KillingData& k, const Point3& p, const Vec3& x, const Vec3& y,
                      const Vec3& z, const Vec3& w) {
  return riemann_closed(point_geometry(k, p.x(), p.y()), x, y, z, w);
}

double riemann_direct(const KillingData& k, const Point3& p, const Vec3& x, const Vec3& y,
                      const Vec3& z, const Vec3& w) {
  const double h = step_for(p);
  const FramePoint fp = frame(k, p);
  const ConnectionTable here = connection(fp.jets);

  // nabla_U nabla_V Z for constant-component U, V, Z.
  auto second = [&](const Vec3& u, const Vec3& v) -> Vec3 {
    const Eigen::Vector3d dir = fp.vectors * u;
    require_margin(k, p, dir, h);
    const Vec3 dv = numdiff::central(
        [&](double s) -> Vec3 { return connection(k, p + s * dir).covariant(v, z); }, 0.0, h);
    return dv + here.covariant(u, here.covariant(v, z));
  };

  Vec3 xy_bracket = Vec3::Zero();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (x[i] * y[j] != 0.0) xy_bracket += x[i] * y[j] * bracket(fp.jets, i, j);
    }
  }
  const Vec3 rz = second(x, y) - second(y, x) - here.covariant(xy_bracket, z);
  return rz.dot(w);
}

RicciMatrix ricci(const PointGeometry& g) {
  const double r2 = g.r * g.r;
  RicciMatrix m;
  m << g.G - 2.0 * r2, 0.0, -g.grad_r.y() / g.lambda,  //
      0.0, g.G - 2.0 * r2, g.grad_r.x() / g.lambda,     //
      -g.grad_r.y() / g.lambda, g.grad_r.x() / g.lambda, 2.0 * r2;
  return m;
}

RicciMatrix ricci(const KillingData& k, const Point3& p) {
  return ricci(point_geometry(k, p.x(), p.y()));
}

RicciMatrix ricci_contraction(const KillingData& k, const Point3& p) {
  RicciMatrix m = RicciMatrix::Zero();
  for (int a = 0; a < 3; ++a) {
    for (int b = a; b < 3; ++b) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i) {
        const Vec3 ei = Vec3::Unit(i);
        s += riemann_direct(k, p, ei, Vec3::Unit(a), Vec3::Unit(b), ei);
      }
      m(a, b) = s;
      m(b, a) = s;
    }
  }
  return m;
}

KillingData bcv(double c, double mu, double half_width) {
  std::string lambda = "1";
  if (c != 0.0) {
    const double q = c / 4.0;
    lambda = "1/(1 " + std::string(q < 0 ? "- " : "+ ") + format_constant(std::abs(q)) +
             "*(x^2 + y^2))";
  }
  const std::string a = mu == 0.0 ? "0" : format_constant(-mu) + "*y";
  const std::string b = mu == 0.0 ? "0" : format_constant(mu) + "*x";

  double half = half_width;
  if (c < 0.0) {
    const double radius = 2.0 / std::sqrt(-c);
    half = std::min(half, 0.99 * radius / std::sqrt(2.0));
  }
  return KillingData::from_text(lambda, a, b, Rect{-half, half, -half, half},
                                "bcv(c=" + format_constant(c) + ", mu=" + format_constant(mu) + ")");
}

}  // namespace killing
