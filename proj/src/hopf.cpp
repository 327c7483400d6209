#include "killing/hopf.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

#include "killing/errors.hpp"
#include "killing/numdiff.hpp"

namespace killing {

namespace {

std::string at_text(const Eigen::Vector2d& p) {
  return "(" + format_constant(p.x()) + ", " + format_constant(p.y()) + ")";
}

Jet jet1(const Expr& e, double t) { return eval_jet(e, {t}); }

double quadratic(const Eigen::Matrix2d& m, const Eigen::Vector2d& v) { return v.dot(m * v); }

}  // namespace

// ---------------------------------------------------------------------------
// BaseSurface

BaseSurface BaseSurface::canonical(KillingData k) {
  BaseSurface b;
  b.killing_ = std::move(k);
  return b;
}

BaseSurface BaseSurface::warped(Expr f, double r, double tmin, double tmax) {
  if (f.vars().size() != 1) throw ArityMismatch("warping function must have one variable");
  if (!(tmin < tmax)) throw InvalidData("empty interval for the warped chart");
  BaseSurface b;
  b.f_ = std::move(f);
  b.r_ = r;
  b.tmin_ = tmin;
  b.tmax_ = tmax;
  return b;
}

const KillingData& BaseSurface::killing() const {
  if (!killing_) throw InvalidData("warped base chart has no canonical Killing data");
  return *killing_;
}

bool BaseSurface::contains(const Eigen::Vector2d& p) const {
  if (killing_) return killing_->domain().contains(p.x(), p.y());
  return p.x() > tmin_ && p.x() < tmax_;
}

void BaseSurface::require_inside(const Eigen::Vector2d& p) const {
  if (!contains(p)) throw OutsideDomain("base point " + at_text(p) + " is outside the chart");
}

Eigen::Matrix2d BaseSurface::metric(const Eigen::Vector2d& p) const {
  require_inside(p);
  if (killing_) {
    const double l = killing_->jets(p.x(), p.y()).lambda.value;
    return l * l * Eigen::Matrix2d::Identity();
  }
  const double f = jet1(f_, p.x()).value;
  return Eigen::Vector2d(1.0, f * f).asDiagonal();
}

std::array<Eigen::Matrix2d, 2> BaseSurface::christoffel(const Eigen::Vector2d& p) const {
  require_inside(p);
  std::array<Eigen::Matrix2d, 2> g{Eigen::Matrix2d::Zero(), Eigen::Matrix2d::Zero()};
  if (killing_) {
    const Jet l = killing_->jets(p.x(), p.y()).lambda;
    const double lx = l.d(0) / l.value, ly = l.d(1) / l.value;
    g[0] << lx, ly, ly, -lx;
    g[1] << -ly, lx, lx, ly;
    return g;
  }
  const Jet f = jet1(f_, p.x());
  g[0](1, 1) = -f.value * f.d(0);
  g[1](0, 1) = g[1](1, 0) = f.d(0) / f.value;
  return g;
}

double BaseSurface::area_density(const Eigen::Vector2d& p) const {
  return std::sqrt(metric(p).determinant());
}

Eigen::Vector2d BaseSurface::orthonormal(const Eigen::Vector2d& p, const Eigen::Vector2d& v) const {
  require_inside(p);
  if (killing_) return killing_->jets(p.x(), p.y()).lambda.value * v;
  return {v.x(), jet1(f_, p.x()).value * v.y()};
}

PointGeometry BaseSurface::geometry(const Eigen::Vector2d& p) const {
  require_inside(p);
  if (killing_) return point_geometry(*killing_, p.x(), p.y());
  const Jet f = jet1(f_, p.x());
  PointGeometry g;
  g.lambda = 1.0;
  g.r = r_;
  g.G = -f.dd(0, 0) / f.value;
  return g;
}

Eigen::Vector2d BaseSurface::dr(const Eigen::Vector2d& p) const {
  require_inside(p);
  if (killing_) return bundle_curvature(*killing_, p.x(), p.y()).grad;
  return Eigen::Vector2d::Zero();
}

// ---------------------------------------------------------------------------
// Curves

struct ArcLengthTable {
  BaseCurve native;
  BaseSurface base;
  std::vector<double> t, s;  // panel endpoints and cumulative length

  double speed(double tt) const {
    const CurvePoint c = native.at_native(tt);
    return std::sqrt(quadratic(base.metric(c.position), c.velocity));
  }

  double length(std::size_t k, double tt) const {
    return s[k] + boost::math::quadrature::gauss<double, 20>::integrate(
                      [this](double x) { return speed(x); }, t[k], tt);
  }

  double invert(double target) const {
    const double L = s.back();
    if (target < -1e-12 * L || target > L * (1 + 1e-12)) {
      throw OutsideDomain("arc length " + format_constant(target) + " outside [0, " + format_constant(L) + "]");
    }
    target = std::clamp(target, 0.0, L);
    std::size_t k = std::upper_bound(s.begin(), s.end(), target) - s.begin();
    k = std::clamp<std::size_t>(k, 1, s.size() - 1) - 1;
    const double w = (target - s[k]) / (s[k + 1] - s[k]);
    double tt = t[k] + w * (t[k + 1] - t[k]);
    for (int it = 0; it < 40; ++it) {
      const double step = (length(k, tt) - target) / speed(tt);
      tt = std::clamp(tt - step, t[k], t[k + 1]);
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(tt))) break;
    }
    return tt;
  }
};

BaseCurve::BaseCurve(Expr x, Expr y, double s0, double s1, bool arc_length)
    : x_(std::move(x)), y_(std::move(y)), s0_(s0), s1_(s1), t0_(s0), t1_(s1), arc_length_(arc_length) {
  if (x_.vars().size() != 1 || y_.vars().size() != 1) {
    throw ArityMismatch("curve components must have one variable");
  }
  if (!(s0 < s1)) throw InvalidData("empty curve parameter interval");
}

BaseCurve BaseCurve::from_text(const std::string& x, const std::string& y, double s0, double s1,
                               bool arc_length) {
  return BaseCurve(Expr::parse(x, {"s"}), Expr::parse(y, {"s"}), s0, s1, arc_length);
}

double BaseCurve::native(double s) const { return table_ ? table_->invert(s - s0_) : s; }

CurvePoint BaseCurve::at_native(double t) const {
  const Jet x = jet1(x_, t), y = jet1(y_, t);
  CurvePoint c;
  c.position = {x.value, y.value};
  c.velocity = {x.d(0), y.d(0)};
  c.acceleration = {x.dd(0, 0), y.dd(0, 0)};
  return c;
}

CurvePoint BaseCurve::at(double s) const {
  if (!table_) return at_native(s);
  const double t = native(s);
  const CurvePoint c = at_native(t);
  const Eigen::Matrix2d h = table_->base.metric(c.position);
  const auto gamma = table_->base.christoffel(c.position);
  const Eigen::Vector2d cov =
      c.acceleration + Eigen::Vector2d(quadratic(gamma[0], c.velocity), quadratic(gamma[1], c.velocity));
  const double sigma = std::sqrt(quadratic(h, c.velocity));
  const double dsigma = c.velocity.dot(h * cov) / sigma;
  CurvePoint out;
  out.position = c.position;
  out.velocity = c.velocity / sigma;
  out.acceleration = c.acceleration / (sigma * sigma) - c.velocity * dsigma / (sigma * sigma * sigma);
  return out;
}

BaseCurve arclength_reparam(const BaseCurve& c, const BaseSurface& base) {
  BaseCurve native(c.x_, c.y_, c.t0_, c.t1_);
  constexpr int kPanels = 256;
  constexpr int kScan = 1024;
  for (int i = 0; i <= kScan; ++i) {
    const double t = c.t0_ + (c.t1_ - c.t0_) * i / kScan;
    const CurvePoint p = native.at_native(t);
    base.require_inside(p.position);
    if (quadratic(base.metric(p.position), p.velocity) <= 1e-12) {
      throw DegenerateCurve("curve is not regular at parameter " + format_constant(t));
    }
  }
  auto table = std::make_shared<ArcLengthTable>(ArcLengthTable{native, base, {}, {}});
  table->t.resize(kPanels + 1);
  table->s.assign(kPanels + 1, 0.0);
  for (int k = 0; k <= kPanels; ++k) table->t[k] = c.t0_ + (c.t1_ - c.t0_) * k / kPanels;
  table->t.back() = c.t1_;
  for (int k = 0; k < kPanels; ++k) table->s[k + 1] = table->length(k, table->t[k + 1]);

  BaseCurve out(c.x_, c.y_, 0.0, table->s.back(), true);
  out.t0_ = c.t0_;
  out.t1_ = c.t1_;
  out.table_ = std::move(table);
  return out;
}

double geodesic_curvature(const BaseSurface& base, const CurvePoint& c) {
  const Eigen::Matrix2d h = base.metric(c.position);
  const auto gamma = base.christoffel(c.position);
  const Eigen::Vector2d cov =
      c.acceleration + Eigen::Vector2d(quadratic(gamma[0], c.velocity), quadratic(gamma[1], c.velocity));
  const Eigen::Vector2d w = h * c.velocity;
  // |v| times the unit normal rotated positively from v.
  const Eigen::Vector2d n = Eigen::Vector2d(-w.y(), w.x()) / std::sqrt(h.determinant());
  const double speed = std::sqrt(quadratic(h, c.velocity));
  return cov.dot(h * n) / (speed * speed * speed);
}

double geodesic_curvature(const BaseCurve& c, const BaseSurface& base, double s) {
  const CurvePoint p = c.at(s);
  const double speed = std::sqrt(quadratic(base.metric(p.position), p.velocity));
  if (std::abs(speed - 1.0) > 1e-8) {
    throw NotArcLength("curve speed " + format_constant(speed) + " at s = " + format_constant(s));
  }
  return geodesic_curvature(base, p);
}

double bcv_circle_radius(double c, double k) {
  const double disc = k * k + c;
  if (disc < 0 || k + std::sqrt(disc) <= 0) {
    throw InvalidData("no origin-centred circle with geodesic curvature " + format_constant(k));
  }
  const double R = 2.0 / (k + std::sqrt(disc));
  if (1.0 + 0.25 * c * R * R <= 0) throw InvalidData("circle leaves the model disk");
  return R;
}

BaseCurve bcv_circle(double c, double R) {
  if (!(R > 0)) throw InvalidData("circle radius must be positive");
  const double lambda = 1.0 / (1.0 + 0.25 * c * R * R);
  if (!(lambda > 0)) throw InvalidData("circle leaves the model disk");
  const double m = lambda * R;
  const std::string rr = format_constant(R), mm = format_constant(m);
  return BaseCurve::from_text(rr + "*cos(s/" + mm + ")", rr + "*sin(s/" + mm + ")", 0.0,
                              2 * M_PI * m, true);
}

// ---------------------------------------------------------------------------
// Hopf systems

std::string hopf_verdict_name(HopfVerdict v) {
  switch (v) {
    case HopfVerdict::Proper: return "proper-biharmonic";
    case HopfVerdict::Minimal: return "minimal-not-proper";
    case HopfVerdict::NotConstant: return "not-constant";
    case HopfVerdict::NoAdmissibleCurvature: return "no-admissible-curvature";
    case HopfVerdict::CurvatureMismatch: return "curvature-mismatch";
  }
  return "unknown";
}

namespace {

// Geodesic torsion -<nabla_{e1} e2, eta> of the horizontal lift, frame e1, eta = J e1, e2 = eta x e1.
double geodesic_torsion(const BaseSurface& base, const Eigen::Vector2d& p, const Vec3& e1,
                        const Vec3& e2, const Vec3& eta, double r) {
  if (base.is_canonical()) {
    const ConnectionTable conn = connection(base.killing().jets(p.x(), p.y()));
    return -conn.covariant(e1, e2).dot(eta);
  }
  // nabla_X xi = r X ^ xi on any Killing submersion; e2 is a constant multiple of xi.
  const Vec3 dxi = r * wedge(e1, Vec3::UnitZ());
  return -(e2.z() * dxi).dot(eta);
}

double mean(const std::vector<double>& v) {
  double m = 0;
  for (double x : v) m += x;
  return m / static_cast<double>(v.size());
}

double stddev(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace

HopfReport hopf_residuals(const BaseCurve& c, const BaseSurface& base, const HopfOptions& o) {
  if (o.samples < 2) throw InvalidData("at least two samples are required");
  const double L = c.s_max() - c.s_min();
  const double spacing = L / o.samples;
  const double h = std::min(1e-2, 0.4 * spacing);
  auto kappa = [&](double s) { return geodesic_curvature(c, base, s); };

  HopfReport rep;
  rep.samples.reserve(o.samples);
  std::vector<double> ks, rs, Gs;
  for (int i = 0; i < o.samples; ++i) {
    HopfSample q;
    q.s = c.s_min() + (i + 0.5) * spacing;
    const CurvePoint cp = c.at(q.s);
    q.point = cp.position;
    q.kappa = kappa(q.s);
    q.dkappa = numdiff::central(kappa, q.s, h);
    q.ddkappa = numdiff::central2(kappa, q.s, h);

    const PointGeometry g = base.geometry(cp.position);
    q.r = g.r;
    q.G = g.G;
    q.dr = base.dr(cp.position).dot(cp.velocity);

    const Eigen::Vector2d t = base.orthonormal(cp.position, cp.velocity);
    const Vec3 e1(t.x(), t.y(), 0.0);
    const Vec3 eta = rotate_J(e1);
    const Vec3 e2 = wedge(eta, e1);
    q.tau = geodesic_torsion(base, cp.position, e1, e2, eta, g.r);

    const RicciMatrix ric = ricci(g);
    const double k = q.kappa, dk = q.dkappa;
    q.sys_ou = {q.ddkappa - k * (k * k + 2 * q.tau * q.tau) + k * eta.dot(ric * eta),
                3 * dk * k - k * eta.dot(ric * e1), dk * q.tau + k * eta.dot(ric * e2)};
    q.last = {q.ddkappa - k * k * k + (g.G - 4 * g.r * g.r) * k, k * dk, g.r * dk + q.dr * k};

    const Eigen::Vector3d expected(q.last[0], 3 * q.last[1], -q.last[2]);
    rep.max_sys_ou = std::max(rep.max_sys_ou, q.sys_ou.cwiseAbs().maxCoeff());
    rep.max_last = std::max(rep.max_last, q.last.cwiseAbs().maxCoeff());
    rep.max_agreement = std::max(rep.max_agreement, (q.sys_ou - expected).cwiseAbs().maxCoeff());
    ks.push_back(q.kappa);
    rs.push_back(q.r);
    Gs.push_back(q.G);
    rep.samples.push_back(q);
  }
  rep.mean_kappa = mean(ks);
  rep.mean_r = mean(rs);
  rep.mean_G = mean(Gs);
  rep.stddev_kappa = stddev(ks);
  rep.stddev_r = stddev(rs);
  rep.stddev_G = stddev(Gs);
  rep.admissible = rep.mean_G - 4 * rep.mean_r * rep.mean_r;
  rep.defect = rep.mean_kappa * rep.mean_kappa - rep.admissible;
  return rep;
}

void classify_hopf(HopfReport& rep, double tol) {
  double max_kappa = 0;
  for (const HopfSample& q : rep.samples) max_kappa = std::max(max_kappa, std::abs(q.kappa));
  if (max_kappa <= tol) {
    rep.verdict = HopfVerdict::Minimal;
  } else if (rep.stddev_kappa > tol || rep.stddev_r > tol || rep.stddev_G > tol) {
    rep.verdict = HopfVerdict::NotConstant;
  } else if (rep.admissible < -tol) {
    rep.verdict = HopfVerdict::NoAdmissibleCurvature;
  } else if (std::abs(rep.defect) > tol) {
    rep.verdict = HopfVerdict::CurvatureMismatch;
  } else {
    rep.verdict = HopfVerdict::Proper;
  }
  rep.pass = rep.verdict == HopfVerdict::Proper;
  if (rep.pass) {
    rep.constants = std::array<double, 3>{rep.mean_kappa, rep.mean_G, rep.mean_r};
  } else {
    rep.constants.reset();
  }
}

HopfReport classify_hopf(const BaseCurve& c, const BaseSurface& base, const HopfOptions& o) {
  HopfReport rep = hopf_residuals(c, base, o);
  classify_hopf(rep, o.tol);
  return rep;
}

SurfacePatch hopf_cylinder_patch(const BaseCurve& c, const KillingData& k) {
  const Expr x = c.x().relabeled({"s", "v"});
  const Expr y = c.y().relabeled({"s", "v"});
  const Expr z = Expr::parse("v", {"s", "v"});
  // d_u x d_v is the lift of the clockwise normal; flipping gives H = kappa_g.
  return SurfacePatch(x, y, z, Rect{c.native_min(), c.native_max(), 0.0, 1.0}, k, true);
}

// ---------------------------------------------------------------------------
// Example family

ExampleResult example_construct(const Expr& f, double r, double tmin, double tmax, const HopfOptions& o) {
  if (f.vars().size() != 1) throw ArityMismatch("f must be an expression in t");
  if (!(tmin < tmax)) throw InvalidData("empty interval");
  auto g = [&](double t) {
    const Jet j = jet1(f, t);
    return j.value * (j.dd(0, 0) + 4 * r * r * j.value) + j.d(0) * j.d(0);
  };

  constexpr int kScan = 1024;
  const double dt = (tmax - tmin) / kScan;
  std::vector<double> ts(kScan), gs(kScan);
  double scale = 0, gmax = 0;
  for (int i = 0; i < kScan; ++i) {
    ts[i] = tmin + (i + 0.5) * dt;
    const Jet j = jet1(f, ts[i]);
    if (!(j.value > 0)) throw InvalidData("f is not positive at t = " + format_constant(ts[i]));
    gs[i] = g(ts[i]);
    scale = std::max({scale, j.value * j.value, j.d(0) * j.d(0), std::abs(j.value * j.dd(0, 0))});
    gmax = std::max(gmax, std::abs(gs[i]));
  }
  if (gmax <= 1e-12 * std::max(1.0, scale)) {
    throw NoRoot("no isolated root: f (f'' + 4 r^2 f) + f'^2 vanishes on the whole interval");
  }

  std::vector<double> roots;
  for (int i = 0; i < kScan; ++i) {
    if (gs[i] == 0.0) {
      roots.push_back(ts[i]);
      continue;
    }
    if (i + 1 < kScan && gs[i + 1] != 0.0 && (gs[i] < 0) != (gs[i + 1] < 0)) {
      std::uintmax_t iters = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(
          g, ts[i], ts[i + 1], gs[i], gs[i + 1], boost::math::tools::eps_tolerance<double>(52), iters);
      roots.push_back(0.5 * (a + b));
    }
  }
  if (roots.empty()) throw NoRoot("no sign change of f (f'' + 4 r^2 f) + f'^2 on the interval");
  std::sort(roots.begin(), roots.end());

  ExampleResult out{BaseSurface::warped(f, r, tmin, tmax), {}};
  for (double t0 : roots) {
    const Jet j = jet1(f, t0);
    BaseCurve curve = BaseCurve::from_text(format_constant(t0), "s/" + format_constant(j.value), 0.0,
                                           M_PI * j.value, true);
    HopfReport rep = classify_hopf(curve, out.base, o);
    out.roots.push_back(ExampleRoot{t0, j.d(0) / j.value, -j.dd(0, 0) / j.value, std::move(curve), std::move(rep)});
  }
  return out;
}

}  // namespace killing
