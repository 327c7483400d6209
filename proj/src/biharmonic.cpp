#include "killing/biharmonic.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>

#include "killing/errors.hpp"
#include "killing/numdiff.hpp"

namespace killing {

namespace {

void require_cmc(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o) {
  const double dev = cmc_deviation(s, u, v);
  if (dev > o.cmc_tol) throw NotCMC(dev, o.cmc_tol);
}

// Largest deviation from the centre value of f over the 5x5 probe stencil.
template <class F>
double stencil_spread(const SurfacePatch& s, double u, double v, F&& f) {
  const double h = s.step();
  s.require_margin(u, v, 2 * h);
  const double centre = f(u, v);
  double spread = 0.0;
  for (int i = -2; i <= 2; ++i)
    for (int j = -2; j <= 2; ++j) spread = std::max(spread, std::abs(f(u + i * h, v + j * h) - centre));
  return spread;
}

// The same surface with eta chosen so that the adapted e2 points along grad r.
SurfacePatch oriented_towards_grad_r(const SurfacePatch& s, const SurfacePointData& d) {
  if (d.has_frame && d.e2.dot(d.ambient.gradient_r()) < 0.0) return s.with_flip(!s.flipped());
  return s;
}

}  // namespace

double cmc_deviation(const SurfacePatch& s, double u, double v) {
  return stencil_spread(s, u, v, [&](double pu, double pv) { return analyze_point(s, pu, pv).H; });
}

BitensionResidual bitension_cmc(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o) {
  BitensionResidual res;
  res.cmc_deviation = cmc_deviation(s, u, v);
  if (res.cmc_deviation > o.cmc_tol) throw NotCMC(res.cmc_deviation, o.cmc_tol);

  const SurfacePointData d = analyze_point(s, u, v);
  const double h = s.step();
  const Eigen::Vector2d dH(numdiff::central([&](double t) { return analyze_point(s, t, v).H; }, u, h),
                           numdiff::central([&](double t) { return analyze_point(s, u, t).H; }, v, h));
  const Vec3 gradH = d.push(d.g.inverse() * dH);
  const double lapH = surface_laplacian(s, field_H, u, v);

  const RicciMatrix ric = ricci(d.ambient);
  const Vec3 ric_eta = ric * d.eta;
  const double ric_eta_eta = d.eta.dot(ric_eta);
  const Vec3 ric_tangent = ric_eta - ric_eta.dot(d.eta) * d.eta;

  res.H = d.H;
  res.normal = lapH + d.H * d.normSqA - d.H * ric_eta_eta;
  const Vec3 t = 2.0 * d.apply_shape(gradH) + d.H * gradH - 2.0 * d.H * ric_tangent;
  res.tangential = Eigen::Vector2d(t.dot(d.basis[0]), t.dot(d.basis[1]));
  return res;
}

PointInvariants point_invariants(const SurfacePatch& s, double u, double v, bool with_laplacian) {
  const SurfacePointData d = analyze_point(s, u, v);
  PointInvariants p;
  p.geometry = d.ambient;
  p.a = d.basis[0];
  p.b = d.basis[1];
  p.c = d.eta;
  p.H = d.H;
  p.normSqA = d.normSqA;
  if (d.has_frame) {
    p.dphi = dphi_adapted(d);
    if (with_laplacian) p.lap_phi = surface_laplacian(s, field_phi, u, v);
  }
  return p;
}

PointInvariants gradient_adapted(const PointGeometry& g, double phi, double H, double normSqA) {
  const Vec3 grad = g.gradient_r();
  if (grad.norm() == 0.0) throw ZeroGradR("grad r vanishes: the gradient-adapted frame is undefined");
  const Vec3 e2 = grad.normalized();
  const Vec3 je2 = rotate_J(e2);
  PointInvariants p;
  p.geometry = g;
  p.a = -std::cos(phi) * je2 + std::sin(phi) * Vec3::UnitZ();
  p.b = e2;
  p.c = std::sin(phi) * je2 + std::cos(phi) * Vec3::UnitZ();
  p.H = H;
  p.normSqA = normSqA;
  return p;
}

Eigen::Vector3d sistemap_residuals(const PointInvariants& p) {
  const PointGeometry& g = p.geometry;
  const double G = g.G, r = g.r, rx = g.grad_r.x(), ry = g.grad_r.y(), lambda = g.lambda;
  const Vec3& a = p.a;
  const Vec3& b = p.b;
  const Vec3& c = p.c;
  const double k = 4 * r * r - G;
  return Eigen::Vector3d(
      (G - 2 * r * r) + k * c.z() * c.z() + 2 * c.z() * (c.y() * rx - c.x() * ry) / lambda - p.normSqA,
      k * c.z() * a.z() + (rx * (c.y() * a.z() + c.z() * a.y()) - ry * (c.x() * a.z() + c.z() * a.x())) / lambda,
      k * c.z() * b.z() + (rx * (c.y() * b.z() + c.z() * b.y()) - ry * (c.x() * b.z() + c.z() * b.x())) / lambda);
}

Eigen::Vector3d sistemap_residuals(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o) {
  require_cmc(s, u, v, o);
  return sistemap_residuals(point_invariants(s, u, v));
}

Eigen::Vector3d sistemap_from_ricci(const PointInvariants& p) {
  const RicciMatrix ric = ricci(p.geometry);
  return Eigen::Vector3d(p.c.dot(ric * p.c) - p.normSqA, p.c.dot(ric * p.a), p.c.dot(ric * p.b));
}

NormalityIdentity normality_identity(const PointInvariants& p) {
  const PointGeometry& g = p.geometry;
  const Eigen::Vector3d sys = sistemap_residuals(p);
  NormalityIdentity n;
  n.direct = p.cos_phi() * g.gradient_r().dot(p.c);
  n.expanded = p.c.z() * (p.c.x() * g.grad_r.x() + p.c.y() * g.grad_r.y()) / g.lambda;
  n.tangential = sys[1] * p.b.z() - sys[2] * p.a.z();
  return n;
}

NormalityIdentity normality_identity(const SurfacePatch& s, double u, double v) {
  return normality_identity(point_invariants(s, u, v));
}

EqDue eq_due_residuals(const PointInvariants& p, const BiharmonicOptions& o) {
  const double sn = p.sin_phi(), cs = p.cos_phi();
  if (sn < o.eps_phi || std::abs(cs) < o.eps_phi) {
    throw AngleSingular("the gradient-adapted system needs phi away from 0 and pi/2");
  }
  const double g = p.grad_r_norm();
  if (g <= o.grad_tol) throw ZeroGradR("grad r vanishes; use the constant-r system");
  const double G = p.geometry.G, r = p.geometry.r;
  const double phi = p.phi();
  EqDue e;
  e.first = G - 2 * r * r + (4 * r * r - G) * cs * cs + g * std::sin(2 * phi) - p.normSqA;
  e.second = (G - 4 * r * r) * std::sin(2 * phi) / 2 + g * std::cos(2 * phi);
  e.g4r2_degenerate = std::abs(4 * r * r - G) <= o.degenerate_tol;
  if (!e.g4r2_degenerate) e.tan2phi = std::tan(2 * phi) - 2 * g / (4 * r * r - G);
  return e;
}

EqDue eq_due_residuals(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o) {
  const SurfacePointData d = analyze_point(s, u, v);
  return eq_due_residuals(point_invariants(oriented_towards_grad_r(s, d), u, v), o);
}

double tan2phi_residual(const PointInvariants& p, const BiharmonicOptions& o) {
  const EqDue e = eq_due_residuals(p, o);
  if (e.g4r2_degenerate) {
    throw G4r2Degenerate("4r^2 - G vanishes while grad r does not: no proper biharmonic CMC surface");
  }
  return e.tan2phi;
}

double aphi_residual(const PointInvariants& p) {
  const double tan = p.sin_phi() / p.cos_phi();
  return 2 * p.normSqA - tan * p.lap_phi - p.dphi.squaredNorm();
}

APhi aphi_residual(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o) {
  const SurfacePointData d = analyze_point(s, u, v);
  const Eigen::Vector2d dphi = dphi_adapted(d);
  if (std::abs(d.cos_phi) < o.eps_phi) throw AngleSingular("tan(phi) is unbounded at phi = pi/2");
  const double tan = d.sin_phi / d.cos_phi;
  const double r = d.ambient.r;

  double second = 0.0;  // e1 e1(phi) + e2 e2(phi)
  for (int a = 0; a < 2; ++a) {
    const SurfaceField first = [a](const SurfacePatch& q, double pu, double pv) {
      return frame_derivative(q, field_phi, pu, pv, a);
    };
    second += frame_derivative(s, first, u, v, a);
  }

  APhi res;
  res.laplacian_divergence = surface_laplacian(s, field_phi, u, v);
  res.aphi = 2 * d.normSqA - tan * res.laplacian_divergence - dphi.squaredNorm();
  const double lower = 2 * r * dphi[1] + d.H * dphi[0];
  res.co1 = 2 * d.normSqA - (tan * second + lower);
  res.laplacian_frame = second - (dphi.squaredNorm() - lower) / tan;
  return res;
}

std::string branch_name(Branch b) {
  switch (b) {
    case Branch::A: return "a";
    case Branch::B1: return "b1";
    case Branch::B2: return "b2";
    case Branch::None: return "none";
    case Branch::ContradictionPropRconst: return "contradiction-propRconst";
  }
  return "none";
}

BranchReport classify(const PointInvariants& p, const BiharmonicOptions& o) {
  BranchReport rep;
  const PointGeometry& g = p.geometry;
  const double G = g.G, r = g.r;
  const double sn = p.sin_phi(), cs = p.cos_phi();
  const double grad = p.grad_r_norm();

  if (sn < o.eps_phi) {
    rep.branch = Branch::None;
    rep.note = "phi = 0: the horizontal distribution would be integrable, forcing r = 0 and A = 0";
    rep.norma_residual = p.normSqA;
    return rep;
  }

  if (std::abs(cs) < o.eps_phi) {
    rep.branch = Branch::A;
    rep.norma_residual = p.normSqA - (G - 2 * r * r);
    rep.orto_residual = p.c.y() * g.grad_r.x() - p.c.x() * g.grad_r.y();
    rep.hopf_defect = p.H * p.H - (G - 4 * r * r);
    const bool proper = std::abs(p.H) > o.tol;
    rep.conditions_hold = proper && std::abs(rep.norma_residual) <= o.tol &&
                          std::abs(rep.orto_residual) <= o.tol && std::abs(rep.hopf_defect) <= o.tol;
    if (!proper) rep.note = "H = 0: harmonic, not proper";
    else if (G - 4 * r * r < 0) rep.note = "G - 4r^2 < 0: no real H with H^2 = G - 4r^2";
    else rep.note = "Hopf cylinder: requires H^2 = G - 4r^2 with r, G constant along S";
    return rep;
  }

  if (grad <= o.grad_tol) {
    rep.branch = Branch::B1;
    rep.sphere_condition_residual = p.normSqA - 2 * r * r;
    if (std::abs(4 * r * r - G) <= o.tol) {
      rep.conditions_hold = std::abs(rep.sphere_condition_residual) <= o.tol && std::abs(p.H) > o.tol;
      rep.note = "G = 4r^2: certified through |A|^2 = 2r^2 only";
    } else {
      rep.note = "G != 4r^2 with 0 < phi < pi/2 forces cos(phi) = +-1: not proper biharmonic";
    }
    return rep;
  }

  BiharmonicOptions relaxed = o;
  relaxed.grad_tol = 0.0;
  const EqDue e = eq_due_residuals(p, relaxed);
  rep.eq_due_first = e.first;
  rep.eq_due_second = e.second;
  if (e.g4r2_degenerate || std::abs(4 * r * r - G) <= o.degenerate_tol) {
    rep.branch = Branch::ContradictionPropRconst;
    rep.note = "4r^2 = G with grad r != 0: cannot be proper biharmonic";
    return rep;
  }
  rep.branch = Branch::B2;
  rep.tan2phi_residual = e.tan2phi;
  const double first = p.normSqA - 2 * r * r - grad * sn / cs;
  rep.e1norma_residual = std::max(std::abs(first), std::abs(e.tan2phi));
  if (!std::isnan(p.lap_phi) && !p.dphi.hasNaN()) rep.aphi_residual = aphi_residual(p);
  rep.conditions_hold = rep.e1norma_residual <= o.tol && std::abs(e.first) <= o.tol &&
                        (std::isnan(rep.aphi_residual) || std::abs(rep.aphi_residual) <= o.tol);
  rep.note = rep.conditions_hold ? "angle relation and A-phi equation hold"
                                 : "residuals of the gradient-adapted system do not vanish";
  return rep;
}

BranchReport classify_point(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o) {
  if (o.require_cmc) require_cmc(s, u, v, o);
  const SurfacePointData d = analyze_point(s, u, v);
  const bool b2_candidate = d.sin_phi >= o.eps_phi && std::abs(d.cos_phi) >= o.eps_phi &&
                            d.ambient.gradient_r().norm() > o.grad_tol;
  const PointInvariants p =
      b2_candidate ? point_invariants(oriented_towards_grad_r(s, d), u, v, true) : point_invariants(s, u, v);
  BranchReport rep = classify(p, o);
  if (rep.branch == Branch::A) {
    const double spread_r =
        stencil_spread(s, u, v, [&](double pu, double pv) { return analyze_point(s, pu, pv).ambient.r; });
    const double spread_G =
        stencil_spread(s, u, v, [&](double pu, double pv) { return analyze_point(s, pu, pv).ambient.G; });
    rep.constancy = std::max(spread_r, spread_G);
    rep.conditions_hold = rep.conditions_hold && rep.constancy <= o.tol;
  }
  return rep;
}

}  // namespace killing
