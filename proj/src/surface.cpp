#include "killing/surface.hpp"

#include <cmath>
#include <string>

#include <Eigen/Geometry>
#include <Eigen/LU>

#include "killing/errors.hpp"
#include "killing/numdiff.hpp"

namespace killing {

namespace {

std::string param_text(double u, double v) {
  return "(" + format_constant(u) + ", " + format_constant(v) + ")";
}

Expr as_uv(const Expr& e, const char* which) {
  if (e.vars().size() != 2) {
    throw ArityMismatch(std::string("immersion component ") + which + " must have two variables");
  }
  return e.relabeled({"u", "v"});
}

void require_frame(const SurfacePointData& d) {
  if (!d.has_frame) {
    throw AngleSingular("sin(phi) = " + format_constant(d.sin_phi) + " at " + param_text(d.u, d.v) +
                        ": adapted frame undefined");
  }
}

}  // namespace

SurfacePatch::SurfacePatch(Expr x, Expr y, Expr z, Rect params, KillingData ambient, bool flip,
                           SurfaceOptions options)
    : x_(as_uv(x, "X")),
      y_(as_uv(y, "Y")),
      z_(as_uv(z, "Z")),
      params_(params),
      ambient_(std::move(ambient)),
      flip_(flip),
      options_(options) {
  if (!(params_.xmin < params_.xmax && params_.ymin < params_.ymax)) {
    throw InvalidData("parameter domain must have positive area");
  }
  constexpr int kGrid = 9;
  for (int i = 1; i <= kGrid; ++i) {
    for (int j = 1; j <= kGrid; ++j) {
      const double u = params_.xmin + (params_.xmax - params_.xmin) * i / (kGrid + 1);
      const double v = params_.ymin + (params_.ymax - params_.ymin) * j / (kGrid + 1);
      (void)analyze_point(*this, u, v);
    }
  }
}

SurfacePatch SurfacePatch::from_text(const std::string& x, const std::string& y, const std::string& z,
                                     Rect params, KillingData ambient, bool flip,
                                     SurfaceOptions options) {
  const std::vector<std::string> uv = {"u", "v"};
  return SurfacePatch(Expr::parse(x, uv), Expr::parse(y, uv), Expr::parse(z, uv), params,
                      std::move(ambient), flip, options);
}

SurfacePatch SurfacePatch::graph(const std::string& height, Rect params, KillingData ambient,
                                 bool flip, SurfaceOptions options) {
  const std::vector<std::string> xy = {"x", "y"};
  return SurfacePatch(Expr::parse("x", xy), Expr::parse("y", xy), Expr::parse(height, xy), params,
                      std::move(ambient), flip, options);
}

SurfacePatch SurfacePatch::with_flip(bool flip) const {
  SurfacePatch copy = *this;
  copy.flip_ = flip;
  return copy;
}

double SurfacePatch::step() const { return options_.fd_scale * params_.diameter(); }

void SurfacePatch::require_margin(double u, double v, double reach) const {
  if (!params_.contains(u, v, reach)) {
    throw InsufficientMargin("finite-difference stencil of reach " + format_constant(reach) +
                             " around " + param_text(u, v) + " leaves the parameter domain");
  }
}

Point3 SurfacePatch::position(double u, double v) const {
  const double q[] = {u, v};
  return Point3(x_.evaluate(q), y_.evaluate(q), z_.evaluate(q));
}

Eigen::Vector2d SurfacePointData::coefficients(const Vec3& w) const {
  const Eigen::Vector2d rhs(tangent[0].dot(w), tangent[1].dot(w));
  return g.ldlt().solve(rhs);
}

Vec3 SurfacePointData::apply_shape(const Vec3& w) const {
  const Eigen::Vector2d c = coefficients(w);
  return c[0] * weingarten[0] + c[1] * weingarten[1];
}

SurfacePointData analyze_point(const SurfacePatch& s, double u, double v) {
  if (!s.params().contains(u, v)) {
    throw OutsideDomain("parameter point " + param_text(u, v) + " is outside the patch");
  }
  SurfacePointData d;
  d.u = u;
  d.v = v;

  const Jet jx = eval_jet(s.x(), {u, v});
  const Jet jy = eval_jet(s.y(), {u, v});
  const Jet jz = eval_jet(s.z(), {u, v});
  d.point = Point3(jx.value, jy.value, jz.value);

  const BaseJets base = s.ambient().jets(jx.value, jy.value);
  d.ambient = point_geometry(base);
  d.connection = connection(base);

  // Jets in (u, v) of lambda, lambda a, lambda b along the immersion.
  const Jet inners[] = {jx, jy};
  const Jet L = compose_jet(base.lambda, inners);
  const Jet LA = L * compose_jet(base.a, inners);
  const Jet LB = L * compose_jet(base.b, inners);

  // Frame components of d_j and their parameter derivatives d_i.
  std::array<std::array<Vec3, 2>, 2> dtangent;  // [i][j]
  for (int j = 0; j < 2; ++j) {
    d.tangent[j] = Vec3(L.value * jx.d(j), L.value * jy.d(j),
                        jz.d(j) - LA.value * jx.d(j) - LB.value * jy.d(j));
    for (int i = 0; i < 2; ++i) {
      dtangent[i][j] = Vec3(L.d(i) * jx.d(j) + L.value * jx.dd(i, j),
                            L.d(i) * jy.d(j) + L.value * jy.dd(i, j),
                            jz.dd(i, j) - LA.d(i) * jx.d(j) - LA.value * jx.dd(i, j) -
                                LB.d(i) * jy.d(j) - LB.value * jy.dd(i, j));
    }
  }

  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) d.g(j, k) = d.tangent[j].dot(d.tangent[k]);
  const double det = d.g.determinant();
  if (!(det > s.options().regularity_tol)) {
    throw DegenerateImmersion("Gram determinant " + format_constant(det) + " at " + param_text(u, v));
  }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        d.dg[i](j, k) = dtangent[i][j].dot(d.tangent[k]) + d.tangent[j].dot(dtangent[i][k]);

  const Eigen::Matrix2d ginv = d.g.inverse();
  for (int m = 0; m < 2; ++m)
    for (int i = 0; i < 2; ++i)
      for (int k = 0; k < 2; ++k) {
        double sum = 0.0;
        for (int l = 0; l < 2; ++l) sum += ginv(m, l) * (d.dg[i](l, k) + d.dg[k](l, i) - d.dg[l](i, k));
        d.christoffel[m](i, k) = 0.5 * sum;
      }

  // Unit normal and its parameter derivatives.
  const double sign = s.flipped() ? -1.0 : 1.0;
  const Vec3 N = d.tangent[0].cross(d.tangent[1]);
  const double n = N.norm();
  d.eta = sign * N / n;
  for (int i = 0; i < 2; ++i) {
    const Vec3 dN = dtangent[i][0].cross(d.tangent[1]) + d.tangent[0].cross(dtangent[i][1]);
    d.deta[i] = sign * (dN / n - N * (N.dot(dN) / (n * n * n)));
  }

  for (int i = 0; i < 2; ++i) {
    d.weingarten[i] = -(d.deta[i] + d.connection.covariant(d.tangent[i], d.eta));
    for (int j = 0; j < 2; ++j) {
      d.second_form(i, j) = (dtangent[i][j] + d.connection.covariant(d.tangent[i], d.tangent[j])).dot(d.eta);
    }
  }
  for (int i = 0; i < 2; ++i) d.shape_coordinates.col(i) = d.coefficients(d.weingarten[i]);

  d.basis[0] = d.tangent[0].normalized();
  d.basis[1] = d.eta.cross(d.basis[0]);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) d.shape(a, b) = d.basis[a].dot(d.apply_shape(d.basis[b]));
  d.H = d.shape.trace();
  d.normSqA = d.shape.squaredNorm();

  d.cos_phi = d.eta.z();
  d.dcos_phi = Eigen::Vector2d(d.deta[0].z(), d.deta[1].z());
  d.T = Vec3::UnitZ() - d.cos_phi * d.eta;
  d.sin_phi = d.T.norm();
  d.phi = std::atan2(d.sin_phi, d.cos_phi);

  if (d.sin_phi >= s.options().eps_phi) {
    d.has_frame = true;
    d.e1 = d.T / d.sin_phi;
    d.e2 = d.eta.cross(d.e1);
    d.frame_coefficients.col(0) = d.coefficients(d.e1);
    d.frame_coefficients.col(1) = d.coefficients(d.e2);
  }
  return d;
}

std::pair<Vec3, Vec3> adapted_frame(const SurfacePointData& d) {
  require_frame(d);
  return {d.e1, d.e2};
}

double along_frame(const SurfacePointData& d, const Eigen::Vector2d& grad, int a) {
  require_frame(d);
  return grad.dot(d.frame_coefficients.col(a));
}

Eigen::Vector2d dphi_adapted(const SurfacePointData& d) {
  require_frame(d);
  return Eigen::Vector2d(-along_frame(d, d.dcos_phi, 0), -along_frame(d, d.dcos_phi, 1)) / d.sin_phi;
}

Eigen::Vector2d dr_adapted(const SurfacePointData& d) {
  require_frame(d);
  return Eigen::Vector2d(d.ambient.dr(d.e1), d.ambient.dr(d.e2));
}

Eigen::Matrix2d shape_in_adapted_frame(const SurfacePointData& d) {
  require_frame(d);
  const Vec3 e[] = {d.e1, d.e2};
  Eigen::Matrix2d m;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) m(a, b) = e[a].dot(d.apply_shape(e[b]));
  return m;
}

Eigen::Matrix2d shape_matrix_adapted(const SurfacePointData& d) {
  const Eigen::Vector2d dphi = dphi_adapted(d);
  const double r = d.ambient.r;
  Eigen::Matrix2d m;
  m << dphi[0], dphi[1] - r, dphi[1] - r, d.H - dphi[0];
  return m;
}

double norm_sq_from_angle(const SurfacePointData& d) {
  const Eigen::Vector2d dphi = dphi_adapted(d);
  const double r = d.ambient.r;
  return 2.0 * dphi.squaredNorm() + d.H * d.H + 2.0 * r * r - 4.0 * r * dphi[1] - 2.0 * d.H * dphi[0];
}

double induced_gauss_curvature(const SurfacePatch& s, double u, double v) {
  const double h = s.step();
  s.require_margin(u, v, h);
  const SurfacePointData d = analyze_point(s, u, v);

  const double Evv = numdiff::central([&](double t) { return analyze_point(s, u, t).dg[1](0, 0); }, v, h);
  const double Guu = numdiff::central([&](double t) { return analyze_point(s, t, v).dg[0](1, 1); }, u, h);
  const double Fuv = 0.5 * (numdiff::central([&](double t) { return analyze_point(s, u, t).dg[0](0, 1); }, v, h) +
                            numdiff::central([&](double t) { return analyze_point(s, t, v).dg[1](0, 1); }, u, h));

  const double E = d.g(0, 0), F = d.g(0, 1), G = d.g(1, 1);
  const double Eu = d.dg[0](0, 0), Ev = d.dg[1](0, 0);
  const double Fu = d.dg[0](0, 1), Fv = d.dg[1](0, 1);
  const double Gu = d.dg[0](1, 1), Gv = d.dg[1](1, 1);

  Eigen::Matrix3d m1, m2;
  m1 << -0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev,
        Fv - 0.5 * Gu, E, F,
        0.5 * Gv, F, G;
  m2 << 0.0, 0.5 * Ev, 0.5 * Gu,
        0.5 * Ev, E, F,
        0.5 * Gu, F, G;
  const double w = E * G - F * F;
  return (m1.determinant() - m2.determinant()) / (w * w);
}

double gauss_residual(const SurfacePatch& s, double u, double v) {
  const SurfacePointData d = analyze_point(s, u, v);
  require_frame(d);
  const double K = induced_gauss_curvature(s, u, v);
  const double r = d.ambient.r, G = d.ambient.G;
  const double e2r = dr_adapted(d)[1];
  const double rhs = d.shape.determinant() + r * r + (G - 4 * r * r) * d.cos_phi * d.cos_phi -
                     2.0 * d.sin_phi * d.cos_phi * e2r;
  return K - rhs;
}

CodazziTerms codazzi_terms(const SurfacePatch& s, double u, double v) {
  const SurfacePointData d = analyze_point(s, u, v);
  require_frame(d);
  const double h = s.step();
  s.require_margin(u, v, h);

  using Vec2 = Eigen::Vector2d;
  const Vec2 du_Av = numdiff::central([&](double t) -> Vec2 { return analyze_point(s, t, v).shape_coordinates.col(1); }, u, h);
  const Vec2 dv_Au = numdiff::central([&](double t) -> Vec2 { return analyze_point(s, u, t).shape_coordinates.col(0); }, v, h);

  Vec2 c = du_Av - dv_Au;
  for (int m = 0; m < 2; ++m)
    for (int k = 0; k < 2; ++k)
      c[m] += d.christoffel[m](0, k) * d.shape_coordinates(k, 1) - d.christoffel[m](1, k) * d.shape_coordinates(k, 0);

  // The Codazzi tensor is antisymmetric and bilinear, so C(e1, e2) = det(coefficients) C(d_u, d_v).
  const Vec3 lhs = d.frame_coefficients.determinant() * d.push(c);

  CodazziTerms t;
  t.lhs = Vec2(lhs.dot(d.e1), lhs.dot(d.e2));
  const double r = d.ambient.r, G = d.ambient.G;
  const Vec2 dr = dr_adapted(d);
  const double cos2 = d.cos_phi * d.cos_phi - d.sin_phi * d.sin_phi;
  t.rhs = Vec2(-dr[0], (4 * r * r - G) * d.cos_phi * d.sin_phi - cos2 * dr[1]);
  t.curvature = Vec2(riemann_closed(d.ambient, d.e1, d.e2, d.e1, d.eta),
                     riemann_closed(d.ambient, d.e1, d.e2, d.e2, d.eta));
  return t;
}

Eigen::Vector2d codazzi_residual(const SurfacePatch& s, double u, double v) {
  return codazzi_terms(s, u, v).residual();
}

CompatibilityResiduals compatibility_residuals(const SurfacePatch& s, double u, double v) {
  const SurfacePointData d = analyze_point(s, u, v);
  require_frame(d);
  std::array<Vec3, 2> nablaT;  // tangential part of the ambient derivative of T along d_i
  for (int i = 0; i < 2; ++i) {
    const Vec3 dT = -d.dcos_phi[i] * d.eta - d.cos_phi * d.deta[i];
    const Vec3 w = dT + d.connection.covariant(d.tangent[i], d.T);
    nablaT[i] = w - w.dot(d.eta) * d.eta;
  }
  CompatibilityResiduals res;
  const double r = d.ambient.r;
  for (int a = 0; a < 2; ++a) {
    const Eigen::Vector2d c = d.frame_coefficients.col(a);
    const Vec3 X = a == 0 ? d.e1 : d.e2;
    const Vec3 lhs = c[0] * nablaT[0] + c[1] * nablaT[1];
    const Vec3 twisted = d.apply_shape(X) - r * d.eta.cross(X);
    res.prima = std::max(res.prima, (lhs - d.cos_phi * twisted).norm());
    res.seconda = std::max(res.seconda, std::abs(twisted.dot(d.T) + along_frame(d, d.dcos_phi, a)));
  }
  return res;
}

namespace {

Eigen::Vector2d field_gradient(const SurfacePatch& s, const SurfaceField& f, double u, double v, double h) {
  return Eigen::Vector2d(numdiff::central([&](double t) { return f(s, t, v); }, u, h),
                         numdiff::central([&](double t) { return f(s, u, t); }, v, h));
}

}  // namespace

double surface_laplacian(const SurfacePatch& s, const SurfaceField& f, double u, double v) {
  const double h = s.step();
  s.require_margin(u, v, 2 * h);
  auto flux = [&](double pu, double pv) -> Eigen::Vector2d {
    const Eigen::Matrix2d g = analyze_point(s, pu, pv).g;
    return std::sqrt(g.determinant()) * g.inverse() * field_gradient(s, f, pu, pv, h);
  };
  const double div = numdiff::central([&](double t) { return flux(t, v)[0]; }, u, h) +
                     numdiff::central([&](double t) { return flux(u, t)[1]; }, v, h);
  return div / std::sqrt(analyze_point(s, u, v).g.determinant());
}

double frame_derivative(const SurfacePatch& s, const SurfaceField& f, double u, double v, int a) {
  const double h = s.step();
  s.require_margin(u, v, h);
  return along_frame(analyze_point(s, u, v), field_gradient(s, f, u, v, h), a);
}

std::array<double, 8> surface_connection_adapted(const SurfacePatch& s, double u, double v) {
  const SurfacePointData d = analyze_point(s, u, v);
  require_frame(d);
  const double h = s.step();
  s.require_margin(u, v, h);
  const Vec3 e[] = {d.e1, d.e2};
  std::array<double, 8> table{};
  for (int b = 0; b < 2; ++b) {
    using Vec2 = Eigen::Vector2d;
    auto coeff = [&](double pu, double pv) -> Vec2 {
      const SurfacePointData q = analyze_point(s, pu, pv);
      require_frame(q);
      return q.frame_coefficients.col(b);
    };
    const Vec2 y = d.frame_coefficients.col(b);
    const std::array<Vec2, 2> dy = {numdiff::central([&](double t) { return coeff(t, v); }, u, h),
                                    numdiff::central([&](double t) { return coeff(u, t); }, v, h)};
    for (int a = 0; a < 2; ++a) {
      const Vec2 x = d.frame_coefficients.col(a);
      Vec2 w = Vec2::Zero();
      for (int m = 0; m < 2; ++m)
        for (int i = 0; i < 2; ++i) {
          w[m] += x[i] * dy[i][m];
          for (int k = 0; k < 2; ++k) w[m] += x[i] * d.christoffel[m](i, k) * y[k];
        }
      const Vec3 nabla = d.push(w);
      for (int m = 0; m < 2; ++m) table[connection_index(a, b, m)] = nabla.dot(e[m]);
    }
  }
  return table;
}

std::array<double, 8> surface_connection_from_angle(const SurfacePointData& d) {
  const Eigen::Vector2d dphi = dphi_adapted(d);
  const double cot = d.cos_phi / d.sin_phi;
  const double r = d.ambient.r;
  const double mu = d.H - dphi[0];
  std::array<double, 8> table{};
  table[connection_index(0, 0, 1)] = cot * (dphi[1] - 2 * r);
  table[connection_index(0, 1, 0)] = -cot * (dphi[1] - 2 * r);
  table[connection_index(1, 0, 1)] = mu * cot;
  table[connection_index(1, 1, 0)] = -mu * cot;
  return table;
}

double field_phi(const SurfacePatch& s, double u, double v) { return analyze_point(s, u, v).phi; }
double field_H(const SurfacePatch& s, double u, double v) { return analyze_point(s, u, v).H; }

}  // namespace killing
