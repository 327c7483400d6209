#pragma once

#include <array>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "killing/expr.hpp"
#include "killing/jet.hpp"

namespace killing {

/// Components of a tangent vector with respect to the orthonormal frame
/// {E1, E2, E3} at a common point. Because the frame is orthonormal, the
/// metric inner product is the Euclidean dot product of components.
using Vec3 = Eigen::Vector3d;

/// A point (x, y, z) of the total space in coordinates.
using Point3 = Eigen::Vector3d;

/// Open axis-aligned rectangle.
struct Rect {
  double xmin = -1.0, xmax = 1.0, ymin = -1.0, ymax = 1.0;

  bool contains(double x, double y) const { return x > xmin && x < xmax && y > ymin && y < ymax; }
  bool contains(double x, double y, double margin) const {
    return x - margin > xmin && x + margin < xmax && y - margin > ymin && y + margin < ymax;
  }
  double diameter() const;
};

/// Jets of lambda, a, b at a base point, in the variables (x, y).
struct BaseJets {
  Jet lambda, a, b;
};

/// The canonical Killing submersion over a rectangle Omega with metric
///   lambda^2 (dx^2 + dy^2) + (dz - lambda (a dx + b dy))^2.
class KillingData {
 public:
  /// lambda, a, b must be expressions in the variables {x, y}; lambda must be
  /// positive on a validation grid of the domain. Throws InvalidData otherwise.
  KillingData(Expr lambda, Expr a, Expr b, Rect domain, std::string description = {});

  static KillingData from_text(const std::string& lambda, const std::string& a,
                               const std::string& b, Rect domain, std::string description = {});

  const Expr& lambda() const { return lambda_; }
  const Expr& a() const { return a_; }
  const Expr& b() const { return b_; }
  const Rect& domain() const { return domain_; }
  const std::string& description() const { return description_; }

  /// Throws OutsideDomain when (x, y) is not in Omega.
  BaseJets jets(double x, double y) const;
  void require_inside(double x, double y) const;

 private:
  Expr lambda_, a_, b_;
  Rect domain_;
  std::string description_;
};

/// Bundle curvature r and its coordinate gradient (r_x, r_y).
struct BundleCurvature {
  double r = 0.0;
  Eigen::Vector2d grad = Eigen::Vector2d::Zero();
};

BundleCurvature bundle_curvature(const BaseJets& j);
BundleCurvature bundle_curvature(const KillingData& k, double x, double y);

/// G = -(1/lambda^2) Laplacian(log lambda).
double gauss_curvature(const BaseJets& j);
double gauss_curvature(const KillingData& k, double x, double y);

/// Scalar data at a base point that determines the curvature of the total space.
struct PointGeometry {
  double lambda = 1.0;
  double r = 0.0;
  Eigen::Vector2d grad_r = Eigen::Vector2d::Zero();  // (r_x, r_y)
  double G = 0.0;

  /// Ambient gradient of r, (E1(r), E2(r), 0) = (r_x, r_y, 0) / lambda.
  Vec3 gradient_r() const { return Vec3(grad_r.x() / lambda, grad_r.y() / lambda, 0.0); }
  /// Derivative of r along v.
  double dr(const Vec3& v) const { return v.dot(gradient_r()); }
};

PointGeometry point_geometry(const BaseJets& j);
PointGeometry point_geometry(const KillingData& k, double x, double y);

struct FramePoint {
  Point3 point = Point3::Zero();
  BaseJets jets;
  /// Column i holds E_{i+1} in the coordinate basis (d/dx, d/dy, d/dz).
  Eigen::Matrix3d vectors = Eigen::Matrix3d::Identity();
};

FramePoint frame(const KillingData& k, const Point3& p);

/// Metric coefficients in the coordinate basis (d/dx, d/dy, d/dz).
Eigen::Matrix3d coordinate_metric(const KillingData& k, double x, double y);

/// Coordinate components of E1, E2, E3 (as columns) from the values of lambda, a, b.
Eigen::Matrix3d frame_vectors(double lambda, double a, double b);

/// Converts coordinate components of a vector to frame components.
Vec3 to_frame(double lambda, double a, double b, const Eigen::Vector3d& coordinate);

/// Levi-Civita coefficients c(i, j, k) = <nabla_{E_i} E_j, E_k>, indices 0..2.
struct ConnectionTable {
  std::array<double, 27> c{};

  double& operator()(int i, int j, int k) { return c[9 * i + 3 * j + k]; }
  double operator()(int i, int j, int k) const { return c[9 * i + 3 * j + k]; }

  /// nabla_X Y where Y has constant frame components.
  Vec3 covariant(const Vec3& x, const Vec3& y) const;
  double max_abs_difference(const ConnectionTable& other) const;
};

ConnectionTable connection(const BaseJets& j);
ConnectionTable connection(const KillingData& k, const Point3& p);

/// Independent table from the Koszul formula: central differences of the
/// coordinate metric and of the frame components, then projection onto the
/// frame. Throws InsufficientMargin when the stencil leaves Omega.
ConnectionTable connection_oracle(const KillingData& k, const Point3& p);

/// Closed-form bracket [E_i, E_j] in frame components.
Vec3 bracket(const BaseJets& j, int i, int k);
Vec3 bracket(const KillingData& k, const Point3& p, int i, int j);
/// [E_i, E_j] from central differences of the coordinate frame fields.
Vec3 bracket_oracle(const KillingData& k, const Point3& p, int i, int j);

/// Anticlockwise rotation by pi/2 of the horizontal part: (v1, v2, v3) -> (-v2, v1, 0).
Vec3 rotate_J(const Vec3& v);
/// Cross product in the positively oriented frame {E1, E2, E3}.
Vec3 wedge(const Vec3& v, const Vec3& w);

/// <R(X,Y)Z, W> from the closed-form curvature of a Killing submersion.
double riemann_closed(const PointGeometry& g, const Vec3& x, const Vec3& y, const Vec3& z,
                      const Vec3& w);
double riemann_closed(const KillingData& k, const Point3& p, const Vec3& x, const Vec3& y,
                      const Vec3& z, const Vec3& w);

/// <R(X,Y)Z, W> straight from R(X,Y) = [nabla_X, nabla_Y] - nabla_[X,Y] with
/// X, Y, Z extended as constant-component fields: the connection table is
/// differentiated numerically along X and Y.
double riemann_direct(const KillingData& k, const Point3& p, const Vec3& x, const Vec3& y,
                      const Vec3& z, const Vec3& w);

/// Ricc(E_i, E_j).
using RicciMatrix = Eigen::Matrix3d;

RicciMatrix ricci(const PointGeometry& g);
RicciMatrix ricci(const KillingData& k, const Point3& p);
/// Contraction sum_i <R(E_i, v) w, E_i> of riemann_direct.
RicciMatrix ricci_contraction(const KillingData& k, const Point3& p);

/// Bianchi-Cartan-Vranceanu space E(c, mu): lambda = (1 + c/4 (x^2+y^2))^-1,
/// a = -mu y, b = mu x. For c >= 0 the domain is [-half_width, half_width]^2;
/// for c < 0 it is a square inscribed in the disk x^2 + y^2 < -4/c.
KillingData bcv(double c, double mu, double half_width = 2.0);

/// Formats a double so that the expression parser reads back the same value.
std::string format_constant(double v);

}  // namespace killing
