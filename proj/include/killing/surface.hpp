#pragma once

#include <array>
#include <functional>
#include <string>
#include <utility>

#include <Eigen/Core>

#include "killing/expr.hpp"
#include "killing/geometry.hpp"

namespace killing {

struct SurfaceOptions {
  /// Below this value of sin(phi) the adapted frame is undefined.
  double eps_phi = 1e-6;
  /// Finite-difference step as a fraction of the parameter-domain diameter.
  double fd_scale = 1e-3;
  /// Minimum Gram determinant of the coordinate tangents.
  double regularity_tol = 1e-10;
};

/// Immersion (u, v) -> (X, Y, Z) into the canonical Killing submersion.
class SurfacePatch {
 public:
  /// X, Y, Z are expressions in two variables, read in the order (u, v).
  /// Throws DegenerateImmersion if the tangents are dependent somewhere on a
  /// validation grid, OutsideDomain if the image leaves the base domain.
  SurfacePatch(Expr x, Expr y, Expr z, Rect params, KillingData ambient, bool flip = false,
               SurfaceOptions options = {});

  static SurfacePatch from_text(const std::string& x, const std::string& y, const std::string& z,
                                Rect params, KillingData ambient, bool flip = false,
                                SurfaceOptions options = {});

  /// Graph (x, y, height(x, y)); the parameters are x and y themselves.
  static SurfacePatch graph(const std::string& height, Rect params, KillingData ambient,
                            bool flip = false, SurfaceOptions options = {});

  const Expr& x() const { return x_; }
  const Expr& y() const { return y_; }
  const Expr& z() const { return z_; }
  const Rect& params() const { return params_; }
  const KillingData& ambient() const { return ambient_; }
  bool flipped() const { return flip_; }
  const SurfaceOptions& options() const { return options_; }

  /// Same immersion with the opposite unit normal.
  SurfacePatch with_flip(bool flip) const;

  /// Finite-difference step in parameter space.
  double step() const;
  /// Throws InsufficientMargin unless the box of half-width `reach` around q is inside the parameters.
  void require_margin(double u, double v, double reach) const;

  Point3 position(double u, double v) const;

 private:
  Expr x_, y_, z_;
  Rect params_;
  KillingData ambient_;
  bool flip_;
  SurfaceOptions options_;
};

/// Everything computed pointwise from the jets of the immersion.
/// Vectors are frame components at the image point; index i in {0, 1} is (u, v).
struct SurfacePointData {
  double u = 0.0, v = 0.0;
  Point3 point = Point3::Zero();
  PointGeometry ambient;
  ConnectionTable connection;

  std::array<Vec3, 2> tangent;  // d/du, d/dv
  Eigen::Matrix2d g = Eigen::Matrix2d::Identity();
  std::array<Eigen::Matrix2d, 2> dg;  // d_i g
  /// christoffel[m](i, k) = Gamma^m_{ik} of the induced metric.
  std::array<Eigen::Matrix2d, 2> christoffel;

  Vec3 eta = Vec3::UnitZ();
  std::array<Vec3, 2> deta;  // d_i of the components of eta

  /// A(d/du), A(d/dv) as ambient vectors, A = -nabla eta.
  std::array<Vec3, 2> weingarten;
  /// A^m_i with A(d_i) = A^m_i d_m.
  Eigen::Matrix2d shape_coordinates = Eigen::Matrix2d::Zero();
  /// <nabla_{d_i} d_j, eta>.
  Eigen::Matrix2d second_form = Eigen::Matrix2d::Zero();

  /// Orthonormal tangent basis t1 = d_u/|d_u|, t2 = eta x t1.
  std::array<Vec3, 2> basis;
  /// A in the basis (t1, t2).
  Eigen::Matrix2d shape = Eigen::Matrix2d::Zero();
  double H = 0.0;
  double normSqA = 0.0;

  double cos_phi = 0.0, sin_phi = 1.0, phi = 0.0;
  Eigen::Vector2d dcos_phi = Eigen::Vector2d::Zero();  // d_i cos(phi)
  Vec3 T = Vec3::Zero();

  bool has_frame = false;
  Vec3 e1 = Vec3::Zero(), e2 = Vec3::Zero();
  /// Column a holds the (u, v) coefficients of e_{a+1}.
  Eigen::Matrix2d frame_coefficients = Eigen::Matrix2d::Zero();

  /// Parameter coefficients of a tangent vector given by frame components.
  Eigen::Vector2d coefficients(const Vec3& tangent_vector) const;
  /// d/du and d/dv combined with the coefficients c.
  Vec3 push(const Eigen::Vector2d& c) const { return c[0] * tangent[0] + c[1] * tangent[1]; }
  /// Applies the shape operator to a tangent vector.
  Vec3 apply_shape(const Vec3& tangent_vector) const;
};

SurfacePointData analyze_point(const SurfacePatch& s, double u, double v);

/// (e1, e2); throws AngleSingular when sin(phi) < eps_phi.
std::pair<Vec3, Vec3> adapted_frame(const SurfacePointData& d);

/// Derivative along e_{a+1} of a function whose (u, v) gradient is `grad`.
double along_frame(const SurfacePointData& d, const Eigen::Vector2d& grad, int a);

/// (e1(phi), e2(phi)).
Eigen::Vector2d dphi_adapted(const SurfacePointData& d);
/// (e1(r), e2(r)).
Eigen::Vector2d dr_adapted(const SurfacePointData& d);

/// A in the basis (e1, e2), taken from the Weingarten map.
Eigen::Matrix2d shape_in_adapted_frame(const SurfacePointData& d);
/// A in the basis (e1, e2) rebuilt from the angle function:
///   [[e1(phi), e2(phi) - r], [e2(phi) - r, H - e1(phi)]].
Eigen::Matrix2d shape_matrix_adapted(const SurfacePointData& d);

/// |A|^2 rebuilt from the angle function, mean curvature and r.
double norm_sq_from_angle(const SurfacePointData& d);

/// Induced Gaussian curvature from the first fundamental form (Brioschi).
double induced_gauss_curvature(const SurfacePatch& s, double u, double v);

/// K - [det A + r^2 + (G - 4r^2) cos^2 phi - sin(2 phi) e2(r)].
double gauss_residual(const SurfacePatch& s, double u, double v);

struct CodazziTerms {
  Eigen::Vector2d lhs = Eigen::Vector2d::Zero();        // (e1, e2) components
  Eigen::Vector2d rhs = Eigen::Vector2d::Zero();        // closed form in phi, r, G
  Eigen::Vector2d curvature = Eigen::Vector2d::Zero();  // <R(e1,e2) e_a, eta>
  Eigen::Vector2d residual() const { return lhs - rhs; }
};

CodazziTerms codazzi_terms(const SurfacePatch& s, double u, double v);
Eigen::Vector2d codazzi_residual(const SurfacePatch& s, double u, double v);

struct CompatibilityResiduals {
  double prima = 0.0;    // max over X in {e1, e2} of |nabla_X T - cos(phi)(A X - r eta^X)|
  double seconda = 0.0;  // max over X of |<A X - r eta^X, T> + X(cos phi)|
};

CompatibilityResiduals compatibility_residuals(const SurfacePatch& s, double u, double v);

using SurfaceField = std::function<double(const SurfacePatch&, double, double)>;

/// Laplace-Beltrami operator (div grad) in divergence form over the parameters.
double surface_laplacian(const SurfacePatch& s, const SurfaceField& f, double u, double v);

/// e_{a+1}(f) at (u, v) by central differences of f.
double frame_derivative(const SurfacePatch& s, const SurfaceField& f, double u, double v, int a);

/// c(a, b, m) = <nabla_{e_a} e_b, e_m> from the induced Christoffel symbols
/// and central differences of the frame coefficients.
std::array<double, 8> surface_connection_adapted(const SurfacePatch& s, double u, double v);
/// Same table predicted by the angle function:
///   nabla_{e1} e1 = cot(phi)(e2(phi) - 2r) e2,  nabla_{e2} e1 = mu cot(phi) e2.
std::array<double, 8> surface_connection_from_angle(const SurfacePointData& d);
inline int connection_index(int a, int b, int m) { return 4 * a + 2 * b + m; }

/// Ready-made fields.
double field_phi(const SurfacePatch& s, double u, double v);
double field_H(const SurfacePatch& s, double u, double v);

}  // namespace killing
