#pragma once

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "killing/expr.hpp"
#include "killing/geometry.hpp"
#include "killing/surface.hpp"

namespace killing {

/// The base (M, h) of a Killing submersion with constant-length fibers, in one chart.
/// Either the conformal chart of a canonical example, or a warped chart
/// dt^2 + f(t)^2 dtheta^2 with constant bundle curvature.
class BaseSurface {
 public:
  static BaseSurface canonical(KillingData k);
  /// `f` is an expression in {t}; points are (t, theta) with t in (tmin, tmax).
  static BaseSurface warped(Expr f, double r, double tmin, double tmax);

  bool is_canonical() const { return killing_.has_value(); }
  /// Throws InvalidData for a warped base.
  const KillingData& killing() const;
  const Expr& warping() const { return f_; }

  bool contains(const Eigen::Vector2d& p) const;
  void require_inside(const Eigen::Vector2d& p) const;

  Eigen::Matrix2d metric(const Eigen::Vector2d& p) const;
  /// christoffel[k](i, j) = Gamma^k_ij.
  std::array<Eigen::Matrix2d, 2> christoffel(const Eigen::Vector2d& p) const;
  double area_density(const Eigen::Vector2d& p) const;
  /// Components of a coordinate vector in the orthonormal frame (E1, E2) of the chart.
  Eigen::Vector2d orthonormal(const Eigen::Vector2d& p, const Eigen::Vector2d& v) const;
  /// r, G and (E1(r), E2(r)) at p; lambda is 1 for a warped chart, whose frame is (d_t, d_theta / f).
  PointGeometry geometry(const Eigen::Vector2d& p) const;
  /// Coordinate differential (r_x, r_y) of r at p.
  Eigen::Vector2d dr(const Eigen::Vector2d& p) const;

 private:
  BaseSurface() = default;
  std::optional<KillingData> killing_;
  Expr f_;
  double r_ = 0.0, tmin_ = 0.0, tmax_ = 0.0;
};

/// Position and parameter derivatives of a base curve.
struct CurvePoint {
  Eigen::Vector2d position = Eigen::Vector2d::Zero();
  Eigen::Vector2d velocity = Eigen::Vector2d::Zero();
  Eigen::Vector2d acceleration = Eigen::Vector2d::Zero();
};

struct ArcLengthTable;

/// A plane curve (x(s), y(s)) with expressions in {s}. After arclength_reparam the
/// parameter is arc length and the expressions keep the original parameter.
class BaseCurve {
 public:
  BaseCurve(Expr x, Expr y, double s0, double s1, bool arc_length = false);
  static BaseCurve from_text(const std::string& x, const std::string& y, double s0, double s1,
                             bool arc_length = false);

  double s_min() const { return s0_; }
  double s_max() const { return s1_; }
  bool arc_length() const { return arc_length_; }
  const Expr& x() const { return x_; }
  const Expr& y() const { return y_; }
  /// Interval of the expressions' own parameter.
  double native_min() const { return t0_; }
  double native_max() const { return t1_; }

  /// Value of the expressions' parameter at s.
  double native(double s) const;
  CurvePoint at(double s) const;
  CurvePoint at_native(double t) const;

 private:
  friend BaseCurve arclength_reparam(const BaseCurve& c, const BaseSurface& base);
  Expr x_, y_;
  double s0_, s1_, t0_, t1_;
  bool arc_length_;
  std::shared_ptr<const ArcLengthTable> table_;
};

/// Arc-length reparametrisation: panelwise Gauss-Legendre quadrature of the
/// speed, then Newton inversion of the cumulative length. The result starts at s = 0.
/// Throws DegenerateCurve when the speed drops below 1e-6, OutsideDomain when the curve leaves the base.
BaseCurve arclength_reparam(const BaseCurve& c, const BaseSurface& base);

/// Signed geodesic curvature of a regular parametrised curve at (p, v, a),
/// measured against the normal n with (v, n) positively oriented.
double geodesic_curvature(const BaseSurface& base, const CurvePoint& c);
/// Throws NotArcLength unless |v|_h = 1 within 1e-8.
double geodesic_curvature(const BaseCurve& c, const BaseSurface& base, double s);

/// Coordinate circle of Euclidean radius R about the origin, arc-length parametrised,
/// in the base of bcv(c, mu): lambda is constant along it.
BaseCurve bcv_circle(double c, double R);
/// Radius of the origin-centred circle of geodesic curvature k in the base of bcv(c, .).
/// Throws InvalidData when there is none.
double bcv_circle_radius(double c, double k);

struct HopfOptions {
  int samples = 64;
  double tol = 1e-5;
};

struct HopfSample {
  double s = 0.0;
  Eigen::Vector2d point = Eigen::Vector2d::Zero();
  double kappa = 0.0, dkappa = 0.0, ddkappa = 0.0;
  double tau = 0.0;
  double r = 0.0, G = 0.0;
  /// Derivative of r along the curve, x' r_x + y' r_y.
  double dr = 0.0;
  /// Lines of the general system with the Ricci tensor of the total space.
  Eigen::Vector3d sys_ou = Eigen::Vector3d::Zero();
  /// Lines of the reduced system.
  Eigen::Vector3d last = Eigen::Vector3d::Zero();
};

enum class HopfVerdict { Proper, Minimal, NotConstant, NoAdmissibleCurvature, CurvatureMismatch };

std::string hopf_verdict_name(HopfVerdict v);

struct HopfReport {
  std::vector<HopfSample> samples;
  double max_sys_ou = 0.0;
  double max_last = 0.0;
  /// max over samples of |sys_ou - (last1, 3 last2, -last3)|.
  double max_agreement = 0.0;
  double mean_kappa = 0.0, mean_r = 0.0, mean_G = 0.0;
  double stddev_kappa = 0.0, stddev_r = 0.0, stddev_G = 0.0;
  /// G - 4r^2 and kappa^2 - (G - 4r^2) from the means.
  double admissible = 0.0;
  double defect = 0.0;
  HopfVerdict verdict = HopfVerdict::Minimal;
  bool pass = false;
  /// Certified constants (H, G, r), set when pass.
  std::optional<std::array<double, 3>> constants;
};

/// Samples the curve at midpoints of `samples` equal cells of its parameter
/// interval. Derivatives of kappa are central differences with Richardson.
/// The curve must be arc-length parametrised.
HopfReport hopf_residuals(const BaseCurve& c, const BaseSurface& base, const HopfOptions& o = {});

/// Applies the criterion to a report; also fills verdict, pass and constants.
void classify_hopf(HopfReport& report, double tol);
HopfReport classify_hopf(const BaseCurve& c, const BaseSurface& base, const HopfOptions& o = {});

/// Immersion (x(t), y(t), v), v in [0, 1], with the normal that makes H = kappa_g.
SurfacePatch hopf_cylinder_patch(const BaseCurve& c, const KillingData& k);

struct ExampleRoot {
  double t0 = 0.0;
  double kappa = 0.0;  // f'(t0)/f(t0)
  double G = 0.0;      // -f''(t0)/f(t0)
  BaseCurve curve;     // (t0, s/f(t0)) in the warped chart
  HopfReport report;
};

struct ExampleResult {
  BaseSurface base;
  std::vector<ExampleRoot> roots;  // sorted by t0
};

/// Roots of g(t) = f (f'' + 4 r^2 f) + f'^2 in (tmin, tmax) and the Hopf cylinders over
/// the coordinate circles t = t0 of dt^2 + f^2 dtheta^2. Throws InvalidData when f <= 0
/// on the scan and NoRoot when g has no sign change or vanishes identically.
ExampleResult example_construct(const Expr& f, double r, double tmin, double tmax,
                                const HopfOptions& o = {});

}  // namespace killing
