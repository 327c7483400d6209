#include <cmath>
#include <string>

#include "doctest.h"
#include "generators.hpp"
#include "killing/errors.hpp"
#include "killing/surface.hpp"

using namespace killing;

namespace {

KillingData flat(double half = 2.0) {
  return KillingData::from_text("1", "0", "0", Rect{-half, half, -half, half}, "flat");
}

SurfacePatch vertical_plane() { return SurfacePatch::from_text("u", "0", "v", Rect{}, flat()); }

SurfacePatch round_cylinder(bool flip) {
  return SurfacePatch::from_text("cos(u)", "sin(u)", "v", Rect{0.1, 3.0, -1, 1}, flat(), flip);
}

// Vertical cylinder over a circle of radius R about the origin.
SurfacePatch circle_cylinder(const KillingData& k, double R, bool flip = false) {
  const std::string r = format_constant(R);
  return SurfacePatch::from_text(r + "*cos(u)", r + "*sin(u)", "v", Rect{0.2, 3.0, -1, 1}, k, flip);
}

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("analyze_point: vertical plane in the flat product") {
  const SurfacePointData d = analyze_point(vertical_plane(), 0.3, -0.2);
  CHECK(d.H == 0.0);
  CHECK(max_abs(d.shape) == 0.0);
  CHECK(d.phi == doctest::Approx(M_PI / 2));
  CHECK(d.has_frame);
}

TEST_CASE("analyze_point: round cylinder in the flat product") {
  const SurfacePointData outward = analyze_point(round_cylinder(false), 1.0, 0.3);
  CHECK(outward.H == doctest::Approx(-1.0));
  const SurfacePointData d = analyze_point(round_cylinder(true), 1.0, 0.3);
  CHECK(d.H == doctest::Approx(1.0));
  CHECK(d.phi == doctest::Approx(M_PI / 2));
  // In (t1, t2) = (horizontal, vertical) the shape operator is diag(1, 0).
  CHECK(max_abs(d.shape - Eigen::Vector2d(1, 0).asDiagonal().toDenseMatrix()) < 1e-12);
  // The adapted frame starts with the fiber: e1 = xi.
  CHECK((d.e1 - Vec3::UnitZ()).norm() < 1e-12);
  CHECK(max_abs(shape_in_adapted_frame(d) - Eigen::Vector2d(0, 1).asDiagonal().toDenseMatrix()) < 1e-12);
  CHECK(max_abs(shape_matrix_adapted(d) - shape_in_adapted_frame(d)) < 1e-12);
}

TEST_CASE("analyze_point: horizontal slice") {
  const SurfacePatch s = SurfacePatch::from_text("u", "v", "0.5", Rect{}, flat());
  const SurfacePointData d = analyze_point(s, 0.1, 0.1);
  CHECK(d.phi == doctest::Approx(0.0));
  CHECK(max_abs(d.shape) == 0.0);
  CHECK_FALSE(d.has_frame);
  CHECK_THROWS_AS(adapted_frame(d), AngleSingular);
  CHECK_THROWS_AS(shape_matrix_adapted(d), AngleSingular);
  CHECK_THROWS_AS(gauss_residual(s, 0.1, 0.1), AngleSingular);
}

TEST_CASE("patch validation and domain errors") {
  CHECK_THROWS_AS(SurfacePatch::from_text("u", "u", "0", Rect{}, flat()), DegenerateImmersion);
  CHECK_THROWS_AS(SurfacePatch::from_text("3*u", "v", "0", Rect{}, flat()), OutsideDomain);
  const SurfacePatch p = vertical_plane();
  CHECK_THROWS_AS(analyze_point(p, 1.5, 0.0), OutsideDomain);
  CHECK_THROWS_AS(gauss_residual(p, 0.99999, 0.0), InsufficientMargin);
}

TEST_CASE("Hopf cylinder over a circle in BCV spaces") {
  for (auto [c, mu] : {std::pair{0.0, 0.5}, {1.0, 1.0}, {-1.0, 0.3}, {0.5, -0.7}}) {
    const KillingData k = bcv(c, mu);
    const SurfacePatch s = circle_cylinder(k, 0.6);
    const SurfacePointData d = analyze_point(s, 1.3, 0.2);
    CAPTURE(c);
    CAPTURE(mu);
    CHECK(d.phi == doctest::Approx(M_PI / 2));
    CHECK(std::abs(induced_gauss_curvature(s, 1.3, 0.2)) < 1e-8);
    CHECK(d.shape.determinant() == doctest::Approx(-mu * mu));
    const Eigen::Matrix2d a1 = shape_matrix_adapted(d);
    CHECK(a1(0, 0) == doctest::Approx(0.0));
    CHECK(a1(0, 1) == doctest::Approx(-mu));
    CHECK(a1(1, 1) == doctest::Approx(d.H));
    CHECK(std::abs(gauss_residual(s, 1.3, 0.2)) < 1e-5);
    CHECK(codazzi_residual(s, 1.3, 0.2).norm() < 1e-4);
    const CompatibilityResiduals cr = compatibility_residuals(s, 1.3, 0.2);
    CHECK(cr.prima < 1e-5);
    CHECK(cr.seconda < 1e-5);
  }
}

TEST_CASE("vertical plane residuals vanish") {
  const SurfacePatch p = vertical_plane();
  CHECK(gauss_residual(p, 0.2, 0.2) == doctest::Approx(0.0));
  CHECK(codazzi_residual(p, 0.2, 0.2).norm() == doctest::Approx(0.0));
  const CompatibilityResiduals cr = compatibility_residuals(p, 0.2, 0.2);
  CHECK(cr.prima == doctest::Approx(0.0));
  CHECK(cr.seconda == doctest::Approx(0.0));
  CHECK(max_abs(shape_matrix_adapted(analyze_point(p, 0.2, 0.2))) < 1e-15);
}

TEST_CASE("graph surfaces satisfy Gauss, Codazzi and compatibility") {
  const SurfacePatch heis = SurfacePatch::graph("0.3*x^2 - 0.2*x*y + 0.1*sin(y)", Rect{}, bcv(0, 0.5));
  CHECK(std::abs(gauss_residual(heis, 0.2, 0.3)) < 1e-4);
  CHECK(codazzi_residual(heis, 0.2, 0.3).norm() < 1e-4);
  const SurfacePatch s11 = SurfacePatch::graph("0.2*x*y + 0.4*x - 0.1*y^2", Rect{}, bcv(1, 1));
  const CompatibilityResiduals cr = compatibility_residuals(s11, -0.3, 0.25);
  CHECK(cr.prima < 1e-4);
  CHECK(cr.seconda < 1e-4);
}

TEST_CASE("property: pointwise invariants on random graphs in random spaces") {
  testgen::DataGenerator gen(101);
  for (int n = 0; n < 40; ++n) {
    const KillingData k = gen.make();
    const SurfacePatch s = SurfacePatch::graph(gen.height(), Rect{-0.9, 0.9, -0.9, 0.9}, k);
    const double u = gen.uniform(-0.6, 0.6), v = gen.uniform(-0.6, 0.6);
    const SurfacePointData d = analyze_point(s, u, v);
    CHECK(std::abs(d.eta.norm() - 1) < 1e-12);
    CHECK(std::abs(d.eta.dot(d.tangent[0])) < 1e-10);
    CHECK(std::abs(d.eta.dot(d.tangent[1])) < 1e-10);
    CHECK(std::abs(d.shape(0, 1) - d.shape(1, 0)) < 1e-8);
    // The Weingarten map and the second fundamental form agree: A = g^-1 h.
    CHECK(max_abs(d.g * d.shape_coordinates - d.second_form) < 1e-10);
    CHECK((Vec3::UnitZ() - d.T - d.cos_phi * d.eta).norm() < 1e-10);
    CHECK(std::abs(d.T.squaredNorm() - d.sin_phi * d.sin_phi) < 1e-10);
    REQUIRE(d.has_frame);
    CHECK((Vec3::UnitZ() - d.sin_phi * d.e1 - d.cos_phi * d.eta).norm() < 1e-10);
    CHECK(std::abs(d.e1.dot(d.e1) - 1) < 1e-10);
    CHECK(std::abs(d.e2.dot(d.e2) - 1) < 1e-10);
    CHECK(std::abs(d.e1.dot(d.e2)) < 1e-10);
    CHECK(std::abs(d.e2.dot(d.eta)) < 1e-10);
    CHECK(max_abs(shape_matrix_adapted(d) - shape_in_adapted_frame(d)) < 1e-5);
    CHECK(std::abs(norm_sq_from_angle(d) - d.normSqA) < 1e-4);

    CHECK(std::abs(gauss_residual(s, u, v)) < 1e-4);
    const CodazziTerms ct = codazzi_terms(s, u, v);
    CHECK(ct.residual().norm() < 1e-4);
    CHECK((ct.rhs - ct.curvature).norm() < 1e-10);
    const CompatibilityResiduals cr = compatibility_residuals(s, u, v);
    CHECK(cr.prima < 1e-8);
    CHECK(cr.seconda < 1e-8);
  }
}

TEST_CASE("property: flipping the normal") {
  testgen::DataGenerator gen(103);
  for (int n = 0; n < 20; ++n) {
    const KillingData k = gen.make();
    const SurfacePatch s = SurfacePatch::graph(gen.height(), Rect{-0.9, 0.9, -0.9, 0.9}, k);
    const SurfacePatch f = s.with_flip(true);
    const double u = gen.uniform(-0.6, 0.6), v = gen.uniform(-0.6, 0.6);
    const SurfacePointData a = analyze_point(s, u, v);
    const SurfacePointData b = analyze_point(f, u, v);
    CHECK(std::abs(a.H + b.H) < 1e-12);
    CHECK(std::abs(a.cos_phi + b.cos_phi) < 1e-12);
    // e2 = eta ^ e1 flips with eta, so only the diagonal of A changes sign in (e1, e2).
    const Eigen::Matrix2d sa = shape_in_adapted_frame(a), sb = shape_in_adapted_frame(b);
    CHECK(std::abs(sa(0, 0) + sb(0, 0)) < 1e-10);
    CHECK(std::abs(sa(1, 1) + sb(1, 1)) < 1e-10);
    CHECK(std::abs(sa(0, 1) - sb(0, 1)) < 1e-10);
    CHECK(std::abs(gauss_residual(s, u, v) - gauss_residual(f, u, v)) < 1e-10);
    CHECK(std::abs(codazzi_residual(s, u, v).norm() - codazzi_residual(f, u, v).norm()) < 1e-10);
  }
}

TEST_CASE("property: induced connection in the adapted frame") {
  testgen::DataGenerator gen(107);
  int checked = 0;
  for (int n = 0; n < 20; ++n) {
    const KillingData k = gen.make();
    const SurfacePatch s = SurfacePatch::graph(gen.height(), Rect{-0.9, 0.9, -0.9, 0.9}, k);
    const double u = gen.uniform(-0.6, 0.6), v = gen.uniform(-0.6, 0.6);
    const SurfacePointData d = analyze_point(s, u, v);
    if (d.sin_phi < 0.1) continue;
    const auto numeric = surface_connection_adapted(s, u, v);
    const auto predicted = surface_connection_from_angle(d);
    for (int i = 0; i < 8; ++i) CHECK(std::abs(numeric[i] - predicted[i]) < 1e-3);
    ++checked;
  }
  CHECK(checked > 10);
}

TEST_CASE("surface_laplacian") {
  const SurfacePatch p = vertical_plane();
  const SurfaceField constant = [](const SurfacePatch&, double, double) { return 3.0; };
  const SurfaceField square = [](const SurfacePatch&, double u, double) { return u * u; };
  CHECK(std::abs(surface_laplacian(p, constant, 0.1, 0.1)) < 1e-9);
  CHECK(surface_laplacian(p, square, 0.1, 0.1) == doctest::Approx(2.0).epsilon(1e-8));

  // Two discretizations of the Laplacian of phi on a curved graph:
  // divergence form against e1 e1 + e2 e2 - (nabla_{e1} e1) - (nabla_{e2} e2).
  const SurfacePatch s = SurfacePatch::graph("0.3*x^2 + 0.2*x*y - 0.25*y^2 + 0.3*x", Rect{}, bcv(0.5, 0.4));
  const double u = 0.1, v = -0.2;
  const SurfacePointData d = analyze_point(s, u, v);
  const auto table = surface_connection_from_angle(d);
  const Eigen::Vector2d dphi = dphi_adapted(d);
  double frame_form = 0.0;
  for (int a = 0; a < 2; ++a) {
    const SurfaceField first = [a](const SurfacePatch& q, double pu, double pv) {
      return frame_derivative(q, field_phi, pu, pv, a);
    };
    frame_form += frame_derivative(s, first, u, v, a);
    for (int m = 0; m < 2; ++m) frame_form -= table[connection_index(a, a, m)] * dphi[m];
  }
  CHECK(std::abs(surface_laplacian(s, field_phi, u, v) - frame_form) < 1e-3);
}
