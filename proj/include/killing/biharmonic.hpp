#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Core>

#include "killing/geometry.hpp"
#include "killing/surface.hpp"

namespace killing {

struct BiharmonicOptions {
  /// A residual "vanishes" below this value.
  double tol = 1e-4;
  /// Allowed spread of H over the probe stencil.
  double cmc_tol = 1e-4;
  /// sin(phi) and |cos(phi)| thresholds separating the branches.
  double eps_phi = 1e-6;
  /// |grad r| at or below this counts as zero.
  double grad_tol = 1e-8;
  /// |4r^2 - G| at or below this counts as zero.
  double degenerate_tol = 1e-8;
  /// When false, classify_point skips the CMC probe (diagnostic use only).
  bool require_cmc = true;
};

constexpr double kNotApplicable = std::numeric_limits<double>::quiet_NaN();

/// Residuals of the normal/tangential split of the bitension field for a CMC surface.
struct BitensionResidual {
  double normal = 0.0;
  Eigen::Vector2d tangential = Eigen::Vector2d::Zero();  // in the basis (t1, t2)
  double cmc_deviation = 0.0;
  double H = 0.0;

  double magnitude() const { return std::max(std::abs(normal), tangential.norm()); }
  bool biharmonic(double tol) const { return magnitude() <= tol; }
  bool proper(double tol) const { return biharmonic(tol) && std::abs(H) > tol; }
};

/// max |H(q') - H(q)| over a 5x5 stencil with the patch step as spacing.
double cmc_deviation(const SurfacePatch& s, double u, double v);

/// Throws NotCMC when the deviation exceeds cmc_tol.
BitensionResidual bitension_cmc(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o = {});

/// Pointwise data the biharmonicity systems are written in. Vectors are frame
/// components; (a, b, c) are the components of an adapted frame {e1, e2, eta}.
struct PointInvariants {
  PointGeometry geometry;
  Vec3 a = Vec3::UnitX(), b = Vec3::UnitY(), c = Vec3::UnitZ();
  double H = 0.0;
  double normSqA = 0.0;
  /// (e1(phi), e2(phi)) in the angle-adapted frame; NaN when unknown.
  Eigen::Vector2d dphi = Eigen::Vector2d::Constant(kNotApplicable);
  /// Laplacian of phi; NaN when unknown.
  double lap_phi = kNotApplicable;

  double cos_phi() const { return c.z(); }
  double sin_phi() const { return std::sqrt(std::max(0.0, 1.0 - c.z() * c.z())); }
  double phi() const { return std::atan2(sin_phi(), cos_phi()); }
  double grad_r_norm() const { return geometry.gradient_r().norm(); }
};

/// The three-line system: Ricc(eta, eta) - |A|^2 and the two tangential Ricci components.
Eigen::Vector3d sistemap_residuals(const PointInvariants& p);
Eigen::Vector3d sistemap_residuals(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o = {});

/// The same quantities assembled from the Ricci matrix instead of the expanded formulas.
Eigen::Vector3d sistemap_from_ricci(const PointInvariants& p);

struct NormalityIdentity {
  double direct = 0.0;     // cos(phi) <grad r, eta>
  double expanded = 0.0;   // c3 (c1 r_x + c2 r_y) / lambda
  double tangential = 0.0; // A~ b3 - B~ a3 from the tangential lines
};

NormalityIdentity normality_identity(const PointInvariants& p);
NormalityIdentity normality_identity(const SurfacePatch& s, double u, double v);

struct EqDue {
  /// G - 2r^2 + (4r^2 - G) cos^2 phi + |grad r| sin(2 phi) - |A|^2.
  double first = 0.0;
  /// (G - 4r^2) sin(2 phi)/2 + |grad r| cos(2 phi).
  double second = 0.0;
  /// tan(2 phi) - 2|grad r|/(4r^2 - G); NaN when 4r^2 - G vanishes.
  double tan2phi = kNotApplicable;
  bool g4r2_degenerate = false;
};

/// Throws AngleSingular (sin or cos of phi below eps_phi) and ZeroGradR.
EqDue eq_due_residuals(const PointInvariants& p, const BiharmonicOptions& o = {});
EqDue eq_due_residuals(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o = {});

/// tan(2 phi) - 2|grad r|/(4r^2 - G); throws G4r2Degenerate when 4r^2 = G.
double tan2phi_residual(const PointInvariants& p, const BiharmonicOptions& o = {});

struct APhi {
  /// 2|A|^2 - tan(phi) Lap(phi) - |grad phi|^2, Laplacian in divergence form.
  double aphi = 0.0;
  /// 2|A|^2 - [tan(phi)(e1e1(phi) + e2e2(phi)) + 2r e2(phi) + H e1(phi)].
  double co1 = 0.0;
  double laplacian_divergence = 0.0;
  /// e1e1(phi) + e2e2(phi) - cot(phi)[|grad phi|^2 - (2r e2(phi) + H e1(phi))].
  double laplacian_frame = 0.0;
};

APhi aphi_residual(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o = {});
/// 2|A|^2 - tan(phi) Lap(phi) - |grad phi|^2 from pointwise data.
double aphi_residual(const PointInvariants& p);

enum class Branch { A, B1, B2, None, ContradictionPropRconst };

std::string branch_name(Branch b);

struct BranchReport {
  Branch branch = Branch::None;
  /// Whether the conditions certified for the branch hold at the tolerance.
  bool conditions_hold = false;
  std::string note;

  double tan2phi_residual = kNotApplicable;
  double aphi_residual = kNotApplicable;
  double sphere_condition_residual = kNotApplicable;  // |A|^2 - 2r^2
  double e1norma_residual = kNotApplicable;           // max of both lines
  double norma_residual = kNotApplicable;             // |A|^2 - (G - 2r^2)
  double orto_residual = kNotApplicable;              // c2 r_x - c1 r_y
  double hopf_defect = kNotApplicable;                // H^2 - (G - 4r^2)
  double constancy = kNotApplicable;                  // spread of r and G over the probe
  double eq_due_first = kNotApplicable;
  double eq_due_second = kNotApplicable;
};

/// Branch decision from pointwise data alone.
BranchReport classify(const PointInvariants& p, const BiharmonicOptions& o = {});

/// Branch decision at a surface point; enforces CMC unless disabled.
BranchReport classify_point(const SurfacePatch& s, double u, double v, const BiharmonicOptions& o = {});

/// Invariants at a surface point with (a, b) = (t1, t2). When the angle-adapted
/// frame exists, dphi is filled; the Laplacian of phi only when requested.
PointInvariants point_invariants(const SurfacePatch& s, double u, double v, bool with_laplacian = false);

/// Pointwise data for the angle-adapted frame with e2 = grad r/|grad r|,
/// eta = sin(phi) J e2 + cos(phi) xi, e1 = -cos(phi) J e2 + sin(phi) xi.
PointInvariants gradient_adapted(const PointGeometry& g, double phi, double H, double normSqA);

}  // namespace killing
