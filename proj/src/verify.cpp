#include "killing/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <random>

#include "killing/biharmonic.hpp"
#include "killing/errors.hpp"
#include "killing/geometry.hpp"
#include "killing/hopf.hpp"
#include "killing/surface.hpp"

namespace killing {

std::string status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skipped: return "skipped";
  }
  return "unknown";
}

CheckReport make_check(std::string name, double residual, double tol, Comparison cmp,
                       std::optional<std::array<double, 2>> location, std::string note) {
  CheckReport c;
  c.check = std::move(name);
  c.residual = residual;
  c.tol = tol;
  c.comparison = cmp;
  c.location = location;
  c.note = std::move(note);
  bool ok = false;
  switch (cmp) {
    case Comparison::AtMost: ok = residual <= tol; break;
    case Comparison::AtLeast: ok = residual >= tol; break;
    case Comparison::Flag: ok = residual == 0.0; break;
  }
  c.status = ok ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

CheckReport flag_check(std::string name, bool holds, std::string note) {
  return make_check(std::move(name), holds ? 0.0 : 1.0, 0.0, Comparison::Flag, std::nullopt, std::move(note));
}

CheckReport skipped_check(std::string name, std::string note, double tol) {
  CheckReport c;
  c.check = std::move(name);
  c.tol = tol;
  c.residual = std::numeric_limits<double>::quiet_NaN();
  c.note = std::move(note);
  return c;
}

bool CriterionReport::pass() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckReport& c) { return c.status == CheckStatus::Fail; });
}

namespace {

struct Family {
  std::string name;
  KillingData data;
};

std::vector<Family> families() {
  return {
      {"flat product", KillingData::from_text("1", "0", "0", Rect{-2, 2, -2, 2}, "flat product")},
      {"Heisenberg", bcv(0, 0.5)},
      {"bcv(1,1)", bcv(1, 1)},
      {"bcv(-1,0.3)", bcv(-1, 0.3)},
      {"non-BCV", KillingData::from_text("exp(-(x^2+y^2)/4)", "0", "x", Rect{-2, 2, -2, 2}, "non-BCV")},
  };
}

const Family& family(const std::vector<Family>& fs, const std::string& name) {
  return *std::find_if(fs.begin(), fs.end(), [&](const Family& f) { return f.name == name; });
}

class Sampler {
 public:
  explicit Sampler(unsigned seed) : rng_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  std::string c(double lo, double hi) { return format_constant(uniform(lo, hi)); }
  Point3 point() { return Point3(uniform(-0.9, 0.9), uniform(-0.9, 0.9), uniform(-2, 2)); }
  Vec3 vector() { return Vec3(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1)); }
  std::string height() {
    return c(-0.5, 0.5) + "*x^2 + " + c(-0.5, 0.5) + "*x*y + " + c(-0.5, 0.5) + "*y^2 + " + c(-0.5, 0.5) +
           "*sin(x + " + c(-1, 1) + "*y) + " + c(-0.5, 0.5) + "*x";
  }

 private:
  std::mt19937 rng_;
};

Vec3 unit(int i) { return Vec3::Unit(i); }

// Hopf cylinder over the origin-centred circle of geodesic curvature kappa in the base of bcv(c, mu).
SurfacePatch hopf_circle(double c, double mu, double kappa) {
  return hopf_cylinder_patch(bcv_circle(c, bcv_circle_radius(c, kappa)), bcv(c, mu));
}

// Running maximum with the location where it occurred.
struct Worst {
  double value = 0.0;
  std::optional<std::array<double, 2>> at;
  void update(double v, double a, double b) {
    if (!(v <= value)) {  // also records NaN
      value = v;
      at = std::array<double, 2>{a, b};
    }
  }
};

CheckReport worst_check(const std::string& name, const Worst& w, double tol) {
  return make_check(name, w.value, tol, Comparison::AtMost, w.at);
}

double rel(double a, double ref) { return std::abs(a - ref) / std::max(1.0, std::abs(ref)); }

std::vector<CheckReport> connection_criterion() {
  std::vector<CheckReport> out;
  Sampler s(101);
  for (const Family& f : families()) {
    Worst w;
    for (int n = 0; n < 20; ++n) {
      const Point3 p = s.point();
      w.update(connection(f.data, p).max_abs_difference(connection_oracle(f.data, p)), p.x(), p.y());
    }
    out.push_back(worst_check(f.name + ": connection table vs Koszul oracle", w, 1e-6));
  }
  return out;
}

std::vector<CheckReport> curvature_criterion() {
  std::vector<CheckReport> out;
  Sampler s(103);
  for (const Family& f : families()) {
    Worst w, r1, r2, dr;
    for (int n = 0; n < 40; ++n) {
      const Point3 p = s.point();
      const Vec3 x = s.vector(), y = s.vector(), z = s.vector(), v = s.vector();
      w.update(rel(riemann_closed(f.data, p, x, y, z, v), riemann_direct(f.data, p, x, y, z, v)), p.x(), p.y());
    }
    for (int n = 0; n < 5; ++n) {
      const Point3 p = s.point();
      const PointGeometry g = point_geometry(f.data, p.x(), p.y());
      for (int j = 0; j < 2; ++j) {
        r1.update(std::abs(riemann_direct(f.data, p, unit(j), unit(2), unit(j), unit(2)) + g.r * g.r), p.x(), p.y());
        dr.update(std::abs(riemann_direct(f.data, p, unit(0), unit(1), unit(j), unit(2)) + g.dr(unit(j))), p.x(),
                  p.y());
      }
      r2.update(std::abs(riemann_direct(f.data, p, unit(0), unit(1), unit(0), unit(1)) - (3 * g.r * g.r - g.G)),
                p.x(), p.y());
    }
    out.push_back(worst_check(f.name + ": closed-form curvature vs direct definition (relative)", w, 1e-5));
    out.push_back(worst_check(f.name + ": <R(Ej,E3)Ej,E3> = -r^2", r1, 1e-5));
    out.push_back(worst_check(f.name + ": <R(E1,E2)E1,E2> = 3r^2 - G", r2, 1e-5));
    out.push_back(worst_check(f.name + ": <R(E1,E2)Ej,E3> = -Ej(r)", dr, 1e-5));
  }
  return out;
}

std::vector<CheckReport> ricci_criterion() {
  std::vector<CheckReport> out;
  Sampler s(107);
  for (const Family& f : families()) {
    Worst w;
    for (int n = 0; n < 20; ++n) {
      const Point3 p = s.point();
      w.update((ricci(f.data, p) - ricci_contraction(f.data, p)).cwiseAbs().maxCoeff(), p.x(), p.y());
    }
    out.push_back(worst_check(f.name + ": Ricci matrix vs contraction of the direct curvature", w, 1e-5));
  }
  RicciMatrix expected = RicciMatrix::Zero();
  expected.diagonal() << -0.5, -0.5, 0.5;
  Worst h;
  const KillingData heis = bcv(0, 0.5);
  for (int n = 0; n < 20; ++n) {
    const Point3 p = s.point();
    h.update((ricci(heis, p) - expected).cwiseAbs().maxCoeff(), p.x(), p.y());
  }
  out.push_back(worst_check("Heisenberg: Ricci = diag(-1/2, -1/2, 1/2)", h, 1e-8));
  return out;
}

std::vector<CheckReport> bcv_criterion() {
  std::vector<CheckReport> out;
  for (auto [c, mu] : {std::pair{1.0, 1.0}, {-1.0, 0.3}, {0.0, 0.5}, {4.0, 1.0}}) {
    const KillingData k = bcv(c, mu);
    const Rect& d = k.domain();
    Worst wr, wg;
    for (int i = 0; i < 20; ++i) {
      for (int j = 0; j < 20; ++j) {
        const double x = d.xmin + (d.xmax - d.xmin) * (i + 0.5) / 20;
        const double y = d.ymin + (d.ymax - d.ymin) * (j + 0.5) / 20;
        const PointGeometry g = point_geometry(k, x, y);
        wr.update(std::abs(g.r - mu), x, y);
        wg.update(std::abs(g.G - c), x, y);
      }
    }
    const std::string name = "bcv(" + format_constant(c) + "," + format_constant(mu) + ")";
    out.push_back(worst_check(name + ": r = mu", wr, 1e-10));
    out.push_back(worst_check(name + ": G = c", wg, 1e-8));
  }
  return out;
}

std::vector<CheckReport> hopf_criterion() {
  std::vector<CheckReport> out;
  const BaseSurface round = BaseSurface::canonical(bcv(1, 0));
  const HopfReport ok = classify_hopf(bcv_circle(1, bcv_circle_radius(1, 1)), round);
  out.push_back(flag_check("bcv(1,0), kappa_g = 1: classifier passes", ok.pass, hopf_verdict_name(ok.verdict)));
  out.push_back(make_check("bcv(1,0), kappa_g = 1: max reduced-system residual", ok.max_last, 1e-5));
  for (double k : {0.5, 2.0}) {
    const HopfReport bad = classify_hopf(bcv_circle(1, bcv_circle_radius(1, k)), round);
    const std::string name = "bcv(1,0), kappa_g = " + format_constant(k);
    out.push_back(flag_check(name + ": classifier fails", !bad.pass, hopf_verdict_name(bad.verdict)));
    out.push_back(make_check(name + ": |defect|", std::abs(bad.defect), 0.1, Comparison::AtLeast));
  }
  const HopfReport heis = classify_hopf(bcv_circle(0, 1), BaseSurface::canonical(bcv(0, 0.5)));
  out.push_back(flag_check("Heisenberg: no admissible kappa_g", heis.verdict == HopfVerdict::NoAdmissibleCurvature,
                           hopf_verdict_name(heis.verdict)));
  out.push_back(make_check("Heisenberg: |(G - 4r^2) + 1|", std::abs(heis.admissible + 1), 1e-8));
  return out;
}

// Isothermal chart of dt^2 + cos(t)^2 dtheta^2 with bundle curvature r.
KillingData mercator(double r) {
  return KillingData::from_text("2/(exp(x) + exp(-x))", "0", format_constant(r) + "*(exp(x) - exp(-x))",
                                Rect{-2, 2, -4, 4}, "isothermal cos(t) chart");
}

std::vector<CheckReport> example_criterion() {
  std::vector<CheckReport> out;
  const Expr f = Expr::parse("cos(t)", {"t"});
  for (double r : {0.0, 0.25}) {
    const std::string tag = "f = cos t, r = " + format_constant(r) + ": ";
    const ExampleResult ex = example_construct(f, r, 0, M_PI / 2);
    out.push_back(flag_check(tag + "exactly one root", ex.roots.size() == 1));
    if (ex.roots.empty()) continue;
    const ExampleRoot& root = ex.roots[0];
    const double k2 = root.kappa * root.kappa;
    if (r == 0.0) {
      out.push_back(make_check(tag + "|t0 - pi/4|", std::abs(root.t0 - M_PI / 4), 1e-8));
      out.push_back(make_check(tag + "|kappa_g^2 - 1|", std::abs(k2 - 1), 1e-8));
      out.push_back(make_check(tag + "|G - 1|", std::abs(root.G - 1), 1e-8));
    } else {
      out.push_back(make_check(tag + "|kappa_g^2 - 3/4|", std::abs(k2 - 0.75), 1e-8));
      out.push_back(make_check(tag + "|kappa_g^2 - (G - 4r^2)|", std::abs(k2 - (root.G - 4 * r * r)), 1e-8));
    }
    out.push_back(flag_check(tag + "Hopf classifier passes", root.report.pass, hopf_verdict_name(root.report.verdict)));
    out.push_back(make_check(tag + "max reduced-system residual", root.report.max_last, 1e-5));
    out.push_back(make_check(tag + "max general-system residual", root.report.max_sys_ou, 1e-5));

    // The same cylinder in an isothermal chart, through the surface module.
    const KillingData k = mercator(r);
    const double x0 = std::atanh(std::sin(root.t0));
    const BaseCurve c = BaseCurve::from_text(format_constant(x0), "s*" + format_constant(std::cosh(x0)), -1, 1, true);
    const SurfacePatch patch = hopf_cylinder_patch(c, k);
    const SurfacePointData d = analyze_point(patch, 0.1, 0.5);
    out.push_back(make_check(tag + "cylinder |cos(phi)|", std::abs(d.cos_phi), 1e-8));
    out.push_back(make_check(tag + "cylinder |H - kappa_g|", std::abs(d.H - root.kappa), 1e-8));
    const BitensionResidual b = bitension_cmc(patch, 0.1, 0.5);
    out.push_back(make_check(tag + "cylinder bitension residual", b.magnitude(), 1e-5));
    out.push_back(flag_check(tag + "cylinder is proper biharmonic", b.proper(1e-5)));
  }
  return out;
}

std::vector<CheckReport> surface_criterion() {
  std::vector<CheckReport> out;
  const std::vector<Family> fs = families();
  Sampler s(109);
  for (const char* name : {"Heisenberg", "bcv(1,1)", "non-BCV"}) {
    const Family& f = family(fs, name);
    Worst gauss, codazzi, compat, norma;
    int singular = 0, norma_points = 0;
    for (int n = 0; n < 10; ++n) {
      const SurfacePatch patch = SurfacePatch::graph(s.height(), Rect{-0.9, 0.9, -0.9, 0.9}, f.data);
      for (int m = 0; m < 2; ++m) {
        const double u = s.uniform(-0.6, 0.6), v = s.uniform(-0.6, 0.6);
        try {
          gauss.update(std::abs(gauss_residual(patch, u, v)), u, v);
          codazzi.update(codazzi_residual(patch, u, v).cwiseAbs().maxCoeff(), u, v);
          const CompatibilityResiduals cr = compatibility_residuals(patch, u, v);
          compat.update(std::max(cr.prima, cr.seconda), u, v);
          const SurfacePointData d = analyze_point(patch, u, v);
          if (d.sin_phi >= 0.1) {
            ++norma_points;
            norma.update(std::abs(norm_sq_from_angle(d) - d.normSqA), u, v);
          }
        } catch (const AngleSingular&) {
          ++singular;
        }
      }
    }
    const std::string tag = std::string(name) + ": ";
    const std::string note = singular ? std::to_string(singular) + " angle-singular points skipped" : "";
    out.push_back(worst_check(tag + "Gauss equation residual", gauss, 1e-4));
    out.back().note = note;
    out.push_back(worst_check(tag + "Codazzi equation residual", codazzi, 1e-4));
    out.push_back(worst_check(tag + "compatibility residuals", compat, 1e-4));
    out.push_back(worst_check(tag + "|A|^2 from the angle function vs direct", norma, 1e-4));
    out.back().note = std::to_string(norma_points) + " points with sin(phi) >= 0.1";
  }
  return out;
}

std::vector<CheckReport> biharmonic_criterion() {
  std::vector<CheckReport> out;
  std::vector<std::pair<std::string, SurfacePatch>> harmonic;
  harmonic.emplace_back("Heisenberg z = 0", SurfacePatch::from_text("u", "v", "0", Rect{}, bcv(0, 0.5)));
  const std::vector<Family> fs = families();
  for (const Family& f : fs) {
    harmonic.emplace_back(f.name + " vertical plane",
                          SurfacePatch::from_text("0", "u", "v", Rect{-0.5, 0.5, -1, 1}, f.data));
  }
  harmonic.emplace_back("bcv(4,1) vertical plane",
                        SurfacePatch::from_text("0.6*u", "0.8*u", "v", Rect{-0.5, 0.5, -1, 1}, bcv(4, 1)));

  Worst h, bit;
  bool flips_agree = true;
  const BiharmonicOptions o;
  for (const auto& [name, patch] : harmonic) {
    for (auto [u, v] : {std::pair{0.1, 0.2}, {-0.2, -0.3}, {0.3, 0.0}}) {
      const BitensionResidual b = bitension_cmc(patch, u, v, o);
      h.update(std::abs(b.H), u, v);
      bit.update(b.magnitude(), u, v);
      const BitensionResidual f = bitension_cmc(patch.with_flip(true), u, v, o);
      flips_agree = flips_agree && b.biharmonic(o.tol) == f.biharmonic(o.tol) && b.proper(o.tol) == f.proper(o.tol);
    }
  }
  out.push_back(make_check("harmonic inputs: max |H|", h.value, 1e-8, Comparison::AtMost, h.at));
  out.push_back(make_check("harmonic inputs: max bitension residual", bit.value, 1e-6, Comparison::AtMost, bit.at));

  for (double k : {0.5, 1.0, 2.0}) {
    const SurfacePatch cyl = hopf_circle(1, 0, k);
    const BitensionResidual a = bitension_cmc(cyl, 1.0, 0.5, o), b = bitension_cmc(cyl.with_flip(true), 1.0, 0.5, o);
    const BranchReport ra = classify_point(cyl, 1.0, 0.5, o), rb = classify_point(cyl.with_flip(true), 1.0, 0.5, o);
    flips_agree = flips_agree && a.biharmonic(o.tol) == b.biharmonic(o.tol) && a.proper(o.tol) == b.proper(o.tol) &&
                  ra.branch == rb.branch && ra.conditions_hold == rb.conditions_hold;
  }
  BiharmonicOptions diag = o;
  diag.require_cmc = false;
  Sampler s(113);
  const KillingData nonbcv = family(fs, "non-BCV").data;
  for (int n = 0; n < 10; ++n) {
    const SurfacePatch g = SurfacePatch::graph(s.height(), Rect{-0.9, 0.9, -0.9, 0.9}, nonbcv);
    const double u = s.uniform(-0.5, 0.5), v = s.uniform(-0.5, 0.5);
    const BranchReport ra = classify_point(g, u, v, diag), rb = classify_point(g.with_flip(true), u, v, diag);
    flips_agree = flips_agree && ra.branch == rb.branch && ra.conditions_hold == rb.conditions_hold;
  }
  out.push_back(flag_check("orientation flip leaves every verdict unchanged", flips_agree));
  return out;
}

std::vector<CheckReport> branch_criterion() {
  std::vector<CheckReport> out;
  const BranchReport a = classify_point(hopf_circle(1, 0, 1.0), 1.0, 0.5);
  out.push_back(flag_check("Hopf cylinder kappa_g = 1 in bcv(1,0): branch a", a.branch == Branch::A, branch_name(a.branch)));
  out.push_back(flag_check("Hopf cylinder kappa_g = 1 in bcv(1,0): branch conditions hold", a.conditions_hold));
  const BranchReport h = classify_point(hopf_circle(0, 0.5, 1.0), 1.0, 0.5);
  out.push_back(flag_check("Hopf cylinder in Heisenberg: branch a", h.branch == Branch::A, branch_name(h.branch)));

  bool contradiction = true;
  Sampler s(127);
  for (int n = 0; n < 10; ++n) {
    PointGeometry g;
    g.lambda = s.uniform(0.5, 2);
    g.r = s.uniform(-1, 1);
    g.G = 4 * g.r * g.r + s.uniform(-1e-8, 1e-8);
    const double angle = s.uniform(0, 2 * M_PI), norm = s.uniform(0.1, 2);
    g.grad_r = g.lambda * norm * Eigen::Vector2d(std::cos(angle), std::sin(angle));
    const PointInvariants p = gradient_adapted(g, s.uniform(0.2, 1.3), s.uniform(0.2, 1), s.uniform(0, 2));
    contradiction = contradiction && classify(p).branch == Branch::ContradictionPropRconst;
  }
  out.push_back(flag_check("synthetic |4r^2 - G| <= 1e-8, |grad r| >= 0.1: contradiction-propRconst", contradiction));

  Worst e1;
  for (int n = 0; n < 10; ++n) {
    PointGeometry g;
    g.lambda = s.uniform(0.5, 2);
    g.r = s.uniform(-1, 1);
    g.G = s.uniform(-2, 2);
    g.grad_r = Eigen::Vector2d(s.uniform(-1, 1), s.uniform(-1, 1));
    const double grad = g.gradient_r().norm();
    const double phi = 0.5 * std::atan2(2 * grad, 4 * g.r * g.r - g.G);
    const PointInvariants p = gradient_adapted(g, phi, s.uniform(0.2, 1), 2 * g.r * g.r + grad * std::tan(phi));
    const BranchReport rep = classify(p);
    e1.update(rep.branch == Branch::B2 ? rep.e1norma_residual : 1.0, phi, 0.0);
  }
  out.push_back(worst_check("synthetic b2 data: |A|^2 identity residual", e1, 1e-12));
  return out;
}

}  // namespace

std::vector<std::string> suite_criteria() {
  return {"connection", "curvature", "ricci", "bcv-constants", "hopf-cylinders",
          "final-example", "surface-identities", "biharmonic-sanity", "branch-logic"};
}

std::vector<CriterionReport> run_suite(const SuiteOptions& o) {
  const std::vector<std::function<std::vector<CheckReport>()>> runs = {
      connection_criterion, curvature_criterion, ricci_criterion, bcv_criterion, hopf_criterion,
      example_criterion, surface_criterion, biharmonic_criterion, branch_criterion};
  const std::vector<std::string> names = suite_criteria();
  std::vector<CriterionReport> out;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    if (!o.only.empty() && names[i].find(o.only) == std::string::npos) continue;
    CriterionReport c;
    c.id = static_cast<int>(i) + 1;
    c.name = names[i];
    const auto start = std::chrono::steady_clock::now();
    try {
      c.checks = runs[i]();
    } catch (const Error& e) {
      c.checks.push_back(flag_check("criterion evaluation", false, e.what()));
    }
    c.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.tol) {
      for (CheckReport& r : c.checks) {
        if (r.comparison == Comparison::AtMost && r.status != CheckStatus::Skipped) {
          r = make_check(r.check, r.residual, *o.tol, r.comparison, r.location, r.note);
        }
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace killing
