#include "killing/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "killing/biharmonic.hpp"
#include "killing/errors.hpp"
#include "killing/hopf.hpp"
#include "killing/verify.hpp"

namespace killing::cli {

namespace {

using json = nlohmann::ordered_json;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12e", v == 0.0 ? 0.0 : v);
  return buf;
}

// Fixed field order, two-space indentation, floats as %.12e, non-finite as null.
void write_json(std::ostream& os, const json& j, int level = 0) {
  const std::string pad(2 * (level + 1), ' '), close(2 * level, ' ');
  if (j.is_object()) {
    if (j.empty()) { os << "{}"; return; }
    os << "{\n";
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) os << ",\n";
      first = false;
      os << pad << json(it.key()).dump() << ": ";
      write_json(os, it.value(), level + 1);
    }
    os << "\n" << close << "}";
  } else if (j.is_array()) {
    if (j.empty()) { os << "[]"; return; }
    if (std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); })) {
      os << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ", ";
        write_json(os, j[i], level + 1);
      }
      os << "]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      if (i) os << ",\n";
      os << pad;
      write_json(os, j[i], level + 1);
    }
    os << "\n" << close << "]";
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    os << (std::isfinite(v) ? num(v) : "null");
  } else {
    os << j.dump();
  }
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

struct CsvRow {
  std::optional<double> s_or_u, v;
  std::string check;
  double residual = 0.0, tol = 0.0;
  std::string status;
};

void write_csv(std::ostream& os, const std::vector<CsvRow>& rows) {
  os << "s_or_u,v,check,residual,tol,status\n";
  auto opt = [](const std::optional<double>& x) { return x ? num(*x) : std::string(); };
  for (const CsvRow& r : rows) {
    os << opt(r.s_or_u) << "," << opt(r.v) << "," << csv_field(r.check) << ","
       << (std::isfinite(r.residual) ? num(r.residual) : "nan") << "," << num(r.tol) << "," << r.status << "\n";
  }
}

json pair_json(double a, double b) { return json::array({a, b}); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

// ---------------------------------------------------------------------------
// Metric and report helpers

KillingData metric_from(const RunConfig& c) {
  const bool expr = c.lambda || c.a || c.b;
  if (c.bcv && expr) throw UsageError("give either --bcv or --lambda/--a/--b, not both");
  if (!c.bcv && !expr) throw UsageError("a metric is required: --bcv c mu or --lambda/--a/--b");
  Rect domain{-2, 2, -2, 2};
  if (c.domain) {
    const auto& d = *c.domain;
    domain = Rect{d[0], d[1], d[2], d[3]};
    if (!(domain.xmin < domain.xmax && domain.ymin < domain.ymax)) throw UsageError("--domain must be xmin xmax ymin ymax");
  }
  if (c.bcv) {
    const KillingData k = bcv((*c.bcv)[0], (*c.bcv)[1]);
    if (!c.domain) return k;
    return KillingData(k.lambda(), k.a(), k.b(), domain, k.description());
  }
  if (!c.lambda) throw UsageError("--lambda is required with --a/--b");
  return KillingData::from_text(*c.lambda, c.a.value_or("0"), c.b.value_or("0"), domain, "canonical");
}

json metric_json(const KillingData& k) {
  json m;
  m["lambda"] = k.lambda().to_string();
  m["a"] = k.a().to_string();
  m["b"] = k.b().to_string();
  const Rect& d = k.domain();
  m["domain"] = json::array({d.xmin, d.xmax, d.ymin, d.ymax});
  return m;
}

json check_json(const CheckReport& c) {
  json j;
  j["check"] = c.check;
  j["status"] = status_name(c.status);
  j["residual"] = c.residual;
  j["tol"] = c.tol;
  j["comparison"] = c.comparison == Comparison::AtMost ? "at-most" : c.comparison == Comparison::AtLeast ? "at-least" : "flag";
  j["location"] = c.location ? pair_json((*c.location)[0], (*c.location)[1]) : json(nullptr);
  j["note"] = c.note;
  return j;
}

void emit(const RunConfig& c, std::ostream& out, const json& doc, const std::vector<CsvRow>& rows) {
  std::ofstream file;
  std::ostream* os = &out;
  if (c.out) {
    file.open(*c.out, std::ios::binary);
    if (!file) throw UsageError("cannot open output file " + *c.out);
    os = &file;
  }
  if (c.format == Format::Json) {
    write_json(*os, doc);
    *os << "\n";
  } else {
    write_csv(*os, rows);
  }
}

int expect_code(const RunConfig& c, bool passed) {
  if (!c.expect) return kPass;
  return (*c.expect == "pass") == passed ? kPass : kCheckFailure;
}

// ---------------------------------------------------------------------------
// Commands

int cmd_info(const RunConfig& c, std::ostream& out) {
  const KillingData k = metric_from(c);
  std::vector<std::array<double, 2>> points;
  if (c.at) {
    points.push_back(*c.at);
  } else if (c.grid_given) {
    const Rect& d = k.domain();
    for (int i = 0; i < c.grid[0]; ++i)
      for (int j = 0; j < c.grid[1]; ++j)
        points.push_back({d.xmin + (d.xmax - d.xmin) * (i + 0.5) / c.grid[0],
                          d.ymin + (d.ymax - d.ymin) * (j + 0.5) / c.grid[1]});
  } else {
    points.push_back({0.0, 0.0});
  }
  json doc;
  doc["schema_version"] = 1;
  doc["command"] = "info";
  doc["metric"] = metric_json(k);
  json list = json::array();
  std::vector<CsvRow> rows;
  for (const auto& p : points) {
    const PointGeometry g = point_geometry(k, p[0], p[1]);
    const RicciMatrix ric = ricci(g);
    json e;
    e["x"] = p[0];
    e["y"] = p[1];
    e["r"] = g.r;
    e["G"] = g.G;
    e["grad_r"] = pair_json(g.grad_r.x(), g.grad_r.y());
    json rm = json::array();
    for (int i = 0; i < 3; ++i) rm.push_back(json::array({ric(i, 0), ric(i, 1), ric(i, 2)}));
    e["ricci"] = rm;
    list.push_back(e);
    for (auto [name, value] : {std::pair{"r", g.r}, {"G", g.G}, {"r_x", g.grad_r.x()}, {"r_y", g.grad_r.y()}}) {
      rows.push_back(CsvRow{p[0], p[1], name, value, 0.0, "value"});
    }
  }
  doc["points"] = list;
  emit(c, out, doc, rows);
  return kPass;
}

SurfacePatch surface_from(const RunConfig& c, const KillingData& k) {
  if (c.surface && c.graph) throw UsageError("give either --surface or --graph");
  if (c.graph) {
    Rect params = k.domain();
    if (c.params) params = Rect{(*c.params)[0], (*c.params)[1], (*c.params)[2], (*c.params)[3]};
    return SurfacePatch::graph(*c.graph, params, k, c.flip);
  }
  if (!c.surface) throw UsageError("a surface is required: --surface \"X;Y;Z\" or --graph \"h(x,y)\"");
  const std::vector<std::string> xyz = split(*c.surface, ';');
  if (xyz.size() != 3) throw UsageError("--surface needs three components separated by ';'");
  Rect params{-1, 1, -1, 1};
  if (c.params) params = Rect{(*c.params)[0], (*c.params)[1], (*c.params)[2], (*c.params)[3]};
  return SurfacePatch::from_text(xyz[0], xyz[1], xyz[2], params, k, c.flip);
}

int cmd_check_surface(const RunConfig& c, std::ostream& out) {
  const KillingData k = metric_from(c);
  const SurfacePatch s = surface_from(c, k);
  const double tol = c.tol.value_or(1e-4);
  BiharmonicOptions bo;
  bo.tol = tol;

  const Rect& p = s.params();
  std::vector<CheckReport> checks;
  std::vector<CsvRow> rows;
  json points = json::array();
  bool cmc = true, all_biharmonic = true;
  double max_H = 0.0;
  std::set<std::string> branches;
  auto add = [&](CheckReport r, double u, double v) {
    r.location = std::array<double, 2>{u, v};
    rows.push_back(CsvRow{u, v, r.check, r.residual, r.tol, status_name(r.status)});
    checks.push_back(std::move(r));
  };
  auto guarded = [&](const std::string& name, double u, double v, const std::function<double()>& f) {
    try {
      add(make_check(name, f(), tol), u, v);
    } catch (const AngleSingular& e) {
      add(skipped_check(name, e.what(), tol), u, v);
    } catch (const InsufficientMargin& e) {
      add(skipped_check(name, e.what(), tol), u, v);
    }
  };

  for (int i = 0; i < c.grid[0]; ++i) {
    for (int j = 0; j < c.grid[1]; ++j) {
      const double u = p.xmin + (p.xmax - p.xmin) * (i + 0.5) / c.grid[0];
      const double v = p.ymin + (p.ymax - p.ymin) * (j + 0.5) / c.grid[1];
      guarded("gauss", u, v, [&] { return std::abs(gauss_residual(s, u, v)); });
      guarded("codazzi", u, v, [&] { return codazzi_residual(s, u, v).cwiseAbs().maxCoeff(); });
      guarded("compatibility", u, v, [&] {
        const CompatibilityResiduals r = compatibility_residuals(s, u, v);
        return std::max(r.prima, r.seconda);
      });
      json pt;
      pt["u"] = u;
      pt["v"] = v;
      try {
        const BitensionResidual b = bitension_cmc(s, u, v, bo);
        const BranchReport br = classify_point(s, u, v, bo);
        max_H = std::max(max_H, std::abs(b.H));
        all_biharmonic = all_biharmonic && b.biharmonic(tol);
        branches.insert(branch_name(br.branch));
        pt["H"] = b.H;
        pt["bitension"] = b.magnitude();
        pt["branch"] = branch_name(br.branch);
        pt["branch_conditions_hold"] = br.conditions_hold;
        const double bt = b.magnitude();
        rows.push_back(CsvRow{u, v, "bitension", bt, tol, b.biharmonic(tol) ? "pass" : "fail"});
      } catch (const NotCMC& e) {
        cmc = false;
        pt["H"] = analyze_point(s, u, v).H;
        pt["bitension"] = nullptr;
        pt["branch"] = "not-cmc";
        pt["branch_conditions_hold"] = false;
        rows.push_back(CsvRow{u, v, "bitension", std::nan(""), tol, "skipped"});
      }
      points.push_back(pt);
    }
  }

  std::string verdict;
  if (!cmc) verdict = "no (not CMC)";
  else if (!all_biharmonic) verdict = "no";
  else if (max_H <= tol) verdict = "harmonic (not proper)";
  else verdict = "proper biharmonic";

  json summary = json::array();
  bool identities_pass = true;
  for (const char* name : {"gauss", "codazzi", "compatibility"}) {
    double worst = 0.0;
    std::optional<std::array<double, 2>> at;
    int evaluated = 0;
    bool fail = false;
    for (const CheckReport& r : checks) {
      if (r.check != name || r.status == CheckStatus::Skipped) continue;
      ++evaluated;
      fail = fail || r.status == CheckStatus::Fail;
      if (!(r.residual <= worst)) {
        worst = r.residual;
        at = r.location;
      }
    }
    identities_pass = identities_pass && !fail;
    json e;
    e["check"] = name;
    e["status"] = evaluated == 0 ? "skipped" : fail ? "fail" : "pass";
    e["worst_residual"] = evaluated ? json(worst) : json(nullptr);
    e["tol"] = tol;
    e["location"] = at ? pair_json((*at)[0], (*at)[1]) : json(nullptr);
    summary.push_back(e);
  }

  json doc;
  doc["schema_version"] = 1;
  doc["command"] = "check-surface";
  doc["metric"] = metric_json(k);
  json surf;
  surf["x"] = s.x().to_string();
  surf["y"] = s.y().to_string();
  surf["z"] = s.z().to_string();
  surf["params"] = json::array({p.xmin, p.xmax, p.ymin, p.ymax});
  surf["flip"] = s.flipped();
  doc["surface"] = surf;
  doc["grid"] = json::array({c.grid[0], c.grid[1]});
  json cl = json::array();
  for (const CheckReport& r : checks) {
    json e;
    e["check"] = r.check;
    e["s_or_u"] = (*r.location)[0];
    e["v"] = (*r.location)[1];
    e["residual"] = r.residual;
    e["tol"] = r.tol;
    e["status"] = status_name(r.status);
    if (!r.note.empty()) e["note"] = r.note;
    cl.push_back(e);
  }
  doc["checks"] = cl;
  doc["summary"] = summary;
  json bih;
  bih["cmc"] = cmc;
  bih["verdict"] = verdict;
  bih["max_abs_H"] = max_H;
  bih["branches"] = json(std::vector<std::string>(branches.begin(), branches.end()));
  bih["points"] = points;
  doc["biharmonic"] = bih;
  doc["status"] = identities_pass ? "pass" : "fail";
  emit(c, out, doc, rows);

  if (!identities_pass) return kCheckFailure;
  return expect_code(c, verdict == "proper biharmonic");
}

BaseCurve curve_from(const RunConfig& c, const BaseSurface& base) {
  const int given = (c.curve ? 1 : 0) + (c.circle ? 1 : 0) + (c.circle_kg ? 1 : 0);
  if (given != 1) throw UsageError("give exactly one of --curve, --circle, --circle-kg");
  if (c.circle_kg) {
    if (!c.bcv) throw UsageError("--circle-kg needs a --bcv metric");
    return bcv_circle((*c.bcv)[0], bcv_circle_radius((*c.bcv)[0], *c.circle_kg));
  }
  if (c.circle) {
    if (c.bcv) return bcv_circle((*c.bcv)[0], *c.circle);
    const std::string R = format_constant(*c.circle);
    return arclength_reparam(BaseCurve::from_text(R + "*cos(s)", R + "*sin(s)", 0, 2 * M_PI), base);
  }
  const std::vector<std::string> xy = split(*c.curve, ';');
  if (xy.size() != 2) throw UsageError("--curve needs two components separated by ';'");
  if (!c.interval) throw UsageError("--curve needs --interval s0 s1");
  return arclength_reparam(BaseCurve::from_text(xy[0], xy[1], (*c.interval)[0], (*c.interval)[1]), base);
}

json hopf_report_json(const HopfReport& r) {
  json j;
  j["verdict"] = hopf_verdict_name(r.verdict);
  j["pass"] = r.pass;
  j["defect"] = r.defect;
  j["G_minus_4r2"] = r.admissible;
  j["mean_kappa_g"] = r.mean_kappa;
  j["mean_r"] = r.mean_r;
  j["mean_G"] = r.mean_G;
  j["stddev_kappa_g"] = r.stddev_kappa;
  j["stddev_r"] = r.stddev_r;
  j["stddev_G"] = r.stddev_G;
  j["max_last_residual"] = r.max_last;
  j["max_sys_ou_residual"] = r.max_sys_ou;
  j["max_system_disagreement"] = r.max_agreement;
  if (r.constants) {
    json k;
    k["H"] = (*r.constants)[0];
    k["G"] = (*r.constants)[1];
    k["r"] = (*r.constants)[2];
    j["constants"] = k;
  } else {
    j["constants"] = nullptr;
  }
  json samples = json::array();
  for (const HopfSample& q : r.samples) {
    json e;
    e["s"] = q.s;
    e["x"] = q.point.x();
    e["y"] = q.point.y();
    e["kappa_g"] = q.kappa;
    e["dkappa_g"] = q.dkappa;
    e["ddkappa_g"] = q.ddkappa;
    e["tau_g"] = q.tau;
    e["r"] = q.r;
    e["G"] = q.G;
    e["sys_ou"] = json::array({q.sys_ou[0], q.sys_ou[1], q.sys_ou[2]});
    e["last"] = json::array({q.last[0], q.last[1], q.last[2]});
    samples.push_back(e);
  }
  j["samples"] = samples;
  return j;
}

void hopf_rows(const HopfReport& r, double tol, std::vector<CsvRow>& rows) {
  for (const HopfSample& q : r.samples) {
    const double last = q.last.cwiseAbs().maxCoeff(), ou = q.sys_ou.cwiseAbs().maxCoeff();
    rows.push_back(CsvRow{q.s, 0.0, "last", last, tol, last <= tol ? "pass" : "fail"});
    rows.push_back(CsvRow{q.s, 0.0, "sys-ou", ou, tol, ou <= tol ? "pass" : "fail"});
  }
}

int cmd_hopf_check(const RunConfig& c, std::ostream& out) {
  const KillingData k = metric_from(c);
  const BaseSurface base = BaseSurface::canonical(k);
  const BaseCurve curve = curve_from(c, base);
  HopfOptions o;
  o.samples = c.samples;
  o.tol = c.tol.value_or(o.tol);
  const HopfReport rep = classify_hopf(curve, base, o);

  json doc;
  doc["schema_version"] = 1;
  doc["command"] = "hopf check";
  doc["metric"] = metric_json(k);
  json cj;
  cj["x"] = curve.x().to_string();
  cj["y"] = curve.y().to_string();
  cj["native_interval"] = pair_json(curve.native_min(), curve.native_max());
  cj["length"] = curve.s_max() - curve.s_min();
  doc["curve"] = cj;
  doc["tol"] = o.tol;
  doc["report"] = hopf_report_json(rep);
  doc["status"] = rep.pass ? "pass" : "fail";
  std::vector<CsvRow> rows;
  hopf_rows(rep, o.tol, rows);
  emit(c, out, doc, rows);
  return expect_code(c, rep.pass);
}

int cmd_hopf_example(const RunConfig& c, std::ostream& out) {
  if (!c.f) throw UsageError("--f is required");
  if (!c.interval) throw UsageError("--interval t0 t1 is required");
  HopfOptions o;
  o.samples = c.samples;
  o.tol = c.tol.value_or(o.tol);
  const ExampleResult ex = example_construct(Expr::parse(*c.f, {"t"}), c.r, (*c.interval)[0], (*c.interval)[1], o);

  json doc;
  doc["schema_version"] = 1;
  doc["command"] = "hopf example";
  doc["f"] = ex.base.warping().to_string();
  doc["r"] = c.r;
  doc["interval"] = pair_json((*c.interval)[0], (*c.interval)[1]);
  doc["tol"] = o.tol;
  json roots = json::array();
  std::vector<CsvRow> rows;
  bool all = true;
  for (const ExampleRoot& root : ex.roots) {
    json e;
    e["t0"] = root.t0;
    e["kappa_g"] = root.kappa;
    e["kappa_g_squared"] = root.kappa * root.kappa;
    e["G"] = root.G;
    e["G_minus_4r2"] = root.G - 4 * c.r * c.r;
    e["verdict"] = hopf_verdict_name(root.report.verdict);
    e["pass"] = root.report.pass;
    e["max_last_residual"] = root.report.max_last;
    e["max_sys_ou_residual"] = root.report.max_sys_ou;
    roots.push_back(e);
    all = all && root.report.pass;
    hopf_rows(root.report, o.tol, rows);
  }
  doc["roots"] = roots;
  doc["status"] = all ? "pass" : "fail";
  emit(c, out, doc, rows);
  return expect_code(c, all);
}

int cmd_verify_paper(const RunConfig& c, std::ostream& out) {
  SuiteOptions so;
  so.tol = c.tol;
  so.only = c.only;
  const std::vector<CriterionReport> suite = run_suite(so);
  if (suite.empty()) throw UsageError("--only " + c.only + " matches no criterion");

  json doc;
  doc["schema_version"] = 1;
  doc["command"] = "verify-paper";
  doc["tol_override"] = c.tol ? json(*c.tol) : json(nullptr);
  doc["only"] = c.only;
  json list = json::array();
  std::vector<CsvRow> rows;
  bool all = true;
  for (const CriterionReport& cr : suite) {
    json e;
    e["id"] = cr.id;
    e["name"] = cr.name;
    e["status"] = cr.pass() ? "pass" : "fail";
    json checks = json::array();
    for (const CheckReport& r : cr.checks) {
      checks.push_back(check_json(r));
      CsvRow row{std::nullopt, std::nullopt, cr.name + ": " + r.check, r.residual, r.tol, status_name(r.status)};
      if (r.location) {
        row.s_or_u = (*r.location)[0];
        row.v = (*r.location)[1];
      }
      rows.push_back(row);
    }
    e["checks"] = checks;
    list.push_back(e);
    all = all && cr.pass();
  }
  doc["criteria"] = list;
  doc["status"] = all ? "pass" : "fail";
  emit(c, out, doc, rows);
  return all ? kPass : kCheckFailure;
}

void add_metric_options(CLI::App* app, RunConfig& c) {
  app->add_option("--bcv", c.bcv, "BCV space E(c, mu)")->type_name("C MU");
  app->add_option("--lambda", c.lambda, "conformal factor lambda(x, y)");
  app->add_option("--a", c.a, "a(x, y)");
  app->add_option("--b", c.b, "b(x, y)");
  app->add_option("--domain", c.domain, "metric domain")->type_name("XMIN XMAX YMIN YMAX");
}

void add_output_options(CLI::App* app, RunConfig& c) {
  app->add_option("--format", c.format, "output format")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Format>{{"json", Format::Json}, {"csv", Format::Csv}}));
  app->add_option("--out", c.out, "write output to PATH");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig c;
  CLI::App app{"Geometry of Killing submersions: curvature, surfaces, biharmonic checks"};
  app.require_subcommand(1);

  CLI::App* info = app.add_subcommand("info", "r, G, grad r and Ricci at points of the base");
  add_metric_options(info, c);
  info->add_option("--at", c.at, "base point")->type_name("X Y");
  info->add_option("--grid", c.grid, "grid over the domain")->type_name("N M");
  add_output_options(info, c);

  CLI::App* surf = app.add_subcommand("check-surface", "surface identities and biharmonicity over a grid");
  add_metric_options(surf, c);
  surf->add_option("--surface", c.surface, "immersion \"X;Y;Z\" in (u, v)");
  surf->add_option("--graph", c.graph, "graph height in (x, y)");
  surf->add_option("--params", c.params, "parameter rectangle")->type_name("UMIN UMAX VMIN VMAX");
  surf->add_flag("--flip", c.flip, "reverse the unit normal");
  surf->add_option("--grid", c.grid, "sample grid")->type_name("N M");
  surf->add_option("--tol", c.tol, "tolerance");
  surf->add_option("--expect", c.expect, "expected biharmonic verdict")->check(CLI::IsMember({"pass", "fail"}));
  add_output_options(surf, c);

  CLI::App* hopf = app.add_subcommand("hopf", "Hopf cylinders");
  hopf->require_subcommand(1);
  CLI::App* hcheck = hopf->add_subcommand("check", "biharmonicity of the Hopf cylinder over a base curve");
  add_metric_options(hcheck, c);
  hcheck->add_option("--curve", c.curve, "base curve \"x;y\" in s");
  hcheck->add_option("--interval", c.interval, "parameter interval of --curve")->type_name("S0 S1");
  hcheck->add_option("--circle", c.circle, "origin-centred circle of radius R");
  hcheck->add_option("--circle-kg", c.circle_kg, "origin-centred circle of geodesic curvature k (BCV only)");
  hcheck->add_option("--samples", c.samples, "samples along the curve")->check(CLI::Range(2, 100000));
  hcheck->add_option("--tol", c.tol, "tolerance");
  hcheck->add_option("--expect", c.expect, "expected verdict")->check(CLI::IsMember({"pass", "fail"}));
  add_output_options(hcheck, c);
  CLI::App* hex = hopf->add_subcommand("example", "roots of f (f'' + 4 r^2 f) + f'^2 and their Hopf cylinders");
  hex->add_option("--f", c.f, "warping function f(t)");
  hex->add_option("--r", c.r, "constant bundle curvature");
  hex->add_option("--interval", c.interval, "t interval")->type_name("T0 T1");
  hex->add_option("--samples", c.samples, "samples along each curve")->check(CLI::Range(2, 100000));
  hex->add_option("--tol", c.tol, "tolerance");
  hex->add_option("--expect", c.expect, "expected verdict")->check(CLI::IsMember({"pass", "fail"}));
  add_output_options(hex, c);

  CLI::App* verify = app.add_subcommand("verify-paper", "run the built-in verification suite");
  verify->add_option("--tol", c.tol, "replace every upper-bound tolerance");
  verify->add_option("--only", c.only, "run criteria whose name contains NAME");
  add_output_options(verify, c);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kUsageError;
  }

  try {
    for (CLI::App* sub : {info, surf}) {
      if (sub->parsed() && sub->count("--grid")) c.grid_given = true;
    }
    if (c.grid[0] < 2 || c.grid[1] < 2) throw UsageError("--grid resolutions must be at least 2");
    if (c.tol && !(*c.tol > 0)) throw UsageError("--tol must be positive");
    if (info->parsed()) return cmd_info(c, out);
    if (surf->parsed()) return cmd_check_surface(c, out);
    if (hcheck->parsed()) return cmd_hopf_check(c, out);
    if (hex->parsed()) return cmd_hopf_example(c, out);
    if (verify->parsed()) return cmd_verify_paper(c, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsageError;
  }
  return kUsageError;
}

}  // namespace killing::cli
