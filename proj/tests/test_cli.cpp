#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "killing/cli.hpp"

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "killing");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = killing::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json parse(const Result& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST_CASE("info") {
  const Result bcv = run({"info", "--bcv", "1", "1", "--at", "0", "0"});
  REQUIRE(bcv.code == 0);
  const auto j = parse(bcv);
  CHECK(j["schema_version"] == 1);
  CHECK(j["points"][0]["r"].get<double>() == doctest::Approx(1));
  CHECK(j["points"][0]["G"].get<double>() == doctest::Approx(1));

  const auto flat = parse(run({"info", "--lambda", "1", "--a", "0", "--b", "0", "--at", "0", "0"}));
  CHECK(flat["points"][0]["r"].get<double>() == 0.0);
  for (const auto& row : flat["points"][0]["ricci"])
    for (const auto& v : row) CHECK(v.get<double>() == 0.0);

  const auto lin = parse(run({"info", "--lambda", "1", "--a", "0", "--b", "x", "--at", "0.3", "0.7"}));
  CHECK(lin["points"][0]["r"].get<double>() == doctest::Approx(0.5));

  const auto grid = parse(run({"info", "--bcv", "0", "0.5", "--grid", "3", "2"}));
  CHECK(grid["points"].size() == 6);
}

TEST_CASE("usage and input errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"info"}).code == 2);
  CHECK(run({"info", "--bcv", "1", "1", "--lambda", "1"}).code == 2);
  CHECK(run({"info", "--lambda", "1 +", "--at", "0", "0"}).code == 2);
  CHECK(run({"info", "--lambda", "1", "--at", "5", "5"}).code == 2);
  CHECK(run({"info", "--bcv", "1", "1", "--grid", "1", "4"}).code == 2);
  CHECK(run({"check-surface", "--bcv", "1", "1", "--surface", "u;v"}).code == 2);
  CHECK(run({"check-surface", "--bcv", "1", "1", "--graph", "x", "--tol", "-1"}).code == 2);
  CHECK(run({"hopf", "check", "--lambda", "1", "--circle-kg", "1"}).code == 2);
  CHECK(run({"hopf", "example", "--f", "1", "--r", "0", "--interval", "0", "1"}).code == 2);
  CHECK(run({"verify-paper", "--only", "no-such-criterion"}).code == 2);
  CHECK(run({"info", "--bcv", "1", "1", "--format", "xml"}).code == 2);
  const Result help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("verify-paper") != std::string::npos);
}

TEST_CASE("check-surface") {
  const std::string R = "0.82842712474619009";  // 2/(1 + sqrt 2): geodesic curvature 1 in bcv(1, 0)
  const Result hopf = run({"check-surface", "--bcv", "1", "0", "--surface", R + "*cos(u);" + R + "*sin(u);v",
                           "--params", "0.2", "3", "-1", "1", "--expect", "pass"});
  CHECK(hopf.code == 0);
  const auto h = parse(hopf);
  CHECK(h["status"] == "pass");
  CHECK(h["biharmonic"]["verdict"] == "proper biharmonic");
  CHECK(h["biharmonic"]["branches"] == nlohmann::json::array({"a"}));
  CHECK(h["checks"].size() == 3 * 16);

  const auto plane = parse(run({"check-surface", "--lambda", "1", "--surface", "u;0;v"}));
  CHECK(plane["status"] == "pass");
  CHECK(plane["biharmonic"]["verdict"] == "harmonic (not proper)");

  const Result graph = run({"check-surface", "--bcv", "0", "0.5", "--graph", "x*y", "--params", "-1", "1", "-1", "1"});
  CHECK(graph.code == 0);
  const auto g = parse(graph);
  for (const auto& s : g["summary"]) CHECK(s["status"] == "pass");
  CHECK(g["biharmonic"]["verdict"] == "no (not CMC)");
  CHECK(run({"check-surface", "--bcv", "0", "0.5", "--graph", "x*y", "--params", "-1", "1", "-1", "1", "--expect",
             "pass"}).code == 1);

  // Horizontal slices have no adapted frame: the identity checks are skipped, not failed.
  const auto slice = parse(run({"check-surface", "--lambda", "1", "--surface", "u;v;0"}));
  CHECK(slice["status"] == "pass");
  CHECK(slice["summary"][0]["status"] == "skipped");

  const Result tight = run({"check-surface", "--bcv", "0", "0.5", "--graph", "x*y", "--params", "-1", "1", "-1", "1",
                            "--tol", "1e-16"});
  CHECK(tight.code == 1);
}

TEST_CASE("check-surface csv") {
  const Result r = run({"check-surface", "--lambda", "1", "--surface", "u;0;v", "--grid", "2", "2", "--format", "csv"});
  REQUIRE(r.code == 0);
  std::istringstream lines(r.out);
  std::string header;
  std::getline(lines, header);
  CHECK(header == "s_or_u,v,check,residual,tol,status");
  int rows = 0;
  for (std::string line; std::getline(lines, line);) ++rows;
  CHECK(rows == 4 * 4);
}

TEST_CASE("hopf") {
  const Result ex = run({"hopf", "example", "--f", "cos(t)", "--r", "0", "--interval", "0", "1.5", "--expect", "pass"});
  CHECK(ex.code == 0);
  const auto e = parse(ex);
  REQUIRE(e["roots"].size() == 1);
  CHECK(std::abs(e["roots"][0]["t0"].get<double>() - 0.785398163397) < 1e-9);
  CHECK(e["roots"][0]["verdict"] == "proper-biharmonic");

  const Result heis = run({"hopf", "check", "--bcv", "0", "0.5", "--circle", "1"});
  CHECK(heis.code == 0);
  const auto h = parse(heis);
  CHECK(h["status"] == "fail");
  CHECK(h["report"]["G_minus_4r2"].get<double>() == doctest::Approx(-1));
  CHECK(run({"hopf", "check", "--bcv", "0", "0.5", "--circle", "1", "--expect", "pass"}).code == 1);
  CHECK(run({"hopf", "check", "--bcv", "0", "0.5", "--circle", "1", "--expect", "fail"}).code == 0);

  const Result round = run({"hopf", "check", "--bcv", "1", "0", "--circle-kg", "1", "--expect", "pass"});
  CHECK(round.code == 0);
  CHECK(parse(round)["report"]["constants"]["H"].get<double>() == doctest::Approx(1));

  const Result curve = run({"hopf", "check", "--lambda", "1", "--curve", "0.5*cos(s);0.5*sin(s)", "--interval", "0",
                            "3", "--samples", "16"});
  CHECK(curve.code == 0);
  CHECK(parse(curve)["report"]["samples"].size() == 16);
  CHECK(parse(curve)["report"]["verdict"] == "curvature-mismatch");
}

TEST_CASE("verification suite command") {
  const Result only = run({"verify-paper", "--only", "hopf"});
  CHECK(only.code == 0);
  const auto j = parse(only);
  REQUIRE(j["criteria"].size() == 1);
  CHECK(j["criteria"][0]["name"] == "hopf-cylinders");

  // Tightened tolerances expose the finite-difference floor.
  const Result tight = run({"verify-paper", "--only", "surface", "--tol", "1e-12"});
  CHECK(tight.code == 1);
  CHECK(parse(tight)["criteria"][0]["status"] == "fail");

  CHECK(run({"verify-paper", "--only", "branch"}).out == run({"verify-paper", "--only", "branch"}).out);
}
