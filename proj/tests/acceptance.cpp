// Acceptance driver: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "killing/cli.hpp"
#include "killing/verify.hpp"

namespace {

struct Line {
  int id;
  std::string name;
  bool pass;
  std::string detail;
};

std::string worst(const killing::CriterionReport& c) {
  double max_residual = 0.0;
  int failed = 0, skipped = 0;
  for (const auto& k : c.checks) {
    if (k.status == killing::CheckStatus::Fail) ++failed;
    if (k.status == killing::CheckStatus::Skipped) ++skipped;
    if (k.comparison == killing::Comparison::AtMost) max_residual = std::max(max_residual, k.residual);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "%zu checks, %d failed, %d skipped, max residual %.3e", c.checks.size(), failed,
                skipped, max_residual);
  return buf;
}

int verify_paper(std::string& json) {
  const char* argv[] = {"killing", "verify-paper"};
  std::ostringstream out, err;
  const int code = killing::cli::run(2, argv, out, err);
  json = out.str();
  return code;
}

}  // namespace

int main() {
  std::vector<Line> lines;
  for (const auto& c : killing::run_suite()) {
    bool pass = c.pass();
    std::string detail = worst(c);
    double limit = 0.0;
    if (c.id == 1) limit = 5.0;
    if (c.id == 5) limit = 2.0;
    if (limit > 0.0) {
      char buf[64];
      std::snprintf(buf, sizeof buf, ", %.3f s (limit %.0f s)", c.seconds, limit);
      detail += buf;
      pass = pass && c.seconds < limit;
    }
    lines.push_back({c.id, c.name, pass, detail});
  }

  std::string first, second;
  const int code1 = verify_paper(first);
  const int code2 = verify_paper(second);
  const bool same = !first.empty() && first == second;
  lines.push_back({10, "cli-determinism", code1 == 0 && code2 == 0 && same,
                   "exit codes " + std::to_string(code1) + "/" + std::to_string(code2) + ", " +
                       std::to_string(first.size()) + " bytes, " + (same ? "identical" : "different")});

  bool all = true;
  for (const Line& l : lines) {
    std::printf("%s  %2d  %-20s %s\n", l.pass ? "PASS" : "FAIL", l.id, l.name.c_str(), l.detail.c_str());
    all = all && l.pass;
  }
  std::printf("%s: %zu criteria\n", all ? "ALL PASS" : "FAILURES", lines.size());
  return all ? 0 : 1;
}
