#pragma once

#include <array>
#include <optional>
#include <ostream>
#include <string>

namespace killing::cli {

enum class Format { Json, Csv };

/// Parsed command line. Exactly one metric spec is allowed.
struct RunConfig {
  std::string subcommand;  // info, check-surface, hopf check, hopf example, verify-paper

  std::optional<std::array<double, 2>> bcv;  // (c, mu)
  std::optional<std::string> lambda, a, b;
  std::optional<std::array<double, 4>> domain;

  std::optional<std::string> surface;  // "X;Y;Z" in (u, v)
  std::optional<std::string> graph;    // height in (x, y)
  std::optional<std::array<double, 4>> params;
  bool flip = false;

  std::optional<std::string> curve;  // "x;y" in s
  std::optional<double> circle;
  std::optional<double> circle_kg;
  std::optional<std::string> f;
  double r = 0.0;
  std::optional<std::array<double, 2>> interval;
  int samples = 64;

  std::optional<std::array<double, 2>> at;
  std::array<int, 2> grid{4, 4};
  bool grid_given = false;
  std::optional<double> tol;
  Format format = Format::Json;
  std::optional<std::string> out;
  std::optional<std::string> expect;  // pass | fail
  std::string only;
};

/// Exit codes.
inline constexpr int kPass = 0;
inline constexpr int kCheckFailure = 1;
inline constexpr int kUsageError = 2;

/// Runs the command line; output goes to `out` unless --out is given.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace killing::cli
