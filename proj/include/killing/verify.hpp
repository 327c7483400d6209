#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace killing {

enum class CheckStatus { Pass, Fail, Skipped };

std::string status_name(CheckStatus s);

/// How a residual is compared with its tolerance.
enum class Comparison {
  AtMost,   // pass iff residual <= tol
  AtLeast,  // pass iff residual >= tol
  Flag,     // residual is 0 when the condition holds, 1 otherwise; tol is 0
};

struct CheckReport {
  std::string check;
  CheckStatus status = CheckStatus::Skipped;
  double residual = 0.0;
  double tol = 0.0;
  Comparison comparison = Comparison::AtMost;
  /// (s or u, v) of the worst residual, when it has one.
  std::optional<std::array<double, 2>> location;
  std::string note;
};

/// Status follows from residual, tolerance and comparison; NaN residuals fail.
CheckReport make_check(std::string name, double residual, double tol, Comparison cmp = Comparison::AtMost,
                       std::optional<std::array<double, 2>> location = std::nullopt, std::string note = {});
CheckReport flag_check(std::string name, bool holds, std::string note = {});
CheckReport skipped_check(std::string name, std::string note, double tol = 0.0);

struct CriterionReport {
  int id = 0;
  std::string name;
  std::vector<CheckReport> checks;
  /// Wall time; not part of any serialised output.
  double seconds = 0.0;

  bool pass() const;
};

struct SuiteOptions {
  /// Replaces every AtMost tolerance when set.
  std::optional<double> tol;
  /// Runs only criteria whose name contains this text.
  std::string only;
};

/// Names of the built-in criteria, in order.
std::vector<std::string> suite_criteria();

/// The built-in verification suite. Deterministic: fixed seeds, fixed sample sets.
std::vector<CriterionReport> run_suite(const SuiteOptions& o = {});

}  // namespace killing
