#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace ermakov::app {

struct CheckResult {
  std::string suite;
  std::string name;
  bool passed{false};
  bool informational{false};  // measured and reported, never gating
  double measured{0};
  double tolerance{0};
  std::string comparison{"<="};  // how measured relates to tolerance when passing
  std::string detail;
};

struct VerifyOptions {
  std::optional<double> rel_tol;  // replaces every check's integrator tolerance
  unsigned jobs{1};
};

/// Suite names in report order.
const std::vector<std::string>& suite_names();

/// Runs one suite, or every suite for "all".  Throws std::invalid_argument
/// for an unknown name.
std::vector<CheckResult> run_verification(const std::string& suite, const VerifyOptions& options = {});

bool all_passed(const std::vector<CheckResult>& results);
nlohmann::json report_json(const std::string& suite, const std::vector<CheckResult>& results);

}  // namespace ermakov::app
