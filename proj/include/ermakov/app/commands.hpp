#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ermakov/app/config.hpp"
#include "ermakov/app/csv.hpp"

namespace ermakov::app {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitIntegration = 2, kExitVerify = 3 };

struct RunOutput {
  Table table;
  StopReason stop{StopReason::ReachedEnd};
  SolverStats stats;
  std::vector<std::string> warnings;
  double reached_time{0};
};

/// Width trajectory resampled on uniform times: t,sigma,sigma_dot,energy.
RunOutput simulate(const RunConfig& config);

/// Thermal field in long format: t,beta,sigma,sigma_dot.
RunOutput simulate_thermal(const RunConfig& config);

struct SweepOutput {
  Table table;
  std::vector<StopReason> stops;  // one per parameter point, grid order
};

/// Long-format sweep over at most two axes, swept columns first.  Points run
/// concurrently; rows come out in lexicographic grid order, then time.
SweepOutput sweep(const RunConfig& config, unsigned jobs = 1);

/// Closed-form equilibria for the configured parameters.
nlohmann::json equilibrium_report(const PhysicalParams& params);

nlohmann::json run_summary(const std::string& command, const RunConfig& config, const RunOutput& output);

/// Command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ermakov::app
