#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "ermakov/core.hpp"
#include "ermakov/models.hpp"
#include "ermakov/ode.hpp"
#include "ermakov/thermal.hpp"

// Run configuration: one JSON document per run.  The schema is documented in
// docs/config.md.  Every key is checked; unknown keys are errors.

namespace ermakov::app {

/// Invalid configuration.  key() is the dotted path of the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class ProfileKind { Coth, ScaledCoth, Constant, File };

struct ThermalSettings {
  thermal::ThermalVariant variant{thermal::ThermalVariant::BetaIntegral};
  double beta_min{0.5};
  double beta_max{4.0};
  Eigen::Index beta_count{36};
  ProfileKind profile{ProfileKind::Coth};
  double profile_factor{1.0};  // scaled_coth
  double profile_value{1.0};   // constant
  std::filesystem::path profile_path;
  bool exact_coth_closure{false};  // false: linear extrapolation below the grid
};

/// Parameters accepted by sweeps; natural-unit names act on the explicit fields.
struct SweepAxis {
  std::string name;
  std::vector<double> values;
};

enum class SweepQuantity { Trajectory, Equilibrium };

struct SweepSettings {
  std::vector<SweepAxis> axes;  // at most two
  SweepQuantity quantity{SweepQuantity::Trajectory};
};

struct OutputSettings {
  std::string csv{"trajectory.csv"};
  std::optional<std::string> svg;
  std::string summary{"summary.json"};
};

struct RunConfig {
  std::optional<ModelVariant> model;
  PhysicalParams params;
  State initial{1.0, 0.0};
  std::optional<double> sigma_ddot;         // absolute start for radiative_naive
  double sigma_ddot_offset{0};              // added to the default start
  TimeSpan span{0.0, 10.0};
  IntegratorConfig integrator;
  std::size_t samples{201};
  OutputSettings output;
  std::optional<ThermalSettings> thermal;
  std::optional<SweepSettings> sweep;
  std::filesystem::path base_dir;  // relative file references resolve here
};

RunConfig parse_config(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Applies a sweep coordinate to a copy of the config.  Throws ConfigError
/// for unknown names or invalid values.
RunConfig with_parameter(const RunConfig& config, const std::string& name, double value);

/// Names accepted by sweeps and with_parameter.
const std::vector<std::string>& sweepable_parameters();

/// Initial field of a thermal run on its grid.
thermal::ThermalField initial_profile(const ThermalSettings& settings, const thermal::BetaGrid& grid,
                                      const PhysicalParams& params, const std::filesystem::path& base_dir);

thermal::BelowGridClosure closure_for(const ThermalSettings& settings, const PhysicalParams& params);

}  // namespace ermakov::app
