#pragma once

#include <string>
#include <vector>

#include "ermakov/core.hpp"
#include "ermakov/models.hpp"
#include "ermakov/ode.hpp"

namespace ermakov {

struct StepDiagnostics {
  double energy{0};
  double step_size{0};
  double error_estimate{0};
};

/// Accepted steps of a width-equation run.  State vectors hold
/// (sigma), (sigma, sigma'), or (sigma, sigma', sigma'') depending on the variant.
struct Trajectory {
  ModelVariant variant{ModelVariant::Conservative};
  PhysicalParams params{};
  DenseTrajectory dense;
  std::vector<StepDiagnostics> diagnostics;

  std::size_t size() const { return dense.size(); }
  const std::vector<double>& times() const { return dense.times; }
  double time(std::size_t i) const { return dense.times[i]; }
  const Vector& raw_state(std::size_t i) const { return dense.states[i]; }

  /// (sigma, sigma') at node i; for overdamped runs sigma' is the model velocity.
  State state(std::size_t i) const;
};

struct IntegrationResult {
  Trajectory trajectory;
  StopReason stop{StopReason::ReachedEnd};
  SolverStats stats;
  std::vector<std::string> warnings;
};

/// Second-order variants (2-component state).
IntegrationResult integrate(ModelVariant variant, const State& initial, TimeSpan span,
                            const PhysicalParams& params, const IntegratorConfig& config = {});

/// Naive radiative model (3-component state).
IntegrationResult integrate(ModelVariant variant, const State3& initial, TimeSpan span,
                            const PhysicalParams& params, const IntegratorConfig& config = {});

/// First-order overdamped variants.
IntegrationResult integrate_overdamped(ModelVariant variant, double sigma0, TimeSpan span,
                                       const PhysicalParams& params, const IntegratorConfig& config = {});

/// Default third-order start: sigma''(0) = conservative acceleration at sigma(0).
State3 default_radiative_initial(const State& initial, const PhysicalParams& params);

/// Dense-output state at t (within the trajectory span).
State sample(const Trajectory& trajectory, double t);
Vector sample_raw(const Trajectory& trajectory, double t);

/// Resamples onto caller-chosen times; times past the last reached node are dropped.
std::vector<std::pair<double, State>> sample(const Trajectory& trajectory, const std::vector<double>& times);

/// Uniform sample times t0 + i (t1 - t0)/(count - 1), with the end point exact.
std::vector<double> uniform_times(TimeSpan span, std::size_t count);

/// Explicit-scheme advisory for strong friction (b/(m omega0) > 10); empty otherwise.
std::vector<std::string> scheme_warnings(const PhysicalParams& params, const IntegratorConfig& config);

}  // namespace ermakov
