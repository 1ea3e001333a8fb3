#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace ermakov {

using Vector = Eigen::VectorXd;

enum class Scheme {
  ExplicitAdaptive,  // Dormand-Prince 5(4), PI step control, quartic dense output
  ImplicitAStable,   // TR-BDF2 (L-stable, order 2, embedded order 3), cubic Hermite dense output
};

enum class StopReason { ReachedEnd, SigmaGuardHit, StepUnderflow, RunawayDetected, MaxSteps };

constexpr std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::ReachedEnd: return "ReachedEnd";
    case StopReason::SigmaGuardHit: return "SigmaGuardHit";
    case StopReason::StepUnderflow: return "StepUnderflow";
    case StopReason::RunawayDetected: return "RunawayDetected";
    case StopReason::MaxSteps: return "MaxSteps";
  }
  return "unknown";
}

constexpr std::string_view to_string(Scheme s) {
  return s == Scheme::ExplicitAdaptive ? "explicit" : "implicit";
}

struct IntegratorConfig {
  double rel_tol{1e-9};
  double abs_tol{1e-12};
  double h_init{1e-4};
  double h_min{1e-14};
  double h_max{std::numeric_limits<double>::infinity()};
  std::size_t max_steps{2'000'000};
  double sigma_min_guard{1e-12};
  double runaway_ratio{1e6};
  Scheme scheme{Scheme::ExplicitAdaptive};

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

struct TimeSpan {
  double t0{0};
  double t1{1};
};

/// y' = f(t, y) together with the positivity information the guards need.
struct OdeSystem {
  Eigen::Index dimension{0};
  std::function<void(double t, const Vector& y, Vector& dydt)> rhs;
  /// Smallest width contained in y; the step is rejected when it drops to the guard.
  std::function<double(const Vector& y)> min_sigma;
  /// Optional analytic Jacobian for the implicit scheme; finite differences otherwise.
  std::function<void(double t, const Vector& y, Eigen::MatrixXd& jac)> jacobian;
};

/// Interpolant over one accepted step [t, t + h].
struct DenseSegment {
  Scheme scheme{Scheme::ExplicitAdaptive};
  double t{0};
  double h{0};
  Eigen::MatrixXd coeffs;  // columns: Dormand-Prince rcont1..5, or Hermite y0, y1, h*f0, h*f1

  Vector evaluate(double time) const;
};

/// Accepted steps of one run, with the scheme's own interpolant per step.
struct DenseTrajectory {
  std::vector<double> times;
  std::vector<Vector> states;
  std::vector<double> step_sizes;       // step that produced the node (0 for the initial node)
  std::vector<double> error_estimates;  // scaled local error norm of that step
  std::vector<DenseSegment> segments;   // segments[i] spans [times[i], times[i+1]]

  std::size_t size() const { return times.size(); }
  double front_time() const { return times.front(); }
  double back_time() const { return times.back(); }

  /// Dense-output value at t; stored nodes are returned exactly.
  Vector evaluate(double t) const;
};

struct SolverStats {
  std::size_t accepted{0};
  std::size_t rejected{0};
  std::size_t rhs_evaluations{0};
  std::size_t jacobian_evaluations{0};
  std::size_t newton_failures{0};
};

/// Called after every accepted step; returning a reason stops the run.
using StepMonitor = std::function<std::optional<StopReason>(double t, const Vector& y, const Vector& dydt)>;

struct OdeResult {
  DenseTrajectory trajectory;
  StopReason stop{StopReason::ReachedEnd};
  SolverStats stats;
};

/// Adaptive integration of an OdeSystem over span with the configured scheme.
OdeResult solve(const OdeSystem& system, const Vector& y0, TimeSpan span, const IntegratorConfig& config,
                const StepMonitor& monitor = {});

}  // namespace ermakov
