#pragma once

#include <string_view>
#include <vector>

#include "ermakov/core.hpp"
#include "ermakov/ode.hpp"

// Temperature-coupled width equations.  The beta-derivative and
// beta-integral couplings make sigma a field over inverse temperature, so the
// equations are integrated on a uniform beta grid as one coupled system.

namespace ermakov::thermal {

class BetaGrid {
 public:
  static constexpr Eigen::Index kMinNodes = 5;

  /// count nodes from beta_min to beta_max inclusive.
  static BetaGrid uniform(double beta_min, double beta_max, Eigen::Index count);
  /// Nodes beta_min + j * spacing, j = 0..count-1.
  static BetaGrid with_spacing(double beta_min, double spacing, Eigen::Index count);

  /// Contiguous sub-grid; node values and spacing are copied bit-for-bit.
  BetaGrid slice(Eigen::Index first, Eigen::Index count) const;

  const Vector& nodes() const { return nodes_; }
  double operator[](Eigen::Index j) const { return nodes_[j]; }
  Eigen::Index size() const { return nodes_.size(); }
  double spacing() const { return spacing_; }
  double beta_min() const { return nodes_[0]; }
  double beta_max() const { return nodes_[nodes_.size() - 1]; }

 private:
  BetaGrid(Vector nodes, double spacing);
  Vector nodes_;
  double spacing_{0};
};

/// Per-node widths and their time derivatives.
struct ThermalField {
  Vector sigma;
  Vector sigma_dot;

  Eigen::Index size() const { return sigma.size(); }
};

enum class ThermalVariant {
  BetaDerivative,  // 2 d/dbeta (1/sigma) at constant b, plus the quantum term
  BetaIntegral,    // [1/sigma + sigma int_0^beta hbar^2/(4 m sigma^4) dbeta] / beta
};

constexpr std::string_view to_string(ThermalVariant v) {
  return v == ThermalVariant::BetaDerivative ? "beta_derivative" : "beta_integral";
}

/// Contribution of the unresolved interval [0, beta_min] to the beta-integral.
class BelowGridClosure {
 public:
  /// Trapezoid panel with the integrand linearly extrapolated to beta = 0
  /// from the first two nodes and clipped at zero.  Default.
  static BelowGridClosure linear_extrapolation() { return {}; }
  /// Caller-supplied value of int_0^beta_min hbar^2/(4 m sigma^4) dbeta.
  static BelowGridClosure fixed(double value);

  bool is_extrapolated() const { return extrapolated_; }
  double value() const { return value_; }

 private:
  bool extrapolated_{true};
  double value_{0};
};

/// Exact below-grid integral for the coth equilibrium profile:
/// m w^2 [beta_min - (2/(hbar w)) tanh(beta_min hbar w / 2)].
double coth_below_grid_integral(double beta_min, const PhysicalParams& params);

/// Second-order d/dbeta: central differences inside, one-sided three-point at the edges.
Vector beta_derivative(const Vector& values, const BetaGrid& grid);

/// I_j = int_0^beta_j hbar^2/(4 m sigma^4) dbeta by the composite trapezoid
/// rule on the grid plus the below-grid closure.
Vector quantum_beta_integral(const ThermalField& field, const BetaGrid& grid, const PhysicalParams& params,
                             const BelowGridClosure& closure = {});

/// (2/m) d/dbeta (1/sigma), evaluated as -(2/(m sigma^2)) d sigma/dbeta.
Vector thermal_term_derivative(const ThermalField& field, const BetaGrid& grid, const PhysicalParams& params);

/// [1/sigma_j + sigma_j I_j] / (m beta_j).
Vector thermal_term_integral(const ThermalField& field, const BetaGrid& grid, const PhysicalParams& params,
                         const BelowGridClosure& closure = {});

/// Width accelerations of every node: -(b/m) sigma' - w^2 sigma + thermal term
/// (+ hbar^2/(4 m^2 sigma^3) for the beta-derivative variant).
Vector thermal_acceleration(ThermalVariant variant, const ThermalField& field, const BetaGrid& grid,
                            const PhysicalParams& params, const BelowGridClosure& closure = {});

/// sigma_j = sqrt((hbar/(2 m w)) coth(beta_j hbar w / 2)), sigma' = 0.
ThermalField equilibrium_profile_coth(const BetaGrid& grid, const PhysicalParams& params);

/// w^2 sigma_j + (b/m) sigma'_j - thermal term_j (- quantum term for the
/// beta-derivative variant); vanishes on the continuum coth profile.
Vector equilibrium_residual(ThermalVariant variant, const ThermalField& field, const BetaGrid& grid,
                            const PhysicalParams& params, const BelowGridClosure& closure = {});

struct ThermalTrajectory {
  BetaGrid grid;
  DenseTrajectory dense;  // state layout: sigma_0..sigma_{N-1}, sigma'_0..sigma'_{N-1}

  std::size_t size() const { return dense.size(); }
  double time(std::size_t i) const { return dense.times[i]; }
  ThermalField field(std::size_t i) const;
  ThermalField sample(double t) const;
};

struct ThermalResult {
  ThermalTrajectory trajectory;
  StopReason stop{StopReason::ReachedEnd};
  SolverStats stats;
  std::vector<std::string> warnings;
};

/// Joint integration of the 2N-dimensional system.  Any node reaching the
/// sigma guard stops the whole run.
ThermalResult integrate_thermal(ThermalVariant variant, const ThermalField& field0, const BetaGrid& grid,
                                TimeSpan span, const PhysicalParams& params, const IntegratorConfig& config = {},
                                const BelowGridClosure& closure = {});

}  // namespace ermakov::thermal
