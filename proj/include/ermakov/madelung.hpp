#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "ermakov/core.hpp"
#include "ermakov/models.hpp"
#include "ermakov/thermal.hpp"

// Gaussian-ansatz checks of the Madelung hydrodynamic equations.  Every term
// of the continuity and force-balance equations is evaluated separately from
// its analytic spatial derivative, so the residuals test the reduction to the
// width equations rather than restating it.

namespace ermakov::madelung {

template <class Scalar>
using Array = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

/// Uniform grid symmetric about x = 0.
template <class Scalar>
class BasicSpatialGrid {
 public:
  static constexpr Eigen::Index kMinNodes = 64;

  static BasicSpatialGrid symmetric(Scalar half_width, Eigen::Index count) {
    if (count < kMinNodes) throw std::invalid_argument("SpatialGrid: need at least 64 nodes");
    if (!(half_width > Scalar(0))) throw std::invalid_argument("SpatialGrid: half_width must be > 0");
    BasicSpatialGrid g;
    g.spacing_ = Scalar(2) * half_width / Scalar(count - 1);
    g.x_.resize(count);
    for (Eigen::Index i = 0; i < count; ++i) g.x_[i] = -half_width + g.spacing_ * Scalar(i);
    // exact mirror symmetry
    for (Eigen::Index i = 0; i < count / 2; ++i) g.x_[count - 1 - i] = -g.x_[i];
    if (count % 2 == 1) g.x_[count / 2] = Scalar(0);
    return g;
  }

  /// Half-width expressed in units of sigma (default 6 sigma).
  static BasicSpatialGrid for_sigma(Scalar sigma, Eigen::Index count = 257, Scalar widths = Scalar(6)) {
    return symmetric(widths * sigma, count);
  }

  const Array<Scalar>& x() const { return x_; }
  Scalar spacing() const { return spacing_; }
  Eigen::Index size() const { return x_.size(); }
  Scalar half_width() const { return x_[x_.size() - 1]; }

 private:
  Array<Scalar> x_;
  Scalar spacing_{0};
};

using SpatialGrid = BasicSpatialGrid<double>;

template <class Scalar>
struct BasicGaussianSnapshot {
  Scalar sigma{1};
  Scalar sigma_dot{0};
  Scalar t{0};
};

using GaussianSnapshot = BasicGaussianSnapshot<double>;

template <class Scalar>
Array<Scalar> gaussian_density(const Array<Scalar>& x, Scalar sigma) {
  using std::sqrt;
  if (!(sigma > Scalar(0))) throw std::domain_error("gaussian_density: sigma must be > 0");
  const Scalar norm = Scalar(1) / (sqrt(Scalar(2) * std::numbers::pi_v<Scalar>) * sigma);
  return norm * (-x.square() / (Scalar(2) * sigma * sigma)).exp();
}

template <class Scalar>
Scalar gaussian_density(Scalar x, Scalar sigma) {
  Array<Scalar> a(1);
  a[0] = x;
  return gaussian_density(a, sigma)[0];
}

/// V = x sigma'/sigma.
template <class Scalar>
Array<Scalar> velocity_field(const Array<Scalar>& x, const BasicGaussianSnapshot<Scalar>& snap) {
  if (!(snap.sigma > Scalar(0))) throw std::domain_error("velocity_field: sigma must be > 0");
  return x * (snap.sigma_dot / snap.sigma);
}

/// Bohm potential of the Gaussian, Q = hbar^2/(4 m s^2) - hbar^2 x^2/(8 m s^4).
template <class Scalar>
Array<Scalar> quantum_potential(const Array<Scalar>& x, Scalar sigma, const BasicPhysicalParams<Scalar>& p) {
  if (!(sigma > Scalar(0))) throw std::domain_error("quantum_potential: sigma must be > 0");
  const Scalar h2m = p.hbar * p.hbar / p.m;
  const Scalar s2 = sigma * sigma;
  return h2m / (Scalar(4) * s2) - h2m * x.square() / (Scalar(8) * s2 * s2);
}

template <class Scalar>
struct NumericPotential {
  Array<Scalar> values;
  Eigen::Array<bool, Eigen::Dynamic, 1> one_sided;  // true where an edge stencil was used
};

/// Q = -hbar^2/(2m) (d^2 sqrt(rho)/dx^2)/sqrt(rho) with second-order central
/// differences, and second-order one-sided four-point stencils at the two edges.
template <class Scalar>
NumericPotential<Scalar> quantum_potential_numeric(const BasicSpatialGrid<Scalar>& grid, Scalar sigma,
                                                   const BasicPhysicalParams<Scalar>& p) {
  const Array<Scalar> amp = gaussian_density(grid.x(), sigma).sqrt();
  const Eigen::Index n = grid.size();
  const Scalar h2 = grid.spacing() * grid.spacing();
  Array<Scalar> d2(n);
  for (Eigen::Index i = 1; i + 1 < n; ++i) d2[i] = (amp[i + 1] - Scalar(2) * amp[i] + amp[i - 1]) / h2;
  d2[0] = (Scalar(2) * amp[0] - Scalar(5) * amp[1] + Scalar(4) * amp[2] - amp[3]) / h2;
  d2[n - 1] = (Scalar(2) * amp[n - 1] - Scalar(5) * amp[n - 2] + Scalar(4) * amp[n - 3] - amp[n - 4]) / h2;
  NumericPotential<Scalar> out;
  out.values = -(p.hbar * p.hbar / (Scalar(2) * p.m)) * d2 / amp;
  out.one_sided = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(n, false);
  out.one_sided[0] = out.one_sided[n - 1] = true;
  return out;
}

/// -dQ/dx = hbar^2 x/(4 m s^4).
template <class Scalar>
Array<Scalar> quantum_force(const Array<Scalar>& x, Scalar sigma, const BasicPhysicalParams<Scalar>& p) {
  if (!(sigma > Scalar(0))) throw std::domain_error("quantum_force: sigma must be > 0");
  const Scalar s2 = sigma * sigma;
  return p.hbar * p.hbar * x / (Scalar(4) * p.m * s2 * s2);
}

/// max |d rho/dt + d(rho V)/dx| for an arbitrary velocity field V with
/// gradient dV/dx, rho the Gaussian and d rho/dt taken through sigma'.
template <class Scalar>
Scalar continuity_residual(const BasicSpatialGrid<Scalar>& grid, const BasicGaussianSnapshot<Scalar>& snap,
                           const Array<Scalar>& velocity, const Array<Scalar>& velocity_gradient) {
  const auto& x = grid.x();
  const Scalar s = snap.sigma;
  const Array<Scalar> rho = gaussian_density(x, s);
  const Array<Scalar> drho_dsigma = rho * (x.square() / (s * s * s) - Scalar(1) / s);
  const Array<Scalar> drho_dt = drho_dsigma * snap.sigma_dot;
  const Array<Scalar> drho_dx = -rho * x / (s * s);
  const Array<Scalar> flux_divergence = drho_dx * velocity + rho * velocity_gradient;
  return (drho_dt + flux_divergence).abs().maxCoeff();
}

template <class Scalar>
Scalar continuity_residual(const BasicSpatialGrid<Scalar>& grid, const BasicGaussianSnapshot<Scalar>& snap) {
  const Array<Scalar> v = velocity_field(grid.x(), snap);
  const Array<Scalar> dv = Array<Scalar>::Constant(grid.size(), snap.sigma_dot / snap.sigma);
  return continuity_residual(grid, snap, v, dv);
}

/// Per-node m dV/dt + m V dV/dx + b V + m w^2 x + dQ/dx for the Gaussian with
/// width derivatives (sigma, sigma', sigma'').  Conservative ignores b.
template <class Scalar>
Array<Scalar> force_balance_profile(const BasicSpatialGrid<Scalar>& grid, const BasicGaussianSnapshot<Scalar>& snap,
                                    Scalar sigma_ddot, ModelVariant variant, const BasicPhysicalParams<Scalar>& p) {
  if (variant != ModelVariant::Conservative && variant != ModelVariant::Dissipative)
    throw std::invalid_argument("force_balance: variant must be conservative or dissipative");
  const auto& x = grid.x();
  const Scalar s = snap.sigma;
  const Scalar sd = snap.sigma_dot;
  const Array<Scalar> v = velocity_field(x, snap);
  const Array<Scalar> dv_dt = x * (sigma_ddot / s - sd * sd / (s * s));
  const Scalar dv_dx = sd / s;
  const Scalar friction = variant == ModelVariant::Dissipative ? p.b : Scalar(0);
  const Array<Scalar> dq_dx = -quantum_force(x, s, p);
  return p.m * dv_dt + p.m * v * dv_dx + friction * v + p.m * p.omega0 * p.omega0 * x + dq_dx;
}

template <class Scalar>
Scalar force_balance_residual(const BasicSpatialGrid<Scalar>& grid, const BasicGaussianSnapshot<Scalar>& snap,
                              Scalar sigma_ddot, ModelVariant variant, const BasicPhysicalParams<Scalar>& p) {
  return force_balance_profile(grid, snap, sigma_ddot, variant, p).abs().maxCoeff();
}

/// Left side of the thermo-quantum force balance minus its right side
/// -d/dx(ln rho + int_0^beta Q dbeta)/beta = x [1/s^2 + I]/beta, where
/// I = int_0^beta hbar^2/(4 m s^4) dbeta is supplied (the beta-grid quadrature).
template <class Scalar>
Array<Scalar> force_balance_profile_thermal(const BasicSpatialGrid<Scalar>& grid,
                                            const BasicGaussianSnapshot<Scalar>& snap, Scalar sigma_ddot,
                                            Scalar beta, Scalar quantum_integral,
                                            const BasicPhysicalParams<Scalar>& p) {
  if (!(beta > Scalar(0))) throw std::domain_error("force_balance_thermal: beta must be > 0");
  const auto& x = grid.x();
  const Scalar s = snap.sigma;
  const Scalar sd = snap.sigma_dot;
  const Array<Scalar> v = velocity_field(x, snap);
  const Array<Scalar> dv_dt = x * (sigma_ddot / s - sd * sd / (s * s));
  const Array<Scalar> lhs = p.m * dv_dt + p.m * v * (sd / s) + p.b * v + p.m * p.omega0 * p.omega0 * x;
  // -d/dx ln rho = x/s^2 ; -d/dx int Q dbeta = x I
  const Array<Scalar> entropic = x / (s * s);
  const Array<Scalar> quantum = x * quantum_integral;
  return lhs - (entropic + quantum) / beta;
}

/// Thermo-quantum force balance at one node of a beta grid; the integral
/// comes from the same quadrature as thermal_term_integral.
inline double force_balance_residual_thermal(const SpatialGrid& grid, const GaussianSnapshot& snap,
                                             double sigma_ddot, const thermal::ThermalField& field,
                                             const thermal::BetaGrid& beta_grid, Eigen::Index beta_index,
                                             const PhysicalParams& p,
                                             const thermal::BelowGridClosure& closure = {}) {
  if (beta_index < 0 || beta_index >= beta_grid.size())
    throw std::out_of_range("force_balance_residual_thermal: beta_index out of range");
  const Vector integral = thermal::quantum_beta_integral(field, beta_grid, p, closure);
  return force_balance_profile_thermal(grid, snap, sigma_ddot, beta_grid[beta_index], integral[beta_index], p)
      .abs()
      .maxCoeff();
}

}  // namespace ermakov::madelung
