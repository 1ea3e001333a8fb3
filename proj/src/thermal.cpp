#include "ermakov/thermal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "ermakov/detail/mutation.hpp"
#include "ermakov/integrate.hpp"
#include "ermakov/models.hpp"

namespace ermakov::thermal {

BetaGrid::BetaGrid(Vector nodes, double spacing) : nodes_(std::move(nodes)), spacing_(spacing) {}

BetaGrid BetaGrid::with_spacing(double beta_min, double spacing, Eigen::Index count) {
  if (count < kMinNodes) throw std::invalid_argument("BetaGrid: need at least 5 nodes");
  if (!(beta_min > 0.0) || !std::isfinite(beta_min)) throw std::invalid_argument("BetaGrid: beta_min must be > 0");
  if (!(spacing > 0.0) || !std::isfinite(spacing)) throw std::invalid_argument("BetaGrid: spacing must be > 0");
  Vector nodes(count);
  for (Eigen::Index j = 0; j < count; ++j) nodes[j] = beta_min + static_cast<double>(j) * spacing;
  return BetaGrid(std::move(nodes), spacing);
}

BetaGrid BetaGrid::uniform(double beta_min, double beta_max, Eigen::Index count) {
  if (!std::isfinite(beta_max)) throw std::invalid_argument("BetaGrid: beta_max must be finite");
  if (!(beta_max > beta_min)) throw std::invalid_argument("BetaGrid: beta_max must be > beta_min");
  if (count < kMinNodes) throw std::invalid_argument("BetaGrid: need at least 5 nodes");
  BetaGrid grid = with_spacing(beta_min, (beta_max - beta_min) / static_cast<double>(count - 1), count);
  grid.nodes_[count - 1] = beta_max;
  return grid;
}

BetaGrid BetaGrid::slice(Eigen::Index first, Eigen::Index count) const {
  if (count < kMinNodes || first < 0 || first + count > size())
    throw std::invalid_argument("BetaGrid::slice: invalid range");
  return BetaGrid(nodes_.segment(first, count), spacing_);
}

BelowGridClosure BelowGridClosure::fixed(double value) {
  if (!(value >= 0.0) || !std::isfinite(value))
    throw std::invalid_argument("BelowGridClosure: value must be finite and >= 0");
  BelowGridClosure c;
  c.extrapolated_ = false;
  c.value_ = value;
  return c;
}

double coth_below_grid_integral(double beta_min, const PhysicalParams& p) {
  if (!(p.omega0 > 0.0)) throw std::invalid_argument("coth_below_grid_integral: requires omega0 > 0");
  const double w = p.omega0;
  return p.m * w * w * (beta_min - 2.0 / (p.hbar * w) * std::tanh(beta_min * p.hbar * w / 2.0));
}

namespace {

void check_aligned(const ThermalField& field, const BetaGrid& grid) {
  if (grid.size() < BetaGrid::kMinNodes) throw std::invalid_argument("thermal: grid too small (N < 5)");
  if (field.sigma.size() != grid.size() || field.sigma_dot.size() != grid.size())
    throw std::invalid_argument("thermal: field is not aligned with the beta grid");
  for (Eigen::Index j = 0; j < field.sigma.size(); ++j)
    if (!(field.sigma[j] > 0.0)) throw std::domain_error("thermal: sigma must be > 0 at every node");
}

// Unchecked kernels shared by the public operations and the time integrator.
Vector beta_derivative_impl(const Vector& s, double h) {
  const Eigen::Index n = s.size();
  Vector d(n);
  if constexpr (detail::kForwardBetaStencil) {
    for (Eigen::Index j = 0; j + 1 < n; ++j) d[j] = (s[j + 1] - s[j]) / h;
    d[n - 1] = (s[n - 1] - s[n - 2]) / h;
    return d;
  }
  for (Eigen::Index j = 1; j + 1 < n; ++j) d[j] = (s[j + 1] - s[j - 1]) / (2.0 * h);
  // (-3 s0 + 4 s1 - s2) written in differences so constants give exactly 0
  d[0] = (3.0 * (s[1] - s[0]) - (s[2] - s[1])) / (2.0 * h);
  d[n - 1] = (3.0 * (s[n - 1] - s[n - 2]) - (s[n - 2] - s[n - 3])) / (2.0 * h);
  return d;
}

Vector quantum_integral_impl(const Vector& sigma, const BetaGrid& grid, const PhysicalParams& p,
                             const BelowGridClosure& closure) {
  const Eigen::Index n = sigma.size();
  const double coeff = p.hbar * p.hbar / (4.0 * p.m);
  const Vector g = (coeff * sigma.array().pow(-4.0)).matrix();
  double lead;
  if (closure.is_extrapolated()) {
    const double slope = (g[1] - g[0]) / (grid[1] - grid[0]);
    const double g_at_zero = std::max(0.0, g[0] - slope * grid[0]);
    lead = 0.5 * (g_at_zero + g[0]) * grid[0];
  } else {
    lead = closure.value();
  }
  Vector integral(n);
  integral[0] = lead;
  const double h = grid.spacing();
  for (Eigen::Index j = 1; j < n; ++j) integral[j] = integral[j - 1] + 0.5 * h * (g[j - 1] + g[j]);
  return integral;
}

Vector term_derivative_impl(const Vector& sigma, const BetaGrid& grid, const PhysicalParams& p) {
  const Vector ds = beta_derivative_impl(sigma, grid.spacing());
  return (-2.0 / p.m) * (ds.array() / sigma.array().square()).matrix();
}

Vector term_integral_impl(const Vector& sigma, const BetaGrid& grid, const PhysicalParams& p,
                      const BelowGridClosure& closure) {
  const Vector integral = quantum_integral_impl(sigma, grid, p, closure);
  return ((sigma.array().inverse() + sigma.array() * integral.array()) / (p.m * grid.nodes().array())).matrix();
}

Vector acceleration_impl(ThermalVariant variant, const Vector& sigma, const Vector& sigma_dot, const BetaGrid& grid,
                         const PhysicalParams& p, const BelowGridClosure& closure) {
  const Eigen::Index n = sigma.size();
  Vector acc(n);
  if (variant == ThermalVariant::BetaDerivative) {
    const Vector term = term_derivative_impl(sigma, grid, p);
    for (Eigen::Index j = 0; j < n; ++j)
      acc[j] = acceleration_conservative(sigma[j], p) - (p.b / p.m) * sigma_dot[j] + term[j];
  } else {
    const Vector term = term_integral_impl(sigma, grid, p, closure);
    for (Eigen::Index j = 0; j < n; ++j)
      acc[j] = -p.omega0 * p.omega0 * sigma[j] - (p.b / p.m) * sigma_dot[j] + term[j];
  }
  return acc;
}

}  // namespace

Vector beta_derivative(const Vector& values, const BetaGrid& grid) {
  if (values.size() != grid.size()) throw std::invalid_argument("beta_derivative: size mismatch");
  return beta_derivative_impl(values, grid.spacing());
}

Vector quantum_beta_integral(const ThermalField& field, const BetaGrid& grid, const PhysicalParams& params,
                             const BelowGridClosure& closure) {
  check_aligned(field, grid);
  return quantum_integral_impl(field.sigma, grid, params, closure);
}

Vector thermal_term_derivative(const ThermalField& field, const BetaGrid& grid, const PhysicalParams& params) {
  check_aligned(field, grid);
  return term_derivative_impl(field.sigma, grid, params);
}

Vector thermal_term_integral(const ThermalField& field, const BetaGrid& grid, const PhysicalParams& params,
                         const BelowGridClosure& closure) {
  check_aligned(field, grid);
  return term_integral_impl(field.sigma, grid, params, closure);
}

Vector thermal_acceleration(ThermalVariant variant, const ThermalField& field, const BetaGrid& grid,
                            const PhysicalParams& params, const BelowGridClosure& closure) {
  check_aligned(field, grid);
  return acceleration_impl(variant, field.sigma, field.sigma_dot, grid, params, closure);
}

ThermalField equilibrium_profile_coth(const BetaGrid& grid, const PhysicalParams& p) {
  if (!(p.omega0 > 0.0)) throw std::invalid_argument("equilibrium_profile_coth: requires omega0 > 0");
  ThermalField f;
  const double scale = p.hbar / (2.0 * p.m * p.omega0);
  f.sigma = (scale / (grid.nodes().array() * (p.hbar * p.omega0 / 2.0)).tanh()).sqrt().matrix();
  f.sigma_dot = Vector::Zero(grid.size());
  return f;
}

Vector equilibrium_residual(ThermalVariant variant, const ThermalField& field, const BetaGrid& grid,
                            const PhysicalParams& p, const BelowGridClosure& closure) {
  check_aligned(field, grid);
  const auto s = field.sigma.array();
  Eigen::ArrayXd res = p.omega0 * p.omega0 * s + (p.b / p.m) * field.sigma_dot.array();
  if (variant == ThermalVariant::BetaDerivative) {
    res -= term_derivative_impl(field.sigma, grid, p).array();
    res -= p.hbar * p.hbar / (4.0 * p.m * p.m) * s.cube().inverse();
  } else {
    res -= term_integral_impl(field.sigma, grid, p, closure).array();
  }
  return res.matrix();
}

ThermalField ThermalTrajectory::field(std::size_t i) const {
  const Vector& y = dense.states[i];
  const auto n = grid.size();
  return {y.head(n), y.tail(n)};
}

ThermalField ThermalTrajectory::sample(double t) const {
  const Vector y = dense.evaluate(t);
  const auto n = grid.size();
  return {y.head(n), y.tail(n)};
}

ThermalResult integrate_thermal(ThermalVariant variant, const ThermalField& field0, const BetaGrid& grid,
                                TimeSpan span, const PhysicalParams& p, const IntegratorConfig& config,
                                const BelowGridClosure& closure) {
  p.validate();
  config.validate();
  check_aligned(field0, grid);
  if (!(span.t1 > span.t0)) throw std::invalid_argument("integrate_thermal: t1 must be > t0");
  // Temperatures come from the grid nodes; params.beta is not used here.

  const Eigen::Index n = grid.size();
  OdeSystem sys;
  sys.dimension = 2 * n;
  sys.min_sigma = [n](const Vector& y) { return y.head(n).minCoeff(); };
  sys.rhs = [=](double, const Vector& y, Vector& dy) {
    dy.head(n) = y.tail(n);
    dy.tail(n) = acceleration_impl(variant, y.head(n), y.tail(n), grid, p, closure);
  };

  Vector y0(2 * n);
  y0 << field0.sigma, field0.sigma_dot;

  ThermalResult out{ThermalTrajectory{grid, {}}, StopReason::ReachedEnd, {}, scheme_warnings(p, config)};
  OdeResult res = solve(sys, y0, span, config);
  out.stop = res.stop;
  out.stats = res.stats;
  out.trajectory.dense = std::move(res.trajectory);
  return out;
}

}  // namespace ermakov::thermal
