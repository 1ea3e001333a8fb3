#include "ermakov/app/verify.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "ermakov/analytic.hpp"
#include "ermakov/app/csv.hpp"
#include "ermakov/app/parallel.hpp"
#include "ermakov/integrate.hpp"
#include "ermakov/madelung.hpp"
#include "ermakov/thermal.hpp"

namespace ermakov::app {

namespace {

using thermal::BelowGridClosure;
using thermal::BetaGrid;
using thermal::ThermalField;
using thermal::ThermalVariant;

constexpr double kPi = std::numbers::pi;

// decay rate of E - hbar w/2 for the reduced radiative model at epsilon = 0.01
// from (2 sigma_g, 0); regression value, close to 4 epsilon
constexpr double kRadiativeDecayRate = 0.0400336;

double rel_err(double value, double expected) { return std::abs(value - expected) / std::abs(expected); }

std::vector<std::pair<double, State>> sampled(const Trajectory& trajectory, const std::vector<double>& times) {
  std::vector<std::pair<double, State>> out;
  for (double t : times) out.emplace_back(t, sample(trajectory, t));
  return out;
}

struct Context {
  VerifyOptions options;

  IntegratorConfig config(double rel = 1e-9, double abs = 1e-12, Scheme scheme = Scheme::ExplicitAdaptive) const {
    IntegratorConfig c;
    c.scheme = scheme;
    c.rel_tol = options.rel_tol.value_or(rel);
    c.abs_tol = options.rel_tol ? *options.rel_tol * 1e-3 : abs;
    c.max_steps = 50'000;
    return c;
  }

  IntegratorConfig thermal_config() const {
    IntegratorConfig c = config();
    c.max_steps = 20'000;
    return c;
  }
};

using Checks = std::vector<CheckResult>;

struct Task {
  std::string suite;
  std::function<Checks(const Context&)> run;
};

CheckResult at_most(const std::string& suite, const std::string& name, double measured, double tolerance,
                    std::string detail = {}) {
  return {suite, name, measured <= tolerance, false, measured, tolerance, "<=", std::move(detail)};
}

CheckResult at_least(const std::string& suite, const std::string& name, double measured, double tolerance,
                     std::string detail = {}) {
  return {suite, name, measured >= tolerance, false, measured, tolerance, ">=", std::move(detail)};
}

CheckResult within(const std::string& suite, const std::string& name, double measured, double lo, double hi,
                   std::string detail = {}) {
  std::ostringstream range;
  range << "in [" << lo << ", " << hi << "]";
  if (!detail.empty()) range << "; " << detail;
  return {suite, name, measured >= lo && measured <= hi, false, measured, hi, "in", range.str()};
}

CheckResult info(const std::string& suite, const std::string& name, double measured, std::string detail) {
  return {suite, name, true, true, measured, 0, "=", std::move(detail)};
}

// natural-unit initial conditions sigma0 in [0.1, 10], sigma_dot0 in [-2, 2]
std::vector<State> random_initial_conditions(unsigned seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> s(0.1, 10.0), v(-2.0, 2.0);
  std::vector<State> out;
  for (int i = 0; i < count; ++i) {
    const double a = s(rng);
    out.push_back({a, v(rng)});
  }
  return out;
}

// ---- free particle -------------------------------------------------------

Checks free_particle(const Context& ctx) {
  PhysicalParams p;
  p.omega0 = 0;
  const auto r = integrate(ModelVariant::Conservative, State{1.0, 0.0}, {0, 10}, p, ctx.config());
  double worst = 0;
  auto expected = [](double t) { return 1 + (t / 2) * (t / 2); };
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
    const double s = r.trajectory.state(i).sigma;
    worst = std::max(worst, rel_err(s * s, expected(r.trajectory.time(i))));
  }
  for (const auto& [t, s] : sampled(r.trajectory, uniform_times({0, 10}, 1001)))
    worst = std::max(worst, rel_err(s.sigma * s.sigma, expected(t)));
  if (r.stop != StopReason::ReachedEnd) worst = INFINITY;
  return {at_most("free-particle", "sigma2_max_rel_error", worst, 1e-8, "sigma^2 = 1 + (t/2)^2 on [0, 10]")};
}

// ---- pinney ---------------------------------------------------------------

Checks pinney_integrator(const Context& ctx) {
  const PhysicalParams p;
  double worst = 0;
  for (const State& s0 : random_initial_conditions(2, 20)) {
    const auto r = integrate(ModelVariant::Conservative, s0, {0, 20 * kPi}, p, ctx.config(1e-11, 1e-14));
    if (r.stop != StopReason::ReachedEnd) return {at_most("pinney", "integrator_vs_closed_form", INFINITY, 1e-8)};
    for (std::size_t i = 0; i < r.trajectory.size(); ++i)
      worst = std::max(worst, rel_err(r.trajectory.state(i).sigma,
                                      analytic::pinney_solution(r.trajectory.time(i), s0.sigma, s0.sigma_dot, p).sigma));
  }
  return {at_most("pinney", "integrator_vs_closed_form", worst, 1e-8, "20 random starts, 10 periods")};
}

Checks pinney_residual(const Context&) {
  const PhysicalParams p;
  double worst = 0;
  for (const State& s0 : random_initial_conditions(3, 20)) {
    for (int k = 0; k < 1000; ++k) {
      const double t = 20 * kPi * k / 999.0;
      const State s = analytic::pinney_solution(t, s0.sigma, s0.sigma_dot, p);
      const double a = analytic::pinney_acceleration(t, s0.sigma, s0.sigma_dot, p);
      const double scale = p.m * p.omega0 * p.omega0 * s.sigma + p.hbar * p.hbar / (4 * p.m * std::pow(s.sigma, 3));
      worst = std::max(worst, std::abs(residual(ModelVariant::Conservative, s, a, p)) / scale);
    }
  }
  return {at_most("pinney", "closed_form_residual", worst, 1e-10, "relative to the force terms, 20 x 1000 samples")};
}

// ---- energy ---------------------------------------------------------------

Checks energy_conservative(const Context& ctx) {
  const PhysicalParams p;
  double worst = 0;
  for (const State& s0 : random_initial_conditions(4, 20)) {
    const auto r = integrate(ModelVariant::Conservative, s0, {0, 20 * kPi}, p, ctx.config(1e-11, 1e-14));
    if (r.stop != StopReason::ReachedEnd) return {at_most("energy", "conservative_drift", INFINITY, 1e-8)};
    const double e0 = energy(s0, p);
    for (const auto& d : r.trajectory.diagnostics) worst = std::max(worst, std::abs(d.energy - e0) / e0);
  }
  return {at_most("energy", "conservative_drift", worst, 1e-8, "20 random starts, 10 periods")};
}

Checks energy_dissipative(const Context& ctx) {
  double worst = 0;
  for (double gamma : {0.1, 0.5, 2.0}) {
    const PhysicalParams p = make_natural_params(gamma, 0, 0);
    const double t1 = 10;
    const auto r = integrate(ModelVariant::Dissipative, State{2.0, 0.5}, {0, t1}, p, ctx.config());
    if (r.stop != StopReason::ReachedEnd) return {at_most("energy", "dissipative_work_balance", INFINITY, 1e-6)};
    // composite Simpson of b sigma'^2 on the dense output
    const int n = 20000;
    const double h = t1 / n;
    double work = 0;
    for (int k = 0; k <= n; ++k) {
      const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
      const double v = sample(r.trajectory, std::min(k * h, t1)).sigma_dot;
      work += w * p.b * v * v;
    }
    work *= h / 3;
    const double e0 = r.trajectory.diagnostics.front().energy, e1 = r.trajectory.diagnostics.back().energy;
    worst = std::max(worst, std::abs((e1 - e0) + work) / e0);
  }
  return {at_most("energy", "dissipative_work_balance", worst, 1e-6, "|dE + int b v^2 dt| / E0, gamma in {0.1, 0.5, 2}")};
}

// ---- overdamped -----------------------------------------------------------

Checks overdamped_formula(const Context& ctx) {
  const PhysicalParams p = make_natural_params(10, 0, 0);
  const double t0 = 0.05, t1 = 3;
  const auto r = integrate_overdamped(ModelVariant::OverdampedDissipative, analytic::overdamped_relaxation(t0, p),
                                      {t0, t1}, p, ctx.config());
  double worst = r.stop == StopReason::ReachedEnd ? 0 : INFINITY;
  auto gap = [&](double t, double s) {
    const double e = analytic::overdamped_relaxation(t, p);
    return rel_err(s * s, e * e);
  };
  for (std::size_t i = 0; i < r.trajectory.size(); ++i)
    worst = std::max(worst, gap(r.trajectory.time(i), r.trajectory.state(i).sigma));
  for (const auto& [t, s] : sampled(r.trajectory, uniform_times({t0, t1}, 301))) worst = std::max(worst, gap(t, s.sigma));
  return {at_most("overdamped", "overdamped_vs_formula", worst, 1e-6, "b = 10, t in [0.05, 3], sigma^2")};
}

Checks overdamped_inertial(const Context& ctx) {
  const PhysicalParams p = make_natural_params(100, 0, 0);
  const double t0 = 0.05, t1 = 3;
  const State start = analytic::overdamped_relaxation_state(t0, p);
  const auto r = integrate(ModelVariant::Dissipative, start, {t0, t1}, p,
                           ctx.config(1e-9, 1e-12, Scheme::ImplicitAStable));
  double worst = r.stop == StopReason::ReachedEnd ? 0 : INFINITY;
  for (const auto& [t, s] : sampled(r.trajectory, uniform_times({t0, t1}, 301))) {
    const double e = analytic::overdamped_relaxation(t, p);
    worst = std::max(worst, rel_err(s.sigma * s.sigma, e * e));
  }
  return {at_most("overdamped", "full_equation_b100_vs_formula", worst, 1e-3,
                  "implicit scheme, inertia retained; gap scales as 1/b")};
}

// ---- subdiffusion ---------------------------------------------------------

Checks subdiffusion(const Context& ctx) {
  PhysicalParams p = make_natural_params(10, 0, 0);
  p.omega0 = 0;
  const double t0 = 0.1, t1 = 10;
  const auto r =
      integrate_overdamped(ModelVariant::OverdampedDissipative, analytic::subdiffusion(t0, p), {t0, t1}, p, ctx.config());
  double worst = r.stop == StopReason::ReachedEnd ? 0 : INFINITY;
  auto gap = [&](double t, double s) { return rel_err(s * s, p.hbar * std::sqrt(t / (p.m * p.b))); };
  for (std::size_t i = 0; i < r.trajectory.size(); ++i)
    worst = std::max(worst, gap(r.trajectory.time(i), r.trajectory.state(i).sigma));
  for (const auto& [t, s] : sampled(r.trajectory, uniform_times({t0, t1}, 301))) worst = std::max(worst, gap(t, s.sigma));
  return {at_most("subdiffusion", "sigma2_vs_formula", worst, 1e-6, "omega0 = 0, b = 10, t in [0.1, 10]")};
}

// ---- thermal equilibrium --------------------------------------------------

BelowGridClosure thermal_closure(ThermalVariant v, const BetaGrid& g, const PhysicalParams& p) {
  return v == ThermalVariant::BetaIntegral ? BelowGridClosure::fixed(thermal::coth_below_grid_integral(g.beta_min(), p))
                                           : BelowGridClosure{};
}

double max_interior(const Vector& v) { return v.segment(1, v.size() - 2).cwiseAbs().maxCoeff(); }

// max residual over the interior nodes of the 36-node grid, which every
// refinement contains
double shared_node_residual(ThermalVariant v, Eigen::Index n, const PhysicalParams& p) {
  const BetaGrid g = BetaGrid::uniform(0.5, 4.0, n);
  const Vector res = thermal::equilibrium_residual(v, thermal::equilibrium_profile_coth(g, p), g, p,
                                                   thermal_closure(v, g, p));
  const Eigen::Index stride = (n - 1) / 35;
  double worst = 0;
  for (Eigen::Index k = 1; k < 35; ++k) worst = std::max(worst, std::abs(res[k * stride]));
  return worst;
}

Checks thermal_equilibrium(ThermalVariant v) {
  const PhysicalParams p;
  const std::string tag(to_string(v));
  const double r36 = shared_node_residual(v, 36, p), r71 = shared_node_residual(v, 71, p),
               r141 = shared_node_residual(v, 141, p);
  std::ostringstream d;
  d << "residuals " << format_number(r36) << ", " << format_number(r71) << ", " << format_number(r141);
  Checks out{info("thermal-equilibrium", tag + ".residual_n141", r141, d.str())};
  if (v == ThermalVariant::BetaIntegral) {
    const BetaGrid g = BetaGrid::uniform(0.5, 4.0, 141);
    const double extrapolated =
        max_interior(thermal::equilibrium_residual(v, thermal::equilibrium_profile_coth(g, p), g, p));
    out.push_back(info("thermal-equilibrium", tag + ".residual_n141_linear_extrapolation", extrapolated,
                       "default closure below beta_min; does not shrink with the grid"));
  }
  out.push_back(within("thermal-equilibrium", tag + ".order_36_71", std::log2(r36 / r71), 1.8, 2.2));
  out.push_back(within("thermal-equilibrium", tag + ".order_71_141", std::log2(r71 / r141), 1.8, 2.2));
  return out;
}

Checks thermal_drift(const Context& ctx, ThermalVariant v, Eigen::Index n) {
  const PhysicalParams p = make_natural_params(20, 0, 0);
  const BetaGrid g = BetaGrid::uniform(0.5, 4.0, n);
  const ThermalField f0 = thermal::equilibrium_profile_coth(g, p);
  const auto closure = thermal_closure(v, g, p);
  const double bound = max_interior(thermal::equilibrium_residual(v, f0, g, p, closure));
  const auto r = thermal::integrate_thermal(v, f0, g, {0, 10}, p, ctx.thermal_config(), closure);
  double drift = r.stop == StopReason::ReachedEnd ? 0 : INFINITY;
  for (std::size_t i = 0; i < r.trajectory.size(); ++i)
    drift = std::max(drift, (r.trajectory.field(i).sigma - f0.sigma).cwiseAbs().maxCoeff());
  const std::string name = std::string(to_string(v)) + ".drift_n" + std::to_string(n);
  return {at_most("thermal-dynamics", name, drift / bound, 5.0,
                  "drift / max interior residual over t in [0, 10], gamma = 20")};
}

// ---- thermal limits -------------------------------------------------------

Checks thermal_high_temperature() {
  const PhysicalParams p;
  const BetaGrid g = BetaGrid::uniform(0.01, 0.1, 2001);
  const ThermalField f = thermal::equilibrium_profile_coth(g, p);
  const Vector t8 = thermal::thermal_term_derivative(f, g, p);
  const Vector t10 = thermal::thermal_term_integral(f, g, p);
  double w8 = 0, w10 = 0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    const double s = f.sigma[j], x = g[j] * p.hbar * p.omega0;
    const double quantum = p.hbar * p.hbar / (4 * p.m * p.m * s * s * s);
    const double rhs = 1 / (p.m * g[j] * s) + quantum;
    w8 = std::max(w8, rel_err(t8[j] + quantum, rhs) / (x * x));
    w10 = std::max(w10, rel_err(t10[j], rhs) / (x * x));
  }
  return {at_most("thermal-limits", "beta_derivative.high_temperature", w8, 2.0, "relative gap / (beta hbar w)^2"),
          at_most("thermal-limits", "beta_integral.high_temperature", w10, 2.0, "relative gap / (beta hbar w)^2")};
}

Checks thermal_low_temperature() {
  const PhysicalParams p;
  const BetaGrid g = BetaGrid::uniform(0.5, 40.0, 4001);
  const ThermalField f = thermal::equilibrium_profile_coth(g, p);
  const Vector t8 = thermal::thermal_term_derivative(f, g, p);
  const Vector t10 = thermal::thermal_term_integral(f, g, p, thermal_closure(ThermalVariant::BetaIntegral, g, p));
  double w8 = 0, w10 = 0;
  for (Eigen::Index j = 0; j < g.size(); ++j) {
    if (g[j] * p.hbar * p.omega0 < 30) continue;
    const double s = f.sigma[j];
    const double quantum = p.hbar * p.hbar / (4 * p.m * p.m * s * s * s);
    w8 = std::max(w8, std::abs(t8[j]) / quantum);
    w10 = std::max(w10, std::abs(t10[j] - quantum) / quantum);
  }
  return {at_most("thermal-limits", "beta_derivative.low_temperature", w8, 1e-6, "correction / quantum term"),
          at_most("thermal-limits", "beta_integral.low_temperature", w10, 1e-6, "correction / quantum term")};
}

Checks equilibrium_closed_forms() {
  Checks out;
  double formula = 0;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(std::log(0.2), std::log(5.0)), lb(std::log(1e-3), std::log(1e3));
  for (int i = 0; i < 200; ++i) {
    PhysicalParams p;
    p.m = std::exp(u(rng));
    p.hbar = std::exp(u(rng));
    p.omega0 = std::exp(u(rng));
    const double beta = std::exp(lb(rng));
    const double x = beta * p.hbar * p.omega0;
    const double expected = (std::sqrt(1 + x * x) + 1) / (2 * beta * p.m * p.omega0 * p.omega0);
    formula = std::max(formula, rel_err(analytic::equilibrium_closed_form(beta, p), expected));
  }
  out.push_back(at_most("thermal-limits", "closed_form.closed_form", formula, 1e-12, "200 random parameter sets"));

  const PhysicalParams p;
  // [sqrt(1+x^2)+1]/2x = 1/x + x/4 + ..., 1/2 [1 + 1/x + 1/(2x^2) + ...]
  double high = 0, low = 0, coth_high = 0, coth_low = 0;
  for (double x : {1e-3, 1e-2, 0.1}) {
    high = std::max(high, rel_err(analytic::equilibrium_closed_form(x, p), 1 / x) / (x * x));
    coth_high = std::max(coth_high, rel_err(analytic::equilibrium_coth(x, p), 1 / x) / (x * x));
  }
  for (double x : {50.0, 100.0, 1000.0}) {
    low = std::max(low, std::abs(rel_err(analytic::equilibrium_closed_form(x, p), 0.5) - 1 / x) * x * x);
    coth_low = std::max(coth_low, rel_err(analytic::equilibrium_coth(x, p), 0.5) / (2 * std::exp(-x)));
  }
  out.push_back(at_most("thermal-limits", "closed_form.high_temperature_limit", high, 1.0,
                        "relative gap to 1/(beta m w^2) / x^2"));
  out.push_back(at_most("thermal-limits", "closed_form.low_temperature_limit", low, 1.0,
                        "|relative gap to hbar/2mw - 1/x| * x^2"));
  out.push_back(at_most("thermal-limits", "coth.high_temperature_limit", coth_high, 1.0,
                        "relative gap to 1/(beta m w^2) / x^2"));
  out.push_back(at_most("thermal-limits", "coth.low_temperature_limit", coth_low, 1.01,
                        "relative gap to hbar/2mw / 2 exp(-x)"));
  return out;
}

// The beta-derivative system has no stationary profile at small beta (runs
// started on coth leave it even under strong friction), so its defect is
// reported as the residual of equipartition and the departure from coth.
Checks classical_defect(const Context& ctx) {
  const PhysicalParams p = make_natural_params(20, 0, 0);
  const BetaGrid g = BetaGrid::uniform(0.01, 0.1, 46);
  const ThermalField coth = thermal::equilibrium_profile_coth(g, p);
  ThermalField classical = coth;
  for (Eigen::Index j = 0; j < g.size(); ++j) classical.sigma[j] = 1 / std::sqrt(g[j] * p.m * p.omega0 * p.omega0);

  auto scaled_residual = [&](ThermalVariant v) {
    const Vector r = thermal::equilibrium_residual(v, classical, g, p);
    double worst = 0;
    for (Eigen::Index j = 1; j + 1 < g.size(); ++j)
      worst = std::max(worst, std::abs(r[j]) / (p.omega0 * p.omega0 * classical.sigma[j]));
    return worst;
  };

  const auto relaxed = thermal::integrate_thermal(ThermalVariant::BetaIntegral, coth, g, {0, 50}, p, ctx.thermal_config());
  const ThermalField f10 = relaxed.trajectory.field(relaxed.trajectory.size() - 1);
  double c10 = relaxed.stop == StopReason::ReachedEnd ? 0 : INFINITY;
  for (Eigen::Index j = 0; j < g.size(); ++j)
    c10 = std::max(c10, rel_err(f10.sigma[j] * f10.sigma[j], classical.sigma[j] * classical.sigma[j]));

  const auto run8 = thermal::integrate_thermal(ThermalVariant::BetaDerivative, coth, g, {0, 10}, p, ctx.thermal_config());
  double depart = run8.stop == StopReason::ReachedEnd ? 0 : INFINITY;
  for (std::size_t i = 0; i < run8.trajectory.size(); ++i)
    depart = std::max(depart, ((run8.trajectory.field(i).sigma - coth.sigma).array() / coth.sigma.array())
                                  .abs()
                                  .maxCoeff());

  const std::string grid = "beta hbar w in [0.01, 0.1], 46 nodes";
  return {info("thermal-limits", "classical_defect.beta_derivative_equipartition_residual",
               scaled_residual(ThermalVariant::BetaDerivative), "max interior residual / w^2 sigma, " + grid),
          info("thermal-limits", "classical_defect.beta_integral_equipartition_residual",
               scaled_residual(ThermalVariant::BetaIntegral), "max interior residual / w^2 sigma, " + grid),
          info("thermal-limits", "classical_defect.beta_integral_relaxed_vs_equipartition", c10,
               "sigma^2 after t = 50 at gamma = 20 from coth"),
          info("thermal-limits", "classical_defect.beta_derivative_departure_from_coth", depart,
               "max relative |sigma - coth| over t in [0, 10] at gamma = 20")};
}

// ---- radiative ------------------------------------------------------------

Checks radiative_relaxation(const Context& ctx) {
  const PhysicalParams p = make_natural_params(0, 0, 0.01);
  const double sg = ground_state_sigma(p);
  const double t1 = 5 / 0.01;
  const auto r = integrate(ModelVariant::RadiativeReduced, State{2 * sg, 0.0}, {0, t1}, p, ctx.config());
  if (r.stop != StopReason::ReachedEnd)
    return {at_most("radiative", "reduced.final_energy_gap", INFINITY, 1e-4),
            within("radiative", "reduced.decay_rate", NAN, 0, 0)};
  const double e_final = r.trajectory.diagnostics.back().energy;
  // least-squares slope of ln(E - 1/2) on t in [50, 450]
  double n = 0, st = 0, sy = 0, stt = 0, sty = 0;
  for (double t : uniform_times({50, 450}, 801)) {
    const double y = std::log(energy(sample(r.trajectory, t), p) - 0.5 * p.hbar * p.omega0);
    n += 1;
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
  }
  const double lambda = -(n * sty - st * sy) / (n * stt - st * st);
  return {at_most("radiative", "reduced.final_energy_gap", e_final - 0.5 * p.hbar * p.omega0, 1e-4,
                  "E(t = 5/epsilon) - hbar w/2, epsilon = 0.01"),
          within("radiative", "reduced.decay_rate", lambda, kRadiativeDecayRate * 0.995, kRadiativeDecayRate * 1.005,
                 "pinned regression, about 4 epsilon")};
}

Checks radiative_runaway(const Context& ctx) {
  const PhysicalParams p = make_natural_params(0, 0, 0.01);
  State3 s = default_radiative_initial(State{2 * ground_state_sigma(p), 0.0}, p);
  s.sigma_ddot += 0.1;
  const auto r = integrate(ModelVariant::RadiativeNaive, s, {0, 100}, p, ctx.config());
  const bool runaway = r.stop == StopReason::RunawayDetected;
  // the deviation of sigma'' from the Ermakov acceleration obeys r d' = m d to
  // leading order, so it grows like exp(m t / r)
  auto deviation = [&](double t) {
    const Vector y = sample_raw(r.trajectory, t);
    return std::abs(y[2] - acceleration(ModelVariant::Conservative, State{y[0], y[1]}, p));
  };
  const double t_a = 0.02, t_b = 0.1;
  const double rate = r.trajectory.size() > 1 && r.trajectory.times().back() >= t_b
                          ? std::log(deviation(t_b) / deviation(t_a)) / (t_b - t_a)
                          : NAN;
  const double expected = p.m / p.r;
  return {CheckResult{"radiative", "naive.runaway_detected", runaway, false, runaway ? 1.0 : 0.0, 1.0, "==",
                      "stop reason " + std::string(to_string(r.stop))},
          at_most("radiative", "naive.parasitic_growth_rate", std::abs(rate / expected - 1), 0.05,
                  "relative gap of the fitted rate to m/r = " + format_number(expected))};
}

Checks radiative_limit(const Context& ctx) {
  const IntegratorConfig c = ctx.config(1e-12, 1e-14);
  const State s0{2 * ground_state_sigma(PhysicalParams{}), 0.0};
  const auto ref = integrate(ModelVariant::Conservative, s0, {0, 1}, PhysicalParams{}, c);
  const auto times = uniform_times({0, 1}, 101);
  double prev = 0, order = INFINITY;
  for (double r : {1e-2, 1e-3, 1e-4}) {
    const auto run = integrate(ModelVariant::RadiativeReduced, s0, {0, 1}, make_natural_params(0, 0, r), c);
    double gap = 0;
    for (double t : times)
      gap = std::max(gap, std::abs(sample(run.trajectory, t).sigma - sample(ref.trajectory, t).sigma));
    if (prev > 0) order = std::min(order, std::log10(prev / gap));
    prev = gap;
  }
  return {at_least("radiative", "reduced_to_conservative.order", order, 0.95,
                   "sup gap over t in [0, 1], r in {1e-2, 1e-3, 1e-4}")};
}

// ---- madelung -------------------------------------------------------------

Checks madelung_snapshots() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> s(0.2, 3.0), v(-2.0, 2.0), a(-3.0, 3.0), l(std::log(0.5), std::log(2.0)),
      w(0.0, 2.0), b(0.0, 5.0);
  double cont = 0, spread = 0, match = 0;
  for (int i = 0; i < 50; ++i) {
    const madelung::GaussianSnapshot snap{s(rng), v(rng), 0};
    cont = std::max(cont, madelung::continuity_residual(madelung::SpatialGrid::for_sigma(snap.sigma), snap));
  }
  for (int i = 0; i < 40; ++i) {
    PhysicalParams p;
    p.m = std::exp(l(rng));
    p.hbar = std::exp(l(rng));
    p.omega0 = w(rng);
    p.b = b(rng);
    const madelung::GaussianSnapshot snap{s(rng), v(rng), 0};
    const double sddot = a(rng);
    const auto g = madelung::SpatialGrid::for_sigma(snap.sigma);
    for (ModelVariant mv : {ModelVariant::Conservative, ModelVariant::Dissipative}) {
      const auto profile = madelung::force_balance_profile(g, snap, sddot, mv, p);
      double lo = INFINITY, hi = -INFINITY;
      for (Eigen::Index k = 0; k < g.size(); ++k) {
        if (std::abs(g.x()[k]) < 1e-3 * g.half_width()) continue;
        const double ratio = profile[k] / (g.x()[k] / snap.sigma);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
      }
      const double width = residual(mv, State{snap.sigma, snap.sigma_dot}, sddot, p);
      const double scale = std::max(std::abs(width), 1.0);
      spread = std::max(spread, (hi - lo) / scale);
      match = std::max(match, std::abs(0.5 * (hi + lo) - width) / scale);
    }
  }
  return {at_most("madelung", "continuity_snapshots", cont, 1e-12, "50 random (sigma, sigma')"),
          at_most("madelung", "factorization_spread", spread, 1e-10, "force balance / (x/sigma), 40 random states"),
          at_most("madelung", "factorization_matches_width_residual", match, 1e-10)};
}

Checks madelung_trajectories(const Context& ctx) {
  Checks out;
  const auto times = uniform_times({0, 15}, 100);
  for (ModelVariant v : {ModelVariant::Conservative, ModelVariant::Dissipative}) {
    const PhysicalParams p = make_natural_params(v == ModelVariant::Dissipative ? 0.8 : 0.0, 0, 0);
    const auto run = integrate(v, State{1.6, 0.4}, {0, 15}, p, ctx.config());
    double cont = run.stop == StopReason::ReachedEnd ? 0 : INFINITY, force = cont;
    for (const auto& [t, s] : sampled(run.trajectory, run.stop == StopReason::ReachedEnd ? times : std::vector<double>{})) {
      const madelung::GaussianSnapshot snap{s.sigma, s.sigma_dot, t};
      const auto g = madelung::SpatialGrid::for_sigma(s.sigma);
      cont = std::max(cont, madelung::continuity_residual(g, snap));
      force = std::max(force, madelung::force_balance_residual(g, snap, acceleration(v, s, p), v, p));
    }
    const std::string tag(to_string(v));
    out.push_back(at_most("madelung", tag + ".trajectory_continuity", cont, 1e-10, "100 sample times"));
    out.push_back(at_most("madelung", tag + ".trajectory_force_balance", force, 1e-10, "100 sample times"));
  }

  const PhysicalParams p = make_natural_params(20, 0, 0);
  const BetaGrid g = BetaGrid::uniform(0.5, 4.0, 36);
  ThermalField f0 = thermal::equilibrium_profile_coth(g, p);
  f0.sigma *= 1.2;
  const auto closure = thermal_closure(ThermalVariant::BetaIntegral, g, p);
  const auto run = thermal::integrate_thermal(ThermalVariant::BetaIntegral, f0, g, {0, 10}, p,
                                              ctx.config(1e-9, 1e-12, Scheme::ImplicitAStable), closure);
  double force = run.stop == StopReason::ReachedEnd ? 0 : INFINITY;
  for (double t : run.stop == StopReason::ReachedEnd ? uniform_times({0, 10}, 100) : std::vector<double>{}) {
    const ThermalField f = run.trajectory.sample(t);
    const Vector acc = thermal::thermal_acceleration(ThermalVariant::BetaIntegral, f, g, p, closure);
    for (Eigen::Index j = 0; j < g.size(); ++j) {
      const auto sg = madelung::SpatialGrid::for_sigma(f.sigma[j]);
      force = std::max(force, madelung::force_balance_residual_thermal(
                                  sg, madelung::GaussianSnapshot{f.sigma[j], f.sigma_dot[j], t}, acc[j], f, g, j, p,
                                  closure));
    }
  }
  out.push_back(at_most("madelung", "beta_integral.trajectory_force_balance", force, 1e-10,
                        "every beta node at 100 sample times"));
  return out;
}

const std::vector<Task>& tasks() {
  static const std::vector<Task> all = [] {
    std::vector<Task> t;
    t.push_back({"free-particle", free_particle});
    t.push_back({"pinney", pinney_integrator});
    t.push_back({"pinney", pinney_residual});
    t.push_back({"energy", energy_conservative});
    t.push_back({"energy", energy_dissipative});
    t.push_back({"overdamped", overdamped_formula});
    t.push_back({"overdamped", overdamped_inertial});
    t.push_back({"subdiffusion", subdiffusion});
    for (ThermalVariant v : {ThermalVariant::BetaDerivative, ThermalVariant::BetaIntegral})
      t.push_back({"thermal-equilibrium", [v](const Context&) { return thermal_equilibrium(v); }});
    for (ThermalVariant v : {ThermalVariant::BetaDerivative, ThermalVariant::BetaIntegral})
      for (Eigen::Index n : {36, 71, 141})
        t.push_back({"thermal-dynamics", [v, n](const Context& c) { return thermal_drift(c, v, n); }});
    t.push_back({"thermal-limits", [](const Context&) { return thermal_high_temperature(); }});
    t.push_back({"thermal-limits", [](const Context&) { return thermal_low_temperature(); }});
    t.push_back({"thermal-limits", [](const Context&) { return equilibrium_closed_forms(); }});
    t.push_back({"thermal-limits", classical_defect});
    t.push_back({"radiative", radiative_relaxation});
    t.push_back({"radiative", radiative_runaway});
    t.push_back({"radiative", radiative_limit});
    t.push_back({"madelung", [](const Context&) { return madelung_snapshots(); }});
    t.push_back({"madelung", madelung_trajectories});
    return t;
  }();
  return all;
}

}  // namespace

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"free-particle",    "pinney",         "energy",    "overdamped",
                                              "subdiffusion",     "thermal-equilibrium", "thermal-dynamics",
                                              "thermal-limits",   "radiative",      "madelung"};
  return names;
}

std::vector<CheckResult> run_verification(const std::string& suite, const VerifyOptions& options) {
  const auto& names = suite_names();
  if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
    throw std::invalid_argument("unknown verification suite \"" + suite + "\"");
  std::vector<const Task*> selected;
  for (const auto& t : tasks())
    if (suite == "all" || t.suite == suite) selected.push_back(&t);

  const Context ctx{options};
  std::vector<Checks> results(selected.size());
  parallel_for(selected.size(), options.jobs, [&](std::size_t i) {
    try {
      results[i] = selected[i]->run(ctx);
    } catch (const std::exception& e) {
      results[i] = {CheckResult{selected[i]->suite, "exception", false, false, NAN, 0, "", e.what()}};
    }
  });

  std::vector<CheckResult> out;
  for (const auto& name : names)
    for (std::size_t i = 0; i < selected.size(); ++i)
      if (selected[i]->suite == name) out.insert(out.end(), results[i].begin(), results[i].end());
  return out;
}

bool all_passed(const std::vector<CheckResult>& results) {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed || r.informational; });
}

nlohmann::json report_json(const std::string& suite, const std::vector<CheckResult>& results) {
  nlohmann::json checks = nlohmann::json::array();
  int passed = 0, failed = 0, informational = 0;
  for (const auto& r : results) {
    if (r.informational)
      ++informational;
    else if (r.passed)
      ++passed;
    else
      ++failed;
    nlohmann::json c{{"suite", r.suite},
                     {"name", r.name},
                     {"passed", r.passed},
                     {"informational", r.informational},
                     {"measured", std::isfinite(r.measured) ? nlohmann::json(r.measured) : nlohmann::json(nullptr)},
                     {"tolerance", r.tolerance},
                     {"comparison", r.comparison}};
    if (!r.detail.empty()) c["detail"] = r.detail;
    checks.push_back(std::move(c));
  }
  return {{"suite", suite},
          {"passed", all_passed(results)},
          {"counts", {{"passed", passed}, {"failed", failed}, {"informational", informational}}},
          {"checks", checks}};
}

}  // namespace ermakov::app
