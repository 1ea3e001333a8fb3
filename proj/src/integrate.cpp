#include "ermakov/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>
#include <stdexcept>

namespace ermakov {

namespace {

void check_span(TimeSpan span) {
  if (!(span.t1 > span.t0)) throw std::invalid_argument("integrate: t1 must be > t0");
}

void check_variant_params(ModelVariant variant, const PhysicalParams& p) {
  p.validate();
  switch (variant) {
    case ModelVariant::RadiativeNaive:
    case ModelVariant::RadiativeReduced:
      if (!(p.r > 0.0)) throw std::invalid_argument(std::string(to_string(variant)) + " requires r > 0");
      break;
    case ModelVariant::HighTemperature:
    case ModelVariant::OverdampedHighTemperature:
      if (p.beta.is_zero_temperature())
        throw std::invalid_argument(std::string(to_string(variant)) + " requires finite beta");
      break;
    default: break;
  }
  if (is_overdamped(variant) && !(p.b > 0.0))
    throw std::invalid_argument(std::string(to_string(variant)) + " requires b > 0");
}

OdeSystem make_system(ModelVariant variant, const PhysicalParams& p) {
  OdeSystem sys;
  sys.dimension = state_dimension(variant);
  sys.min_sigma = [](const Vector& y) { return y[0]; };
  switch (state_dimension(variant)) {
    case 1:
      sys.rhs = [variant, p](double, const Vector& y, Vector& dy) { dy[0] = overdamped_velocity(y[0], p, variant); };
      break;
    case 2:
      sys.rhs = [variant, p](double, const Vector& y, Vector& dy) {
        dy[0] = y[1];
        dy[1] = acceleration(variant, State{y[0], y[1]}, p);
      };
      break;
    default:
      sys.rhs = [p](double, const Vector& y, Vector& dy) {
        dy[0] = y[1];
        dy[1] = y[2];
        dy[2] = jerk_radiative(State3{y[0], y[1], y[2]}, p);
      };
      break;
  }
  return sys;
}

State to_state(ModelVariant variant, const Vector& y, const PhysicalParams& p) {
  if (y.size() == 1) return {y[0], overdamped_velocity(y[0], p, variant)};
  return {y[0], y[1]};
}

// Runaway guard for the third-order model: |sigma''| either exceeds
// runaway_ratio times its initial scale, or grows by runaway_ratio within one
// Abraham-Lorentz time r/m.
class RunawayMonitor {
 public:
  RunawayMonitor(const PhysicalParams& p, const Vector& y0, double ratio) : window_(p.r / p.m), ratio_(ratio) {
    const double s = y0[0];
    scale_ = std::max({std::abs(y0[2]), p.omega0 * p.omega0 * s, p.hbar * p.hbar / (4.0 * p.m * p.m * s * s * s)});
  }

  std::optional<StopReason> operator()(double t, const Vector& y, const Vector&) {
    const double a = std::abs(y[2]);
    if (a > ratio_ * scale_) return StopReason::RunawayDetected;
    history_.emplace_back(t, a);
    // keep exactly one sample at or before t - window
    while (history_.size() > 1 && history_[1].first <= t - window_) history_.pop_front();
    const auto& [t_then, a_then] = history_.front();
    if (t_then <= t - window_ && a_then > 0.0 && a >= scale_ && a >= ratio_ * a_then)
      return StopReason::RunawayDetected;
    return std::nullopt;
  }

 private:
  double window_;
  double ratio_;
  double scale_{0};
  std::deque<std::pair<double, double>> history_;
};

IntegrationResult run(ModelVariant variant, const Vector& y0, TimeSpan span, const PhysicalParams& p,
                      const IntegratorConfig& config) {
  check_span(span);
  config.validate();
  if (!(y0[0] > 0.0)) throw std::invalid_argument("integrate: initial sigma must be > 0");

  IntegrationResult out;
  out.warnings = scheme_warnings(p, config);
  const OdeSystem sys = make_system(variant, p);

  StepMonitor monitor;
  if (variant == ModelVariant::RadiativeNaive) monitor = RunawayMonitor(p, y0, config.runaway_ratio);

  OdeResult res = solve(sys, y0, span, config, monitor);
  out.stop = res.stop;
  out.stats = res.stats;
  out.trajectory.variant = variant;
  out.trajectory.params = p;
  out.trajectory.dense = std::move(res.trajectory);
  const auto& dense = out.trajectory.dense;
  out.trajectory.diagnostics.reserve(dense.size());
  for (std::size_t i = 0; i < dense.size(); ++i) {
    const State s = to_state(variant, dense.states[i], p);
    out.trajectory.diagnostics.push_back({energy(s, p), dense.step_sizes[i], dense.error_estimates[i]});
  }
  return out;
}

}  // namespace

State Trajectory::state(std::size_t i) const { return to_state(variant, dense.states[i], params); }

std::vector<std::string> scheme_warnings(const PhysicalParams& p, const IntegratorConfig& config) {
  std::vector<std::string> w;
  if (config.scheme != Scheme::ExplicitAdaptive || !(p.b > 0.0)) return w;
  const double ratio = p.omega0 > 0.0 ? p.b / (p.m * p.omega0) : std::numeric_limits<double>::infinity();
  if (ratio > 10.0) {
    std::ostringstream msg;
    msg << "strong friction b/(m*omega0) = " << ratio
        << " > 10: the explicit scheme may take very small steps; scheme \"implicit\" is recommended";
    w.push_back(msg.str());
  }
  return w;
}

IntegrationResult integrate(ModelVariant variant, const State& initial, TimeSpan span, const PhysicalParams& p,
                            const IntegratorConfig& config) {
  if (state_dimension(variant) != 2)
    throw std::invalid_argument("integrate: variant " + std::string(to_string(variant)) +
                                " does not take a 2-component state");
  check_variant_params(variant, p);
  Vector y0(2);
  y0 << initial.sigma, initial.sigma_dot;
  return run(variant, y0, span, p, config);
}

IntegrationResult integrate(ModelVariant variant, const State3& initial, TimeSpan span, const PhysicalParams& p,
                            const IntegratorConfig& config) {
  if (variant != ModelVariant::RadiativeNaive)
    throw std::invalid_argument("integrate: a 3-component state is only valid for radiative_naive");
  check_variant_params(variant, p);
  Vector y0(3);
  y0 << initial.sigma, initial.sigma_dot, initial.sigma_ddot;
  return run(variant, y0, span, p, config);
}

IntegrationResult integrate_overdamped(ModelVariant variant, double sigma0, TimeSpan span,
                                       const PhysicalParams& p, const IntegratorConfig& config) {
  if (!is_overdamped(variant))
    throw std::invalid_argument("integrate_overdamped: variant " + std::string(to_string(variant)) +
                                " is not overdamped");
  check_variant_params(variant, p);
  Vector y0(1);
  y0 << sigma0;
  return run(variant, y0, span, p, config);
}

State3 default_radiative_initial(const State& initial, const PhysicalParams& params) {
  return {initial.sigma, initial.sigma_dot, acceleration_conservative(initial.sigma, params)};
}

Vector sample_raw(const Trajectory& trajectory, double t) { return trajectory.dense.evaluate(t); }

State sample(const Trajectory& trajectory, double t) {
  return to_state(trajectory.variant, trajectory.dense.evaluate(t), trajectory.params);
}

std::vector<std::pair<double, State>> sample(const Trajectory& trajectory, const std::vector<double>& times) {
  std::vector<std::pair<double, State>> out;
  out.reserve(times.size());
  for (double t : times) {
    if (t < trajectory.dense.front_time() || t > trajectory.dense.back_time()) continue;
    out.emplace_back(t, sample(trajectory, t));
  }
  return out;
}

std::vector<double> uniform_times(TimeSpan span, std::size_t count) {
  if (count < 2) throw std::invalid_argument("uniform_times: need at least 2 samples");
  std::vector<double> t(count);
  const double dt = (span.t1 - span.t0) / static_cast<double>(count - 1);
  for (std::size_t i = 0; i < count; ++i) t[i] = span.t0 + dt * static_cast<double>(i);
  t.back() = span.t1;
  return t;
}

}  // namespace ermakov
