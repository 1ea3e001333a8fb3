#include "ermakov/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ermakov {

void IntegratorConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("integrator config: " + what); };
  if (!(rel_tol > 0.0)) fail("rel_tol must be > 0");
  if (!(abs_tol > 0.0)) fail("abs_tol must be > 0");
  if (!(h_min > 0.0)) fail("h_min must be > 0");
  if (!(h_min <= h_init)) fail("h_init must be >= h_min");
  if (!(h_init <= h_max)) fail("h_max must be >= h_init");
  if (max_steps == 0) fail("max_steps must be > 0");
  if (!(sigma_min_guard >= 0.0)) fail("sigma_min_guard must be >= 0");
  if (!(runaway_ratio > 1.0)) fail("runaway_ratio must be > 1");
}

Vector DenseSegment::evaluate(double time) const {
  const double theta = (time - t) / h;
  if (scheme == Scheme::ExplicitAdaptive) {
    const double theta1 = 1.0 - theta;
    return coeffs.col(0) +
           theta * (coeffs.col(1) +
                    theta1 * (coeffs.col(2) + theta * (coeffs.col(3) + theta1 * coeffs.col(4))));
  }
  const double t2 = theta * theta;
  const double t3 = t2 * theta;
  return (2.0 * t3 - 3.0 * t2 + 1.0) * coeffs.col(0) + (-2.0 * t3 + 3.0 * t2) * coeffs.col(1) +
         (t3 - 2.0 * t2 + theta) * coeffs.col(2) + (t3 - t2) * coeffs.col(3);
}

Vector DenseTrajectory::evaluate(double t) const {
  if (times.empty()) throw std::out_of_range("evaluate: empty trajectory");
  if (!(t >= times.front() && t <= times.back()))
    throw std::out_of_range("evaluate: t = " + std::to_string(t) + " outside [" +
                            std::to_string(times.front()) + ", " + std::to_string(times.back()) + "]");
  auto it = std::lower_bound(times.begin(), times.end(), t);
  const auto i = static_cast<std::size_t>(it - times.begin());
  if (it != times.end() && *it == t) return states[i];
  return segments[i - 1].evaluate(t);
}

namespace {

// Steps are sized so the local error lands at a tenth of the requested
// tolerance; at the defaults this keeps conservative energy drift over ten
// periods below 1e-8.
constexpr double kErrorTarget = 0.1;

enum class AttemptStatus { Ok, GuardViolation, NewtonFailure };

struct Attempt {
  AttemptStatus status{AttemptStatus::Ok};
  Vector y1;
  Vector f1;
  double error{0};
  DenseSegment segment;
};

Attempt failed(AttemptStatus status) {
  Attempt a;
  a.status = status;
  return a;
}

double scaled_rms(const Vector& e, const Vector& y0, const Vector& y1, const IntegratorConfig& cfg) {
  double sum = 0.0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double q = e[i] / sc;
    sum += q * q;
  }
  return std::sqrt(sum / static_cast<double>(e.size()));
}

class Evaluator {
 public:
  Evaluator(const OdeSystem& sys, const IntegratorConfig& cfg, SolverStats& stats)
      : sys_(sys), cfg_(cfg), stats_(stats) {}

  bool admissible(const Vector& y) const {
    if (!y.allFinite()) return false;
    return sys_.min_sigma ? sys_.min_sigma(y) > cfg_.sigma_min_guard : true;
  }

  void rhs(double t, const Vector& y, Vector& out) {
    ++stats_.rhs_evaluations;
    out.resize(y.size());
    sys_.rhs(t, y, out);
  }

  void jacobian(double t, const Vector& y, const Vector& fy, Eigen::MatrixXd& jac) {
    ++stats_.jacobian_evaluations;
    const auto n = y.size();
    jac.resize(n, n);
    if (sys_.jacobian) {
      sys_.jacobian(t, y, jac);
      return;
    }
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    const double ynorm = y.cwiseAbs().maxCoeff();
    Vector yp = y;
    Vector fp(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      const double delta = root_eps * std::max({std::abs(y[j]), 1e-3 * ynorm, 1e-300});
      yp[j] = y[j] + delta;
      rhs(t, yp, fp);
      jac.col(j) = (fp - fy) / delta;
      yp[j] = y[j];
    }
  }

  const IntegratorConfig& config() const { return cfg_; }
  SolverStats& stats() { return stats_; }

 private:
  const OdeSystem& sys_;
  const IntegratorConfig& cfg_;
  SolverStats& stats_;
};

// Dormand-Prince 5(4) tableau (Hairer, Norsett & Wanner, DOPRI5).
namespace dp {
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                 a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0, a75 = -2187.0 / 6784.0,
                 a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                 e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;
}  // namespace dp

Attempt dormand_prince_step(Evaluator& ev, double t, const Vector& y, const Vector& k1, double h) {
  using namespace dp;
  Attempt out;
  const auto n = y.size();
  Vector k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  Vector stage(n);

  auto eval = [&](double ts, Vector& k) {
    if (!ev.admissible(stage)) return false;
    ev.rhs(ts, stage, k);
    return k.allFinite();
  };

  stage = y + h * (a21 * k1);
  if (!eval(t + c2 * h, k2)) return failed(AttemptStatus::GuardViolation);
  stage = y + h * (a31 * k1 + a32 * k2);
  if (!eval(t + c3 * h, k3)) return failed(AttemptStatus::GuardViolation);
  stage = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
  if (!eval(t + c4 * h, k4)) return failed(AttemptStatus::GuardViolation);
  stage = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
  if (!eval(t + c5 * h, k5)) return failed(AttemptStatus::GuardViolation);
  stage = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
  if (!eval(t + h, k6)) return failed(AttemptStatus::GuardViolation);
  stage = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
  if (!eval(t + h, k7)) return failed(AttemptStatus::GuardViolation);

  const Vector err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  out.error = scaled_rms(err, y, stage, ev.config());
  out.y1 = stage;
  out.f1 = k7;

  out.segment.scheme = Scheme::ExplicitAdaptive;
  out.segment.t = t;
  out.segment.h = h;
  out.segment.coeffs.resize(n, 5);
  const Vector ydiff = stage - y;
  const Vector bspl = h * k1 - ydiff;
  out.segment.coeffs.col(0) = y;
  out.segment.coeffs.col(1) = ydiff;
  out.segment.coeffs.col(2) = bspl;
  out.segment.coeffs.col(3) = ydiff - h * k7 - bspl;
  out.segment.coeffs.col(4) = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
  return out;
}

// TR-BDF2 as an ESDIRK tableau with gamma = 2 - sqrt(2):
//   c = (0, gamma, 1), A = [[0], [d, d], [w, w, d]], b = (w, w, d),
//   d = gamma/2, w = sqrt(2)/4, embedded order-3 weights ((1-w)/3, (3w+1)/3, d/3).
namespace trbdf2 {
const double gamma = 2.0 - std::sqrt(2.0);
const double d = gamma / 2.0;
const double w = std::sqrt(2.0) / 4.0;
const double bh1 = (1.0 - w) / 3.0, bh2 = (3.0 * w + 1.0) / 3.0, bh3 = d / 3.0;
constexpr int kMaxNewton = 12;
constexpr double kNewtonTol = 1e-2;  // in units of the local error tolerance
}  // namespace trbdf2

double scaled_rms_single(const Vector& e, const Vector& y, const IntegratorConfig& cfg) {
  return scaled_rms(e, y, y, cfg);
}

// Solves z - psi - h d f(tz, z) = 0 by damped Newton with the frozen iteration
// matrix (I - h d J).  On success z holds the root and fz = f(tz, z).
AttemptStatus solve_stage(Evaluator& ev, const Eigen::PartialPivLU<Eigen::MatrixXd>& lu, double tz,
                          const Vector& psi, double hd, Vector& z, Vector& fz) {
  const auto& cfg = ev.config();
  if (!ev.admissible(z)) return AttemptStatus::GuardViolation;
  ev.rhs(tz, z, fz);
  Vector g = z - psi - hd * fz;
  double gnorm = scaled_rms_single(g, z, cfg);
  for (int it = 0; it < trbdf2::kMaxNewton; ++it) {
    const Vector delta = -lu.solve(g);
    double lambda = 1.0;
    Vector z_try(z.size()), f_try(z.size()), g_try(z.size());
    bool improved = false;
    for (int damp = 0; damp < 8; ++damp, lambda *= 0.5) {
      z_try = z + lambda * delta;
      if (!ev.admissible(z_try)) continue;
      ev.rhs(tz, z_try, f_try);
      if (!f_try.allFinite()) continue;
      g_try = z_try - psi - hd * f_try;
      const double gtry = scaled_rms_single(g_try, z_try, cfg);
      if (gtry <= (1.0 - 0.5 * lambda) * gnorm || gtry <= trbdf2::kNewtonTol) {
        improved = true;
        gnorm = gtry;
        break;
      }
    }
    if (!improved) return AttemptStatus::NewtonFailure;
    const double step_norm = lambda * scaled_rms_single(delta, z_try, cfg);
    z = z_try;
    fz = f_try;
    g = g_try;
    if (step_norm <= trbdf2::kNewtonTol) return AttemptStatus::Ok;
  }
  return AttemptStatus::NewtonFailure;
}

Attempt trbdf2_step(Evaluator& ev, double t, const Vector& y, const Vector& k1, double h, Eigen::MatrixXd& jac) {
  using namespace trbdf2;
  Attempt out;
  const auto n = y.size();
  ev.jacobian(t, y, k1, jac);
  const double hd = h * d;
  const Eigen::MatrixXd iteration = Eigen::MatrixXd::Identity(n, n) - hd * jac;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(iteration);

  Vector z = y + gamma * h * k1;
  Vector k2(n);
  const Vector psi2 = y + hd * k1;
  if (auto s = solve_stage(ev, lu, t + gamma * h, psi2, hd, z, k2); s != AttemptStatus::Ok)
    return failed(s);

  Vector y1 = z + (1.0 - gamma) * h * k2;
  Vector k3(n);
  const Vector psi3 = y + h * w * (k1 + k2);
  if (auto s = solve_stage(ev, lu, t + h, psi3, hd, y1, k3); s != AttemptStatus::Ok) return failed(s);

  const Vector est = h * ((bh1 - w) * k1 + (bh2 - w) * k2 + (bh3 - d) * k3);
  // Shampine's filter keeps the estimate bounded on stiff components.
  const Vector filtered = lu.solve(est);
  out.error = scaled_rms(filtered, y, y1, ev.config());
  out.y1 = y1;
  out.f1 = k3;
  out.segment.scheme = Scheme::ImplicitAStable;
  out.segment.t = t;
  out.segment.h = h;
  out.segment.coeffs.resize(n, 4);
  out.segment.coeffs.col(0) = y;
  out.segment.coeffs.col(1) = y1;
  out.segment.coeffs.col(2) = h * k1;
  out.segment.coeffs.col(3) = h * k3;
  return out;
}

// PI step-size controller h_new = h * safety * err^-alpha * err_old^beta.
struct Controller {
  double alpha;
  double beta;
  double order;
  double err_old{1e-4};

  double after_accept(double h, double err, bool previous_rejected) {
    const double e = std::max(err, 1e-10);
    double fac = 0.9 * std::pow(e, -alpha) * std::pow(err_old, beta);
    fac = std::clamp(fac, 0.2, 10.0);
    if (previous_rejected) fac = std::min(fac, 1.0);
    err_old = std::max(err, 1e-4);
    return h * fac;
  }

  double after_reject(double h, double err) const {
    return h * std::max(0.2, 0.9 * std::pow(err, -1.0 / order));
  }
};

}  // namespace

OdeResult solve(const OdeSystem& system, const Vector& y0, TimeSpan span, const IntegratorConfig& cfg,
                const StepMonitor& monitor) {
  cfg.validate();
  if (!(span.t1 > span.t0)) throw std::invalid_argument("solve: t1 must be > t0");
  if (y0.size() != system.dimension) throw std::invalid_argument("solve: initial state has wrong dimension");

  OdeResult result;
  auto& traj = result.trajectory;
  Evaluator ev(system, cfg, result.stats);

  traj.times.push_back(span.t0);
  traj.states.push_back(y0);
  traj.step_sizes.push_back(0.0);
  traj.error_estimates.push_back(0.0);

  if (!ev.admissible(y0)) {
    result.stop = StopReason::SigmaGuardHit;
    return result;
  }

  Controller control = cfg.scheme == Scheme::ExplicitAdaptive ? Controller{0.17, 0.04, 5.0}
                                                              : Controller{0.7 / 3.0, 0.4 / 3.0, 3.0};
  double t = span.t0;
  Vector y = y0;
  Vector f(y0.size());
  ev.rhs(t, y, f);
  if (monitor) {
    if (auto stop = monitor(t, y, f)) {
      result.stop = *stop;
      return result;
    }
  }

  Eigen::MatrixXd jac;
  double h = std::min(cfg.h_init, cfg.h_max);
  bool previous_rejected = false;

  while (t < span.t1) {
    if (result.stats.accepted + result.stats.rejected >= cfg.max_steps) {
      result.stop = StopReason::MaxSteps;
      return result;
    }
    const double remaining = span.t1 - t;
    bool last = false;
    if (h >= remaining || t + 1.01 * h >= span.t1) {
      h = remaining;
      last = true;
    }

    Attempt attempt = cfg.scheme == Scheme::ExplicitAdaptive ? dormand_prince_step(ev, t, y, f, h)
                                                             : trbdf2_step(ev, t, y, f, h, jac);
    if (attempt.status == AttemptStatus::Ok && !ev.admissible(attempt.y1))
      attempt.status = AttemptStatus::GuardViolation;

    if (attempt.status != AttemptStatus::Ok) {
      ++result.stats.rejected;
      previous_rejected = true;
      if (attempt.status == AttemptStatus::NewtonFailure) ++result.stats.newton_failures;
      h *= attempt.status == AttemptStatus::GuardViolation ? 0.5 : 0.25;
      if (h < cfg.h_min) {
        result.stop = attempt.status == AttemptStatus::GuardViolation ? StopReason::SigmaGuardHit
                                                                      : StopReason::StepUnderflow;
        return result;
      }
      continue;
    }

    // The controller works on error / kErrorTarget and accepts at <= 1.
    const double control_error = attempt.error / kErrorTarget;
    if (!(control_error <= 1.0)) {
      ++result.stats.rejected;
      previous_rejected = true;
      const double err = std::isfinite(control_error) ? control_error : 1e10;
      h = control.after_reject(h, err);
      if (h < cfg.h_min) {
        result.stop = StopReason::StepUnderflow;
        return result;
      }
      continue;
    }

    ++result.stats.accepted;
    const double t_new = last ? span.t1 : t + h;
    traj.times.push_back(t_new);
    traj.states.push_back(attempt.y1);
    traj.step_sizes.push_back(h);
    traj.error_estimates.push_back(attempt.error);
    traj.segments.push_back(std::move(attempt.segment));
    t = t_new;
    y = std::move(attempt.y1);
    f = std::move(attempt.f1);

    if (monitor) {
      if (auto stop = monitor(t, y, f)) {
        result.stop = *stop;
        return result;
      }
    }

    double h_next = control.after_accept(h, control_error, previous_rejected);
    previous_rejected = false;
    h_next = std::min(h_next, cfg.h_max);
    if (h_next < cfg.h_min && t < span.t1) {
      result.stop = StopReason::StepUnderflow;
      return result;
    }
    h = h_next;
  }
  result.stop = StopReason::ReachedEnd;
  return result;
}

}  // namespace ermakov
