#pragma once

#include <cmath>
#include <stdexcept>

#include "ermakov/core.hpp"

// Closed-form reference solutions.  These are the oracles for the
// integration tests and intentionally share no code with models.hpp.

namespace ermakov::analytic {

/// Linear-oscillator basis of the Pinney construction at one instant:
/// u(0) = s0, u'(0) = s0', v(0) = 0, v'(0) = 1, Wronskian W = u v' - u' v = s0.
template <class Scalar>
struct PinneyBasis {
  Scalar u, u_dot, v, v_dot;
  Scalar wronskian;
  Scalar k;  // hbar^2 / (4 m^2)
};

template <class Scalar>
PinneyBasis<Scalar> pinney_basis(Scalar t, Scalar sigma0, Scalar sigma_dot0,
                                 const BasicPhysicalParams<Scalar>& p) {
  using std::cos;
  using std::sin;
  PinneyBasis<Scalar> basis{};
  const Scalar w = p.omega0;
  if (w > Scalar(0)) {
    const Scalar c = cos(w * t);
    const Scalar s = sin(w * t);
    basis.u = sigma0 * c + (sigma_dot0 / w) * s;
    basis.u_dot = -sigma0 * w * s + sigma_dot0 * c;
    basis.v = s / w;
    basis.v_dot = c;
  } else {
    basis.u = sigma0 + sigma_dot0 * t;
    basis.u_dot = sigma_dot0;
    basis.v = t;
    basis.v_dot = Scalar(1);
  }
  basis.wronskian = sigma0;
  basis.k = p.hbar * p.hbar / (Scalar(4) * p.m * p.m);
  return basis;
}

/// Exact solution of the conservative width equation for constant omega0,
/// sigma^2 = u^2 + (k/W^2) v^2.
template <class Scalar>
BasicState<Scalar> pinney_solution(Scalar t, Scalar sigma0, Scalar sigma_dot0,
                                   const BasicPhysicalParams<Scalar>& p) {
  using std::sqrt;
  if (!(sigma0 > Scalar(0))) throw std::domain_error("pinney_solution: sigma0 must be > 0");
  if (!(p.omega0 >= Scalar(0))) throw std::domain_error("pinney_solution: omega0 must be >= 0");
  const auto basis = pinney_basis(t, sigma0, sigma_dot0, p);
  const Scalar c = basis.k / (basis.wronskian * basis.wronskian);
  const Scalar sigma = sqrt(basis.u * basis.u + c * basis.v * basis.v);
  const Scalar sigma_dot = (basis.u * basis.u_dot + c * basis.v * basis.v_dot) / sigma;
  return {sigma, sigma_dot};
}

/// Second derivative of the Pinney solution, obtained by differentiating the
/// closed form (uses u'' = -w^2 u, v'' = -w^2 v).
template <class Scalar>
Scalar pinney_acceleration(Scalar t, Scalar sigma0, Scalar sigma_dot0,
                           const BasicPhysicalParams<Scalar>& p) {
  const auto basis = pinney_basis(t, sigma0, sigma_dot0, p);
  const auto st = pinney_solution(t, sigma0, sigma_dot0, p);
  const Scalar c = basis.k / (basis.wronskian * basis.wronskian);
  const Scalar w2 = p.omega0 * p.omega0;
  // (sigma^2)'' / 2 = u'^2 + c v'^2 - w^2 sigma^2 and sigma'' = ((sigma^2)''/2 - sigma'^2)/sigma
  const Scalar half_ddot_sq = basis.u_dot * basis.u_dot + c * basis.v_dot * basis.v_dot -
                              w2 * st.sigma * st.sigma;
  return (half_ddot_sq - st.sigma_dot * st.sigma_dot) / st.sigma;
}

/// Ballistic spreading of a free Gaussian packet released at rest.
template <class Scalar>
Scalar free_spreading(Scalar t, Scalar sigma0, const BasicPhysicalParams<Scalar>& p) {
  using std::sqrt;
  if (p.omega0 != Scalar(0)) throw std::invalid_argument("free_spreading: requires omega0 = 0");
  if (!(sigma0 > Scalar(0))) throw std::domain_error("free_spreading: sigma0 must be > 0");
  const Scalar spread = p.hbar * t / (Scalar(2) * p.m * sigma0);
  return sqrt(sigma0 * sigma0 + spread * spread);
}

/// Strong-friction relaxation from sigma(0) = 0 to the ground state:
/// sigma^2 = (hbar/(2 m w)) sqrt(1 - exp(-4 m w^2 t / b)).
template <class Scalar>
BasicState<Scalar> overdamped_relaxation_state(Scalar t, const BasicPhysicalParams<Scalar>& p) {
  using std::exp;
  using std::sqrt;
  if (!(p.b > Scalar(0))) throw std::invalid_argument("overdamped_relaxation: requires b > 0");
  if (!(p.omega0 > Scalar(0))) throw std::invalid_argument("overdamped_relaxation: requires omega0 > 0");
  if (t < Scalar(0)) throw std::domain_error("overdamped_relaxation: t must be >= 0");
  const Scalar rate = Scalar(4) * p.m * p.omega0 * p.omega0 / p.b;
  const Scalar scale = p.hbar / (Scalar(2) * p.m * p.omega0);
  const Scalar decay = exp(-rate * t);
  const Scalar root = sqrt(-std::expm1(-rate * t));
  const Scalar sigma = sqrt(scale * root);
  if (t == Scalar(0)) return {Scalar(0), Scalar(0)};
  // d(sigma^2)/dt = scale * rate * decay / (2 root)
  const Scalar d_sigma_sq = scale * rate * decay / (Scalar(2) * root);
  return {sigma, d_sigma_sq / (Scalar(2) * sigma)};
}

template <class Scalar>
Scalar overdamped_relaxation(Scalar t, const BasicPhysicalParams<Scalar>& p) {
  return overdamped_relaxation_state(t, p).sigma;
}

/// Free particle under strong friction: sigma^2 = hbar sqrt(t/(m b)).
template <class Scalar>
BasicState<Scalar> subdiffusion_state(Scalar t, const BasicPhysicalParams<Scalar>& p) {
  using std::sqrt;
  if (p.omega0 != Scalar(0)) throw std::invalid_argument("subdiffusion: requires omega0 = 0");
  if (!(p.b > Scalar(0))) throw std::invalid_argument("subdiffusion: requires b > 0");
  if (t < Scalar(0)) throw std::domain_error("subdiffusion: t must be >= 0");
  if (t == Scalar(0)) return {Scalar(0), Scalar(0)};
  const Scalar sigma = sqrt(p.hbar * sqrt(t / (p.m * p.b)));
  // sigma ~ t^(1/4)
  return {sigma, sigma / (Scalar(4) * t)};
}

template <class Scalar>
Scalar subdiffusion(Scalar t, const BasicPhysicalParams<Scalar>& p) {
  return subdiffusion_state(t, p).sigma;
}

/// Quantum-statistical equilibrium width, sigma^2 = (hbar/(2 m w)) coth(beta hbar w / 2).
template <class Scalar>
Scalar equilibrium_coth(Scalar beta, const BasicPhysicalParams<Scalar>& p) {
  using std::tanh;
  if (!(p.omega0 > Scalar(0))) throw std::invalid_argument("equilibrium_coth: requires omega0 > 0");
  if (!(beta > Scalar(0))) throw std::domain_error("equilibrium_coth: beta must be > 0");
  return p.hbar / (Scalar(2) * p.m * p.omega0 * tanh(beta * p.hbar * p.omega0 / Scalar(2)));
}

/// Equilibrium of the high-temperature equation: positive root of
/// m w^2 s^4 - s^2/beta - hbar^2/(4 m) = 0, i.e.
/// s^2 = [sqrt(1 + (beta hbar w)^2) + 1] / (2 beta m w^2).
template <class Scalar>
Scalar equilibrium_closed_form(Scalar beta, const BasicPhysicalParams<Scalar>& p) {
  using std::sqrt;
  if (!(p.omega0 > Scalar(0))) throw std::invalid_argument("equilibrium_closed_form: requires omega0 > 0");
  if (!(beta > Scalar(0))) throw std::domain_error("equilibrium_closed_form: beta must be > 0");
  const Scalar x = beta * p.hbar * p.omega0;
  return (sqrt(Scalar(1) + x * x) + Scalar(1)) / (Scalar(2) * beta * p.m * p.omega0 * p.omega0);
}

}  // namespace ermakov::analytic
