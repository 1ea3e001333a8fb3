#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace ermakov {

/// Inverse temperature beta = 1/(k_B T).  Zero temperature is an explicit
/// state rather than a large float so that thermal terms vanish identically.
template <class Scalar>
class InverseTemperature {
 public:
  constexpr InverseTemperature() = default;

  static constexpr InverseTemperature zero_temperature() { return {}; }

  static InverseTemperature finite(Scalar beta) {
    using std::isfinite;
    if (!(beta > Scalar(0)) || !isfinite(beta))
      throw std::invalid_argument("beta must be finite and > 0 (use zero_temperature() for T = 0)");
    InverseTemperature out;
    out.beta_ = beta;
    out.finite_ = true;
    return out;
  }

  constexpr bool is_zero_temperature() const { return !finite_; }

  Scalar value() const {
    if (!finite_) throw std::logic_error("zero-temperature marker has no finite beta");
    return beta_;
  }

  /// k_B T = 1/beta; exactly zero at zero temperature.
  constexpr Scalar thermal_energy() const { return finite_ ? Scalar(1) / beta_ : Scalar(0); }

  template <class Other>
  InverseTemperature<Other> cast() const {
    return finite_ ? InverseTemperature<Other>::finite(static_cast<Other>(beta_))
                   : InverseTemperature<Other>::zero_temperature();
  }

  friend constexpr bool operator==(const InverseTemperature&, const InverseTemperature&) = default;

 private:
  Scalar beta_{0};
  bool finite_{false};
};

/// Physical constants and coefficients of the oscillator and its environment.
/// Units are whatever the caller uses; make_natural_params() sets
/// m = hbar = omega0 = k_B = 1.
template <class Scalar>
struct BasicPhysicalParams {
  Scalar m{1};
  Scalar omega0{1};
  Scalar hbar{1};
  Scalar b{0};  // friction coefficient, held fixed across temperatures
  InverseTemperature<Scalar> beta{};
  Scalar k_B{1};
  Scalar r{0};  // radiation coefficient e^2/(6 pi eps0 c^3)

  void validate() const {
    using std::isfinite;
    auto positive = [](Scalar v) { return v > Scalar(0) && isfinite(v); };
    auto non_negative = [](Scalar v) { return v >= Scalar(0) && isfinite(v); };
    if (!positive(m)) throw std::invalid_argument("m must be > 0");
    if (!positive(hbar)) throw std::invalid_argument("hbar must be > 0");
    if (!positive(k_B)) throw std::invalid_argument("k_B must be > 0");
    if (!non_negative(omega0)) throw std::invalid_argument("omega0 must be >= 0");
    if (!non_negative(b)) throw std::invalid_argument("b must be >= 0");
    if (!non_negative(r)) throw std::invalid_argument("r must be >= 0");
  }

  template <class Other>
  BasicPhysicalParams<Other> cast() const {
    return {static_cast<Other>(m),   static_cast<Other>(omega0), static_cast<Other>(hbar),
            static_cast<Other>(b),   beta.template cast<Other>(), static_cast<Other>(k_B),
            static_cast<Other>(r)};
  }
};

using PhysicalParams = BasicPhysicalParams<double>;

template <class Scalar>
struct BasicState {
  Scalar sigma{1};
  Scalar sigma_dot{0};
};

template <class Scalar>
struct BasicState3 {
  Scalar sigma{1};
  Scalar sigma_dot{0};
  Scalar sigma_ddot{0};
};

using State = BasicState<double>;
using State3 = BasicState3<double>;

struct RadiationInputs {
  double e{0};
  double epsilon0{8.8541878128e-12};
  double c{2.99792458e8};
};

/// Dimensionless groups gamma = b/(m omega0), theta = k_B T/(hbar omega0),
/// epsilon = r omega0/m.
struct DimensionlessGroups {
  double gamma{0};
  double theta{0};
  double epsilon{0};
};

/// Natural units m = hbar = omega0 = k_B = 1.  theta = 0 selects zero
/// temperature.
inline PhysicalParams make_natural_params(double gamma, double theta, double epsilon) {
  if (!(gamma >= 0.0)) throw std::invalid_argument("gamma must be >= 0");
  if (!(theta >= 0.0)) throw std::invalid_argument("theta must be >= 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
  PhysicalParams p;
  p.b = gamma;
  p.r = epsilon;
  p.beta = theta == 0.0 ? InverseTemperature<double>::zero_temperature()
                        : InverseTemperature<double>::finite(1.0 / theta);
  return p;
}

template <class Scalar>
DimensionlessGroups dimensionless_groups(const BasicPhysicalParams<Scalar>& p) {
  if (!(p.omega0 > Scalar(0))) throw std::invalid_argument("dimensionless groups need omega0 > 0");
  DimensionlessGroups g;
  g.gamma = static_cast<double>(p.b / (p.m * p.omega0));
  g.theta = static_cast<double>(p.beta.thermal_energy() / (p.hbar * p.omega0));
  g.epsilon = static_cast<double>(p.r * p.omega0 / p.m);
  return g;
}

inline double radiation_coefficient(const RadiationInputs& in) {
  if (!(in.epsilon0 > 0.0)) throw std::invalid_argument("epsilon0 must be > 0");
  if (!(in.c > 0.0)) throw std::invalid_argument("c must be > 0");
  return in.e * in.e / (6.0 * std::numbers::pi * in.epsilon0 * in.c * in.c * in.c);
}

/// sqrt(hbar/(2 m omega0)), the stationary width of the conservative equation.
template <class Scalar>
Scalar ground_state_sigma(const BasicPhysicalParams<Scalar>& p) {
  using std::sqrt;
  if (!(p.omega0 > Scalar(0)))
    throw std::domain_error("ground_state_sigma: omega0 = 0 has no stationary width");
  return sqrt(p.hbar / (Scalar(2) * p.m * p.omega0));
}

/// First integral of the conservative width equation,
/// E = m sdot^2/2 + m omega0^2 s^2/2 + hbar^2/(8 m s^2).
template <class Scalar>
Scalar energy(const BasicState<Scalar>& s, const BasicPhysicalParams<Scalar>& p) {
  if (!(s.sigma > Scalar(0))) throw std::domain_error("energy: sigma must be > 0");
  const Scalar half{0.5};
  return half * p.m * s.sigma_dot * s.sigma_dot +
         half * p.m * p.omega0 * p.omega0 * s.sigma * s.sigma +
         p.hbar * p.hbar / (Scalar(8) * p.m * s.sigma * s.sigma);
}

}  // namespace ermakov
