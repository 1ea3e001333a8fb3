#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string_view>

#include "ermakov/core.hpp"
#include "ermakov/detail/mutation.hpp"

namespace ermakov {

enum class ModelVariant {
  Conservative,               // m s'' + m w^2 s = hbar^2/(4 m s^3)
  Dissipative,                // + b s'
  HighTemperature,            // + b s', extra k_B T / s on the right
  RadiativeNaive,             // third order, - r s''' on the left
  RadiativeReduced,           // order-reduced radiation reaction
  OverdampedDissipative,      // Dissipative without inertia
  OverdampedHighTemperature,  // HighTemperature without inertia
};

inline constexpr std::array<ModelVariant, 7> kAllModelVariants{
    ModelVariant::Conservative,          ModelVariant::Dissipative,
    ModelVariant::HighTemperature,       ModelVariant::RadiativeNaive,
    ModelVariant::RadiativeReduced,      ModelVariant::OverdampedDissipative,
    ModelVariant::OverdampedHighTemperature};

constexpr std::string_view to_string(ModelVariant v) {
  switch (v) {
    case ModelVariant::Conservative: return "conservative";
    case ModelVariant::Dissipative: return "dissipative";
    case ModelVariant::HighTemperature: return "high_temperature";
    case ModelVariant::RadiativeNaive: return "radiative_naive";
    case ModelVariant::RadiativeReduced: return "radiative_reduced";
    case ModelVariant::OverdampedDissipative: return "overdamped_dissipative";
    case ModelVariant::OverdampedHighTemperature: return "overdamped_high_temperature";
  }
  return "unknown";
}

constexpr std::optional<ModelVariant> parse_model_variant(std::string_view name) {
  for (ModelVariant v : kAllModelVariants)
    if (to_string(v) == name) return v;
  return std::nullopt;
}

/// Number of state components integrated for the variant: 1 for the
/// overdamped forms, 3 for the naive radiative model, 2 otherwise.
constexpr int state_dimension(ModelVariant v) {
  switch (v) {
    case ModelVariant::OverdampedDissipative:
    case ModelVariant::OverdampedHighTemperature: return 1;
    case ModelVariant::RadiativeNaive: return 3;
    default: return 2;
  }
}

constexpr bool is_overdamped(ModelVariant v) { return state_dimension(v) == 1; }

namespace detail {

template <class Scalar>
void require_positive_sigma(Scalar sigma, const char* where) {
  if (!(sigma > Scalar(0))) throw std::domain_error(std::string(where) + ": sigma must be > 0");
}

template <class Scalar>
Scalar quantum_acceleration(Scalar sigma, const BasicPhysicalParams<Scalar>& p) {
  if constexpr (kDropQuantumTerm) return Scalar(0);
  return p.hbar * p.hbar / (Scalar(4) * p.m * p.m * sigma * sigma * sigma);
}

template <class Scalar>
Scalar finite_beta(const BasicPhysicalParams<Scalar>& p, const char* where) {
  if (p.beta.is_zero_temperature())
    throw std::invalid_argument(std::string(where) + ": requires finite beta");
  return p.beta.value();
}

}  // namespace detail

template <class Scalar>
Scalar acceleration_conservative(Scalar sigma, const BasicPhysicalParams<Scalar>& p) {
  detail::require_positive_sigma(sigma, "acceleration_conservative");
  return -p.omega0 * p.omega0 * sigma + detail::quantum_acceleration(sigma, p);
}

template <class Scalar>
Scalar acceleration_dissipative(const BasicState<Scalar>& s, const BasicPhysicalParams<Scalar>& p) {
  return acceleration_conservative(s.sigma, p) - (p.b / p.m) * s.sigma_dot;
}

template <class Scalar>
Scalar acceleration_high_temperature(const BasicState<Scalar>& s, const BasicPhysicalParams<Scalar>& p) {
  const Scalar beta = detail::finite_beta(p, "acceleration_high_temperature");
  return acceleration_dissipative(s, p) + Scalar(1) / (p.m * beta * s.sigma);
}

/// Jerk of the naive radiative model, solved explicitly from
/// m s'' - r s''' + m w^2 s = hbar^2/(4 m s^3).
template <class Scalar>
Scalar jerk_radiative(const BasicState3<Scalar>& s, const BasicPhysicalParams<Scalar>& p) {
  detail::require_positive_sigma(s.sigma, "jerk_radiative");
  if (!(p.r > Scalar(0))) throw std::invalid_argument("jerk_radiative: r must be > 0");
  const Scalar jerk = (p.m * s.sigma_ddot - p.m * acceleration_conservative(s.sigma, p)) / p.r;
  if constexpr (detail::kFlipRadiationSign) return -jerk;
  return jerk;
}

/// Effective friction induced by order reduction of the radiation term,
/// (r/m)(w^2 + 3 hbar^2/(4 m^2 s^4)).
template <class Scalar>
Scalar radiative_friction_rate(Scalar sigma, const BasicPhysicalParams<Scalar>& p) {
  const Scalar s2 = sigma * sigma;
  return (p.r / p.m) *
         (p.omega0 * p.omega0 + Scalar(3) * p.hbar * p.hbar / (Scalar(4) * p.m * p.m * s2 * s2));
}

/// Second-order surrogate for the radiative model: the jerk is replaced by
/// d/dt of the conservative acceleration.
template <class Scalar>
Scalar acceleration_radiative_reduced(const BasicState<Scalar>& s, const BasicPhysicalParams<Scalar>& p) {
  return acceleration_conservative(s.sigma, p) - radiative_friction_rate(s.sigma, p) * s.sigma_dot;
}

template <class Scalar>
Scalar overdamped_velocity(Scalar sigma, const BasicPhysicalParams<Scalar>& p, ModelVariant variant) {
  detail::require_positive_sigma(sigma, "overdamped_velocity");
  if (!is_overdamped(variant))
    throw std::invalid_argument("overdamped_velocity: variant is not an overdamped model");
  if (!(p.b > Scalar(0))) throw std::invalid_argument("overdamped_velocity: requires b > 0");
  Scalar force = p.m * (acceleration_conservative(sigma, p));
  if (variant == ModelVariant::OverdampedHighTemperature)
    force += Scalar(1) / (detail::finite_beta(p, "overdamped_velocity") * sigma);
  return force / p.b;
}

/// Acceleration of any second-order variant.
template <class Scalar>
Scalar acceleration(ModelVariant variant, const BasicState<Scalar>& s, const BasicPhysicalParams<Scalar>& p) {
  switch (variant) {
    case ModelVariant::Conservative: return acceleration_conservative(s.sigma, p);
    case ModelVariant::Dissipative: return acceleration_dissipative(s, p);
    case ModelVariant::HighTemperature: return acceleration_high_temperature(s, p);
    case ModelVariant::RadiativeReduced: return acceleration_radiative_reduced(s, p);
    default: break;
  }
  throw std::invalid_argument("acceleration: variant " + std::string(to_string(variant)) +
                              " is not a second-order model");
}

/// Governing equation with every term moved to the left, in force units.
/// For second-order variants `derivative` is the supplied sigma''; for the
/// overdamped variants it is the supplied sigma' (state.sigma_dot is unused).
/// Zero exactly when the supplied derivative satisfies the equation.
template <class Scalar>
Scalar residual(ModelVariant variant, const BasicState<Scalar>& s, Scalar derivative,
                const BasicPhysicalParams<Scalar>& p) {
  detail::require_positive_sigma(s.sigma, "residual");
  const Scalar s3 = s.sigma * s.sigma * s.sigma;
  const Scalar restoring = p.m * p.omega0 * p.omega0 * s.sigma;
  const Scalar quantum = p.hbar * p.hbar / (Scalar(4) * p.m * s3);
  switch (variant) {
    case ModelVariant::Conservative:
      return p.m * derivative + restoring - quantum;
    case ModelVariant::Dissipative:
      return p.m * derivative + p.b * s.sigma_dot + restoring - quantum;
    case ModelVariant::HighTemperature: {
      const Scalar beta = detail::finite_beta(p, "residual");
      return p.m * derivative + p.b * s.sigma_dot + restoring - Scalar(1) / (beta * s.sigma) - quantum;
    }
    case ModelVariant::RadiativeReduced:
      return p.m * derivative + p.m * radiative_friction_rate(s.sigma, p) * s.sigma_dot + restoring -
             quantum;
    case ModelVariant::OverdampedDissipative:
      return p.b * derivative + restoring - quantum;
    case ModelVariant::OverdampedHighTemperature: {
      const Scalar beta = detail::finite_beta(p, "residual");
      return p.b * derivative + restoring - Scalar(1) / (beta * s.sigma) - quantum;
    }
    case ModelVariant::RadiativeNaive:
      break;
  }
  throw std::invalid_argument("residual: radiative_naive needs a State3 and a jerk");
}

/// Third-order residual m s'' - r s''' + m w^2 s - hbar^2/(4 m s^3).
template <class Scalar>
Scalar residual(ModelVariant variant, const BasicState3<Scalar>& s, Scalar jerk,
                const BasicPhysicalParams<Scalar>& p) {
  if (variant != ModelVariant::RadiativeNaive)
    throw std::invalid_argument("residual: State3 is only valid for radiative_naive");
  detail::require_positive_sigma(s.sigma, "residual");
  const Scalar s3 = s.sigma * s.sigma * s.sigma;
  return p.m * s.sigma_ddot - p.r * jerk + p.m * p.omega0 * p.omega0 * s.sigma -
         p.hbar * p.hbar / (Scalar(4) * p.m * s3);
}

}  // namespace ermakov
