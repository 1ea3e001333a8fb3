#include <doctest.h>

#include <cmath>

#include "ermakov/core.hpp"
#include "ermakov/models.hpp"
#include "test_support.hpp"

using namespace ermakov;
using ermakov::testing::rel_err;
using ermakov::testing::Sampler;

TEST_CASE("natural params map the dimensionless groups onto fields") {
  const PhysicalParams conservative = make_natural_params(0, 0, 0);
  CHECK(conservative.m == 1.0);
  CHECK(conservative.hbar == 1.0);
  CHECK(conservative.omega0 == 1.0);
  CHECK(conservative.k_B == 1.0);
  CHECK(conservative.beta.is_zero_temperature());
  CHECK(ground_state_sigma(conservative) == doctest::Approx(0.70710678118654752).epsilon(1e-15));

  const PhysicalParams damped = make_natural_params(10, 0, 0);
  CHECK(damped.b == 10.0);
  CHECK(damped.beta.is_zero_temperature());

  const PhysicalParams warm = make_natural_params(0, 0.5, 0);
  CHECK(warm.beta.value() == 2.0);
}

TEST_CASE("natural params reject negative groups") {
  CHECK_THROWS_AS(make_natural_params(-1, 0, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_natural_params(0, -0.1, 0), std::invalid_argument);
  CHECK_THROWS_AS(make_natural_params(0, 0, -1e-3), std::invalid_argument);
}

TEST_CASE("dimensionless groups round-trip exactly") {
  for (double gamma : {0.0, 0.5, 3.0, 10.0, 20.0})
    for (double theta : {0.0, 0.25, 0.5, 1.0, 4.0})
      for (double epsilon : {0.0, 1e-4, 1e-2, 0.125}) {
        const auto g = dimensionless_groups(make_natural_params(gamma, theta, epsilon));
        CHECK(g.gamma == gamma);
        CHECK(g.theta == theta);
        CHECK(g.epsilon == epsilon);
      }
}

TEST_CASE("inverse temperature marker") {
  using Beta = InverseTemperature<double>;
  CHECK(Beta::zero_temperature().thermal_energy() == 0.0);
  CHECK_THROWS_AS(Beta::zero_temperature().value(), std::logic_error);
  CHECK_THROWS_AS(Beta::finite(0.0), std::invalid_argument);
  CHECK_THROWS_AS(Beta::finite(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(Beta::finite(INFINITY), std::invalid_argument);
  CHECK(Beta::finite(4.0).thermal_energy() == 0.25);
}

TEST_CASE("params validation") {
  PhysicalParams p;
  CHECK_NOTHROW(p.validate());
  p.m = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.b = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = {};
  p.hbar = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("rescaled conservative equation is s'' + s = 1/s^3") {
  // sigma = lambda s, tau = omega0 t with lambda^2 = hbar/(2 m omega0).
  Sampler rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    PhysicalParams p;
    p.m = rng.log_uniform(0.1, 10);
    p.hbar = rng.log_uniform(0.1, 10);
    p.omega0 = rng.log_uniform(0.1, 10);
    const double lambda = std::sqrt(p.hbar / (2 * p.m * p.omega0));
    const double s = rng.uniform(0.2, 5);
    const double scaled = acceleration_conservative(lambda * s, p) / (lambda * p.omega0 * p.omega0);
    CHECK(scaled == doctest::Approx(-s + 1 / (s * s * s)).epsilon(1e-12));
  }
}

TEST_CASE("radiation coefficient") {
  CHECK(radiation_coefficient({0.0, 8.8541878128e-12, 2.99792458e8}) == 0.0);

  const RadiationInputs electron{1.602176634e-19, 8.8541878128e-12, 2.99792458e8};
  const double r = radiation_coefficient(electron);
  // e^2 / (6 pi eps0 c^3) evaluated by hand
  CHECK(rel_err(r, 5.708326765e-54) < 1e-9);
  CHECK(rel_err(r / 9.1093837015e-31, 6.26642477e-24) < 1e-8);

  Sampler rng(3);
  for (int i = 0; i < 20; ++i) {
    const double lambda = rng.uniform(0.1, 10);
    RadiationInputs scaled = electron;
    scaled.e *= lambda;
    CHECK(rel_err(radiation_coefficient(scaled), lambda * lambda * r) < 1e-14);
  }
  CHECK_THROWS_AS(radiation_coefficient({1.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(radiation_coefficient({1.0, 1.0, -1.0}), std::invalid_argument);
}

TEST_CASE("ground state width") {
  PhysicalParams p;
  CHECK(ground_state_sigma(p) == doctest::Approx(0.7071067811865476).epsilon(1e-15));
  PhysicalParams heavy = p;
  heavy.m = 4;
  CHECK(ground_state_sigma(heavy) == doctest::Approx(0.5 * ground_state_sigma(p)).epsilon(1e-15));
  PhysicalParams two_hbar = p;
  two_hbar.hbar = 2;
  CHECK(ground_state_sigma(two_hbar) == doctest::Approx(1.0).epsilon(1e-15));
  PhysicalParams free = p;
  free.omega0 = 0;
  CHECK_THROWS_AS(ground_state_sigma(free), std::domain_error);
}

TEST_CASE("energy first integral values") {
  const PhysicalParams p = make_natural_params(0, 0, 0);
  CHECK(energy(State{2.0, 0.0}, p) == doctest::Approx(2.03125).epsilon(1e-15));
  CHECK(energy(State{0.25, 0.0}, p) == doctest::Approx(2.03125).epsilon(1e-15));
  CHECK(energy(State{ground_state_sigma(p), 0.0}, p) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK_THROWS_AS(energy(State{0.0, 0.0}, p), std::domain_error);
}

TEST_CASE("energy is minimised at the ground state") {
  Sampler rng(5);
  for (int i = 0; i < 20; ++i) {
    PhysicalParams p;
    p.m = rng.log_uniform(0.5, 2);
    p.hbar = rng.log_uniform(0.5, 2);
    p.omega0 = rng.log_uniform(0.5, 2);
    const double sg = ground_state_sigma(p);
    const double e0 = energy(State{sg, 0.0}, p);
    CHECK(e0 == doctest::Approx(p.hbar * p.omega0 / 2).epsilon(1e-14));
    for (double f : {0.5, 0.9, 0.999, 1.001, 1.1, 3.0}) CHECK(energy(State{f * sg, 0.0}, p) > e0);
    CHECK(energy(State{sg, 1e-3}, p) > e0);
  }
}

TEST_CASE("energy derivative along the dissipative flow is -b sigma'^2") {
  Sampler rng(9);
  for (int i = 0; i < 30; ++i) {
    PhysicalParams p = make_natural_params(rng.uniform(0, 5), 0, 0);
    const State s{rng.uniform(0.3, 3), rng.uniform(-2, 2)};
    const double a = acceleration_dissipative(s, p);
    // dE/dt = dE/dsigma * sigma' + dE/dsigma' * sigma''
    const double dE_dsigma = p.omega0 * p.omega0 * s.sigma - p.hbar * p.hbar / (4 * s.sigma * s.sigma * s.sigma);
    const double rate = dE_dsigma * s.sigma_dot + s.sigma_dot * a;
    CHECK(rate == doctest::Approx(-p.b * s.sigma_dot * s.sigma_dot).epsilon(1e-12).scale(1.0));
  }
}
