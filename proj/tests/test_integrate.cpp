#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ermakov/analytic.hpp"
#include "ermakov/integrate.hpp"
#include "test_support.hpp"

using namespace ermakov;
using ermakov::testing::rel_err;

namespace {

constexpr double kPi = std::numbers::pi;
const double kSg = std::sqrt(0.5);

PhysicalParams free_particle() {
  PhysicalParams p;
  p.omega0 = 0;
  return p;
}

double pinney_error(const IntegrationResult& r, double s0, double v0) {
  double worst = 0;
  const auto& tr = r.trajectory;
  for (std::size_t i = 0; i < tr.size(); ++i)
    worst = std::max(worst, rel_err(tr.state(i).sigma, analytic::pinney_solution(tr.time(i), s0, v0, tr.params).sigma));
  return worst;
}

// local maxima of sigma along the stored nodes
std::vector<double> peaks(const Trajectory& tr) {
  std::vector<double> out;
  for (std::size_t i = 1; i + 1 < tr.size(); ++i) {
    const double a = tr.state(i - 1).sigma, b = tr.state(i).sigma, c = tr.state(i + 1).sigma;
    if (b > a && b >= c) out.push_back(b);
  }
  return out;
}

}  // namespace

TEST_CASE("fixed point stays put") {
  const auto r = integrate(ModelVariant::Conservative, State{kSg, 0.0}, {0, 10}, PhysicalParams{});
  REQUIRE(r.stop == StopReason::ReachedEnd);
  for (std::size_t i = 0; i < r.trajectory.size(); ++i)
    CHECK(rel_err(r.trajectory.state(i).sigma, kSg) <= 1e-8);
}

TEST_CASE("free particle spreads ballistically") {
  const PhysicalParams p = free_particle();
  const auto r = integrate(ModelVariant::Conservative, State{1.0, 0.0}, {0, 2}, p);
  REQUIRE(r.stop == StopReason::ReachedEnd);
  CHECK(rel_err(r.trajectory.state(r.trajectory.size() - 1).sigma, std::sqrt(2.0)) <= 1e-8);
  CHECK(rel_err(sample(r.trajectory, 1.0).sigma, analytic::free_spreading(1.0, 1.0, p)) <= 1e-8);
}

TEST_CASE("pinney example point") {
  const auto r = integrate(ModelVariant::Conservative, State{2.0, 0.0}, {0, kPi / 2}, PhysicalParams{});
  REQUIRE(r.stop == StopReason::ReachedEnd);
  CHECK(rel_err(r.trajectory.state(r.trajectory.size() - 1).sigma, 0.25) <= 1e-8);
}

TEST_CASE("conservative runs follow the closed form for ten periods") {
  for (double f : {0.5, 1.0, 2.0, 4.0}) {
    const auto r = integrate(ModelVariant::Conservative, State{f * kSg, 0.0}, {0, 20 * kPi}, PhysicalParams{});
    REQUIRE(r.stop == StopReason::ReachedEnd);
    CHECK(pinney_error(r, f * kSg, 0.0) <= 1e-8);
  }
}

TEST_CASE("conservative energy is conserved") {
  for (const State s0 : {State{2.0, 0.0}, State{0.3, 1.0}, State{5.0, -2.0}}) {
    const PhysicalParams p;
    const auto r = integrate(ModelVariant::Conservative, s0, {0, 20 * kPi}, p);
    const double e0 = energy(s0, p);
    double worst = 0;
    for (const auto& d : r.trajectory.diagnostics) worst = std::max(worst, rel_err(d.energy, e0));
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("dissipative energy decreases and balances the friction work") {
  const PhysicalParams p = make_natural_params(0.5, 0, 0);
  IntegratorConfig cfg;
  cfg.rel_tol = 1e-11;
  cfg.abs_tol = 1e-13;
  const auto r = integrate(ModelVariant::Dissipative, State{2.0, 0.5}, {0, 10}, p, cfg);
  REQUIRE(r.stop == StopReason::ReachedEnd);
  const auto& d = r.trajectory.diagnostics;
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i].energy <= d[i - 1].energy + 1e-12);

  // composite Simpson on the dense output
  const int n = 20000;
  const double h = 10.0 / n;
  double work = 0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1 : (k % 2 ? 4 : 2);
    const double v = sample(r.trajectory, k * h).sigma_dot;
    work += w * p.b * v * v;
  }
  work *= h / 3;
  const double e0 = d.front().energy, e1 = d.back().energy;
  CHECK(std::abs((e1 - e0) + work) / e0 <= 1e-6);
}

TEST_CASE("time reversal returns to the start") {
  const PhysicalParams p;
  const State s0{1.3, 0.4};
  const auto fwd = integrate(ModelVariant::Conservative, s0, {0, 7}, p);
  const State end = fwd.trajectory.state(fwd.trajectory.size() - 1);
  const auto back = integrate(ModelVariant::Conservative, State{end.sigma, -end.sigma_dot}, {0, 7}, p);
  const State last = back.trajectory.state(back.trajectory.size() - 1);
  CHECK(rel_err(last.sigma, s0.sigma) <= 1e-6);
  CHECK(rel_err(-last.sigma_dot, s0.sigma_dot) <= 1e-6);
}

TEST_CASE("tightening the tolerance 100x gains at least 10x") {
  const PhysicalParams p;
  auto final_error = [&](double tol) {
    IntegratorConfig c;
    c.rel_tol = tol;
    c.abs_tol = tol * 1e-3;
    const auto r = integrate(ModelVariant::Conservative, State{2.0, 0.3}, {0, 20 * kPi}, p, c);
    const auto n = r.trajectory.size() - 1;
    return rel_err(r.trajectory.state(n).sigma, analytic::pinney_solution(r.trajectory.time(n), 2.0, 0.3, p).sigma);
  };
  CHECK(final_error(1e-7) / final_error(1e-9) >= 10);
}

TEST_CASE("implicit scheme agrees with the closed form") {
  IntegratorConfig c;
  c.scheme = Scheme::ImplicitAStable;
  c.rel_tol = 1e-10;
  const auto r = integrate(ModelVariant::Conservative, State{2.0, 0.0}, {0, 2 * kPi}, PhysicalParams{}, c);
  REQUIRE(r.stop == StopReason::ReachedEnd);
  CHECK(pinney_error(r, 2.0, 0.0) <= 1e-6);
}

TEST_CASE("reduced radiative model relaxes to the ground state") {
  const PhysicalParams p = make_natural_params(0, 0, 0.05);
  const auto r = integrate(ModelVariant::RadiativeReduced, State{2 * kSg, 0.0}, {0, 200}, p);
  REQUIRE(r.stop == StopReason::ReachedEnd);
  const auto& d = r.trajectory.diagnostics;
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i].energy <= d[i - 1].energy + 1e-12);
  CHECK(d.back().energy == doctest::Approx(0.5).epsilon(1e-6));
  const auto pk = peaks(r.trajectory);
  REQUIRE(pk.size() > 5);
  for (std::size_t i = 1; i < pk.size(); ++i) CHECK(pk[i] < pk[i - 1] + 1e-12);
}

TEST_CASE("reduced radiative model converges to the conservative one as r -> 0") {
  // sup-norm gap over t in [0, 1] from (2 sigma_g, 0); order per decade of r
  IntegratorConfig c;
  c.rel_tol = 1e-12;
  c.abs_tol = 1e-14;
  const State s0{2 * kSg, 0.0};
  const auto ref = integrate(ModelVariant::Conservative, s0, {0, 1}, PhysicalParams{}, c);
  const auto times = uniform_times({0, 1}, 101);
  double prev = 0;
  for (double r : {1e-2, 1e-3, 1e-4}) {
    const auto run = integrate(ModelVariant::RadiativeReduced, s0, {0, 1}, make_natural_params(0, 0, r), c);
    double gap = 0;
    for (double t : times)
      gap = std::max(gap, std::abs(sample(run.trajectory, t).sigma - sample(ref.trajectory, t).sigma));
    if (prev > 0) CHECK(std::log10(prev / gap) >= 0.95);
    prev = gap;
  }
}

TEST_CASE("naive radiative model runs away from a perturbed start") {
  const PhysicalParams p = make_natural_params(0, 0, 0.01);
  State3 s = default_radiative_initial(State{2 * kSg, 0.0}, p);
  CHECK(s.sigma_ddot == acceleration_conservative(2 * kSg, p));
  s.sigma_ddot += 0.1;
  const auto r = integrate(ModelVariant::RadiativeNaive, s, {0, 100}, p);
  CHECK(r.stop == StopReason::RunawayDetected);
  CHECK(r.trajectory.dense.back_time() < 1.0);
}

TEST_CASE("overdamped relaxation matches the closed form") {
  const PhysicalParams p = make_natural_params(10, 0, 0);
  const double t0 = 0.05;
  const auto r = integrate_overdamped(ModelVariant::OverdampedDissipative, analytic::overdamped_relaxation(t0, p),
                                      {t0, 1.0}, p);
  REQUIRE(r.stop == StopReason::ReachedEnd);
  const double s = r.trajectory.state(r.trajectory.size() - 1).sigma;
  CHECK(rel_err(s * s, 0.5 * std::sqrt(-std::expm1(-0.4))) <= 1e-6);
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) {
    const State st = r.trajectory.state(i);
    CHECK(st.sigma_dot == overdamped_velocity(st.sigma, p, ModelVariant::OverdampedDissipative));
  }
}

TEST_CASE("full equation approaches the overdamped law as 1/b") {
  auto gap = [](double gamma) {
    const PhysicalParams p = make_natural_params(gamma, 0, 0);
    const double t0 = 0.05;
    IntegratorConfig cfg;
    cfg.scheme = Scheme::ImplicitAStable;
    const auto r = integrate(ModelVariant::Dissipative, analytic::overdamped_relaxation_state(t0, p), {t0, 3.0}, p, cfg);
    REQUIRE(r.stop == StopReason::ReachedEnd);
    double worst = 0;
    for (double t : uniform_times({t0, 3.0}, 301)) {
      const double s = sample(r.trajectory, t).sigma, e = analytic::overdamped_relaxation(t, p);
      worst = std::max(worst, rel_err(s * s, e * e));
    }
    return worst;
  };
  const double g100 = gap(100), g1000 = gap(1000);
  // inertia is not negligible at b = 100: about 3% in sigma^2
  CHECK(g100 == doctest::Approx(0.0292).epsilon(0.02));
  CHECK(g100 / g1000 >= 7);
  CHECK(g100 / g1000 <= 13);
}

TEST_CASE("overdamped free particle subdiffuses") {
  PhysicalParams p = make_natural_params(10, 0, 0);
  p.omega0 = 0;
  const double t0 = 0.1;
  const auto r =
      integrate_overdamped(ModelVariant::OverdampedDissipative, analytic::subdiffusion(t0, p), {t0, 4.0}, p);
  REQUIRE(r.stop == StopReason::ReachedEnd);
  const double s = r.trajectory.state(r.trajectory.size() - 1).sigma;
  CHECK(rel_err(s * s, std::sqrt(0.4)) <= 1e-6);
}

TEST_CASE("overdamped fixed point") {
  const PhysicalParams p = make_natural_params(10, 0, 0);
  const auto r = integrate_overdamped(ModelVariant::OverdampedDissipative, kSg, {0, 50}, p);
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) CHECK(rel_err(r.trajectory.state(i).sigma, kSg) <= 1e-9);
}

TEST_CASE("high-temperature run settles on its equilibrium") {
  const PhysicalParams p = make_natural_params(2, 0.5, 0);
  const auto r = integrate(ModelVariant::HighTemperature, State{1.5, 0.0}, {0, 40}, p);
  REQUIRE(r.stop == StopReason::ReachedEnd);
  const double s = r.trajectory.state(r.trajectory.size() - 1).sigma;
  CHECK(rel_err(s * s, analytic::equilibrium_closed_form(2.0, p)) <= 1e-8);
}

TEST_CASE("sigma guard stops a run that would cross it") {
  IntegratorConfig c;
  c.sigma_min_guard = 0.5;  // the (2, 0) orbit dips to 0.25
  const auto r = integrate(ModelVariant::Conservative, State{2.0, 0.0}, {0, 10}, PhysicalParams{}, c);
  CHECK(r.stop == StopReason::SigmaGuardHit);
  for (std::size_t i = 0; i < r.trajectory.size(); ++i) CHECK(r.trajectory.state(i).sigma > 0.5);
  CHECK(r.trajectory.dense.back_time() < kPi / 2);
}

TEST_CASE("sampling") {
  const PhysicalParams p = free_particle();
  const auto r = integrate(ModelVariant::Conservative, State{1.0, 0.0}, {0, 2}, p);
  const auto& tr = r.trajectory;
  CHECK(sample(tr, 0.0).sigma == 1.0);
  CHECK(sample(tr, 0.0).sigma_dot == 0.0);
  for (std::size_t i = 0; i < tr.size(); ++i) {
    CHECK(sample(tr, tr.time(i)).sigma == tr.state(i).sigma);
    CHECK(sample(tr, tr.time(i)).sigma_dot == tr.state(i).sigma_dot);
  }
  for (std::size_t i = 0; i + 1 < tr.size(); ++i) {
    const double mid = 0.5 * (tr.time(i) + tr.time(i + 1));
    CHECK(rel_err(sample(tr, mid).sigma, analytic::free_spreading(mid, 1.0, p)) <= 1e-8);
  }
  CHECK_THROWS_AS(sample(tr, 2.5), std::out_of_range);
  CHECK_THROWS_AS(sample(tr, -0.1), std::out_of_range);
  const auto rows = sample(tr, std::vector<double>{0.0, 1.0, 2.0, 3.0});
  CHECK(rows.size() == 3);
}

TEST_CASE("uniform_times") {
  const auto t = uniform_times({0.1, 1.0}, 4);
  REQUIRE(t.size() == 4);
  CHECK(t.front() == 0.1);
  CHECK(t.back() == 1.0);
  CHECK(t[1] == doctest::Approx(0.4));
  CHECK_THROWS_AS(uniform_times({0, 1}, 1), std::invalid_argument);
}

TEST_CASE("state arity and parameter requirements") {
  const PhysicalParams p;
  CHECK_THROWS_AS(integrate(ModelVariant::RadiativeNaive, State{1.0, 0.0}, {0, 1}, make_natural_params(0, 0, 0.1)),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate(ModelVariant::Conservative, State3{1.0, 0.0, 0.0}, {0, 1}, p), std::invalid_argument);
  CHECK_THROWS_AS(integrate(ModelVariant::OverdampedDissipative, State{1.0, 0.0}, {0, 1}, make_natural_params(1, 0, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_overdamped(ModelVariant::Dissipative, 1.0, {0, 1}, make_natural_params(1, 0, 0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate_overdamped(ModelVariant::OverdampedDissipative, 1.0, {0, 1}, p), std::invalid_argument);
  CHECK_THROWS_AS(integrate(ModelVariant::RadiativeReduced, State{1.0, 0.0}, {0, 1}, p), std::invalid_argument);
  CHECK_THROWS_AS(integrate(ModelVariant::HighTemperature, State{1.0, 0.0}, {0, 1}, p), std::invalid_argument);
  CHECK_THROWS_AS(integrate(ModelVariant::Conservative, State{0.0, 0.0}, {0, 1}, p), std::invalid_argument);
  CHECK_THROWS_AS(integrate(ModelVariant::Conservative, State{1.0, 0.0}, {1, 0}, p), std::invalid_argument);
}

TEST_CASE("strong friction with the explicit scheme warns but does not switch") {
  const auto p = make_natural_params(20, 0, 0);
  CHECK(scheme_warnings(p, {}).size() == 1);
  CHECK(scheme_warnings(make_natural_params(5, 0, 0), {}).empty());
  IntegratorConfig imp;
  imp.scheme = Scheme::ImplicitAStable;
  CHECK(scheme_warnings(p, imp).empty());
  PhysicalParams free = p;
  free.omega0 = 0;
  CHECK(scheme_warnings(free, {}).size() == 1);

  const auto r = integrate(ModelVariant::Dissipative, State{1.0, 0.0}, {0, 1}, p);
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("implicit") != std::string::npos);
  for (const auto& seg : r.trajectory.dense.segments) CHECK(seg.scheme == Scheme::ExplicitAdaptive);
}
