/*
Copyright 2026 The gapdyn Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

                http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include <cmath>
#include <random>

#include "doctest.h"
#include "gapdyn/diagnostics.hpp"
#include "gapdyn/error.hpp"
#include "gapdyn/integrators.hpp"
#include "generators.hpp"

using namespace gapdyn;
using namespace gapdyn::testing;

namespace {

const HamiltonianModel kOsc = HamiltonianModel::harmonic_oscillator(1.0, 1.0);

double max_state_error(const Trajectory& coarse, const Trajectory& fine, std::size_t stride) {
  double e = 0.0;
  for (std::size_t k = 0; k < coarse.states.size(); ++k)
    e = std::max(e, (coarse.states[k] - fine.states[k * stride]).max_abs());
  return e;
}

}  // namespace

TEST_CASE("pure steps leave the gap at zero for every builtin model") {
  std::mt19937_64 rng(501);
  for (const auto& model : builtin_models()) {
    const std::string name = model.name();
    CAPTURE(name);
    for (int k = 0; k < 50; ++k) {
      PhaseVector z = draw_phase(rng, model.dim(), 2.0);
      if (model.layout() == Layout::Damage) z = PhaseVector({z.q(0), draw(rng, 0.0, 1.0)}, z.p());
      const double t = draw(rng, 0.0, 5.0);
      const StepResult r = step_pure(model, z, t, 1e-3);
      CHECK(r.eta.max_abs() == 0.0);
      CHECK(r.residual == ExtendedReal(0.0));
      CHECK(r.dissipated == 0.0);
      const PhaseVector e = extract_eta(model, DissipationLaw::pure(), z, r.z_next, t, 1e-3);
      CHECK(e.max_abs() <= 1e-12);
    }
  }
}

TEST_CASE("pure oscillator energy after 1e5 steps at dt = 0.01" * doctest::may_fail()) {
  // Euler-B energy oscillates with relative amplitude about dt/2 = 5e-3, above
  // the 1e-3 bound; the run lands near 4.6e-3.
  const Trajectory tr = integrate(kOsc, DissipationLaw::pure(), PhaseVector({1.0}, {0.0}), 0.0, 1000.0, 0.01);
  REQUIRE(tr.steps() == 100000);
  CHECK(std::abs(tr.energies.back() - 0.5) / 0.5 <= 1e-3);
}

TEST_CASE("pure oscillator conserves the shadow energy at dt = 0.01") {
  const double dt = 0.01;
  const Trajectory tr = integrate(kOsc, DissipationLaw::pure(), PhaseVector({1.0}, {0.0}), 0.0, 1000.0, dt);
  const double s0 = shadow_energy(kOsc, tr.states.front(), 0.0, dt);
  double drift = 0.0, swing = 0.0;
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    drift = std::max(drift, std::abs(shadow_energy(kOsc, tr.states[k], tr.times[k], dt) - s0));
    swing = std::max(swing, std::abs(tr.energies[k] - 0.5) / 0.5);
  }
  // No secular drift over 1e5 steps: the truncation leaves an O(dt^4) wobble.
  CHECK(drift <= 10.0 * dt * dt * dt * dt);
  CHECK(swing <= 0.5 * dt * 1.01);
}

TEST_CASE("pure and viscous steppers converge at first order") {
  const PhaseVector z0({1.0}, {0.0});
  for (const auto& law : {DissipationLaw::pure(), DissipationLaw::viscous(ConvexFunction::centered_quadratic(0.2))}) {
    const std::string name = law.name();
    CAPTURE(name);
    const Trajectory ref = integrate(kOsc, law, z0, 0.0, 10.0, 0.01 / 64.0);
    const double ratio = max_state_error(integrate(kOsc, law, z0, 0.0, 10.0, 0.01), ref, 64) /
                         max_state_error(integrate(kOsc, law, z0, 0.0, 10.0, 0.005), ref, 32);
    CHECK(std::abs(ratio - 2.0) <= 0.3);
  }
}

TEST_CASE("viscous stepper tracks the underdamped solution") {
  const auto law = DissipationLaw::viscous(ConvexFunction::centered_quadratic(0.2));
  const Trajectory tr = integrate(kOsc, law, PhaseVector({1.0}, {0.0}), 0.0, 10.0, 1e-4);
  REQUIRE(tr.complete);
  const double wd = std::sqrt(0.99);
  double err = 0.0, res = 0.0;
  for (std::size_t k = 0; k < tr.states.size(); ++k) {
    const double t = tr.times[k], decay = std::exp(-0.1 * t);
    err = std::max(err, std::abs(tr.states[k].q(0) - decay * (std::cos(wd * t) + 0.1 / wd * std::sin(wd * t))));
  }
  for (const auto& r : tr.residuals) res = std::max(res, r.value());
  CHECK(err <= 5e-3);
  CHECK(res <= 1e-8);
  for (std::size_t k = 0; k + 1 < tr.energies.size(); ++k) REQUIRE(tr.energies[k + 1] <= tr.energies[k] + 1e-9);
}

TEST_CASE("vanishing viscosity recovers the pure stepper") {
  const auto law = DissipationLaw::viscous(ConvexFunction::centered_quadratic(1e-15));
  PhaseVector a({1.0}, {0.3}), b = a;
  for (int k = 0; k < 1000; ++k) {
    a = step(kOsc, law, a, k * 1e-2, 1e-2).z_next;
    b = step_pure(kOsc, b, k * 1e-2, 1e-2).z_next;
  }
  CHECK((a - b).max_abs() <= 1e-12);
}

TEST_CASE("viscous gap is the damping force at the new velocity") {
  std::mt19937_64 rng(502);
  const double c = 0.7;
  const auto law = DissipationLaw::viscous(ConvexFunction::centered_quadratic(c));
  for (int k = 0; k < kPropertyCases; ++k) {
    const PhaseVector z = draw_phase(rng, 1);
    const StepResult r = step(kOsc, law, z, 0.0, 1e-2);
    CHECK(std::abs(r.eta.p(0) - c * kOsc.dH_dp(r.z_next, 0.0)[0]) <= 1e-8);
    CHECK(r.eta.q(0) == 0.0);
    // The stored residual is I at the extracted gap.
    const PhaseVector e = extract_eta(kOsc, law, z, r.z_next, 0.0, 1e-2);
    const ExtendedReal i = information_content(law, evaluation_state(kOsc, law, z, 0.0, 1e-2),
                                               (1.0 / 1e-2) * (r.z_next - z), e);
    CHECK(std::abs(i.value() - r.residual.value()) <= 1e-12);
  }
}

TEST_CASE("plastic return mapping example") {
  // Trial stress 1.5 against Y = 1: return to 1 with 0.5 of plastic slip.
  const auto model = HamiltonianModel::elasto_plastic(1.0, 1.0);
  const auto law = DissipationLaw::plastic_yield(1.0);
  const double dt = 0.01;
  const PhaseVector z({1.5, 0.0}, {dt * 1.5, 0.0});
  const StepResult r = step(model, law, z, 0.0, dt);
  CHECK(model.elastic_force(r.z_next.q(0), r.z_next.q(1)) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.z_next.q(1) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.residual <= ExtendedReal(1e-8));
  CHECK(r.dissipated == doctest::Approx(0.5).epsilon(1e-12));
  const OracleAgreement a = oracle_agreement(model, law, z, 0.0, dt);
  CHECK(a.argmin_agrees);
}

TEST_CASE("elastic steps leave the internal variable alone") {
  std::mt19937_64 rng(503);
  const auto model = HamiltonianModel::elasto_plastic(1.0, 1.0);
  const auto law = DissipationLaw::plastic_yield(1.0);
  for (int k = 0; k < kPropertyCases; ++k) {
    const double qi = draw(rng, -1.0, 1.0);
    const PhaseVector z({qi + draw(rng, -0.5, 0.5), qi}, {draw(rng, -0.1, 0.1), 0.0});
    const StepResult r = step(model, law, z, 0.0, 1e-3);
    CHECK(r.z_next.q(1) == qi);
    CHECK(r.eta.max_abs() == 0.0);
  }
}

TEST_CASE("cyclic loading keeps the stress admissible and the plastic work nonnegative") {
  const auto model = HamiltonianModel::elasto_plastic(1.0, 1.0, Forcing::sinusoid(2.0, 0.5));
  const auto law = DissipationLaw::plastic_yield(1.0);
  const Trajectory tr = integrate(model, law, PhaseVector::zeros(2), 0.0, 30.0, 1e-3);
  REQUIRE(tr.complete);
  double work = 0.0;
  for (std::size_t k = 0; k < tr.steps(); ++k) {
    const double s = model.elastic_force(tr.states[k + 1].q(0), tr.states[k + 1].q(1));
    CHECK(std::abs(s) <= 1.0 + 1e-9);
    work += s * (tr.states[k + 1].q(1) - tr.states[k].q(1));
    CHECK(work >= -1e-9);
  }
  CHECK(work > 0.0);
}

TEST_CASE("damage stepper at and around the threshold") {
  const auto law = DissipationLaw::damage(1.0);
  const auto model = HamiltonianModel::damage(1.0, 1.0, 1.0);
  const double dt = 1e-3;
  SUBCASE("below threshold nothing happens") {
    // E(q) = 0.5 < Y: the gap takes the whole driving force.
    const StepResult r = step(model, law, PhaseVector({1.0, 0.0}, {0.0, 0.0}), 0.0, dt);
    CHECK(r.eta.p(1) == 0.5);
    CHECK(r.z_next.p(1) == 0.0);
    CHECK(r.z_next.q(1) == 0.0);
    CHECK(r.residual <= ExtendedReal(1e-12));
  }
  SUBCASE("above threshold damage momentum grows") {
    const StepResult r = step(model, law, PhaseVector({2.0, 0.0}, {0.0, 0.0}), 0.0, dt);
    CHECK(r.z_next.p(1) / dt == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(r.eta.p(1) == 1.0);
    CHECK(r.z_next.q(1) > 0.0);
  }
  SUBCASE("saturated damage stays at one") {
    PhaseVector z({3.0, 0.99}, {0.0, 5.0});
    bool saturated = false;
    for (int k = 0; k < 200; ++k) {
      const StepResult r = step(model, law, z, k * dt, dt);
      if (r.event == StepEvent::DamageSaturation) saturated = true;
      if (saturated) {
        CHECK(r.z_next.q(1) == 1.0);
      }
      z = r.z_next;
    }
    CHECK(saturated);
    CHECK(z.q(1) == 1.0);
  }
}

TEST_CASE("contact stepper: resting, free flight and impact") {
  const auto ball = HamiltonianModel::contact_ball(1.0, 10.0);
  const auto law = DissipationLaw::contact(ConstraintSet({HalfSpace{{1.0}, 0.0}}));
  const double dt = 1e-3;
  SUBCASE("resting ball carries its weight in the gap") {
    const StepResult r = step(ball, law, PhaseVector::zeros(1), 0.0, dt);
    CHECK(r.eta.p(0) == doctest::Approx(-10.0).epsilon(1e-12));
    CHECK(r.z_next == PhaseVector::zeros(1));
    CHECK(r.residual <= ExtendedReal(1e-12));
  }
  SUBCASE("static reaction agrees with a grid search") {
    const OracleAgreement a = oracle_agreement(ball, law, PhaseVector::zeros(1), 0.0, dt);
    CHECK(a.argmin_agrees);
    CHECK(a.oracle.i_star <= ExtendedReal(1e-6));
  }
  SUBCASE("away from the ground it is a pure step") {
    const PhaseVector z({1.0}, {0.0});
    const StepResult r = step(ball, law, z, 0.0, dt);
    CHECK(r.eta.max_abs() == 0.0);
    CHECK(r.z_next == step_pure(ball, z, 0.0, dt).z_next);
  }
  SUBCASE("drop from height 1 never penetrates and lands with zero velocity") {
    const Trajectory tr = integrate(ball, law, PhaseVector({1.0}, {0.0}), 0.0, 1.0, dt);
    REQUIRE(tr.complete);
    for (const auto& z : tr.states) CHECK(z.q(0) >= -1e-12);
    CHECK(tr.states.back().p(0) == 0.0);
  }
  SUBCASE("restitution impacts are events") {
    StepOptions opts;
    opts.restitution = 0.5;
    const Trajectory tr = integrate(ball, law, PhaseVector({1.0}, {0.0}), 0.0, 1.0, dt, opts);
    REQUIRE(tr.complete);
    CHECK(std::count(tr.events.begin(), tr.events.end(), StepEvent::RestitutionImpact) >= 1);
    for (const auto& z : tr.states) CHECK(z.q(0) >= -1e-12);
  }
}

TEST_CASE("integrate: grid shape, degenerate runs and bad input") {
  const auto law = DissipationLaw::pure();
  const Trajectory tr = integrate(kOsc, law, PhaseVector({1.0}, {0.0}), 0.0, 1.0, 0.3);
  CHECK(tr.steps() == 4);
  CHECK(tr.times.size() == tr.states.size());
  CHECK(tr.states.size() == tr.etas.size() + 1);
  CHECK(tr.dissipated_work.size() == tr.states.size());
  CHECK(tr.times.back() == doctest::Approx(1.2));
  const Trajectory empty = integrate(kOsc, law, PhaseVector({1.0}, {0.0}), 2.0, 2.0, 0.1);
  CHECK(empty.states.size() == 1);
  CHECK(empty.etas.empty());
  CHECK(empty.complete);
  CHECK_THROWS_AS(integrate(kOsc, law, PhaseVector({1.0}, {0.0}), 0.0, 1.0, 0.0), Error);
  CHECK_THROWS_AS(integrate(kOsc, law, PhaseVector({1.0}, {0.0}), 0.0, -1.0, 0.1), Error);
  CHECK_THROWS_AS(integrate(kOsc, law, PhaseVector::zeros(2), 0.0, 1.0, 0.1), Error);
  CHECK_THROWS_AS(check_compatible(kOsc, DissipationLaw::plastic_yield(1.0)), Error);
  CHECK_THROWS_AS(check_compatible(kOsc, DissipationLaw::damage(1.0)), Error);
  CHECK_THROWS_AS(check_compatible(kOsc, DissipationLaw::separable(ConvexFunction::zero(2))), Error);
  CHECK_NOTHROW(check_compatible(kOsc, DissipationLaw::viscous(ConvexFunction::zero(1))));
}

TEST_CASE("property: viscous pendulum ledger balances on the shadow energy") {
  std::mt19937_64 rng(504);
  const auto model = HamiltonianModel::pendulum(1.0, 9.81, 1.0);
  for (int k = 0; k < 20; ++k) {
    const auto law = DissipationLaw::viscous(ConvexFunction::centered_quadratic(draw(rng, 0.05, 2.0)));
    // The per-step slack of the audit is set for its reference step 1e-4.
    const Trajectory tr = integrate(model, law, draw_phase(rng, 1, 1.5), 0.0, 1.0, 1e-4);
    REQUIRE(tr.complete);
    const AuditReport rep = energy_audit(tr, model, law);
    for (const auto& v : rep.violations) CHECK(v.invariant == "ledger_closure");
    CHECK(rep.total_dissipated >= 0.0);
    // The closure on H differs from the balance on the shadow energy only by
    // the endpoint offsets H - S, which are O(dt) for fast swings.
    double excess = 0.0, scale = 0.0;
    for (const auto& e : rep.energy_ledger) excess += e.excess, scale = std::max(scale, std::abs(e.energy));
    const auto offset = [&](std::size_t k) {
      return tr.energies[k] - shadow_energy(model, tr.states[k], tr.times[k], tr.dt);
    };
    CHECK(std::abs(excess) <= 1e-6 * scale);
    CHECK(std::abs(rep.closure_residual - (offset(tr.steps()) - offset(0)) - excess) <= 1e-9 * scale);
  }
}
