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

#include "gapdyn/validate.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "json.hpp"

#include "gapdyn/diagnostics.hpp"
#include "gapdyn/dissipation.hpp"
#include "gapdyn/error.hpp"
#include "gapdyn/integrators.hpp"
#include "gapdyn/models.hpp"
#include "gapdyn/scenario.hpp"

namespace gapdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxDetails = 5;

class Suite {
 public:
  explicit Suite(std::string name) : start_(std::chrono::steady_clock::now()) { r_.name = std::move(name); }

  void check(bool ok, const std::string& what) {
    ++r_.checks;
    if (ok) return;
    ++r_.failures;
    if (r_.details.size() < kMaxDetails) r_.details.push_back(what);
  }
  void note(const std::string& what) {
    if (r_.details.size() < kMaxDetails) r_.details.push_back(what);
  }
  SuiteResult finish() {
    r_.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    return std::move(r_);
  }

 private:
  SuiteResult r_;
  std::chrono::steady_clock::time_point start_;
};

std::string num(double v) { return format_number(v); }

std::string vec(std::span<const double> v) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
  return s + ")";
}

double uniform(std::mt19937_64& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

Vector draw(std::mt19937_64& rng, std::size_t n, double lo = -10.0, double hi = 10.0) {
  Vector v(n);
  for (auto& x : v) x = uniform(rng, lo, hi);
  return v;
}

// A point of dom f within [-10, 10]^n.
Vector domain_point(const ConvexFunction& f, std::mt19937_64& rng) {
  const auto dom = domain(f);
  Vector x(dom.size());
  for (std::size_t i = 0; i < dom.size(); ++i) {
    const double lo = std::max(dom[i].lo, -10.0), hi = std::min(dom[i].hi, 10.0);
    x[i] = lo >= hi ? std::clamp(dom[i].lo, -1e300, 1e300) : uniform(rng, lo, hi);
  }
  return x;
}

// A subgradient at x within [-10, 10]^n, if the subdifferential meets that box.
std::optional<Vector> subgradient_point(const ConvexFunction& f, const Vector& x, std::mt19937_64& rng) {
  const auto sub = subdifferential(f, x);
  Vector y(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) {
    const double lo = std::max(sub[i].lo, -10.0), hi = std::min(sub[i].hi, 10.0);
    if (lo > hi) return std::nullopt;
    // Favour the interval ends, where the inequality is tight.
    const int pick = std::uniform_int_distribution<int>(0, 3)(rng);
    y[i] = lo == hi ? lo : pick == 0 ? lo : pick == 1 ? hi : uniform(rng, lo, hi);
  }
  return y;
}

std::optional<ConvexFunction> closed_polar(const ConvexFunction& f, Mutation m) {
  try {
    ConvexFunction g = polar(f);
    return m == Mutation::PolarSign ? reflect(g) : g;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Unsupported) throw;
    return std::nullopt;
  }
}

bool same_value(ExtendedReal a, ExtendedReal b, double tol) {
  if (a.is_infinite() || b.is_infinite()) return a.is_infinite() && b.is_infinite();
  return std::abs(a.value() - b.value()) <= tol * (1.0 + std::abs(a.value()));
}

std::string ext(ExtendedReal v) { return v.is_finite() ? num(v.value()) : "inf"; }

SuiteResult fenchel_inequality(const ValidationOptions& o) {
  Suite s("fenchel_inequality");
  std::mt19937_64 rng(o.seed ^ 0x1001);
  for (const auto& [name, f] : function_catalogue()) {
    const auto g = closed_polar(f, o.mutation);
    if (!g) continue;
    const auto dom_star = domain(*g);
    for (int k = 0; k < 10000; ++k) {
      // Half the draws land in the domains so the inequality is not vacuous.
      Vector x = draw(rng, f.dim()), y = draw(rng, f.dim());
      if (k % 2 == 1) {
        x = domain_point(f, rng);
        for (std::size_t i = 0; i < y.size(); ++i) y[i] = std::clamp(y[i], dom_star[i].lo, dom_star[i].hi);
      }
      const ExtendedReal gap = fenchel_gap(f, *g, x, y);
      s.check(gap >= ExtendedReal(-1e-9) || gap.is_infinite(),
              name + ": gap " + ext(gap) + " at x=" + vec(x) + " y=" + vec(y));
    }
  }
  return s.finish();
}

SuiteResult fenchel_equality(const ValidationOptions& o) {
  Suite s("fenchel_equality");
  std::mt19937_64 rng(o.seed ^ 0x1002);
  for (const auto& [name, f] : function_catalogue()) {
    const auto g = closed_polar(f, o.mutation);
    if (!g) continue;
    for (int k = 0; k < 2000; ++k) {
      const Vector x = domain_point(f, rng);
      const auto y = subgradient_point(f, x, rng);
      if (!y) continue;
      const ExtendedReal gap = fenchel_gap(f, *g, x, *y);
      s.check(gap.is_finite() && std::abs(gap.value()) <= 1e-9,
              name + ": y in df(x) but gap " + ext(gap) + " at x=" + vec(x) + " y=" + vec(*y));
    }
  }
  return s.finish();
}

SuiteResult biconjugation(const ValidationOptions& o) {
  Suite s("biconjugation");
  std::mt19937_64 rng(o.seed ^ 0x1003);
  for (const auto& [name, f] : function_catalogue()) {
    const auto g = closed_polar(f, o.mutation);
    if (!g) continue;
    const auto gg = closed_polar(*g, o.mutation);
    if (!gg) {
      s.note(name + ": conjugate of the conjugate leaves the algebra, skipped");
      continue;
    }
    for (int k = 0; k < 2000; ++k) {
      const Vector x = k % 2 ? domain_point(f, rng) : draw(rng, f.dim());
      const ExtendedReal a = eval(f, x), b = eval(*gg, x);
      s.check(same_value(a, b, 1e-9), name + ": f=" + ext(a) + " f**=" + ext(b) + " at " + vec(x));
    }
  }
  return s.finish();
}

SuiteResult conjugate_oracle(const ValidationOptions& o) {
  Suite s("conjugate_oracle");
  const std::vector<std::pair<std::string, ConvexFunction>> fs = {
      {"quadratic", ConvexFunction::centered_quadratic(1.0)},
      {"quadratic_shifted", ConvexFunction::quadratic(2.0, {0.5})},
      {"indicator_point", ConvexFunction::indicator_point({0.0})},
      {"indicator_box", ConvexFunction::indicator_box({-1.0}, {1.0})},
      {"indicator_box_asymmetric", ConvexFunction::indicator_box({-1.0}, {2.0})},
      {"support_box", ConvexFunction::support_box({-1.0}, {1.0})},
      {"damage_potential", ConvexFunction::sum({ConvexFunction::linear({1.0}),
                                                ConvexFunction::indicator_box({0.0}, {kInf})})},
  };
  for (const auto& [name, f] : fs) {
    const auto g = closed_polar(f, o.mutation);
    if (!g) {
      s.check(false, name + ": no closed-form conjugate");
      continue;
    }
    const ConjugateTable t = numerical_conjugate(f, -5.0, 5.0, 4001);
    for (std::size_t i = 0; i < t.y.size(); ++i) {
      const double y[1] = {t.y[i]};
      const ExtendedReal closed = eval(*g, y);
      // Where the closed form is +inf the truncated grid cannot follow it.
      if (closed.is_infinite()) continue;
      const double tol = 2.0 * t.spacing * (1.0 + std::abs(y[0]));
      const bool ok = t.value[i].is_finite() && std::abs(t.value[i].value() - closed.value()) <= tol;
      s.check(ok, name + ": closed " + ext(closed) + " numeric " + ext(t.value[i]) + " at y=" + num(y[0]));
    }
  }
  return s.finish();
}

SuiteResult cyclic_monotonicity(const ValidationOptions& o) {
  Suite s("cyclic_monotonicity");
  std::mt19937_64 rng(o.seed ^ 0x1004);
  for (const auto& [name, f] : function_catalogue()) {
    std::vector<std::pair<Vector, Vector>> graph;
    for (int k = 0; k < 200 && graph.size() < 24; ++k) {
      Vector x = domain_point(f, rng);
      if (auto y = subgradient_point(f, x, rng)) graph.emplace_back(std::move(x), std::move(*y));
    }
    for (int n = 1; n <= 3; ++n) {
      MonotoneCheckOptions mo;
      mo.seed = o.seed;
      s.check(n_monotone_check(graph, n, mo), name + ": subdifferential graph not " + std::to_string(n) + "-monotone");
    }
  }
  return s.finish();
}

std::vector<HamiltonianModel> builtin_models() {
  const Forcing load = Forcing::sinusoid(0.7, 1.3, 0.2);
  return {HamiltonianModel::harmonic_oscillator(1.5, 2.0), HamiltonianModel::pendulum(0.8, 9.81, 1.2),
          HamiltonianModel::elasto_plastic(1.2, 3.0, load), HamiltonianModel::damage(1.0, 2.0, 1.5, load),
          HamiltonianModel::contact_ball(0.5, 10.0)};
}

PhaseVector model_point(const HamiltonianModel& m, std::mt19937_64& rng) {
  const std::size_t n = m.dim();
  Vector q = draw(rng, n, -2.0, 2.0), p = draw(rng, n, -2.0, 2.0);
  if (m.layout() == Layout::Damage) q[1] = uniform(rng, 0.0, 1.0);
  if (m.tag() == HamiltonianModel::Tag::ContactBall) q[0] = uniform(rng, 0.0, 2.0);
  return PhaseVector(q, p);
}

SuiteResult gradient_check(const ValidationOptions& o) {
  Suite s("gradient_check");
  std::mt19937_64 rng(o.seed ^ 0x1005);
  for (const auto& m : builtin_models()) {
    for (int k = 0; k < 100; ++k) {
      const PhaseVector z = model_point(m, rng);
      const double t = uniform(rng, 0.0, 10.0);
      const Vector a = gradient(m, z, t).flatten(), fd = finite_difference_gradient(m, z, t).flatten();
      double worst = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - fd[i]) / std::max(1.0, std::abs(a[i])));
      s.check(worst <= 1e-6, std::string(m.name()) + ": relative error " + num(worst) + " at " + vec(z.flatten()));
      const PhaseVector xh = symplectic_gradient(m, z, t), flow = m.flow_field(z, t);
      s.check(xh == flow && xh == conjugate(gradient(m, z, t)),
              std::string(m.name()) + ": flow field differs from the conjugated gradient");
    }
  }
  return s.finish();
}

SuiteResult symplectic_identities(const ValidationOptions& o) {
  Suite s("symplectic_identities");
  std::mt19937_64 rng(o.seed ^ 0x1006);
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a) + std::abs(b)); };
  for (int k = 0; k < 3000; ++k) {
    const std::size_t n = 1 + static_cast<std::size_t>(k % 3);
    const PhaseVector a(draw(rng, n), draw(rng, n)), b(draw(rng, n), draw(rng, n));
    s.check(close(dual_pairing(a, b), dual_pairing(b, a)), "pairing not symmetric");
    s.check(close(symplectic_form(a, b), -symplectic_form(b, a)), "symplectic form not antisymmetric");
    s.check(close(symplectic_form(a, b), dual_pairing(conjugate(a), b)), "symplectic form != <<conj a, b>>");
    s.check(conjugate(conjugate(a)) == a, "conjugation not an involution");
    s.check(close(dual_pairing(a, b), dot(a.flatten(), b.swapped().flatten())), "pairing != dot with swap");
  }
  for (const auto& m : builtin_models()) {
    for (int k = 0; k < 100; ++k) {
      const PhaseVector z = model_point(m, rng);
      const double t = uniform(rng, 0.0, 10.0);
      const PhaseVector dh = gradient(m, z, t);
      // The Hamiltonian vector field is tangent to the level sets.
      const double along_flow = dual_pairing(dh, symplectic_gradient(m, z, t));
      s.check(std::abs(along_flow) <= 1e-12 * (1.0 + dh.max_abs() * dh.max_abs()),
              std::string(m.name()) + ": <<DH, XH>> = " + num(along_flow));
      const PhaseVector v(draw(rng, m.dim(), -1.0, 1.0), draw(rng, m.dim(), -1.0, 1.0));
      const double exact = dual_pairing(dh, v), fd = finite_difference_directional(m, z, v, t);
      s.check(std::abs(exact - fd) <= 1e-6 * std::max(1.0, std::abs(exact)),
              std::string(m.name()) + ": directional derivative " + num(exact) + " vs " + num(fd));
    }
  }
  return s.finish();
}

struct LawCase {
  std::string name;
  DissipationLaw law;
  std::size_t n;
};

std::vector<LawCase> law_cases() {
  return {
      {"pure", DissipationLaw::pure(), 1},
      {"viscous_quadratic", DissipationLaw::viscous(ConvexFunction::centered_quadratic(0.2)), 1},
      {"viscous_shifted", DissipationLaw::viscous(ConvexFunction::quadratic(1.5, {0.3})), 1},
      {"viscous_friction", DissipationLaw::viscous(ConvexFunction::support_box_radius(0.5)), 1},
      {"plastic", DissipationLaw::plastic_yield(1.0), 2},
      {"damage", DissipationLaw::damage(1.0), 2},
      {"contact", DissipationLaw::contact(ConstraintSet({{{1.0}, 0.0}})), 1},
      {"separable", DissipationLaw::separable(ConvexFunction::separable_product(
                        2, {{ConvexFunction::centered_quadratic(1.0), {0}},
                            {ConvexFunction::indicator_box({-1.0}, {2.0}), {1}}})),
       1},
  };
}

SuiteResult axioms(const ValidationOptions& o) {
  Suite s("axioms");
  for (const auto& c : law_cases()) {
    const AxiomsReport r = axioms_check(c.law, c.n, 500, o.seed);
    s.check(r.passed(), c.name + ": " + std::to_string(r.convexity_violations_rate) + " rate-convexity, " +
                            std::to_string(r.convexity_violations_gap) + " gap-convexity, " +
                            std::to_string(r.infimum_intermediate) + " infimum violations");
  }
  return s.finish();
}

bool separable_shape(const DissipationLaw& law) {
  using Tag = DissipationLaw::Tag;
  return law.tag() != Tag::Pure && law.tag() != Tag::Contact;
}

SuiteResult separable_consistency(const ValidationOptions& o) {
  Suite s("separable_consistency");
  std::mt19937_64 rng(o.seed ^ 0x1008);
  for (const auto& c : law_cases()) {
    if (!separable_shape(c.law)) continue;
    const ConvexFunction phi = c.law.potential(c.n);
    const auto phi_star = closed_polar(phi, o.mutation);
    if (!phi_star) {
      s.check(false, c.name + ": potential has no closed-form conjugate");
      continue;
    }
    for (int k = 0; k < 1000; ++k) {
      GapSample g = sample_admissible(c.law, c.n, rng);
      if (k % 2 == 1) {
        if (auto eta = gap_selection(c.law, g.z, g.z_dot)) g.eta = *eta;
      }
      const ExtendedReal lib = information_content(c.law, g.z, g.z_dot, g.eta);
      ExtendedReal manual = eval(phi, g.z_dot.flatten()) + eval(*phi_star, g.eta.swapped().flatten());
      manual = manual - dual_pairing(g.z_dot, g.eta);
      s.check(same_value(lib, manual, 1e-9), c.name + ": I=" + ext(lib) + " but Phi + Phi* - <<.,.>> = " + ext(manual));
    }
  }
  return s.finish();
}

void equivalence_on(Suite& s, const std::string& label, const DissipationLaw& law, const PhaseVector& z,
                    const PhaseVector& z_dot, const PhaseVector& eta, double tol) {
  const bool zero = zero_gap_holds(law, z, z_dot, eta, tol);
  const bool incl = gap_inclusion_holds(law, z_dot, eta);
  s.check(zero == incl, label + ": zero gap " + (zero ? "holds" : "fails") + " but inclusion " +
                            (incl ? "holds" : "fails") + " at rate " + vec(z_dot.flatten()) + " gap " +
                            vec(eta.flatten()));
}

SuiteResult bipotential_equivalence(const ValidationOptions& o) {
  Suite s("bipotential_equivalence");
  std::mt19937_64 rng(o.seed ^ 0x1009);
  for (const auto& c : law_cases()) {
    if (!separable_shape(c.law)) continue;
    for (int k = 0; k < 1000; ++k) {
      GapSample g = sample_admissible(c.law, c.n, rng);
      auto eta = gap_selection(c.law, g.z, g.z_dot);
      if (!eta) continue;
      if (k % 2 == 1) {
        // Well off the graph, clear of the tolerance band.
        Vector f = eta->flatten();
        const std::size_t i = std::uniform_int_distribution<std::size_t>(0, f.size() - 1)(rng);
        f[i] += (rng() % 2 ? 1.0 : -1.0) * uniform(rng, 0.1, 1.0);
        eta = PhaseVector::unflatten(f);
      }
      equivalence_on(s, c.name, c.law, g.z, g.z_dot, *eta, 1e-9);
    }
  }
  // Accepted steps of the viscous, plastic and damage scenarios.
  for (const char* name : {"damped_oscillator", "plastic_cycle", "damage_growth"}) {
    const Scenario sc = shipped_scenario(name);
    const Trajectory tr = integrate(sc.model, sc.law, sc.initial, sc.t0, sc.t_end, sc.dt, sc.step);
    s.check(tr.complete, std::string(name) + ": run failed: " + tr.failure);
    for (std::size_t n = 0; n < tr.steps(); ++n) {
      if (tr.events[n] != StepEvent::None) continue;
      const PhaseVector rate = (1.0 / tr.dt) * (tr.states[n + 1] - tr.states[n]);
      equivalence_on(s, std::string(name) + " step " + std::to_string(n), sc.law, tr.states[n], rate, tr.etas[n],
                     sc.step.step_tol);
    }
  }
  return s.finish();
}

struct FamilyCase {
  std::string name;
  HamiltonianModel model;
  DissipationLaw law;
};

std::vector<FamilyCase> family_cases() {
  return {
      {"pure", HamiltonianModel::harmonic_oscillator(1.0, 1.0), DissipationLaw::pure()},
      {"viscous", HamiltonianModel::harmonic_oscillator(1.0, 1.0),
       DissipationLaw::viscous(ConvexFunction::centered_quadratic(0.2))},
      {"plastic", HamiltonianModel::elasto_plastic(1.0, 1.0, Forcing::sinusoid(2.0, 0.5)),
       DissipationLaw::plastic_yield(1.0)},
      {"damage", HamiltonianModel::damage(1.0, 10.0, 1.0), DissipationLaw::damage(1.0)},
      {"contact", HamiltonianModel::contact_ball(1.0, 10.0), DissipationLaw::contact(ConstraintSet({{{1.0}, 0.0}}))},
  };
}

}  // namespace

/// Random state for a law family, biased towards the interesting regimes:
/// near yield, near the damage threshold, near the ground.
PhaseVector family_state(const HamiltonianModel& model, std::mt19937_64& rng) {
  switch (model.tag()) {
    case HamiltonianModel::Tag::ElastoPlastic1D: {
      const double sigma = uniform(rng, -1.0, 1.0) * (rng() % 2 ? 1.0 : 0.999);
      const double q = uniform(rng, -2.0, 2.0);
      return PhaseVector({q, q - sigma / model.stiffness()}, {uniform(rng, -2.0, 2.0), uniform(rng, -1.0, 1.0)});
    }
    case HamiltonianModel::Tag::Damage: {
      const double r = rng() % 2 ? 0.0 : uniform(rng, 0.0, 0.5);
      return PhaseVector({uniform(rng, -2.0, 2.0), uniform(rng, 0.0, 0.9)}, {uniform(rng, -2.0, 2.0), r});
    }
    case HamiltonianModel::Tag::ContactBall: {
      const double q = rng() % 3 == 0 ? 0.0 : uniform(rng, 0.0, 0.01);
      return PhaseVector({q}, {uniform(rng, -3.0, 1.0)});
    }
    default:
      return PhaseVector({uniform(rng, -2.0, 2.0)}, {uniform(rng, -2.0, 2.0)});
  }
}

namespace {

SuiteResult likelihood_oracle(const ValidationOptions& o) {
  Suite s("likelihood_oracle");
  std::mt19937_64 rng(o.seed ^ 0x100a);
  for (const auto& c : family_cases()) {
    for (int k = 0; k < 20; ++k) {
      const PhaseVector z = family_state(c.model, rng);
      const double t = uniform(rng, 0.0, 10.0);
      const OracleAgreement a = oracle_agreement(c.model, c.law, z, t, 1e-3);
      s.check(a.argmin_agrees, c.name + ": stepper gap " + vec(a.eta_stepper.flatten()) + " is " + num(a.distance) +
                                   " from the oracle argmin set");
      if (a.residual <= ExtendedReal(1e-8))
        s.check(a.oracle.i_star <= ExtendedReal(1e-6), c.name + ": oracle minimum " + ext(a.oracle.i_star));
    }
  }
  return s.finish();
}

SuiteResult scenario_invariants(const ValidationOptions& o) {
  Suite s("scenario_invariants");
  for (const auto& [name, text] : shipped_scenarios()) {
    Scenario sc = shipped_scenario(name);
    sc.audit.seed = o.seed;
    const Trajectory tr = integrate(sc.model, sc.law, sc.initial, sc.t0, sc.t_end, sc.dt, sc.step);
    s.check(tr.complete, name + ": " + tr.failure);
    const AuditReport r = audit(tr, sc.model, sc.law, sc.audit);
    std::string first = r.violations.empty() ? "" : r.violations.front().invariant + " at step " +
                                                      std::to_string(r.violations.front().step) + " (" +
                                                      num(r.violations.front().magnitude) + ")";
    s.check(r.passed(), name + ": " + std::to_string(r.violations.size()) + " violations, first " + first);
    s.check(r.gap_functional <= ExtendedReal(static_cast<double>(tr.steps()) * tr.dt * sc.step.step_tol) ||
                r.damage_saturations + r.restitution_impacts > 0,
            name + ": gap functional " + ext(r.gap_functional) + " above steps * dt * tol");
  }
  return s.finish();
}

// L-infinity distance of (q, p) between a run and a reference with a step
// `stride` times smaller, on the coarse grid.
double run_error(const Trajectory& coarse, const Trajectory& fine, std::size_t stride) {
  double e = 0.0;
  for (std::size_t k = 0; k < coarse.states.size(); ++k) {
    const PhaseVector d = coarse.states[k] - fine.states[k * stride];
    e = std::max(e, d.max_abs());
  }
  return e;
}

SuiteResult convergence(const ValidationOptions&) {
  Suite s("convergence");
  const auto osc = HamiltonianModel::harmonic_oscillator(1.0, 1.0);
  const std::vector<std::pair<std::string, DissipationLaw>> laws = {
      {"pure", DissipationLaw::pure()},
      {"viscous", DissipationLaw::viscous(ConvexFunction::centered_quadratic(0.2))}};
  const double dt = 0.01, t_end = 10.0;
  const PhaseVector z0({1.0}, {0.0});
  for (const auto& [name, law] : laws) {
    const Trajectory ref = integrate(osc, law, z0, 0.0, t_end, dt / 64.0);
    const Trajectory a = integrate(osc, law, z0, 0.0, t_end, dt);
    const Trajectory b = integrate(osc, law, z0, 0.0, t_end, dt / 2.0);
    const double ea = run_error(a, ref, 64), eb = run_error(b, ref, 32);
    const double ratio = ea / eb;
    s.check(std::abs(ratio - 2.0) <= 0.3, name + ": error ratio " + num(ratio) + " (" + num(ea) + " / " + num(eb) + ")");
  }
  return s.finish();
}

}  // namespace

Mutation parse_mutation(const std::string& name) {
  if (name == "none" || name.empty()) return Mutation::None;
  if (name == "polar-sign") return Mutation::PolarSign;
  fail(ErrorKind::Usage, "unknown mutation '" + name + "' (none, polar-sign)");
}

ConvexFunction reflect(const ConvexFunction& f) {
  using Tag = ConvexFunction::Tag;
  auto neg = [](Vector v) {
    for (auto& x : v) x = -x;
    return v;
  };
  switch (f.tag()) {
    case Tag::Quadratic:
      return ConvexFunction::quadratic(f.quadratic_coefficient(), neg(f.center()));
    case Tag::Linear:
      return ConvexFunction::linear(neg(f.slope()));
    case Tag::IndicatorPoint:
      return ConvexFunction::indicator_point(neg(f.point()));
    case Tag::IndicatorBox:
      return ConvexFunction::indicator_box(neg(f.upper()), neg(f.lower()));
    case Tag::SupportBox:
      return ConvexFunction::support_box(neg(f.upper()), neg(f.lower()));
    case Tag::Sum: {
      std::vector<ConvexFunction> ts;
      for (const auto& t : f.terms()) ts.push_back(reflect(t));
      return ConvexFunction::sum(std::move(ts));
    }
    case Tag::SeparableProduct: {
      std::vector<ConvexFunction::Block> bs;
      for (const auto& b : f.blocks()) bs.push_back({reflect(b.function), b.indices});
      return ConvexFunction::separable_product(f.dim(), std::move(bs));
    }
  }
  fail(ErrorKind::Unsupported, "unknown function tag");
}

std::vector<std::pair<std::string, ConvexFunction>> function_catalogue() {
  using F = ConvexFunction;
  return {
      {"quadratic", F::centered_quadratic(1.0)},
      {"quadratic_shifted", F::quadratic(2.0, {0.5})},
      {"linear", F::linear({2.0})},
      {"zero", F::zero(1)},
      {"indicator_point", F::indicator_point({0.0})},
      {"indicator_point_shifted", F::indicator_point({0.3})},
      {"indicator_box", F::indicator_box({-1.0}, {1.0})},
      {"indicator_box_asymmetric", F::indicator_box({-1.0}, {2.0})},
      {"indicator_halfline", F::indicator_box({0.0}, {kInf})},
      {"support_box", F::support_box({-1.0}, {1.0})},
      {"support_box_asymmetric", F::support_box({-1.0}, {2.0})},
      {"support_halfline", F::support_box({-kInf}, {1.5})},
      {"damage_potential", F::sum({F::linear({1.0}), F::indicator_box({0.0}, {kInf})})},
      {"shifted_box", F::sum({F::linear({0.5}), F::indicator_box({-1.0}, {2.0})})},
      {"quadratic_plus_linear", F::sum({F::centered_quadratic(1.0), F::linear({0.0})})},
      {"viscoplastic", F::sum({F::centered_quadratic(1.0), F::support_box_radius(0.5)})},
      {"product_2d", F::separable_product(2, {{F::quadratic(1.0, {0.5}), {0}}, {F::indicator_box({-1.0}, {2.0}), {1}}})},
  };
}

bool ValidationReport::passed() const {
  return !suites.empty() && std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

std::string ValidationReport::to_json() const {
  nlohmann::ordered_json j;
  j["seed"] = seed;
  j["mutation"] = mutation;
  j["passed"] = passed();
  j["suites"] = nlohmann::ordered_json::array();
  for (const auto& s : suites)
    j["suites"].push_back(
        {{"name", s.name}, {"checks", s.checks}, {"failures", s.failures}, {"passed", s.passed()}, {"details", s.details}});
  return j.dump(2);
}

ValidationReport run_validation(const ValidationOptions& o) {
  using SuiteFn = SuiteResult (*)(const ValidationOptions&);
  const std::pair<const char*, SuiteFn> suites[] = {
      {"fenchel_inequality", fenchel_inequality},
      {"fenchel_equality", fenchel_equality},
      {"biconjugation", biconjugation},
      {"conjugate_oracle", conjugate_oracle},
      {"cyclic_monotonicity", cyclic_monotonicity},
      {"gradient_check", gradient_check},
      {"symplectic_identities", symplectic_identities},
      {"axioms", axioms},
      {"separable_consistency", separable_consistency},
      {"bipotential_equivalence", bipotential_equivalence},
      {"likelihood_oracle", likelihood_oracle},
      {"scenario_invariants", scenario_invariants},
      {"convergence", convergence},
  };
  ValidationReport report;
  report.seed = o.seed;
  report.mutation = o.mutation == Mutation::PolarSign ? "polar-sign" : "none";
  for (const auto& [name, fn] : suites) {
    SuiteResult r;
    try {
      r = fn(o);
    } catch (const std::exception& e) {
      r = SuiteResult{};
      r.name = name;
      r.failures = 1;
      r.details.push_back(std::string("exception: ") + e.what());
    }
    if (o.sink) {
      std::ostringstream line;
      line << (r.passed() ? "[PASS] " : "[FAIL] ") << r.name << ": " << r.checks << " checks, " << r.failures
           << " failures";
      o.sink(line.str());
      if (!r.passed())
        for (const auto& d : r.details) o.sink("    " + d);
    }
    report.suites.push_back(std::move(r));
  }
  return report;
}

}  // namespace gapdyn
