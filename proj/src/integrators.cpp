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

#include "gapdyn/integrators.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapdyn/error.hpp"

namespace gapdyn {

const char* step_event_name(StepEvent e) {
  switch (e) {
    case StepEvent::None:
      return "none";
    case StepEvent::DamageSaturation:
      return "damage_saturation";
    case StepEvent::RestitutionImpact:
      return "restitution_impact";
  }
  return "?";
}

namespace {

void check_step(const HamiltonianModel& model, const PhaseVector& z, double t, double dt) {
  model.check_shape(z);
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::Usage, "time step must be positive and finite");
  if (!std::isfinite(t)) fail(ErrorKind::Usage, "time must be finite");
}

PhaseVector rate(const PhaseVector& z, const PhaseVector& z_next, double dt) { return (1.0 / dt) * (z_next - z); }

void finish(StepResult& r, const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z, double t,
            double dt, const StepOptions& options) {
  const PhaseVector eta = extract_eta(model, law, z, r.z_next, t, dt);
  const PhaseVector z_eval = evaluation_state(model, law, z, t, dt);
  r.residual = information_content(law, z_eval, rate(z, r.z_next, dt), eta, options.gap);
}

// Momentum predictor p - dt dH/dq, then the fixed point p+ = p - dt dH/dq(q, p+).
Vector predict_momentum(const HamiltonianModel& model, const PhaseVector& z, double t, double dt,
                        const StepOptions& options, int& iterations) {
  Vector p = z.p();
  const Vector hq = model.dH_dq(z, t);
  for (std::size_t i = 0; i < p.size(); ++i) p[i] -= dt * hq[i];
  iterations = 1;
  if (model.separable()) return p;
  for (; iterations < options.max_iter; ++iterations) {
    const Vector hq_next = model.dH_dq(PhaseVector(z.q(), p), t);
    double change = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double next = z.p(i) - dt * hq_next[i];
      change = std::max(change, std::abs(next - p[i]));
      p[i] = next;
    }
    if (change <= options.fixed_point_tol) return p;
  }
  fail(ErrorKind::Step, "momentum fixed point did not converge in " + std::to_string(options.max_iter) +
                            " iterations");
}

StepResult pure_impl(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z, double t,
                     double dt, const StepOptions& options) {
  StepResult r;
  Vector p = predict_momentum(model, z, t, dt, options, r.solver_iterations);
  const Vector v = model.dH_dp(PhaseVector(z.q(), p), t);
  Vector q = z.q();
  for (std::size_t i = 0; i < q.size(); ++i) q[i] += dt * v[i];
  r.z_next = PhaseVector(std::move(q), std::move(p));
  r.eta = PhaseVector::zeros(z.dim());
  finish(r, model, law, z, t, dt, options);
  return r;
}

StepResult viscous_impl(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z, double t,
                        double dt, const StepOptions& options) {
  const ConvexFunction& phi = law.phi();
  const std::size_t n = z.dim();
  int pred_iter = 0;
  const Vector p_pred = predict_momentum(model, z, t, dt, options, pred_iter);
  // q'+ = dH/dp(p_pred - dt eta) with eta in dphi(q'+). Writing the velocity
  // as v_trial - lambda eta with lambda = dt M^{-1} turns the inclusion into
  // q'+ = prox_{lambda phi}(v_trial), iterated until eta settles.
  const Vector w = model.inverse_mass();
  Vector lambda(n);
  for (std::size_t i = 0; i < n; ++i) lambda[i] = dt * std::max(w[i], 1e-300);
  Vector eta(n, 0.0), p(n), v(n);
  StepResult r;
  bool converged = false;
  for (int it = 1; it <= options.max_iter; ++it) {
    for (std::size_t i = 0; i < n; ++i) p[i] = p_pred[i] - dt * eta[i];
    Vector v_trial = model.dH_dp(PhaseVector(z.q(), p), t);
    for (std::size_t i = 0; i < n; ++i) v_trial[i] += lambda[i] * eta[i];
    v = prox(phi, v_trial, lambda);
    double change = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double next = (v_trial[i] - v[i]) / lambda[i];
      change = std::max(change, std::abs(next - eta[i]));
      eta[i] = next;
    }
    r.solver_iterations = it;
    if (change <= options.fixed_point_tol * (1.0 + std::abs(eta[0]))) {
      converged = true;
      break;
    }
  }
  if (!converged)
    fail(ErrorKind::Step, "viscous fixed point did not converge in " + std::to_string(options.max_iter) +
                              " iterations");
  for (std::size_t i = 0; i < n; ++i) p[i] = p_pred[i] - dt * eta[i];
  v = model.dH_dp(PhaseVector(z.q(), p), t);
  Vector q = z.q();
  for (std::size_t i = 0; i < n; ++i) q[i] += dt * v[i];
  r.z_next = PhaseVector(std::move(q), p);
  r.eta = PhaseVector(Vector(n, 0.0), eta);
  // Trapezoid in the velocity; balances the shadow energy of the scheme.
  const Vector v_n = model.dH_dp(z, t);
  Vector v_mid(n);
  for (std::size_t i = 0; i < n; ++i) v_mid[i] = 0.5 * (v_n[i] + v[i]);
  r.dissipated = dt * dot(v_mid, eta);
  finish(r, model, law, z, t, dt, options);
  return r;
}

StepResult plastic_impl(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z, double t,
                        double dt, const StepOptions& options) {
  const double k = model.stiffness();
  const double qi = z.q(1), pi = z.p(1);
  // Elastic predictor with the internal variable frozen.
  const double p_next = z.p(0) - dt * model.dH_dq(z, t)[0];
  const double q_next = z.q(0) + dt * p_next / model.mass();
  // Stress update sigma+ = prox_{k dt phi}(sigma_trial); for the yield box
  // this is the radial return onto [-Y, Y].
  const double sigma_trial = model.elastic_force(q_next, qi);
  const double s1[1] = {sigma_trial};
  const double sigma = prox(law.phi(), s1, k * dt)[0];
  const double qi_next = sigma == sigma_trial ? qi : qi + (sigma_trial - sigma) / k;
  StepResult r;
  r.solver_iterations = 1;
  r.z_next = PhaseVector({q_next, qi_next}, {p_next, pi + dt * sigma});
  const double eta_qi = (qi_next - qi) / dt;
  r.eta = PhaseVector({0.0, eta_qi}, {0.0, 0.0});
  r.dissipated = sigma * (qi_next - qi);
  finish(r, model, law, z, t, dt, options);
  return r;
}

StepResult damage_impl(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z, double t,
                       double dt, const StepOptions& options) {
  const double y = law.threshold();
  const double md = model.damage_inertia();
  const double q = z.q(0), d = z.q(1), r_n = z.p(1);
  const double p_next = z.p(0) - dt * model.dH_dq(z, t)[0];
  const double q_next = q + dt * p_next / model.mass();
  // r' = E(q) - eta_r with r >= 0, eta_r <= Y and d' (Y - eta_r) = 0.
  const double e = model.damage_driving_force(q);
  const double r_trial = r_n + dt * (e - y);
  double r_next, eta_r;
  if (r_trial > 0.0) {
    r_next = r_trial;
    eta_r = y;
  } else {
    r_next = 0.0;
    eta_r = e + r_n / dt;
  }
  double d_next = d + dt * r_next / md;
  StepResult res;
  res.solver_iterations = 1;
  if (d_next > 1.0) {
    d_next = 1.0;
    r_next = 0.0;
    res.event = StepEvent::DamageSaturation;
  }
  res.z_next = PhaseVector({q_next, d_next}, {p_next, r_next});
  res.eta = PhaseVector({0.0, 0.0}, {0.0, eta_r});
  res.dissipated = dt * (r_next / md) * eta_r;
  finish(res, model, law, z, t, dt, options);
  return res;
}

struct ContactSolve {
  Vector p_free;
  Vector q_free;
  std::vector<std::size_t> active;
};

ContactSolve free_flight(const HamiltonianModel& model, const ConstraintSet& m, const PhaseVector& z, double t,
                         double dt) {
  ContactSolve s;
  s.p_free = z.p();
  const Vector hq = model.dH_dq(z, t);
  for (std::size_t i = 0; i < hq.size(); ++i) s.p_free[i] -= dt * hq[i];
  const Vector v = model.dH_dp(PhaseVector(z.q(), s.p_free), t);
  s.q_free = z.q();
  for (std::size_t i = 0; i < v.size(); ++i) s.q_free[i] += dt * v[i];
  for (std::size_t i = 0; i < m.halfspaces().size(); ++i)
    if (m.halfspaces()[i].value(s.q_free) < 0.0) s.active.push_back(i);
  return s;
}

Vector project_onto_active(const ConstraintSet& m, Vector q, const std::vector<std::size_t>& active) {
  // Cyclic projections onto the hyperplanes g_i = 0; one pass is exact for a
  // single constraint or orthogonal normals.
  for (int sweep = 0; sweep < 200; ++sweep) {
    double worst = 0.0;
    for (std::size_t i : active) {
      const auto& h = m.halfspaces()[i];
      const double g = h.value(q);
      worst = std::max(worst, std::abs(g));
      const double s = g / dot(h.a, h.a);
      for (std::size_t j = 0; j < q.size(); ++j) q[j] -= s * h.a[j];
    }
    if (worst <= 1e-15) break;
  }
  return q;
}

StepResult contact_impl(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z, double t,
                        double dt, const StepOptions& options) {
  const ConstraintSet& m = law.constraint_set();
  if (!m.contains(z.q(), options.gap.indicator_tol))
    fail(ErrorKind::Step, "contact step started outside the admissible set");
  const std::size_t n = z.dim();
  const double e = options.restitution;
  ContactSolve s = free_flight(model, m, z, t, dt);
  const Vector w = model.inverse_mass();
  const Vector v_n = model.dH_dp(z, t);
  const Vector v_free = model.dH_dp(PhaseVector(z.q(), s.p_free), t);
  Vector p = s.p_free;
  StepResult r;
  r.solver_iterations = 0;
  bool impulse = false;
  auto normal_target = [&](const HalfSpace& h) { return -e * std::min(0.0, dot(h.a, v_n)); };
  if (s.active.size() == 1 && n == 1) {
    // Closed form, exact: the normal velocity lands on its target.
    const auto& h = m.halfspaces()[s.active[0]];
    const double target = normal_target(h) / h.a[0];
    const double v_target = h.a[0] > 0 ? std::max(v_free[0], target) : std::min(v_free[0], target);
    if (v_target != v_free[0]) {
      p[0] = v_target / w[0];
      impulse = true;
    }
    r.solver_iterations = 1;
  } else if (!s.active.empty()) {
    // Projected Gauss-Seidel on the impulse LCP
    //   0 <= lambda  _|_  <a_i, v+> - target_i >= 0,  p+ = p_free + sum lambda_i a_i.
    Vector lambda(s.active.size(), 0.0);
    for (int it = 1; it <= options.max_iter * 10; ++it) {
      double change = 0.0;
      for (std::size_t j = 0; j < s.active.size(); ++j) {
        const auto& h = m.halfspaces()[s.active[j]];
        double wii = 0.0, vn = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          wii += h.a[i] * w[i] * h.a[i];
          vn += h.a[i] * w[i] * p[i];
        }
        const double next = std::max(0.0, lambda[j] - (vn - normal_target(h)) / wii);
        const double d = next - lambda[j];
        if (d != 0.0) {
          for (std::size_t i = 0; i < n; ++i) p[i] += d * h.a[i];
          lambda[j] = next;
          change = std::max(change, std::abs(d));
        }
      }
      r.solver_iterations = it;
      if (change <= options.fixed_point_tol) break;
      if (it == options.max_iter * 10) fail(ErrorKind::Step, "contact impulse solve did not converge");
    }
    impulse = std::any_of(lambda.begin(), lambda.end(), [](double l) { return l > 0.0; });
  }
  const Vector v = model.dH_dp(PhaseVector(z.q(), p), t);
  Vector q = z.q();
  for (std::size_t i = 0; i < n; ++i) q[i] += dt * v[i];
  r.z_next = PhaseVector(std::move(q), p);
  Vector eta_p(n);
  for (std::size_t i = 0; i < n; ++i) eta_p[i] = -(p[i] - s.p_free[i]) / dt;
  r.eta = PhaseVector(Vector(n, 0.0), eta_p);
  // Same trapezoid as the viscous step: start and end of step velocities.
  Vector v_mid(n);
  for (std::size_t i = 0; i < n; ++i) v_mid[i] = 0.5 * (v_n[i] + v[i]);
  r.dissipated = dt * dot(v_mid, eta_p);
  if (impulse && e > 0.0) {
    for (std::size_t i : s.active)
      if (dot(m.halfspaces()[i].a, v_n) < 0.0) r.event = StepEvent::RestitutionImpact;
  }
  finish(r, model, law, z, t, dt, options);
  return r;
}

}  // namespace

void check_compatible(const HamiltonianModel& model, const DissipationLaw& law) {
  using Tag = DissipationLaw::Tag;
  if (law.tag() == Tag::Separable)
    fail(ErrorKind::Config, "separable laws have no time stepper; use pure, viscous, plastic, damage or contact");
  if (auto layout = law.required_layout(); layout && *layout != model.layout())
    fail(ErrorKind::Config, std::string(law.name()) + " law needs the " + layout_name(*layout) + " layout, but " +
                                model.name() + " has the " + layout_name(model.layout()) + " layout");
  if (auto n = law.required_dim(); n && *n != model.dim())
    fail(ErrorKind::Config, std::string(law.name()) + " law has dimension " + std::to_string(*n) + ", model " +
                                model.name() + " has " + std::to_string(model.dim()));
  if (law.tag() == Tag::Plastic && model.tag() != HamiltonianModel::Tag::ElastoPlastic1D)
    fail(ErrorKind::Config, "plastic law requires the elasto_plastic model");
  if (law.tag() == Tag::Damage && model.tag() != HamiltonianModel::Tag::Damage)
    fail(ErrorKind::Config, "damage law requires the damage model");
}

StepResult step_pure(const HamiltonianModel& model, const PhaseVector& z, double t, double dt,
                     const StepOptions& options) {
  check_step(model, z, t, dt);
  return pure_impl(model, DissipationLaw::pure(), z, t, dt, options);
}

StepResult step_viscous(const HamiltonianModel& model, const ConvexFunction& phi, const PhaseVector& z, double t,
                        double dt, const StepOptions& options) {
  const auto law = DissipationLaw::viscous(phi);
  check_compatible(model, law);
  check_step(model, z, t, dt);
  return viscous_impl(model, law, z, t, dt, options);
}

StepResult step_plastic(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z, double t,
                        double dt, const StepOptions& options) {
  if (law.tag() != DissipationLaw::Tag::Plastic) fail(ErrorKind::Usage, "step_plastic needs a plastic law");
  check_compatible(model, law);
  check_step(model, z, t, dt);
  return plastic_impl(model, law, z, t, dt, options);
}

StepResult step_damage(const HamiltonianModel& model, double threshold, const PhaseVector& z, double t, double dt,
                       const StepOptions& options) {
  const auto law = DissipationLaw::damage(threshold);
  check_compatible(model, law);
  check_step(model, z, t, dt);
  return damage_impl(model, law, z, t, dt, options);
}

StepResult step_contact(const HamiltonianModel& model, const ConstraintSet& admissible, const PhaseVector& z,
                        double t, double dt, const StepOptions& options) {
  const auto law = DissipationLaw::contact(admissible);
  check_compatible(model, law);
  check_step(model, z, t, dt);
  return contact_impl(model, law, z, t, dt, options);
}

StepResult step(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z, double t, double dt,
                const StepOptions& options) {
  check_compatible(model, law);
  check_step(model, z, t, dt);
  using Tag = DissipationLaw::Tag;
  switch (law.tag()) {
    case Tag::Pure:
      return pure_impl(model, law, z, t, dt, options);
    case Tag::Viscous:
      return viscous_impl(model, law, z, t, dt, options);
    case Tag::Plastic:
      return plastic_impl(model, law, z, t, dt, options);
    case Tag::Damage:
      return damage_impl(model, law, z, t, dt, options);
    case Tag::Contact:
      return contact_impl(model, law, z, t, dt, options);
    case Tag::Separable:
      break;
  }
  fail(ErrorKind::Unsupported, "no stepper for separable laws");
}

PhaseVector extract_eta(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z_n,
                        const PhaseVector& z_next, double t, double dt) {
  model.check_shape(z_n);
  model.check_shape(z_next);
  const std::size_t n = z_n.dim();
  const Vector hp = model.dH_dp(PhaseVector(z_n.q(), z_next.p()), t);
  Vector hq = model.dH_dq(z_n, t);
  if (law.tag() == DissipationLaw::Tag::Plastic) hq[1] = model.dH_dq(z_next, t)[1];
  Vector eq(n), ep(n);
  for (std::size_t i = 0; i < n; ++i) {
    eq[i] = (z_next.q(i) - z_n.q(i)) / dt - hp[i];
    ep[i] = -(z_next.p(i) - z_n.p(i)) / dt - hq[i];
  }
  return PhaseVector(std::move(eq), std::move(ep));
}

PhaseVector evaluation_state(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z_n,
                             double t, double dt) {
  if (law.tag() != DissipationLaw::Tag::Contact) return z_n;
  const ConstraintSet& m = law.constraint_set();
  const ContactSolve s = free_flight(model, m, z_n, t, dt);
  if (s.active.empty()) return z_n;
  return PhaseVector(project_onto_active(m, s.q_free, s.active), z_n.p());
}

Trajectory integrate(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z0, double t0,
                     double T, double dt, const StepOptions& options) {
  check_compatible(model, law);
  model.check_shape(z0);
  if (!(dt > 0.0) || !std::isfinite(dt)) fail(ErrorKind::Config, "dt must be positive and finite");
  if (!std::isfinite(t0) || !std::isfinite(T) || T < t0) fail(ErrorKind::Config, "need finite t0 <= T");
  if (!(options.step_tol > 0.0)) fail(ErrorKind::Config, "step tolerance must be positive");
  if (!gap_selection(law, z0, PhaseVector::zeros(z0.dim()), options.gap))
    fail(ErrorKind::Config, std::string("initial state violates the constraints of the ") + law.name() + " law");
  if (options.restitution < 0.0 || options.restitution > 1.0)
    fail(ErrorKind::Config, "restitution must lie in [0, 1]");

  const auto steps = static_cast<std::size_t>(std::max(0.0, std::ceil((T - t0) / dt - 1e-9)));
  Trajectory tr;
  tr.dt = dt;
  tr.times.reserve(steps + 1);
  tr.states.reserve(steps + 1);
  tr.etas.reserve(steps);
  tr.times.push_back(t0);
  tr.states.push_back(z0);
  tr.energies.push_back(model.energy(z0, t0));
  tr.dissipated_work.push_back(0.0);
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    StepResult r;
    try {
      r = step(model, law, tr.states.back(), t, dt, options);
    } catch (const Error& err) {
      tr.complete = false;
      tr.failure = "step " + std::to_string(k) + " at t=" + std::to_string(t) + ": " + err.what();
      return tr;
    }
    if (r.event == StepEvent::None && !(r.residual <= ExtendedReal(options.step_tol))) {
      tr.complete = false;
      tr.failure = "step " + std::to_string(k) + " at t=" + std::to_string(t) + ": information content " +
                   (r.residual.is_infinite() ? std::string("+inf") : std::to_string(r.residual.value())) +
                   " exceeds the step tolerance";
      return tr;
    }
    const double t_next = t0 + static_cast<double>(k + 1) * dt;
    tr.times.push_back(t_next);
    tr.energies.push_back(model.energy(r.z_next, t_next));
    tr.dissipated_work.push_back(tr.dissipated_work.back() + r.dissipated);
    tr.states.push_back(std::move(r.z_next));
    tr.etas.push_back(std::move(r.eta));
    tr.residuals.push_back(r.residual);
    tr.events.push_back(r.event);
    tr.iterations.push_back(r.solver_iterations);
  }
  return tr;
}

}  // namespace gapdyn
