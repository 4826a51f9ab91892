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

#include "gapdyn/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "gapdyn/error.hpp"
#include "gapdyn/integrators.hpp"

namespace gapdyn {

namespace {

void check_trajectory(const Trajectory& tr, const HamiltonianModel& model) {
  const std::size_t steps = tr.etas.size();
  if (tr.states.size() != steps + 1 || tr.times.size() != steps + 1)
    fail(ErrorKind::Usage, "trajectory needs one more state and time than gaps");
  if (!tr.dissipated_work.empty() && tr.dissipated_work.size() != steps + 1)
    fail(ErrorKind::Usage, "trajectory dissipated work has the wrong length");
  if (!(tr.dt > 0.0)) fail(ErrorKind::Usage, "trajectory dt must be positive");
  for (const auto& z : tr.states) model.check_shape(z);
  for (const auto& e : tr.etas) model.check_shape(e);
}

PhaseVector step_rate(const Trajectory& tr, std::size_t n) {
  return (1.0 / tr.dt) * (tr.states[n + 1] - tr.states[n]);
}

StepEvent event_at(const Trajectory& tr, std::size_t n) {
  return n < tr.events.size() ? tr.events[n] : StepEvent::None;
}

bool impulse_applied(const PhaseVector& eta) {
  return std::any_of(eta.p().begin(), eta.p().end(), [](double v) { return v != 0.0; });
}

double kinetic(const HamiltonianModel& model, const Vector& p) {
  const Vector inv_mass = model.inverse_mass();
  double k = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) k += 0.5 * inv_mass[i] * p[i] * p[i];
  return k;
}

double dissipated_at(const Trajectory& tr, std::size_t n) {
  return tr.dissipated_work.empty() ? 0.0 : tr.dissipated_work[n + 1] - tr.dissipated_work[n];
}

double grid_point(double lo, double hi, std::size_t points, std::size_t i) {
  if (points == 1) return 0.5 * (lo + hi);
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
}

struct Scan {
  ExtendedReal best = ExtendedReal::infinity();
  Vector best_point;
  double best_norm = 0.0;
  std::vector<std::pair<Vector, ExtendedReal>> values;
};

// Odometer over a box grid centred per coordinate; keeps all values when
// asked so the near-argmin set can be extracted afterwards.
Scan scan_grid(const DissipationLaw& law, const PhaseVector& z, const PhaseVector& z_dot,
               const std::vector<std::size_t>& coords, const Vector& lo, const Vector& hi, std::size_t points,
               bool keep, const GapOptions& options) {
  const std::size_t k = coords.size();
  const std::size_t n = z.dim();
  Scan s;
  std::vector<std::size_t> idx(k, 0);
  Vector flat(2 * n, 0.0), x(k);
  while (true) {
    for (std::size_t j = 0; j < k; ++j) {
      x[j] = grid_point(lo[j], hi[j], points, idx[j]);
      flat[coords[j]] = x[j];
    }
    const ExtendedReal v = information_content(law, z, z_dot, PhaseVector::unflatten(flat), options);
    const double nrm = std::sqrt(dot(x, x));
    if (v < s.best || (v == s.best && v.is_finite() && nrm < s.best_norm)) {
      s.best = v;
      s.best_point = x;
      s.best_norm = nrm;
    }
    if (keep && v.is_finite()) s.values.emplace_back(x, v);
    std::size_t j = 0;
    for (; j < k; ++j) {
      if (++idx[j] < points) break;
      idx[j] = 0;
    }
    if (j == k) break;
  }
  return s;
}

void add(AuditReport& r, std::size_t step, const char* name, double magnitude) {
  r.violations.push_back({step, name, magnitude});
}

}  // namespace

std::vector<std::size_t> oracle_coordinates(const DissipationLaw& law, std::size_t n) {
  using Tag = DissipationLaw::Tag;
  std::vector<std::size_t> c;
  switch (law.tag()) {
    case Tag::Pure:
    case Tag::Separable:
      c.resize(2 * n);
      std::iota(c.begin(), c.end(), std::size_t{0});
      break;
    case Tag::Viscous:
    case Tag::Contact:
      for (std::size_t i = 0; i < n; ++i) c.push_back(n + i);
      break;
    case Tag::Plastic:
      c.push_back(1);  // eta on the internal position
      break;
    case Tag::Damage:
      c.push_back(3);  // eta on the damage momentum
      break;
  }
  return c;
}

OracleGrid grid_covering(const OracleGrid& base, double magnitude) {
  const double half = std::max(std::abs(base.lo), std::abs(base.hi));
  if (!(1.25 * magnitude > half)) return base;
  const double spacing = (base.hi - base.lo) / static_cast<double>(base.points - 1);
  OracleGrid g = base;
  g.hi = std::ceil(1.25 * magnitude);
  g.lo = -g.hi;
  g.points = static_cast<std::size_t>(std::llround(2.0 * g.hi / spacing)) + 1;
  return g;
}

OracleResult brute_force_gap(const DissipationLaw& law, const PhaseVector& z, const PhaseVector& z_dot,
                             const OracleGrid& grid, const GapOptions& options) {
  const std::size_t n = z.dim();
  if (z_dot.dim() != n) fail(ErrorKind::Usage, "state and rate dimensions differ");
  OracleResult r;
  r.coordinates = oracle_coordinates(law, n);
  const std::size_t k = r.coordinates.size();
  if (k > 3)
    fail(ErrorKind::Usage, "brute-force oracle limited to 3 gap coordinates, law " + std::string(law.name()) +
                               " has " + std::to_string(k));
  if (grid.points < 2 || !(grid.hi > grid.lo)) fail(ErrorKind::Usage, "oracle grid needs lo < hi and 2+ points");
  r.spacing = (grid.hi - grid.lo) / static_cast<double>(grid.points - 1);

  Scan coarse = scan_grid(law, z, z_dot, r.coordinates, Vector(k, grid.lo), Vector(k, grid.hi), grid.points, true,
                          options);
  Vector best = coarse.best_point;
  ExtendedReal best_value = coarse.best;
  if (best_value.is_finite()) {
    const double cut = best_value.value() + 1e-10 * (1.0 + std::abs(best_value.value()));
    for (auto& [x, v] : coarse.values)
      if (v.value() <= cut) r.near_argmin.push_back(std::move(x));
    // Zoom: a few cells around the incumbent, finer each round.
    double h = r.spacing;
    for (int level = 0; level < grid.refinements && grid.refine_points > 1; ++level) {
      Vector lo(k), hi(k);
      for (std::size_t j = 0; j < k; ++j) {
        lo[j] = best[j] - 2.0 * h;
        hi[j] = best[j] + 2.0 * h;
      }
      Scan fine = scan_grid(law, z, z_dot, r.coordinates, lo, hi, grid.refine_points, false, options);
      if (fine.best < best_value) {
        best_value = fine.best;
        best = fine.best_point;
      }
      h = 4.0 * h / static_cast<double>(grid.refine_points - 1);
    }
  }
  Vector flat(2 * n, 0.0);
  if (!best.empty())
    for (std::size_t j = 0; j < k; ++j) flat[r.coordinates[j]] = best[j];
  r.eta_star = PhaseVector::unflatten(flat);
  r.i_star = best_value;
  return r;
}

double oracle_distance(const OracleResult& result, const PhaseVector& eta) {
  const Vector flat = eta.flatten();
  double best = std::numeric_limits<double>::infinity();
  for (const auto& x : result.near_argmin) {
    double d = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) d = std::max(d, std::abs(x[j] - flat[result.coordinates[j]]));
    best = std::min(best, d);
  }
  return best;
}

OracleAgreement oracle_agreement(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z,
                                 double t, double dt, const StepOptions& step_options, const OracleGrid& grid) {
  const StepResult r = step(model, law, z, t, dt, step_options);
  OracleAgreement a;
  a.eta_stepper = r.eta;
  a.residual = r.residual;
  a.event = r.event;
  const PhaseVector z_eval = evaluation_state(model, law, z, t, dt);
  const PhaseVector rate = (1.0 / dt) * (r.z_next - z);
  a.oracle = brute_force_gap(law, z_eval, rate, grid_covering(grid, r.eta.max_abs()), step_options.gap);
  a.distance = oracle_distance(a.oracle, r.eta);
  a.argmin_agrees = a.distance <= a.oracle.spacing * (1.0 + 1e-9);
  return a;
}

ExtendedReal gap_functional(const Trajectory& tr, const HamiltonianModel& model, const DissipationLaw& law,
                            const GapOptions& options) {
  check_trajectory(tr, model);
  ExtendedReal total(0.0);
  for (std::size_t n = 0; n < tr.etas.size(); ++n) {
    const PhaseVector z = evaluation_state(model, law, tr.states[n], tr.times[n], tr.dt);
    // I >= 0; round-off just below zero is dropped so the sum stays nonnegative.
    const ExtendedReal i = information_content(law, z, step_rate(tr, n), tr.etas[n], options);
    total += tr.dt * (i.is_finite() ? std::max(i.value(), 0.0) : i);
    if (total.is_infinite()) break;
  }
  return total;
}

double shadow_energy(const HamiltonianModel& model, const PhaseVector& z, double t, double dt) {
  const Vector hp = model.dH_dp(z, t), hq = model.dH_dq(z, t);
  const Vector inv_mass = model.inverse_mass();
  double kinetic_curvature = 0.0;
  for (std::size_t i = 0; i < hq.size(); ++i) kinetic_curvature += inv_mass[i] * hq[i] * hq[i];
  const double potential_curvature = dot(hp, model.d2H_dq2_times(z, t, hp));
  return model.energy(z, t) - 0.5 * dt * dot(hp, hq) + dt * dt / 12.0 * (kinetic_curvature + potential_curvature);
}

AuditReport energy_audit(const Trajectory& tr, const HamiltonianModel& model, const DissipationLaw& law,
                         const AuditOptions& options) {
  (void)law;
  check_trajectory(tr, model);
  AuditReport r;
  const double dt = tr.dt;
  const std::size_t steps = tr.etas.size();
  r.energy_ledger.reserve(steps);
  double h_max = std::abs(model.energy(tr.states[0], tr.times[0]));
  for (std::size_t n = 0; n < steps; ++n) {
    const PhaseVector& z0 = tr.states[n];
    const PhaseVector& z1 = tr.states[n + 1];
    const double t0 = tr.times[n], t1 = tr.times[n + 1];
    const double h0 = model.energy(z0, t0), h1 = model.energy(z1, t1);
    const double s0 = shadow_energy(model, z0, t0, dt), s1 = shadow_energy(model, z1, t1, dt);
    const double w = h1 - model.energy(z1, t0);
    const double w_shadow = s1 - shadow_energy(model, z1, t0, dt);
    const double d = dissipated_at(tr, n);
    r.energy_ledger.push_back({t0, h0, s0, h1 - h0, d, w, s1 - s0 + d - w_shadow});
    r.max_ledger_excess = std::max(r.max_ledger_excess, r.energy_ledger.back().excess / dt);
    r.total_dissipated += d;
    r.total_time_work += w;
    h_max = std::max(h_max, std::abs(h1));
    // Energy may not be created beyond the work of the time-dependent load.
    double increase = s1 - s0 - w_shadow;
    if (law.tag() == DissipationLaw::Tag::Contact && impulse_applied(tr.etas[n])) {
      // A velocity jump breaks the smooth shadow expansion. Split the step
      // into the free Euler-B step and the impulse, which may only remove
      // kinetic energy.
      const PhaseVector free = step_pure(model, z0, t0, dt).z_next;
      increase = shadow_energy(model, free, t0, dt) - s0 + kinetic(model, z1.p()) - kinetic(model, free.p());
    }
    if (increase > options.ledger_slack * dt) add(r, n, "energy_increase", increase / dt);
    if (!tr.dissipated_work.empty() && tr.dissipated_work[n + 1] < -1e-9)
      add(r, n, "negative_dissipation", -tr.dissipated_work[n + 1]);
  }
  const double h_start = model.energy(tr.states.front(), tr.times.front());
  const double h_end = model.energy(tr.states.back(), tr.times.back());
  r.closure_residual = h_end - h_start + r.total_dissipated - r.total_time_work;
  const double scale = std::max(h_max, std::abs(r.total_dissipated));
  r.closure_relative = scale > 0.0 ? std::abs(r.closure_residual) / scale : std::abs(r.closure_residual);
  r.closure_tolerance = options.closure_tol * std::max(1.0, dt / options.reference_dt);
  if (r.closure_relative > r.closure_tolerance) add(r, steps, "ledger_closure", r.closure_relative);
  r.gap_functional = ExtendedReal(0.0);
  return r;
}

AuditReport audit(const Trajectory& tr, const HamiltonianModel& model, const DissipationLaw& law,
                  const AuditOptions& options) {
  AuditReport r = energy_audit(tr, model, law, options);
  r.gap_functional = gap_functional(tr, model, law, options.gap);
  const std::size_t steps = tr.etas.size();
  const double dt = tr.dt;
  using Tag = DissipationLaw::Tag;

  std::vector<std::size_t> regular;
  for (std::size_t n = 0; n < steps; ++n) {
    const StepEvent ev = event_at(tr, n);
    if (ev == StepEvent::DamageSaturation) ++r.damage_saturations;
    if (ev == StepEvent::RestitutionImpact) ++r.restitution_impacts;
    if (ev != StepEvent::None) continue;
    regular.push_back(n);
    if (n < tr.residuals.size()) {
      const ExtendedReal& res = tr.residuals[n];
      const double v = res.is_finite() ? res.value() : std::numeric_limits<double>::infinity();
      r.max_step_residual = std::max(r.max_step_residual, v);
      if (v > options.step_tol) add(r, n, "step_residual", v);
    }
  }

  switch (law.tag()) {
    case Tag::Plastic: {
      const double y = law.threshold();
      for (std::size_t n = 0; n < tr.states.size(); ++n) {
        const double sigma = model.elastic_force(tr.states[n].q(0), tr.states[n].q(1));
        if (std::abs(sigma) > y + 1e-9) add(r, n, "yield_surface", std::abs(sigma) - y);
      }
      break;
    }
    case Tag::Damage: {
      const double y = law.threshold();
      for (std::size_t n = 0; n < tr.states.size(); ++n) {
        const double d = tr.states[n].q(1);
        if (d < -1e-12 || d > 1.0 + 1e-12) add(r, n, "damage_bounds", d < 0.0 ? -d : d - 1.0);
      }
      for (std::size_t n = 0; n < steps; ++n) {
        const PhaseVector& z0 = tr.states[n];
        const double dd = tr.states[n + 1].q(1) - z0.q(1);
        if (dd < -1e-12) add(r, n, "damage_monotone", -dd);
        if (tr.etas[n].p(1) > y + 1e-9) add(r, n, "damage_threshold", tr.etas[n].p(1) - y);
        if (model.damage_driving_force(z0.q(0)) < y && z0.p(1) == 0.0 && dd / dt > 1e-12)
          add(r, n, "damage_below_threshold", dd / dt);
      }
      break;
    }
    case Tag::Contact: {
      const ConstraintSet& m = law.constraint_set();
      for (std::size_t n = 0; n < tr.states.size(); ++n)
        for (const auto& h : m.halfspaces())
          if (h.value(tr.states[n].q()) < -1e-12) add(r, n, "penetration", -h.value(tr.states[n].q()));
      for (std::size_t n : regular) {
        const PhaseVector rate = step_rate(tr, n);
        const double c = dot(rate.q(), tr.etas[n].p());
        if (std::abs(c) > 1e-9) add(r, n, "complementarity", std::abs(c));
      }
      break;
    }
    default:
      break;
  }

  // Oracle spot checks at seeded regular steps.
  if (options.oracle_samples > 0 && oracle_coordinates(law, model.dim()).size() <= 3 && !regular.empty()) {
    std::mt19937_64 rng(options.seed);
    std::shuffle(regular.begin(), regular.end(), rng);
    regular.resize(std::min(regular.size(), options.oracle_samples));
    std::sort(regular.begin(), regular.end());
    for (std::size_t n : regular) {
      const PhaseVector z = evaluation_state(model, law, tr.states[n], tr.times[n], dt);
      const PhaseVector& eta = tr.etas[n];
      const OracleGrid g = grid_covering(options.grid, eta.max_abs());
      const OracleResult o = brute_force_gap(law, z, step_rate(tr, n), g, options.gap);
      const double dist = oracle_distance(o, eta);
      ++r.oracle_checked;
      r.oracle_max_distance = std::max(r.oracle_max_distance, dist);
      if (!(dist <= o.spacing * (1.0 + 1e-9))) add(r, n, "oracle_argmin", dist);
      const bool accepted = n < tr.residuals.size() && tr.residuals[n] <= ExtendedReal(options.step_tol);
      if (accepted && !(o.i_star <= ExtendedReal(1e-6)))
        add(r, n, "oracle_value", o.i_star.is_finite() ? o.i_star.value() : std::numeric_limits<double>::infinity());
    }
  }
  return r;
}

}  // namespace gapdyn
