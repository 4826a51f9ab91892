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

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gapdyn/dissipation.hpp"
#include "gapdyn/extended_real.hpp"
#include "gapdyn/models.hpp"
#include "gapdyn/phase_space.hpp"

namespace gapdyn {

struct StepOptions {
  /// Accepted steps have information content at most this.
  double step_tol = 1e-8;
  int max_iter = 100;
  /// Fixed-point convergence on successive iterates.
  double fixed_point_tol = 1e-12;
  /// Newton coefficient for contact impacts; 0 is a plastic impact.
  double restitution = 0.0;
  GapOptions gap;
};

/// Steps whose residual is not expected to vanish, recorded instead of
/// rejected.
enum class StepEvent {
  None,
  /// Damage reached 1 and was clamped; the clamp is not a gap-law step.
  DamageSaturation,
  /// Contact impact with restitution > 0, which violates complementarity.
  RestitutionImpact,
};

const char* step_event_name(StepEvent e);

struct StepResult {
  PhaseVector z_next;
  /// The gap the solver selected.
  PhaseVector eta;
  /// I(evaluation_state, (z_next - z)/dt, extract_eta(...)).
  ExtendedReal residual;
  int solver_iterations = 0;
  StepEvent event = StepEvent::None;
  /// Work dissipated over the step.
  double dissipated = 0.0;
};

/// Semi-implicit (symplectic Euler-B) update
///   p+ = p - dt dH/dq(q, p+, t),  q+ = q + dt dH/dp(q, p+, t),
/// explicit for the builtin split Hamiltonians, eta = 0.
StepResult step_pure(const HamiltonianModel& model, const PhaseVector& z, double t, double dt,
                     const StepOptions& options = {});

/// Euler-B with a Rayleigh force: eta_p in dphi(q'+) resolved by a
/// prox fixed point, eta_q = 0.
StepResult step_viscous(const HamiltonianModel& model, const ConvexFunction& phi, const PhaseVector& z, double t,
                        double dt, const StepOptions& options = {});

/// Elastic predictor with return mapping onto the yield set of the law.
StepResult step_plastic(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z, double t,
                        double dt, const StepOptions& options = {});

/// Mechanical step at frozen damage, then the damage momentum with the
/// threshold complementarity r >= 0, eta_r <= Y.
StepResult step_damage(const HamiltonianModel& model, double threshold, const PhaseVector& z, double t, double dt,
                       const StepOptions& options = {});

/// Moreau-Jean step: free flight, then a velocity impulse on constraints the
/// free position would violate.
StepResult step_contact(const HamiltonianModel& model, const ConstraintSet& admissible, const PhaseVector& z,
                        double t, double dt, const StepOptions& options = {});

/// Dispatch on the law. Separable laws have no stepper (unsupported error).
StepResult step(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z, double t, double dt,
                const StepOptions& options = {});

/// Throws a config error if the law cannot drive the model.
void check_compatible(const HamiltonianModel& model, const DissipationLaw& law);

/// Discrete gap of a step with derivatives where the schemes take them:
///   eta_q = (q+ - q)/dt - dH/dp(q, p+, t),  eta_p = -(p+ - p)/dt - dH/dq(q, t).
/// For the plastic law the internal entries use the end-of-step positions,
/// where the return mapping evaluates the stress.
PhaseVector extract_eta(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z_n,
                        const PhaseVector& z_next, double t, double dt);

/// State at which the step's information content is evaluated: z_n, except
/// for contact where q is replaced by the projection of the free-flight
/// position onto the constraints it violates.
PhaseVector evaluation_state(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z_n,
                             double t, double dt);

struct Trajectory {
  double dt = 0.0;
  std::vector<double> times;
  std::vector<PhaseVector> states;
  /// etas[n] belongs to the step states[n] -> states[n+1].
  std::vector<PhaseVector> etas;
  std::vector<double> energies;
  std::vector<ExtendedReal> residuals;
  /// Cumulative, same length as states, starting at 0.
  std::vector<double> dissipated_work;
  std::vector<StepEvent> events;
  std::vector<int> iterations;
  bool complete = true;
  std::string failure;

  std::size_t steps() const { return etas.size(); }
};

/// Runs ceil((T - t0)/dt) uniform steps from t0, so the final time is T
/// rounded up to the step grid. A step error, or a residual above the
/// tolerance on a step without an event, stops the run; the partial
/// trajectory comes back with complete == false.
Trajectory integrate(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z0, double t0,
                     double T, double dt, const StepOptions& options = {});

}  // namespace gapdyn
