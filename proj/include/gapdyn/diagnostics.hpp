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
#include <cstdint>
#include <string>
#include <vector>

#include "gapdyn/dissipation.hpp"
#include "gapdyn/extended_real.hpp"
#include "gapdyn/integrators.hpp"
#include "gapdyn/models.hpp"
#include "gapdyn/phase_space.hpp"

namespace gapdyn {

struct Violation {
  std::size_t step;
  std::string invariant;
  double magnitude;
};

/// One row of the energy ledger, describing the step from n to n + 1.
struct LedgerEntry {
  double t;
  double energy;
  /// shadow_energy at the start of the step.
  double shadow;
  double energy_change;
  double dissipated;
  /// Explicit time dependence: H(z+, t+) - H(z+, t).
  double time_work;
  /// shadow change + dissipated - shadow time work; zero for an exact balance.
  double excess;
};

/// Uniform per-coordinate grid for the brute-force oracle, refined by zooming
/// onto the best cell.
struct OracleGrid {
  double lo = -5.0;
  double hi = 5.0;
  std::size_t points = 401;
  int refinements = 4;
  std::size_t refine_points = 41;
};

struct OracleResult {
  /// Minimal-norm grid argmin after refinement.
  PhaseVector eta_star;
  ExtendedReal i_star;
  /// Flattened indices of the searched gap coordinates.
  std::vector<std::size_t> coordinates;
  /// Spacing of the coarse grid.
  double spacing = 0.0;
  /// Coarse grid points whose value is within tolerance of the minimum.
  std::vector<Vector> near_argmin;
};

/// Flattened (eta_q, eta_p) indices that a law leaves free.
std::vector<std::size_t> oracle_coordinates(const DissipationLaw& law, std::size_t n);

/// Exhaustive minimisation of I(z, z_dot, .) over the oracle coordinates;
/// the remaining gap entries stay at zero. More than three coordinates is a
/// usage error.
OracleResult brute_force_gap(const DissipationLaw& law, const PhaseVector& z, const PhaseVector& z_dot,
                             const OracleGrid& grid = {}, const GapOptions& options = {});

/// base widened symmetrically, at the same spacing, until it covers
/// [-1.25 magnitude, 1.25 magnitude].
OracleGrid grid_covering(const OracleGrid& base, double magnitude);

/// Chebyshev distance from eta to the nearest near-argmin point, in the
/// oracle coordinates.
double oracle_distance(const OracleResult& result, const PhaseVector& eta);

/// One stepper step from z compared against the oracle at the same state
/// and rate.
struct OracleAgreement {
  PhaseVector eta_stepper;
  OracleResult oracle;
  ExtendedReal residual;
  StepEvent event = StepEvent::None;
  /// Chebyshev distance from the stepper gap to the near-argmin set.
  double distance = 0.0;
  /// distance within one coarse grid cell.
  bool argmin_agrees = false;
};

OracleAgreement oracle_agreement(const HamiltonianModel& model, const DissipationLaw& law, const PhaseVector& z,
                                 double t, double dt, const StepOptions& step_options = {},
                                 const OracleGrid& grid = {});

struct AuditOptions {
  double step_tol = 1e-8;
  /// Per-step energy slack, multiplied by dt.
  double ledger_slack = 1e-6;
  /// Relative closure tolerance at reference_dt; scaled up linearly for
  /// larger steps since the schemes are first order.
  double closure_tol = 1e-4;
  double reference_dt = 1e-4;
  std::size_t oracle_samples = 20;
  std::uint64_t seed = 1;
  OracleGrid grid;
  GapOptions gap;
};

struct AuditReport {
  ExtendedReal gap_functional;
  /// Over steps without events.
  double max_step_residual = 0.0;
  std::vector<LedgerEntry> energy_ledger;
  std::vector<Violation> violations;
  double max_ledger_excess = 0.0;
  double total_dissipated = 0.0;
  double total_time_work = 0.0;
  double closure_residual = 0.0;
  double closure_relative = 0.0;
  double closure_tolerance = 0.0;
  std::size_t oracle_checked = 0;
  double oracle_max_distance = 0.0;
  std::size_t damage_saturations = 0;
  std::size_t restitution_impacts = 0;

  bool passed() const { return violations.empty(); }
};

/// Left-endpoint quadrature sum_n I(z_n, (z_n+1 - z_n)/dt, eta_n) dt with the
/// stored gaps; +inf when any step has infinite content.
ExtendedReal gap_functional(const Trajectory& trajectory, const HamiltonianModel& model, const DissipationLaw& law,
                            const GapOptions& options = {});

/// Modified energy of Euler-B truncated after second order:
///   H - (dt/2) <H_p, H_q> + (dt^2/12) (<H_q, H_pp H_q> + <H_p, H_qq H_p>).
/// Conserved by pure steps up to O(dt^4) per step.
double shadow_energy(const HamiltonianModel& model, const PhaseVector& z, double t, double dt);

/// Energy ledger and closure only.
AuditReport energy_audit(const Trajectory& trajectory, const HamiltonianModel& model, const DissipationLaw& law,
                         const AuditOptions& options = {});

/// energy_audit plus step residuals, law invariants and oracle spot checks.
AuditReport audit(const Trajectory& trajectory, const HamiltonianModel& model, const DissipationLaw& law,
                  const AuditOptions& options = {});

}  // namespace gapdyn
