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
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gapdyn/convex.hpp"
#include "gapdyn/extended_real.hpp"
#include "gapdyn/models.hpp"
#include "gapdyn/phase_space.hpp"

namespace gapdyn {

/// Finite intersection of half-spaces {q : <a_i, q> + b_i >= 0}.
class ConstraintSet {
 public:
  ConstraintSet() = default;
  /// Throws a config error if the set is empty or a normal a_i vanishes.
  explicit ConstraintSet(std::vector<HalfSpace> halfspaces);

  std::size_t dim() const { return dim_; }
  const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }

  bool contains(std::span<const double> q, double tol = 0.0) const;
  /// Indices i with |g_i(q)| <= tol.
  std::vector<std::size_t> active(std::span<const double> q, double tol) const;

  /// u in N(q|M) = {-sum_i lambda_i a_i : lambda_i >= 0, i active}.
  /// Throws a usage error when q is outside M by more than tol.
  bool normal_cone_contains(std::span<const double> q, std::span<const double> u, double tol) const;
  /// v in T(q|M) = {v : <a_i, v> >= 0 for active i}.
  bool tangent_cone_contains(std::span<const double> q, std::span<const double> v, double tol) const;

 private:
  std::vector<HalfSpace> halfspaces_;
  std::size_t dim_ = 0;
};

/// True when the half-spaces have a common point (Fourier-Motzkin elimination).
bool feasible(const std::vector<HalfSpace>& halfspaces);

/// The information content I(z, z', z'') of one dissipation mechanism.
///
/// Every law except Contact has the separable shape
///   I = C(z) + Phi(z') + Phi*(z'') - <<z', z''>>
/// where C collects state constraints and Phi is a convex function of the
/// flattened velocity (q', p'). Because <<a, b>> = dot(a, swap(b)), the
/// conjugate with respect to the phase-space pairing is the Euclidean one
/// taken at swap(z'') = (z''_p, z''_q).
class DissipationLaw {
 public:
  enum class Tag { Pure, Separable, Viscous, Plastic, Damage, Contact };

  /// I = chi_0(z'').
  static DissipationLaw pure();
  /// Phi on flattened phase vectors of length 2n.
  static DissipationLaw separable(ConvexFunction potential);
  /// Rayleigh potential phi(q'), n-dimensional.
  static DissipationLaw viscous(ConvexFunction phi);
  /// phi acting on the internal momentum rate p_I'; internal layout.
  static DissipationLaw plastic(ConvexFunction phi);
  static DissipationLaw plastic_yield(double yield_stress);
  /// Threshold Y; damage layout with constraints d in [0,1], d' >= 0.
  static DissipationLaw damage(double threshold);
  static DissipationLaw contact(ConstraintSet admissible);

  Tag tag() const { return tag_; }
  const char* name() const;

  /// Phi on the flattened velocity for phase dimension n. Throws for Contact.
  ConvexFunction potential(std::size_t n) const;
  /// Euclidean conjugate of potential(n); evaluate it at swap(eta).
  ConvexFunction potential_polar(std::size_t n) const;

  /// Phase dimension required by the law, if it fixes one.
  std::optional<std::size_t> required_dim() const;
  /// Layout the law needs, if any.
  std::optional<Layout> required_layout() const;

  const ConvexFunction& phi() const;
  double threshold() const { return threshold_; }
  const ConstraintSet& constraint_set() const { return constraints_; }

 private:
  Tag tag_ = Tag::Pure;
  std::optional<ConvexFunction> phi_;
  // Cached potential and its conjugate for the law's own dimension.
  std::optional<ConvexFunction> potential_;
  std::optional<ConvexFunction> potential_polar_;
  double threshold_ = 0.0;
  ConstraintSet constraints_;
};

struct GapOptions {
  /// Slots within this distance of the domain of an indicator are treated as
  /// lying on its boundary.
  double indicator_tol = 1e-9;
};

/// Point of evaluation of I: state, rate and gap of one step or instant.
struct GapSample {
  PhaseVector z;
  PhaseVector z_dot;
  PhaseVector eta;
  ExtendedReal value;
};

ExtendedReal information_content(const DissipationLaw& law, const PhaseVector& z, const PhaseVector& z_dot,
                                 const PhaseVector& eta, const GapOptions& options = {});

/// exp(-I), with exp(-inf) = 0.
double likelihood(const DissipationLaw& law, const PhaseVector& z, const PhaseVector& z_dot,
                  const PhaseVector& eta, const GapOptions& options = {});

/// b = I + <<z', z''>>.
ExtendedReal bipotential_value(const DissipationLaw& law, const PhaseVector& z, const PhaseVector& z_prime,
                               const PhaseVector& z_dprime, const GapOptions& options = {});

/// I(z, z', z'') <= tol.
bool zero_gap_holds(const DissipationLaw& law, const PhaseVector& z, const PhaseVector& z_dot,
                    const PhaseVector& eta, double tol, const GapOptions& options = {});

/// eta in dPhi(z') under the phase-space pairing, i.e. swap(eta) in the
/// Euclidean subdifferential of Phi at flatten(z'). Throws for Contact.
bool gap_inclusion_holds(const DissipationLaw& law, const PhaseVector& z_dot, const PhaseVector& eta,
                         double tol = kMembershipTol);

/// Minimal-norm eta with I(z, z', eta) = 0, when one exists.
std::optional<PhaseVector> gap_selection(const DissipationLaw& law, const PhaseVector& z,
                                         const PhaseVector& z_dot, const GapOptions& options = {});

/// Random (z, z', z'') with each slot inside its constraint set.
GapSample sample_admissible(const DissipationLaw& law, std::size_t n, std::mt19937_64& rng);

struct AxiomsReport {
  std::size_t samples = 0;
  std::size_t convexity_violations_rate = 0;  // midpoint convexity in z'
  std::size_t convexity_violations_gap = 0;   // midpoint convexity in z''
  std::size_t infimum_zero = 0;
  std::size_t infimum_infinite = 0;
  std::size_t infimum_intermediate = 0;  // neither ~0 nor +inf: an axiom failure
  bool convexity_exempt = false;
  std::vector<std::string> notes;

  bool passed() const {
    const bool convex_ok = convexity_exempt || (convexity_violations_rate == 0 && convexity_violations_gap == 0);
    return convex_ok && infimum_intermediate == 0;
  }
};

/// Sampled checks of the likelihood axioms: I convex in each rate slot and
/// inf over z'' of I in {0, +inf}.
AxiomsReport axioms_check(const DissipationLaw& law, std::size_t n, std::size_t sample_count,
                          std::uint64_t seed = 1);

}  // namespace gapdyn
