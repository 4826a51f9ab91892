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
#include <utility>
#include <vector>

#include "gapdyn/phase_space.hpp"

namespace gapdyn {

/// External load f(t), entering the energy as -q * f(t).
class Forcing {
 public:
  enum class Tag { Zero, Constant, Sinusoid, PiecewiseLinear };

  Forcing() = default;
  static Forcing zero() { return {}; }
  static Forcing constant(double value);
  /// amplitude * sin(angular_frequency * t + phase)
  static Forcing sinusoid(double amplitude, double angular_frequency, double phase = 0.0);
  /// Linear interpolation between (t, value) knots sorted by t, held constant
  /// outside the knot range.
  static Forcing piecewise_linear(std::vector<std::pair<double, double>> knots);

  Tag tag() const { return tag_; }
  double operator()(double t) const;
  bool is_zero() const { return tag_ == Tag::Zero; }

  double amplitude() const { return a_; }
  double angular_frequency() const { return w_; }
  double phase() const { return phi_; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }

 private:
  Tag tag_ = Tag::Zero;
  double a_ = 0.0;
  double w_ = 0.0;
  double phi_ = 0.0;
  std::vector<std::pair<double, double>> knots_;
};

/// How the blocks of a phase vector are used.
///   Plain:    q = {q},    p = {p}
///   Internal: q = {q, q_I}, p = {p, p_I}
///   Damage:   q = {q, d},   p = {p, r}
enum class Layout { Plain, Internal, Damage };

std::size_t layout_dim(Layout layout);
const char* layout_name(Layout layout);

/// Unilateral constraint <a, q> + b >= 0.
struct HalfSpace {
  Vector a;
  double b = 0.0;
  double value(std::span<const double> q) const { return dot(a, q) + b; }
};

/// Builtin Hamiltonian systems, one degree of freedom per block.
///
/// All builtins have the kinetic/potential split H = K(p) + V(q, t) with
/// K(p) = sum_i p_i^2 / (2 M_i), so dH/dp = p / M depends on p only and
/// dH/dq on q and t only.
class HamiltonianModel {
 public:
  enum class Tag { HarmonicOscillator, Pendulum, ElastoPlastic1D, Damage, ContactBall };

  /// H = p^2/(2m) + k q^2/2
  static HamiltonianModel harmonic_oscillator(double m, double k);
  /// H = p^2/(2 m l^2) + m g l (1 - cos q)
  static HamiltonianModel pendulum(double m, double g, double l);
  /// H = p^2/(2m) + k (q - q_I)^2/2 - q f(t)
  static HamiltonianModel elasto_plastic(double m, double k, Forcing f = {});
  /// H = p^2/(2m) + r^2/(2 m_d) + (1 - d) E0 q^2/2 - q f(t)
  static HamiltonianModel damage(double m, double m_d, double e0, Forcing f = {});
  /// H = p^2/(2m) + m g q, admissible set q >= 0
  static HamiltonianModel contact_ball(double m, double g);

  Tag tag() const { return tag_; }
  const char* name() const;
  Layout layout() const;
  std::size_t dim() const { return layout_dim(layout()); }
  bool autonomous() const { return forcing_.is_zero(); }
  /// True when dH/dp depends on p only and dH/dq on (q, t) only.
  bool separable() const { return true; }

  double energy(const PhaseVector& z, double t) const;
  Vector dH_dq(const PhaseVector& z, double t) const;
  Vector dH_dp(const PhaseVector& z, double t) const;
  /// d2H/dq2 applied to v.
  Vector d2H_dq2_times(const PhaseVector& z, double t, std::span<const double> v) const;
  /// (dH/dp, -dH/dq) over all blocks.
  PhaseVector flow_field(const PhaseVector& z, double t) const;
  /// Diagonal of M^{-1}, so that dH/dp = inverse_mass() * p.
  Vector inverse_mass() const;

  /// sigma = k (q - q_I). Only for ElastoPlastic1D.
  double elastic_force(double q, double q_internal) const;
  /// E(q) = E0 q^2 / 2, the energy released per unit damage. Only for Damage.
  double damage_driving_force(double q) const;
  /// Admissible set of ContactBall ({q >= 0}); empty for other models.
  std::vector<HalfSpace> constraints() const;

  // Parameters. Unused ones are zero.
  double mass() const { return m_; }
  double stiffness() const { return k_; }
  double gravity() const { return g_; }
  double length() const { return l_; }
  double damage_inertia() const { return md_; }
  const Forcing& forcing() const { return forcing_; }

  /// Throws a usage error if z does not match the layout.
  void check_shape(const PhaseVector& z) const;

 private:
  Tag tag_ = Tag::HarmonicOscillator;
  double m_ = 1.0;
  double k_ = 0.0;
  double g_ = 0.0;
  double l_ = 0.0;
  double md_ = 0.0;
  Forcing forcing_;
};

}  // namespace gapdyn
