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
#include <span>
#include <vector>

namespace gapdyn {

using Vector = std::vector<double>;

double dot(std::span<const double> a, std::span<const double> b);

class HamiltonianModel;

/// A point z = (q, p) of N = X x Y with X = Y = R^n.
///
/// Models with internal variables stack them into the same two blocks, so the
/// elasto-plastic state (q, q_I, p, p_I) is q = {q, q_I}, p = {p, p_I}.
class PhaseVector {
 public:
  PhaseVector() = default;
  /// Throws a usage error if the blocks differ in size or hold NaN/Inf.
  PhaseVector(Vector q, Vector p);

  static PhaseVector zeros(std::size_t n);
  /// Inverse of flatten(): first half is q, second half is p.
  static PhaseVector unflatten(std::span<const double> flat);

  std::size_t dim() const { return q_.size(); }
  const Vector& q() const { return q_; }
  const Vector& p() const { return p_; }
  double q(std::size_t i) const { return q_[i]; }
  double p(std::size_t i) const { return p_[i]; }

  /// (q_0..q_{n-1}, p_0..p_{n-1})
  Vector flatten() const;

  /// (p, q). With it the self-duality of N becomes a Euclidean dot product:
  /// dual_pairing(a, b) == dot(a.flatten(), b.swapped().flatten()).
  PhaseVector swapped() const { return PhaseVector(p_, q_); }

  PhaseVector& operator+=(const PhaseVector& other);
  PhaseVector& operator-=(const PhaseVector& other);
  PhaseVector& operator*=(double s);
  friend PhaseVector operator+(PhaseVector a, const PhaseVector& b) { return a += b; }
  friend PhaseVector operator-(PhaseVector a, const PhaseVector& b) { return a -= b; }
  friend PhaseVector operator*(double s, PhaseVector a) { return a *= s; }
  friend bool operator==(const PhaseVector&, const PhaseVector&) = default;

  double max_abs() const;

 private:
  Vector q_;
  Vector p_;
};

/// <<z1, z2>> = <q1, p2> + <q2, p1>
double dual_pairing(const PhaseVector& z1, const PhaseVector& z2);

/// omega(z1, z2) = <q1, p2> - <q2, p1> = <<conjugate(z1), z2>>
double symplectic_form(const PhaseVector& z1, const PhaseVector& z2);

/// (q, p) -> (q, -p). An involution.
PhaseVector conjugate(const PhaseVector& z);

/// DH(z) in the pairing convention: the q-slot holds dH/dp and the p-slot
/// holds dH/dq, so that dual_pairing(gradient(H, z), v) is the directional
/// derivative of H along v. Note this is the reverse of the usual
/// (dH/dq, dH/dp) ordering.
PhaseVector gradient(const HamiltonianModel& model, const PhaseVector& z, double t);

/// XH(z) = (dH/dp, -dH/dq), the right-hand side of Hamilton's equations.
/// Always equal to conjugate(gradient(model, z, t)).
PhaseVector symplectic_gradient(const HamiltonianModel& model, const PhaseVector& z, double t);

/// Central-difference estimate of gradient() with the same slot convention.
PhaseVector finite_difference_gradient(const HamiltonianModel& model, const PhaseVector& z,
                                       double t, double h = 1e-5);

/// Central-difference estimate of d/de H(z + e v) at e = 0.
double finite_difference_directional(const HamiltonianModel& model, const PhaseVector& z,
                                     const PhaseVector& v, double t, double h = 1e-5);

}  // namespace gapdyn
