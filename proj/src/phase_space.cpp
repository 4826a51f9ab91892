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

#include "gapdyn/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapdyn/error.hpp"
#include "gapdyn/models.hpp"

namespace gapdyn {

double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    fail(ErrorKind::Usage, "dot: dimension mismatch " + std::to_string(a.size()) + " vs " +
                               std::to_string(b.size()));
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

PhaseVector::PhaseVector(Vector q, Vector p) : q_(std::move(q)), p_(std::move(p)) {
  if (q_.size() != p_.size())
    fail(ErrorKind::Usage, "phase vector blocks differ in size: q has " + std::to_string(q_.size()) +
                               ", p has " + std::to_string(p_.size()));
  auto finite = [](double v) { return std::isfinite(v); };
  if (!std::all_of(q_.begin(), q_.end(), finite) || !std::all_of(p_.begin(), p_.end(), finite))
    fail(ErrorKind::Usage, "phase vector entries must be finite");
}

PhaseVector PhaseVector::zeros(std::size_t n) { return PhaseVector(Vector(n, 0.0), Vector(n, 0.0)); }

PhaseVector PhaseVector::unflatten(std::span<const double> flat) {
  if (flat.size() % 2 != 0) fail(ErrorKind::Usage, "flattened phase vector has odd length");
  const std::size_t n = flat.size() / 2;
  return PhaseVector(Vector(flat.begin(), flat.begin() + n), Vector(flat.begin() + n, flat.end()));
}

Vector PhaseVector::flatten() const {
  Vector out(q_);
  out.insert(out.end(), p_.begin(), p_.end());
  return out;
}

namespace {
void require_same_dim(const PhaseVector& a, const PhaseVector& b) {
  if (a.dim() != b.dim())
    fail(ErrorKind::Usage, "phase vectors of dimension " + std::to_string(a.dim()) + " and " +
                               std::to_string(b.dim()) + " cannot be combined");
}
}  // namespace

PhaseVector& PhaseVector::operator+=(const PhaseVector& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < dim(); ++i) {
    q_[i] += other.q_[i];
    p_[i] += other.p_[i];
  }
  return *this;
}

PhaseVector& PhaseVector::operator-=(const PhaseVector& other) {
  require_same_dim(*this, other);
  for (std::size_t i = 0; i < dim(); ++i) {
    q_[i] -= other.q_[i];
    p_[i] -= other.p_[i];
  }
  return *this;
}

PhaseVector& PhaseVector::operator*=(double s) {
  for (auto& v : q_) v *= s;
  for (auto& v : p_) v *= s;
  return *this;
}

double PhaseVector::max_abs() const {
  double m = 0.0;
  for (double v : q_) m = std::max(m, std::abs(v));
  for (double v : p_) m = std::max(m, std::abs(v));
  return m;
}

double dual_pairing(const PhaseVector& z1, const PhaseVector& z2) {
  require_same_dim(z1, z2);
  return dot(z1.q(), z2.p()) + dot(z2.q(), z1.p());
}

double symplectic_form(const PhaseVector& z1, const PhaseVector& z2) {
  require_same_dim(z1, z2);
  return dot(z1.q(), z2.p()) - dot(z2.q(), z1.p());
}

PhaseVector conjugate(const PhaseVector& z) {
  Vector p = z.p();
  for (auto& v : p) v = -v;
  return PhaseVector(z.q(), std::move(p));
}

PhaseVector gradient(const HamiltonianModel& model, const PhaseVector& z, double t) {
  return PhaseVector(model.dH_dp(z, t), model.dH_dq(z, t));
}

PhaseVector symplectic_gradient(const HamiltonianModel& model, const PhaseVector& z, double t) {
  return conjugate(gradient(model, z, t));
}

PhaseVector finite_difference_gradient(const HamiltonianModel& model, const PhaseVector& z, double t,
                                       double h) {
  const std::size_t n = z.dim();
  Vector dq(n), dp(n);
  for (std::size_t i = 0; i < n; ++i) {
    Vector qp = z.q(), qm = z.q();
    qp[i] += h;
    qm[i] -= h;
    dq[i] = (model.energy(PhaseVector(qp, z.p()), t) - model.energy(PhaseVector(qm, z.p()), t)) / (2 * h);
    Vector pp = z.p(), pm = z.p();
    pp[i] += h;
    pm[i] -= h;
    dp[i] = (model.energy(PhaseVector(z.q(), pp), t) - model.energy(PhaseVector(z.q(), pm), t)) / (2 * h);
  }
  return PhaseVector(std::move(dp), std::move(dq));
}

double finite_difference_directional(const HamiltonianModel& model, const PhaseVector& z,
                                     const PhaseVector& v, double t, double h) {
  return (model.energy(z + h * v, t) - model.energy(z - h * v, t)) / (2 * h);
}

}  // namespace gapdyn
