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

#include "gapdyn/models.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapdyn/error.hpp"

namespace gapdyn {

namespace {
void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    fail(ErrorKind::Config, std::string(what) + " must be a positive finite number");
}
void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) fail(ErrorKind::Config, std::string(what) + " must be finite");
}
}  // namespace

Forcing Forcing::constant(double value) {
  require_finite(value, "forcing value");
  Forcing f;
  f.tag_ = Tag::Constant;
  f.a_ = value;
  return f;
}

Forcing Forcing::sinusoid(double amplitude, double angular_frequency, double phase) {
  require_finite(amplitude, "forcing amplitude");
  require_finite(angular_frequency, "forcing angular_frequency");
  require_finite(phase, "forcing phase");
  Forcing f;
  f.tag_ = Tag::Sinusoid;
  f.a_ = amplitude;
  f.w_ = angular_frequency;
  f.phi_ = phase;
  return f;
}

Forcing Forcing::piecewise_linear(std::vector<std::pair<double, double>> knots) {
  if (knots.empty()) fail(ErrorKind::Config, "piecewise linear forcing needs at least one knot");
  for (std::size_t i = 0; i < knots.size(); ++i) {
    require_finite(knots[i].first, "knot time");
    require_finite(knots[i].second, "knot value");
    if (i > 0 && !(knots[i].first > knots[i - 1].first))
      fail(ErrorKind::Config, "forcing knots must have strictly increasing times");
  }
  Forcing f;
  f.tag_ = Tag::PiecewiseLinear;
  f.knots_ = std::move(knots);
  return f;
}

double Forcing::operator()(double t) const {
  switch (tag_) {
    case Tag::Zero:
      return 0.0;
    case Tag::Constant:
      return a_;
    case Tag::Sinusoid:
      return a_ * std::sin(w_ * t + phi_);
    case Tag::PiecewiseLinear: {
      if (t <= knots_.front().first) return knots_.front().second;
      if (t >= knots_.back().first) return knots_.back().second;
      auto it = std::upper_bound(knots_.begin(), knots_.end(), t,
                                 [](double x, const auto& k) { return x < k.first; });
      const auto& [t1, v1] = *it;
      const auto& [t0, v0] = *(it - 1);
      return v0 + (v1 - v0) * (t - t0) / (t1 - t0);
    }
  }
  return 0.0;
}

std::size_t layout_dim(Layout layout) { return layout == Layout::Plain ? 1 : 2; }

const char* layout_name(Layout layout) {
  switch (layout) {
    case Layout::Plain:
      return "plain";
    case Layout::Internal:
      return "internal";
    case Layout::Damage:
      return "damage";
  }
  return "?";
}

HamiltonianModel HamiltonianModel::harmonic_oscillator(double m, double k) {
  require_positive(m, "mass m");
  require_positive(k, "stiffness k");
  HamiltonianModel h;
  h.tag_ = Tag::HarmonicOscillator;
  h.m_ = m;
  h.k_ = k;
  return h;
}

HamiltonianModel HamiltonianModel::pendulum(double m, double g, double l) {
  require_positive(m, "mass m");
  require_positive(g, "gravity g");
  require_positive(l, "length l");
  HamiltonianModel h;
  h.tag_ = Tag::Pendulum;
  h.m_ = m;
  h.g_ = g;
  h.l_ = l;
  return h;
}

HamiltonianModel HamiltonianModel::elasto_plastic(double m, double k, Forcing f) {
  require_positive(m, "mass m");
  require_positive(k, "stiffness k");
  HamiltonianModel h;
  h.tag_ = Tag::ElastoPlastic1D;
  h.m_ = m;
  h.k_ = k;
  h.forcing_ = std::move(f);
  return h;
}

HamiltonianModel HamiltonianModel::damage(double m, double m_d, double e0, Forcing f) {
  require_positive(m, "mass m");
  require_positive(m_d, "damage inertia m_d");
  require_positive(e0, "elastic modulus E0");
  HamiltonianModel h;
  h.tag_ = Tag::Damage;
  h.m_ = m;
  h.md_ = m_d;
  h.k_ = e0;
  h.forcing_ = std::move(f);
  return h;
}

HamiltonianModel HamiltonianModel::contact_ball(double m, double g) {
  require_positive(m, "mass m");
  require_finite(g, "gravity g");
  if (g < 0.0) fail(ErrorKind::Config, "gravity g must be nonnegative");
  HamiltonianModel h;
  h.tag_ = Tag::ContactBall;
  h.m_ = m;
  h.g_ = g;
  return h;
}

const char* HamiltonianModel::name() const {
  switch (tag_) {
    case Tag::HarmonicOscillator:
      return "harmonic_oscillator";
    case Tag::Pendulum:
      return "pendulum";
    case Tag::ElastoPlastic1D:
      return "elasto_plastic";
    case Tag::Damage:
      return "damage";
    case Tag::ContactBall:
      return "contact_ball";
  }
  return "?";
}

Layout HamiltonianModel::layout() const {
  switch (tag_) {
    case Tag::ElastoPlastic1D:
      return Layout::Internal;
    case Tag::Damage:
      return Layout::Damage;
    default:
      return Layout::Plain;
  }
}

void HamiltonianModel::check_shape(const PhaseVector& z) const {
  if (z.dim() != dim())
    fail(ErrorKind::Usage, std::string(name()) + " expects phase vectors with " + std::to_string(dim()) +
                               " coordinate(s) per block, got " + std::to_string(z.dim()));
}

double HamiltonianModel::energy(const PhaseVector& z, double t) const {
  check_shape(z);
  const double q = z.q(0), p = z.p(0);
  switch (tag_) {
    case Tag::HarmonicOscillator:
      return p * p / (2 * m_) + k_ * q * q / 2;
    case Tag::Pendulum:
      return p * p / (2 * m_ * l_ * l_) + m_ * g_ * l_ * (1 - std::cos(q));
    case Tag::ElastoPlastic1D: {
      const double e = q - z.q(1);
      return p * p / (2 * m_) + k_ * e * e / 2 - q * forcing_(t);
    }
    case Tag::Damage: {
      const double d = z.q(1), r = z.p(1);
      return p * p / (2 * m_) + r * r / (2 * md_) + (1 - d) * k_ * q * q / 2 - q * forcing_(t);
    }
    case Tag::ContactBall:
      return p * p / (2 * m_) + m_ * g_ * q;
  }
  return 0.0;
}

Vector HamiltonianModel::dH_dq(const PhaseVector& z, double t) const {
  check_shape(z);
  const double q = z.q(0);
  switch (tag_) {
    case Tag::HarmonicOscillator:
      return {k_ * q};
    case Tag::Pendulum:
      return {m_ * g_ * l_ * std::sin(q)};
    case Tag::ElastoPlastic1D: {
      const double sigma = elastic_force(q, z.q(1));
      return {sigma - forcing_(t), -sigma};
    }
    case Tag::Damage: {
      const double d = z.q(1);
      return {(1 - d) * k_ * q - forcing_(t), -damage_driving_force(q)};
    }
    case Tag::ContactBall:
      return {m_ * g_};
  }
  return {};
}

Vector HamiltonianModel::d2H_dq2_times(const PhaseVector& z, double /*t*/, std::span<const double> v) const {
  check_shape(z);
  if (v.size() != dim()) fail(ErrorKind::Usage, "d2H_dq2_times: direction has the wrong dimension");
  const double q = z.q(0);
  switch (tag_) {
    case Tag::HarmonicOscillator:
      return {k_ * v[0]};
    case Tag::Pendulum:
      return {m_ * g_ * l_ * std::cos(q) * v[0]};
    case Tag::ElastoPlastic1D:
      return {k_ * (v[0] - v[1]), k_ * (v[1] - v[0])};
    case Tag::Damage: {
      const double d = z.q(1);
      return {(1 - d) * k_ * v[0] - k_ * q * v[1], -k_ * q * v[0]};
    }
    case Tag::ContactBall:
      return {0.0};
  }
  return {};
}

Vector HamiltonianModel::dH_dp(const PhaseVector& z, double /*t*/) const {
  check_shape(z);
  Vector w = inverse_mass();
  for (std::size_t i = 0; i < w.size(); ++i) w[i] *= z.p(i);
  return w;
}

Vector HamiltonianModel::inverse_mass() const {
  switch (tag_) {
    case Tag::Pendulum:
      return {1.0 / (m_ * l_ * l_)};
    case Tag::ElastoPlastic1D:
      // The internal momentum carries no kinetic energy.
      return {1.0 / m_, 0.0};
    case Tag::Damage:
      return {1.0 / m_, 1.0 / md_};
    default:
      return {1.0 / m_};
  }
}

PhaseVector HamiltonianModel::flow_field(const PhaseVector& z, double t) const {
  return symplectic_gradient(*this, z, t);
}

double HamiltonianModel::elastic_force(double q, double q_internal) const {
  if (tag_ != Tag::ElastoPlastic1D)
    fail(ErrorKind::Usage, std::string("elastic_force is defined for elasto_plastic, not ") + name());
  return k_ * (q - q_internal);
}

double HamiltonianModel::damage_driving_force(double q) const {
  if (tag_ != Tag::Damage)
    fail(ErrorKind::Usage, std::string("damage_driving_force is defined for damage, not ") + name());
  return k_ * q * q / 2;
}

std::vector<HalfSpace> HamiltonianModel::constraints() const {
  if (tag_ == Tag::ContactBall) return {HalfSpace{{1.0}, 0.0}};
  return {};
}

}  // namespace gapdyn
