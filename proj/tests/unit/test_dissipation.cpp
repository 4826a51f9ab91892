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

#include <cmath>
#include <limits>
#include <random>

#include "doctest.h"
#include "gapdyn/dissipation.hpp"
#include "gapdyn/error.hpp"
#include "generators.hpp"

using namespace gapdyn;
using namespace gapdyn::testing;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

const DissipationLaw kViscousUnit = DissipationLaw::viscous(ConvexFunction::centered_quadratic(1.0));

ConstraintSet ground() { return ConstraintSet({HalfSpace{{1.0}, 0.0}}); }

double info(const DissipationLaw& law, const PhaseVector& z, const PhaseVector& rate, const PhaseVector& eta) {
  return information_content(law, z, rate, eta).value();
}

}  // namespace

TEST_CASE("pure law: zero gap or nothing") {
  const auto pure = DissipationLaw::pure();
  const PhaseVector z({0.3}, {1.0}), rate({1.0}, {-0.3});
  CHECK(info(pure, z, rate, PhaseVector::zeros(1)) == 0.0);
  CHECK(info(pure, z, rate, PhaseVector({0.1}, {0.0})) == kInf);
  CHECK(bipotential_value(pure, z, rate, PhaseVector::zeros(1)).value() == 0.0);
}

TEST_CASE("viscous information content examples") {
  const PhaseVector z = PhaseVector::zeros(1), rate({1.0}, {0.0});
  CHECK(info(kViscousUnit, z, rate, PhaseVector({0.0}, {1.0})) == 0.0);
  CHECK(info(kViscousUnit, z, rate, PhaseVector({0.0}, {2.0})) == 0.5);
  CHECK(info(kViscousUnit, z, rate, PhaseVector({0.1}, {1.0})) == kInf);
  CHECK(zero_gap_holds(kViscousUnit, z, rate, PhaseVector({0.0}, {1.0}), 1e-9));
  CHECK_FALSE(zero_gap_holds(kViscousUnit, z, rate, PhaseVector({0.0}, {1.1}), 1e-9));
  CHECK(info(kViscousUnit, z, rate, PhaseVector({0.0}, {1.1})) == doctest::Approx(0.005));
}

TEST_CASE("likelihood examples") {
  const PhaseVector z = PhaseVector::zeros(1), rate({1.0}, {0.0});
  CHECK(likelihood(kViscousUnit, z, rate, PhaseVector({0.0}, {1.0})) == 1.0);
  CHECK(likelihood(kViscousUnit, z, rate, PhaseVector({0.3}, {1.0})) == 0.0);
  CHECK(likelihood(kViscousUnit, z, rate, PhaseVector({0.0}, {2.0})) == doctest::Approx(std::exp(-0.5)));
  CHECK(likelihood(kViscousUnit, z, rate, PhaseVector({0.0}, {2.0})) == doctest::Approx(0.6065).epsilon(1e-4));
}

TEST_CASE("bipotential examples") {
  const auto sep = DissipationLaw::separable(ConvexFunction::centered_quadratic(1.0, 2));
  const PhaseVector z = PhaseVector::zeros(1), rate({1.0}, {0.0}), gap({0.0}, {1.0});
  CHECK(bipotential_value(sep, z, rate, gap).value() == 1.0);
  CHECK(info(sep, z, rate, gap) == 0.0);
  std::mt19937_64 rng(301);
  for (int k = 0; k < kPropertyCases; ++k) {
    const PhaseVector r = draw_phase(rng, 1), e({0.0}, {draw(rng, -3.0, 3.0)});
    CHECK(bipotential_value(kViscousUnit, z, r, e).value() - dual_pairing(r, e) ==
          doctest::Approx(info(kViscousUnit, z, r, e)).epsilon(1e-12).scale(1.0));
  }
}

TEST_CASE("damage law below threshold carries the driving force in the gap") {
  const auto law = DissipationLaw::damage(1.0);
  const PhaseVector z({1.0, 0.5}, {0.0, 0.0});
  const PhaseVector still({0.0, 0.0}, {0.0, 0.0});
  CHECK(zero_gap_holds(law, z, still, PhaseVector({0.0, 0.0}, {0.0, 0.3}), 1e-12));
  // Growth needs the threshold, and damage may not heal.
  CHECK(info(law, z, PhaseVector({0.0, 0.2}, {0.0, 0.0}), PhaseVector({0.0, 0.0}, {0.0, 1.0})) == 0.0);
  CHECK(info(law, z, PhaseVector({0.0, 0.2}, {0.0, 0.0}), PhaseVector({0.0, 0.0}, {0.0, 0.9})) > 0.0);
  CHECK(info(law, z, PhaseVector({0.0, -0.2}, {0.0, 0.0}), PhaseVector::zeros(2)) == kInf);
  CHECK(info(law, z, still, PhaseVector({0.0, 0.0}, {0.0, 1.2})) == kInf);
  CHECK(info(law, PhaseVector({1.0, 1.2}, {0.0, 0.0}), still, PhaseVector::zeros(2)) == kInf);
}

TEST_CASE("contact cones of the ground") {
  const ConstraintSet m = ground();
  CHECK(m.normal_cone_contains(Vector{0.0}, Vector{-3.0}, 1e-12));
  CHECK_FALSE(m.normal_cone_contains(Vector{0.0}, Vector{1.0}, 1e-12));
  CHECK(m.tangent_cone_contains(Vector{0.0}, Vector{2.0}, 1e-12));
  CHECK_FALSE(m.tangent_cone_contains(Vector{0.0}, Vector{-2.0}, 1e-12));
  CHECK_FALSE(m.normal_cone_contains(Vector{1.0}, Vector{-0.1}, 1e-12));
  CHECK_THROWS_AS(m.normal_cone_contains(Vector{-1.0}, Vector{0.0}, 1e-12), Error);
  CHECK_THROWS_AS(ConstraintSet({HalfSpace{{0.0}, 1.0}}), Error);
  CHECK_THROWS_AS(ConstraintSet({HalfSpace{{1.0}, -1.0}, HalfSpace{{-1.0}, 0.0}}), Error);
  CHECK(feasible({HalfSpace{{1.0, 0.0}, 0.0}, HalfSpace{{0.0, 1.0}, 0.0}, HalfSpace{{-1.0, -1.0}, 1.0}}));
  CHECK_FALSE(feasible({HalfSpace{{1.0, 1.0}, -3.0}, HalfSpace{{-1.0, 0.0}, 1.0}, HalfSpace{{0.0, -1.0}, 1.0}}));
}

TEST_CASE("contact information content") {
  const auto law = DissipationLaw::contact(ground());
  const PhaseVector rest = PhaseVector::zeros(1), still = PhaseVector({0.0}, {0.0});
  CHECK(info(law, rest, still, PhaseVector({0.0}, {-10.0})) == 0.0);
  CHECK(info(law, rest, still, PhaseVector({0.0}, {10.0})) == kInf);
  CHECK(info(law, PhaseVector({1.0}, {0.0}), still, PhaseVector({0.0}, {-10.0})) == kInf);
  CHECK(info(law, rest, PhaseVector({-1.0}, {0.0}), PhaseVector::zeros(1)) == kInf);
  CHECK(info(law, PhaseVector({-0.5}, {0.0}), still, PhaseVector::zeros(1)) == kInf);
  // Lifting off while pushed is not complementary.
  CHECK(info(law, rest, PhaseVector({1.0}, {0.0}), PhaseVector({0.0}, {-10.0})) > 0.0);
}

TEST_CASE("gap selection is the minimal-norm zero of I") {
  const PhaseVector z = PhaseVector::zeros(1), rate({1.0}, {0.0});
  const auto eta = gap_selection(kViscousUnit, z, rate);
  REQUIRE(eta.has_value());
  CHECK(*eta == PhaseVector({0.0}, {1.0}));
  const auto plastic = DissipationLaw::plastic_yield(1.0);
  const PhaseVector zp = PhaseVector::zeros(2);
  CHECK(gap_selection(plastic, zp, PhaseVector({0.0, 0.0}, {0.0, 2.0})) == std::nullopt);
  const auto inside = gap_selection(plastic, zp, PhaseVector({0.0, 0.0}, {0.0, 0.5}));
  REQUIRE(inside.has_value());
  CHECK(inside->max_abs() == 0.0);
  CHECK(gap_selection(DissipationLaw::contact(ground()), PhaseVector::zeros(1), PhaseVector({-1.0}, {0.0})) ==
        std::nullopt);
}

TEST_CASE("plastic law: yield surface in the rate, plastic flow in the gap") {
  const auto law = DissipationLaw::plastic_yield(1.0);
  const PhaseVector z = PhaseVector::zeros(2);
  // p_I' = sigma on the yield surface with flow q_I' = eta_qI >= 0.
  CHECK(info(law, z, PhaseVector({0.0, 0.4}, {0.0, 1.0}), PhaseVector({0.0, 0.4}, {0.0, 0.0})) == 0.0);
  CHECK(info(law, z, PhaseVector({0.0, 0.0}, {0.0, 1.5}), PhaseVector::zeros(2)) == kInf);
  CHECK(info(law, z, PhaseVector({0.0, 0.0}, {0.0, 0.5}), PhaseVector({0.0, 0.4}, {0.0, 0.0})) ==
        doctest::Approx(0.2));
  CHECK(gap_inclusion_holds(law, PhaseVector({0.0, 0.4}, {0.0, 1.0}), PhaseVector({0.0, 0.4}, {0.0, 0.0})));
  CHECK_FALSE(gap_inclusion_holds(law, PhaseVector({0.0, 0.4}, {0.0, 0.5}), PhaseVector({0.0, 0.4}, {0.0, 0.0})));
}

TEST_CASE("property: I is nonnegative and zero exactly on the inclusion") {
  std::mt19937_64 rng(302);
  const std::vector<std::pair<DissipationLaw, std::size_t>> laws = {
      {DissipationLaw::pure(), 1}, {kViscousUnit, 1}, {DissipationLaw::plastic_yield(1.0), 2},
      {DissipationLaw::damage(1.0), 2}, {DissipationLaw::separable(ConvexFunction::support_box_radius(0.5, 2)), 1}};
  for (const auto& [law, n] : laws) {
    const std::string name = law.name();
    CAPTURE(name);
    for (int k = 0; k < 500; ++k) {
      const GapSample s = sample_admissible(law, n, rng);
      const ExtendedReal v = information_content(law, s.z, s.z_dot, s.eta);
      CHECK((v.is_infinite() || v.value() >= -1e-9));
      CHECK(zero_gap_holds(law, s.z, s.z_dot, s.eta, 1e-9) == gap_inclusion_holds(law, s.z_dot, s.eta));
      const auto sel = gap_selection(law, s.z, s.z_dot);
      if (sel) CHECK(information_content(law, s.z, s.z_dot, *sel) <= ExtendedReal(1e-9));
    }
  }
}

TEST_CASE("property: likelihood axioms hold for every law") {
  const std::vector<std::pair<DissipationLaw, std::size_t>> laws = {
      {DissipationLaw::pure(), 1},
      {DissipationLaw::separable(ConvexFunction::centered_quadratic(1.0, 2)), 1},
      {kViscousUnit, 1},
      {DissipationLaw::plastic_yield(1.0), 2},
      {DissipationLaw::damage(1.0), 2},
      {DissipationLaw::contact(ground()), 1}};
  for (const auto& [law, n] : laws) {
    const std::string name = law.name();
    CAPTURE(name);
    const AxiomsReport r = axioms_check(law, n, 2000, 7);
    CHECK(r.passed());
    CHECK(r.samples == 2000);
    CHECK(r.infimum_intermediate == 0);
    CHECK(r.convexity_violations_rate == 0);
    CHECK(r.convexity_violations_gap == 0);
  }
}

TEST_CASE("law and shape mismatches are usage errors") {
  CHECK_THROWS_AS(information_content(kViscousUnit, PhaseVector::zeros(2), PhaseVector::zeros(2), PhaseVector::zeros(2)),
                  Error);
  CHECK_THROWS_AS(DissipationLaw::plastic_yield(-1.0), Error);
  CHECK_THROWS_AS(DissipationLaw::contact(ground()).potential(1), Error);
}
