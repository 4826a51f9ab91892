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
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gapdyn/convex.hpp"
#include "gapdyn/models.hpp"

namespace gapdyn {

/// Deliberate defects the suite must catch.
enum class Mutation {
  None,
  /// Closed-form conjugates replaced by y -> f*(-y).
  PolarSign,
};

/// Parses "none" or "polar-sign"; usage error otherwise.
Mutation parse_mutation(const std::string& name);

struct ValidationOptions {
  std::uint64_t seed = 1;
  Mutation mutation = Mutation::None;
  /// Receives one human-readable line per suite and per failure.
  std::function<void(const std::string&)> sink;
};

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  double seconds = 0.0;
  /// First few failure descriptions.
  std::vector<std::string> details;

  bool passed() const { return failures == 0 && checks > 0; }
};

struct ValidationReport {
  std::uint64_t seed = 1;
  std::string mutation;
  std::vector<SuiteResult> suites;

  bool passed() const;
  /// Summary with per-suite counts; timings omitted so equal seeds give
  /// byte-identical output.
  std::string to_json() const;
};

/// Runs every property suite. Deterministic for a fixed seed.
ValidationReport run_validation(const ValidationOptions& options = {});

/// x -> f(-x), kept inside the algebra.
ConvexFunction reflect(const ConvexFunction& f);

/// The catalogue of one-dimensional functions the suites exercise, with
/// names, including the potentials the builtin laws use.
std::vector<std::pair<std::string, ConvexFunction>> function_catalogue();

/// Random state of a builtin model, biased towards yield, the damage
/// threshold and the ground.
PhaseVector family_state(const HamiltonianModel& model, std::mt19937_64& rng);

}  // namespace gapdyn
