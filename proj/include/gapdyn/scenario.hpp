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

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapdyn/convex.hpp"
#include "gapdyn/diagnostics.hpp"
#include "gapdyn/dissipation.hpp"
#include "gapdyn/integrators.hpp"
#include "gapdyn/models.hpp"

namespace gapdyn {

inline constexpr int kSchemaVersion = 1;

/// A fully resolved run description.
struct Scenario {
  std::string name;
  HamiltonianModel model;
  DissipationLaw law;
  PhaseVector initial;
  double t0 = 0.0;
  double t_end = 0.0;
  double dt = 0.0;
  StepOptions step;
  AuditOptions audit;
  std::uint64_t seed = 1;
  /// Output directory from the file, empty if absent.
  std::string output_dir;
  /// The configuration with every default filled in, as JSON text.
  std::string resolved;
};

/// Parses a scenario document. Schema and consistency problems throw a
/// config error naming the origin, line and field path.
Scenario parse_scenario(const std::string& text, const std::string& origin = "<config>");
Scenario load_scenario(const std::filesystem::path& path);

/// The shipped scenarios as (name, JSON text), in a fixed order.
const std::vector<std::pair<std::string, std::string>>& shipped_scenarios();
/// Parses one shipped scenario; throws a usage error for unknown names.
Scenario shipped_scenario(const std::string& name);

/// Model from its JSON form, e.g. {"type": "harmonic_oscillator", "m": 1, "k": 1}.
HamiltonianModel parse_model(const std::string& text, const std::string& origin = "<model>");
/// Law for the given model from its JSON form, e.g. {"type": "damage", "threshold": 1}.
DissipationLaw parse_law(const std::string& text, const HamiltonianModel& model, const std::string& origin = "<law>");

/// Convex function from its JSON form, e.g. {"type": "quadratic", "a": 1},
/// or from the compact one-dimensional notation Quadratic{a,c}, Linear{s},
/// Zero{}, IndicatorPoint{x}, IndicatorBox[lo,hi], SupportBox[lo,hi],
/// DamagePotential{Y}.
ConvexFunction parse_convex(const std::string& text, const std::string& origin = "<spec>");
/// JSON form accepted by parse_convex.
std::string convex_to_json(const ConvexFunction& f);

/// 17 significant digits, so the text reads back to the same double; "inf",
/// "-inf", "nan" for non-finite values. Locale independent.
std::string format_number(double v);

struct RunOutcome {
  /// 0 clean, 1 invariant violations, 3 step failure.
  int exit_code = 0;
  Trajectory trajectory;
  AuditReport report;
  std::string summary;
};

/// Integrates, audits and writes trajectory.csv, energy_ledger.csv,
/// audit.json, metadata.json (and hysteresis.csv for plastic runs) to
/// out_dir. A failed step still writes the partial outputs.
RunOutcome run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir);

/// CSV (y, phi_star_numeric, phi_star_closed_form, abs_diff) of the conjugate
/// of a 1-D function on [lo, hi]; the closed-form columns are empty when the
/// conjugate leaves the algebra. Returns the largest finite abs_diff.
double write_conjugate_table(const ConvexFunction& f, double lo, double hi, std::size_t samples,
                             const std::filesystem::path& out);

}  // namespace gapdyn
