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

// Command-line front end. Talks to the library only through the C API.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "gapdyn.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitInternal = 4;

void print_line(const char* line, void*) { std::cout << line << '\n'; }

int report(gd_status s) {
  std::cerr << "gapdyn: " << gd_status_name(s) << ": " << gd_last_error() << '\n';
  switch (s) {
    case GD_ERR_USAGE:
    case GD_ERR_CONFIG:
    case GD_ERR_UNSUPPORTED:
      return kExitConfig;
    default:
      return kExitInternal;
  }
}

// GAPDYN_SEED overrides any configured seed; -1 when unset.
bool env_seed(std::int64_t& seed) {
  seed = -1;
  const char* v = std::getenv("GAPDYN_SEED");
  if (v == nullptr || *v == '\0') return true;
  try {
    std::size_t used = 0;
    const unsigned long long s = std::stoull(v, &used);
    if (used != std::string(v).size() || s > static_cast<unsigned long long>(INT64_MAX)) return false;
    seed = static_cast<std::int64_t>(s);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

std::string read_spec(const std::string& spec) {
  std::error_code ec;
  if (!std::filesystem::is_regular_file(spec, ec)) return spec;
  std::ifstream in(spec, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gapdyn: dissipative Hamiltonian dynamics with information-content gap laws"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(gd_version()));

  std::string config, out_dir;
  auto* run = app.add_subcommand("run", "Integrate a scenario and write trajectory, ledger and audit files");
  run->add_option("--config", config, "Scenario JSON file")->required();
  run->add_option("--out", out_dir, "Output directory (defaults to output.dir in the scenario)");

  std::string json_path, mutation = "none";
  std::uint64_t seed = 1;
  auto* validate = app.add_subcommand("validate", "Run the property suites");
  validate->add_option("--json", json_path, "Also write a JSON summary here");
  validate->add_option("--seed", seed, "Random seed (GAPDYN_SEED overrides)");
  validate->add_option("--mutation", mutation, "Inject a known defect")->group("");

  std::string spec, table_out;
  std::vector<double> range{-5.0, 5.0};
  std::size_t samples = 4001;
  auto* conj = app.add_subcommand("conjugate", "Tabulate numerical and closed-form conjugates of a 1-D function");
  conj->add_option("--spec", spec, "Function as JSON, compact form like IndicatorBox[-1,1], or a file")->required();
  conj->add_option("--range", range, "Grid bounds lo hi")->expected(2);
  conj->add_option("--samples", samples, "Grid points");
  conj->add_option("--out", table_out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  std::int64_t override_seed = -1;
  if (!env_seed(override_seed)) {
    std::cerr << "gapdyn: GAPDYN_SEED must be a nonnegative integer\n";
    return kExitConfig;
  }

  if (*run) {
    int code = 0;
    const gd_status s =
        gd_run_scenario(config.c_str(), out_dir.empty() ? nullptr : out_dir.c_str(), override_seed, &code, print_line, nullptr);
    if (s != GD_OK) return report(s);
    return code;
  }

  if (*validate) {
    if (override_seed >= 0) seed = static_cast<std::uint64_t>(override_seed);
    int passed = 0;
    std::size_t suites = 0;
    const gd_status s = gd_validate(seed, mutation.c_str(), json_path.empty() ? nullptr : json_path.c_str(),
                                    print_line, nullptr, &passed, &suites);
    if (s != GD_OK) return report(s);
    std::cout << suites << " suites, " << (passed ? "all passed" : "FAILURES") << " (seed " << seed << ")\n";
    return passed ? kExitOk : kExitFailed;
  }

  if (*conj) {
    gd_function* f = nullptr;
    gd_status s = gd_function_from_json(read_spec(spec).c_str(), &f);
    if (s != GD_OK) return report(s);
    double worst = 0.0;
    s = gd_conjugate_table(f, range[0], range[1], samples, table_out.c_str(), &worst);
    gd_function_free(f);
    if (s != GD_OK) return report(s);
    std::cout << "wrote " << table_out << ", max abs_diff " << worst << '\n';
    return kExitOk;
  }
  return kExitConfig;
}
