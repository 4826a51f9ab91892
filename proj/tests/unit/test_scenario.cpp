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

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "gapdyn/error.hpp"
#include "gapdyn/scenario.hpp"
#include "json.hpp"

using namespace gapdyn;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kDamped = R"({
  "name": "t",
  "model": {"type": "harmonic_oscillator", "m": 1, "k": 1},
  "law": {"type": "viscous", "damping": 0.2},
  "initial": {"q": [1], "p": [0]},
  "T": 1,
  "dt": 0.01
})";

std::string replace(std::string text, const std::string& from, const std::string& to) {
  const auto at = text.find(from);
  REQUIRE(at != std::string::npos);
  return text.replace(at, from.size(), to);
}

// Message of the config error raised by parsing text.
std::string config_error(const std::string& text) {
  try {
    parse_scenario(text, "cfg.json");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Config);
    return e.what();
  }
  FAIL("expected a configuration error");
  return {};
}

struct TempDir {
  fs::path path;
  TempDir() {
    std::random_device rd;
    path = fs::temp_directory_path() / ("gapdyn_unit_" + std::to_string(rd()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::ifstream in(p);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> cells(const std::string& row) {
  std::vector<std::string> out;
  std::stringstream ss(row);
  for (std::string c; std::getline(ss, c, ',');) out.push_back(c);
  if (!row.empty() && row.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("shipped scenario files match the embedded copies") {
  const auto& shipped = shipped_scenarios();
  REQUIRE(shipped.size() == 5);
  for (const auto& [name, text] : shipped) {
    CAPTURE(name);
    CHECK(slurp(fs::path(GAPDYN_SOURCE_DIR) / "scenarios" / (name + ".json")) == text);
    const Scenario a = shipped_scenario(name);
    const Scenario b = load_scenario(fs::path(GAPDYN_SOURCE_DIR) / "scenarios" / (name + ".json"));
    CHECK(a.resolved == b.resolved);
    CHECK(a.name == name);
  }
  CHECK_THROWS_AS(shipped_scenario("no_such_scenario"), Error);
}

TEST_CASE("resolved configuration fills defaults and reparses to itself") {
  const Scenario sc = parse_scenario(kDamped);
  CHECK(sc.t0 == 0.0);
  CHECK(sc.step.step_tol == 1e-8);
  CHECK(sc.seed == 1);
  const Scenario again = parse_scenario(sc.resolved);
  CHECK(again.resolved == sc.resolved);
  const auto j = nlohmann::json::parse(sc.resolved);
  CHECK(j["law"]["type"] == "viscous");
  CHECK(j.contains("solver"));
}

TEST_CASE("configuration errors name the field and line") {
  CHECK(config_error(replace(kDamped, "\"dt\": 0.01", "\"dt\": 0")).find("dt") != std::string::npos);
  const std::string unknown = config_error(replace(kDamped, "\"T\": 1,", "\"T\": 1, \"colour\": 3,"));
  CHECK(unknown.find("cfg.json:6:") != std::string::npos);
  CHECK(unknown.find("colour") != std::string::npos);
  CHECK(config_error(replace(kDamped, "\"T\": 1", "\"T\": -1")).find("T") != std::string::npos);
  CHECK(config_error(replace(kDamped, "\"m\": 1", "\"m\": -1")).find("model.m") != std::string::npos);
  CHECK(config_error(replace(kDamped, "\"p\": [0]", "\"p\": [0, 1]")).find("initial") != std::string::npos);
  CHECK(config_error(replace(kDamped, "{\"type\": \"viscous\", \"damping\": 0.2}", "{\"type\": \"plastic\", \"yield\": 1}"))
            .find("law") != std::string::npos);
  CHECK(config_error(replace(kDamped, "\"dt\": 0.01", "\"dt\": 0.01, \"restitution\": 0.5")).find("restitution") !=
        std::string::npos);
  CHECK(config_error("{\"name\": ").find("cfg.json:1") != std::string::npos);
  CHECK(config_error(replace(kDamped, "\"type\": \"harmonic_oscillator\"", "\"type\": \"warp\"")).find("model.type") !=
        std::string::npos);
}

TEST_CASE("initial state must admit a zero gap") {
  const std::string ball = R"({
    "model": {"type": "contact_ball", "m": 1, "g": 10},
    "law": {"type": "contact"},
    "initial": {"q": [-0.5], "p": [0]},
    "T": 1, "dt": 0.01})";
  CHECK(config_error(ball).find("initial") != std::string::npos);
  const std::string damaged = R"({
    "model": {"type": "damage", "m": 1, "m_d": 1, "E0": 1},
    "law": {"type": "damage", "threshold": 1},
    "initial": {"q": [0, 1.5], "p": [0, 0]},
    "T": 1, "dt": 0.01})";
  CHECK(config_error(damaged).find("initial") != std::string::npos);
}

TEST_CASE("convex function text: compact and JSON forms") {
  CHECK(parse_convex("Quadratic{2}").quadratic_coefficient() == 2.0);
  CHECK(parse_convex("Quadratic{1, 0.5}").center() == Vector{0.5});
  CHECK(parse_convex(" IndicatorBox[-1, 1] ").upper() == Vector{1.0});
  CHECK(parse_convex("SupportBox[-inf,2]").lower()[0] == -HUGE_VAL);
  CHECK(parse_convex("Zero{}").dim() == 1);
  CHECK(eval(parse_convex("DamagePotential{2}"), Vector{3.0}).value() == 6.0);
  CHECK(eval(parse_convex("IndicatorPoint{0}"), Vector{0.1}).is_infinite());
  CHECK_THROWS_AS(parse_convex("Quadratic{0}"), Error);
  CHECK_THROWS_AS(parse_convex("Banana{1}"), Error);
  CHECK_THROWS_AS(parse_convex("IndicatorBox[1]"), Error);
  std::mt19937_64 rng(701);
  const std::vector<std::string> specs = {
      R"({"type": "quadratic", "a": 2, "center": [1, -1]})",
      R"({"type": "indicator_box", "lo": ["-inf", 0], "hi": [1, "inf"]})",
      R"({"type": "support_box", "radius": 0.5, "dim": 2})",
      R"({"type": "sum", "terms": [{"type": "linear", "slope": [1]}, {"type": "indicator_box", "lo": [0], "hi": [null]}]})",
      R"({"type": "separable_product", "dim": 3, "blocks": [{"function": {"type": "quadratic", "a": 1}, "indices": [2]}]})"};
  for (const auto& text : specs) {
    CAPTURE(text);
    const ConvexFunction f = parse_convex(text);
    const ConvexFunction g = parse_convex(convex_to_json(f));
    CHECK(g.describe() == f.describe());
    for (int k = 0; k < 20; ++k) {
      Vector x(f.dim());
      for (auto& v : x) v = std::uniform_real_distribution<double>(-3.0, 3.0)(rng);
      CHECK(eval(f, x) == eval(g, x));
    }
  }
}

TEST_CASE("numbers print round-trip exact") {
  std::mt19937_64 rng(702);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::ldexp(std::uniform_real_distribution<double>(-1.0, 1.0)(rng), k % 200 - 100);
    const std::string s = format_number(v);
    double back = 0.0;
    std::from_chars(s.data(), s.data() + s.size(), back);
    CHECK(back == v);
  }
  CHECK(format_number(HUGE_VAL) == "inf");
  CHECK(format_number(-HUGE_VAL) == "-inf");
  CHECK(format_number(0.5) == "0.5");
}

TEST_CASE("run_scenario writes the documented outputs") {
  TempDir tmp;
  SUBCASE("viscous") {
    const RunOutcome out = run_scenario(parse_scenario(kDamped), tmp.path);
    CHECK(out.exit_code == 0);
    const auto traj = lines(tmp.path / "trajectory.csv");
    REQUIRE(traj.size() == 102);
    CHECK(traj[0] == "t,q,p,eta_q,eta_p,H,I_residual");
    const auto last = cells(traj.back());
    REQUIRE(last.size() == 7);
    CHECK(last[3].empty());
    CHECK(last[6].empty());
    CHECK(lines(tmp.path / "energy_ledger.csv")[0] == "t,H,shadow,dH,dissipated,time_work,excess,cumulative_dissipated");
    const auto audit = nlohmann::json::parse(slurp(tmp.path / "audit.json"));
    CHECK(audit["passed"] == true);
    CHECK(audit["steps"] == 100);
    const auto meta = nlohmann::json::parse(slurp(tmp.path / "metadata.json"));
    CHECK(meta["schema_version"] == kSchemaVersion);
    CHECK(meta["scheme"]["name"] == "symplectic_euler_b");
    CHECK(meta["seed"] == 1);
    CHECK_FALSE(fs::exists(tmp.path / "hysteresis.csv"));
  }
  SUBCASE("plastic adds the hysteresis loop") {
    const std::string text = R"({
      "model": {"type": "elasto_plastic", "m": 1, "k": 1, "forcing": {"type": "sinusoid", "amplitude": 2, "omega": 0.5}},
      "law": {"type": "plastic", "yield": 1},
      "initial": {"q": [0, 0], "p": [0, 0]},
      "T": 5, "dt": 0.001})";
    const RunOutcome out = run_scenario(parse_scenario(text), tmp.path);
    CHECK(out.exit_code == 0);
    CHECK(lines(tmp.path / "trajectory.csv")[0] == "t,q,q_I,p,p_I,eta_q,eta_qI,eta_p,eta_pI,H,I_residual");
    CHECK(lines(tmp.path / "hysteresis.csv")[0] == "t,q,sigma,q_I");
  }
  SUBCASE("damage layout header") {
    const RunOutcome out = run_scenario(shipped_scenario("damage_growth"), tmp.path);
    CHECK(out.exit_code == 0);
    CHECK(lines(tmp.path / "trajectory.csv")[0] == "t,q,d,p,r,eta_q,eta_d,eta_p,eta_r,H,I_residual");
  }
}

TEST_CASE("conjugate tables") {
  TempDir tmp;
  const double quad = write_conjugate_table(parse_convex("Quadratic{1,0}"), -2.0, 2.0, 401, tmp.path / "q.csv");
  CHECK(quad <= 1e-4);
  write_conjugate_table(parse_convex("IndicatorPoint{0}"), -2.0, 2.0, 401, tmp.path / "p.csv");
  auto rows = lines(tmp.path / "p.csv");
  CHECK(rows[0] == "y,phi_star_numeric,phi_star_closed_form,abs_diff");
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = cells(rows[i]);
    CHECK(c[1] == "0");
    CHECK(c[2] == "0");
  }
  write_conjugate_table(parse_convex("IndicatorBox[-1,1]"), -2.0, 2.0, 401, tmp.path / "b.csv");
  rows = lines(tmp.path / "b.csv");
  REQUIRE(rows.size() == 402);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto c = cells(rows[i]);
    const double y = std::stod(c[0]);
    CHECK(std::stod(c[2]) == std::abs(y));
  }
  CHECK_THROWS_AS(write_conjugate_table(ConvexFunction::zero(2), -1.0, 1.0, 11, tmp.path / "z.csv"), Error);
}
