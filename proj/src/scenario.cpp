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

#include "gapdyn/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <regex>
#include <sstream>

#include "json.hpp"

#include "gapdyn/error.hpp"

namespace gapdyn {

using Json = nlohmann::ordered_json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Source {
  const std::string& text;
  const std::string& origin;
};

// Best-effort line of a field: walks the path keys through the raw text.
std::size_t line_of(const Source& src, const std::string& path) {
  std::size_t pos = 0, found = std::string::npos;
  std::size_t i = 0;
  while (i < path.size()) {
    std::size_t j = path.find_first_of(".[", i);
    if (j == std::string::npos) j = path.size();
    const std::string key = path.substr(i, j - i);
    if (!key.empty() && key.back() != ']') {
      const std::size_t at = src.text.find('"' + key + '"', pos);
      if (at == std::string::npos) break;
      found = pos = at;
    }
    i = j + 1;
  }
  if (found == std::string::npos) return 1;
  return 1 + static_cast<std::size_t>(std::count(src.text.begin(), src.text.begin() + found, '\n'));
}

class Node {
 public:
  Node(const Json& j, std::string path, const Source& src) : j_(j), path_(std::move(path)), src_(src) {}

  const Json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::Config, src_.origin + ":" + std::to_string(line_of(src_, path_)) + ": " +
                                (path_.empty() ? std::string("<root>") : path_) + ": " + msg);
  }

  Node at(const std::string& key) const {
    require_object();
    if (!j_.contains(key)) Node(j_, join(key), src_).error("required field missing");
    return Node(j_[key], join(key), src_);
  }
  std::optional<Node> find(const std::string& key) const {
    require_object();
    if (!j_.contains(key)) return std::nullopt;
    return Node(j_[key], join(key), src_);
  }
  Node item(std::size_t i) const { return Node(j_[i], path_ + "[" + std::to_string(i) + "]", src_); }

  void require_object() const {
    if (!j_.is_object()) error("expected an object");
  }
  void allow_keys(std::initializer_list<const char*> keys) const {
    require_object();
    for (const auto& [k, v] : j_.items()) {
      if (std::none_of(keys.begin(), keys.end(), [&](const char* a) { return k == a; }))
        Node(v, join(k), src_).error("unknown field");
    }
  }

  std::string string() const {
    if (!j_.is_string()) error("expected a string");
    return j_.get<std::string>();
  }
  // Numbers, plus "inf"/"-inf" strings and null standing for null_value.
  double number(double null_value = std::numeric_limits<double>::quiet_NaN()) const {
    if (j_.is_number()) return j_.get<double>();
    if (j_.is_null() && !std::isnan(null_value)) return null_value;
    if (j_.is_string() && !std::isnan(null_value)) {
      const std::string s = j_.get<std::string>();
      if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
      if (s == "-inf" || s == "-infinity") return -kInf;
    }
    error(std::isnan(null_value) ? "expected a number" : "expected a number, \"inf\", \"-inf\" or null");
  }
  double finite() const {
    const double v = number();
    if (!std::isfinite(v)) error("must be finite");
    return v;
  }
  double positive() const {
    const double v = finite();
    if (!(v > 0.0)) error("must be positive");
    return v;
  }
  Vector vector(double null_value = std::numeric_limits<double>::quiet_NaN()) const {
    if (j_.is_number()) return {number()};
    if (!j_.is_array()) error("expected an array of numbers");
    Vector v;
    for (std::size_t i = 0; i < j_.size(); ++i) v.push_back(item(i).number(null_value));
    return v;
  }
  std::uint64_t unsigned_integer() const {
    if (!j_.is_number_integer() || (j_.is_number_integer() && j_.get<std::int64_t>() < 0 && !j_.is_number_unsigned()))
      error("expected a nonnegative integer");
    return j_.get<std::uint64_t>();
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  const Json& j_;
  std::string path_;
  const Source& src_;
};

Json number_json(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  return Json(v);
}

Json vector_json(const Vector& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

// Re-raises factory errors at the node that supplied the parameters.
template <class F>
auto at_node(const Node& node, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Usage) node.error(e.what());
    throw;
  }
}

ConvexFunction convex_from(const Node& node, std::optional<std::size_t> dim_hint) {
  const std::string type = node.at("type").string();
  auto dim_or = [&](const char* key) -> std::size_t {
    if (auto d = node.find(key)) return static_cast<std::size_t>(d->unsigned_integer());
    return dim_hint.value_or(1);
  };
  return at_node(node, [&]() -> ConvexFunction {
    if (type == "quadratic") {
      node.allow_keys({"type", "a", "center", "dim"});
      const double a = node.at("a").positive();
      if (auto c = node.find("center")) return ConvexFunction::quadratic(a, c->vector());
      return ConvexFunction::centered_quadratic(a, dim_or("dim"));
    }
    if (type == "linear") {
      node.allow_keys({"type", "slope"});
      return ConvexFunction::linear(node.at("slope").vector());
    }
    if (type == "zero") {
      node.allow_keys({"type", "dim"});
      return ConvexFunction::zero(dim_or("dim"));
    }
    if (type == "indicator_point") {
      node.allow_keys({"type", "point"});
      return ConvexFunction::indicator_point(node.at("point").vector());
    }
    if (type == "indicator_box" || type == "support_box") {
      node.allow_keys({"type", "lo", "hi", "radius", "dim"});
      if (auto r = node.find("radius")) {
        const double radius = r->finite();
        const std::size_t d = dim_or("dim");
        if (type == "support_box") return ConvexFunction::support_box_radius(radius, d);
        return ConvexFunction::indicator_box(Vector(d, -radius), Vector(d, radius));
      }
      Vector lo = node.at("lo").vector(-kInf), hi = node.at("hi").vector(kInf);
      return type == "indicator_box" ? ConvexFunction::indicator_box(std::move(lo), std::move(hi))
                                     : ConvexFunction::support_box(std::move(lo), std::move(hi));
    }
    if (type == "sum") {
      node.allow_keys({"type", "terms"});
      const Node terms = node.at("terms");
      if (!terms.raw().is_array()) terms.error("expected an array of functions");
      std::vector<ConvexFunction> fs;
      for (std::size_t i = 0; i < terms.raw().size(); ++i) fs.push_back(convex_from(terms.item(i), dim_hint));
      return ConvexFunction::sum(std::move(fs));
    }
    if (type == "separable_product") {
      node.allow_keys({"type", "dim", "blocks"});
      const std::size_t d = static_cast<std::size_t>(node.at("dim").unsigned_integer());
      const Node blocks = node.at("blocks");
      if (!blocks.raw().is_array()) blocks.error("expected an array of blocks");
      std::vector<ConvexFunction::Block> bs;
      for (std::size_t i = 0; i < blocks.raw().size(); ++i) {
        const Node b = blocks.item(i);
        b.allow_keys({"function", "indices"});
        const Node idx = b.at("indices");
        if (!idx.raw().is_array()) idx.error("expected an array of indices");
        std::vector<std::size_t> indices;
        for (std::size_t k = 0; k < idx.raw().size(); ++k)
          indices.push_back(static_cast<std::size_t>(idx.item(k).unsigned_integer()));
        bs.push_back({convex_from(b.at("function"), indices.size()), std::move(indices)});
      }
      return ConvexFunction::separable_product(d, std::move(bs));
    }
    node.at("type").error("unknown function type '" + type +
                          "' (quadratic, linear, zero, indicator_point, indicator_box, support_box, sum, "
                          "separable_product)");
  });
}

Json convex_json(const ConvexFunction& f) {
  using Tag = ConvexFunction::Tag;
  Json j;
  switch (f.tag()) {
    case Tag::Quadratic:
      j["type"] = "quadratic";
      j["a"] = f.quadratic_coefficient();
      j["center"] = vector_json(f.center());
      break;
    case Tag::Linear:
      j["type"] = "linear";
      j["slope"] = vector_json(f.slope());
      break;
    case Tag::IndicatorPoint:
      j["type"] = "indicator_point";
      j["point"] = vector_json(f.point());
      break;
    case Tag::IndicatorBox:
    case Tag::SupportBox:
      j["type"] = f.tag() == Tag::IndicatorBox ? "indicator_box" : "support_box";
      j["lo"] = vector_json(f.lower());
      j["hi"] = vector_json(f.upper());
      break;
    case Tag::Sum:
      j["type"] = "sum";
      j["terms"] = Json::array();
      for (const auto& t : f.terms()) j["terms"].push_back(convex_json(t));
      break;
    case Tag::SeparableProduct:
      j["type"] = "separable_product";
      j["dim"] = f.dim();
      j["blocks"] = Json::array();
      for (const auto& b : f.blocks()) j["blocks"].push_back({{"function", convex_json(b.function)}, {"indices", b.indices}});
      break;
  }
  return j;
}

Forcing forcing_from(const Node& node, Json& out) {
  const std::string type = node.at("type").string();
  out["type"] = type;
  return at_node(node, [&]() -> Forcing {
    if (type == "zero") {
      node.allow_keys({"type"});
      return Forcing::zero();
    }
    if (type == "constant") {
      node.allow_keys({"type", "value"});
      const double v = node.at("value").finite();
      out["value"] = v;
      return Forcing::constant(v);
    }
    if (type == "sinusoid") {
      node.allow_keys({"type", "amplitude", "omega", "phase"});
      const double a = node.at("amplitude").finite();
      const double w = node.at("omega").finite();
      const double ph = node.find("phase") ? node.at("phase").finite() : 0.0;
      out["amplitude"] = a;
      out["omega"] = w;
      out["phase"] = ph;
      return Forcing::sinusoid(a, w, ph);
    }
    if (type == "piecewise_linear") {
      node.allow_keys({"type", "knots"});
      const Node knots = node.at("knots");
      if (!knots.raw().is_array()) knots.error("expected an array of [t, value] pairs");
      std::vector<std::pair<double, double>> ks;
      for (std::size_t i = 0; i < knots.raw().size(); ++i) {
        const Vector pair = knots.item(i).vector();
        if (pair.size() != 2) knots.item(i).error("expected [t, value]");
        ks.emplace_back(pair[0], pair[1]);
      }
      out["knots"] = knots.raw();
      return Forcing::piecewise_linear(std::move(ks));
    }
    node.at("type").error("unknown forcing type '" + type + "' (zero, constant, sinusoid, piecewise_linear)");
  });
}

HamiltonianModel model_from(const Node& node, Json& out) {
  const std::string type = node.at("type").string();
  out["type"] = type;
  auto param = [&](const char* key, double def) {
    const double v = node.find(key) ? node.at(key).positive() : def;
    out[key] = v;
    return v;
  };
  auto forcing = [&]() {
    Json f;
    Forcing result;
    if (auto fn = node.find("forcing"))
      result = forcing_from(*fn, f);
    else
      f["type"] = "zero";
    out["forcing"] = f;
    return result;
  };
  return at_node(node, [&]() -> HamiltonianModel {
    if (type == "harmonic_oscillator") {
      node.allow_keys({"type", "m", "k"});
      const double m = param("m", 1.0);
      return HamiltonianModel::harmonic_oscillator(m, param("k", 1.0));
    }
    if (type == "pendulum") {
      node.allow_keys({"type", "m", "g", "l"});
      const double m = param("m", 1.0), g = param("g", 9.81);
      return HamiltonianModel::pendulum(m, g, param("l", 1.0));
    }
    if (type == "elasto_plastic") {
      node.allow_keys({"type", "m", "k", "forcing"});
      const double m = param("m", 1.0), k = param("k", 1.0);
      return HamiltonianModel::elasto_plastic(m, k, forcing());
    }
    if (type == "damage") {
      node.allow_keys({"type", "m", "m_d", "E0", "forcing"});
      const double m = param("m", 1.0), md = param("m_d", 1.0), e0 = param("E0", 1.0);
      return HamiltonianModel::damage(m, md, e0, forcing());
    }
    if (type == "contact_ball") {
      node.allow_keys({"type", "m", "g"});
      const double m = param("m", 1.0);
      return HamiltonianModel::contact_ball(m, param("g", 9.81));
    }
    node.at("type").error("unknown model type '" + type +
                          "' (harmonic_oscillator, pendulum, elasto_plastic, damage, contact_ball)");
  });
}

DissipationLaw law_from(const Node& node, const HamiltonianModel& model, Json& out) {
  const std::string type = node.at("type").string();
  out["type"] = type;
  const std::size_t n = model.dim();
  return at_node(node, [&]() -> DissipationLaw {
    if (type == "pure") {
      node.allow_keys({"type"});
      return DissipationLaw::pure();
    }
    if (type == "viscous") {
      node.allow_keys({"type", "phi", "damping"});
      ConvexFunction phi = node.find("damping") ? ConvexFunction::centered_quadratic(node.at("damping").positive(), n)
                                                : convex_from(node.at("phi"), n);
      if (node.find("damping") && node.find("phi")) node.error("give either phi or damping, not both");
      out["phi"] = convex_json(phi);
      return DissipationLaw::viscous(std::move(phi));
    }
    if (type == "plastic") {
      node.allow_keys({"type", "yield", "phi"});
      if (auto y = node.find("yield")) {
        if (node.find("phi")) node.error("give either phi or yield, not both");
        const double ys = y->positive();
        out["yield"] = ys;
        return DissipationLaw::plastic_yield(ys);
      }
      ConvexFunction phi = convex_from(node.at("phi"), 1);
      out["phi"] = convex_json(phi);
      return DissipationLaw::plastic(std::move(phi));
    }
    if (type == "damage") {
      node.allow_keys({"type", "threshold"});
      const double y = node.at("threshold").positive();
      out["threshold"] = y;
      return DissipationLaw::damage(y);
    }
    if (type == "contact") {
      node.allow_keys({"type", "constraints"});
      std::vector<HalfSpace> hs;
      if (auto c = node.find("constraints")) {
        if (!c->raw().is_array()) c->error("expected an array of {a, b} half-spaces");
        for (std::size_t i = 0; i < c->raw().size(); ++i) {
          const Node h = c->item(i);
          h.allow_keys({"a", "b"});
          hs.push_back({h.at("a").vector(), h.find("b") ? h.at("b").finite() : 0.0});
        }
      } else {
        hs = model.constraints();
        if (hs.empty()) node.error("constraints required for a model without builtin constraints");
      }
      Json arr = Json::array();
      for (const auto& h : hs) arr.push_back({{"a", vector_json(h.a)}, {"b", h.b}});
      out["constraints"] = arr;
      return DissipationLaw::contact(ConstraintSet(std::move(hs)));
    }
    if (type == "separable") {
      node.allow_keys({"type", "potential"});
      ConvexFunction f = convex_from(node.at("potential"), 2 * n);
      out["potential"] = convex_json(f);
      return DissipationLaw::separable(std::move(f));
    }
    node.at("type").error("unknown law type '" + type + "' (pure, viscous, plastic, damage, contact, separable)");
  });
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) return "0";  // no "-0"
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

Scenario parse_scenario(const std::string& text, const std::string& origin) {
  const Source src{text, origin};
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    const std::size_t at = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(at), '\n');
    fail(ErrorKind::Config, origin + ":" + std::to_string(line) + ": malformed JSON: " + e.what());
  }
  const Node root(doc, "", src);
  root.allow_keys({"name", "description", "model", "law", "initial", "t0", "T", "dt", "step_tol", "restitution",
                   "seed", "output", "solver", "audit"});
  Scenario s;
  Json out;
  s.name = root.find("name") ? root.at("name").string() : std::filesystem::path(origin).stem().string();
  out["name"] = s.name;
  if (auto d = root.find("description")) out["description"] = d->string();

  Json model_json;
  s.model = model_from(root.at("model"), model_json);
  out["model"] = model_json;
  Json law_json;
  s.law = law_from(root.at("law"), s.model, law_json);
  out["law"] = law_json;
  try {
    check_compatible(s.model, s.law);
  } catch (const Error& e) {
    root.at("law").error(e.what());
  }

  const Node init = root.at("initial");
  init.allow_keys({"q", "p"});
  Vector q = init.at("q").vector(), p = init.at("p").vector();
  for (const auto& [v, key] : {std::pair{&q, "q"}, std::pair{&p, "p"}}) {
    if (v->size() != s.model.dim())
      init.at(key).error("expected " + std::to_string(s.model.dim()) + " entries for the " +
                         layout_name(s.model.layout()) + " layout");
    for (double x : *v)
      if (!std::isfinite(x)) init.at(key).error("entries must be finite");
  }
  s.initial = PhaseVector(q, p);
  out["initial"] = {{"q", q}, {"p", p}};

  s.t0 = root.find("t0") ? root.at("t0").finite() : 0.0;
  s.t_end = root.at("T").finite();
  s.dt = root.at("dt").finite();
  if (!(s.dt > 0.0)) root.at("dt").error("must be positive");
  if (!(s.t_end > s.t0)) root.at("T").error("must exceed t0");
  s.step.step_tol = root.find("step_tol") ? root.at("step_tol").positive() : 1e-8;
  if (auto r = root.find("restitution")) {
    s.step.restitution = r->finite();
    if (s.step.restitution < 0.0 || s.step.restitution > 1.0) r->error("must lie in [0, 1]");
    if (s.law.tag() != DissipationLaw::Tag::Contact && s.step.restitution != 0.0)
      r->error("restitution applies to the contact law only");
  }
  s.seed = root.find("seed") ? root.at("seed").unsigned_integer() : 1;
  out["t0"] = s.t0;
  out["T"] = s.t_end;
  out["dt"] = s.dt;
  out["step_tol"] = s.step.step_tol;
  out["restitution"] = s.step.restitution;
  out["seed"] = s.seed;

  if (auto sv = root.find("solver")) {
    sv->allow_keys({"max_iter", "fixed_point_tol", "indicator_tol"});
    if (auto v = sv->find("max_iter")) {
      const auto it = v->unsigned_integer();
      if (it < 1 || it > 1'000'000) v->error("must lie in [1, 1000000]");
      s.step.max_iter = static_cast<int>(it);
    }
    if (auto v = sv->find("fixed_point_tol")) s.step.fixed_point_tol = v->positive();
    if (auto v = sv->find("indicator_tol")) s.step.gap.indicator_tol = v->positive();
  }
  out["solver"] = {{"max_iter", s.step.max_iter},
                   {"fixed_point_tol", s.step.fixed_point_tol},
                   {"indicator_tol", s.step.gap.indicator_tol}};

  s.audit.step_tol = s.step.step_tol;
  s.audit.gap = s.step.gap;
  if (auto a = root.find("audit")) {
    a->allow_keys({"oracle_samples", "ledger_slack", "closure_tol", "oracle_grid"});
    if (auto v = a->find("oracle_samples")) s.audit.oracle_samples = static_cast<std::size_t>(v->unsigned_integer());
    if (auto v = a->find("ledger_slack")) s.audit.ledger_slack = v->positive();
    if (auto v = a->find("closure_tol")) s.audit.closure_tol = v->positive();
    if (auto g = a->find("oracle_grid")) {
      g->allow_keys({"lo", "hi", "points"});
      if (auto v = g->find("lo")) s.audit.grid.lo = v->finite();
      if (auto v = g->find("hi")) s.audit.grid.hi = v->finite();
      if (auto v = g->find("points")) s.audit.grid.points = static_cast<std::size_t>(v->unsigned_integer());
      if (!(s.audit.grid.hi > s.audit.grid.lo) || s.audit.grid.points < 2) g->error("need lo < hi and points >= 2");
    }
  }
  out["audit"] = {{"oracle_samples", s.audit.oracle_samples},
                  {"ledger_slack", s.audit.ledger_slack},
                  {"closure_tol", s.audit.closure_tol},
                  {"oracle_grid", {{"lo", s.audit.grid.lo}, {"hi", s.audit.grid.hi}, {"points", s.audit.grid.points}}}};

  if (auto o = root.find("output")) {
    o->allow_keys({"dir"});
    s.output_dir = o->at("dir").string();
    out["output"] = {{"dir", s.output_dir}};
  }

  if (!gap_selection(s.law, s.initial, PhaseVector::zeros(s.model.dim()), s.step.gap))
    init.error(std::string("initial state violates the constraints of the ") + s.law.name() + " law");
  s.audit.seed = s.seed;
  s.resolved = out.dump(2);
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Config, path.string() + ": cannot open scenario file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), path.string());
}

namespace {

Json parse_document(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::Config, origin + ": malformed JSON: " + e.what());
  }
}

double compact_number(const std::string& s, const std::string& origin) {
  const std::string t = std::regex_replace(s, std::regex("^\\s+|\\s+$"), "");
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  double v = 0.0;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || res.ec != std::errc() || res.ptr != t.data() + t.size())
    fail(ErrorKind::Config, origin + ": '" + t + "' is not a number");
  return v;
}

std::optional<ConvexFunction> parse_compact(const std::string& text, const std::string& origin) {
  static const std::regex form("^\\s*([A-Za-z]+)\\s*([\\{\\[])([^\\]\\}]*)([\\}\\]])\\s*$");
  std::smatch m;
  if (!std::regex_match(text, m, form)) return std::nullopt;
  const std::string name = m[1];
  std::vector<double> args;
  const std::string body = m[3];
  if (body.find_first_not_of(" \t") != std::string::npos) {
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = body.find(',', start);
      args.push_back(compact_number(body.substr(start, comma - start), origin));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
  }
  auto want = [&](std::size_t lo, std::size_t hi) {
    if (args.size() < lo || args.size() > hi)
      fail(ErrorKind::Config, origin + ": " + name + " takes " + std::to_string(lo) +
                                  (lo == hi ? "" : " to " + std::to_string(hi)) + " arguments");
  };
  using F = ConvexFunction;
  if (name == "Quadratic") {
    want(1, 2);
    return F::quadratic(args[0], {args.size() > 1 ? args[1] : 0.0});
  }
  if (name == "Linear") {
    want(1, 1);
    return F::linear({args[0]});
  }
  if (name == "Zero") {
    want(0, 0);
    return F::zero(1);
  }
  if (name == "IndicatorPoint") {
    want(1, 1);
    return F::indicator_point({args[0]});
  }
  if (name == "IndicatorBox" || name == "SupportBox") {
    want(2, 2);
    return name == "IndicatorBox" ? F::indicator_box({args[0]}, {args[1]}) : F::support_box({args[0]}, {args[1]});
  }
  if (name == "DamagePotential") {
    want(1, 1);
    return F::sum({F::linear({args[0]}), F::indicator_box({0.0}, {kInf})});
  }
  fail(ErrorKind::Config, origin + ": unknown function '" + name +
                              "' (Quadratic, Linear, Zero, IndicatorPoint, IndicatorBox, SupportBox, DamagePotential)");
}

}  // namespace

HamiltonianModel parse_model(const std::string& text, const std::string& origin) {
  const Source src{text, origin};
  const Json doc = parse_document(text, origin);
  Json out;
  return model_from(Node(doc, "", src), out);
}

DissipationLaw parse_law(const std::string& text, const HamiltonianModel& model, const std::string& origin) {
  const Source src{text, origin};
  const Json doc = parse_document(text, origin);
  Json out;
  return law_from(Node(doc, "", src), model, out);
}

ConvexFunction parse_convex(const std::string& text, const std::string& origin) {
  if (auto f = parse_compact(text, origin)) return *f;
  const Source src{text, origin};
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::Config, origin + ": malformed JSON: " + e.what());
  }
  return convex_from(Node(doc, "", src), std::nullopt);
}

std::string convex_to_json(const ConvexFunction& f) { return convex_json(f).dump(); }

namespace {

class CsvFile {
 public:
  explicit CsvFile(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) fail(ErrorKind::Io, "cannot write " + path.string());
  }
  void header(const std::string& h) { out_ << h << '\n'; }
  CsvFile& cell(double v) { return text(format_number(v)); }
  CsvFile& text(const std::string& s) {
    if (!first_) line_ += ',';
    line_ += s;
    first_ = false;
    return *this;
  }
  void end() {
    out_ << line_ << '\n';
    line_.clear();
    first_ = true;
  }

 private:
  std::ofstream out_;
  std::string line_;
  bool first_ = true;
};

std::string residual_text(const ExtendedReal& r) { return r.is_finite() ? format_number(r.value()) : "inf"; }

std::string trajectory_header(Layout layout) {
  switch (layout) {
    case Layout::Plain:
      return "t,q,p,eta_q,eta_p,H,I_residual";
    case Layout::Internal:
      return "t,q,q_I,p,p_I,eta_q,eta_qI,eta_p,eta_pI,H,I_residual";
    case Layout::Damage:
      return "t,q,d,p,r,eta_q,eta_d,eta_p,eta_r,H,I_residual";
  }
  return {};
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorKind::Io, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

const char* scheme_description(DissipationLaw::Tag tag) {
  using Tag = DissipationLaw::Tag;
  switch (tag) {
    case Tag::Pure:
      return "symplectic Euler-B: momentum update first, then position with the new momentum";
    case Tag::Viscous:
      return "symplectic Euler-B with the dissipative force implicit in the end-of-step velocity (prox fixed point)";
    case Tag::Plastic:
      return "symplectic Euler-B elastic predictor, then return mapping of the stress onto the yield set (prox)";
    case Tag::Damage:
      return "symplectic Euler-B at frozen damage, then the damage momentum with threshold complementarity";
    case Tag::Contact:
      return "Moreau-Jean: free flight, then a velocity impulse on violated constraints with Newton restitution";
    case Tag::Separable:
      break;
  }
  return "none";
}

Json audit_json(const AuditReport& r, const Trajectory& tr) {
  Json j;
  j["gap_functional"] = r.gap_functional.is_finite() ? Json(r.gap_functional.value()) : Json("inf");
  j["max_step_residual"] = number_json(r.max_step_residual);
  Json v = Json::array();
  for (const auto& x : r.violations)
    v.push_back({{"step", x.step}, {"invariant", x.invariant}, {"magnitude", number_json(x.magnitude)}});
  j["violations"] = v;
  j["passed"] = r.passed() && tr.complete;
  j["complete"] = tr.complete;
  if (!tr.complete) j["failure"] = tr.failure;
  j["steps"] = tr.steps();
  j["events"] = {{"damage_saturation", r.damage_saturations}, {"restitution_impact", r.restitution_impacts}};
  j["ledger"] = {{"total_dissipated", r.total_dissipated},
                 {"total_time_work", r.total_time_work},
                 {"closure_residual", r.closure_residual},
                 {"closure_relative", r.closure_relative},
                 {"closure_tolerance", r.closure_tolerance},
                 {"max_excess_per_dt", r.max_ledger_excess}};
  j["oracle"] = {{"checked", r.oracle_checked}, {"max_distance", number_json(r.oracle_max_distance)}};
  return j;
}

}  // namespace

RunOutcome run_scenario(const Scenario& sc, const std::filesystem::path& out_dir) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) fail(ErrorKind::Io, "cannot create " + out_dir.string() + ": " + ec.message());

  RunOutcome o;
  o.trajectory = integrate(sc.model, sc.law, sc.initial, sc.t0, sc.t_end, sc.dt, sc.step);
  const Trajectory& tr = o.trajectory;
  o.report = audit(tr, sc.model, sc.law, sc.audit);

  {
    CsvFile csv(out_dir / "trajectory.csv");
    csv.header(trajectory_header(sc.model.layout()));
    const std::size_t n = sc.model.dim();
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      csv.cell(tr.times[k]);
      for (double x : tr.states[k].q()) csv.cell(x);
      for (double x : tr.states[k].p()) csv.cell(x);
      for (std::size_t i = 0; i < 2 * n; ++i) {
        if (k < tr.etas.size())
          csv.cell(i < n ? tr.etas[k].q(i) : tr.etas[k].p(i - n));
        else
          csv.text("");
      }
      csv.cell(tr.energies[k]);
      csv.text(k < tr.residuals.size() ? residual_text(tr.residuals[k]) : "");
      csv.end();
    }
  }
  {
    CsvFile csv(out_dir / "energy_ledger.csv");
    csv.header("t,H,shadow,dH,dissipated,time_work,excess,cumulative_dissipated");
    for (std::size_t k = 0; k < o.report.energy_ledger.size(); ++k) {
      const auto& e = o.report.energy_ledger[k];
      csv.cell(e.t).cell(e.energy).cell(e.shadow).cell(e.energy_change).cell(e.dissipated).cell(e.time_work);
      csv.cell(e.excess).cell(tr.dissipated_work[k + 1]);
      csv.end();
    }
  }
  if (sc.law.tag() == DissipationLaw::Tag::Plastic) {
    CsvFile csv(out_dir / "hysteresis.csv");
    csv.header("t,q,sigma,q_I");
    for (std::size_t k = 0; k < tr.states.size(); ++k) {
      const auto& z = tr.states[k];
      csv.cell(tr.times[k]).cell(z.q(0)).cell(sc.model.elastic_force(z.q(0), z.q(1))).cell(z.q(1));
      csv.end();
    }
  }

  o.exit_code = !tr.complete ? 3 : (o.report.passed() ? 0 : 1);
  write_json(out_dir / "audit.json", audit_json(o.report, tr));

  Json meta;
  meta["schema_version"] = kSchemaVersion;
  meta["gapdyn_version"] = GAPDYN_VERSION_STRING;
  meta["scenario"] = Json::parse(sc.resolved);
  meta["scheme"] = {{"name", "symplectic_euler_b"}, {"stepper", scheme_description(sc.law.tag())}};
  meta["restitution"] = sc.step.restitution;
  meta["tolerances"] = {{"step_tol", sc.step.step_tol},
                        {"fixed_point_tol", sc.step.fixed_point_tol},
                        {"max_iter", sc.step.max_iter},
                        {"indicator_tol", sc.step.gap.indicator_tol},
                        {"ledger_slack_per_dt", sc.audit.ledger_slack},
                        {"closure_tol", o.report.closure_tolerance},
                        {"oracle_grid",
                         {{"lo", sc.audit.grid.lo}, {"hi", sc.audit.grid.hi}, {"points", sc.audit.grid.points}}}};
  meta["seed"] = sc.seed;
  meta["steps"] = tr.steps();
  meta["final_time"] = tr.times.back();
  meta["exit_code"] = o.exit_code;
  meta["outputs"] = Json::array({"trajectory.csv", "energy_ledger.csv", "audit.json", "metadata.json"});
  if (sc.law.tag() == DissipationLaw::Tag::Plastic) meta["outputs"].push_back("hysteresis.csv");
  write_json(out_dir / "metadata.json", meta);

  std::ostringstream sum;
  sum << sc.name << ": " << tr.steps() << " steps, " << o.report.violations.size() << " violations, gap functional "
      << residual_text(o.report.gap_functional) << ", max residual " << format_number(o.report.max_step_residual);
  if (!tr.complete) sum << ", FAILED: " << tr.failure;
  o.summary = sum.str();
  return o;
}

double write_conjugate_table(const ConvexFunction& f, double lo, double hi, std::size_t samples,
                             const std::filesystem::path& out) {
  if (f.dim() != 1) fail(ErrorKind::Unsupported, "conjugate tables need a one-dimensional function");
  const ConjugateTable table = numerical_conjugate(f, lo, hi, samples);
  std::optional<ConvexFunction> closed;
  try {
    closed = polar(f);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Unsupported) throw;
  }
  CsvFile csv(out);
  csv.header("y,phi_star_numeric,phi_star_closed_form,abs_diff");
  double worst = 0.0;
  for (std::size_t i = 0; i < table.y.size(); ++i) {
    const double y[1] = {table.y[i]};
    const ExtendedReal num = table.value[i];
    csv.cell(y[0]).text(residual_text(num));
    if (closed) {
      const ExtendedReal cf = eval(*closed, y);
      csv.text(residual_text(cf));
      if (num.is_finite() && cf.is_finite()) {
        const double d = std::abs(num.value() - cf.value());
        worst = std::max(worst, d);
        csv.cell(d);
      } else {
        csv.text(num.is_finite() == cf.is_finite() ? "0" : "inf");
      }
    } else {
      csv.text("").text("");
    }
    csv.end();
  }
  return worst;
}

}  // namespace gapdyn
