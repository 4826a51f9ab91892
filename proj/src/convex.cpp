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

#include "gapdyn/convex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "gapdyn/error.hpp"

namespace gapdyn {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string fmt(const Vector& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v[i]);
  return s + "]";
}

void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got)
    fail(ErrorKind::Usage, std::string(what) + ": dimension mismatch, expected " + std::to_string(expected) +
                               ", got " + std::to_string(got));
}

void require_finite_vector(const Vector& v, const char* what) {
  for (double x : v)
    if (!std::isfinite(x)) fail(ErrorKind::Config, std::string(what) + " entries must be finite");
}

void require_bounds(const Vector& lo, const Vector& hi, const char* what) {
  if (lo.size() != hi.size()) fail(ErrorKind::Config, std::string(what) + ": lo and hi differ in length");
  if (lo.empty()) fail(ErrorKind::Config, std::string(what) + ": empty bounds");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (std::isnan(lo[i]) || std::isnan(hi[i])) fail(ErrorKind::Config, std::string(what) + ": NaN bound");
    if (lo[i] == kInf || hi[i] == -kInf || lo[i] > hi[i])
      fail(ErrorKind::Config, std::string(what) + ": need lo <= hi with lo < +inf and hi > -inf");
  }
}

// One coordinate of a member of the algebra, in the normal form
//   A/2 (x - c)^2 + s x + k + sigma_[slo, shi](x) + chi_[lo, hi](x).
struct Scalar {
  double A = 0.0;
  double c = 0.0;
  double k = 0.0;
  double s = 0.0;
  double slo = 0.0;
  double shi = 0.0;
  double lo = -kInf;
  double hi = kInf;
  int quadratic_terms = 0;

  bool has_box() const { return lo != -kInf || hi != kInf; }
  bool has_support() const { return slo != 0.0 || shi != 0.0; }

  void add(const Scalar& t) {
    if (t.A > 0.0) {
      if (A == 0.0) {
        A = t.A;
        c = t.c;
      } else {
        const double a2 = A + t.A;
        const double c2 = (A * c + t.A * t.c) / a2;
        k += (A * c * c + t.A * t.c * t.c) / 2 - a2 * c2 * c2 / 2;
        A = a2;
        c = c2;
      }
    }
    quadratic_terms += t.quadratic_terms;
    k += t.k;
    s += t.s;
    slo += t.slo;
    shi += t.shi;
    lo = std::max(lo, t.lo);
    hi = std::min(hi, t.hi);
  }

  Interval dom() const {
    double l = lo, h = hi;
    if (slo == -kInf) l = std::max(l, 0.0);
    if (shi == kInf) h = std::min(h, 0.0);
    return {l, h};
  }

  Interval subdiff(double x) const {
    const Interval d = dom();
    if (!d.contains(x)) return {kInf, -kInf};
    const double base = A * (x - c) + s;
    double l = base, h = base;
    if (x > 0) {
      l += shi;
      h += shi;
    } else if (x < 0) {
      l += slo;
      h += slo;
    } else {
      l += slo;
      h += shi;
    }
    if (x == lo) l = -kInf;
    if (x == hi) h = kInf;
    return {l, h};
  }

  double prox(double x0, double lambda) const {
    // Without curvature skip the divide-multiply round trip, so points inside
    // a box come back bit for bit.
    const double step = A == 0.0 ? lambda : 1.0 / (A + 1.0 / lambda);
    const double v = A == 0.0 ? x0 - lambda * s : step * (x0 / lambda + A * c - s);
    double w;
    if (v > step * shi) {
      w = v - step * shi;
    } else if (v < step * slo) {
      w = v - step * slo;
    } else {
      w = 0.0;
    }
    return std::clamp(w, lo, hi);
  }
};

}  // namespace

struct ConvexFunction::Node {
  Tag tag;
  std::size_t dim = 0;
  double a = 0.0;
  Vector u;  // center / slope / point / lower bound
  Vector v;  // upper bound
  std::vector<ConvexFunction> terms;
  std::vector<Block> blocks;
};

namespace {

void collect(const ConvexFunction& f, std::vector<Scalar>& out);

std::vector<Scalar> normal_form(const ConvexFunction& f) {
  std::vector<Scalar> out(f.dim());
  collect(f, out);
  return out;
}

void collect(const ConvexFunction& f, std::vector<Scalar>& out) {
  using Tag = ConvexFunction::Tag;
  switch (f.tag()) {
    case Tag::Quadratic:
      for (std::size_t i = 0; i < out.size(); ++i) {
        Scalar t;
        t.A = f.quadratic_coefficient();
        t.c = f.center()[i];
        t.quadratic_terms = 1;
        out[i].add(t);
      }
      break;
    case Tag::Linear:
      for (std::size_t i = 0; i < out.size(); ++i) out[i].s += f.slope()[i];
      break;
    case Tag::IndicatorPoint:
      for (std::size_t i = 0; i < out.size(); ++i) {
        Scalar t;
        t.lo = t.hi = f.point()[i];
        out[i].add(t);
      }
      break;
    case Tag::IndicatorBox:
      for (std::size_t i = 0; i < out.size(); ++i) {
        Scalar t;
        t.lo = f.lower()[i];
        t.hi = f.upper()[i];
        out[i].add(t);
      }
      break;
    case Tag::SupportBox:
      for (std::size_t i = 0; i < out.size(); ++i) {
        Scalar t;
        t.slo = f.lower()[i];
        t.shi = f.upper()[i];
        out[i].add(t);
      }
      break;
    case Tag::Sum:
      for (const auto& t : f.terms()) collect(t, out);
      break;
    case Tag::SeparableProduct:
      for (const auto& b : f.blocks()) {
        std::vector<Scalar> inner(b.indices.size());
        collect(b.function, inner);
        for (std::size_t j = 0; j < b.indices.size(); ++j) out[b.indices[j]].add(inner[j]);
      }
      break;
  }
}

// Conjugate of one coordinate, as a 1-D member of the algebra.
ConvexFunction scalar_polar(const Scalar& f) {
  const double k_scale = 1.0 + std::abs(f.A * f.c * f.c) + std::abs(f.k);
  auto require_no_constant = [&](double k_star) {
    if (std::abs(k_star) > 1e-12 * k_scale)
      fail(ErrorKind::Unsupported, "conjugate carries an additive constant " + fmt(k_star) +
                                       " that the function algebra cannot represent");
  };
  std::vector<ConvexFunction> terms;
  auto finish = [&]() {
    if (terms.empty()) return ConvexFunction::zero(1);
    if (terms.size() == 1) return terms.front();
    return ConvexFunction::sum(std::move(terms));
  };

  const bool box = f.has_box();
  const bool support = f.has_support();

  if (!box && !support) {
    if (f.A > 0.0) {
      // A/2 (x-c)^2 + s x + k  ->  (y-s)^2/(2A) + c (y-s) - k
      require_no_constant(-f.c * f.s - f.k);
      terms.push_back(ConvexFunction::quadratic(1.0 / f.A, Vector{f.s}));
      if (f.c != 0.0) terms.push_back(ConvexFunction::linear({f.c}));
      return finish();
    }
    require_no_constant(-f.k);
    return ConvexFunction::indicator_point({f.s});
  }
  if (f.A > 0.0 || (box && support))
    fail(ErrorKind::Unsupported, "no closed-form conjugate for this combination of terms");

  if (support) {
    // s x + sigma_[a,b](x) = sigma_[a+s, b+s](x), conjugate chi_[a+s, b+s].
    require_no_constant(-f.k);
    return ConvexFunction::indicator_box({f.slo + f.s}, {f.shi + f.s});
  }

  // s x + chi_[lo,hi](x)  ->  sigma_[lo,hi](y - s)
  require_no_constant(-f.k);
  if (f.s == 0.0) return ConvexFunction::support_box({f.lo}, {f.hi});
  auto cone_end = [](double v) { return v == 0.0 || std::isinf(v); };
  if (!cone_end(f.lo) || !cone_end(f.hi))
    fail(ErrorKind::Unsupported, "no closed-form conjugate for a shifted bounded interval");
  // The support function of a closed cone is the indicator of its polar cone.
  double lo = -kInf, hi = kInf;
  if (f.lo == 0.0) hi = f.s;  // cone contains [0, ...): y - s <= 0
  if (f.hi == 0.0) lo = f.s;  // cone contains (..., 0]: y - s >= 0
  if (lo == -kInf && hi == kInf) return ConvexFunction::zero(1);
  return ConvexFunction::indicator_box({lo}, {hi});
}

ExtendedReal eval_support(double lo, double hi, double y) {
  if (y > 0) return hi == kInf ? ExtendedReal::infinity() : ExtendedReal(hi * y);
  if (y < 0) return lo == -kInf ? ExtendedReal::infinity() : ExtendedReal(lo * y);
  return 0.0;
}

}  // namespace

ConvexFunction ConvexFunction::quadratic(double a, Vector center) {
  if (!(a > 0.0) || !std::isfinite(a)) fail(ErrorKind::Config, "quadratic coefficient must be positive and finite");
  if (center.empty()) fail(ErrorKind::Config, "quadratic needs a nonempty center");
  require_finite_vector(center, "quadratic center");
  auto n = std::make_shared<Node>();
  n->tag = Tag::Quadratic;
  n->dim = center.size();
  n->a = a;
  n->u = std::move(center);
  return ConvexFunction(std::move(n));
}

ConvexFunction ConvexFunction::linear(Vector slope) {
  if (slope.empty()) fail(ErrorKind::Config, "linear needs a nonempty slope");
  require_finite_vector(slope, "linear slope");
  auto n = std::make_shared<Node>();
  n->tag = Tag::Linear;
  n->dim = slope.size();
  n->u = std::move(slope);
  return ConvexFunction(std::move(n));
}

ConvexFunction ConvexFunction::indicator_point(Vector x0) {
  if (x0.empty()) fail(ErrorKind::Config, "indicator_point needs a nonempty point");
  require_finite_vector(x0, "indicator_point");
  auto n = std::make_shared<Node>();
  n->tag = Tag::IndicatorPoint;
  n->dim = x0.size();
  n->u = std::move(x0);
  return ConvexFunction(std::move(n));
}

ConvexFunction ConvexFunction::indicator_box(Vector lo, Vector hi) {
  require_bounds(lo, hi, "indicator_box");
  auto n = std::make_shared<Node>();
  n->tag = Tag::IndicatorBox;
  n->dim = lo.size();
  n->u = std::move(lo);
  n->v = std::move(hi);
  return ConvexFunction(std::move(n));
}

ConvexFunction ConvexFunction::support_box(Vector lo, Vector hi) {
  require_bounds(lo, hi, "support_box");
  auto n = std::make_shared<Node>();
  n->tag = Tag::SupportBox;
  n->dim = lo.size();
  n->u = std::move(lo);
  n->v = std::move(hi);
  return ConvexFunction(std::move(n));
}

ConvexFunction ConvexFunction::support_box_radius(double radius, std::size_t dim) {
  if (!(radius >= 0.0) || !std::isfinite(radius))
    fail(ErrorKind::Config, "support_box radius must be nonnegative and finite");
  return support_box(Vector(dim, -radius), Vector(dim, radius));
}

ConvexFunction ConvexFunction::sum(std::vector<ConvexFunction> terms) {
  if (terms.empty()) fail(ErrorKind::Config, "sum needs at least one term");
  const std::size_t d = terms.front().dim();
  for (const auto& t : terms)
    if (t.dim() != d) fail(ErrorKind::Config, "sum terms must share one dimension");
  auto n = std::make_shared<Node>();
  n->tag = Tag::Sum;
  n->dim = d;
  n->terms = std::move(terms);
  ConvexFunction f(std::move(n));
  for (const auto& iv : domain(f))
    if (iv.empty()) fail(ErrorKind::Config, "sum has an empty domain");
  return f;
}

ConvexFunction ConvexFunction::separable_product(std::size_t dim, std::vector<Block> blocks) {
  if (dim == 0) fail(ErrorKind::Config, "separable_product needs a positive dimension");
  std::vector<bool> used(dim, false);
  for (const auto& b : blocks) {
    if (b.indices.size() != b.function.dim())
      fail(ErrorKind::Config, "separable_product block index count differs from its function dimension");
    for (std::size_t i : b.indices) {
      if (i >= dim) fail(ErrorKind::Config, "separable_product index out of range");
      if (used[i]) fail(ErrorKind::Config, "separable_product blocks must be disjoint");
      used[i] = true;
    }
  }
  auto n = std::make_shared<Node>();
  n->tag = Tag::SeparableProduct;
  n->dim = dim;
  n->blocks = std::move(blocks);
  return ConvexFunction(std::move(n));
}

ConvexFunction::Tag ConvexFunction::tag() const { return node_->tag; }
std::size_t ConvexFunction::dim() const { return node_->dim; }

namespace {
[[noreturn]] void wrong_tag(const char* accessor) {
  fail(ErrorKind::Usage, std::string(accessor) + " is not defined for this function tag");
}
}  // namespace

double ConvexFunction::quadratic_coefficient() const {
  if (tag() != Tag::Quadratic) wrong_tag("quadratic_coefficient");
  return node_->a;
}
const Vector& ConvexFunction::center() const {
  if (tag() != Tag::Quadratic) wrong_tag("center");
  return node_->u;
}
const Vector& ConvexFunction::slope() const {
  if (tag() != Tag::Linear) wrong_tag("slope");
  return node_->u;
}
const Vector& ConvexFunction::point() const {
  if (tag() != Tag::IndicatorPoint) wrong_tag("point");
  return node_->u;
}
const Vector& ConvexFunction::lower() const {
  if (tag() != Tag::IndicatorBox && tag() != Tag::SupportBox) wrong_tag("lower");
  return node_->u;
}
const Vector& ConvexFunction::upper() const {
  if (tag() != Tag::IndicatorBox && tag() != Tag::SupportBox) wrong_tag("upper");
  return node_->v;
}
const std::vector<ConvexFunction>& ConvexFunction::terms() const {
  if (tag() != Tag::Sum) wrong_tag("terms");
  return node_->terms;
}
const std::vector<ConvexFunction::Block>& ConvexFunction::blocks() const {
  if (tag() != Tag::SeparableProduct) wrong_tag("blocks");
  return node_->blocks;
}

std::string ConvexFunction::describe() const {
  switch (tag()) {
    case Tag::Quadratic:
      return "quadratic(a=" + fmt(node_->a) + ", center=" + fmt(node_->u) + ")";
    case Tag::Linear:
      return "linear(slope=" + fmt(node_->u) + ")";
    case Tag::IndicatorPoint:
      return "indicator_point(" + fmt(node_->u) + ")";
    case Tag::IndicatorBox:
      return "indicator_box(lo=" + fmt(node_->u) + ", hi=" + fmt(node_->v) + ")";
    case Tag::SupportBox:
      return "support_box(lo=" + fmt(node_->u) + ", hi=" + fmt(node_->v) + ")";
    case Tag::Sum: {
      std::string s = "sum(";
      for (std::size_t i = 0; i < node_->terms.size(); ++i) s += (i ? ", " : "") + node_->terms[i].describe();
      return s + ")";
    }
    case Tag::SeparableProduct: {
      std::string s = "separable_product(dim=" + std::to_string(node_->dim);
      for (const auto& b : node_->blocks) {
        s += ", {";
        for (std::size_t i = 0; i < b.indices.size(); ++i) s += (i ? "," : "") + std::to_string(b.indices[i]);
        s += "}: " + b.function.describe();
      }
      return s + ")";
    }
  }
  return "?";
}

ExtendedReal eval(const ConvexFunction& f, std::span<const double> x) {
  using Tag = ConvexFunction::Tag;
  require_dim(f.dim(), x.size(), "eval");
  switch (f.tag()) {
    case Tag::Quadratic: {
      double s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - f.center()[i];
        s += d * d;
      }
      return f.quadratic_coefficient() / 2 * s;
    }
    case Tag::Linear:
      return dot(f.slope(), x);
    case Tag::IndicatorPoint:
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != f.point()[i]) return ExtendedReal::infinity();
      return 0.0;
    case Tag::IndicatorBox:
      for (std::size_t i = 0; i < x.size(); ++i)
        if (!(x[i] >= f.lower()[i] && x[i] <= f.upper()[i])) return ExtendedReal::infinity();
      return 0.0;
    case Tag::SupportBox: {
      ExtendedReal s = 0.0;
      for (std::size_t i = 0; i < x.size(); ++i) s += eval_support(f.lower()[i], f.upper()[i], x[i]);
      return s;
    }
    case Tag::Sum: {
      ExtendedReal s = 0.0;
      for (const auto& t : f.terms()) {
        s += eval(t, x);
        if (s.is_infinite()) break;
      }
      return s;
    }
    case Tag::SeparableProduct: {
      ExtendedReal s = 0.0;
      for (const auto& b : f.blocks()) {
        Vector sub(b.indices.size());
        for (std::size_t j = 0; j < b.indices.size(); ++j) sub[j] = x[b.indices[j]];
        s += eval(b.function, sub);
      }
      return s;
    }
  }
  return 0.0;
}

std::vector<Interval> domain(const ConvexFunction& f) {
  const auto nf = normal_form(f);
  std::vector<Interval> out;
  out.reserve(nf.size());
  for (const auto& s : nf) out.push_back(s.dom());
  return out;
}

Vector snap_to_domain(const ConvexFunction& f, std::span<const double> x, double tol) {
  require_dim(f.dim(), x.size(), "snap_to_domain");
  const auto dom = domain(f);
  Vector out(x.begin(), x.end());
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i] < dom[i].lo && out[i] >= dom[i].lo - tol) out[i] = dom[i].lo;
    if (out[i] > dom[i].hi && out[i] <= dom[i].hi + tol) out[i] = dom[i].hi;
  }
  return out;
}

std::vector<Interval> subdifferential(const ConvexFunction& f, std::span<const double> x) {
  require_dim(f.dim(), x.size(), "subdifferential");
  const auto nf = normal_form(f);
  std::vector<Interval> out;
  out.reserve(nf.size());
  for (std::size_t i = 0; i < nf.size(); ++i) out.push_back(nf[i].subdiff(x[i]));
  return out;
}

bool subgradient_contains(const ConvexFunction& f, std::span<const double> x, std::span<const double> u,
                          double tol) {
  require_dim(f.dim(), x.size(), "subgradient_contains");
  require_dim(f.dim(), u.size(), "subgradient_contains");
  // Tolerance on the graph: u must be within tol of df(x') for some x' within
  // tol of x. Coordinates are independent and df is monotone, so the union
  // over [x - tol, x + tol] runs from df at the left end to df at the right.
  const Vector xs = snap_to_domain(f, x, tol);
  const auto dom = domain(f);
  const auto nf = normal_form(f);
  for (std::size_t i = 0; i < nf.size(); ++i) {
    if (!dom[i].contains(xs[i])) return false;
    const Interval left = nf[i].subdiff(std::max(xs[i] - tol, dom[i].lo));
    const Interval right = nf[i].subdiff(std::min(xs[i] + tol, dom[i].hi));
    if (!Interval{left.lo, right.hi}.contains(u[i], tol)) return false;
  }
  return true;
}

ConvexFunction polar(const ConvexFunction& f) {
  using Tag = ConvexFunction::Tag;
  switch (f.tag()) {
    case Tag::Quadratic: {
      const double a = f.quadratic_coefficient();
      const bool centered = std::all_of(f.center().begin(), f.center().end(), [](double c) { return c == 0.0; });
      if (centered) return ConvexFunction::centered_quadratic(1.0 / a, f.dim());
      return ConvexFunction::sum({ConvexFunction::centered_quadratic(1.0 / a, f.dim()), ConvexFunction::linear(f.center())});
    }
    case Tag::Linear:
      return ConvexFunction::indicator_point(f.slope());
    case Tag::IndicatorPoint:
      return ConvexFunction::linear(f.point());
    case Tag::IndicatorBox:
      return ConvexFunction::support_box(f.lower(), f.upper());
    case Tag::SupportBox:
      return ConvexFunction::indicator_box(f.lower(), f.upper());
    case Tag::Sum: {
      const auto nf = normal_form(f);
      if (nf.size() == 1) return scalar_polar(nf[0]);
      std::vector<ConvexFunction::Block> blocks;
      for (std::size_t i = 0; i < nf.size(); ++i) blocks.push_back({scalar_polar(nf[i]), {i}});
      return ConvexFunction::separable_product(f.dim(), std::move(blocks));
    }
    case Tag::SeparableProduct: {
      std::vector<ConvexFunction::Block> blocks;
      std::vector<bool> covered(f.dim(), false);
      for (const auto& b : f.blocks()) {
        blocks.push_back({polar(b.function), b.indices});
        for (std::size_t i : b.indices) covered[i] = true;
      }
      // A coordinate the function ignores conjugates to the indicator of 0.
      std::vector<std::size_t> free;
      for (std::size_t i = 0; i < f.dim(); ++i)
        if (!covered[i]) free.push_back(i);
      if (!free.empty()) blocks.push_back({ConvexFunction::indicator_point(Vector(free.size(), 0.0)), free});
      return ConvexFunction::separable_product(f.dim(), std::move(blocks));
    }
  }
  fail(ErrorKind::Unsupported, "unknown function tag");
}

ExtendedReal fenchel_gap(const ConvexFunction& f, const ConvexFunction& f_star, std::span<const double> x,
                         std::span<const double> y) {
  const ExtendedReal fx = eval(f, x);
  const ExtendedReal fy = eval(f_star, y);
  if (fx.is_infinite() || fy.is_infinite()) return ExtendedReal::infinity();
  return ExtendedReal(fx.value() + fy.value() - dot(x, y));
}

ExtendedReal fenchel_gap(const ConvexFunction& f, std::span<const double> x, std::span<const double> y) {
  return fenchel_gap(f, polar(f), x, y);
}

Vector prox(const ConvexFunction& f, std::span<const double> x0, std::span<const double> lambda) {
  require_dim(f.dim(), x0.size(), "prox");
  require_dim(f.dim(), lambda.size(), "prox");
  const auto nf = normal_form(f);
  Vector out(nf.size());
  for (std::size_t i = 0; i < nf.size(); ++i) {
    if (!(lambda[i] > 0.0) || !std::isfinite(lambda[i])) fail(ErrorKind::Usage, "prox step must be positive");
    out[i] = nf[i].prox(x0[i], lambda[i]);
  }
  return out;
}

Vector prox(const ConvexFunction& f, std::span<const double> x0, double lambda) {
  const Vector l(f.dim(), lambda);
  return prox(f, x0, l);
}

ConjugateTable numerical_conjugate(const ConvexFunction& f, double grid_lo, double grid_hi, std::size_t samples,
                                   double cap) {
  if (f.dim() != 1) fail(ErrorKind::Usage, "numerical_conjugate needs a one-dimensional function");
  if (samples < 2) fail(ErrorKind::Usage, "numerical_conjugate needs at least two samples");
  if (!(grid_hi > grid_lo) || !std::isfinite(grid_lo) || !std::isfinite(grid_hi))
    fail(ErrorKind::Usage, "numerical_conjugate needs a finite grid with lo < hi");
  const double width = grid_hi - grid_lo;
  const double n1 = static_cast<double>(samples - 1);
  Vector xs(samples), fx(samples);
  bool any_finite = false;
  for (std::size_t i = 0; i < samples; ++i) {
    xs[i] = grid_lo + (width * static_cast<double>(i)) / n1;
    const double x1[1] = {xs[i]};
    fx[i] = eval(f, x1).value();
    any_finite = any_finite || std::isfinite(fx[i]);
  }
  if (!any_finite) fail(ErrorKind::Usage, "function is +inf at every grid point");

  ConjugateTable t;
  t.y = xs;
  t.spacing = width / n1;
  t.value.reserve(samples);
  for (std::size_t j = 0; j < samples; ++j) {
    double best = -kInf;
    for (std::size_t i = 0; i < samples; ++i)
      if (std::isfinite(fx[i])) best = std::max(best, xs[i] * xs[j] - fx[i]);
    t.value.push_back(best > cap ? ExtendedReal::infinity() : ExtendedReal(best));
  }
  return t;
}

bool n_monotone_check(const std::vector<std::pair<Vector, Vector>>& graph, int n,
                      const MonotoneCheckOptions& options) {
  if (n < 1) fail(ErrorKind::Usage, "n_monotone_check needs n >= 1");
  const std::size_t m = graph.size();
  if (m == 0) return true;
  for (const auto& [x, y] : graph) {
    require_dim(graph.front().first.size(), x.size(), "n_monotone_check");
    require_dim(graph.front().first.size(), y.size(), "n_monotone_check");
  }
  const std::size_t len = static_cast<std::size_t>(n) + 1;

  auto chain = [&](const std::vector<std::size_t>& idx) {
    const auto& x0 = graph[idx[0]].first;
    const auto& [xn, yn] = graph[idx[n]];
    double s = 0.0;
    for (std::size_t i = 0; i < xn.size(); ++i) s += (xn[i] - x0[i]) * yn[i];
    for (std::size_t k = 1; k < len; ++k) {
      const auto& [xa, ya] = graph[idx[k - 1]];
      const auto& xb = graph[idx[k]].first;
      for (std::size_t i = 0; i < xa.size(); ++i) s += (xa[i] - xb[i]) * ya[i];
    }
    return s;
  };

  // Number of ordered tuples, saturating once past the enumeration limit.
  std::uint64_t total = 1;
  for (std::size_t k = 0; k < len && total <= options.exhaustive_limit; ++k) total *= m;

  std::vector<std::size_t> idx(len, 0);
  if (total <= options.exhaustive_limit) {
    while (true) {
      if (chain(idx) < -options.tol) return false;
      std::size_t k = 0;
      while (k < len && ++idx[k] == m) idx[k++] = 0;
      if (k == len) return true;
    }
  }
  std::mt19937_64 rng(options.seed);
  std::uniform_int_distribution<std::size_t> pick(0, m - 1);
  for (std::uint64_t s = 0; s < options.samples; ++s) {
    for (auto& i : idx) i = pick(rng);
    if (chain(idx) < -options.tol) return false;
  }
  return true;
}

}  // namespace gapdyn
