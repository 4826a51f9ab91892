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
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gapdyn/extended_real.hpp"
#include "gapdyn/phase_space.hpp"

namespace gapdyn {

inline constexpr double kMembershipTol = 1e-8;
inline constexpr double kGapTol = 1e-9;
inline constexpr double kConjugateCap = 1e12;

/// Closed interval [lo, hi] of the extended line; either end may be infinite.
struct Interval {
  double lo;
  double hi;
  bool contains(double x, double tol = 0.0) const { return x >= lo - tol && x <= hi + tol; }
  bool empty() const { return lo > hi; }
};

/// An lsc convex function R^n -> R u {+inf} from a small closed algebra.
///
/// Every member is a sum of one-dimensional functions of the individual
/// coordinates, which is what keeps polar, prox and subdifferential exact.
/// Values are immutable and cheap to copy.
class ConvexFunction {
 public:
  enum class Tag { Quadratic, Linear, IndicatorPoint, IndicatorBox, SupportBox, Sum, SeparableProduct };

  struct Block;

  /// (a/2)|x - center|^2, a > 0.
  static ConvexFunction quadratic(double a, Vector center);
  static ConvexFunction centered_quadratic(double a, std::size_t dim = 1) { return quadratic(a, Vector(dim, 0.0)); }
  /// <slope, x>
  static ConvexFunction linear(Vector slope);
  static ConvexFunction zero(std::size_t dim) { return linear(Vector(dim, 0.0)); }
  /// 0 at x0, +inf elsewhere.
  static ConvexFunction indicator_point(Vector x0);
  /// 0 on the product of [lo_i, hi_i], +inf elsewhere. Infinite ends allowed.
  static ConvexFunction indicator_box(Vector lo, Vector hi);
  /// Support function of the box [lo, hi]: sum_i max(lo_i y_i, hi_i y_i).
  /// With lo_i = -inf the i-th term is +inf for y_i < 0, and likewise for hi_i.
  static ConvexFunction support_box(Vector lo, Vector hi);
  /// radius * |y|_1, the support function of [-radius, radius]^dim.
  static ConvexFunction support_box_radius(double radius, std::size_t dim = 1);
  /// Pointwise sum; all terms must share one dimension and the domain of the
  /// sum must be nonempty.
  static ConvexFunction sum(std::vector<ConvexFunction> terms);
  /// sum_b f_b(x[indices_b]) on R^dim, blocks pairwise disjoint. Coordinates
  /// outside every block do not affect the value.
  static ConvexFunction separable_product(std::size_t dim, std::vector<Block> blocks);

  Tag tag() const;
  std::size_t dim() const;

  // Tag payloads. Calling an accessor for another tag throws a usage error.
  double quadratic_coefficient() const;
  const Vector& center() const;
  const Vector& slope() const;
  const Vector& point() const;
  const Vector& lower() const;
  const Vector& upper() const;
  const std::vector<ConvexFunction>& terms() const;
  const std::vector<Block>& blocks() const;

  std::string describe() const;

 private:
  struct Node;
  explicit ConvexFunction(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct ConvexFunction::Block {
  ConvexFunction function;
  std::vector<std::size_t> indices;
};

/// Exact value. Throws a usage error on dimension mismatch.
ExtendedReal eval(const ConvexFunction& f, std::span<const double> x);

/// Per-coordinate domain: dom f is the product of these intervals.
std::vector<Interval> domain(const ConvexFunction& f);

/// Moves coordinates lying within tol outside dom f onto its boundary.
/// Coordinates further out are left untouched.
Vector snap_to_domain(const ConvexFunction& f, std::span<const double> x, double tol);

/// Per-coordinate subdifferential at x; empty intervals (lo > hi) when x is
/// outside the domain.
std::vector<Interval> subdifferential(const ConvexFunction& f, std::span<const double> x);

/// u in df(x) up to tol on the graph: some x' within tol of x (per
/// coordinate) has a subgradient within tol of u. Boundary round-off on
/// either side of a kink or domain edge is therefore absorbed.
bool subgradient_contains(const ConvexFunction& f, std::span<const double> x,
                          std::span<const double> u, double tol = kMembershipTol);

/// Fenchel conjugate in closed form. Throws ErrorKind::Unsupported when the
/// conjugate leaves the algebra (callers fall back to numerical_conjugate).
ConvexFunction polar(const ConvexFunction& f);

/// f(x) + f*(y) - <x, y>; +inf when either term is.
ExtendedReal fenchel_gap(const ConvexFunction& f, std::span<const double> x, std::span<const double> y);
/// Same with a precomputed conjugate.
ExtendedReal fenchel_gap(const ConvexFunction& f, const ConvexFunction& f_star,
                         std::span<const double> x, std::span<const double> y);

/// argmin_x f(x) + |x - x0|^2 / (2 lambda).
Vector prox(const ConvexFunction& f, std::span<const double> x0, double lambda);
/// Coordinate-wise step sizes: argmin_x f(x) + sum_i (x_i - x0_i)^2 / (2 lambda_i).
Vector prox(const ConvexFunction& f, std::span<const double> x0, std::span<const double> lambda);

struct ConjugateTable {
  Vector y;
  /// +inf where the sampled supremum exceeds the cap.
  std::vector<ExtendedReal> value;
  double spacing = 0.0;
};

/// Brute-force conjugate of a 1-D function on a uniform grid: for each grid
/// point y, the max over grid points x of x*y - f(x).
ConjugateTable numerical_conjugate(const ConvexFunction& f, double grid_lo = -10.0,
                                   double grid_hi = 10.0, std::size_t samples = 4001,
                                   double cap = kConjugateCap);

struct MonotoneCheckOptions {
  /// Above this many ordered tuples the check samples instead of enumerating.
  std::uint64_t exhaustive_limit = 2'000'000;
  std::uint64_t samples = 200'000;
  std::uint64_t seed = 1;
  double tol = 1e-9;
};

/// Checks <x_n - x_0, y_n> + sum_{k=1..n} <x_{k-1} - x_k, y_{k-1}> >= -tol on
/// ordered (n+1)-tuples of graph points, repetition allowed.
bool n_monotone_check(const std::vector<std::pair<Vector, Vector>>& graph, int n,
                      const MonotoneCheckOptions& options = {});

}  // namespace gapdyn
