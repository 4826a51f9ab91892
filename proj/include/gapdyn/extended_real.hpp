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

#include <compare>
#include <limits>

namespace gapdyn {

/// A value in R u {+inf}. Minus infinity and NaN are not representable.
///
/// Arithmetic follows the usual convex-analysis conventions:
/// a + (+inf) = +inf, and a * (+inf) = +inf for a > 0. We additionally take
/// 0 * (+inf) = 0, which is what makes indicator functions scale cleanly.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  ExtendedReal(double value);  // NOLINT: implicit on purpose, reals embed

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.value_ = std::numeric_limits<double>::infinity();
    return r;
  }

  bool is_finite() const { return value_ != std::numeric_limits<double>::infinity(); }
  bool is_infinite() const { return !is_finite(); }

  /// The underlying double; +inf for the infinite element.
  double value() const { return value_; }

  ExtendedReal& operator+=(ExtendedReal other);

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) { return a += b; }
  /// Subtracting a finite real. +inf - a stays +inf.
  friend ExtendedReal operator-(ExtendedReal a, double b);
  /// Scaling by a >= 0.
  friend ExtendedReal operator*(double a, ExtendedReal b);

  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.value_ == b.value_; }
  friend std::partial_ordering operator<=>(ExtendedReal a, ExtendedReal b) {
    return a.value_ <=> b.value_;
  }

 private:
  double value_ = 0.0;
};

}  // namespace gapdyn
