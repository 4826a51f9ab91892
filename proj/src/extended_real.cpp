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

#include "gapdyn/extended_real.hpp"

#include <cmath>

#include "gapdyn/error.hpp"

namespace gapdyn {

ExtendedReal::ExtendedReal(double value) : value_(value) {
  if (std::isnan(value)) fail(ErrorKind::Usage, "extended real cannot hold NaN");
  if (value == -std::numeric_limits<double>::infinity())
    fail(ErrorKind::Usage, "extended real cannot hold -inf");
}

ExtendedReal& ExtendedReal::operator+=(ExtendedReal other) {
  if (is_infinite() || other.is_infinite()) {
    value_ = std::numeric_limits<double>::infinity();
  } else {
    value_ += other.value_;
  }
  return *this;
}

ExtendedReal operator-(ExtendedReal a, double b) {
  if (!std::isfinite(b)) fail(ErrorKind::Usage, "only finite reals can be subtracted");
  if (a.is_infinite()) return a;
  return ExtendedReal(a.value_ - b);
}

ExtendedReal operator*(double a, ExtendedReal b) {
  if (!(a >= 0.0) || !std::isfinite(a))
    fail(ErrorKind::Usage, "extended reals scale by finite nonnegative factors only");
  if (b.is_infinite()) return a == 0.0 ? ExtendedReal(0.0) : b;
  return ExtendedReal(a * b.value_);
}

}  // namespace gapdyn
