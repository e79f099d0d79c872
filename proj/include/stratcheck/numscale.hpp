// Copyright 2026 The stratcheck Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <compare>
#include <span>
#include <string>

namespace stratcheck {

// Signed real stored as sign and natural-log magnitude. Covers magnitudes far
// outside the double range, e.g. exp(-1e7), at double precision in the log.
class XScalar {
 public:
  constexpr XScalar() = default;
  XScalar(double v);  // NOLINT(google-explicit-constructor): numeric literal interop

  static XScalar from_log(int sign, double logmag);
  static XScalar zero() { return {}; }

  int sign() const noexcept { return sign_; }
  // Natural log of |x|; meaningless when sign() == 0.
  double logmag() const noexcept { return logmag_; }
  bool is_zero() const noexcept { return sign_ == 0; }

  // Saturates to 0 or +-inf outside the double range.
  double to_double() const;
  bool fits_double() const;

  XScalar operator-() const;
  XScalar& operator+=(const XScalar& o);
  XScalar& operator-=(const XScalar& o);
  XScalar& operator*=(const XScalar& o);
  XScalar& operator/=(const XScalar& o);

  friend XScalar operator+(XScalar a, const XScalar& b) { return a += b; }
  friend XScalar operator-(XScalar a, const XScalar& b) { return a -= b; }
  friend XScalar operator*(XScalar a, const XScalar& b) { return a *= b; }
  friend XScalar operator/(XScalar a, const XScalar& b) { return a /= b; }

  friend bool operator==(const XScalar& a, const XScalar& b);
  friend std::strong_ordering operator<=>(const XScalar& a, const XScalar& b);

 private:
  int sign_ = 0;
  double logmag_ = 0.0;
};

XScalar abs(const XScalar& x);
XScalar exp(const XScalar& x);
XScalar log(const XScalar& x);
XScalar sqrt(const XScalar& x);
XScalar sin(const XScalar& x);
XScalar cos(const XScalar& x);
XScalar asinh(const XScalar& x);
XScalar pow(const XScalar& base, const XScalar& exponent);
XScalar pow_int(const XScalar& base, long n);

// Decimal scientific rendering that survives any magnitude, e.g. "-3.2e-4312".
std::string to_string(const XScalar& x, int digits = 10);

// max_i |v_i| times sqrt(sum (v_i / max)^2); never overflows or underflows.
XScalar norm(std::span<const XScalar> v);
double norm(std::span<const double> v);

}  // namespace stratcheck
