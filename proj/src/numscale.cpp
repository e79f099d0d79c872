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

#include "stratcheck/numscale.hpp"

#include <algorithm>
#include <cfloat>
#include <cmath>
#include <cstdio>
#include <utility>

#include "stratcheck/error.hpp"

namespace stratcheck {

namespace {

constexpr double kCancellation = 1e-14;
const double kLogDblMax = std::log(DBL_MAX);
const double kLogDblMin = std::log(DBL_MIN);

}  // namespace

XScalar::XScalar(double v) {
  if (!std::isfinite(v)) throw DomainError("non-finite value converted to XScalar");
  if (v == 0.0) return;
  sign_ = v > 0 ? 1 : -1;
  logmag_ = std::log(std::fabs(v));
}

XScalar XScalar::from_log(int sign, double logmag) {
  if (sign < -1 || sign > 1) throw DomainError("XScalar sign must be -1, 0 or +1");
  XScalar r;
  if (sign == 0) return r;
  if (std::isnan(logmag) || logmag == HUGE_VAL) throw DomainError("XScalar log-magnitude overflow");
  if (logmag == -HUGE_VAL) return r;
  r.sign_ = sign;
  r.logmag_ = logmag;
  return r;
}

double XScalar::to_double() const {
  if (sign_ == 0) return 0.0;
  return sign_ * std::exp(logmag_);
}

bool XScalar::fits_double() const {
  return sign_ == 0 || (logmag_ < kLogDblMax && logmag_ > kLogDblMin);
}

XScalar XScalar::operator-() const {
  XScalar r = *this;
  r.sign_ = -r.sign_;
  return r;
}

XScalar& XScalar::operator+=(const XScalar& o) {
  if (o.sign_ == 0) return *this;
  if (sign_ == 0) return *this = o;
  // Canonical operand order keeps addition bit-exactly commutative.
  XScalar hi = *this;
  XScalar lo = o;
  if (lo.logmag_ > hi.logmag_ || (lo.logmag_ == hi.logmag_ && lo.sign_ > hi.sign_)) std::swap(hi, lo);
  const double d = lo.logmag_ - hi.logmag_;
  if (hi.sign_ == lo.sign_) {
    logmag_ = hi.logmag_ + std::log1p(std::exp(d));
    sign_ = hi.sign_;
    return *this;
  }
  const double rel = -std::expm1(d);
  if (rel < kCancellation) return *this = XScalar{};
  logmag_ = hi.logmag_ + std::log(rel);
  sign_ = hi.sign_;
  return *this;
}

XScalar& XScalar::operator-=(const XScalar& o) { return *this += -o; }

XScalar& XScalar::operator*=(const XScalar& o) {
  if (sign_ == 0 || o.sign_ == 0) return *this = XScalar{};
  sign_ *= o.sign_;
  logmag_ += o.logmag_;
  return *this;
}

XScalar& XScalar::operator/=(const XScalar& o) {
  if (o.sign_ == 0) throw DomainError("division by zero");
  if (sign_ == 0) return *this;
  sign_ *= o.sign_;
  logmag_ -= o.logmag_;
  return *this;
}

bool operator==(const XScalar& a, const XScalar& b) {
  if (a.sign_ != b.sign_) return false;
  return a.sign_ == 0 || a.logmag_ == b.logmag_;
}

std::strong_ordering operator<=>(const XScalar& a, const XScalar& b) {
  if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
  if (a.sign_ == 0 || a.logmag_ == b.logmag_) return std::strong_ordering::equal;
  const bool larger_mag = a.logmag_ > b.logmag_;
  if (a.sign_ > 0) return larger_mag ? std::strong_ordering::greater : std::strong_ordering::less;
  return larger_mag ? std::strong_ordering::less : std::strong_ordering::greater;
}

XScalar abs(const XScalar& x) { return x.sign() < 0 ? -x : x; }

XScalar exp(const XScalar& x) {
  if (x.is_zero()) return XScalar{1.0};
  const double v = x.to_double();
  if (!std::isfinite(v)) throw DomainError("exp argument outside the representable exponent range");
  return XScalar::from_log(1, v);
}

XScalar log(const XScalar& x) {
  if (x.sign() <= 0) throw DomainError("ln of a nonpositive value");
  return XScalar{x.logmag()};
}

XScalar sqrt(const XScalar& x) {
  if (x.sign() < 0) throw DomainError("sqrt of a negative value");
  if (x.is_zero()) return x;
  return XScalar::from_log(1, 0.5 * x.logmag());
}

XScalar sin(const XScalar& x) {
  if (x.is_zero()) return x;
  // sin(x) = x (1 - x^2/6 + ...) is exact to double precision here.
  if (x.logmag() < -20.0) return x;
  if (!x.fits_double()) throw DomainError("sin of an argument beyond the double range");
  return XScalar{std::sin(x.to_double())};
}

XScalar cos(const XScalar& x) {
  if (x.is_zero() || x.logmag() < -40.0) return XScalar{1.0};
  if (!x.fits_double()) throw DomainError("cos of an argument beyond the double range");
  return XScalar{std::cos(x.to_double())};
}

XScalar asinh(const XScalar& x) {
  if (x.is_zero()) return x;
  if (x.logmag() < -20.0) return x;
  if (x.logmag() > 20.0) {
    // asinh(w) = sign(w) (ln 2|w| + 1/(4 w^2) + ...).
    return XScalar{x.sign() * (x.logmag() + std::log(2.0))};
  }
  return XScalar{std::asinh(x.to_double())};
}

XScalar pow_int(const XScalar& base, long n) {
  if (n == 0) return XScalar{1.0};
  if (base.is_zero()) {
    if (n < 0) throw DomainError("division by zero in negative power of zero");
    return base;
  }
  const int sign = (base.sign() < 0 && (n % 2 != 0)) ? -1 : 1;
  return XScalar::from_log(sign, static_cast<double>(n) * base.logmag());
}

XScalar pow(const XScalar& base, const XScalar& exponent) {
  if (exponent.fits_double()) {
    const double e = exponent.to_double();
    if (e == std::trunc(e) && std::fabs(e) < 9.0e15) return pow_int(base, static_cast<long>(e));
  }
  if (base.sign() <= 0) throw DomainError("non-integer power of a nonpositive base");
  return exp(exponent * log(base));
}

std::string to_string(const XScalar& x, int digits) {
  char buf[64];
  if (x.is_zero()) return "0";
  if (x.fits_double()) {
    std::snprintf(buf, sizeof buf, "%.*g", digits, x.to_double());
    return buf;
  }
  const double log10mag = x.logmag() / std::log(10.0);
  double exponent = std::floor(log10mag);
  double mantissa = std::pow(10.0, log10mag - exponent);
  if (mantissa >= 10.0) {
    mantissa /= 10.0;
    exponent += 1.0;
  }
  std::snprintf(buf, sizeof buf, "%s%.*fe%.0f", x.sign() < 0 ? "-" : "", digits - 1, mantissa, exponent);
  return buf;
}

XScalar norm(std::span<const XScalar> v) {
  XScalar m;
  for (const auto& c : v) m = std::max(m, abs(c));
  if (m.is_zero()) return m;
  double s = 0.0;
  for (const auto& c : v) {
    const double r = (c / m).to_double();
    s += r * r;
  }
  return m * XScalar{std::sqrt(s)};
}

double norm(std::span<const double> v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::fabs(c));
  if (m == 0.0) return 0.0;
  double s = 0.0;
  for (double c : v) {
    const double r = c / m;
    s += r * r;
  }
  return m * std::sqrt(s);
}

}  // namespace stratcheck
