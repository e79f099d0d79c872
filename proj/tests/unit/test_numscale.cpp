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

#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "stratcheck/numscale.hpp"

using stratcheck::XScalar;

namespace {

double rel_err(double got, double want) { return std::fabs(got - want) / std::max(1e-300, std::fabs(want)); }

}  // namespace

TEST_CASE("double round trip and signs") {
  for (double v : {0.0, 1.0, -1.0, 3.5, -2.25e-300, 1.7e308, 4.9e-324}) {
    XScalar x(v);
    CHECK(x.to_double() == doctest::Approx(v).epsilon(1e-13));
    CHECK(x.sign() == (v > 0) - (v < 0));
  }
  CHECK(XScalar(0.0).is_zero());
  CHECK_THROWS(XScalar(std::numeric_limits<double>::quiet_NaN()));
}

TEST_CASE("field operations agree with double on random operands") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> mant(-10.0, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const double a = mant(rng), b = mant(rng);
    if (b == 0.0) continue;
    CHECK(rel_err((XScalar(a) * XScalar(b)).to_double(), a * b) < 1e-13);
    CHECK(rel_err((XScalar(a) / XScalar(b)).to_double(), a / b) < 1e-13);
    const double sum = a + b;
    CHECK(std::fabs((XScalar(a) + XScalar(b)).to_double() - sum) < 1e-13 * (std::fabs(a) + std::fabs(b)));
    CHECK(std::fabs((XScalar(a) - XScalar(b)).to_double() - (a - b)) < 1e-13 * (std::fabs(a) + std::fabs(b)));
  }
}

TEST_CASE("algebraic identities far outside the double range") {
  const XScalar tiny = stratcheck::exp(XScalar(-1e7));
  CHECK(tiny.sign() == 1);
  CHECK(tiny.logmag() == doctest::Approx(-1e7));
  CHECK(tiny.to_double() == 0.0);
  CHECK_FALSE(tiny.fits_double());
  CHECK((tiny * stratcheck::exp(XScalar(1e7))).to_double() == doctest::Approx(1.0).epsilon(1e-9));
  CHECK((tiny - tiny).is_zero());
  CHECK((tiny + tiny).logmag() == doctest::Approx(-1e7 + std::log(2.0)));
  CHECK((XScalar(1.0) + tiny).to_double() == 1.0);
  CHECK(stratcheck::log(tiny).to_double() == doctest::Approx(-1e7));
  CHECK(stratcheck::sqrt(tiny).logmag() == doctest::Approx(-5e6));
  CHECK(stratcheck::pow(tiny, XScalar(0.5)).logmag() == doctest::Approx(-5e6));
  CHECK(stratcheck::pow_int(tiny, -3).logmag() == doctest::Approx(3e7));
  CHECK(stratcheck::pow_int(XScalar(-2.0), 3).to_double() == doctest::Approx(-8.0));
  CHECK(stratcheck::asinh(tiny).logmag() == doctest::Approx(-1e7));
  CHECK(stratcheck::sin(tiny).logmag() == doctest::Approx(-1e7));
  CHECK(stratcheck::cos(tiny).to_double() == 1.0);
}

TEST_CASE("ordering is total and consistent with magnitudes") {
  const XScalar a = XScalar::from_log(1, -1e9);
  const XScalar b = XScalar::from_log(1, -1e8);
  const XScalar c = XScalar::from_log(-1, -1e8);
  CHECK(a < b);
  CHECK(c < a);
  CHECK(c < XScalar::zero());
  CHECK(XScalar::zero() < a);
  CHECK(stratcheck::abs(c) == b);
  CHECK(-c == b);
}

TEST_CASE("decimal rendering of extreme magnitudes") {
  CHECK(stratcheck::to_string(XScalar(0.0)) == "0");
  CHECK(stratcheck::to_string(XScalar(-2.5), 3) == "-2.5");
  // exp(-1e7) = 10^(-4342944.819...) = 1.517e-4342945
  CHECK(stratcheck::to_string(stratcheck::exp(XScalar(-1e7)), 4) == "1.517e-4342945");
}

TEST_CASE("norm neither overflows nor underflows") {
  const std::array<XScalar, 2> big = {XScalar::from_log(1, 1e6), XScalar::from_log(-1, 1e6)};
  CHECK(stratcheck::norm(std::span<const XScalar>(big)).logmag() == doctest::Approx(1e6 + 0.5 * std::log(2.0)));
  const std::array<double, 3> small = {3e-200, 4e-200, 0.0};
  CHECK(stratcheck::norm(std::span<const double>(small)) == doctest::Approx(5e-200));
  const std::array<double, 2> large = {3e200, 4e200};
  CHECK(stratcheck::norm(std::span<const double>(large)) == doctest::Approx(5e200));
}

TEST_CASE("ln of a negative number is a domain error") {
  CHECK_THROWS(stratcheck::log(XScalar(-1.0)));
  CHECK_THROWS(stratcheck::log(XScalar(0.0)));
  CHECK_THROWS(XScalar(1.0) / XScalar(0.0));
}
