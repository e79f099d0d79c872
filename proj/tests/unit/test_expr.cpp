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

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "stratcheck/error.hpp"
#include "stratcheck/expr.hpp"

using namespace stratcheck;

namespace {

const char* kG = "exp((x^2 + 1)*ln(z))";
const char* kF = "-z*asinh(x/z)/ln(z)";

// Central differences with one Richardson step.
std::vector<double> finite_gradient(const Expr& e, std::map<std::string, double> p) {
  std::vector<double> g;
  for (const auto& v : e.free_vars()) {
    const double x = p[v];
    const double h = 1e-4 * std::max(std::fabs(x), 1e-2);
    auto central = [&](double step) {
      auto q = p;
      q[v] = x + step;
      const double up = eval_jet(e, q).value;
      q[v] = x - step;
      const double down = eval_jet(e, q).value;
      return (up - down) / (2 * step);
    };
    g.push_back((4 * central(h / 2) - central(h)) / 3);
  }
  return g;
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

void check_ad_matches_fd(const std::string& text, const std::map<std::string, double>& p) {
  const Expr e = Expr::parse(text);
  const auto ad = eval_jet(e, p).gradient;
  const auto fd = finite_gradient(e, p);
  REQUIRE(ad.size() == fd.size());
  double err = 0.0;
  for (std::size_t i = 0; i < ad.size(); ++i) err = std::max(err, std::fabs(ad[i] - fd[i]));
  INFO(text);
  CHECK(err <= 1e-6 * max_abs(ad));
}

}  // namespace

TEST_CASE("parser builds children-first nodes and sorted free variables") {
  const Expr e = Expr::parse(kG);
  CHECK(e.free_vars() == std::vector<std::string>{"x", "z"});
  for (int i = 0; i <= e.root(); ++i) {
    const Node& n = e.nodes()[static_cast<std::size_t>(i)];
    CHECK(n.lhs < i);
    CHECK(n.rhs < i);
  }
  CHECK(Expr::parse(print(e)).structurally_equal(e));
  CHECK(Expr::parse("2^3^2").nodes().back().folded == 512.0);
  CHECK(Expr::parse("-x^2").nodes().back().op == Op::Neg);
}

TEST_CASE("parse errors carry the byte offset") {
  auto offset_of = [](const char* text) {
    try {
      Expr::parse(text);
    } catch (const ParseError& e) {
      return static_cast<long>(e.offset());
    }
    return -1L;
  };
  CHECK(offset_of("x + ") == 4);
  CHECK(offset_of("x * )") == 4);
  CHECK(offset_of("foo(x)") == 0);
  CHECK(offset_of("(x + 1") == 6);
  CHECK(offset_of("x y") == 2);
  CHECK(offset_of("") == 0);
}

TEST_CASE("forward-mode gradients match finite differences on smooth points") {
  const std::vector<std::map<std::string, double>> points = {
      {{"x", 0.3}, {"z", 0.2}}, {{"x", -0.7}, {"z", 0.05}}, {{"x", 0.9}, {"z", 0.45}}, {{"x", -0.1}, {"z", 0.3}}};
  for (const auto& p : points) {
    check_ad_matches_fd(kG, p);
    check_ad_matches_fd(kF, p);
    check_ad_matches_fd("(1 + x^2)*z^1.5", p);
    check_ad_matches_fd("sin(x)*exp(z) + sqrt(x^2 + z^2 + 1) - abs(x - 2)/z", p);
    check_ad_matches_fd("ln(z)^2*x^3 - asinh(3*x*z)", p);
  }
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(-0.9, 0.9), uz(0.01, 0.49);
  for (int i = 0; i < 50; ++i) {
    const std::map<std::string, double> p = {{"x", ux(rng)}, {"z", uz(rng)}};
    check_ad_matches_fd(kG, p);
    check_ad_matches_fd(kF, p);
  }
}

TEST_CASE("extended-range evaluation agrees with double where both apply") {
  const Expr e = Expr::parse(kF);
  const std::map<std::string, double> pd = {{"x", 0.4}, {"z", 0.1}};
  const std::map<std::string, XScalar> px = {{"x", XScalar(0.4)}, {"z", XScalar(0.1)}};
  const auto jd = eval_jet(e, pd);
  const auto jx = eval_jet(e, px);
  CHECK(jx.value.to_double() == doctest::Approx(jd.value).epsilon(1e-13));
  for (std::size_t i = 0; i < jd.gradient.size(); ++i)
    CHECK(jx.gradient[i].to_double() == doctest::Approx(jd.gradient[i]).epsilon(1e-12));
}

TEST_CASE("extended range reaches values that underflow in double") {
  const Expr g = Expr::parse(kG);
  const std::map<std::string, XScalar> p = {{"x", XScalar(0.01)}, {"z", XScalar::from_log(1, -1e6)}};
  const auto j = eval_jet(g, p);
  CHECK(j.value.logmag() == doctest::Approx(-1e6 * (1 + 1e-4)));
  // dg/dz = (x^2 + 1) g / z
  CHECK(j.gradient[1].logmag() == doctest::Approx(std::log(1 + 1e-4) - 1e6 * 1e-4));
}

TEST_CASE("the asinh form of f agrees with the logarithmic form where that is well conditioned") {
  const Expr a = Expr::parse(kF);
  const Expr b = Expr::parse("-z*ln(x/z + sqrt(x^2/z^2 + 1))/ln(z)");
  for (double x : {0.05, 0.3, 0.8})
    for (double z : {0.01, 0.2, 0.4}) {
      const std::map<std::string, double> p = {{"x", x}, {"z", z}};
      CHECK(eval_jet(a, p).value == doctest::Approx(eval_jet(b, p).value).epsilon(1e-12));
    }
  // Large x/z: the derivative of asinh stays finite.
  const std::map<std::string, XScalar> deep = {{"x", XScalar(-0.5)}, {"z", XScalar::from_log(1, -2000)}};
  const auto j = eval_jet(a, deep);
  CHECK(j.value.sign() != 0);
  for (const auto& d : j.gradient) CHECK(std::isfinite(d.logmag()));
}

TEST_CASE("domain errors name the failing node") {
  const Expr e = Expr::parse("x + ln(z - 1)");
  try {
    eval_jet(e, std::map<std::string, double>{{"x", 0.0}, {"z", 0.5}});
    FAIL("expected a domain error");
  } catch (const DomainError& err) {
    CHECK(err.node() >= 0);
    CHECK(std::string(err.what()).find("ln") != std::string::npos);
  }
}

TEST_CASE("slot-ordered evaluator indexes gradients by slot") {
  const Expr e = Expr::parse("x*z^2");
  const std::vector<std::string> slots = {"z", "y", "x"};
  JetEvaluator<double> ev(e, slots);
  const std::vector<double> p = {3.0, 100.0, 2.0};
  const auto j = ev.jet(p);
  CHECK(j.value == 18.0);
  CHECK(j.gradient[0] == 12.0);
  CHECK(j.gradient[1] == 0.0);
  CHECK(j.gradient[2] == 9.0);
  const std::vector<std::string> missing = {"x"};
  CHECK_THROWS(JetEvaluator<double>(e, missing));
}
