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
#include <string>
#include <vector>

#include "stratcheck/error.hpp"
#include "stratcheck/regularity.hpp"

using namespace stratcheck;

namespace {

struct Fixture {
  StratifiedSet set;
  Vec<double> x0;
  PairAtPoint pair;
  std::vector<SampledCurve> curves;

  explicit Fixture(const std::string& name, Vec<double> base = {0.0, 0.0, 0.0})
      : set(catalog(name)), x0(std::move(base)), pair(set, set.pairs.front().first, set.pairs.front().second, x0) {
    const FamilyConfig cfg;
    const auto fam = standard_family(set, pair.y(), pair.x(), x0, cfg);
    curves = sample_family(pair, fam, cfg.grid);
  }

  Verdict verdict(const char* c) const { return check_condition(pair, Condition::parse(c), curves, Tolerances{}); }
};

}  // namespace

TEST_CASE("alpha and beta lie in [0, 1] and the Kuo ratio dominates alpha") {
  for (const char* name : {"Sg", "Sf", "cusp_demo", "halfplane"}) {
    const Fixture f(name);
    for (const auto& c : f.curves)
      for (const auto& s : c.samples) {
        const double a = alpha(f.pair, s).to_double();
        const double b = beta(f.pair, s).to_double();
        CHECK(a >= 0.0);
        CHECK(a <= 1.0 + 1e-12);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0 + 1e-12);
        CHECK(kuo_ratio(f.pair, s) >= alpha(f.pair, s) * XScalar(1 - 1e-12));
      }
  }
}

TEST_CASE("r^e at e = 0 equals the (w) quotient at x = pi(y)") {
  const Fixture f("Sg");
  for (const auto& c : f.curves)
    for (const auto& s : c.samples) {
      const XScalar re = re_quantity(f.pair, 0.0, s);
      const XScalar w = verdier_quotient(f.pair, s, f.pair.project_rel(s.rel));
      if (re.is_zero() || w.is_zero()) {
        CHECK(re.is_zero() == w.is_zero());
        continue;
      }
      CHECK(std::fabs(re.logmag() - w.logmag()) < 1e-12 * std::max(1.0, std::fabs(w.logmag())));
    }
}

TEST_CASE("secant directions are unit vectors orthogonal to X") {
  const Fixture f("Sf");
  for (const auto& c : f.curves)
    for (const auto& s : c.samples) {
      const auto d = secant_direction(f.pair, s);
      CHECK(norm(std::span<const XScalar>(d)).to_double() == doctest::Approx(1.0));
      CHECK(d[0].is_zero());
    }
}

TEST_CASE("conditions parse and print") {
  CHECK(Condition::parse("re(0.5)").e == 0.5);
  CHECK(Condition::parse("re(0.5)").name() == "re(0.5)");
  CHECK(Condition::parse("bpi").kind == Condition::Kind::Bpi);
  CHECK_THROWS_AS(Condition::parse("re(1)"), InputError);
  CHECK_THROWS_AS(Condition::parse("q"), InputError);
}

TEST_CASE("S_g verdicts: (a), (b) hold, (r) fails with a flat witness") {
  const Fixture f("Sg");
  CHECK(f.verdict("a").outcome == Outcome::HoldsOnFamily);
  CHECK(f.verdict("bpi").outcome == Outcome::HoldsOnFamily);
  CHECK(f.verdict("b").outcome == Outcome::HoldsOnFamily);
  const Verdict r = f.verdict("r");
  CHECK(r.outcome == Outcome::Fails);
  REQUIRE(r.witness);
  CHECK(r.witness->kind == CurveKind::Flat);
  CHECK(f.verdict("w").outcome == Outcome::Fails);
}

TEST_CASE("the z^3 control satisfies every condition") {
  const Fixture f("z3_control");
  for (const char* c : {"a", "bpi", "b", "r", "w", "re(0.5)"}) {
    INFO(c);
    CHECK(f.verdict(c).outcome == Outcome::HoldsOnFamily);
  }
}

TEST_CASE("verdict aggregation is monotone in the family") {
  const Fixture f("Sg");
  for (const char* c : {"r", "w", "a"}) {
    const Verdict full = f.verdict(c);
    for (std::size_t cut = 1; cut < f.curves.size(); cut += 7) {
      const std::span<const SampledCurve> part(f.curves.data(), cut);
      const Verdict v = check_condition(f.pair, Condition::parse(c), part, Tolerances{});
      // Failing on a subfamily implies failing on the family; holding on the
      // family implies holding on every subfamily.
      if (v.outcome == Outcome::Fails) CHECK(full.outcome == Outcome::Fails);
      if (full.outcome == Outcome::HoldsOnFamily) CHECK(v.outcome == Outcome::HoldsOnFamily);
    }
  }
}

TEST_CASE("every FAILS verdict names a witness with a limit") {
  for (const char* name : {"Sg", "Sf"}) {
    const Fixture f(name);
    for (const char* c : {"a", "b", "r", "w", "re(0.5)"}) {
      const Verdict v = f.verdict(c);
      if (v.outcome != Outcome::Fails) continue;
      REQUIRE(v.witness);
      CHECK_FALSE(v.witness->label.empty());
      CHECK_FALSE(v.witness->conforming);
    }
  }
}

TEST_CASE("basepoints off X are input errors") {
  const StratifiedSet s = catalog("Sg");
  const Vec<double> off = {0.0, 0.1, 0.0};
  CHECK_THROWS_AS(PairAtPoint(s, "W", "X", off), InputError);
  const Vec<double> wrong = {0.0, 0.0};
  CHECK_THROWS_AS(PairAtPoint(s, "W", "X", wrong), InputError);
}

TEST_CASE("r(t) integral: diverging for S_g, converging for z^3") {
  const Vec<double> x0 = {0.0, 0.0, 0.0};
  const StratifiedSet sg = catalog("Sg");
  const StratifiedSet z3 = catalog("z3_control");
  const auto eps = default_eps_grid();
  const auto rg = rint_check(PairAtPoint(sg, "W", "X", x0), eps);
  const auto rz = rint_check(PairAtPoint(z3, "Y", "X", x0), eps);
  CHECK(rg.cls == RintClass::Diverging);
  CHECK(rz.cls == RintClass::Converging);
  for (std::size_t i = 1; i < rg.partials.size(); ++i) CHECK(rg.partials[i] >= rg.partials[i - 1]);
}

TEST_CASE("slices of S_g at a = 0.5 follow z = exp(ln a / x^2)") {
  const StratifiedSet s = catalog("Sg");
  const Vec<double> x0 = {0.0, 0.0, 0.0};
  const PairAtPoint p(s, "W", "X", x0);
  const auto sp = slice_pair(p, 0.5);
  REQUIRE(!sp.branches.empty());
  for (const auto& b : sp.branches)
    for (const auto& smp : b.samples) {
      const double x = smp.params[0].to_double();
      const double lz = smp.params[1].logmag();
      const double want = std::log(0.5) / (x * x);
      CHECK(std::fabs(lz - want) <= 1e-9 * std::max(1.0, std::fabs(want)));
    }
  const StratifiedSet plane = catalog("plane_graph_zero");
  CHECK_THROWS_AS(slice_pair(PairAtPoint(plane, "Y", "X", x0), 0.5), GeometryError);
}
