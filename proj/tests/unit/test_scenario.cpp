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

#include <sstream>
#include <string>

#include <json.hpp>

#include "stratcheck/error.hpp"
#include "stratcheck/report.hpp"
#include "stratcheck/scenario.hpp"

using namespace stratcheck;
using nlohmann::json;

namespace {

std::string error_path(const json& doc) {
  try {
    parse_scenario(doc);
  } catch (const InputError& e) {
    return e.path();
  }
  return "<none>";
}

}  // namespace

TEST_CASE("schema violations name the offending field") {
  CHECK(error_path(json::parse(R"({"conditions": ["a"]})")) == "set");
  CHECK(error_path(json::parse(R"({"set": "Sg", "colour": 1})")) == "colour");
  CHECK(error_path(json::parse(R"({"set": "Sg", "conditions": ["a", "zz"]})")) == "conditions[1]");
  CHECK(error_path(json::parse(R"({"set": "Sg", "family": {"flats": {"D": [1]}}})")) == "family.flats.D");
  CHECK(error_path(json::parse(R"({"set": "Sg", "basepoints": [[0, 0]]})")) == "basepoints[0]");
  CHECK(error_path(json::parse(R"({"set": "Sg", "density": {"u_grid": [0.1, 0.01]}})")) == "density.u_grid");
  CHECK(error_path(json::parse(R"({"set": "Sg", "expect": {"r": {"x": 1}}})")) == "expect.r");
  CHECK(error_path(json::parse(R"({"set": "Sg", "pairs": [["X", "W"]]})")) == "pairs[0]");
  CHECK(error_path(json::parse(R"({"set": "nowhere"})")) == "set");
}

TEST_CASE("inline sets parse into graphs with domains") {
  const json doc = json::parse(R"({
    "set": {
      "name": "cubic",
      "ambient_dim": 3,
      "strata": [
        {"name": "Y", "kind": "graph", "expr": "z^3", "params": ["x", "z"],
         "domain": {"x": [-1, 1], "z": [0, 0.5]}, "layout": ["x", "h", "z"]},
        {"name": "X", "kind": "affine", "basis": [[1, 0, 0]], "offset": [0, 0, 0]}
      ],
      "pairs": [["Y", "X"]]
    },
    "conditions": ["a", "r"],
    "expect": {"r": "HOLDS"}
  })");
  const Scenario sc = parse_scenario(doc);
  CHECK(sc.set.name == "cubic");
  CHECK(sc.pairs.size() == 1);
  CHECK(sc.basepoints.size() == 1);
  const Report r = run_scenario(sc);
  CHECK(r.expectations.size() == 1);
  CHECK(r.expectations_failed() == 0);
  REQUIRE(r.find("a"));
  CHECK(r.find("a")->outcome == "HOLDS_ON_FAMILY");
}

TEST_CASE("inline expression errors are reported on their path") {
  const json doc = json::parse(R"({
    "set": {"name": "bad", "ambient_dim": 3,
            "strata": [{"name": "Y", "kind": "graph", "expr": "z^", "params": ["x", "z"],
                        "domain": {"x": [-1, 1], "z": [0, 1]}, "layout": ["x", "h", "z"]}]}
  })");
  CHECK_THROWS_AS(parse_scenario(doc), Error);
}

TEST_CASE("expectations must name checks of the run") {
  const Scenario sc = parse_scenario(json::parse(R"({"set": "z3_control", "conditions": ["a"], "expect": {"zzz": "FAILS"}})"));
  try {
    run_scenario(sc);
    FAIL("expected an input error");
  } catch (const InputError& e) {
    CHECK(e.path() == "expect.zzz");
  }
}

TEST_CASE("expectation summary counts every entry") {
  const Scenario sc = parse_scenario(json::parse(
      R"({"set": "z3_control", "conditions": ["a", "b", "w"], "expect": {"a": "HOLDS", "b": "FAILS", "w": "HOLDS_ON_FAMILY"}})"));
  const Report r = run_scenario(sc);
  CHECK(r.expectations.size() == 3);
  CHECK(r.expectations_failed() == 1);
  std::ostringstream md;
  write_markdown(md, r);
  CHECK(md.str().find("2 of 3 expectations met") != std::string::npos);
  const auto j = to_json(r);
  CHECK(j["expectations"]["total"] == 3);
  CHECK(j["expectations"]["failed"] == 1);
}

TEST_CASE("CSV cells are quoted when needed") {
  Table t{"t", {"a", "b"}, {{"x,y", "say \"hi\""}, {"1", "2"}}};
  std::ostringstream out;
  write_csv(out, t);
  CHECK(out.str() == "a,b\n\"x,y\",\"say \"\"hi\"\"\"\n1,2\n");
  CHECK(fmt(0.1) == "0.1");
  CHECK(fmt(1.0 / 3) == "0.3333333333");
}

TEST_CASE("default scenarios enable every check") {
  const Scenario sc = default_scenario("Sg");
  CHECK(sc.cones.n);
  CHECK(sc.cones.npf);
  CHECK(sc.density.enabled);
  CHECK(sc.conditions == default_conditions());
}
