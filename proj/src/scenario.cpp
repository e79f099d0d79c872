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

#include "stratcheck/scenario.hpp"

#include <algorithm>
#include <fstream>

#include "stratcheck/error.hpp"

namespace stratcheck {

using nlohmann::json;

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }
std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

const json& require(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) throw InputError(path.empty() ? "<root>" : path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw InputError(join(path, key), "missing required field '" + key + "'");
  return *it;
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) throw InputError(path, "expected a number");
  return j.get<double>();
}

std::string string(const json& j, const std::string& path) {
  if (!j.is_string()) throw InputError(path, "expected a string");
  return j.get<std::string>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], at(path, i)));
  return out;
}

std::vector<std::string> strings(const json& j, const std::string& path) {
  if (!j.is_array()) throw InputError(path, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(string(j[i], at(path, i)));
  return out;
}

std::uint64_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<long long>() <= 0) throw InputError(path, "expected a positive integer");
  return j.get<std::uint64_t>();
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::none_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; }))
      throw InputError(join(path, it.key()), "unknown field");
}

Interval interval(const json& j, const std::string& path) {
  Interval iv;
  if (j.is_array()) {
    if (j.size() != 2) throw InputError(path, "expected [lo, hi]");
    iv.lo = number(j[0], at(path, 0));
    iv.hi = number(j[1], at(path, 1));
  } else if (j.is_object()) {
    check_keys(j, {"lo", "hi", "lo_closed", "hi_closed"}, path);
    iv.lo = number(require(j, "lo", path), join(path, "lo"));
    iv.hi = number(require(j, "hi", path), join(path, "hi"));
    iv.lo_closed = j.value("lo_closed", false);
    iv.hi_closed = j.value("hi_closed", false);
  } else {
    throw InputError(path, "expected [lo, hi] or {lo, hi}");
  }
  if (!(iv.lo < iv.hi)) throw InputError(path, "empty interval");
  return iv;
}

std::vector<Box> domain(const json& j, const std::vector<std::string>& params, const std::string& path) {
  std::vector<Box> out;
  auto one = [&](const json& b, const std::string& p) {
    if (!b.is_object()) throw InputError(p, "expected an object mapping parameters to intervals");
    Box box;
    for (const auto& name : params) {
      auto it = b.find(name);
      if (it == b.end()) throw InputError(join(p, name), "missing interval for parameter '" + name + "'");
      box.ranges.push_back(interval(*it, join(p, name)));
    }
    for (auto it = b.begin(); it != b.end(); ++it)
      if (std::find(params.begin(), params.end(), it.key()) == params.end())
        throw InputError(join(p, it.key()), "not a parameter of the stratum");
    out.push_back(std::move(box));
  };
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) one(j[i], at(path, i));
  } else {
    one(j, path);
  }
  return out;
}

Stratum parse_stratum(const json& j, const std::string& path) {
  if (!j.is_object()) throw InputError(path, "expected a stratum object");
  const std::string name = string(require(j, "name", path), join(path, "name"));
  const std::string kind = string(require(j, "kind", path), join(path, "kind"));
  if (kind == "affine") {
    check_keys(j, {"name", "kind", "basis", "offset"}, path);
    std::vector<Vec<double>> basis;
    const json& b = require(j, "basis", path);
    if (!b.is_array()) throw InputError(join(path, "basis"), "expected an array of vectors");
    for (std::size_t i = 0; i < b.size(); ++i) basis.push_back(numbers(b[i], at(join(path, "basis"), i)));
    return make_affine(name, std::move(basis), numbers(require(j, "offset", path), join(path, "offset")));
  }
  const auto params = strings(require(j, "params", path), join(path, "params"));
  const auto layout_names = strings(require(j, "layout", path), join(path, "layout"));
  std::vector<Box> dom;
  if (j.contains("domain")) dom = domain(j["domain"], params, join(path, "domain"));
  GraphLayout layout;
  try {
    layout = layout_from_names(layout_names, params);
  } catch (const InputError& e) {
    throw InputError(join(path, "layout"), e.message());
  }
  try {
    if (kind == "graph") {
      check_keys(j, {"name", "kind", "expr", "params", "domain", "layout"}, path);
      return make_graph(name, string(require(j, "expr", path), join(path, "expr")), params, std::move(dom), layout);
    }
    if (kind == "region") {
      check_keys(j, {"name", "kind", "lower", "upper", "params", "domain", "layout"}, path);
      return make_region(name, string(require(j, "lower", path), join(path, "lower")),
                         string(require(j, "upper", path), join(path, "upper")), params, std::move(dom), layout);
    }
  } catch (const ParseError& e) {
    throw InputError(join(path, kind == "graph" ? "expr" : "lower/upper"), e.what());
  }
  throw InputError(join(path, "kind"), "expected 'graph', 'region' or 'affine'");
}

std::pair<std::string, std::string> pair(const json& j, const std::string& path) {
  const auto names = strings(j, path);
  if (names.size() != 2) throw InputError(path, "expected [Y, X]");
  return {names[0], names[1]};
}

}  // namespace

std::vector<std::string> default_conditions() {
  return {"a", "bpi", "b", "r", "w", "re(0.25)", "re(0.5)", "re(0.75)", "rint"};
}

std::vector<double> default_grid() { return {-0.3, -0.1, 0.0, 0.1, 0.3}; }

StratifiedSet parse_set(const json& j, const std::string& path) {
  if (j.is_string()) {
    try {
      return catalog(j.get<std::string>());
    } catch (const InputError& e) {
      throw InputError(path, e.message());
    }
  }
  if (!j.is_object()) throw InputError(path, "expected a catalog name or an inline set");
  check_keys(j, {"name", "ambient_dim", "strata", "pairs", "notes"}, path);
  StratifiedSet s;
  s.name = j.contains("name") ? string(j["name"], join(path, "name")) : "inline";
  s.ambient_dim = count(require(j, "ambient_dim", path), join(path, "ambient_dim"));
  const json& st = require(j, "strata", path);
  if (!st.is_array() || st.empty()) throw InputError(join(path, "strata"), "expected a nonempty array");
  for (std::size_t i = 0; i < st.size(); ++i) s.strata.push_back(parse_stratum(st[i], at(join(path, "strata"), i)));
  if (j.contains("pairs")) {
    const json& p = j["pairs"];
    if (!p.is_array()) throw InputError(join(path, "pairs"), "expected an array of [Y, X]");
    for (std::size_t i = 0; i < p.size(); ++i) s.pairs.push_back(pair(p[i], at(join(path, "pairs"), i)));
  }
  if (j.contains("notes")) s.notes = strings(j["notes"], join(path, "notes"));
  try {
    s.validate();
  } catch (const InputError& e) {
    throw InputError(e.path().empty() ? path : path + "." + e.path(), e.message());
  }
  return s;
}

Scenario parse_scenario(const json& doc, std::string name) {
  if (!doc.is_object()) throw InputError("<root>", "scenario must be a JSON object");
  check_keys(doc,
             {"name", "set", "pairs", "basepoints", "conditions", "family", "tolerances", "cones", "slices",
              "density", "expect", "threads"},
             "");
  Scenario sc;
  sc.name = doc.contains("name") ? string(doc["name"], "name") : std::move(name);
  sc.set = parse_set(require(doc, "set", ""), "set");
  const Stratum* x_axis = nullptr;

  if (doc.contains("pairs")) {
    const json& p = doc["pairs"];
    if (!p.is_array() || p.empty()) throw InputError("pairs", "expected a nonempty array of [Y, X]");
    for (std::size_t i = 0; i < p.size(); ++i) {
      auto pr = pair(p[i], at("pairs", i));
      if (std::find(sc.set.pairs.begin(), sc.set.pairs.end(), pr) == sc.set.pairs.end())
        throw InputError(at("pairs", i), "(" + pr.first + ", " + pr.second + ") is not a pair of the set");
      sc.pairs.push_back(std::move(pr));
    }
  } else {
    sc.pairs = sc.set.pairs;
  }
  if (!sc.pairs.empty()) x_axis = &sc.set.stratum(sc.pairs.front().second);

  if (doc.contains("basepoints")) {
    const json& b = doc["basepoints"];
    if (!b.is_array() || b.empty()) throw InputError("basepoints", "expected a nonempty array of points");
    for (std::size_t i = 0; i < b.size(); ++i) {
      auto p = numbers(b[i], at("basepoints", i));
      if (p.size() != sc.set.ambient_dim) throw InputError(at("basepoints", i), "wrong dimension");
      sc.basepoints.push_back(std::move(p));
    }
  } else if (x_axis && x_axis->kind() == StratumKind::Affine) {
    sc.basepoints.push_back(x_axis->affine().offset);
  }

  if (doc.contains("conditions")) {
    const auto conds = strings(doc["conditions"], "conditions");
    for (std::size_t i = 0; i < conds.size(); ++i) {
      const std::string& c = conds[i];
      if (c == "n") {
        sc.cones.n = true;
      } else if (c == "npf") {
        sc.cones.npf = true;
      } else if (c == "c1") {
        sc.cones.c1 = true;
      } else {
        try {
          Condition::parse(c);
        } catch (const InputError& e) {
          throw InputError(at("conditions", i), e.message());
        }
        sc.conditions.push_back(c);
      }
    }
  }

  if (doc.contains("family")) {
    const json& f = doc["family"];
    if (!f.is_object()) throw InputError("family", "expected an object");
    check_keys(f, {"rays", "powers", "flats", "sigmas", "vertical", "mirrored", "grid"}, "family");
    if (f.contains("rays")) sc.family.rays = numbers(f["rays"], "family.rays");
    if (f.contains("powers")) sc.family.powers = numbers(f["powers"], "family.powers");
    if (f.contains("sigmas")) sc.family.sigmas = numbers(f["sigmas"], "family.sigmas");
    if (f.contains("flats")) {
      const json& fl = f["flats"];
      if (!fl.is_object()) throw InputError("family.flats", "expected {C: [...], q: [...]}");
      check_keys(fl, {"C", "q"}, "family.flats");
      if (fl.contains("C")) sc.family.flat_c = numbers(fl["C"], "family.flats.C");
      if (fl.contains("q")) sc.family.flat_q = numbers(fl["q"], "family.flats.q");
    }
    if (f.contains("vertical")) sc.family.vertical = f["vertical"].get<bool>();
    if (f.contains("mirrored")) sc.family.mirrored = f["mirrored"].get<bool>();
    if (f.contains("grid")) {
      const json& g = f["grid"];
      check_keys(g, {"t0", "ratio", "count", "logmag_cap"}, "family.grid");
      if (g.contains("t0")) sc.family.grid.t0 = number(g["t0"], "family.grid.t0");
      if (g.contains("ratio")) sc.family.grid.ratio = number(g["ratio"], "family.grid.ratio");
      if (g.contains("count")) sc.family.grid.count = static_cast<int>(count(g["count"], "family.grid.count"));
      if (g.contains("logmag_cap")) sc.family.grid.logmag_cap = number(g["logmag_cap"], "family.grid.logmag_cap");
    }
  }

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) throw InputError("tolerances", "expected an object");
    check_keys(t, {"converged", "bounded", "diverging"}, "tolerances");
    if (t.contains("converged")) sc.tolerances.converged = number(t["converged"], "tolerances.converged");
    if (t.contains("bounded")) sc.tolerances.bounded = number(t["bounded"], "tolerances.bounded");
    if (t.contains("diverging")) sc.tolerances.diverging = number(t["diverging"], "tolerances.diverging");
  }

  sc.cones.grid = default_grid();
  if (doc.contains("cones")) {
    const json& c = doc["cones"];
    if (!c.is_object()) throw InputError("cones", "expected an object");
    check_keys(c, {"grid"}, "cones");
    if (c.contains("grid")) sc.cones.grid = numbers(c["grid"], "cones.grid");
  }

  if (doc.contains("slices")) sc.slices = numbers(doc["slices"], "slices");

  if (doc.contains("density")) {
    const json& d = doc["density"];
    if (!d.is_object()) throw InputError("density", "expected an object");
    check_keys(d, {"stratum", "grid", "u_grid", "N", "seed"}, "density");
    sc.density.enabled = true;
    if (d.contains("stratum")) {
      sc.density.stratum = string(d["stratum"], "density.stratum");
      try {
        sc.set.stratum(sc.density.stratum);
      } catch (const InputError& e) {
        throw InputError("density.stratum", e.message());
      }
    }
    sc.density.grid = d.contains("grid") ? numbers(d["grid"], "density.grid") : std::vector<double>{0.0};
    sc.density.u_grid = d.contains("u_grid") ? numbers(d["u_grid"], "density.u_grid") : default_u_grid();
    if (sc.density.u_grid.size() < 5) throw InputError("density.u_grid", "needs at least 5 radii");
    if (d.contains("N")) sc.density.mc.samples = count(d["N"], "density.N");
    if (d.contains("seed")) {
      if (!d["seed"].is_number_unsigned()) throw InputError("density.seed", "expected a non-negative integer");
      sc.density.mc.seed = d["seed"].get<std::uint64_t>();
    }
  }

  if (doc.contains("expect")) {
    const json& e = doc["expect"];
    if (!e.is_object()) throw InputError("expect", "expected an object mapping check names to outcomes");
    for (auto it = e.begin(); it != e.end(); ++it) {
      const json& v = it.value();
      const bool ok = v.is_string() || v.is_boolean() ||
                      (v.is_array() && !v.empty() && std::all_of(v.begin(), v.end(), [](const json& x) {
                         return x.is_number();
                       }));
      if (!ok) throw InputError("expect." + it.key(), "expected an outcome string, a boolean or [value, tol]");
      sc.expect.emplace_back(it.key(), v);
    }
  }

  if (doc.contains("threads")) sc.threads = static_cast<int>(count(doc["threads"], "threads"));
  if ((sc.cones.n || sc.cones.npf || sc.cones.c1 || !sc.conditions.empty() || !sc.slices.empty()) &&
      sc.pairs.empty())
    throw InputError("pairs", "the set declares no pairs to check");
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(path.string(), "cannot open scenario file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(doc, path.stem().string());
}

Scenario default_scenario(const std::string& set_name) {
  json doc;
  doc["set"] = set_name;
  Scenario sc = parse_scenario(doc, set_name);
  sc.conditions = default_conditions();
  sc.cones.n = sc.cones.npf = sc.cones.c1 = !sc.pairs.empty();
  sc.density.enabled = true;
  sc.density.grid = {0.0};
  sc.density.u_grid = default_u_grid();
  return sc;
}

}  // namespace stratcheck
