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

#include "stratcheck/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

#include "stratcheck/error.hpp"
#include "stratcheck/parallel.hpp"

namespace stratcheck {

using nlohmann::ordered_json;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

namespace {

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string point_text(const Vec<double>& p) {
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + short_num(p[i]);
  return s;
}

std::string pair_text(const std::pair<std::string, std::string>& pr) { return pr.first + "," + pr.second; }

std::string dims_text(const std::vector<int>& d) {
  std::string s = "(";
  for (std::size_t i = 0; i < d.size(); ++i) s += (i ? "," : "") + std::to_string(d[i]);
  return s + ")";
}

std::string direction_text(const Vec<double>& d) {
  std::string s = "(";
  for (std::size_t i = 0; i < d.size(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", d[i]);
    s += (i ? ", " : "") + std::string(buf);
  }
  return s + ")";
}

class Runner {
 public:
  Runner(const Scenario& sc, Report& r) : sc_(sc), r_(r), threads_(resolve_threads(sc.threads)) {
    limits_ = {"limits", {"pair", "basepoint", "check", "curve", "class", "value", "samples", "conforming"}, {}};
    fibers_ = {"fibers", {"pair", "basepoint", "source", "curve", "branch", "direction", "class"}, {}};
    rprofile_ = {"rprofile", {"pair", "basepoint", "t", "r", "argmax_log_s", "argmax_side"}, {}};
    std::vector<std::string> dh = {"stratum", "coordinate", "theta", "stderr", "class"};
    for (double u : sc.density.u_grid) dh.push_back("u=" + short_num(u));
    density_ = {"density", dh, {}};
  }

  void run(unsigned sections) {
    if ((sections & kRegularity) && !sc_.conditions.empty()) regularity();
    if ((sections & kCones) && (sc_.cones.n || sc_.cones.npf || sc_.cones.c1)) cones();
    if ((sections & kSlices) && !sc_.slices.empty()) slices();
    if ((sections & kDensity) && sc_.density.enabled) density();
    r_.tables = {limits_, fibers_, rprofile_, density_};
  }

 private:
  bool qualify() const { return sc_.pairs.size() > 1 || sc_.basepoints.size() > 1; }
  std::string prefix(const std::pair<std::string, std::string>& pr, const Vec<double>& bp) const {
    return qualify() ? pair_text(pr) + "@" + point_text(bp) + ":" : "";
  }
  std::string pair_prefix(const std::pair<std::string, std::string>& pr) const {
    return sc_.pairs.size() > 1 ? pair_text(pr) + ":" : "";
  }

  void error_row(const std::string& key, const std::string& section, const std::exception& e) {
    CheckRow row;
    row.key = key;
    row.section = section;
    row.outcome = "ERROR";
    row.detail = e.what();
    r_.rows.push_back(row);
    r_.errors.push_back(key + ": " + e.what());
  }

  ConeConfig cone_config() const {
    ConeConfig c = default_cone_config();
    c.family = sc_.family;
    c.tol = sc_.tolerances;
    c.threads = threads_;
    return c;
  }

  CheckRow verdict_row(const std::string& key, const std::string& section, const Verdict& v) {
    CheckRow row;
    row.key = key;
    row.section = section;
    row.outcome = to_string(v.outcome);
    if (v.witness) {
      row.value = v.witness->limit.value.to_double();
      row.witness = v.witness->label + ": " + describe(v.witness->limit);
    } else {
      double best = 0.0;
      bool any = false;
      for (const auto& c : v.curves)
        if (c.limit.cls == LimitClass::Converged || c.limit.cls == LimitClass::Bounded) {
          best = std::max(best, std::fabs(c.limit.value.to_double()));
          any = true;
        }
      if (any) row.value = best;
    }
    row.detail = v.note;
    std::size_t inconclusive = 0;
    for (const auto& c : v.curves)
      if (!c.conclusive) ++inconclusive;
    if (inconclusive > 0) {
      row.detail += (row.detail.empty() ? "" : "; ") + std::to_string(inconclusive) + " of " +
                    std::to_string(v.curves.size()) + " curves inconclusive";
    }
    return row;
  }

  void limit_rows(const std::string& pair, const std::string& bp, const std::string& check, const Verdict& v) {
    for (const auto& c : v.curves)
      limits_.rows.push_back({pair, bp, check, c.label, to_string(c.limit.cls), to_string(c.limit.value, 10),
                              std::to_string(c.limit.samples), c.conforming ? "yes" : "no"});
  }

  void regularity() {
    for (const auto& pr : sc_.pairs)
      for (const auto& bp : sc_.basepoints) {
        const std::string pre = prefix(pr, bp);
        try {
          PairAtPoint p(sc_.set, pr.first, pr.second, bp);
          const auto family = standard_family(sc_.set, p.y(), p.x(), bp, sc_.family);
          const auto curves = sample_family(p, family, sc_.family.grid, threads_);
          for (const auto& name : sc_.conditions) {
            const std::string key = pre + name;
            try {
              const Verdict v = check_condition(p, Condition::parse(name), curves, sc_.tolerances);
              CheckRow row = verdict_row(key, "regularity", v);
              if (v.rint) {
                row.value = v.rint->cls == RintClass::Converging ? v.rint->integral : v.rint->partials.back();
                row.detail = "r(t) integral " + to_string(v.rint->cls) + ", median increment ratio " +
                             fmt(v.rint->median_ratio);
                for (const auto& pt : v.rint->profile)
                  rprofile_.rows.push_back({pair_text(pr), point_text(bp), fmt(pt.t), to_string(pt.r, 10),
                                            fmt(pt.argmax_log_s), std::to_string(pt.argmax_side)});
              }
              r_.rows.push_back(row);
              limit_rows(pair_text(pr), point_text(bp), name, v);
            } catch (const Error& e) {
              error_row(key, "regularity", e);
            }
          }
        } catch (const Error& e) {
          for (const auto& name : sc_.conditions) error_row(pre + name, "regularity", e);
        }
      }
  }

  void fiber_rows(const std::string& pair, const std::string& bp, const std::string& source,
                  const std::vector<LimitDirection>& dirs) {
    for (const auto& d : dirs)
      fibers_.rows.push_back({pair, bp, source, d.label, std::to_string(d.branch),
                              d.conclusive ? direction_text(d.direction) : "",
                              d.conclusive ? "Converged" : "Inconclusive"});
  }

  void cones() {
    const ConeConfig cfg = cone_config();
    for (const auto& pr : sc_.pairs) {
      if (sc_.cones.n)
        for (const auto& bp : sc_.basepoints) {
          const std::string key = prefix(pr, bp) + "n";
          try {
            PairAtPoint p(sc_.set, pr.first, pr.second, bp);
            const NCheck n = check_n(p, cfg);
            CheckRow row;
            row.key = key;
            row.section = "cones";
            row.outcome = to_string(n.outcome);
            row.value = n.cone_to_tangent;
            if (n.witness) row.witness = n.witness->label + ": " + direction_text(n.witness->direction);
            row.dims = {n.fiber.dimension};
            row.detail = "fiber dimension " + std::to_string(n.fiber.dimension) + ", " +
                         std::to_string(n.fiber.clusters.size()) + " direction clusters; distances cone->tangent " +
                         fmt(n.cone_to_tangent) + " rad, tangent->cone " + fmt(n.tangent_to_cone) + " rad";
            r_.rows.push_back(row);
            fiber_rows(pair_text(pr), point_text(bp), "cone", n.fiber.directions);
            fiber_rows(pair_text(pr), point_text(bp), "fiber tangent cone", n.tangent_cone.directions);
          } catch (const Error& e) {
            error_row(key, "cones", e);
          }
        }
      const std::string pre = pair_prefix(pr);
      if (sc_.cones.npf) {
        try {
          const NpfCheck npf = check_npf(sc_.set, pr.first, pr.second, sc_.cones.grid, cfg);
          CheckRow row;
          row.key = pre + "npf";
          row.section = "cones";
          row.outcome = to_string(npf.outcome);
          std::string jumps;
          for (const auto& j : npf.jumps) jumps += (jumps.empty() ? "" : "; ") + j;
          row.witness = jumps;
          row.detail = npf.note;
          std::map<double, int> dim_at;
          for (const auto& gf : npf.fibers) {
            dim_at[gf.coordinate] = gf.fiber.dimension;
            Vec<double> bp = point_on(sc_.set.stratum(pr.second), gf.coordinate);
            fiber_rows(pair_text(pr), point_text(bp), "cone", gf.fiber.directions);
          }
          CheckRow dims;
          dims.key = pre + "cone_dims";
          dims.section = "cones";
          for (double c : sc_.cones.grid) dims.dims.push_back(dim_at.at(c));
          dims.outcome = dims_text(dims.dims);
          std::string coords;
          for (double c : sc_.cones.grid) coords += (coords.empty() ? "" : ",") + short_num(c);
          dims.detail = "fiber dimensions at grid " + coords;
          r_.rows.push_back(row);
          r_.rows.push_back(dims);

          CheckRow obs;
          obs.key = pre + "observed_dim";
          obs.section = "cones";
          if (npf.outcome == Outcome::HoldsOnFamily) {
            const bool ok = std::all_of(npf.fibers.begin(), npf.fibers.end(), [&](const GridFiber& gf) {
              return observed_dimension_ok(gf.fiber, sc_.set, pr.first, pr.second);
            });
            obs.outcome = ok ? to_string(Outcome::HoldsOnFamily) : to_string(Outcome::Fails);
            obs.detail = "fiber dimension <= dim Y - dim X - 1 at every grid point";
          } else {
            obs.outcome = "SKIPPED";
            obs.detail = "only asserted where (npf) holds";
          }
          r_.rows.push_back(obs);
        } catch (const Error& e) {
          error_row(pre + "npf", "cones", e);
        }
      }
      if (sc_.cones.c1) {
        try {
          const C1Evidence ev = c1_boundary_evidence(sc_.set, pr.first, pr.second, sc_.cones.grid, cfg);
          CheckRow row;
          row.key = pre + "c1";
          row.section = "cones";
          row.outcome = to_string(ev.verdict);
          double worst = 0.0;
          for (const auto& pt : ev.points)
            if (pt.spread >= worst) {
              worst = pt.spread;
              if (!pt.unique) row.witness = "at " + short_num(pt.coordinate) + ": " + pt.witness;
            }
          row.value = worst;
          std::string d;
          for (const auto& s : ev.discontinuities) d += (d.empty() ? "" : "; ") + s;
          row.detail = "largest spread of limit tangent planes " + fmt(worst) + " rad" + (d.empty() ? "" : "; " + d);
          r_.rows.push_back(row);
        } catch (const Error& e) {
          error_row(pre + "c1", "cones", e);
        }
      }
    }
  }

  void slices() {
    static const char* kConds[] = {"a", "bpi", "b"};
    for (const auto& pr : sc_.pairs)
      for (const auto& bp : sc_.basepoints)
        for (double a : sc_.slices) {
          const std::string pre = prefix(pr, bp) + "slice(" + short_num(a) + "):";
          try {
            PairAtPoint p(sc_.set, pr.first, pr.second, bp);
            const SlicedPair sp = slice_pair(p, a);
            for (const char* c : kConds) {
              const Verdict v = check_condition(p, Condition::parse(c), sp.branches, sc_.tolerances);
              CheckRow row = verdict_row(pre + c, "slices", v);
              if (!sp.failures.empty())
                row.detail += (row.detail.empty() ? "" : "; ") + std::to_string(sp.failures.size()) +
                              " sampled x without a root in the bracket";
              r_.rows.push_back(row);
              limit_rows(pair_text(pr), point_text(bp), "slice(" + short_num(a) + "):" + c, v);
            }
          } catch (const Error& e) {
            for (const char* c : kConds) error_row(pre + c, "slices", e);
          }
        }
  }

  std::string density_stratum() const {
    if (!sc_.density.stratum.empty()) return sc_.density.stratum;
    for (const auto& s : sc_.set.strata)
      if (s.kind() == StratumKind::Region) return s.name;
    if (!sc_.pairs.empty()) return sc_.pairs.front().first;
    for (const auto& s : sc_.set.strata)
      if (s.kind() == StratumKind::Graph) return s.name;
    throw InputError("density.stratum", "the set has no stratum with a density");
  }

  std::string density_axis() const {
    if (!sc_.pairs.empty()) return sc_.pairs.front().second;
    for (const auto& s : sc_.set.strata)
      if (s.kind() == StratumKind::Affine) return s.name;
    throw InputError("density", "the set has no affine stratum to place centres on");
  }

  void density() {
    try {
      const std::string a = density_stratum();
      MonteCarloConfig mc = sc_.density.mc;
      mc.threads = threads_;
      const DensityProfile prof =
          density_profile(sc_.set, a, density_axis(), sc_.density.grid, sc_.density.u_grid, mc);
      for (std::size_t i = 0; i < prof.estimates.size(); ++i) {
        const auto& e = prof.estimates[i];
        const double c = prof.coordinates[i];
        CheckRow row;
        row.key = "theta@" + short_num(c);
        row.section = "density";
        row.outcome = e.conclusive ? "CONVERGED" : "INCONCLUSIVE";
        row.value = e.theta;
        std::size_t fallback = 0;
        for (const auto& p : e.per_u) fallback += p.fallback_batches;
        row.detail = "theta(" + a + ") = " + fmt(e.theta) + " +- " + fmt(e.stderr_theta) + " over " +
                     std::to_string(e.per_u.size()) + " radii; " + std::to_string(fallback) +
                     " batches in extended range";
        for (const auto& p : e.per_u)
          if (!p.warning.empty()) row.detail += "; u=" + short_num(p.u) + ": " + p.warning;
        r_.rows.push_back(row);
        std::vector<std::string> cells = {a, fmt(c), fmt(e.theta), fmt(e.stderr_theta), to_string(e.limit.cls)};
        for (const auto& p : e.per_u) cells.push_back(fmt(p.normalized));
        density_.rows.push_back(std::move(cells));
      }
      CheckRow jump;
      jump.key = "density_jump";
      jump.section = "density";
      jump.flag = !prof.jumps.empty();
      jump.outcome = prof.jumps.empty() ? "CONTINUOUS" : "JUMP";
      for (const auto& j : prof.jumps) jump.witness += (jump.witness.empty() ? "" : "; ") + j;
      jump.detail = "flagged when adjacent values differ by more than 3 combined standard errors";
      r_.rows.push_back(jump);
    } catch (const Error& e) {
      error_row("density_jump", "density", e);
    }
  }

  const Scenario& sc_;
  Report& r_;
  int threads_;
  Table limits_, fibers_, rprofile_, density_;
};

std::string expected_text(const nlohmann::json& e) {
  if (e.is_string()) return e.get<std::string>();
  return e.dump();
}

ExpectationResult compare(const std::string& key, const nlohmann::json& e, const CheckRow& row) {
  ExpectationResult res;
  res.key = key;
  res.expected = expected_text(e);
  res.actual = row.outcome;
  if (e.is_string()) {
    std::string want = e.get<std::string>();
    if (want == "HOLDS") want = to_string(Outcome::HoldsOnFamily);
    res.pass = row.outcome == want;
  } else if (e.is_boolean()) {
    res.actual = row.flag ? (*row.flag ? "true" : "false") : row.outcome;
    res.pass = row.flag && *row.flag == e.get<bool>();
  } else if (!row.dims.empty() && e.size() == row.dims.size() && key.find("cone_dims") != std::string::npos) {
    res.pass = true;
    for (std::size_t i = 0; i < e.size(); ++i)
      if (e[i].get<double>() != row.dims[i]) res.pass = false;
  } else if (e.size() == 2 && row.value) {
    res.actual = fmt(*row.value);
    res.pass = std::fabs(*row.value - e[0].get<double>()) <= e[1].get<double>();
    res.expected = fmt(e[0].get<double>()) + " +- " + fmt(e[1].get<double>());
  }
  return res;
}

std::string cell(std::string s) {
  for (auto& ch : s)
    if (ch == '|' || ch == '\n') ch = ch == '|' ? '/' : ' ';
  return s;
}

}  // namespace

const CheckRow* Report::find(const std::string& key) const {
  for (const auto& r : rows)
    if (r.key == key) return &r;
  return nullptr;
}

std::size_t Report::expectations_failed() const {
  return static_cast<std::size_t>(
      std::count_if(expectations.begin(), expectations.end(), [](const auto& e) { return !e.pass; }));
}

Report run_scenario(const Scenario& sc, unsigned sections) {
  Report r;
  r.scenario = sc.name;
  r.set = sc.set.name;
  r.notes = sc.set.notes;
  if (sc.conditions.end() != std::find(sc.conditions.begin(), sc.conditions.end(), "w"))
    r.notes.push_back("(w) is evaluated along each curve with x = pi(y) and with x = x0.");
  if (sc.cones.npf)
    r.notes.push_back(
        "(npf) is tested as lower semicontinuity of sampled fibers across the grid, a necessary condition for "
        "openness of the projection.");
  Runner(sc, r).run(sections);
  for (const auto& [key, e] : sc.expect) {
    const CheckRow* row = r.find(key);
    if (!row) throw InputError("expect." + key, "no check of that name in this run");
    r.expectations.push_back(compare(key, e, *row));
  }
  return r;
}

void write_markdown(std::ostream& out, const Report& r) {
  out << "# stratcheck report: " << r.scenario << "\n\n";
  out << "Set: `" << r.set << "`\n\n";
  if (!r.notes.empty()) {
    out << "Notes:\n\n";
    for (const auto& n : r.notes) out << "- " << n << "\n";
    out << "\n";
  }
  const std::pair<const char*, const char*> sections[] = {{"regularity", "Regularity conditions"},
                                                          {"cones", "Normal cone"},
                                                          {"slices", "Codimension-one slices"},
                                                          {"density", "Density"}};
  for (const auto& [id, title] : sections) {
    bool any = false;
    for (const auto& row : r.rows) {
      if (row.section != id) continue;
      if (!any) {
        out << "## " << title << "\n\n| Check | Outcome | Value | Witness | Detail |\n|---|---|---|---|---|\n";
        any = true;
      }
      out << "| " << cell(row.key) << " | " << cell(row.outcome) << " | " << (row.value ? fmt(*row.value) : "")
          << " | " << cell(row.witness) << " | " << cell(row.detail) << " |\n";
    }
    if (any) out << "\n";
  }
  if (!r.expectations.empty()) {
    out << "## Expectations\n\n" << (r.expectations.size() - r.expectations_failed()) << " of "
        << r.expectations.size() << " expectations met.\n\n| Check | Expected | Actual | Result |\n|---|---|---|---|\n";
    for (const auto& e : r.expectations)
      out << "| " << cell(e.key) << " | " << cell(e.expected) << " | " << cell(e.actual) << " | "
          << (e.pass ? "pass" : "FAIL") << " |\n";
    out << "\n";
  }
  if (!r.errors.empty()) {
    out << "## Evaluation errors\n\n";
    for (const auto& e : r.errors) out << "- " << e << "\n";
    out << "\n";
  }
}

ordered_json to_json(const Report& r) {
  ordered_json j;
  j["scenario"] = r.scenario;
  j["set"] = r.set;
  j["notes"] = r.notes;
  ordered_json checks = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json c;
    c["key"] = row.key;
    c["section"] = row.section;
    c["outcome"] = row.outcome;
    c["value"] = row.value ? ordered_json(*row.value) : ordered_json(nullptr);
    if (row.flag) c["flag"] = *row.flag;
    if (!row.dims.empty()) c["dims"] = row.dims;
    c["witness"] = row.witness;
    c["detail"] = row.detail;
    checks.push_back(c);
  }
  j["checks"] = checks;
  ordered_json ex;
  ex["total"] = r.expectations.size();
  ex["passed"] = r.expectations.size() - r.expectations_failed();
  ex["failed"] = r.expectations_failed();
  ordered_json entries = ordered_json::array();
  for (const auto& e : r.expectations)
    entries.push_back({{"key", e.key}, {"expected", e.expected}, {"actual", e.actual}, {"pass", e.pass}});
  ex["entries"] = entries;
  j["expectations"] = ex;
  j["errors"] = r.errors;
  return j;
}

void write_csv(std::ostream& out, const Table& t) {
  auto put = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out << ',';
      const std::string& c = cells[i];
      if (c.find_first_of(",\"\n") != std::string::npos) {
        out << '"';
        for (char ch : c) out << (ch == '"' ? "\"\"" : std::string(1, ch));
        out << '"';
      } else {
        out << c;
      }
    }
    out << '\n';
  };
  put(t.header);
  for (const auto& row : t.rows) put(row);
}

Table check_table(const Report& r) {
  Table t{"checks", {"key", "section", "outcome", "value", "witness", "detail"}, {}};
  for (const auto& row : r.rows)
    t.rows.push_back({row.key, row.section, row.outcome, row.value ? fmt(*row.value) : "", row.witness, row.detail});
  return t;
}

void write_outputs(const std::filesystem::path& dir, const Report& r) {
  std::filesystem::create_directories(dir);
  auto open = [&](const std::string& name) {
    std::ofstream f(dir / name, std::ios::binary);
    if (!f) throw InputError("--out", "cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("report.md");
    write_markdown(f, r);
  }
  {
    auto f = open("summary.json");
    f << to_json(r).dump(2) << '\n';
  }
  {
    auto f = open("checks.csv");
    write_csv(f, check_table(r));
  }
  for (const auto& t : r.tables) {
    auto f = open(t.name + ".csv");
    write_csv(f, t);
  }
}

}  // namespace stratcheck
