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

// Acceptance checks. Prints one PASS/FAIL line per criterion; `--criterion N`
// runs a single one and sets the exit status from it.

#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "stratcheck/cones.hpp"
#include "stratcheck/density.hpp"
#include "stratcheck/expr.hpp"
#include "stratcheck/geom.hpp"
#include "stratcheck/regularity.hpp"
#include "stratcheck/report.hpp"
#include "stratcheck/scenario.hpp"

using namespace stratcheck;

namespace {

const Vec<double> kOrigin = {0.0, 0.0, 0.0};

// Collects the sub-checks of one criterion.
class Criterion {
 public:
  void require(bool ok, const std::string& what) {
    std::printf("    [%s] %s\n", ok ? "ok" : "FAIL", what.c_str());
    pass_ = pass_ && ok;
  }
  void info(const std::string& what) { std::printf("    [info] %s\n", what.c_str()); }
  bool pass() const { return pass_; }

 private:
  bool pass_ = true;
};

std::string num(double v, int digits = 6) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

Subspace<double> span_of(std::vector<Vec<double>> v, std::size_t n) {
  return orthonormalize<double>(std::span<const Vec<double>>(v), n);
}

Verdict verdict(const PairAtPoint& p, std::span<const SampledCurve> curves, const char* c) {
  return check_condition(p, Condition::parse(c), curves, Tolerances{});
}

std::vector<SampledCurve> sample_standard(const StratifiedSet& s, const PairAtPoint& p, const FamilyConfig& cfg) {
  const auto fam = standard_family(s, p.y(), p.x(), p.basepoint(), cfg);
  return sample_family(p, fam, cfg.grid, 0);
}

// 1. Grassmann core.
void c1(Criterion& c) {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g;
  auto random_frame = [&](std::size_t n, std::size_t k) {
    std::vector<Vec<double>> v(k, Vec<double>(n));
    for (auto& row : v)
      for (auto& x : row) x = g(rng);
    return span_of(v, n);
  };
  double self = 0.0;
  for (int i = 0; i < 20; ++i) {
    const auto e = random_frame(3 + i % 3, 1 + i % 2);
    self = std::max(self, delta(e, e));
  }
  c.require(self <= 1e-12, "delta(E,E) = 0 on 20 random subspaces (max " + num(self) + ")");
  const double r = 1 / std::sqrt(2.0);
  const double d = delta(span_of({{r, r}}, 2), span_of({{1.0, 0.0}}, 2));
  c.require(std::fabs(d - 0.7071067811865476) <= 1e-9, "delta(span{(1,1)/sqrt2}, span{e1}) = " + num(d, 12));
  double asym = 0.0;
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 3 + i % 3, k = 1 + i % 2;
    const auto a = random_frame(n, k);
    const auto b = random_frame(n, k);
    asym = std::max(asym, std::fabs(delta(a, b) - delta(b, a)));
  }
  c.require(asym <= 1e-12, "symmetry on 100 random equal-dimension pairs (max |delta(A,B)-delta(B,A)| " +
                               num(asym) + ")");
}

// 2. S_g cone fibers, (n) and (npf).
void c2(Criterion& c) {
  const StratifiedSet s = catalog("Sg");
  const ConeConfig cfg = default_cone_config();
  const NCheck n = check_n(PairAtPoint(s, "W", "X", kOrigin), cfg);
  for (double sigma : {0.25, 0.5, 0.75}) {
    double best = 1.0;
    for (const auto& d : n.fiber.directions)
      if (d.conclusive && d.label.rfind("sigma=", 0) == 0 && d.direction[2] > 0)
        best = std::min(best, std::fabs(d.direction[1] / d.direction[2] - sigma));
    c.require(best <= 1e-3, "slope " + num(sigma) + " realized by a sigma-curve (error " + num(best) + ")");
  }
  c.require(n.fiber.dimension == 1, "fiber over the origin is an arc (dimension " +
                                        std::to_string(n.fiber.dimension) + ")");
  const Vec<double> half = {0.5, 0.0, 0.0};
  const ConeFiber f = cone_fiber(PairAtPoint(s, "W", "X", half), cfg);
  double worst = 0.0;
  for (const auto& d : f.directions)
    if (d.conclusive) worst = std::max(worst, std::fabs(d.direction[1] / d.direction[2]));
  c.require(f.dimension == 0 && worst <= 1e-3, "fiber over x0 = 0.5 collapses to slope 0 (max slope " +
                                                   num(worst) + ")");
  c.require(n.outcome == Outcome::Fails, "check_n = " + to_string(n.outcome));
  const NpfCheck npf = check_npf(s, "W", "X", default_grid(), cfg);
  c.require(npf.outcome == Outcome::Fails, "check_npf = " + to_string(npf.outcome));
}

// 3. Kuo ratio along flat curves z = exp(-C/x^2).
void c3(Criterion& c) {
  const StratifiedSet s = catalog("Sg");
  const PairAtPoint p(s, "W", "X", kOrigin);
  FamilyConfig cfg;
  cfg.flat_q = {2.0};
  const auto curves = sample_standard(s, p, cfg);
  const Verdict r = verdict(p, curves, "r");
  for (double C : {0.5, 1.0, 2.0}) {
    const std::string label = "flat C=" + num(C) + " q=2";
    const CurveVerdict* cv = nullptr;
    for (const auto& v : r.curves)
      if (v.label == label) cv = &v;
    if (!cv || cv->limit.cls != LimitClass::Converged) {
      c.require(false, label + ": limit did not converge");
      continue;
    }
    const double got = cv->limit.value.to_double();
    const double stated = C * std::exp(-C);
    const double exact = 2 * C * std::exp(-C) / (1 + std::exp(-2 * C));
    c.require(std::fabs(got - stated) <= 0.05 * stated,
              label + ": limit " + num(got) + " vs C*exp(-C) = " + num(stated) + " (5% band)");
    c.info(label + ": exact limit 2C*exp(-C)/(1+exp(-2C)) = " + num(exact) + ", relative error " +
           num(std::fabs(got - exact) / exact));
  }
  c.require(r.outcome == Outcome::Fails, "(r) verdict " + to_string(r.outcome));
  c.require(r.witness && r.witness->kind == CurveKind::Flat,
            "witness is a flat curve: " + (r.witness ? r.witness->label + " " + describe(r.witness->limit) : "none"));
  bool extended = false;
  for (const auto& cur : curves)
    if (cur.kind == CurveKind::Flat)
      for (const auto& smp : cur.samples)
        if (smp.rel[0].to_double() < 0.037 && !smp.rel[2].fits_double()) extended = true;
  c.require(extended, "flat-curve samples below x = 0.037 carry z outside the double range");
}

// 4. (a), (b^pi) and the closed form of beta.
void c4(Criterion& c) {
  const StratifiedSet s = catalog("Sg");
  const PairAtPoint p(s, "W", "X", kOrigin);
  const auto curves = sample_standard(s, p, FamilyConfig{});
  c.require(verdict(p, curves, "a").outcome == Outcome::HoldsOnFamily, "(a) HOLDS_ON_FAMILY");
  c.require(verdict(p, curves, "bpi").outcome == Outcome::HoldsOnFamily, "(b^pi) HOLDS_ON_FAMILY");

  GraphPatch patch(s.stratum("W").graph());
  double worst = 0.0, ratio_lo = 1e300, ratio_hi = 0.0;
  int points = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) {
      const double x = (i % 2 ? -1.0 : 1.0) * (0.02 + 0.09 * i);
      const double lz = -std::pow(10.0, 0.5 * j);  // ln z from -1 to about -3e4
      const std::vector<XScalar> params = {XScalar(x), XScalar::from_log(1, lz)};
      const auto smp = patch.at(params);
      const ProbeSample ps{0.0, smp.params, smp.point, smp.tangent};
      const XScalar b = beta(p, ps);
      // x^2 z^(x^2+1) / (|(g,z)| |(g_x,-1,g_z)|) with g = z^(x^2+1)
      const XScalar z = params[1];
      const XScalar g = exp(XScalar(x * x + 1) * log(z));
      const XScalar gx = XScalar(2 * x * lz) * g;
      const XScalar gz = XScalar(x * x + 1) * g / z;
      const std::vector<XScalar> secant = {g, z};
      const std::vector<XScalar> normal = {gx, XScalar(-1.0), gz};
      const XScalar q = XScalar(x * x) * g / (norm(std::span<const XScalar>(secant)) *
                                              norm(std::span<const XScalar>(normal)));
      worst = std::max(worst, std::fabs((b - q).to_double() / q.to_double()));
      const double eq = (b / (XScalar(x * x) * exp(XScalar(x * x) * log(z)))).to_double();
      ratio_lo = std::min(ratio_lo, eq);
      ratio_hi = std::max(ratio_hi, eq);
      ++points;
    }
  c.require(points == 100 && worst <= 1e-8,
            "beta matches x^2 z^(x^2+1)/(|(y,z)| |(g_x,-1,g_z)|) at 100 points (max relative error " + num(worst) +
                ")");
  c.require(ratio_lo > 0.1 && ratio_hi < 10.0, "beta / (x^2 z^(x^2)) stays in [" + num(ratio_lo) + ", " +
                                                   num(ratio_hi) + "]");
}

// 5. Codimension-one slice a = 0.5.
void c5(Criterion& c) {
  const StratifiedSet s = catalog("Sg");
  const PairAtPoint p(s, "W", "X", kOrigin);
  const SlicedPair sp = slice_pair(p, 0.5);
  double worst = 0.0, worst_abs = 0.0;
  std::size_t n = 0;
  for (const auto& b : sp.branches)
    for (const auto& smp : b.samples) {
      const double x = smp.params[0].to_double();
      const double want = std::log(0.5) / (x * x);
      const double err = std::fabs(smp.params[1].logmag() - want);
      worst = std::max(worst, err / std::max(1.0, std::fabs(want)));
      worst_abs = std::max(worst_abs, err);
      ++n;
    }
  c.require(n > 0 && worst <= 1e-9, "slice follows ln z = ln(a)/x^2 at " + std::to_string(n) +
                                        " points (max error " + num(worst) + " relative to max(1,|ln z|))");
  c.info("max absolute error in ln z " + num(worst_abs) + "; " + std::to_string(sp.failures.size()) +
         " sampled x without a root in the bracket");
  const Verdict b = check_condition(p, Condition::parse("b"), sp.branches, Tolerances{});
  c.require(b.outcome == Outcome::Fails,
            "sliced (b) " + to_string(b.outcome) + (b.witness ? " via " + b.witness->label : ""));
}

DensityProfile profile(const std::string& set, const std::string& stratum, std::vector<double> grid) {
  MonteCarloConfig mc;
  mc.threads = 0;
  return density_profile(catalog(set), stratum, "X", grid, default_u_grid(), mc);
}

// 6. Densities of S_g and K_g.
void c6(Criterion& c) {
  const auto sg = profile("Sg", "W", {-0.3, -0.1, 0.0, 0.1, 0.3});
  for (std::size_t i = 0; i < sg.estimates.size(); ++i) {
    const auto& e = sg.estimates[i];
    c.require(std::fabs(e.theta - 0.5) <= 0.02,
              "theta(S_g, " + num(sg.coordinates[i]) + ") = " + num(e.theta) + " +- " + num(e.stderr_theta));
  }
  const auto kg = profile("Kg", "K", {-0.3, 0.0, 0.3});
  c.require(std::fabs(kg.estimates[1].theta - 0.125) <= 0.01,
            "theta(K_g, 0) = " + num(kg.estimates[1].theta) + " +- " + num(kg.estimates[1].stderr_theta));
  for (std::size_t i : {0u, 2u})
    c.require(kg.estimates[i].theta <= 0.01,
              "theta(K_g, " + num(kg.coordinates[i]) + ") = " + num(kg.estimates[i].theta));
  c.require(!kg.jumps.empty(), "jump flagged in the K_g profile (" + std::to_string(kg.jumps.size()) + ")");
  c.require(sg.jumps.empty(), "no jump in the S_g profile");
}

// 7. S_f suite.
void c7(Criterion& c) {
  const StratifiedSet s = catalog("Sf");
  const PairAtPoint p(s, "Y", "X", kOrigin);
  const auto curves = sample_standard(s, p, FamilyConfig{});
  c.require(verdict(p, curves, "r").outcome == Outcome::HoldsOnFamily, "(r) HOLDS_ON_FAMILY");
  c.require(verdict(p, curves, "b").outcome == Outcome::HoldsOnFamily, "(b) HOLDS_ON_FAMILY");
  const ConeConfig cfg = default_cone_config();
  c.require(check_n(p, cfg).outcome == Outcome::Fails, "(n) FAILS");
  c.require(check_npf(s, "Y", "X", default_grid(), cfg).outcome == Outcome::Fails, "(npf) FAILS");
  const auto sf = profile("Sf", "Y", {-0.3, -0.1, 0.0, 0.1, 0.3});
  for (std::size_t i = 0; i < sf.estimates.size(); ++i)
    c.require(std::fabs(sf.estimates[i].theta - 0.5) <= 0.02,
              "theta(S_f, " + num(sf.coordinates[i]) + ") = " + num(sf.estimates[i].theta));
  c.require(sf.jumps.empty(), "density profile constant (no jumps)");
}

// 8. r(t) integral and the z^3 control.
void c8(Criterion& c) {
  const auto eps = default_eps_grid();
  for (const char* name : {"Sg", "Sf"}) {
    const StratifiedSet s = catalog(name);
    const auto& pr = s.pairs.front();
    const RintResult r = rint_check(PairAtPoint(s, pr.first, pr.second, kOrigin), eps);
    c.require(r.cls == RintClass::Diverging, std::string(name) + ": integral of r(t) " + to_string(r.cls) +
                                                 " (median increment ratio " + num(r.median_ratio) + ")");
  }
  const StratifiedSet z3 = catalog("z3_control");
  const PairAtPoint p(z3, "Y", "X", kOrigin);
  const RintResult r = rint_check(p, eps);
  c.require(r.cls == RintClass::Converging, "z^3: integral of r(t) " + to_string(r.cls) + " (" + num(r.integral) + ")");
  const ConeConfig cfg = default_cone_config();
  c.require(check_n(p, cfg).outcome == Outcome::HoldsOnFamily, "z^3: (n) HOLDS_ON_FAMILY");
  c.require(check_npf(z3, "Y", "X", default_grid(), cfg).outcome == Outcome::HoldsOnFamily,
            "z^3: (npf) HOLDS_ON_FAMILY");
  c.require(c1_boundary_evidence(z3, "Y", "X", default_grid(), cfg).verdict == Evidence::For,
            "z^3: C1 evidence EVIDENCE_FOR");
}

// 9. (b) and (r) across the catalog.
void c9(Criterion& c) {
  const std::vector<std::pair<std::string, bool>> examples = {{"halfplane", true},  {"plane_graph_zero", true},
                                                              {"cusp_demo", true},  {"z3_control", true},
                                                              {"Sg", false},        {"Sf", false}};
  int poly_with_b = 0;
  bool implication = true;
  for (const auto& [name, poly] : examples) {
    const StratifiedSet s = catalog(name);
    const auto& pr = s.pairs.front();
    const PairAtPoint p(s, pr.first, pr.second, kOrigin);
    const auto curves = sample_standard(s, p, FamilyConfig{});
    const Outcome b = verdict(p, curves, "b").outcome;
    const Outcome r = verdict(p, curves, "r").outcome;
    c.info(name + ": (b) " + to_string(b) + ", (r) " + to_string(r));
    if (poly && b == Outcome::HoldsOnFamily) {
      c.require(r == Outcome::HoldsOnFamily, name + ": (b) holds and (r) holds");
      ++poly_with_b;
    }
    if (r == Outcome::HoldsOnFamily && b != Outcome::HoldsOnFamily) implication = false;
  }
  c.require(poly_with_b >= 3, std::to_string(poly_with_b) + " polynomially bounded examples with (b)");
  c.require(implication, "(r) HOLDS_ON_FAMILY implies (b) HOLDS_ON_FAMILY on every example");
}

// 10. Numeric substrate and reproducibility.
void c10(Criterion& c) {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> ux(-0.9, 0.9), uz(0.01, 0.49);
  double ad_err = 0.0;
  for (const char* text : {"exp((x^2 + 1)*ln(z))", "-z*asinh(x/z)/ln(z)", "(1 + x^2)*z^1.5"}) {
    const Expr e = Expr::parse(text);
    for (int i = 0; i < 100; ++i) {
      std::map<std::string, double> pt = {{"x", ux(rng)}, {"z", uz(rng)}};
      const auto jet = eval_jet(e, pt);
      double scale = 0.0;
      for (double d : jet.gradient) scale = std::max(scale, std::fabs(d));
      for (std::size_t k = 0; k < e.free_vars().size(); ++k) {
        const std::string& v = e.free_vars()[k];
        const double x = pt[v], h = 1e-4 * std::max(std::fabs(x), 1e-2);
        auto central = [&](double step) {
          auto q = pt;
          q[v] = x + step;
          const double up = eval_jet(e, q).value;
          q[v] = x - step;
          return (up - eval_jet(e, q).value) / (2 * step);
        };
        const double fd = (4 * central(h / 2) - central(h)) / 3;
        ad_err = std::max(ad_err, std::fabs(jet.gradient[k] - fd) / scale);
      }
    }
  }
  c.require(ad_err < 1e-6, "AD vs finite differences on 300 smooth points (max relative error " + num(ad_err) + ")");

  std::uniform_real_distribution<double> um(-50.0, 50.0);
  double alg_err = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double a = um(rng), b = um(rng);
    const XScalar xa(a), xb(b);
    alg_err = std::max({alg_err, std::fabs((xa * xb).to_double() - a * b) / std::fabs(a * b),
                        std::fabs((xa / xb).to_double() - a / b) / std::fabs(a / b),
                        std::fabs((xa + xb).to_double() - (a + b)) / (std::fabs(a) + std::fabs(b)),
                        std::fabs((exp(log(abs(xa)))).to_double() - std::fabs(a)) / std::fabs(a)});
  }
  const XScalar tiny = exp(XScalar(-1e7));
  const bool extreme = (tiny * exp(XScalar(1e7))).to_double() == 1.0 && (tiny - tiny).is_zero() &&
                       std::fabs(sqrt(tiny).logmag() + 5e6) < 1e-6 && !tiny.fits_double();
  c.require(alg_err < 1e-12 && extreme,
            "XScalar algebra agrees with double (max error " + num(alg_err) + ") and holds beyond its range");

  double cls_err = 0.0;
  bool all_converged = true;
  for (double limit : {0.0, 0.3679, -1.5, 4.0})
    for (double ratio : {0.3, 0.6, -0.5, 0.85}) {
      std::vector<double> v;
      for (int k = 0; k < 40; ++k) v.push_back(limit + 0.7 * std::pow(ratio, k));
      const auto e = classify_limit(std::span<const double>(v));
      all_converged = all_converged && e.cls == LimitClass::Converged;
      cls_err = std::max(cls_err, std::fabs(e.value.to_double() - limit));
    }
  c.require(all_converged && cls_err < 1e-3,
            "classifier recovers L on 16 geometric sequences (max error " + num(cls_err) + ")");

  auto csv_bytes = [](int threads) {
    Scenario sc = parse_scenario(nlohmann::json::parse(R"({
      "set": "Kg", "pairs": [["W", "X"]], "conditions": ["a", "r", "rint", "n", "npf"], "slices": [0.5],
      "density": {"grid": [0, 0.3], "N": 20000, "seed": 7}})"));
    sc.threads = threads;
    const Report r = run_scenario(sc);
    std::ostringstream out;
    for (const auto& t : r.tables) write_csv(out, t);
    write_csv(out, check_table(r));
    return out.str();
  };
  const std::string first = csv_bytes(1);
  c.require(first == csv_bytes(1) && first == csv_bytes(2),
            "CSV outputs byte-identical across runs and thread counts (" + std::to_string(first.size()) + " bytes)");
}

const std::vector<std::pair<const char*, std::function<void(Criterion&)>>> kCriteria = {
    {"Grassmann core", c1},
    {"S_g cone fibers, (n), (npf)", c2},
    {"S_g Kuo ratio along flat curves", c3},
    {"S_g (a), (b^pi), closed form of beta", c4},
    {"S_g codimension-one slice", c5},
    {"S_g and K_g densities", c6},
    {"S_f suite", c7},
    {"r(t) integral and the z^3 control", c8},
    {"(b) and (r) across the catalog", c9},
    {"numeric substrate and reproducibility", c10},
};

bool run(std::size_t index) {
  Criterion c;
  std::printf("criterion %zu: %s\n", index + 1, kCriteria[index].first);
  try {
    kCriteria[index].second(c);
  } catch (const std::exception& e) {
    c.require(false, std::string("unexpected error: ") + e.what());
  }
  std::printf("criterion %zu %s\n", index + 1, c.pass() ? "PASS" : "FAIL");
  std::fflush(stdout);
  return c.pass();
}

}  // namespace

int main(int argc, char** argv) {
  if (argc == 3 && std::strcmp(argv[1], "--criterion") == 0) {
    const int n = std::atoi(argv[2]);
    if (n < 1 || n > static_cast<int>(kCriteria.size())) {
      std::fprintf(stderr, "criterion must be 1..%zu\n", kCriteria.size());
      return 2;
    }
    return run(static_cast<std::size_t>(n - 1)) ? 0 : 1;
  }
  if (argc != 1) {
    std::fprintf(stderr, "usage: acceptance [--criterion N]\n");
    return 2;
  }
  int failed = 0;
  for (std::size_t i = 0; i < kCriteria.size(); ++i) failed += run(i) ? 0 : 1;
  std::printf("%zu of %zu criteria pass\n", kCriteria.size() - failed, kCriteria.size());
  return failed == 0 ? 0 : 1;
}
