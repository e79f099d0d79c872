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

#include "stratcheck/strata.hpp"

#include <algorithm>
#include <cmath>

#include "stratcheck/error.hpp"

namespace stratcheck {

bool Interval::contains(double v) const {
  const bool above = lo_closed ? v >= lo : v > lo;
  const bool below = hi_closed ? v <= hi : v < hi;
  return above && below;
}

bool Interval::contains(const XScalar& v) const {
  const XScalar l(lo);
  const XScalar h(hi);
  const bool above = lo_closed ? v >= l : v > l;
  const bool below = hi_closed ? v <= h : v < h;
  return above && below;
}

const AffineStratum& Stratum::affine() const {
  if (kind() != StratumKind::Affine) throw InputError(name, "stratum is not affine");
  return std::get<AffineStratum>(shape);
}

const GraphStratum& Stratum::graph() const {
  if (kind() != StratumKind::Graph) throw InputError(name, "stratum is not a graph");
  return std::get<GraphStratum>(shape);
}

const RegionStratum& Stratum::region() const {
  if (kind() != StratumKind::Region) throw InputError(name, "stratum is not a region");
  return std::get<RegionStratum>(shape);
}

const Stratum& StratifiedSet::stratum(std::string_view n) const {
  for (const auto& s : strata)
    if (s.name == n) return s;
  throw InputError(std::string(n), "no stratum with this name in set '" + name + "'");
}

void StratifiedSet::validate() const {
  if (ambient_dim == 0) throw InputError("ambient_dim", "must be positive");
  for (const auto& s : strata) {
    switch (s.kind()) {
      case StratumKind::Affine: {
        const auto& a = s.affine();
        if (a.offset.size() != ambient_dim) throw InputError(s.name, "offset has the wrong dimension");
        for (std::size_t i = 0; i < a.basis.size(); ++i) {
          if (a.basis[i].size() != ambient_dim) throw InputError(s.name, "basis vector has the wrong dimension");
          for (std::size_t j = 0; j <= i; ++j) {
            const double d = dot<double>(a.basis[i], a.basis[j]);
            if (std::fabs(d - (i == j ? 1.0 : 0.0)) > 1e-12) throw InputError(s.name, "basis is not orthonormal");
          }
        }
        if (s.dim != a.basis.size()) throw InputError(s.name, "dimension does not match the basis");
        break;
      }
      case StratumKind::Graph: {
        const auto& g = s.graph();
        if (g.domain.empty()) throw InputError(s.name, "graph domain is empty");
        if (g.layout.ambient != ambient_dim) throw InputError(s.name, "layout does not match the ambient dimension");
        if (s.dim != g.params.size()) throw InputError(s.name, "dimension does not match the parameters");
        for (const auto& b : g.domain) {
          if (b.ranges.size() != g.params.size()) throw InputError(s.name, "domain box has the wrong arity");
          for (const auto& r : b.ranges)
            if (!(r.lo < r.hi)) throw InputError(s.name, "domain interval is empty");
        }
        break;
      }
      case StratumKind::Region: {
        const auto& r = s.region();
        if (r.layout.ambient != ambient_dim) throw InputError(s.name, "layout does not match the ambient dimension");
        if (s.dim != ambient_dim) throw InputError(s.name, "regions are full-dimensional");
        if (r.domain.empty()) throw InputError(s.name, "region domain is empty");
        break;
      }
    }
  }
  for (const auto& [y, x] : pairs) {
    const Stratum& sy = stratum(y);
    const Stratum& sx = stratum(x);
    if (!(sx.dim < sy.dim)) throw InputError(y + "," + x, "pair needs dim X < dim Y");
  }
}

namespace {

std::shared_ptr<const Expr> parse_shared(std::string_view text) {
  return std::make_shared<const Expr>(Expr::parse(text));
}

void check_bound(const Expr& e, const std::vector<std::string>& params, const std::string& where) {
  for (const auto& v : e.free_vars())
    if (std::find(params.begin(), params.end(), v) == params.end())
      throw InputError(where, "expression uses '" + v + "', which is not a parameter");
}

}  // namespace

Stratum make_affine(std::string name, std::vector<Vec<double>> basis, Vec<double> offset) {
  Stratum s;
  s.name = std::move(name);
  s.dim = basis.size();
  s.shape = AffineStratum{std::move(basis), std::move(offset)};
  return s;
}

Stratum make_graph(std::string name, std::string_view expr, std::vector<std::string> params,
                   std::vector<Box> domain, GraphLayout layout) {
  GraphStratum g;
  g.expr_text = std::string(expr);
  g.expr = parse_shared(expr);
  check_bound(*g.expr, params, name);
  g.params = std::move(params);
  g.domain = std::move(domain);
  g.layout = std::move(layout);
  Stratum s;
  s.name = std::move(name);
  s.dim = g.params.size();
  s.shape = std::move(g);
  return s;
}

Stratum make_region(std::string name, std::string_view lower, std::string_view upper,
                    std::vector<std::string> params, std::vector<Box> domain, GraphLayout layout) {
  RegionStratum r;
  r.lower = parse_shared(lower);
  r.upper = parse_shared(upper);
  check_bound(*r.lower, params, name);
  check_bound(*r.upper, params, name);
  r.params = std::move(params);
  r.domain = std::move(domain);
  Stratum s;
  s.name = std::move(name);
  s.dim = layout.ambient;
  r.layout = std::move(layout);
  s.shape = std::move(r);
  return s;
}

GraphLayout layout_from_names(std::span<const std::string> names, std::span<const std::string> params) {
  GraphLayout l;
  l.ambient = names.size();
  l.param_coord.assign(params.size(), names.size());
  bool have_value = false;
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (names[c] == "h") {
      if (have_value) throw InputError("layout", "more than one value coordinate 'h'");
      l.value_coord = c;
      have_value = true;
      continue;
    }
    auto it = std::find(params.begin(), params.end(), names[c]);
    if (it == params.end()) throw InputError("layout", "'" + names[c] + "' is neither 'h' nor a parameter");
    l.param_coord[static_cast<std::size_t>(it - params.begin())] = c;
  }
  if (!have_value) throw InputError("layout", "missing value coordinate 'h'");
  for (std::size_t i = 0; i < params.size(); ++i)
    if (l.param_coord[i] == names.size()) throw InputError("layout", "parameter '" + params[i] + "' is not placed");
  return l;
}

namespace {

const std::vector<std::string> kXZ = {"x", "z"};
const std::vector<std::string> kXHZ = {"x", "h", "z"};

Box box(Interval x, Interval z) { return Box{{x, z}}; }

Stratum x_axis() { return make_affine("X", {{1.0, 0.0, 0.0}}, {0.0, 0.0, 0.0}); }

Stratum graph_over_xz(std::string name, std::string_view expr, std::vector<Box> domain) {
  return make_graph(std::move(name), expr, kXZ, std::move(domain), layout_from_names(kXHZ, kXZ));
}

constexpr const char* kG = "exp((x^2 + 1)*ln(z))";
// f(x,z) = z - z/ln(z) * ln(x + sqrt(x^2 + z^2)), rewritten with
// ln(x + sqrt(x^2+z^2)) = ln(z) + asinh(x/z) so that x < 0 does not cancel.
constexpr const char* kF = "-z*asinh(x/z)/ln(z)";

const std::vector<Box> kNearX = {box({-1.0, 1.0}, {0.0, 0.5})};

}  // namespace

std::vector<std::string> catalog_names() {
  return {"Sf", "Sg", "Kg", "halfplane", "plane_graph_zero", "cusp_demo", "z3_control", "sine_curve_demo"};
}

StratifiedSet catalog(std::string_view name) {
  StratifiedSet s;
  s.name = std::string(name);
  s.ambient_dim = 3;
  if (name == "Sg") {
    s.strata = {graph_over_xz("W", kG, kNearX), x_axis()};
    s.pairs = {{"W", "X"}};
  } else if (name == "Sf") {
    s.strata = {graph_over_xz("Y", kF, kNearX), x_axis()};
    s.pairs = {{"Y", "X"}};
  } else if (name == "Kg") {
    s.strata = {make_region("K", "0", kG, kXZ, kNearX, layout_from_names(kXHZ, kXZ)),
                graph_over_xz("W", kG, kNearX), graph_over_xz("H", "0", kNearX), x_axis()};
    s.pairs = {{"W", "X"}, {"H", "X"}};
    s.notes.push_back(
        "K_g is modelled as the subgraph region {z > 0, 0 <= y <= g(x,z)}; the exact convex hull is not "
        "constructed, and any density discrepancy would be attributable to this model.");
  } else if (name == "halfplane") {
    s.strata = {graph_over_xz("Y", "0", {box({-2.0, 2.0}, {0.0, 2.0})}), x_axis()};
    s.pairs = {{"Y", "X"}};
  } else if (name == "plane_graph_zero") {
    s.strata = {graph_over_xz("Y", "0", {box({-2.0, 2.0}, {0.0, 2.0}), box({-2.0, 2.0}, {-2.0, 0.0})}), x_axis()};
    s.pairs = {{"Y", "X"}};
  } else if (name == "cusp_demo") {
    s.strata = {graph_over_xz("Y", "(1 + x^2)*z^1.5", kNearX), x_axis()};
    s.pairs = {{"Y", "X"}};
  } else if (name == "z3_control") {
    s.strata = {graph_over_xz("Y", "z^3", kNearX), x_axis()};
    s.pairs = {{"Y", "X"}};
  } else if (name == "sine_curve_demo") {
    s.ambient_dim = 2;
    const std::vector<std::string> px = {"x"};
    const std::vector<std::string> names = {"x", "h"};
    s.strata = {make_graph("Y", "sin(1/x)", px, {Box{{{0.0, 0.5}}}}, layout_from_names(names, px)),
                make_affine("X", {{0.0, 1.0}}, {0.0, 0.0})};
    s.notes.push_back(
        "Topologist's sine curve: not definable in an o-minimal structure, no adjacency pair is declared "
        "(both strata are curves) and no verdict is guaranteed.");
  } else {
    throw InputError("set", "unknown catalog set '" + std::string(name) + "'");
  }
  s.validate();
  return s;
}

Retraction::Retraction(const Stratum& target) : target_(target.affine()) {}

template <class S>
Vec<S> Retraction::project(std::span<const S> p) const {
  const std::size_t n = target_.offset.size();
  if (p.size() != n) throw GeometryError("point has the wrong dimension for the retraction");
  Vec<S> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = p[i] - S(target_.offset[i]);
  Vec<S> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = S(target_.offset[i]);
  for (const auto& b : target_.basis) {
    S c(0.0);
    for (std::size_t i = 0; i < n; ++i) c = c + d[i] * S(b[i]);
    for (std::size_t i = 0; i < n; ++i) out[i] = out[i] + c * S(b[i]);
  }
  return out;
}

template Vec<double> Retraction::project<double>(std::span<const double>) const;
template Vec<XScalar> Retraction::project<XScalar>(std::span<const XScalar>) const;

GraphPatch::GraphPatch(const GraphStratum& g) : g_(&g), eval_(*g.expr, g.params) {}

bool GraphPatch::in_domain(std::span<const XScalar> params) const {
  return std::any_of(g_->domain.begin(), g_->domain.end(),
                     [&](const Box& b) { return b.contains<XScalar>(params); });
}

XScalar GraphPatch::value(std::span<const XScalar> params) { return eval_.value(params); }

Vec<XScalar> GraphPatch::point(std::span<const XScalar> params) {
  const XScalar h = eval_.value(params);
  Vec<XScalar> p(g_->layout.ambient, XScalar{});
  for (std::size_t i = 0; i < params.size(); ++i) p[g_->layout.param_coord[i]] = params[i];
  p[g_->layout.value_coord] = h;
  return p;
}

GraphPatch::Sample GraphPatch::at(std::span<const XScalar> params) {
  const Jet<XScalar> j = eval_.jet(params);
  Sample s;
  s.params.assign(params.begin(), params.end());
  s.point.assign(g_->layout.ambient, XScalar{});
  for (std::size_t i = 0; i < params.size(); ++i) s.point[g_->layout.param_coord[i]] = params[i];
  s.point[g_->layout.value_coord] = j.value;
  s.tangent = tangent_of_graph<XScalar>(j.gradient, g_->layout);
  return s;
}

FiberChart fiber_chart(const Stratum& y, const Stratum& x, std::span<const double> x0) {
  const GraphStratum& g = y.graph();
  const AffineStratum& a = x.affine();
  if (a.basis.size() != 1 || g.params.size() != 2)
    throw InputError(y.name + "," + x.name, "fiber analysis needs a 2-parameter graph over a line");
  FiberChart c;
  bool found = false;
  for (std::size_t i = 0; i < 2; ++i) {
    if (std::fabs(std::fabs(a.basis[0][g.layout.param_coord[i]]) - 1.0) < 1e-12) {
      c.along = i;
      c.transverse = 1 - i;
      found = true;
    }
  }
  if (!found) throw InputError(y.name + "," + x.name, "X is not a parameter axis of the graph");
  if (x0.size() != a.offset.size()) throw InputError("basepoint", "wrong dimension");
  Vec<double> d(x0.begin(), x0.end());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= a.offset[i];
  const double along = dot<double>(d, a.basis[0]);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= along * a.basis[0][i];
  if (norm(std::span<const double>(d)) > 1e-9) throw InputError("basepoint", "basepoint is not on X");
  c.along_value = x0[g.layout.param_coord[c.along]];
  for (int sign : {1, -1}) {
    Vec<XScalar> p(2);
    p[c.along] = XScalar(c.along_value);
    p[c.transverse] = XScalar::from_log(sign, -690.0);
    const bool inside = std::any_of(g.domain.begin(), g.domain.end(),
                                    [&](const Box& b) { return b.contains<XScalar>(p); });
    if (inside) c.transverse_signs.push_back(sign);
  }
  if (c.transverse_signs.empty()) throw InputError("basepoint", "no part of " + y.name + " lies over the basepoint");
  return c;
}

std::vector<FiberPoint> sample_fiber(const StratifiedSet& s, const Stratum& y, std::span<const double> x0,
                                     const FiberSampling& sampling) {
  const Stratum* x = nullptr;
  for (const auto& [yn, xn] : s.pairs)
    if (yn == y.name) x = &s.stratum(xn);
  if (!x) throw InputError(y.name, "stratum has no declared pair");
  const FiberChart chart = fiber_chart(y, *x, x0);
  GraphPatch patch(y.graph());
  std::vector<FiberPoint> out;
  for (int sign : chart.transverse_signs) {
    for (int k = 0; k < sampling.count; ++k) {
      Vec<XScalar> p(2);
      p[chart.along] = XScalar(chart.along_value);
      p[chart.transverse] =
          XScalar::from_log(sign, std::log(sampling.radius) + static_cast<double>(k) * std::log(sampling.ratio));
      if (!patch.in_domain(p)) continue;
      FiberPoint fp;
      fp.branch = sign;
      fp.point = patch.point(p);
      fp.params = std::move(p);
      out.push_back(std::move(fp));
    }
  }
  if (out.empty()) throw InputError(y.name, "empty fiber");
  return out;
}

}  // namespace stratcheck
