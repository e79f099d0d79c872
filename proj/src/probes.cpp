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

#include "stratcheck/probes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "stratcheck/error.hpp"

namespace stratcheck {

namespace {

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

double ProbeCurve::log_transverse(double log_t) const {
  switch (kind) {
    case CurveKind::Ray: return std::log(coef) + log_t;
    case CurveKind::Vertical: return log_t;
    case CurveKind::Power: return coef * log_t;
    case CurveKind::Flat: return -coef * std::exp(-q * log_t);
    case CurveKind::Sigma: return std::log(coef) * std::exp(-2.0 * log_t);
    case CurveKind::Slice: break;
  }
  return log_t;
}

double ProbeCurve::min_log_t(double logmag_cap) const {
  switch (kind) {
    case CurveKind::Flat: return std::log(coef / -logmag_cap) / q;
    case CurveKind::Sigma: return 0.5 * std::log(std::log(coef) / logmag_cap);
    default: return -HUGE_VAL;
  }
}

std::vector<double> sample_geometric(double t0, double ratio, int count) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("ratio", "must lie in (0, 1)");
  if (count > 60) throw InputError("count", "at most 60 samples");
  std::vector<double> t;
  double v = t0;
  for (int k = 0; k < count; ++k) {
    t.push_back(v);
    v *= ratio;
  }
  return t;
}

std::vector<double> sample_geometric_log(double t0, double ratio, int count) {
  if (!(ratio > 0.0 && ratio < 1.0)) throw InputError("ratio", "must lie in (0, 1)");
  if (count > 60) throw InputError("count", "at most 60 samples");
  std::vector<double> t;
  for (int k = 0; k < count; ++k) t.push_back(std::log(t0) + k * std::log(ratio));
  return t;
}

std::vector<ProbeCurve> standard_family(const StratifiedSet& s, const Stratum& y, const Stratum& x,
                                        std::span<const double> x0, const FamilyConfig& config) {
  (void)s;
  const FiberChart chart = fiber_chart(y, x, x0);
  std::vector<ProbeCurve> out;
  const bool two_branches = chart.transverse_signs.size() > 1;
  for (int branch : chart.transverse_signs) {
    const std::string branch_tag = two_branches ? (branch > 0 ? " [+]" : " [-]") : "";
    std::vector<int> sides = {1};
    if (config.mirrored) sides.push_back(-1);
    auto add = [&](CurveKind kind, double coef, double q, std::string name) {
      for (int side : sides) {
        ProbeCurve c;
        c.kind = kind;
        c.coef = coef;
        c.q = q;
        c.side = side;
        c.branch = branch;
        c.system = ScalarSystem::Extended;
        c.label = name + (side < 0 ? " mirrored" : "") + branch_tag;
        out.push_back(std::move(c));
      }
    };
    for (double c : config.rays) add(CurveKind::Ray, c, 0.0, "ray c=" + fmt_num(c));
    if (config.vertical) {
      ProbeCurve c;
      c.kind = CurveKind::Vertical;
      c.branch = branch;
      c.label = "vertical" + branch_tag;
      out.push_back(std::move(c));
    }
    for (double p : config.powers) add(CurveKind::Power, p, 0.0, "power p=" + fmt_num(p));
    for (double cc : config.flat_c)
      for (double q : config.flat_q) add(CurveKind::Flat, cc, q, "flat C=" + fmt_num(cc) + " q=" + fmt_num(q));
    for (double sg : config.sigmas) add(CurveKind::Sigma, sg, 0.0, "sigma=" + fmt_num(sg));
  }
  return out;
}

SampledCurve sample_curve(GraphPatch& patch, const FiberChart& chart, std::span<const double> x0,
                          const ProbeCurve& curve, const ProbeGrid& grid) {
  const GraphLayout& layout = patch.stratum().layout;
  double ratio = grid.ratio;
  const double floor_log = curve.min_log_t(grid.logmag_cap);
  if (std::isfinite(floor_log) && grid.count > 1) {
    const double fit = std::exp((floor_log - std::log(grid.t0)) / (grid.count - 1));
    ratio = std::max(ratio, fit);
  }
  SampledCurve sc;
  sc.label = curve.label;
  sc.kind = curve.kind;
  sc.system = curve.system;
  const XScalar base(chart.along_value);
  for (double log_t : sample_geometric_log(grid.t0, ratio, grid.count)) {
    const double lt = curve.log_transverse(log_t);
    if (!(lt >= grid.logmag_cap)) continue;
    const XScalar t = XScalar::from_log(1, log_t);
    const XScalar along_offset = curve.kind == CurveKind::Vertical ? XScalar{} : XScalar(curve.side) * t;
    Vec<XScalar> params(2);
    params[chart.along] = base + along_offset;
    params[chart.transverse] = XScalar::from_log(curve.branch, lt);
    if (!patch.in_domain(params)) continue;
    GraphPatch::Sample s = patch.at(params);
    ProbeSample ps;
    ps.log_t = log_t;
    ps.rel.assign(layout.ambient, XScalar{});
    ps.rel[layout.param_coord[chart.along]] = along_offset;
    ps.rel[layout.param_coord[chart.transverse]] = params[chart.transverse];
    ps.rel[layout.value_coord] = s.point[layout.value_coord] - XScalar(x0[layout.value_coord]);
    // The graph equation residual, re-evaluated independently of the sample.
    const XScalar h = patch.value(params);
    const XScalar y = s.point[layout.value_coord];
    const XScalar scale = std::max(XScalar(1.0), abs(y));
    sc.max_residual = std::max(sc.max_residual, (abs(h - y) / scale).to_double());
    ps.params = std::move(params);
    ps.tangent = std::move(s.tangent);
    sc.samples.push_back(std::move(ps));
  }
  return sc;
}

namespace {

XScalar magnitude_diff(const XScalar& a, const XScalar& b) { return abs(a - b); }

}  // namespace

LimitEstimate classify_limit(std::span<const XScalar> v, const ClassifyOptions& o) {
  const std::size_t n = v.size();
  if (n < o.min_samples || n < 4)
    throw InputError("", "classify_limit needs at least " + std::to_string(o.min_samples) + " samples, got " +
                             std::to_string(n));
  LimitEstimate e;
  e.samples = n;
  e.tolerance = o.tol;
  const XScalar last = v[n - 1];
  const XScalar band = XScalar(o.tol) * std::max(XScalar(1.0), abs(last));

  bool cauchy = true;
  for (std::size_t i = n - 4; i < n && cauchy; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (magnitude_diff(v[i], v[j]) > band) {
        cauchy = false;
        break;
      }
  if (cauchy) {
    e.cls = LimitClass::Converged;
    e.value = last;
    if (o.aitken) {
      auto aitken = [&](std::size_t end, XScalar& out) {
        const XScalar d1 = v[end] - v[end - 1];
        const XScalar d0 = v[end - 1] - v[end - 2];
        const XScalar denom = d1 - d0;
        if (denom.is_zero()) return false;
        out = v[end] - d1 * d1 / denom;
        return true;
      };
      XScalar accel, previous;
      if (aitken(n - 1, accel) && aitken(n - 2, previous) &&
          magnitude_diff(accel, previous) <= XScalar(0.1) * band &&
          magnitude_diff(accel, last) <= XScalar(10.0) * band) {
        // A sign change means the extrapolated limit is zero to within its noise.
        e.value = accel.sign() == last.sign() ? accel : XScalar::zero();
      }
    }
    return e;
  }

  XScalar max_abs;
  for (const auto& x : v) max_abs = std::max(max_abs, abs(x));

  // Growth past the threshold over the final four samples.
  bool growing_tail = true;
  for (std::size_t i = n - 3; i < n; ++i)
    if (abs(v[i]) < abs(v[i - 1])) growing_tail = false;
  if (growing_tail && abs(last) > XScalar(o.diverging_threshold) && abs(last) > abs(v[n - 4])) {
    e.cls = LimitClass::Diverging;
    e.value = last;
    return e;
  }

  // Monotone growth whose increments do not decay: unbounded at a rate that
  // is at least linear in the sample index.
  const std::size_t w = std::max<std::size_t>(6, n / 2);
  if (w <= n) {
    const std::size_t start = n - w;
    bool increasing = true;
    std::vector<XScalar> inc;
    for (std::size_t i = start + 1; i < n; ++i) {
      const XScalar d = abs(v[i]) - abs(v[i - 1]);
      if (d.sign() <= 0 || v[i].sign() != v[start].sign()) increasing = false;
      inc.push_back(d);
    }
    if (increasing) {
      const std::size_t h = inc.size() / 2;
      XScalar first;
      XScalar second;
      for (std::size_t i = 0; i < h; ++i) first += inc[i];
      for (std::size_t i = inc.size() - h; i < inc.size(); ++i) second += inc[i];
      if (second >= XScalar(0.9) * first) {
        e.cls = LimitClass::Diverging;
        e.value = last;
        return e;
      }
    }
  }

  if (max_abs <= XScalar(o.bounded_cap)) {
    e.cls = LimitClass::Bounded;
    e.value = max_abs;
    return e;
  }
  e.cls = LimitClass::Inconclusive;
  e.value = last;
  return e;
}

LimitEstimate classify_limit(std::span<const double> values, const ClassifyOptions& options) {
  std::vector<XScalar> x(values.begin(), values.end());
  return classify_limit(std::span<const XScalar>(x), options);
}

std::string to_string(LimitClass c) {
  switch (c) {
    case LimitClass::Converged: return "Converged";
    case LimitClass::Bounded: return "Bounded";
    case LimitClass::Diverging: return "Diverging";
    case LimitClass::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string to_string(CurveKind k) {
  switch (k) {
    case CurveKind::Ray: return "ray";
    case CurveKind::Vertical: return "vertical";
    case CurveKind::Power: return "power";
    case CurveKind::Flat: return "flat";
    case CurveKind::Sigma: return "sigma";
    case CurveKind::Slice: return "slice";
  }
  return "?";
}

std::string describe(const LimitEstimate& e) {
  switch (e.cls) {
    case LimitClass::Converged: return "Converged(" + to_string(e.value, 6) + ")";
    case LimitClass::Bounded: return "Bounded(" + to_string(e.value, 6) + ")";
    case LimitClass::Diverging: return "Diverging(last " + to_string(e.value, 6) + ")";
    case LimitClass::Inconclusive: return "Inconclusive(last " + to_string(e.value, 6) + ")";
  }
  return "?";
}

}  // namespace stratcheck
