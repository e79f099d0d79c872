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

#include "stratcheck/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <utility>

#include "stratcheck/error.hpp"
#include "stratcheck/parallel.hpp"

namespace stratcheck {

ClassifyOptions Tolerances::classify() const {
  ClassifyOptions o;
  o.tol = converged;
  o.bounded_cap = bounded;
  o.diverging_threshold = diverging;
  return o;
}

PairAtPoint::PairAtPoint(const StratifiedSet& set, std::string_view y, std::string_view x,
                         std::span<const double> x0)
    : set_(&set), x0_(x0.begin(), x0.end()) {
  const bool declared = std::any_of(set.pairs.begin(), set.pairs.end(),
                                    [&](const auto& pr) { return pr.first == y && pr.second == x; });
  if (!declared)
    throw InputError(std::string(y) + "," + std::string(x), "not a declared pair of set '" + set.name + "'");
  y_ = &set.stratum(y);
  x_ = &set.stratum(x);
  if (x0.size() != set.ambient_dim) throw InputError("basepoint", "wrong dimension");
  chart_ = fiber_chart(*y_, *x_, x0);
  std::vector<Vec<XScalar>> frame;
  for (const auto& b : x_->affine().basis) frame.push_back(to_extended(std::span<const double>(b)));
  tx_ = Subspace<XScalar>::from_orthonormal(set.ambient_dim, std::move(frame));
}

Vec<XScalar> PairAtPoint::project_rel(std::span<const XScalar> rel) const { return tx_.project(rel); }

namespace {

Vec<XScalar> secant(const PairAtPoint& p, const ProbeSample& y) {
  const Vec<XScalar> proj = p.project_rel(y.rel);
  Vec<XScalar> d(y.rel.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = y.rel[i] - proj[i];
  return d;
}

XScalar norm_of(const Vec<XScalar>& v) { return norm(std::span<const XScalar>(v)); }

}  // namespace

XScalar alpha(const PairAtPoint& p, const ProbeSample& y) { return delta(p.x_tangent(), y.tangent); }

Vec<XScalar> secant_direction(const PairAtPoint& p, const ProbeSample& y) {
  const Vec<XScalar> d = secant(p, y);
  if (norm_of(d).is_zero()) throw GeometryError("point lies on X: secant direction undefined");
  return unit(std::span<const XScalar>(d));
}

XScalar beta(const PairAtPoint& p, const ProbeSample& y) {
  const Vec<XScalar> u = secant_direction(p, y);
  return eta(std::span<const XScalar>(u), y.tangent);
}

XScalar kuo_ratio(const PairAtPoint& p, const ProbeSample& y) {
  const XScalar d = norm_of(secant(p, y));
  if (d.is_zero()) throw GeometryError("point lies on X: Kuo ratio undefined");
  return norm_of(y.rel) * alpha(p, y) / d;
}

XScalar verdier_quotient(const PairAtPoint& p, const ProbeSample& y, std::span<const XScalar> x_rel) {
  if (x_rel.size() != y.rel.size()) throw GeometryError("dimension mismatch");
  Vec<XScalar> d(y.rel.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = y.rel[i] - x_rel[i];
  const XScalar dist = norm_of(d);
  if (dist.is_zero()) throw GeometryError("y = x: Verdier quotient undefined");
  // X is affine, so T_x X is the same plane for every x.
  return alpha(p, y) / dist;
}

XScalar re_quantity(const PairAtPoint& p, double e, const ProbeSample& y) {
  const XScalar d = norm_of(secant(p, y));
  if (d.is_zero()) throw GeometryError("point lies on X: (r^e) quantity undefined");
  const XScalar base = norm_of(p.project_rel(y.rel));
  XScalar factor(1.0);
  if (e != 0.0) factor = base.is_zero() ? XScalar{} : pow(base, XScalar(e));
  return factor * alpha(p, y) / d;
}

std::vector<SampledCurve> sample_family(const PairAtPoint& p, std::span<const ProbeCurve> family,
                                        const ProbeGrid& grid, int threads) {
  std::vector<SampledCurve> out(family.size());
  parallel_for(family.size(), threads, [&](std::size_t i) {
    GraphPatch patch(p.y().graph());
    out[i] = sample_curve(patch, p.chart(), p.basepoint(), family[i], grid);
  });
  return out;
}

RProfilePoint r_profile(const PairAtPoint& p, double t, const RProfileConfig& config) {
  if (!(t > 0.0)) throw InputError("t", "r_profile needs t > 0");
  GraphPatch patch(p.y().graph());
  const GraphLayout& layout = p.y().graph().layout;
  const FiberChart& chart = p.chart();
  const double deep = std::min(config.max_depth, std::max(config.min_depth, 10.0 / (t * t)));
  const double shallow = std::fabs(config.max_log_transverse);
  const double l0 = std::log(shallow);
  const double l1 = std::log(deep);
  RProfilePoint best;
  best.t = t;
  bool any = false;
  const XScalar base(chart.along_value);
  for (int side : {1, -1}) {
    const XScalar offset = XScalar(side * t);
    for (int branch : chart.transverse_signs) {
      for (int k = 0; k < config.points; ++k) {
        const double frac = config.points > 1 ? static_cast<double>(k) / (config.points - 1) : 0.0;
        const double log_s = -std::exp(l0 + frac * (l1 - l0));
        Vec<XScalar> params(2);
        params[chart.along] = base + offset;
        params[chart.transverse] = XScalar::from_log(branch, log_s);
        if (!patch.in_domain(params)) continue;
        GraphPatch::Sample s = patch.at(params);
        ProbeSample ps;
        ps.rel.assign(layout.ambient, XScalar{});
        ps.rel[layout.param_coord[chart.along]] = offset;
        ps.rel[layout.param_coord[chart.transverse]] = params[chart.transverse];
        ps.rel[layout.value_coord] = s.point[layout.value_coord] - XScalar(p.basepoint()[layout.value_coord]);
        ps.tangent = std::move(s.tangent);
        const XScalar d = norm_of(secant(p, ps));
        const XScalar v = alpha(p, ps) / d;
        if (!any || v > best.r) {
          best.r = v;
          best.argmax_log_s = log_s;
          best.argmax_side = side;
          any = true;
        }
      }
    }
  }
  if (!any) throw InputError("r_profile", "empty fiber sample at t = " + std::to_string(t));
  return best;
}

std::vector<double> default_eps_grid() {
  std::vector<double> eps;
  for (int k = 0; k < 14; ++k) eps.push_back(0.1 * std::pow(0.4, k));
  return eps;
}

RintResult rint_from_profile(std::span<const double> eps, std::span<const RProfilePoint> profile, double tol) {
  if (eps.size() < 12 || eps.size() != profile.size())
    throw InputError("eps_grid", "rint_check needs a geometric grid of at least 12 points");
  RintResult res;
  res.eps.assign(eps.begin(), eps.end());
  res.profile.assign(profile.begin(), profile.end());
  res.partials.push_back(0.0);
  std::vector<double> inc;
  for (std::size_t k = 1; k < eps.size(); ++k) {
    const double r0 = profile[k - 1].r.to_double();
    const double r1 = profile[k].r.to_double();
    const double d = 0.5 * (eps[k - 1] - eps[k]) * (r0 + r1);
    inc.push_back(d);
    res.partials.push_back(res.partials.back() + d);
  }
  const double total = res.partials.back();
  const double band = tol * std::max(1.0, std::fabs(total));
  bool settled = true;
  for (std::size_t k = inc.size() - 4; k < inc.size(); ++k)
    if (std::fabs(inc[k]) > band) settled = false;
  std::vector<double> ratios;
  for (std::size_t k = 1; k < inc.size(); ++k)
    if (inc[k - 1] > 0.0) ratios.push_back(inc[k] / inc[k - 1]);
  if (!ratios.empty()) {
    std::vector<double> sorted = ratios;
    std::sort(sorted.begin(), sorted.end());
    res.median_ratio = sorted[sorted.size() / 2];
  }
  if (settled) {
    res.cls = RintClass::Converging;
    res.integral = total;
    return res;
  }
  const double rho = res.median_ratio;
  if (rho <= 0.5) {
    res.cls = RintClass::Converging;
    res.integral = total + inc.back() * rho / (1.0 - rho);
    return res;
  }
  bool growing = true;
  for (std::size_t k = 1; k < res.partials.size(); ++k)
    if (res.partials[k] < res.partials[k - 1]) growing = false;
  res.cls = (rho >= 0.7 && growing) ? RintClass::Diverging : RintClass::Inconclusive;
  return res;
}

RintResult rint_check(const PairAtPoint& p, std::span<const double> eps_grid, double tol,
                      const RProfileConfig& config) {
  std::vector<RProfilePoint> profile;
  for (double e : eps_grid) profile.push_back(r_profile(p, e, config));
  return rint_from_profile(eps_grid, profile, tol);
}

Condition Condition::parse(std::string_view name) {
  Condition c;
  if (name == "a") {
    c.kind = Kind::A;
  } else if (name == "bpi") {
    c.kind = Kind::Bpi;
  } else if (name == "b") {
    c.kind = Kind::B;
  } else if (name == "r") {
    c.kind = Kind::R;
  } else if (name == "w") {
    c.kind = Kind::W;
  } else if (name == "rint") {
    c.kind = Kind::Rint;
  } else if (name.size() > 4 && name.substr(0, 3) == "re(" && name.back() == ')') {
    c.kind = Kind::Re;
    const std::string arg(name.substr(3, name.size() - 4));
    char* end = nullptr;
    c.e = std::strtod(arg.c_str(), &end);
    if (end == arg.c_str() || *end != '\0' || !(c.e >= 0.0 && c.e < 1.0))
      throw InputError("conditions", "bad exponent in '" + std::string(name) + "' (need 0 <= e < 1)");
  } else {
    throw InputError("conditions", "unknown condition '" + std::string(name) + "'");
  }
  return c;
}

std::string Condition::name() const {
  switch (kind) {
    case Kind::A: return "a";
    case Kind::Bpi: return "bpi";
    case Kind::B: return "b";
    case Kind::R: return "r";
    case Kind::W: return "w";
    case Kind::Rint: return "rint";
    case Kind::Re: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "re(%g)", e);
      return buf;
    }
  }
  return "?";
}

namespace {

enum class Target { Zero, Bounded };

CurveVerdict judge(std::string label, CurveKind kind, std::vector<XScalar> values, std::vector<double> log_t,
                   Target target, const Tolerances& tol) {
  CurveVerdict cv;
  cv.label = std::move(label);
  cv.kind = kind;
  cv.values = std::move(values);
  cv.log_t = std::move(log_t);
  const ClassifyOptions opts = tol.classify();
  if (cv.values.size() < opts.min_samples) {
    cv.limit.cls = LimitClass::Inconclusive;
    cv.limit.samples = cv.values.size();
    cv.limit.tolerance = opts.tol;
    return cv;
  }
  cv.limit = classify_limit(std::span<const XScalar>(cv.values), opts);
  switch (cv.limit.cls) {
    case LimitClass::Converged:
      cv.conclusive = true;
      cv.conforming = target == Target::Bounded || abs(cv.limit.value) <= XScalar(tol.converged);
      break;
    case LimitClass::Diverging:
      cv.conclusive = true;
      cv.conforming = false;
      break;
    case LimitClass::Bounded:
      cv.conclusive = target == Target::Bounded;
      cv.conforming = target == Target::Bounded;
      break;
    case LimitClass::Inconclusive:
      break;
  }
  return cv;
}

// Witness: a failing curve with a finite limit before a diverging one, flat
// curves first, then the largest limit.
void aggregate(Verdict& v) {
  const CurveVerdict* witness = nullptr;
  bool inconclusive = false;
  for (const auto& c : v.curves) {
    if (!c.conclusive) {
      inconclusive = true;
      continue;
    }
    if (c.conforming) continue;
    if (!witness) {
      witness = &c;
      continue;
    }
    const auto rank = [](const CurveVerdict& cv) {
      return std::pair{cv.limit.cls == LimitClass::Converged ? 0 : 1, cv.kind == CurveKind::Flat ? 0 : 1};
    };
    const auto rc = rank(c);
    const auto rw = rank(*witness);
    if (rc < rw || (rc == rw && rc.first == 0 && abs(c.limit.value) > abs(witness->limit.value))) witness = &c;
  }
  if (witness) {
    v.outcome = Outcome::Fails;
    v.witness = *witness;
  } else {
    v.outcome = inconclusive ? Outcome::Inconclusive : Outcome::HoldsOnFamily;
  }
}

template <class F>
Verdict per_curve(const std::string& name, std::span<const SampledCurve> curves, Target target,
                  const Tolerances& tol, F quantity, const std::string& variant = "") {
  Verdict v;
  v.condition = name;
  for (const auto& c : curves) {
    std::vector<XScalar> values;
    std::vector<double> log_t;
    for (const auto& s : c.samples) {
      values.push_back(quantity(s));
      log_t.push_back(s.log_t);
    }
    v.curves.push_back(judge(c.label + variant, c.kind, std::move(values), std::move(log_t), target, tol));
  }
  aggregate(v);
  return v;
}

}  // namespace

Verdict check_condition(const PairAtPoint& p, const Condition& c, std::span<const SampledCurve> curves,
                        const Tolerances& tol, std::span<const double> eps_grid) {
  using K = Condition::Kind;
  if (c.kind != K::Rint && curves.empty()) throw InputError("family", "probe family is empty");
  switch (c.kind) {
    case K::A:
      return per_curve("a", curves, Target::Zero, tol, [&](const ProbeSample& s) { return alpha(p, s); });
    case K::Bpi:
      return per_curve("bpi", curves, Target::Zero, tol, [&](const ProbeSample& s) { return beta(p, s); });
    case K::R:
      return per_curve("r", curves, Target::Zero, tol, [&](const ProbeSample& s) { return kuo_ratio(p, s); });
    case K::Re:
      return per_curve(c.name(), curves, Target::Bounded, tol,
                       [&](const ProbeSample& s) { return re_quantity(p, c.e, s); });
    case K::W: {
      Verdict at_proj = per_curve(
          "w", curves, Target::Bounded, tol,
          [&](const ProbeSample& s) { return verdier_quotient(p, s, p.project_rel(s.rel)); }, " [x=pi(y)]");
      const Vec<XScalar> origin(p.set().ambient_dim, XScalar{});
      Verdict at_base = per_curve(
          "w", curves, Target::Bounded, tol,
          [&](const ProbeSample& s) { return verdier_quotient(p, s, origin); }, " [x=x0]");
      for (auto& cv : at_base.curves) at_proj.curves.push_back(std::move(cv));
      aggregate(at_proj);
      at_proj.note = "sequences with x = pi(y) and x = x0";
      return at_proj;
    }
    case K::B: {
      Verdict a = check_condition(p, Condition{K::A, 0.0}, curves, tol);
      Verdict b = check_condition(p, Condition{K::Bpi, 0.0}, curves, tol);
      Verdict v;
      v.condition = "b";
      for (auto& cv : a.curves) {
        cv.label += " [a]";
        v.curves.push_back(std::move(cv));
      }
      for (auto& cv : b.curves) {
        cv.label += " [bpi]";
        v.curves.push_back(std::move(cv));
      }
      if (a.outcome == Outcome::Fails || b.outcome == Outcome::Fails) {
        v.outcome = Outcome::Fails;
        v.witness = a.outcome == Outcome::Fails ? a.witness : b.witness;
        if (v.witness) v.witness->label += a.outcome == Outcome::Fails ? " [a]" : " [bpi]";
      } else if (a.outcome == Outcome::HoldsOnFamily && b.outcome == Outcome::HoldsOnFamily) {
        v.outcome = Outcome::HoldsOnFamily;
      } else {
        v.outcome = Outcome::Inconclusive;
      }
      v.note = "conjunction of (a) and (bpi)";
      return v;
    }
    case K::Rint: {
      const std::vector<double> grid =
          eps_grid.empty() ? default_eps_grid() : std::vector<double>(eps_grid.begin(), eps_grid.end());
      Verdict v;
      v.condition = "rint";
      v.rint = rint_check(p, grid, tol.converged);
      CurveVerdict cv;
      cv.label = "r(t) partial integrals";
      cv.conclusive = v.rint->cls != RintClass::Inconclusive;
      cv.conforming = v.rint->cls == RintClass::Converging;
      cv.limit.cls = v.rint->cls == RintClass::Converging  ? LimitClass::Converged
                     : v.rint->cls == RintClass::Diverging ? LimitClass::Diverging
                                                           : LimitClass::Inconclusive;
      cv.limit.value = XScalar(v.rint->cls == RintClass::Converging ? v.rint->integral : v.rint->partials.back());
      cv.limit.samples = grid.size();
      cv.limit.tolerance = tol.converged;
      for (std::size_t k = 0; k < grid.size(); ++k) {
        cv.values.push_back(XScalar(v.rint->partials[k]));
        cv.log_t.push_back(std::log(grid[k]));
      }
      v.curves.push_back(cv);
      aggregate(v);
      return v;
    }
  }
  throw InputError("conditions", "unhandled condition");
}

SlicedPair slice_pair(const PairAtPoint& p, double a, const SliceConfig& config) {
  const GraphStratum& g = p.y().graph();
  const GraphLayout& layout = g.layout;
  const FiberChart& chart = p.chart();
  JetEvaluator<XScalar> ev(*g.expr, g.params);
  const XScalar slope(a);
  const int branch = chart.transverse_signs.front();
  SlicedPair out;
  out.slope = a;
  const XScalar base(chart.along_value);
  for (int side : {1, -1}) {
    SampledCurve sc;
    char label[64];
    std::snprintf(label, sizeof label, "slice a=%g %s", a, side > 0 ? "x>0" : "x<0");
    sc.label = label;
    sc.kind = CurveKind::Slice;
    for (double log_t : sample_geometric_log(config.t0, config.ratio, config.count)) {
      const XScalar offset = XScalar(side) * XScalar::from_log(1, log_t);
      Vec<XScalar> params(2);
      params[chart.along] = base + offset;
      auto residual = [&](double w) {
        params[chart.transverse] = XScalar::from_log(branch, w);
        return ev.value(params) - slope * params[chart.transverse];
      };
      const double x = (base + offset).to_double();
      double lo = config.w_lo;
      double hi = config.w_hi;
      const int s_lo = residual(lo).sign();
      const int s_hi = residual(hi).sign();
      if (s_lo == s_hi && s_lo != 0) {
        out.failures.push_back({x, "no root in bracket"});
        continue;
      }
      double root = s_lo == 0 ? lo : hi;
      if (s_lo != 0 && s_hi != 0) {
        for (int it = 0; it < 400; ++it) {
          const double mid = 0.5 * (lo + hi);
          const int sm = residual(mid).sign();
          if (sm == 0) {
            lo = hi = mid;
            break;
          }
          if (sm == s_lo) {
            lo = mid;
          } else {
            hi = mid;
          }
          if (hi - lo <= config.rel_tol * std::max(1.0, std::fabs(mid))) break;
        }
        root = 0.5 * (lo + hi);
      }
      params[chart.transverse] = XScalar::from_log(branch, root);
      if (!g.domain.empty() &&
          !std::any_of(g.domain.begin(), g.domain.end(), [&](const Box& b) { return b.contains<XScalar>(params); })) {
        out.failures.push_back({x, "root outside the stratum domain"});
        continue;
      }
      const Jet<XScalar> j = ev.jet(params);
      const XScalar fs = j.gradient[chart.transverse] - slope;
      if (fs.is_zero()) {
        out.failures.push_back({x, "slice is singular (tangent to the plane)"});
        continue;
      }
      const XScalar ds = -j.gradient[chart.along] / fs;
      Vec<XScalar> tv(layout.ambient, XScalar{});
      tv[layout.param_coord[chart.along]] = XScalar(1.0);
      tv[layout.param_coord[chart.transverse]] = ds;
      tv[layout.value_coord] = slope * ds;
      ProbeSample ps;
      ps.log_t = log_t;
      ps.tangent = orthonormalize<XScalar>(std::vector<Vec<XScalar>>{tv}, layout.ambient);
      ps.rel.assign(layout.ambient, XScalar{});
      ps.rel[layout.param_coord[chart.along]] = offset;
      ps.rel[layout.param_coord[chart.transverse]] = params[chart.transverse];
      ps.rel[layout.value_coord] = j.value - XScalar(p.basepoint()[layout.value_coord]);
      const XScalar scale = std::max(XScalar(1.0), abs(j.value));
      sc.max_residual = std::max(sc.max_residual, (abs(j.value - slope * params[chart.transverse]) / scale).to_double());
      ps.params = params;
      sc.samples.push_back(std::move(ps));
    }
    if (!sc.samples.empty()) out.branches.push_back(std::move(sc));
  }
  if (out.branches.empty()) {
    std::string msg = "no root in bracket for any sampled x";
    if (!out.failures.empty()) msg += " (first: x = " + std::to_string(out.failures.front().x) + ")";
    throw GeometryError(msg);
  }
  return out;
}

std::string to_string(Outcome o) {
  switch (o) {
    case Outcome::HoldsOnFamily: return "HOLDS_ON_FAMILY";
    case Outcome::Fails: return "FAILS";
    case Outcome::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

std::string to_string(RintClass c) {
  switch (c) {
    case RintClass::Converging: return "converging";
    case RintClass::Diverging: return "diverging";
    case RintClass::Inconclusive: return "inconclusive";
  }
  return "?";
}

}  // namespace stratcheck
