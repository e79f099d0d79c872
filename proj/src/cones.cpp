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

#include "stratcheck/cones.hpp"

#include <algorithm>
#include <cmath>

#include "stratcheck/error.hpp"

namespace stratcheck {

namespace {

double angle_of(const Vec<double>& a, const Vec<double>& b) { return angle_between(a, b); }

// sin of the largest principal angle is at most |P_A - P_B|_F / sqrt(2), with
// equality when only one angle is nonzero (planes of codimension one).
double plane_angle(const std::vector<double>& pa, const std::vector<double>& pb) {
  double sum = 0.0;
  for (std::size_t i = 0; i < pa.size(); ++i) sum += (pa[i] - pb[i]) * (pa[i] - pb[i]);
  return std::asin(std::min(1.0, std::sqrt(sum / 2.0)));
}

std::vector<SampledCurve> sample_cone_family(const PairAtPoint& p, const ConeConfig& config) {
  FamilyConfig fc = config.family;
  for (double s : config.sigma_sweep)
    if (std::find(fc.sigmas.begin(), fc.sigmas.end(), s) == fc.sigmas.end()) fc.sigmas.push_back(s);
  const auto family = standard_family(p.set(), p.y(), p.x(), p.basepoint(), fc);
  return sample_family(p, family, fc.grid, config.threads);
}

int branch_of(const SampledCurve& c, const PairAtPoint& p) {
  if (c.samples.empty()) return 1;
  const int s = c.samples.front().params[p.chart().transverse].sign();
  return s == 0 ? 1 : s;
}

}  // namespace

ConeConfig default_cone_config() {
  ConeConfig c;
  for (int k = 1; k <= 19; ++k) c.sigma_sweep.push_back(0.05 * k);
  return c;
}

LimitDirection limit_direction(std::string label, int branch, std::span<const Vec<XScalar>> sequence,
                               const ClassifyOptions& options) {
  LimitDirection d;
  d.label = std::move(label);
  d.branch = branch;
  if (sequence.size() < std::max<std::size_t>(options.min_samples, 4)) return d;
  const std::size_t dim = sequence.front().size();
  bool ok = true;
  Vec<double> v(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<XScalar> comp;
    comp.reserve(sequence.size());
    for (const auto& s : sequence) comp.push_back(s[i]);
    LimitEstimate e = classify_limit(std::span<const XScalar>(comp), options);
    if (e.cls != LimitClass::Converged) ok = false;
    v[i] = e.value.to_double();
    d.components.push_back(e);
  }
  if (!ok) return d;
  double n = 0.0;
  for (double c : v) n += c * c;
  n = std::sqrt(n);
  if (!(n > 0.5)) return d;
  for (double& c : v) c /= n;
  d.direction = std::move(v);
  d.conclusive = true;
  return d;
}

ConeFiber cone_fiber(const PairAtPoint& p, const ConeConfig& config) {
  const auto curves = sample_cone_family(p, config);
  return cone_fiber(p, curves, config);
}

ConeFiber cone_fiber(const PairAtPoint& p, std::span<const SampledCurve> curves, const ConeConfig& config) {
  ConeFiber f;
  f.basepoint = p.basepoint();
  const ClassifyOptions opts = config.tol.classify();
  for (const auto& c : curves) {
    std::vector<Vec<XScalar>> seq;
    for (const auto& s : c.samples) {
      try {
        seq.push_back(secant_direction(p, s));
      } catch (const GeometryError&) {
      }
    }
    LimitDirection d = limit_direction(c.label, branch_of(c, p), seq, opts);
    if (!d.conclusive) ++f.inconclusive;
    f.directions.push_back(std::move(d));
  }
  std::sort(f.directions.begin(), f.directions.end(),
            [](const LimitDirection& a, const LimitDirection& b) { return a.label < b.label; });

  std::vector<const LimitDirection*> ok;
  for (const auto& d : f.directions)
    if (d.conclusive) ok.push_back(&d);
  for (std::size_t i = 0; i < ok.size(); ++i)
    for (std::size_t j = i + 1; j < ok.size(); ++j)
      if (ok[i]->branch == ok[j]->branch && angle_of(ok[i]->direction, ok[j]->direction) > config.cluster_angle)
        f.dimension = 1;

  // Single-linkage clusters, in label order.
  std::vector<int> cluster(ok.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < ok.size(); ++i) {
    if (cluster[i] >= 0) continue;
    cluster[i] = next;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const std::size_t a = stack.back();
      stack.pop_back();
      for (std::size_t b = 0; b < ok.size(); ++b)
        if (cluster[b] < 0 && angle_of(ok[a]->direction, ok[b]->direction) <= config.cluster_angle) {
          cluster[b] = next;
          stack.push_back(b);
        }
    }
    ++next;
  }
  for (int c = 0; c < next; ++c) {
    DirectionCluster dc;
    for (std::size_t i = 0; i < ok.size(); ++i) {
      if (cluster[i] != c) continue;
      if (dc.members == 0) dc.representative = ok[i]->direction;
      ++dc.members;
      for (std::size_t j = i + 1; j < ok.size(); ++j)
        if (cluster[j] == c) dc.diameter = std::max(dc.diameter, angle_of(ok[i]->direction, ok[j]->direction));
    }
    f.clusters.push_back(std::move(dc));
  }
  return f;
}

FiberTangentCone fiber_tangent_cone(const PairAtPoint& p, const FiberSampling& sampling, const Tolerances& tol) {
  FiberTangentCone cone;
  cone.basepoint = p.basepoint();
  const auto points = sample_fiber(p.set(), p.y(), p.basepoint(), sampling);
  const Vec<XScalar> x0 = to_extended(std::span<const double>(p.basepoint()));
  for (int branch : p.chart().transverse_signs) {
    std::vector<Vec<XScalar>> seq;
    for (const auto& fp : points) {
      if (fp.branch != branch) continue;
      Vec<XScalar> d(fp.point.size());
      for (std::size_t i = 0; i < d.size(); ++i) d[i] = fp.point[i] - x0[i];
      seq.push_back(unit(std::span<const XScalar>(d)));
    }
    cone.directions.push_back(
        limit_direction(branch > 0 ? "fiber [+]" : "fiber [-]", branch, seq, tol.classify()));
  }
  return cone;
}

double one_sided_hausdorff(std::span<const LimitDirection> from, std::span<const LimitDirection> to) {
  double worst = 0.0;
  for (const auto& a : from) {
    if (!a.conclusive) continue;
    double best = M_PI;
    for (const auto& b : to)
      if (b.conclusive) best = std::min(best, angle_of(a.direction, b.direction));
    worst = std::max(worst, best);
  }
  return worst;
}

NCheck check_n(const PairAtPoint& p, const ConeConfig& config, double threshold) {
  NCheck r;
  r.fiber = cone_fiber(p, config);
  FiberSampling fs;
  fs.radius = config.family.grid.t0;
  fs.ratio = config.family.grid.ratio;
  fs.count = config.family.grid.count;
  r.tangent_cone = fiber_tangent_cone(p, fs, config.tol);
  const bool any_cone = std::any_of(r.fiber.directions.begin(), r.fiber.directions.end(),
                                    [](const auto& d) { return d.conclusive; });
  const bool any_tangent = std::any_of(r.tangent_cone.directions.begin(), r.tangent_cone.directions.end(),
                                       [](const auto& d) { return d.conclusive; });
  if (!any_cone || !any_tangent) return r;
  r.cone_to_tangent = one_sided_hausdorff(r.fiber.directions, r.tangent_cone.directions);
  r.tangent_to_cone = one_sided_hausdorff(r.tangent_cone.directions, r.fiber.directions);
  if (r.cone_to_tangent > threshold || r.tangent_to_cone > threshold) {
    r.outcome = Outcome::Fails;
    double worst = -1.0;
    for (const auto& d : r.fiber.directions) {
      if (!d.conclusive) continue;
      const double dist = one_sided_hausdorff(std::span<const LimitDirection>(&d, 1), r.tangent_cone.directions);
      if (dist > worst) {
        worst = dist;
        r.witness = d;
      }
    }
  } else {
    r.outcome = r.fiber.inconclusive == 0 ? Outcome::HoldsOnFamily : Outcome::Inconclusive;
  }
  return r;
}

Vec<double> point_on(const Stratum& x, double c) {
  if (x.kind() != StratumKind::Affine || x.affine().basis.empty())
    throw InputError(x.name, "grid points need an affine stratum of positive dimension");
  const AffineStratum& a = x.affine();
  Vec<double> p = a.offset;
  for (std::size_t i = 0; i < p.size(); ++i) p[i] += c * a.basis.front()[i];
  return p;
}

NpfCheck check_npf(const StratifiedSet& set, std::string_view y, std::string_view x, std::span<const double> grid,
                   const ConeConfig& config, double threshold) {
  NpfCheck r;
  r.note = "lower semicontinuity of sampled fibers along the grid (necessary for openness)";
  std::vector<double> coords(grid.begin(), grid.end());
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  if (coords.size() < 2) throw InputError("grid", "(npf) needs at least two grid points");
  const Stratum& xs = set.stratum(x);
  for (double c : coords) {
    const Vec<double> x0 = point_on(xs, c);
    PairAtPoint p(set, y, x, x0);
    r.fibers.push_back({c, cone_fiber(p, config)});
  }
  bool inconclusive = false;
  char buf[160];
  for (std::size_t i = 0; i + 1 < r.fibers.size(); ++i) {
    const auto& a = r.fibers[i];
    const auto& b = r.fibers[i + 1];
    if (a.fiber.inconclusive > 0 || b.fiber.inconclusive > 0) inconclusive = true;
    if (a.fiber.dimension != b.fiber.dimension) {
      std::snprintf(buf, sizeof buf, "dimension %d at %g, %d at %g", a.fiber.dimension, a.coordinate,
                    b.fiber.dimension, b.coordinate);
      r.jumps.push_back(buf);
      continue;
    }
    const double h = std::max(one_sided_hausdorff(a.fiber.directions, b.fiber.directions),
                              one_sided_hausdorff(b.fiber.directions, a.fiber.directions));
    if (h > threshold) {
      std::snprintf(buf, sizeof buf, "fiber distance %.4f rad between %g and %g", h, a.coordinate, b.coordinate);
      r.jumps.push_back(buf);
    }
  }
  r.outcome = !r.jumps.empty() ? Outcome::Fails : inconclusive ? Outcome::Inconclusive : Outcome::HoldsOnFamily;
  return r;
}

C1Evidence c1_boundary_evidence(const StratifiedSet& set, std::string_view y, std::string_view x,
                                std::span<const double> grid, const ConeConfig& config, double spread_threshold,
                                double continuity_threshold) {
  const Stratum& ys = set.stratum(y);
  const Stratum& xs = set.stratum(x);
  if (ys.dim != xs.dim + 1) throw InputError("pairs", "C1 boundary evidence needs dim Y = dim X + 1");
  std::vector<double> coords(grid.begin(), grid.end());
  std::sort(coords.begin(), coords.end());
  coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
  C1Evidence ev;
  const ClassifyOptions opts = config.tol.classify();
  bool inconclusive = false;
  for (double c : coords) {
    PairAtPoint p(set, y, x, point_on(xs, c));
    const auto curves = sample_cone_family(p, config);
    C1Point pt;
    pt.coordinate = c;
    const std::size_t n = set.ambient_dim;
    for (const auto& cv : curves) {
      PlaneLimit pl;
      pl.label = cv.label;
      pl.projector.assign(n * n, 0.0);
      if (cv.samples.size() >= opts.min_samples) {
        pl.conclusive = true;
        for (std::size_t i = 0; i < n && pl.conclusive; ++i)
          for (std::size_t j = 0; j < n; ++j) {
            std::vector<XScalar> seq;
            for (const auto& s : cv.samples) {
              XScalar v;
              for (const auto& f : s.tangent.frame()) v += f[i] * f[j];
              seq.push_back(v);
            }
            const LimitEstimate e = classify_limit(std::span<const XScalar>(seq), opts);
            if (e.cls != LimitClass::Converged) {
              pl.conclusive = false;
              break;
            }
            pl.projector[i * n + j] = e.value.to_double();
          }
      }
      if (!pl.conclusive) inconclusive = true;
      pt.planes.push_back(std::move(pl));
    }
    for (std::size_t i = 0; i < pt.planes.size(); ++i)
      for (std::size_t j = i + 1; j < pt.planes.size(); ++j) {
        if (!pt.planes[i].conclusive || !pt.planes[j].conclusive) continue;
        const double a = plane_angle(pt.planes[i].projector, pt.planes[j].projector);
        if (a > pt.spread) {
          pt.spread = a;
          pt.witness = pt.planes[i].label + " vs " + pt.planes[j].label;
        }
      }
    pt.unique = pt.spread < spread_threshold;
    if (pt.unique) pt.witness.clear();
    ev.points.push_back(std::move(pt));
  }
  auto first_plane = [](const C1Point& pt) -> const PlaneLimit* {
    for (const auto& pl : pt.planes)
      if (pl.conclusive) return &pl;
    return nullptr;
  };
  char buf[160];
  for (std::size_t i = 0; i + 1 < ev.points.size(); ++i) {
    const auto& a = ev.points[i];
    const auto& b = ev.points[i + 1];
    if (!a.unique || !b.unique) continue;
    const PlaneLimit* pa = first_plane(a);
    const PlaneLimit* pb = first_plane(b);
    if (!pa || !pb) continue;
    const double ang = plane_angle(pa->projector, pb->projector);
    if (ang > continuity_threshold) {
      std::snprintf(buf, sizeof buf, "limit plane turns by %.4f rad between %g and %g", ang, a.coordinate,
                    b.coordinate);
      ev.discontinuities.push_back(buf);
    }
  }
  const bool against = !ev.discontinuities.empty() ||
                       std::any_of(ev.points.begin(), ev.points.end(), [](const C1Point& p) { return !p.unique; });
  ev.verdict = against ? Evidence::Against : inconclusive ? Evidence::Inconclusive : Evidence::For;
  return ev;
}

bool observed_dimension_ok(const ConeFiber& fiber, const StratifiedSet& set, std::string_view y, std::string_view x) {
  const long bound = static_cast<long>(set.stratum(y).dim) - static_cast<long>(set.stratum(x).dim) - 1;
  return fiber.dimension <= bound;
}

std::string to_string(Evidence e) {
  switch (e) {
    case Evidence::For: return "EVIDENCE_FOR";
    case Evidence::Against: return "EVIDENCE_AGAINST";
    case Evidence::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

}  // namespace stratcheck
