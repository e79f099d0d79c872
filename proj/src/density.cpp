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

#include "stratcheck/density.hpp"

#include <algorithm>
#include <cfenv>
#include <cmath>
#include <cstdio>
#include <random>

#include "stratcheck/error.hpp"
#include "stratcheck/kernels.hpp"
#include "stratcheck/parallel.hpp"

namespace stratcheck {

namespace {

constexpr int kFlags = FE_INVALID | FE_OVERFLOW | FE_UNDERFLOW | FE_DIVBYZERO;

struct CellSums {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::uint64_t hits = 0;
  bool fallback = false;
};

// Everything a cell needs, in ball-normalized form: a sample v in [-1,1]^k
// maps to the parameters centre_params + u*v.
struct Integrand {
  bool region = false;
  std::size_t k = 0;               // measure dimension = dimension of the v cube
  std::vector<std::size_t> v_of_param;  // index into v of each parameter
  std::size_t v_of_value = 0;      // regions: index into v of the value coordinate
  std::vector<double> centre_params;
  double centre_value = 0.0;
  double u = 0.0;
  const std::vector<Box>* domain = nullptr;
  const Expr* graph = nullptr;
  const Expr* lower = nullptr;
  const Expr* upper = nullptr;
  const std::vector<std::string>* params = nullptr;
};

bool in_domain(const std::vector<Box>& domain, std::span<const double> p) {
  if (domain.empty()) return true;
  return std::any_of(domain.begin(), domain.end(), [&](const Box& b) { return b.contains<double>(p); });
}

bool in_domain(const std::vector<Box>& domain, std::span<const XScalar> p) {
  if (domain.empty()) return true;
  return std::any_of(domain.begin(), domain.end(), [&](const Box& b) { return b.contains<XScalar>(p); });
}

bool all_finite(const double* v, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

// Double-precision pass over one cell. Returns false when an FP exception
// was raised, in which case the caller redoes the cell in extended range.
bool cell_double(const Integrand& in, const std::vector<std::vector<double>>& v, std::size_t n, CellSums& out) {
  const kernels::Table& k = kernels::active();
  const std::size_t np = in.v_of_param.size();
  std::feclearexcept(FE_ALL_EXCEPT);

  std::vector<std::vector<double>> p(np, std::vector<double>(n));
  std::vector<double> point(np);
  std::vector<std::size_t> keep;
  keep.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < np; ++j) point[j] = in.centre_params[j] + in.u * v[in.v_of_param[j]][i];
    if (!in_domain(*in.domain, point)) continue;
    for (std::size_t j = 0; j < np; ++j) p[j][keep.size()] = point[j];
    keep.push_back(i);
  }
  const std::size_t m = keep.size();
  if (m == 0) return std::fetestexcept(kFlags) == 0;

  std::vector<std::vector<double>> vc(in.k, std::vector<double>(m));
  for (std::size_t d = 0; d < in.k; ++d)
    for (std::size_t i = 0; i < m; ++i) vc[d][i] = v[d][keep[i]];
  std::vector<const double*> inputs(np);
  for (std::size_t j = 0; j < np; ++j) inputs[j] = p[j].data();
  std::vector<double> cv(m, in.centre_value);
  std::vector<double> uu(m, in.u);
  kernels::BallSums sums;

  if (!in.region) {
    BatchEvaluator ev(*in.graph, *in.params, m);
    ev.evaluate(inputs, m, true);
    std::vector<double> w(m), jac(m), sq(m);
    k.sub(ev.value(), cv.data(), w.data(), m);
    k.div(w.data(), uu.data(), w.data(), m);
    k.fill(1.0, jac.data(), m);
    for (std::size_t j = 0; j < np; ++j) {
      k.mul(ev.gradient(j), ev.gradient(j), sq.data(), m);
      k.add(jac.data(), sq.data(), jac.data(), m);
    }
    k.sqrt(jac.data(), jac.data(), m);
    if (!all_finite(w.data(), m) || !all_finite(jac.data(), m)) return false;
    std::vector<const double*> coords;
    for (std::size_t d = 0; d < in.k; ++d) coords.push_back(vc[d].data());
    coords.push_back(w.data());
    sums = k.ball_accumulate(coords.data(), coords.size(), jac.data(), nullptr, m);
  } else {
    BatchEvaluator lo(*in.lower, *in.params, m);
    BatchEvaluator hi(*in.upper, *in.params, m);
    lo.evaluate(inputs, m, false);
    hi.evaluate(inputs, m, false);
    std::vector<double> lo_n(m), hi_n(m), mask(m), ones(m);
    k.sub(lo.value(), cv.data(), lo_n.data(), m);
    k.div(lo_n.data(), uu.data(), lo_n.data(), m);
    k.sub(hi.value(), cv.data(), hi_n.data(), m);
    k.div(hi_n.data(), uu.data(), hi_n.data(), m);
    if (!all_finite(lo_n.data(), m) || !all_finite(hi_n.data(), m)) return false;
    k.interval_mask(vc[in.v_of_value].data(), lo_n.data(), hi_n.data(), mask.data(), m);
    k.fill(1.0, ones.data(), m);
    std::vector<const double*> coords;
    for (std::size_t d = 0; d < in.k; ++d) coords.push_back(vc[d].data());
    sums = k.ball_accumulate(coords.data(), coords.size(), ones.data(), mask.data(), m);
  }
  if (std::fetestexcept(kFlags) != 0) return false;
  out.sum = sums.sum;
  out.sum_sq = sums.sum_sq;
  out.hits = sums.hits;
  return true;
}

// Same cell, point by point in extended range.
void cell_extended(const Integrand& in, const std::vector<std::vector<double>>& v, std::size_t n, CellSums& out) {
  const std::size_t np = in.v_of_param.size();
  const XScalar u(in.u);
  const XScalar c(in.centre_value);
  JetEvaluator<XScalar> graph(in.region ? *in.upper : *in.graph, *in.params);
  JetEvaluator<XScalar> lower(in.region ? *in.lower : *in.graph, *in.params);
  std::vector<XScalar> point(np);
  std::vector<double> coords(in.k + 1);
  double s[4] = {0, 0, 0, 0};
  double q[4] = {0, 0, 0, 0};
  std::uint64_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < np; ++j)
      point[j] = XScalar(in.centre_params[j]) + u * XScalar(v[in.v_of_param[j]][i]);
    if (!in_domain(*in.domain, std::span<const XScalar>(point))) continue;
    double r2 = 0.0;
    double weight = 1.0;
    if (!in.region) {
      const Jet<XScalar> jet = graph.jet(point);
      const double w = ((jet.value - c) / u).to_double();
      XScalar g2(1.0);
      for (const auto& g : jet.gradient) g2 += g * g;
      weight = sqrt(g2).to_double();
      for (std::size_t d = 0; d < in.k; ++d) r2 += v[d][i] * v[d][i];
      r2 += w * w;
    } else {
      const XScalar lo = (lower.value(point) - c) / u;
      const XScalar hi = (graph.value(point) - c) / u;
      const XScalar vy(v[in.v_of_value][i]);
      if (!(lo <= vy && vy <= hi)) continue;
      for (std::size_t d = 0; d < in.k; ++d) r2 += v[d][i] * v[d][i];
    }
    if (r2 <= 1.0 && weight != 0.0) {
      s[i % 4] += weight;
      q[i % 4] += weight * weight;
      ++hits;
    }
  }
  out.sum = (s[0] + s[1]) + (s[2] + s[3]);
  out.sum_sq = (q[0] + q[1]) + (q[2] + q[3]);
  out.hits = hits;
  out.fallback = true;
}

Integrand make_integrand(const Stratum& a, std::span<const double> centre, double u) {
  Integrand in;
  in.u = u;
  const GraphLayout* layout = nullptr;
  if (a.kind() == StratumKind::Graph) {
    const GraphStratum& g = a.graph();
    layout = &g.layout;
    in.graph = g.expr.get();
    in.params = &g.params;
    in.domain = &g.domain;
    in.k = g.params.size();
    for (std::size_t j = 0; j < g.params.size(); ++j) in.v_of_param.push_back(j);
  } else if (a.kind() == StratumKind::Region) {
    const RegionStratum& r = a.region();
    layout = &r.layout;
    in.region = true;
    in.lower = r.lower.get();
    in.upper = r.upper.get();
    in.params = &r.params;
    in.domain = &r.domain;
    // v runs over the ambient coordinates.
    in.k = layout->ambient;
    for (std::size_t j = 0; j < r.params.size(); ++j) in.v_of_param.push_back(layout->param_coord[j]);
    in.v_of_value = layout->value_coord;
  } else {
    throw InputError(a.name, "densities are implemented for graph and region strata");
  }
  if (centre.size() != layout->ambient) throw InputError("centre", "wrong dimension");
  for (std::size_t j = 0; j < in.v_of_param.size(); ++j) in.centre_params.push_back(centre[layout->param_coord[j]]);
  in.centre_value = centre[layout->value_coord];
  return in;
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

std::vector<double> default_u_grid() {
  std::vector<double> u;
  for (int k = 1; k <= 12; ++k) u.push_back(std::pow(10.0, -25.0 * k));
  return u;
}

double unit_ball_volume(int k) { return std::pow(M_PI, k / 2.0) / std::tgamma(k / 2.0 + 1.0); }

PsiEstimate psi(const Stratum& a, std::span<const double> centre, double u, const MonteCarloConfig& config) {
  if (!(u > 0.0) || !std::isfinite(u)) throw InputError("u", "radius must be positive");
  if (config.samples == 0) throw InputError("samples", "must be positive");
  const Integrand in = make_integrand(a, centre, u);
  const std::size_t per_dim = in.k <= 2 ? 32 : 16;
  std::size_t cells = 1;
  for (std::size_t d = 0; d < in.k; ++d) cells *= per_dim;
  const std::size_t per_cell = std::max<std::uint64_t>(1, config.samples / cells);
  const double width = 2.0 / static_cast<double>(per_dim);

  std::vector<CellSums> sums(cells);
  parallel_for(cells, resolve_threads(config.threads), [&](std::size_t cell) {
    std::seed_seq seq{static_cast<std::uint32_t>(config.seed), static_cast<std::uint32_t>(config.seed >> 32),
                      static_cast<std::uint32_t>(cell)};
    std::mt19937_64 rng(seq);
    std::vector<std::vector<double>> v(in.k, std::vector<double>(per_cell));
    std::size_t rest = cell;
    std::vector<std::size_t> index(in.k);
    for (std::size_t d = 0; d < in.k; ++d) {
      index[d] = rest % per_dim;
      rest /= per_dim;
    }
    for (std::size_t i = 0; i < per_cell; ++i)
      for (std::size_t d = 0; d < in.k; ++d)
        v[d][i] = -1.0 + (static_cast<double>(index[d]) + uniform(rng)) * width;
    if (!cell_double(in, v, per_cell, sums[cell])) cell_extended(in, v, per_cell, sums[cell]);
  });

  // Equal-volume cells: the estimate is the cube volume times the mean of the
  // cell means, with the stratified variance.
  const double cube = std::pow(2.0, static_cast<double>(in.k));
  const double mu = unit_ball_volume(static_cast<int>(in.k));
  const double nc = static_cast<double>(per_cell);
  double mean = 0.0;
  double var = 0.0;
  PsiEstimate e;
  e.u = u;
  for (const auto& c : sums) {
    const double m = c.sum / nc;
    mean += m;
    if (per_cell > 1) {
      const double s2 = std::max(0.0, (c.sum_sq - nc * m * m) / (nc - 1.0));
      var += s2 / nc;
    }
    e.hits += c.hits;
    if (c.fallback) ++e.fallback_batches;
  }
  const double nk = static_cast<double>(cells);
  e.samples = static_cast<std::uint64_t>(per_cell) * cells;
  e.normalized = cube * mean / nk / mu;
  e.stderr_normalized = cube * std::sqrt(var) / nk / mu;
  const double log_psi = std::log(e.normalized * mu) + static_cast<double>(in.k) * std::log(u);
  e.psi = e.normalized > 0.0 ? XScalar::from_log(1, log_psi) : XScalar{};
  if (e.hits == 0) e.warning = "no sample hit the set: psi reported as 0";
  return e;
}

DensityEstimate theta(const Stratum& a, std::span<const double> centre, std::span<const double> u_grid,
                      const MonteCarloConfig& config) {
  if (u_grid.size() < 5) throw InputError("density.grid", "theta needs at least 5 radii");
  std::vector<double> us(u_grid.begin(), u_grid.end());
  std::sort(us.begin(), us.end(), std::greater<>());
  DensityEstimate d;
  d.centre.assign(centre.begin(), centre.end());
  std::vector<double> values;
  double tail_se = 0.0;
  for (std::size_t i = 0; i < us.size(); ++i) {
    d.per_u.push_back(psi(a, centre, us[i], config));
    values.push_back(d.per_u.back().normalized);
    if (i + 4 >= us.size()) tail_se = std::max(tail_se, d.per_u.back().stderr_normalized);
  }
  ClassifyOptions opts;
  opts.min_samples = 5;
  opts.aitken = false;
  opts.tol = std::max(1e-3, 3.0 * std::sqrt(2.0) * tail_se);
  d.limit = classify_limit(std::span<const double>(values), opts);
  d.conclusive = d.limit.cls == LimitClass::Converged;
  d.theta = d.conclusive ? d.limit.value.to_double() : values.back();
  d.stderr_theta = d.per_u.back().stderr_normalized;
  return d;
}

DensityProfile density_profile(const StratifiedSet& set, std::string_view a, std::string_view x,
                               std::span<const double> grid, std::span<const double> u_grid,
                               const MonteCarloConfig& config) {
  const Stratum& as = set.stratum(a);
  const Stratum& xs = set.stratum(x);
  if (xs.kind() != StratumKind::Affine || xs.affine().basis.empty())
    throw InputError(std::string(x), "profiles run along an affine stratum");
  DensityProfile prof;
  prof.stratum = std::string(a);
  prof.coordinates.assign(grid.begin(), grid.end());
  std::sort(prof.coordinates.begin(), prof.coordinates.end());
  for (double c : prof.coordinates) {
    Vec<double> p = xs.affine().offset;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += c * xs.affine().basis.front()[i];
    prof.estimates.push_back(theta(as, p, u_grid, config));
  }
  char buf[160];
  for (std::size_t i = 0; i + 1 < prof.estimates.size(); ++i) {
    const auto& l = prof.estimates[i];
    const auto& r = prof.estimates[i + 1];
    const double delta = std::fabs(l.theta - r.theta);
    const double se = std::hypot(l.stderr_theta, r.stderr_theta);
    if (delta > 3.0 * se && delta > 1e-3) {
      std::snprintf(buf, sizeof buf, "theta %.4f at %g vs %.4f at %g", l.theta, prof.coordinates[i], r.theta,
                    prof.coordinates[i + 1]);
      prof.jumps.push_back(buf);
    }
  }
  return prof;
}

}  // namespace stratcheck
