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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "stratcheck/expr.hpp"
#include "stratcheck/geom.hpp"
#include "stratcheck/numscale.hpp"
#include "stratcheck/strata.hpp"

namespace stratcheck {

enum class CurveKind { Ray, Vertical, Power, Flat, Sigma, Slice };

// Arc in the parameter plane of a graph stratum approaching the base point as
// t -> 0: the along-X parameter is b + side*t and the transverse parameter is
// sign*s(t) with s one of c*t, t (vertical: along fixed at b), t^p,
// exp(-C/t^q) or exp(ln(sigma)/t^2).
struct ProbeCurve {
  std::string label;
  CurveKind kind = CurveKind::Ray;
  ScalarSystem system = ScalarSystem::Extended;
  double coef = 0.0;  // c, p, C or sigma depending on kind
  double q = 0.0;     // flat curves only
  int side = 1;       // direction along X
  int branch = 1;     // sign of the transverse parameter

  // log of the transverse parameter at log t.
  double log_transverse(double log_t) const;
  // Smallest log t whose transverse log-magnitude stays above the cap.
  double min_log_t(double logmag_cap) const;
};

struct ProbeGrid {
  double t0 = 0.1;
  double ratio = 1e-100;
  int count = 40;
  double logmag_cap = -1e7;
};

struct FamilyConfig {
  std::vector<double> rays = {0.2, 1.0, 5.0};
  std::vector<double> powers = {2.0, 3.0, 5.0, 8.0};
  std::vector<double> flat_c = {0.5, 1.0, 2.0};
  std::vector<double> flat_q = {1.0, 2.0, 3.0};
  std::vector<double> sigmas = {0.25, 0.5, 0.75};
  bool vertical = true;
  bool mirrored = true;
  ProbeGrid grid;
};

// Point of Y along a probe, in coordinates centred at the base point.
struct ProbeSample {
  double log_t = 0.0;
  Vec<XScalar> params;  // absolute stratum parameters
  Vec<XScalar> rel;     // y - x0
  Subspace<XScalar> tangent;
};

struct SampledCurve {
  std::string label;
  CurveKind kind = CurveKind::Ray;
  ScalarSystem system = ScalarSystem::Extended;
  std::vector<ProbeSample> samples;
  double max_residual = 0.0;  // relative residual of the graph equation
};

// t_k = t0 * ratio^k for k < count.
std::vector<double> sample_geometric(double t0, double ratio, int count);
// log t_k; usable far below the double range.
std::vector<double> sample_geometric_log(double t0, double ratio, int count);

// Probes around x0 for the pair (y, x) of s: rays, the vertical fiber, power,
// flat and sigma curves, with mirrored copies on the other side of x0 and on
// every side of X present in the domain.
std::vector<ProbeCurve> standard_family(const StratifiedSet& s, const Stratum& y, const Stratum& x,
                                        std::span<const double> x0, const FamilyConfig& config);

// Samples that fall outside the stratum domain are skipped. Curves with a
// logmag cap use the coarsest ratio that keeps `count` samples above it.
SampledCurve sample_curve(GraphPatch& patch, const FiberChart& chart, std::span<const double> x0,
                          const ProbeCurve& curve, const ProbeGrid& grid);

enum class LimitClass { Converged, Bounded, Diverging, Inconclusive };

struct ClassifyOptions {
  double tol = 1e-3;
  double bounded_cap = 1e3;
  double diverging_threshold = 1e6;
  std::size_t min_samples = 8;
  bool aitken = true;
};

struct LimitEstimate {
  LimitClass cls = LimitClass::Inconclusive;
  XScalar value;  // L when converged, max |v| when bounded, last sample otherwise
  std::size_t samples = 0;
  double tolerance = 0.0;
};

LimitEstimate classify_limit(std::span<const XScalar> values, const ClassifyOptions& options = {});
LimitEstimate classify_limit(std::span<const double> values, const ClassifyOptions& options = {});

std::string to_string(LimitClass c);
std::string to_string(CurveKind k);
std::string describe(const LimitEstimate& e);

}  // namespace stratcheck
