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

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stratcheck/geom.hpp"
#include "stratcheck/probes.hpp"
#include "stratcheck/strata.hpp"

namespace stratcheck {

struct Tolerances {
  double converged = 1e-3;
  double bounded = 1e3;
  double diverging = 1e6;

  ClassifyOptions classify() const;
};

// Adjacent pair (Y, X) at a base point x0 of X. Quantities take samples in
// coordinates centred at x0, so the retraction acts linearly on them.
class PairAtPoint {
 public:
  PairAtPoint(const StratifiedSet& set, std::string_view y, std::string_view x, std::span<const double> x0);

  const StratifiedSet& set() const noexcept { return *set_; }
  const Stratum& y() const noexcept { return *y_; }
  const Stratum& x() const noexcept { return *x_; }
  const Vec<double>& basepoint() const noexcept { return x0_; }
  const FiberChart& chart() const noexcept { return chart_; }
  const Subspace<XScalar>& x_tangent() const noexcept { return tx_; }

  // pi(y) - x0 for y - x0 given.
  Vec<XScalar> project_rel(std::span<const XScalar> rel) const;

 private:
  const StratifiedSet* set_;
  const Stratum* y_;
  const Stratum* x_;
  Vec<double> x0_;
  FiberChart chart_;
  Subspace<XScalar> tx_;
};

// delta(T_{pi(y)} X, T_y Y).
XScalar alpha(const PairAtPoint& p, const ProbeSample& y);
// eta(mu(y - pi(y)), T_y Y).
XScalar beta(const PairAtPoint& p, const ProbeSample& y);
// |y - x0| alpha / |y - pi(y)|.
XScalar kuo_ratio(const PairAtPoint& p, const ProbeSample& y);
// delta(T_x X, T_y Y) / |y - x| for x on X given relative to x0.
XScalar verdier_quotient(const PairAtPoint& p, const ProbeSample& y, std::span<const XScalar> x_rel);
// |pi(y) - x0|^e alpha / |y - pi(y)|.
XScalar re_quantity(const PairAtPoint& p, double e, const ProbeSample& y);
// Unit vector along y - pi(y).
Vec<XScalar> secant_direction(const PairAtPoint& p, const ProbeSample& y);

std::vector<SampledCurve> sample_family(const PairAtPoint& p, std::span<const ProbeCurve> family,
                                        const ProbeGrid& grid, int threads = 1);

struct RProfileConfig {
  double max_log_transverse = std::log(0.4);
  double min_depth = 1e4;   // lower bound for |ln s| at the deep end
  double max_depth = 1e13;  // upper bound for |ln s|
  int points = 400;
};

struct RProfilePoint {
  double t = 0.0;
  XScalar r;
  double argmax_log_s = 0.0;  // transverse log-parameter where the sup was attained
  int argmax_side = 1;
};

// sup of alpha/|y - pi(y)| over the fiber |pi(y) - x0| = t, from a log-spaced
// sample in |ln s| reaching max(min_depth, 10/t^2).
RProfilePoint r_profile(const PairAtPoint& p, double t, const RProfileConfig& config = {});

enum class RintClass { Converging, Diverging, Inconclusive };

struct RintResult {
  RintClass cls = RintClass::Inconclusive;
  double integral = 0.0;  // estimate when converging
  double median_ratio = 0.0;
  std::vector<double> eps;
  std::vector<RProfilePoint> profile;
  std::vector<double> partials;  // integral over [eps_k, eps_0]
};

std::vector<double> default_eps_grid();
RintResult rint_from_profile(std::span<const double> eps, std::span<const RProfilePoint> profile, double tol);
RintResult rint_check(const PairAtPoint& p, std::span<const double> eps_grid, double tol = 1e-3,
                      const RProfileConfig& config = {});

enum class Outcome { HoldsOnFamily, Fails, Inconclusive };

struct Condition {
  enum class Kind { A, Bpi, B, R, W, Re, Rint } kind = Kind::A;
  double e = 0.0;

  static Condition parse(std::string_view name);
  std::string name() const;
};

struct CurveVerdict {
  std::string label;  // curve label, plus the sequence variant for (w) and (b)
  CurveKind kind = CurveKind::Ray;
  LimitEstimate limit;
  bool conforming = false;
  bool conclusive = false;
  std::vector<XScalar> values;
  std::vector<double> log_t;
};

struct Verdict {
  std::string condition;
  Outcome outcome = Outcome::Inconclusive;
  std::optional<CurveVerdict> witness;
  std::vector<CurveVerdict> curves;
  std::optional<RintResult> rint;
  std::string note;
};

// FAILS when some curve has a conclusive non-conforming limit, HOLDS_ON_FAMILY
// when every curve conforms, INCONCLUSIVE otherwise. (b) is the conjunction
// of (a) and (b^pi).
Verdict check_condition(const PairAtPoint& p, const Condition& c, std::span<const SampledCurve> curves,
                        const Tolerances& tol, std::span<const double> eps_grid = {});

struct SliceFailure {
  double x = 0.0;
  std::string message;
};

struct SlicedPair {
  double slope = 0.0;
  std::vector<SampledCurve> branches;
  std::vector<SliceFailure> failures;
};

struct SliceConfig {
  double t0 = 0.1;
  double ratio = 0.92;
  int count = 40;
  double w_lo = -1e4;   // bracket for ln s
  double w_hi = -1e-2;
  double rel_tol = 1e-12;
};

// Intersection of Y with the plane {value = a * transverse}, traced per x by
// bisection in ln s. Throws GeometryError when no sampled x has a root.
SlicedPair slice_pair(const PairAtPoint& p, double a, const SliceConfig& config = {});

std::string to_string(Outcome o);
std::string to_string(RintClass c);

}  // namespace stratcheck
