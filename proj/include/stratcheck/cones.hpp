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

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stratcheck/regularity.hpp"

namespace stratcheck {

// Limit of a direction sequence, classified component by component.
struct LimitDirection {
  std::string label;
  int branch = 1;
  bool conclusive = false;
  Vec<double> direction;  // unit when conclusive
  std::vector<LimitEstimate> components;
};

struct DirectionCluster {
  Vec<double> representative;
  std::size_t members = 0;
  double diameter = 0.0;  // largest pairwise angle inside the cluster
};

// Fiber over x0 of the normal cone, from limit secant directions.
struct ConeFiber {
  Vec<double> basepoint;
  std::vector<LimitDirection> directions;
  int dimension = 0;
  std::vector<DirectionCluster> clusters;
  std::size_t inconclusive = 0;
};

struct FiberTangentCone {
  Vec<double> basepoint;
  std::vector<LimitDirection> directions;
};

struct ConeConfig {
  FamilyConfig family;
  std::vector<double> sigma_sweep;  // extra sigma curves; defaults to 0.05k, k = 1..19
  double cluster_angle = 0.05;
  Tolerances tol;
  int threads = 1;
};

ConeConfig default_cone_config();

LimitDirection limit_direction(std::string label, int branch, std::span<const Vec<XScalar>> sequence,
                               const ClassifyOptions& options);

ConeFiber cone_fiber(const PairAtPoint& p, const ConeConfig& config = default_cone_config());
ConeFiber cone_fiber(const PairAtPoint& p, std::span<const SampledCurve> curves, const ConeConfig& config);
FiberTangentCone fiber_tangent_cone(const PairAtPoint& p, const FiberSampling& sampling = {},
                                    const Tolerances& tol = {});

// Largest angle from a direction of `from` to the nearest direction of `to`.
// Inconclusive directions are ignored.
double one_sided_hausdorff(std::span<const LimitDirection> from, std::span<const LimitDirection> to);

struct NCheck {
  Outcome outcome = Outcome::Inconclusive;
  double cone_to_tangent = 0.0;
  double tangent_to_cone = 0.0;
  std::optional<LimitDirection> witness;  // a cone direction far from the tangent cone
  ConeFiber fiber;
  FiberTangentCone tangent_cone;
};

NCheck check_n(const PairAtPoint& p, const ConeConfig& config = default_cone_config(), double threshold = 0.02);

struct GridFiber {
  double coordinate = 0.0;  // position along X
  ConeFiber fiber;
};

struct NpfCheck {
  Outcome outcome = Outcome::Inconclusive;
  std::vector<GridFiber> fibers;  // sorted by coordinate
  std::vector<std::string> jumps;
  std::string note;
};

// Lower semicontinuity of the fiber along a grid on X: a necessary condition
// for openness of the projection, not a certificate of it.
NpfCheck check_npf(const StratifiedSet& set, std::string_view y, std::string_view x, std::span<const double> grid,
                   const ConeConfig& config = default_cone_config(), double threshold = 0.1);

// Point of X at coordinate c along its first basis vector.
Vec<double> point_on(const Stratum& x, double c);

enum class Evidence { For, Against, Inconclusive };

struct PlaneLimit {
  std::string label;
  bool conclusive = false;
  std::vector<double> projector;  // row-major, ambient x ambient
};

struct C1Point {
  double coordinate = 0.0;
  std::vector<PlaneLimit> planes;
  double spread = 0.0;  // largest angle between conclusive limit planes
  bool unique = false;
  std::string witness;  // the two curves realising the spread
};

struct C1Evidence {
  Evidence verdict = Evidence::Inconclusive;
  std::vector<C1Point> points;
  std::vector<std::string> discontinuities;
};

C1Evidence c1_boundary_evidence(const StratifiedSet& set, std::string_view y, std::string_view x,
                                std::span<const double> grid, const ConeConfig& config = default_cone_config(),
                                double spread_threshold = 0.02, double continuity_threshold = 0.1);

// Observed fiber dimension against dim S - dim X - 1.
bool observed_dimension_ok(const ConeFiber& fiber, const StratifiedSet& set, std::string_view y, std::string_view x);

std::string to_string(Evidence e);

}  // namespace stratcheck
