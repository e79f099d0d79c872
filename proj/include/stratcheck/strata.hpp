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

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "stratcheck/expr.hpp"
#include "stratcheck/geom.hpp"

namespace stratcheck {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = false;
  bool hi_closed = false;

  bool contains(double v) const;
  bool contains(const XScalar& v) const;
};

// Axis-aligned parameter box, one interval per parameter.
struct Box {
  std::vector<Interval> ranges;

  template <class S>
  bool contains(std::span<const S> p) const {
    if (p.size() != ranges.size()) return false;
    for (std::size_t i = 0; i < p.size(); ++i)
      if (!ranges[i].contains(p[i])) return false;
    return true;
  }
};

struct AffineStratum {
  std::vector<Vec<double>> basis;  // orthonormal
  Vec<double> offset;
};

// {point : coordinate layout.value_coord = h(params)} over a union of boxes.
struct GraphStratum {
  std::string expr_text;
  std::shared_ptr<const Expr> expr;
  std::vector<std::string> params;
  std::vector<Box> domain;
  GraphLayout layout;
};

// Solid between two graphs over the same parameters: lower <= value <= upper.
// Only used for densities.
struct RegionStratum {
  std::shared_ptr<const Expr> lower;
  std::shared_ptr<const Expr> upper;
  std::vector<std::string> params;
  std::vector<Box> domain;
  GraphLayout layout;
};

enum class StratumKind { Affine, Graph, Region };

struct Stratum {
  std::string name;
  std::size_t dim = 0;
  std::variant<AffineStratum, GraphStratum, RegionStratum> shape;

  StratumKind kind() const { return static_cast<StratumKind>(shape.index()); }
  const AffineStratum& affine() const;
  const GraphStratum& graph() const;
  const RegionStratum& region() const;
};

struct StratifiedSet {
  std::string name;
  std::size_t ambient_dim = 0;
  std::vector<Stratum> strata;
  std::vector<std::pair<std::string, std::string>> pairs;  // (Y, X) with X in the closure of Y
  std::vector<std::string> notes;                          // modelling assumptions surfaced in reports

  const Stratum& stratum(std::string_view name) const;
  // Throws InputError on dangling pair references or inconsistent dimensions.
  void validate() const;
};

Stratum make_affine(std::string name, std::vector<Vec<double>> basis, Vec<double> offset);
Stratum make_graph(std::string name, std::string_view expr, std::vector<std::string> params,
                   std::vector<Box> domain, GraphLayout layout);
Stratum make_region(std::string name, std::string_view lower, std::string_view upper,
                    std::vector<std::string> params, std::vector<Box> domain, GraphLayout layout);

// Layout from names such as {"x","h","z"}: "h" marks the graph value, every
// other entry must be a parameter name.
GraphLayout layout_from_names(std::span<const std::string> names, std::span<const std::string> params);

StratifiedSet catalog(std::string_view name);
std::vector<std::string> catalog_names();

// Orthogonal projection onto an affine stratum.
class Retraction {
 public:
  explicit Retraction(const Stratum& target);

  template <class S>
  Vec<S> project(std::span<const S> p) const;
  const AffineStratum& target() const noexcept { return target_; }

 private:
  AffineStratum target_;
};

// Evaluates points and tangent planes of a graph stratum in extended range.
class GraphPatch {
 public:
  explicit GraphPatch(const GraphStratum& g);

  struct Sample {
    Vec<XScalar> params;
    Vec<XScalar> point;
    Subspace<XScalar> tangent;
  };

  Sample at(std::span<const XScalar> params);
  Vec<XScalar> point(std::span<const XScalar> params);
  XScalar value(std::span<const XScalar> params);
  bool in_domain(std::span<const XScalar> params) const;
  const GraphStratum& stratum() const noexcept { return *g_; }

 private:
  const GraphStratum* g_;
  JetEvaluator<XScalar> eval_;
};

// How a graph stratum sits over a one-dimensional affine X: one parameter runs
// along X, the other is transverse to it.
struct FiberChart {
  std::size_t along = 0;
  std::size_t transverse = 0;
  double along_value = 0.0;           // parameter value of the base point
  std::vector<int> transverse_signs;  // signs of the transverse parameter present in the domain
};

FiberChart fiber_chart(const Stratum& y, const Stratum& x, std::span<const double> x0);

struct FiberSampling {
  double radius = 0.1;
  double ratio = 1e-100;
  int count = 40;
};

struct FiberPoint {
  int branch = 1;  // sign of the transverse parameter
  Vec<XScalar> params;
  Vec<XScalar> point;
};

// Points of Y with pi(point) = x0, transverse parameter radius*ratio^k.
std::vector<FiberPoint> sample_fiber(const StratifiedSet& s, const Stratum& y, std::span<const double> x0,
                                     const FiberSampling& sampling = {});

}  // namespace stratcheck
