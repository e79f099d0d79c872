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
#include <vector>

#include "stratcheck/expr.hpp"
#include "stratcheck/numscale.hpp"

namespace stratcheck {

template <class S>
using Vec = std::vector<S>;

// Linear subspace held as an orthonormal frame. Construct via orthonormalize.
template <class S>
class Subspace {
 public:
  Subspace() = default;

  std::size_t ambient_dim() const noexcept { return ambient_; }
  std::size_t dim() const noexcept { return frame_.size(); }
  const std::vector<Vec<S>>& frame() const noexcept { return frame_; }

  Vec<S> project(std::span<const S> v) const;
  Vec<S> residual(std::span<const S> v) const;  // v - P v, re-orthogonalized once

  // Build from vectors already known to be orthonormal (affine strata, tests).
  static Subspace from_orthonormal(std::size_t ambient, std::vector<Vec<S>> frame);

 private:
  template <class T>
  friend Subspace<T> orthonormalize(std::span<const Vec<T>> vectors, std::size_t ambient);
  std::size_t ambient_ = 0;
  std::vector<Vec<S>> frame_;
};

template <class S>
S dot(std::span<const S> a, std::span<const S> b);

// Modified Gram-Schmidt with a second orthogonalization pass. Throws
// GeometryError when a vector keeps less than 1e-10 of its norm.
template <class S>
Subspace<S> orthonormalize(std::span<const Vec<S>> vectors, std::size_t ambient);

// Norm of the component of v orthogonal to B.
template <class S>
S eta(std::span<const S> v, const Subspace<S>& b);

// sup of eta(u, B) over unit u in A: the largest singular value of the
// residuals of A's frame against B, by one-sided Jacobi.
template <class S>
S delta(const Subspace<S>& a, const Subspace<S>& b);

// v / |v| with overflow-safe scaling. Throws GeometryError on the zero vector.
template <class S>
Vec<S> unit(std::span<const S> v);

Subspace<XScalar> to_extended(const Subspace<double>& s);
Vec<double> to_double(std::span<const XScalar> v);
Vec<XScalar> to_extended(std::span<const double> v);

// Angle in [0, pi] between two nonzero directions.
double angle_between(std::span<const double> a, std::span<const double> b);

// Where the parameters and the graph value of a graph stratum sit among the
// ambient coordinates, e.g. ["x","h","z"] puts y = h(x, z).
struct GraphLayout {
  std::size_t ambient = 0;
  std::vector<std::size_t> param_coord;  // ambient index of each parameter
  std::size_t value_coord = 0;
};

// Tangent space of the graph of h at a point, given the gradient of h with
// respect to the parameters in layout order.
template <class S>
Subspace<S> tangent_of_graph(std::span<const S> gradient, const GraphLayout& layout);

// Convenience form that evaluates h itself.
template <class S>
Subspace<S> tangent_of_graph(const Expr& h, std::span<const std::string> base_vars, std::span<const S> point,
                             const GraphLayout& layout);

}  // namespace stratcheck
