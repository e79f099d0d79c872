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

#include "stratcheck/geom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "stratcheck/error.hpp"

namespace stratcheck {

namespace {

constexpr double kRankTolerance = 1e-10;
constexpr double kJacobiTolerance = 1e-13;
constexpr int kJacobiSweeps = 60;

double magnitude(double v) { return std::fabs(v); }
double magnitude(const XScalar& v) { return abs(v).to_double(); }

template <class S>
void check_dims(std::size_t a, std::size_t b) {
  if (a != b) throw GeometryError("dimension mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
}

template <class S>
void subtract_projection(Vec<S>& w, const std::vector<Vec<S>>& frame) {
  for (const auto& q : frame) {
    const S c = dot<S>(q, w);
    if (c == S(0.0)) continue;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = w[i] - c * q[i];
  }
}

}  // namespace

template <class S>
S dot(std::span<const S> a, std::span<const S> b) {
  check_dims<S>(a.size(), b.size());
  S s(0.0);
  for (std::size_t i = 0; i < a.size(); ++i) s = s + a[i] * b[i];
  return s;
}

template <class S>
Vec<S> Subspace<S>::project(std::span<const S> v) const {
  check_dims<S>(v.size(), ambient_);
  Vec<S> p(ambient_, S(0.0));
  for (const auto& q : frame_) {
    const S c = dot<S>(q, v);
    for (std::size_t i = 0; i < ambient_; ++i) p[i] = p[i] + c * q[i];
  }
  return p;
}

template <class S>
Vec<S> Subspace<S>::residual(std::span<const S> v) const {
  check_dims<S>(v.size(), ambient_);
  Vec<S> w(v.begin(), v.end());
  subtract_projection(w, frame_);
  subtract_projection(w, frame_);
  return w;
}

template <class S>
Subspace<S> Subspace<S>::from_orthonormal(std::size_t ambient, std::vector<Vec<S>> frame) {
  for (const auto& v : frame) check_dims<S>(v.size(), ambient);
  if (frame.size() > ambient) throw GeometryError("more frame vectors than ambient dimensions");
  Subspace s;
  s.ambient_ = ambient;
  s.frame_ = std::move(frame);
  return s;
}

template <class S>
Subspace<S> orthonormalize(std::span<const Vec<S>> vectors, std::size_t ambient) {
  Subspace<S> out;
  out.ambient_ = ambient;
  if (vectors.size() > ambient) throw GeometryError("rank deficiency: more vectors than ambient dimensions");
  for (const auto& v : vectors) {
    check_dims<S>(v.size(), ambient);
    const S n0 = norm(std::span<const S>(v));
    if (n0 == S(0.0)) throw GeometryError("rank deficiency: zero vector");
    Vec<S> w = v;
    subtract_projection(w, out.frame_);
    subtract_projection(w, out.frame_);
    const S nw = norm(std::span<const S>(w));
    if (magnitude(nw / n0) <= kRankTolerance) throw GeometryError("rank deficiency: vectors are linearly dependent");
    for (auto& c : w) c = c / nw;
    out.frame_.push_back(std::move(w));
  }
  return out;
}

template <class S>
S eta(std::span<const S> v, const Subspace<S>& b) {
  const Vec<S> r = b.residual(v);
  return norm(std::span<const S>(r));
}

template <class S>
S delta(const Subspace<S>& a, const Subspace<S>& b) {
  using std::sqrt;
  check_dims<S>(a.ambient_dim(), b.ambient_dim());
  std::vector<Vec<S>> cols;
  cols.reserve(a.dim());
  for (const auto& q : a.frame()) cols.push_back(b.residual(q));
  const std::size_t k = cols.size();
  for (int sweep = 0; sweep < kJacobiSweeps && k > 1; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < k; ++i) {
      for (std::size_t j = i + 1; j < k; ++j) {
        const S alpha = dot<S>(cols[i], cols[i]);
        const S beta = dot<S>(cols[j], cols[j]);
        const S gamma = dot<S>(cols[i], cols[j]);
        if (gamma == S(0.0)) continue;
        if (magnitude(gamma) <= kJacobiTolerance * magnitude(sqrt(alpha * beta))) continue;
        rotated = true;
        const S zeta = (beta - alpha) / (S(2.0) * gamma);
        const S root = sqrt(S(1.0) + zeta * zeta);
        const S t = zeta < S(0.0) ? S(-1.0) / (root - zeta) : S(1.0) / (zeta + root);
        const S c = S(1.0) / sqrt(S(1.0) + t * t);
        const S s = c * t;
        for (std::size_t r = 0; r < cols[i].size(); ++r) {
          const S xi = cols[i][r];
          const S xj = cols[j][r];
          cols[i][r] = c * xi - s * xj;
          cols[j][r] = s * xi + c * xj;
        }
      }
    }
    if (!rotated) break;
  }
  S best(0.0);
  for (const auto& c : cols) best = std::max(best, norm(std::span<const S>(c)));
  return std::min(best, S(1.0));
}

template <class S>
Vec<S> unit(std::span<const S> v) {
  const S n = norm(v);
  if (n == S(0.0)) throw GeometryError("direction of the zero vector");
  Vec<S> u(v.begin(), v.end());
  for (auto& c : u) c = c / n;
  return u;
}

Subspace<XScalar> to_extended(const Subspace<double>& s) {
  std::vector<Vec<XScalar>> frame;
  for (const auto& q : s.frame()) frame.push_back(to_extended(std::span<const double>(q)));
  return Subspace<XScalar>::from_orthonormal(s.ambient_dim(), std::move(frame));
}

Vec<double> to_double(std::span<const XScalar> v) {
  Vec<double> out;
  out.reserve(v.size());
  for (const auto& c : v) out.push_back(c.to_double());
  return out;
}

Vec<XScalar> to_extended(std::span<const double> v) { return Vec<XScalar>(v.begin(), v.end()); }

double angle_between(std::span<const double> a, std::span<const double> b) {
  check_dims<double>(a.size(), b.size());
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) throw GeometryError("angle with the zero vector");
  // atan2 of |a x b| and a.b stays accurate near 0 and pi.
  double d = 0.0;
  double cross2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d += (a[i] / na) * (b[i] / nb);
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      const double c = (a[i] / na) * (b[j] / nb) - (a[j] / na) * (b[i] / nb);
      cross2 += c * c;
    }
  }
  return std::atan2(std::sqrt(cross2), d);
}

template <class S>
Subspace<S> tangent_of_graph(std::span<const S> gradient, const GraphLayout& layout) {
  if (gradient.size() != layout.param_coord.size()) throw GeometryError("gradient does not match the layout");
  std::vector<Vec<S>> vectors;
  for (std::size_t i = 0; i < gradient.size(); ++i) {
    Vec<S> v(layout.ambient, S(0.0));
    v[layout.param_coord[i]] = S(1.0);
    v[layout.value_coord] = gradient[i];
    vectors.push_back(std::move(v));
  }
  return orthonormalize<S>(vectors, layout.ambient);
}

template <class S>
Subspace<S> tangent_of_graph(const Expr& h, std::span<const std::string> base_vars, std::span<const S> point,
                             const GraphLayout& layout) {
  JetEvaluator<S> ev(h, base_vars);
  const Jet<S> j = ev.jet(point);
  return tangent_of_graph<S>(j.gradient, layout);
}

#define STRATCHECK_GEOM_INSTANTIATE(S)                                                                  \
  template class Subspace<S>;                                                                           \
  template S dot<S>(std::span<const S>, std::span<const S>);                                            \
  template Subspace<S> orthonormalize<S>(std::span<const Vec<S>>, std::size_t);                         \
  template S eta<S>(std::span<const S>, const Subspace<S>&);                                            \
  template S delta<S>(const Subspace<S>&, const Subspace<S>&);                                          \
  template Vec<S> unit<S>(std::span<const S>);                                                          \
  template Subspace<S> tangent_of_graph<S>(std::span<const S>, const GraphLayout&);                     \
  template Subspace<S> tangent_of_graph<S>(const Expr&, std::span<const std::string>, std::span<const S>, \
                                           const GraphLayout&);

STRATCHECK_GEOM_INSTANTIATE(double)
STRATCHECK_GEOM_INSTANTIATE(XScalar)

}  // namespace stratcheck
