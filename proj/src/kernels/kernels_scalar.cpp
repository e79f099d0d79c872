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

#include <cmath>

#include "stratcheck/kernels.hpp"

namespace stratcheck::kernels {

namespace {

void add(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] + b[i];
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] - b[i];
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] * b[i];
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = a[i] / b[i];
}
void neg(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = -a[i];
}
void sqrt_(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(a[i]);
}
void abs_(const double* a, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = std::fabs(a[i]);
}
void fill(double v, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = v;
}
void interval_mask(const double* v, const double* lo, const double* hi, double* out, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) out[i] = (lo[i] <= v[i] && v[i] <= hi[i]) ? 1.0 : 0.0;
}

BallSums ball_accumulate(const double* const* coords, std::size_t dims, const double* weight,
                         const double* mask, std::size_t n) {
  // Lane i % 4 mirrors the AVX2 register layout.
  double s[4] = {0, 0, 0, 0};
  double q[4] = {0, 0, 0, 0};
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    double r2 = coords[0][i] * coords[0][i];
    for (std::size_t d = 1; d < dims; ++d) r2 = r2 + coords[d][i] * coords[d][i];
    double w = weight[i];
    if (mask) w = w * mask[i];
    const bool inside = r2 <= 1.0;
    const double wi = inside ? w : 0.0;
    hits += (inside && w != 0.0) ? 1 : 0;
    s[i % 4] = s[i % 4] + wi;
    q[i % 4] = q[i % 4] + wi * wi;
  }
  return {(s[0] + s[1]) + (s[2] + s[3]), (q[0] + q[1]) + (q[2] + q[3]), hits};
}

}  // namespace

const Table& scalar_table() {
  static const Table table{add, sub, mul, div, neg, sqrt_, abs_, fill, interval_mask, ball_accumulate};
  return table;
}

}  // namespace stratcheck::kernels
