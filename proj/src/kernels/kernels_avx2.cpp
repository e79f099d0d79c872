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

// Compiled with -mavx2 only. Callers must check isa_available(Isa::Avx2).
#include <immintrin.h>

#include <bit>
#include <cmath>

#include "stratcheck/kernels.hpp"

namespace stratcheck::kernels {

namespace {

constexpr std::size_t kLanes = 4;

template <class Op, class Tail>
inline void binary(const double* a, const double* b, double* out, std::size_t n, Op op, Tail tail) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    _mm256_storeu_pd(out + i, op(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
  }
  for (; i < n; ++i) out[i] = tail(a[i], b[i]);
}

void add(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_add_pd(x, y); },
         [](double x, double y) { return x + y; });
}
void sub(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_sub_pd(x, y); },
         [](double x, double y) { return x - y; });
}
void mul(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_mul_pd(x, y); },
         [](double x, double y) { return x * y; });
}
void div(const double* a, const double* b, double* out, std::size_t n) {
  binary(a, b, out, n, [](__m256d x, __m256d y) { return _mm256_div_pd(x, y); },
         [](double x, double y) { return x / y; });
}

void neg(const double* a, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, _mm256_xor_pd(_mm256_loadu_pd(a + i), sign));
  for (; i < n; ++i) out[i] = -a[i];
}

void sqrt_(const double* a, double* out, std::size_t n) {
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, _mm256_sqrt_pd(_mm256_loadu_pd(a + i)));
  for (; i < n; ++i) out[i] = std::sqrt(a[i]);
}

void abs_(const double* a, double* out, std::size_t n) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, _mm256_andnot_pd(sign, _mm256_loadu_pd(a + i)));
  for (; i < n; ++i) out[i] = std::fabs(a[i]);
}

void fill(double v, double* out, std::size_t n) {
  const __m256d x = _mm256_set1_pd(v);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) _mm256_storeu_pd(out + i, x);
  for (; i < n; ++i) out[i] = v;
}

void interval_mask(const double* v, const double* lo, const double* hi, double* out, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d x = _mm256_loadu_pd(v + i);
    const __m256d ge = _mm256_cmp_pd(_mm256_loadu_pd(lo + i), x, _CMP_LE_OQ);
    const __m256d le = _mm256_cmp_pd(x, _mm256_loadu_pd(hi + i), _CMP_LE_OQ);
    _mm256_storeu_pd(out + i, _mm256_and_pd(_mm256_and_pd(ge, le), one));
  }
  for (; i < n; ++i) out[i] = (lo[i] <= v[i] && v[i] <= hi[i]) ? 1.0 : 0.0;
}

BallSums ball_accumulate(const double* const* coords, std::size_t dims, const double* weight,
                         const double* mask, std::size_t n) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d zero = _mm256_setzero_pd();
  __m256d s = zero;
  __m256d q = zero;
  std::size_t hits = 0;
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    __m256d c = _mm256_loadu_pd(coords[0] + i);
    __m256d r2 = _mm256_mul_pd(c, c);
    for (std::size_t d = 1; d < dims; ++d) {
      c = _mm256_loadu_pd(coords[d] + i);
      r2 = _mm256_add_pd(r2, _mm256_mul_pd(c, c));
    }
    __m256d w = _mm256_loadu_pd(weight + i);
    if (mask) w = _mm256_mul_pd(w, _mm256_loadu_pd(mask + i));
    const __m256d inside = _mm256_cmp_pd(r2, one, _CMP_LE_OQ);
    const __m256d wi = _mm256_and_pd(w, inside);
    const __m256d nonzero = _mm256_cmp_pd(w, zero, _CMP_NEQ_UQ);
    hits += static_cast<std::size_t>(std::popcount(
        static_cast<unsigned>(_mm256_movemask_pd(_mm256_and_pd(inside, nonzero)))));
    s = _mm256_add_pd(s, wi);
    q = _mm256_add_pd(q, _mm256_mul_pd(wi, wi));
  }
  alignas(32) double sl[4];
  alignas(32) double ql[4];
  _mm256_store_pd(sl, s);
  _mm256_store_pd(ql, q);
  for (; i < n; ++i) {
    double r2 = coords[0][i] * coords[0][i];
    for (std::size_t d = 1; d < dims; ++d) r2 = r2 + coords[d][i] * coords[d][i];
    double w = weight[i];
    if (mask) w = w * mask[i];
    const bool inside = r2 <= 1.0;
    const double wi = inside ? w : 0.0;
    hits += (inside && w != 0.0) ? 1 : 0;
    sl[i % 4] = sl[i % 4] + wi;
    ql[i % 4] = ql[i % 4] + wi * wi;
  }
  return {(sl[0] + sl[1]) + (sl[2] + sl[3]), (ql[0] + ql[1]) + (ql[2] + ql[3]), hits};
}

}  // namespace

const Table& avx2_table() {
  static const Table table{add, sub, mul, div, neg, sqrt_, abs_, fill, interval_mask, ball_accumulate};
  return table;
}

}  // namespace stratcheck::kernels
