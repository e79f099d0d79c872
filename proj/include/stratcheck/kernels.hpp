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
#include <string_view>

// Elementwise double kernels used by the batched Monte Carlo evaluator. Every
// kernel has a scalar reference and an AVX2 variant. Both produce bit-identical
// results: no FMA contraction, and reductions use the same 4-lane partial sums
// in the same order.
namespace stratcheck::kernels {

enum class Isa { Scalar, Avx2 };

struct BallSums {
  double sum = 0.0;     // sum of weights of points inside the unit ball
  double sum_sq = 0.0;  // sum of squared weights of those points
  std::size_t hits = 0;
};

struct Table {
  void (*add)(const double* a, const double* b, double* out, std::size_t n);
  void (*sub)(const double* a, const double* b, double* out, std::size_t n);
  void (*mul)(const double* a, const double* b, double* out, std::size_t n);
  void (*div)(const double* a, const double* b, double* out, std::size_t n);
  void (*neg)(const double* a, double* out, std::size_t n);
  void (*sqrt)(const double* a, double* out, std::size_t n);
  void (*abs)(const double* a, double* out, std::size_t n);
  void (*fill)(double v, double* out, std::size_t n);
  // out = (lo <= v && v <= hi) ? 1 : 0
  void (*interval_mask)(const double* v, const double* lo, const double* hi, double* out, std::size_t n);
  // Points given by `dims` coordinate arrays; a point is inside when the sum of
  // its squared coordinates is <= 1. Weights are multiplied by mask when mask
  // is non-null.
  BallSums (*ball_accumulate)(const double* const* coords, std::size_t dims, const double* weight,
                              const double* mask, std::size_t n);
};

const Table& scalar_table();
// Only valid when isa_available(Isa::Avx2).
const Table& avx2_table();

bool isa_available(Isa isa);
// Selected once from CPU support; STRATCHECK_SIMD=scalar forces the reference path.
Isa active_isa();
const Table& active();
// Overrides the runtime selection (tests and benchmarking).
void force_isa(Isa isa);
std::string_view isa_name(Isa isa);

}  // namespace stratcheck::kernels
