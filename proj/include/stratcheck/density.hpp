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

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stratcheck/numscale.hpp"
#include "stratcheck/probes.hpp"
#include "stratcheck/strata.hpp"

namespace stratcheck {

struct MonteCarloConfig {
  std::uint64_t samples = 1'000'000;  // per (u, centre)
  std::uint64_t seed = 51966;
  int threads = 1;
};

// {10^(-25k) : k = 1..12}.
std::vector<double> default_u_grid();

// Volume of the unit k-ball.
double unit_ball_volume(int k);

struct PsiEstimate {
  double u = 0.0;
  double normalized = 0.0;  // psi / (mu_k u^k)
  double stderr_normalized = 0.0;
  XScalar psi;  // H^k(A ∩ B(centre, u)), any magnitude
  std::uint64_t samples = 0;
  std::uint64_t hits = 0;
  std::size_t fallback_batches = 0;  // batches redone in extended range
  std::string warning;
};

// Hausdorff measure of a graph stratum (area integral) or region (volume)
// inside the ball B(centre, u), by stratified Monte Carlo in ball-normalized
// coordinates. Deterministic for a fixed seed, whatever the thread count.
PsiEstimate psi(const Stratum& a, std::span<const double> centre, double u, const MonteCarloConfig& config = {});

struct DensityEstimate {
  Vec<double> centre;
  double theta = 0.0;
  double stderr_theta = 0.0;
  bool conclusive = false;
  LimitEstimate limit;
  std::vector<PsiEstimate> per_u;
};

DensityEstimate theta(const Stratum& a, std::span<const double> centre, std::span<const double> u_grid,
                      const MonteCarloConfig& config = {});

struct DensityProfile {
  std::string stratum;
  std::vector<double> coordinates;
  std::vector<DensityEstimate> estimates;
  std::vector<std::string> jumps;
};

// theta at points of the affine stratum X; adjacent values differing by more
// than 3 combined standard errors (and 1e-3) are flagged as jumps.
DensityProfile density_profile(const StratifiedSet& set, std::string_view a, std::string_view x,
                               std::span<const double> grid, std::span<const double> u_grid,
                               const MonteCarloConfig& config = {});

}  // namespace stratcheck
