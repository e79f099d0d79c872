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

#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <string>
#include <vector>

#include "stratcheck/expr.hpp"
#include "stratcheck/kernels.hpp"

using namespace stratcheck;
namespace k = stratcheck::kernels;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> random_values(std::size_t n, std::uint64_t seed, double lo, double hi) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

}  // namespace

TEST_CASE("scalar and AVX2 kernels are bit-identical") {
  if (!k::isa_available(k::Isa::Avx2)) {
    MESSAGE("AVX2 not available on this host; equivalence not exercised");
    return;
  }
  const k::Table& s = k::scalar_table();
  const k::Table& v = k::avx2_table();
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 1001u}) {
    const auto a = random_values(n, 1 + n, -3.0, 3.0);
    auto b = random_values(n, 2 + n, -3.0, 3.0);
    const auto pos = random_values(n, 3 + n, 0.0, 5.0);
    std::vector<double> o1(n), o2(n);
    auto binary = [&](auto fs, auto fv) {
      fs(a.data(), b.data(), o1.data(), n);
      fv(a.data(), b.data(), o2.data(), n);
      return same_bits(o1, o2);
    };
    CHECK(binary(s.add, v.add));
    CHECK(binary(s.sub, v.sub));
    CHECK(binary(s.mul, v.mul));
    CHECK(binary(s.div, v.div));
    s.neg(a.data(), o1.data(), n);
    v.neg(a.data(), o2.data(), n);
    CHECK(same_bits(o1, o2));
    s.abs(a.data(), o1.data(), n);
    v.abs(a.data(), o2.data(), n);
    CHECK(same_bits(o1, o2));
    s.sqrt(pos.data(), o1.data(), n);
    v.sqrt(pos.data(), o2.data(), n);
    CHECK(same_bits(o1, o2));
    s.fill(0.25, o1.data(), n);
    v.fill(0.25, o2.data(), n);
    CHECK(same_bits(o1, o2));
    const auto lo = random_values(n, 4 + n, -3.0, 0.0);
    const auto hi = random_values(n, 5 + n, 0.0, 3.0);
    s.interval_mask(a.data(), lo.data(), hi.data(), o1.data(), n);
    v.interval_mask(a.data(), lo.data(), hi.data(), o2.data(), n);
    CHECK(same_bits(o1, o2));

    const auto c0 = random_values(n, 6 + n, -1.0, 1.0);
    const auto c1 = random_values(n, 7 + n, -1.0, 1.0);
    const auto c2 = random_values(n, 8 + n, -1.0, 1.0);
    const double* coords[] = {c0.data(), c1.data(), c2.data()};
    for (std::size_t dims : {2u, 3u})
      for (const double* mask : std::vector<const double*>{nullptr, o1.data()}) {
        const auto rs = s.ball_accumulate(coords, dims, pos.data(), mask, n);
        const auto rv = v.ball_accumulate(coords, dims, pos.data(), mask, n);
        CHECK(rs.hits == rv.hits);
        CHECK(std::memcmp(&rs.sum, &rv.sum, sizeof(double)) == 0);
        CHECK(std::memcmp(&rs.sum_sq, &rv.sum_sq, sizeof(double)) == 0);
      }
  }
}

TEST_CASE("ball accumulation counts points inside the unit ball") {
  const std::vector<double> x = {0.0, 0.6, 1.0, 0.8, -0.1};
  const std::vector<double> y = {0.0, 0.8, 0.1, 0.0, 0.2};
  const std::vector<double> w = {1.0, 2.0, 4.0, 8.0, 16.0};
  const double* coords[] = {x.data(), y.data()};
  const auto r = k::scalar_table().ball_accumulate(coords, 2, w.data(), nullptr, x.size());
  CHECK(r.hits == 4);
  CHECK(r.sum == 27.0);
  CHECK(r.sum_sq == 1.0 + 4.0 + 64.0 + 256.0);
}

TEST_CASE("batched evaluation matches the jet evaluator under both ISAs") {
  const Expr e = Expr::parse("-z*asinh(x/z)/ln(z) + exp((x^2 + 1)*ln(z))*sqrt(abs(x) + 1)");
  const std::vector<std::string> slots = {"x", "z"};
  const std::size_t n = 257;
  const auto xs = random_values(n, 21, -0.9, 0.9);
  const auto zs = random_values(n, 22, 0.001, 0.49);
  JetEvaluator<double> jet(e, slots);
  std::vector<k::Isa> isas = {k::Isa::Scalar};
  if (k::isa_available(k::Isa::Avx2)) isas.push_back(k::Isa::Avx2);
  std::vector<std::vector<double>> results;
  for (k::Isa isa : isas) {
    k::force_isa(isa);
    BatchEvaluator batch(e, slots, n);
    const double* inputs[] = {xs.data(), zs.data()};
    batch.evaluate(inputs, n, true);
    std::vector<double> out(batch.value(), batch.value() + n);
    out.insert(out.end(), batch.gradient(0), batch.gradient(0) + n);
    out.insert(out.end(), batch.gradient(1), batch.gradient(1) + n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::vector<double> p = {xs[i], zs[i]};
      const auto j = jet.jet(p);
      CHECK(out[i] == doctest::Approx(j.value).epsilon(1e-13));
      CHECK(out[n + i] == doctest::Approx(j.gradient[0]).epsilon(1e-12));
      CHECK(out[2 * n + i] == doctest::Approx(j.gradient[1]).epsilon(1e-12));
    }
    results.push_back(std::move(out));
  }
  if (results.size() == 2) CHECK(same_bits(results[0], results[1]));
  k::force_isa(k::isa_available(k::Isa::Avx2) ? k::Isa::Avx2 : k::Isa::Scalar);
}

TEST_CASE("ISA names") {
  CHECK(k::isa_name(k::Isa::Scalar) == "scalar");
  CHECK(k::isa_name(k::Isa::Avx2) == "avx2");
}
