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
#include <cstring>

#include "stratcheck/error.hpp"
#include "stratcheck/expr.hpp"
#include "stratcheck/kernels.hpp"

namespace stratcheck {

BatchEvaluator::BatchEvaluator(const Expr& e, std::span<const std::string> slots, std::size_t capacity)
    : expr_(&e), slots_(slots.size()), capacity_(capacity) {
  var_slot_.assign(e.free_vars().size(), -1);
  for (std::size_t v = 0; v < e.free_vars().size(); ++v) {
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (slots[s] == e.free_vars()[v]) var_slot_[v] = static_cast<int>(s);
    if (var_slot_[v] < 0) throw InputError("", "variable '" + e.free_vars()[v] + "' is not bound");
  }
  vals_.resize(e.nodes().size() * capacity_);
  grads_.resize(e.nodes().size() * slots_ * capacity_);
  tmp_.resize(2 * capacity_);
}

// Mirrors JetEvaluator<double> operation by operation so both paths agree.
void BatchEvaluator::evaluate(std::span<const double* const> inputs, std::size_t n, bool with_gradient) {
  if (n > capacity_) throw InputError("", "batch larger than evaluator capacity");
  if (inputs.size() != slots_) throw InputError("", "batch has the wrong number of inputs");
  const kernels::Table& k = kernels::active();
  const auto& nodes = expr_->nodes();
  const std::size_t m = slots_;
  double* t0 = tmp_.data();
  double* t1 = tmp_.data() + capacity_;
  last_gradient_ = with_gradient;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& nd = nodes[i];
    const int ii = static_cast<int>(i);
    double* v = val(ii);
    const double* a = nd.lhs >= 0 ? val(nd.lhs) : nullptr;
    const double* b = nd.rhs >= 0 ? val(nd.rhs) : nullptr;
    auto ga = [&](std::size_t s) { return grad(nd.lhs, s); };
    auto gb = [&](std::size_t s) { return grad(nd.rhs, s); };
    switch (nd.op) {
      case Op::Const:
        k.fill(nd.value, v, n);
        if (with_gradient)
          for (std::size_t s = 0; s < m; ++s) k.fill(0.0, grad(ii, s), n);
        break;
      case Op::Var: {
        const auto slot = static_cast<std::size_t>(var_slot_[static_cast<std::size_t>(nd.var)]);
        std::memcpy(v, inputs[slot], n * sizeof(double));
        if (with_gradient)
          for (std::size_t s = 0; s < m; ++s) k.fill(s == slot ? 1.0 : 0.0, grad(ii, s), n);
        break;
      }
      case Op::Add:
        k.add(a, b, v, n);
        if (with_gradient)
          for (std::size_t s = 0; s < m; ++s) k.add(ga(s), gb(s), grad(ii, s), n);
        break;
      case Op::Sub:
        k.sub(a, b, v, n);
        if (with_gradient)
          for (std::size_t s = 0; s < m; ++s) k.sub(ga(s), gb(s), grad(ii, s), n);
        break;
      case Op::Mul:
        k.mul(a, b, v, n);
        if (with_gradient)
          for (std::size_t s = 0; s < m; ++s) {
            k.mul(ga(s), b, t0, n);
            k.mul(a, gb(s), t1, n);
            k.add(t0, t1, grad(ii, s), n);
          }
        break;
      case Op::Div:
        k.div(a, b, v, n);
        if (with_gradient)
          for (std::size_t s = 0; s < m; ++s) {
            k.mul(v, gb(s), t0, n);
            k.sub(ga(s), t0, t0, n);
            k.div(t0, b, grad(ii, s), n);
          }
        break;
      case Op::Pow:
        if (const double* ne = expr_->integer_exponent(ii)) {
          const long p = static_cast<long>(*ne);
          for (std::size_t j = 0; j < n; ++j) v[j] = std::pow(a[j], static_cast<double>(p));
          if (with_gradient) {
            for (std::size_t j = 0; j < n; ++j)
              t1[j] = p == 0 ? 0.0 : static_cast<double>(p) * std::pow(a[j], static_cast<double>(p - 1));
            for (std::size_t s = 0; s < m; ++s) k.mul(t1, ga(s), grad(ii, s), n);
          }
        } else {
          for (std::size_t j = 0; j < n; ++j) {
            // Negative bases yield NaN and raise FE_INVALID for the caller.
            t1[j] = std::log(a[j]);
            v[j] = std::exp(b[j] * t1[j]);
          }
          if (with_gradient)
            for (std::size_t s = 0; s < m; ++s) {
              const double* gas = ga(s);
              const double* gbs = gb(s);
              double* g = grad(ii, s);
              for (std::size_t j = 0; j < n; ++j) g[j] = v[j] * (gbs[j] * t1[j] + b[j] * gas[j] / a[j]);
            }
        }
        break;
      case Op::Neg:
        k.neg(a, v, n);
        if (with_gradient)
          for (std::size_t s = 0; s < m; ++s) k.neg(ga(s), grad(ii, s), n);
        break;
      case Op::Exp:
        for (std::size_t j = 0; j < n; ++j) v[j] = std::exp(a[j]);
        if (with_gradient)
          for (std::size_t s = 0; s < m; ++s) k.mul(v, ga(s), grad(ii, s), n);
        break;
      case Op::Ln:
        for (std::size_t j = 0; j < n; ++j) v[j] = std::log(a[j]);
        if (with_gradient)
          for (std::size_t s = 0; s < m; ++s) k.div(ga(s), a, grad(ii, s), n);
        break;
      case Op::Sqrt:
        k.sqrt(a, v, n);
        if (with_gradient) {
          k.add(v, v, t0, n);
          for (std::size_t s = 0; s < m; ++s) k.div(ga(s), t0, grad(ii, s), n);
        }
        break;
      case Op::Abs:
        k.abs(a, v, n);
        if (with_gradient)
          for (std::size_t s = 0; s < m; ++s) {
            const double* gas = ga(s);
            double* g = grad(ii, s);
            for (std::size_t j = 0; j < n; ++j) g[j] = a[j] > 0.0 ? gas[j] : (a[j] < 0.0 ? -gas[j] : 0.0);
          }
        break;
      case Op::Sin:
        for (std::size_t j = 0; j < n; ++j) v[j] = std::sin(a[j]);
        if (with_gradient) {
          for (std::size_t j = 0; j < n; ++j) t1[j] = std::cos(a[j]);
          for (std::size_t s = 0; s < m; ++s) k.mul(t1, ga(s), grad(ii, s), n);
        }
        break;
      case Op::Asinh:
        for (std::size_t j = 0; j < n; ++j) v[j] = std::asinh(a[j]);
        if (with_gradient) {
          for (std::size_t j = 0; j < n; ++j) {
            const double r = std::fabs(a[j]);
            t1[j] = r > 1e8 ? r : std::sqrt(1.0 + a[j] * a[j]);
          }
          for (std::size_t s = 0; s < m; ++s) k.div(ga(s), t1, grad(ii, s), n);
        }
        break;
    }
  }
}

const double* BatchEvaluator::value() const {
  return vals_.data() + static_cast<std::size_t>(expr_->root()) * capacity_;
}

const double* BatchEvaluator::gradient(std::size_t slot) const {
  if (!last_gradient_) throw InputError("", "gradient requested from a value-only batch");
  return grads_.data() + (static_cast<std::size_t>(expr_->root()) * slots_ + slot) * capacity_;
}

}  // namespace stratcheck
