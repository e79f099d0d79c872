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
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stratcheck/numscale.hpp"

namespace stratcheck {

enum class Op : unsigned char { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Ln, Sqrt, Abs, Sin, Asinh };

struct Node {
  Op op = Op::Const;
  double value = 0.0;  // Const only
  int var = -1;        // Var only: index into Expr::free_vars()
  int lhs = -1;        // first operand (unary ops and functions use lhs only)
  int rhs = -1;
  std::size_t offset = 0;  // byte offset of the token that produced the node
  bool constant = false;   // no variable below this node
  double folded = 0.0;     // double value of a constant subtree
};

enum class ScalarSystem { Standard, Extended };

// Immutable parsed expression. Nodes are stored children-first, so index order
// is a valid evaluation order; the root is the last node.
class Expr {
 public:
  static Expr parse(std::string_view text);

  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  int root() const noexcept { return static_cast<int>(nodes_.size()) - 1; }
  // Variable names in lexicographic order.
  const std::vector<std::string>& free_vars() const noexcept { return vars_; }
  const std::string& source() const noexcept { return source_; }

  // Exponent of a power node when it is a constant integer, else nullptr.
  const double* integer_exponent(int pow_node) const;
  std::string describe(int node) const;

  bool structurally_equal(const Expr& other) const;

 private:
  friend class Parser;
  std::vector<Node> nodes_;
  std::vector<std::string> vars_;
  std::string source_;
};

std::string print(const Expr& e);

template <class S>
struct Jet {
  S value{};
  std::vector<S> gradient;
};

// Forward-mode evaluator over a fixed variable order. Slots name the inputs;
// every free variable of the expression must appear among them and the
// gradient is indexed by slot. Holds scratch space, so one instance per thread.
template <class S>
class JetEvaluator {
 public:
  JetEvaluator(const Expr& e, std::span<const std::string> slots);

  Jet<S> jet(std::span<const S> point);
  S value(std::span<const S> point);
  std::size_t slot_count() const noexcept { return slots_; }

 private:
  void run(std::span<const S> point, bool with_gradient);

  const Expr* expr_;
  std::size_t slots_;
  std::vector<int> var_slot_;
  std::vector<S> val_;
  std::vector<S> grad_;  // node-major, slots_ entries per node
};

extern template class JetEvaluator<double>;
extern template class JetEvaluator<XScalar>;

// Gradient indexed by e.free_vars(). Throws DomainError naming the node.
template <class S>
Jet<S> eval_jet(const Expr& e, const std::map<std::string, S>& point);

extern template Jet<double> eval_jet(const Expr&, const std::map<std::string, double>&);
extern template Jet<XScalar> eval_jet(const Expr&, const std::map<std::string, XScalar>&);

// Batched double evaluation over structure-of-arrays inputs, with elementwise
// arithmetic routed through the SIMD kernel table. Invalid lanes produce
// non-finite values and raise floating-point exception flags instead of
// throwing; callers check the flags and fall back to JetEvaluator<XScalar>.
class BatchEvaluator {
 public:
  BatchEvaluator(const Expr& e, std::span<const std::string> slots, std::size_t capacity);

  // inputs[s] points at n values for slot s. Results stay valid until the next call.
  void evaluate(std::span<const double* const> inputs, std::size_t n, bool with_gradient);
  const double* value() const;
  const double* gradient(std::size_t slot) const;
  std::size_t capacity() const noexcept { return capacity_; }

 private:
  double* val(int node) { return vals_.data() + static_cast<std::size_t>(node) * capacity_; }
  double* grad(int node, std::size_t slot) {
    return grads_.data() + (static_cast<std::size_t>(node) * slots_ + slot) * capacity_;
  }

  const Expr* expr_;
  std::size_t slots_;
  std::size_t capacity_;
  std::vector<int> var_slot_;
  std::vector<double> vals_;
  std::vector<double> grads_;
  std::vector<double> tmp_;
  bool last_gradient_ = false;
};

}  // namespace stratcheck
