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

#include "stratcheck/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string>

#include "stratcheck/error.hpp"

namespace stratcheck {

namespace {

struct FunctionName {
  std::string_view name;
  Op op;
};

constexpr FunctionName kFunctions[] = {{"exp", Op::Exp},   {"ln", Op::Ln},   {"sqrt", Op::Sqrt},
                                       {"abs", Op::Abs},   {"sin", Op::Sin}, {"asinh", Op::Asinh}};

const FunctionName* find_function(std::string_view name) {
  for (const auto& f : kFunctions)
    if (f.name == name) return &f;
  return nullptr;
}

std::string_view function_name(Op op) {
  for (const auto& f : kFunctions)
    if (f.op == op) return f.name;
  return "?";
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

double fold(Op op, double a, double b) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div: return a / b;
    case Op::Pow: return std::pow(a, b);
    case Op::Neg: return -a;
    case Op::Exp: return std::exp(a);
    case Op::Ln: return std::log(a);
    case Op::Sqrt: return std::sqrt(a);
    case Op::Abs: return std::fabs(a);
    case Op::Sin: return std::sin(a);
    case Op::Asinh: return std::asinh(a);
    default: return a;
  }
}

}  // namespace

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  Expr run() {
    skip();
    if (at_end()) throw ParseError("empty expression", pos_);
    expression();
    skip();
    if (!at_end()) throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_);
    finish();
    return std::move(out_);
  }

 private:
  int expression() {
    int lhs = term();
    for (;;) {
      skip();
      if (at_end() || (peek() != '+' && peek() != '-')) return lhs;
      const std::size_t at = pos_;
      const Op op = peek() == '+' ? Op::Add : Op::Sub;
      ++pos_;
      const int rhs = term();
      lhs = binary(op, lhs, rhs, at);
    }
  }

  int term() {
    int lhs = unary();
    for (;;) {
      skip();
      if (at_end() || (peek() != '*' && peek() != '/')) return lhs;
      const std::size_t at = pos_;
      const Op op = peek() == '*' ? Op::Mul : Op::Div;
      ++pos_;
      const int rhs = unary();
      lhs = binary(op, lhs, rhs, at);
    }
  }

  int unary() {
    skip();
    if (!at_end() && peek() == '-') {
      const std::size_t at = pos_;
      ++pos_;
      const int arg = unary();
      return unary_node(Op::Neg, arg, at);
    }
    return power();
  }

  int power() {
    const int base = primary();
    skip();
    if (at_end() || peek() != '^') return base;
    const std::size_t at = pos_;
    ++pos_;
    // The exponent is a unary expression, which makes ^ right-associative and
    // admits x^-2.
    const int exponent = unary();
    return binary(Op::Pow, base, exponent, at);
  }

  int primary() {
    skip();
    if (at_end()) throw ParseError("unexpected end of input", pos_);
    const std::size_t at = pos_;
    const char c = peek();
    if (c == '(') {
      ++pos_;
      const int inner = expression();
      expect(')');
      return inner;
    }
    if (is_digit(c) || c == '.') return number();
    if (is_ident_start(c)) {
      std::size_t end = pos_;
      while (end < text_.size() && is_ident_char(text_[end])) ++end;
      const std::string_view name = text_.substr(pos_, end - pos_);
      pos_ = end;
      skip();
      const bool call = !at_end() && peek() == '(';
      const FunctionName* fn = find_function(name);
      if (call) {
        if (!fn) throw ParseError("unknown function '" + std::string(name) + "'", at);
        ++pos_;
        const int arg = expression();
        expect(')');
        return unary_node(fn->op, arg, at);
      }
      if (fn) throw ParseError("function '" + std::string(name) + "' needs a parenthesized argument", at);
      return variable(name, at);
    }
    throw ParseError(std::string("unexpected '") + c + "'", at);
  }

  int number() {
    const std::size_t at = pos_;
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr == first) throw ParseError("malformed number", at);
    pos_ += static_cast<std::size_t>(ptr - first);
    Node n;
    n.op = Op::Const;
    n.value = v;
    n.offset = at;
    n.constant = true;
    n.folded = v;
    return push(n);
  }

  int variable(std::string_view name, std::size_t at) {
    auto it = std::find(names_.begin(), names_.end(), name);
    int idx = static_cast<int>(it - names_.begin());
    if (it == names_.end()) names_.emplace_back(name);
    Node n;
    n.op = Op::Var;
    n.var = idx;
    n.offset = at;
    return push(n);
  }

  int binary(Op op, int lhs, int rhs, std::size_t at) {
    Node n;
    n.op = op;
    n.lhs = lhs;
    n.rhs = rhs;
    n.offset = at;
    const Node& a = out_.nodes_[static_cast<std::size_t>(lhs)];
    const Node& b = out_.nodes_[static_cast<std::size_t>(rhs)];
    n.constant = a.constant && b.constant;
    if (n.constant) n.folded = fold(op, a.folded, b.folded);
    return push(n);
  }

  int unary_node(Op op, int arg, std::size_t at) {
    Node n;
    n.op = op;
    n.lhs = arg;
    n.offset = at;
    const Node& a = out_.nodes_[static_cast<std::size_t>(arg)];
    n.constant = a.constant;
    if (n.constant) n.folded = fold(op, a.folded, 0.0);
    return push(n);
  }

  int push(const Node& n) {
    out_.nodes_.push_back(n);
    return static_cast<int>(out_.nodes_.size()) - 1;
  }

  void finish() {
    std::vector<std::string> sorted = names_;
    std::sort(sorted.begin(), sorted.end());
    std::vector<int> remap(names_.size());
    for (std::size_t i = 0; i < names_.size(); ++i) {
      remap[i] = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), names_[i]) - sorted.begin());
    }
    for (auto& n : out_.nodes_)
      if (n.op == Op::Var) n.var = remap[static_cast<std::size_t>(n.var)];
    out_.vars_ = std::move(sorted);
    out_.source_ = std::string(text_);
  }

  void expect(char c) {
    skip();
    if (at_end()) throw ParseError(std::string("expected '") + c + "' before end of input", pos_);
    if (peek() != c) throw ParseError(std::string("expected '") + c + "'", pos_);
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t' || text_[pos_] == '\n' ||
                                   text_[pos_] == '\r'))
      ++pos_;
  }
  bool at_end() const { return pos_ >= text_.size(); }
  char peek() const { return text_[pos_]; }

  std::string_view text_;
  std::size_t pos_ = 0;
  Expr out_;
  std::vector<std::string> names_;
};

Expr Expr::parse(std::string_view text) { return Parser(text).run(); }

const double* Expr::integer_exponent(int pow_node) const {
  const Node& p = nodes_[static_cast<std::size_t>(pow_node)];
  if (p.op != Op::Pow) return nullptr;
  const Node& e = nodes_[static_cast<std::size_t>(p.rhs)];
  if (!e.constant || !std::isfinite(e.folded) || e.folded != std::trunc(e.folded) || std::fabs(e.folded) > 1e9)
    return nullptr;
  return &e.folded;
}

bool Expr::structurally_equal(const Expr& other) const {
  if (nodes_.size() != other.nodes_.size() || vars_ != other.vars_) return false;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& a = nodes_[i];
    const Node& b = other.nodes_[i];
    if (a.op != b.op || a.lhs != b.lhs || a.rhs != b.rhs || a.var != b.var) return false;
    if (a.op == Op::Const && a.value != b.value) return false;
  }
  return true;
}

namespace {

int precedence(Op op) {
  switch (op) {
    case Op::Add:
    case Op::Sub: return 1;
    case Op::Mul:
    case Op::Div: return 2;
    case Op::Neg: return 3;
    case Op::Pow: return 4;
    default: return 5;
  }
}

void print_node(const Expr& e, int i, int min_prec, std::string& out) {
  const Node& n = e.nodes()[static_cast<std::size_t>(i)];
  const int prec = precedence(n.op);
  const bool wrap = prec < min_prec;
  if (wrap) out += '(';
  switch (n.op) {
    case Op::Const: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      break;
    }
    case Op::Var: out += e.free_vars()[static_cast<std::size_t>(n.var)]; break;
    case Op::Add:
    case Op::Sub:
    case Op::Mul:
    case Op::Div: {
      print_node(e, n.lhs, prec, out);
      out += n.op == Op::Add ? " + " : n.op == Op::Sub ? " - " : n.op == Op::Mul ? "*" : "/";
      print_node(e, n.rhs, prec + 1, out);
      break;
    }
    case Op::Pow:
      print_node(e, n.lhs, 5, out);
      out += '^';
      print_node(e, n.rhs, 3, out);
      break;
    case Op::Neg:
      out += '-';
      print_node(e, n.lhs, 3, out);
      break;
    default:
      out += function_name(n.op);
      out += '(';
      print_node(e, n.lhs, 0, out);
      out += ')';
      break;
  }
  if (wrap) out += ')';
}

}  // namespace

std::string print(const Expr& e) {
  std::string out;
  if (!e.nodes().empty()) print_node(e, e.root(), 0, out);
  return out;
}

std::string Expr::describe(int node) const {
  std::string text;
  print_node(*this, node, 0, text);
  return "'" + text + "' (offset " + std::to_string(nodes_[static_cast<std::size_t>(node)].offset) + ")";
}

// ---------------------------------------------------------------------------
// Jet evaluation

namespace {

inline bool positive(double a) { return a > 0.0; }
inline bool positive(const XScalar& a) { return a.sign() > 0; }
inline bool is_zero(double a) { return a == 0.0; }
inline bool is_zero(const XScalar& a) { return a.is_zero(); }
inline int sign_of(double a) { return a > 0.0 ? 1 : (a < 0.0 ? -1 : 0); }
inline int sign_of(const XScalar& a) { return a.sign(); }
inline double ipow(double a, long n) { return std::pow(a, static_cast<double>(n)); }
inline XScalar ipow(const XScalar& a, long n) { return pow_int(a, n); }
inline void check_finite(double v) {
  if (!std::isfinite(v)) throw DomainError("floating-point overflow");
}
inline void check_finite(const XScalar&) {}

std::vector<int> bind_slots(const Expr& e, std::span<const std::string> slots) {
  std::vector<int> map(e.free_vars().size(), -1);
  for (std::size_t v = 0; v < e.free_vars().size(); ++v) {
    for (std::size_t s = 0; s < slots.size(); ++s)
      if (slots[s] == e.free_vars()[v]) map[v] = static_cast<int>(s);
    if (map[v] < 0) throw InputError("", "variable '" + e.free_vars()[v] + "' is not bound");
  }
  return map;
}

}  // namespace

template <class S>
JetEvaluator<S>::JetEvaluator(const Expr& e, std::span<const std::string> slots)
    : expr_(&e), slots_(slots.size()), var_slot_(bind_slots(e, slots)) {
  val_.resize(e.nodes().size());
  grad_.resize(e.nodes().size() * slots_);
}

template <class S>
void JetEvaluator<S>::run(std::span<const S> point, bool with_gradient) {
  using std::abs;
  using std::asinh;
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  if (point.size() != slots_) throw InputError("", "point has the wrong number of coordinates");
  const auto& nodes = expr_->nodes();
  const std::size_t m = slots_;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const Node& n = nodes[i];
    S& v = val_[i];
    S* g = grad_.data() + i * m;
    const std::size_t li = static_cast<std::size_t>(n.lhs);
    const std::size_t ri = static_cast<std::size_t>(n.rhs);
    try {
      switch (n.op) {
        case Op::Const:
          v = S(n.value);
          if (with_gradient) std::fill(g, g + m, S(0.0));
          break;
        case Op::Var: {
          const auto slot = static_cast<std::size_t>(var_slot_[static_cast<std::size_t>(n.var)]);
          v = point[slot];
          if (with_gradient) {
            std::fill(g, g + m, S(0.0));
            g[slot] = S(1.0);
          }
          break;
        }
        case Op::Add:
          v = val_[li] + val_[ri];
          if (with_gradient)
            for (std::size_t k = 0; k < m; ++k) g[k] = grad_[li * m + k] + grad_[ri * m + k];
          break;
        case Op::Sub:
          v = val_[li] - val_[ri];
          if (with_gradient)
            for (std::size_t k = 0; k < m; ++k) g[k] = grad_[li * m + k] - grad_[ri * m + k];
          break;
        case Op::Mul: {
          const S a = val_[li];
          const S b = val_[ri];
          v = a * b;
          if (with_gradient)
            for (std::size_t k = 0; k < m; ++k) g[k] = grad_[li * m + k] * b + a * grad_[ri * m + k];
          break;
        }
        case Op::Div: {
          const S b = val_[ri];
          if (is_zero(b)) throw DomainError("division by zero");
          v = val_[li] / b;
          if (with_gradient)
            for (std::size_t k = 0; k < m; ++k) g[k] = (grad_[li * m + k] - v * grad_[ri * m + k]) / b;
          break;
        }
        case Op::Pow: {
          const S a = val_[li];
          if (const double* ne = expr_->integer_exponent(static_cast<int>(i))) {
            const long p = static_cast<long>(*ne);
            if (is_zero(a) && p < 0) throw DomainError("division by zero");
            v = ipow(a, p);
            if (with_gradient) {
              const S d = p == 0 ? S(0.0) : S(static_cast<double>(p)) * ipow(a, p - 1);
              for (std::size_t k = 0; k < m; ++k) g[k] = d * grad_[li * m + k];
            }
          } else {
            if (!positive(a)) throw DomainError("non-integer power of a nonpositive base");
            const S b = val_[ri];
            const S la = log(a);
            v = exp(b * la);
            if (with_gradient)
              for (std::size_t k = 0; k < m; ++k) g[k] = v * (grad_[ri * m + k] * la + b * grad_[li * m + k] / a);
          }
          break;
        }
        case Op::Neg:
          v = -val_[li];
          if (with_gradient)
            for (std::size_t k = 0; k < m; ++k) g[k] = -grad_[li * m + k];
          break;
        case Op::Exp:
          v = exp(val_[li]);
          if (with_gradient)
            for (std::size_t k = 0; k < m; ++k) g[k] = v * grad_[li * m + k];
          break;
        case Op::Ln: {
          const S a = val_[li];
          if (!positive(a)) throw DomainError("ln of a nonpositive value");
          v = log(a);
          if (with_gradient)
            for (std::size_t k = 0; k < m; ++k) g[k] = grad_[li * m + k] / a;
          break;
        }
        case Op::Sqrt: {
          const S a = val_[li];
          if (sign_of(a) < 0) throw DomainError("sqrt of a negative value");
          v = sqrt(a);
          if (with_gradient) {
            if (is_zero(v)) throw DomainError("sqrt is not differentiable at 0");
            const S twice = v + v;
            for (std::size_t k = 0; k < m; ++k) g[k] = grad_[li * m + k] / twice;
          }
          break;
        }
        case Op::Abs: {
          const S a = val_[li];
          v = abs(a);
          if (with_gradient) {
            const int s = sign_of(a);
            for (std::size_t k = 0; k < m; ++k)
              g[k] = s > 0 ? grad_[li * m + k] : (s < 0 ? -grad_[li * m + k] : S(0.0));
          }
          break;
        }
        case Op::Sin: {
          const S a = val_[li];
          v = sin(a);
          if (with_gradient) {
            const S c = cos(a);
            for (std::size_t k = 0; k < m; ++k) g[k] = c * grad_[li * m + k];
          }
          break;
        }
        case Op::Asinh: {
          const S a = val_[li];
          v = asinh(a);
          if (with_gradient) {
            // sqrt(1 + a^2) rounds to |a| in double once |a| > 1e8; using |a|
            // there keeps a^2 from overflowing.
            const S r = abs(a);
            const S d = r > S(1e8) ? r : sqrt(S(1.0) + a * a);
            for (std::size_t k = 0; k < m; ++k) g[k] = grad_[li * m + k] / d;
          }
          break;
        }
      }
      check_finite(v);
      if (with_gradient)
        for (std::size_t k = 0; k < m; ++k) check_finite(g[k]);
    } catch (const DomainError& err) {
      if (err.node() >= 0) throw;
      throw DomainError(std::string(err.what()) + " at node " + expr_->describe(static_cast<int>(i)),
                        static_cast<long>(i));
    }
  }
}

template <class S>
Jet<S> JetEvaluator<S>::jet(std::span<const S> point) {
  run(point, true);
  const std::size_t r = static_cast<std::size_t>(expr_->root());
  Jet<S> out;
  out.value = val_[r];
  out.gradient.assign(grad_.begin() + static_cast<std::ptrdiff_t>(r * slots_),
                      grad_.begin() + static_cast<std::ptrdiff_t>((r + 1) * slots_));
  return out;
}

template <class S>
S JetEvaluator<S>::value(std::span<const S> point) {
  run(point, false);
  return val_[static_cast<std::size_t>(expr_->root())];
}

template class JetEvaluator<double>;
template class JetEvaluator<XScalar>;

template <class S>
Jet<S> eval_jet(const Expr& e, const std::map<std::string, S>& point) {
  std::vector<S> values;
  values.reserve(e.free_vars().size());
  for (const auto& name : e.free_vars()) {
    auto it = point.find(name);
    if (it == point.end()) throw InputError("", "variable '" + name + "' is not bound");
    values.push_back(it->second);
  }
  JetEvaluator<S> ev(e, e.free_vars());
  return ev.jet(values);
}

template Jet<double> eval_jet(const Expr&, const std::map<std::string, double>&);
template Jet<XScalar> eval_jet(const Expr&, const std::map<std::string, XScalar>&);

}  // namespace stratcheck
