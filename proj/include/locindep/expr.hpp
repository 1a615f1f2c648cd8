#pragma once

// Arithmetic expression language used to declare drifts, diffusion
// coefficients, jump intensities and jump sizes.
//
//   expr    := term (('+'|'-') term)*
//   term    := '-' term | product
//   product := operand (('*'|'/') operand)*
//   operand := '-' operand | power
//   power   := atom ('^' operand)?
//   atom    := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'
//
// IDENT is one of x<k> (component k, 1-based in the text), t, theta<k>,
// exp, log, sin, cos, abs, sqrt. A leading minus applies to the whole
// product that follows it, so "-a*b" is -(a*b) and "-x^2" is -(x^2).
//
// Inside the library component and parameter indices are 0-based: the text
// "x2" denotes component index 1.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "locindep/error.hpp"
#include "locindep/format.hpp"

namespace locindep {

enum class Op : std::uint8_t {
  Number,
  Var,
  Time,
  Param,
  Neg,
  Exp,
  Log,
  Sin,
  Cos,
  Abs,
  Sqrt,
  Add,
  Sub,
  Mul,
  Div,
  Pow,
};

inline bool is_unary(Op op) { return op >= Op::Neg && op <= Op::Sqrt; }
inline bool is_binary(Op op) { return op >= Op::Add; }

/// Immutable expression tree. Copies share structure.
class Expr {
  struct Node {
    Op op;
    double value = 0.0;
    std::size_t index = 0;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
  };

 public:
  static Expr number(double v) { return Expr(Node{Op::Number, v, 0, {}, {}}); }
  static Expr variable(std::size_t component) {
    return Expr(Node{Op::Var, 0.0, component, {}, {}});
  }
  static Expr time() { return Expr(Node{Op::Time, 0.0, 0, {}, {}}); }
  static Expr param(std::size_t p) { return Expr(Node{Op::Param, 0.0, p, {}, {}}); }
  static Expr unary(Op op, const Expr& arg) {
    return Expr(Node{op, 0.0, 0, arg.node_, {}});
  }
  static Expr binary(Op op, const Expr& lhs, const Expr& rhs) {
    return Expr(Node{op, 0.0, 0, lhs.node_, rhs.node_});
  }

  Op op() const { return node_->op; }
  double value() const { return node_->value; }
  std::size_t index() const { return node_->index; }
  Expr lhs() const { return Expr(node_->lhs); }
  Expr rhs() const { return Expr(node_->rhs); }

  friend bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (a.op() != b.op()) return false;
    switch (a.op()) {
      case Op::Number:
        return a.value() == b.value();
      case Op::Var:
      case Op::Param:
        return a.index() == b.index();
      case Op::Time:
        return true;
      default:
        break;
    }
    if (!(a.lhs() == b.lhs())) return false;
    return !is_binary(a.op()) || a.rhs() == b.rhs();
  }

 private:
  explicit Expr(Node n) : node_(std::make_shared<const Node>(std::move(n))) {}
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

/// Upper bounds on indices accepted by the parser (counts, not indices).
struct ExprBounds {
  std::size_t components = std::numeric_limits<std::size_t>::max();
  std::size_t params = std::numeric_limits<std::size_t>::max();
};

namespace detail {

inline const char* function_name(Op op) {
  switch (op) {
    case Op::Exp: return "exp";
    case Op::Log: return "log";
    case Op::Sin: return "sin";
    case Op::Cos: return "cos";
    case Op::Abs: return "abs";
    case Op::Sqrt: return "sqrt";
    default: return "";
  }
}

inline char operator_symbol(Op op) {
  switch (op) {
    case Op::Add: return '+';
    case Op::Sub: return '-';
    case Op::Mul: return '*';
    case Op::Div: return '/';
    case Op::Pow: return '^';
    default: return '?';
  }
}

class Parser {
 public:
  Parser(std::string_view src, ExprBounds bounds) : src_(src), bounds_(bounds) {}

  Expr parse() {
    Expr e = expr();
    skip_space();
    if (pos_ != src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }
  [[noreturn]] void fail_at(const std::string& msg, std::size_t at) const {
    throw ParseError(msg, at);
  }

  void skip_space() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr expr() {
    Expr lhs = term();
    for (;;) {
      if (accept('+')) {
        lhs = Expr::binary(Op::Add, lhs, term());
      } else if (accept('-')) {
        lhs = Expr::binary(Op::Sub, lhs, term());
      } else {
        return lhs;
      }
    }
  }

  Expr term() {
    if (accept('-')) return Expr::unary(Op::Neg, term());
    return product();
  }

  Expr product() {
    Expr lhs = operand();
    for (;;) {
      if (accept('*')) {
        lhs = Expr::binary(Op::Mul, lhs, operand());
      } else if (accept('/')) {
        lhs = Expr::binary(Op::Div, lhs, operand());
      } else {
        return lhs;
      }
    }
  }

  Expr operand() {
    if (accept('-')) return Expr::unary(Op::Neg, operand());
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (accept('^')) return Expr::binary(Op::Pow, base, operand());
    return base;
  }

  Expr atom() {
    skip_space();
    if (pos_ >= src_.size()) fail("unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      Expr inner = expr();
      if (!accept(')')) fail("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    fail("unexpected '" + std::string(1, c) + "'");
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < src_.size() && src_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) fail_at("malformed number", start);
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
      if (digits() == 0) fail("malformed exponent");
    }
    const std::string text(src_.substr(start, pos_ - start));
    const double v = std::strtod(text.c_str(), nullptr);
    if (!std::isfinite(v)) fail_at("number out of range", start);
    return Expr::number(v);
  }

  std::size_t index_suffix(std::string_view name, std::size_t prefix, std::size_t at) const {
    const auto digits = name.substr(prefix);
    std::size_t k = 0;
    for (char d : digits) {
      if (k > 1'000'000) fail_at("index too large in '" + std::string(name) + "'", at);
      k = k * 10 + static_cast<std::size_t>(d - '0');
    }
    return k;
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string_view name = src_.substr(start, pos_ - start);

    static constexpr std::pair<std::string_view, Op> kFunctions[] = {
        {"exp", Op::Exp}, {"log", Op::Log}, {"sin", Op::Sin},
        {"cos", Op::Cos}, {"abs", Op::Abs}, {"sqrt", Op::Sqrt}};
    for (const auto& [fname, op] : kFunctions) {
      if (name == fname) {
        if (!accept('(')) fail("expected '(' after '" + std::string(name) + "'");
        Expr arg = expr();
        if (!accept(')')) fail("expected ')'");
        return Expr::unary(op, arg);
      }
    }
    if (name == "t") return Expr::time();

    auto all_digits = [](std::string_view s) {
      return !s.empty() && std::all_of(s.begin(), s.end(), [](char ch) {
        return std::isdigit(static_cast<unsigned char>(ch));
      });
    };
    if (name.size() > 1 && name[0] == 'x' && all_digits(name.substr(1))) {
      const std::size_t k = index_suffix(name, 1, start);
      if (k == 0 || k > bounds_.components)
        fail_at("component index out of range in '" + std::string(name) + "'", start);
      return Expr::variable(k - 1);
    }
    if (name.size() > 5 && name.substr(0, 5) == "theta" && all_digits(name.substr(5))) {
      const std::size_t k = index_suffix(name, 5, start);
      if (k == 0 || k > bounds_.params)
        fail_at("parameter index out of range in '" + std::string(name) + "'", start);
      return Expr::param(k - 1);
    }
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view src_;
  ExprBounds bounds_;
  std::size_t pos_ = 0;
};

inline void print(const Expr& e, std::string& out) {
  auto child = [&out](const Expr& c) {
    const bool wrap = is_binary(c.op()) || c.op() == Op::Neg;
    if (wrap) out += '(';
    print(c, out);
    if (wrap) out += ')';
  };
  switch (e.op()) {
    case Op::Number:
      out += format_double(e.value());
      return;
    case Op::Var:
      out += 'x' + std::to_string(e.index() + 1);
      return;
    case Op::Time:
      out += 't';
      return;
    case Op::Param:
      out += "theta" + std::to_string(e.index() + 1);
      return;
    case Op::Neg:
      out += '-';
      child(e.lhs());
      return;
    default:
      break;
  }
  if (is_unary(e.op())) {
    out += function_name(e.op());
    out += '(';
    print(e.lhs(), out);
    out += ')';
    return;
  }
  child(e.lhs());
  out += ' ';
  out += operator_symbol(e.op());
  out += ' ';
  child(e.rhs());
}

inline void collect(const Expr& e, Op leaf, std::set<std::size_t>& out) {
  if (e.op() == leaf) {
    out.insert(e.index());
    return;
  }
  if (is_unary(e.op()) || is_binary(e.op())) collect(e.lhs(), leaf, out);
  if (is_binary(e.op())) collect(e.rhs(), leaf, out);
}

}  // namespace detail

/// Parses `source`. Throws ParseError with the byte offset of the problem.
inline Expr parse(std::string_view source, ExprBounds bounds = {}) {
  return detail::Parser(source, bounds).parse();
}

/// Text form that parses back to the same tree.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print(e, out);
  return out;
}

/// Component indices (0-based) whose variable appears in `e`. Purely
/// syntactic: "x1 - x1" still reports component 0.
inline std::set<std::size_t> free_components(const Expr& e) {
  std::set<std::size_t> out;
  detail::collect(e, Op::Var, out);
  return out;
}

inline std::set<std::size_t> free_params(const Expr& e) {
  std::set<std::size_t> out;
  detail::collect(e, Op::Param, out);
  return out;
}

inline bool mentions_time(const Expr& e) {
  if (e.op() == Op::Time) return true;
  if (is_unary(e.op())) return mentions_time(e.lhs());
  if (is_binary(e.op())) return mentions_time(e.lhs()) || mentions_time(e.rhs());
  return false;
}

namespace detail {

inline double apply_unary(Op op, double a, const Expr& node) {
  switch (op) {
    case Op::Neg: return -a;
    case Op::Exp: return std::exp(a);
    case Op::Log:
      if (!(a > 0.0)) throw DomainError("log of non-positive value " + format_double(a), to_string(node));
      return std::log(a);
    case Op::Sin: return std::sin(a);
    case Op::Cos: return std::cos(a);
    case Op::Abs: return std::fabs(a);
    case Op::Sqrt:
      if (a < 0.0) throw DomainError("sqrt of negative value " + format_double(a), to_string(node));
      return std::sqrt(a);
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

inline double apply_binary(Op op, double a, double b, const Expr& node) {
  switch (op) {
    case Op::Add: return a + b;
    case Op::Sub: return a - b;
    case Op::Mul: return a * b;
    case Op::Div:
      if (b == 0.0) throw DomainError("division by zero", to_string(node));
      return a / b;
    case Op::Pow:
      if (a == 0.0 && b < 0.0) throw DomainError("division by zero", to_string(node));
      if (a < 0.0 && std::trunc(b) != b)
        throw DomainError("negative base with fractional exponent", to_string(node));
      return std::pow(a, b);
    default: return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace detail

/// Evaluates `e`. Out-of-range indices read as an error rather than UB.
inline double eval(const Expr& e, std::span<const double> state, double t,
                   std::span<const double> theta = {}) {
  switch (e.op()) {
    case Op::Number:
      return e.value();
    case Op::Var:
      if (e.index() >= state.size())
        throw DomainError("state has no component " + std::to_string(e.index() + 1), to_string(e));
      return state[e.index()];
    case Op::Time:
      return t;
    case Op::Param:
      if (e.index() >= theta.size())
        throw DomainError("parameter " + std::to_string(e.index() + 1) + " is unbound", to_string(e));
      return theta[e.index()];
    default:
      break;
  }
  const double a = eval(e.lhs(), state, t, theta);
  if (is_unary(e.op())) return detail::apply_unary(e.op(), a, e);
  const double b = eval(e.rhs(), state, t, theta);
  return detail::apply_binary(e.op(), a, b, e);
}

/// Replaces parameters with the given values (unset entries stay symbolic)
/// and folds the result: constant subtrees collapse, and products with a
/// literal zero factor collapse to zero.
inline Expr bind_params(const Expr& e, std::span<const std::optional<double>> values) {
  switch (e.op()) {
    case Op::Param:
      if (e.index() < values.size() && values[e.index()]) return Expr::number(*values[e.index()]);
      return e;
    case Op::Number:
    case Op::Var:
    case Op::Time:
      return e;
    default:
      break;
  }
  auto is_num = [](const Expr& x, double v) { return x.op() == Op::Number && x.value() == v; };
  const Expr a = bind_params(e.lhs(), values);
  if (is_unary(e.op())) {
    if (a.op() == Op::Number) {
      try {
        return Expr::number(detail::apply_unary(e.op(), a.value(), e));
      } catch (const DomainError&) {
      }
    }
    return Expr::unary(e.op(), a);
  }
  const Expr b = bind_params(e.rhs(), values);
  if (a.op() == Op::Number && b.op() == Op::Number) {
    try {
      const double v = detail::apply_binary(e.op(), a.value(), b.value(), e);
      if (std::isfinite(v)) return Expr::number(v);
    } catch (const DomainError&) {
    }
  }
  switch (e.op()) {
    case Op::Mul:
      if (is_num(a, 0.0) || is_num(b, 0.0)) return Expr::number(0.0);
      if (is_num(a, 1.0)) return b;
      if (is_num(b, 1.0)) return a;
      break;
    case Op::Div:
      if (is_num(a, 0.0)) return Expr::number(0.0);
      break;
    case Op::Add:
      if (is_num(a, 0.0)) return b;
      if (is_num(b, 0.0)) return a;
      break;
    case Op::Sub:
      if (is_num(b, 0.0)) return a;
      if (is_num(a, 0.0)) return Expr::unary(Op::Neg, b);
      break;
    case Op::Pow:
      if (is_num(b, 0.0)) return Expr::number(1.0);
      break;
    default:
      break;
  }
  return Expr::binary(e.op(), a, b);
}

/// Postfix form of an Expr for tight evaluation loops. Results match
/// `eval` exactly; on a domain error the tree evaluator is rerun to report
/// the offending subexpression.
class Program {
 public:
  Program() : Program(Expr::number(0.0)) {}

  explicit Program(Expr e) : expr_(std::move(e)) {
    std::size_t depth = 0;
    compile(expr_, depth);
    if (max_depth_ > kInlineStack) throw SpecError("expression nests too deeply: " + to_string(expr_));
    constant_ = code_.size() == 1 && code_.front().op == Op::Number;
  }

  const Expr& expr() const { return expr_; }
  bool is_constant() const { return constant_; }

  double operator()(std::span<const double> state, double t,
                    std::span<const double> theta = {}) const {
    if (constant_) return code_.front().value;
    double stack[kInlineStack];
    std::size_t sp = 0;
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::Number: stack[sp++] = in.value; break;
        case Op::Var:
          if (in.index >= state.size()) return eval(expr_, state, t, theta);
          stack[sp++] = state[in.index];
          break;
        case Op::Time: stack[sp++] = t; break;
        case Op::Param:
          if (in.index >= theta.size()) return eval(expr_, state, t, theta);
          stack[sp++] = theta[in.index];
          break;
        case Op::Neg: stack[sp - 1] = -stack[sp - 1]; break;
        case Op::Exp: stack[sp - 1] = std::exp(stack[sp - 1]); break;
        case Op::Log:
          if (!(stack[sp - 1] > 0.0)) return eval(expr_, state, t, theta);
          stack[sp - 1] = std::log(stack[sp - 1]);
          break;
        case Op::Sin: stack[sp - 1] = std::sin(stack[sp - 1]); break;
        case Op::Cos: stack[sp - 1] = std::cos(stack[sp - 1]); break;
        case Op::Abs: stack[sp - 1] = std::fabs(stack[sp - 1]); break;
        case Op::Sqrt:
          if (stack[sp - 1] < 0.0) return eval(expr_, state, t, theta);
          stack[sp - 1] = std::sqrt(stack[sp - 1]);
          break;
        case Op::Add: --sp; stack[sp - 1] += stack[sp]; break;
        case Op::Sub: --sp; stack[sp - 1] -= stack[sp]; break;
        case Op::Mul: --sp; stack[sp - 1] *= stack[sp]; break;
        case Op::Div:
          --sp;
          if (stack[sp] == 0.0) return eval(expr_, state, t, theta);
          stack[sp - 1] /= stack[sp];
          break;
        case Op::Pow: {
          --sp;
          const double a = stack[sp - 1];
          const double b = stack[sp];
          if ((a == 0.0 && b < 0.0) || (a < 0.0 && std::trunc(b) != b))
            return eval(expr_, state, t, theta);
          stack[sp - 1] = std::pow(a, b);
          break;
        }
      }
    }
    return stack[0];
  }

  /// Value plus partial derivatives with respect to the parameters listed in
  /// `wrt` (forward mode). `grad[i]` receives d/d theta[wrt[i]].
  double gradient(std::span<const double> state, double t, std::span<const double> theta,
                  std::span<const std::size_t> wrt, std::span<double> grad) const {
    const std::size_t n = wrt.size();
    std::fill(grad.begin(), grad.end(), 0.0);
    if (constant_) return code_.front().value;
    thread_local std::vector<double> scratch;
    if (scratch.size() < kInlineStack * n) scratch.resize(kInlineStack * n);
    double v[kInlineStack];
    bool live[kInlineStack];
    auto G = [&](std::size_t s) { return scratch.data() + s * n; };
    auto fallback = [&] {
      std::fill(grad.begin(), grad.end(), std::numeric_limits<double>::quiet_NaN());
      return eval(expr_, state, t, theta);
    };
    // out = ca * ga + cb * gb on slot s (the lhs); either side may be dead.
    auto combine = [&](std::size_t s, double ca, double cb) {
      double* ga = G(s);
      const double* gb = G(s + 1);
      if (live[s] && live[s + 1]) {
        for (std::size_t i = 0; i < n; ++i) ga[i] = ca * ga[i] + cb * gb[i];
      } else if (live[s]) {
        for (std::size_t i = 0; i < n; ++i) ga[i] *= ca;
      } else if (live[s + 1]) {
        for (std::size_t i = 0; i < n; ++i) ga[i] = cb * gb[i];
        live[s] = true;
      }
    };
    auto scale = [&](std::size_t s, double c) {
      if (live[s])
        for (std::size_t i = 0; i < n; ++i) G(s)[i] *= c;
    };

    std::size_t sp = 0;
    for (const Instr& in : code_) {
      switch (in.op) {
        case Op::Number: live[sp] = false; v[sp++] = in.value; break;
        case Op::Var:
          if (in.index >= state.size()) return fallback();
          live[sp] = false;
          v[sp++] = state[in.index];
          break;
        case Op::Time: live[sp] = false; v[sp++] = t; break;
        case Op::Param: {
          if (in.index >= theta.size()) return fallback();
          const auto it = std::find(wrt.begin(), wrt.end(), in.index);
          live[sp] = it != wrt.end();
          if (live[sp]) {
            std::fill(G(sp), G(sp) + n, 0.0);
            G(sp)[it - wrt.begin()] = 1.0;
          }
          v[sp++] = theta[in.index];
          break;
        }
        case Op::Neg: v[sp - 1] = -v[sp - 1]; scale(sp - 1, -1.0); break;
        case Op::Exp: v[sp - 1] = std::exp(v[sp - 1]); scale(sp - 1, v[sp - 1]); break;
        case Op::Log:
          if (!(v[sp - 1] > 0.0)) return fallback();
          scale(sp - 1, 1.0 / v[sp - 1]);
          v[sp - 1] = std::log(v[sp - 1]);
          break;
        case Op::Sin: scale(sp - 1, std::cos(v[sp - 1])); v[sp - 1] = std::sin(v[sp - 1]); break;
        case Op::Cos: scale(sp - 1, -std::sin(v[sp - 1])); v[sp - 1] = std::cos(v[sp - 1]); break;
        case Op::Abs: scale(sp - 1, v[sp - 1] < 0.0 ? -1.0 : 1.0); v[sp - 1] = std::fabs(v[sp - 1]); break;
        case Op::Sqrt:
          if (v[sp - 1] < 0.0) return fallback();
          v[sp - 1] = std::sqrt(v[sp - 1]);
          scale(sp - 1, 0.5 / v[sp - 1]);
          break;
        case Op::Add: --sp; combine(sp - 1, 1.0, 1.0); v[sp - 1] += v[sp]; break;
        case Op::Sub: --sp; combine(sp - 1, 1.0, -1.0); v[sp - 1] -= v[sp]; break;
        case Op::Mul: --sp; combine(sp - 1, v[sp], v[sp - 1]); v[sp - 1] *= v[sp]; break;
        case Op::Div:
          --sp;
          if (v[sp] == 0.0) return fallback();
          combine(sp - 1, 1.0 / v[sp], -v[sp - 1] / (v[sp] * v[sp]));
          v[sp - 1] /= v[sp];
          break;
        case Op::Pow: {
          --sp;
          const double a = v[sp - 1];
          const double b = v[sp];
          if ((a == 0.0 && b < 0.0) || (a < 0.0 && std::trunc(b) != b)) return fallback();
          const double r = std::pow(a, b);
          const double da = b == 0.0 ? 0.0 : b * std::pow(a, b - 1.0);
          double db = 0.0;
          if (live[sp]) db = a > 0.0 ? r * std::log(a) : (a == 0.0 ? 0.0 : std::numeric_limits<double>::quiet_NaN());
          combine(sp - 1, da, db);
          v[sp - 1] = r;
          break;
        }
      }
    }
    if (live[0]) std::copy(G(0), G(0) + n, grad.begin());
    return v[0];
  }

 private:
  static constexpr std::size_t kInlineStack = 64;

  struct Instr {
    Op op;
    std::size_t index = 0;
    double value = 0.0;
  };

  void compile(const Expr& e, std::size_t& depth) {
    if (is_unary(e.op())) {
      compile(e.lhs(), depth);
      code_.push_back({e.op()});
      return;
    }
    if (is_binary(e.op())) {
      compile(e.lhs(), depth);
      compile(e.rhs(), depth);
      code_.push_back({e.op()});
      --depth;
      return;
    }
    code_.push_back({e.op(), e.index(), e.value()});
    max_depth_ = std::max(max_depth_, ++depth);
  }

  Expr expr_;
  std::vector<Instr> code_;
  std::size_t max_depth_ = 0;
  bool constant_ = false;
};

}  // namespace locindep
