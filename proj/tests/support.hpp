#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "locindep/locindep.hpp"

namespace testing_support {

using locindep::Expr;
using locindep::Op;

/// Random trees over x1..x<m>, t, theta1..theta<p>, non-negative literals
/// and every operator.
class ExprGen {
 public:
  ExprGen(std::uint64_t seed, std::size_t m, std::size_t p) : rng_(seed), m_(m), p_(p) {}

  Expr operator()(int depth) {
    if (depth <= 0 || pick(4) == 0) return leaf();
    if (pick(3) == 0) {
      static constexpr Op kUnary[] = {Op::Neg, Op::Exp, Op::Log, Op::Sin, Op::Cos, Op::Abs, Op::Sqrt};
      return Expr::unary(kUnary[pick(7)], (*this)(depth - 1));
    }
    static constexpr Op kBinary[] = {Op::Add, Op::Sub, Op::Mul, Op::Div, Op::Pow};
    const Op op = kBinary[pick(5)];
    return Expr::binary(op, (*this)(depth - 1), (*this)(depth - 1));
  }

  /// Trees built only from smooth, everywhere-defined operations, with
  /// literals of order one.
  Expr smooth(int depth) {
    if (depth <= 0 || pick(4) == 0) return pick(4) == 0 ? Expr::number(0.5 * static_cast<double>(pick(5))) : leaf(false);
    switch (pick(7)) {
      case 0: return Expr::unary(Op::Neg, smooth(depth - 1));
      case 1: return Expr::unary(Op::Sin, smooth(depth - 1));
      case 2: return Expr::unary(Op::Cos, smooth(depth - 1));
      case 3: return Expr::binary(Op::Add, smooth(depth - 1), smooth(depth - 1));
      case 4: return Expr::binary(Op::Sub, smooth(depth - 1), smooth(depth - 1));
      case 5: return Expr::binary(Op::Mul, smooth(depth - 1), smooth(depth - 1));
      default: return Expr::unary(Op::Exp, Expr::binary(Op::Mul, Expr::number(0.1), smooth(depth - 1)));
    }
  }

  std::vector<double> vec(std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> out(n);
    for (auto& v : out) v = u(rng_);
    return out;
  }

  std::size_t pick(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng_); }

 private:
  Expr leaf(bool literals = true) {
    switch (pick(literals ? 4 : 3)) {
      case 0: return Expr::variable(pick(m_));
      case 1: return p_ ? Expr::param(pick(p_)) : Expr::time();
      case 2: return Expr::time();
      default: {
        static constexpr double kLiterals[] = {0.0, 0.5, 1.0, 2.0, 3.25, 1e-3, 1e3, 0.1};
        return Expr::number(kLiterals[pick(8)]);
      }
    }
  }

  std::mt19937_64 rng_;
  std::size_t m_;
  std::size_t p_;
};

/// A spec from a list of component objects; horizon and params optional.
inline locindep::ProcessSpec make_spec(const std::vector<nlohmann::json>& components,
                                       double horizon = 1.0, std::size_t params = 0,
                                       std::vector<double> theta = {}) {
  nlohmann::json doc;
  doc["m"] = components.size();
  doc["horizon"] = horizon;
  doc["params"] = params;
  if (!theta.empty()) doc["theta"] = theta;
  doc["components"] = components;
  return locindep::spec_from_json(doc);
}

inline nlohmann::json diffusion(const std::string& drift, const std::string& sigma = "1",
                                double x0 = 0.0) {
  return {{"kind", "diffusion"}, {"drift", drift}, {"sigma", sigma}, {"x0", x0}};
}

inline nlohmann::json counting(const std::string& intensity) {
  return {{"kind", "counting"}, {"jump_intensity", intensity}, {"x0", 0}};
}

inline nlohmann::json jump_diffusion(const std::string& drift, const std::string& sigma,
                                     const std::string& intensity, const std::string& size,
                                     double x0 = 0.0) {
  return {{"kind", "jump-diffusion"}, {"drift", drift},      {"sigma", sigma},
          {"jump_intensity", intensity}, {"jump_size", size}, {"x0", x0}};
}

}  // namespace testing_support
