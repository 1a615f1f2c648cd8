#pragma once

// BFGS minimization, with analytic or central-difference gradients.

#include <cmath>
#include <cstddef>
#include <limits>

#include <Eigen/Dense>

namespace locindep::optimize {

struct Options {
  double gradient_tolerance = 1e-8;  // max-norm
  int max_iterations = 200;
};

struct Result {
  Eigen::VectorXd x;
  double value = std::numeric_limits<double>::infinity();
  double gradient_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
};

/// Central differences with step 1e-5 * (1 + |x_i|).
template <class F>
Eigen::VectorXd central_gradient(F& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * (1.0 + std::fabs(x[i]));
    probe[i] = x[i] + h;
    const double up = f(probe);
    probe[i] = x[i] - h;
    const double down = f(probe);
    probe[i] = x[i];
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// Minimizes a function given as `fg(x, g)`, which returns f(x) and writes
/// the gradient into g. Non-finite values are treated as +infinity by the
/// line search. `H0`, when given, is the initial inverse-Hessian estimate.
/// Stops when the gradient max-norm drops below the tolerance, when no step
/// along the search direction lowers f, or at the iteration cap.
template <class FG>
Result bfgs_with_gradient(FG&& fg, Eigen::VectorXd x0, const Options& opt = {},
                          const Eigen::MatrixXd* H0 = nullptr) {
  auto value = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double v = fg(x, g);
    return std::isfinite(v) && g.allFinite() ? v : std::numeric_limits<double>::infinity();
  };
  const Eigen::Index n = x0.size();
  Result res;
  res.x = std::move(x0);
  Eigen::VectorXd g(n);
  res.value = value(res.x, g);
  if (n == 0) {
    res.gradient_norm = 0.0;
    res.converged = std::isfinite(res.value);
    return res;
  }
  if (!std::isfinite(res.value)) return res;

  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  Eigen::MatrixXd H = H0 ? *H0 : I;  // inverse Hessian estimate
  bool scaled = H0 != nullptr;
  Eigen::VectorXd x_new(n), g_new(n);
  for (res.iterations = 0; res.iterations < opt.max_iterations; ++res.iterations) {
    res.gradient_norm = g.lpNorm<Eigen::Infinity>();
    if (res.gradient_norm < opt.gradient_tolerance) {
      res.converged = true;
      return res;
    }
    Eigen::VectorXd dir = -H * g;
    double slope = g.dot(dir);
    if (!(slope < 0.0)) {
      H = I;
      dir = -g;
      slope = -g.squaredNorm();
    }
    // Backtracking line search. Armijo, or near the optimum where f
    // differences drown in rounding, the approximate Wolfe test on the
    // directional derivative.
    const double noise = 1e-12 * (1.0 + std::fabs(res.value));
    double step = 1.0;
    double trial = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int k = 0; k < 60; ++k) {
      x_new = res.x + step * dir;
      trial = value(x_new, g_new);
      if (trial <= res.value + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      if (trial <= res.value + noise) {
        const double slope_new = g_new.dot(dir);
        if (slope_new >= 0.9 * slope && slope_new <= -0.9998 * slope) {
          accepted = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!accepted) {
      if (trial < res.value) {
        res.x = x_new;
        res.value = trial;
        g = g_new;
      }
      res.gradient_norm = g.lpNorm<Eigen::Infinity>();
      res.converged = res.gradient_norm < opt.gradient_tolerance;
      return res;
    }
    const Eigen::VectorXd s = x_new - res.x;
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      if (!scaled) {
        H *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      H = (I - rho * s * y.transpose()) * H * (I - rho * y * s.transpose()) + rho * s * s.transpose();
    }
    res.x = x_new;
    res.value = trial;
    g = g_new;
  }
  res.gradient_norm = g.lpNorm<Eigen::Infinity>();
  res.converged = res.gradient_norm < opt.gradient_tolerance;
  return res;
}

/// Minimizes `f` using central-difference gradients.
template <class F>
Result bfgs(F&& f, Eigen::VectorXd x0, const Options& opt = {}) {
  auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double v = f(x);
    if (!std::isfinite(v)) return v;
    g = central_gradient(f, x);
    return v;
  };
  return bfgs_with_gradient(fg, std::move(x0), opt);
}

}  // namespace locindep::optimize
