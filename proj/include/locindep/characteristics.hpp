#pragma once

// Semimartingale characteristics of one component along simulated paths,
// integrated with left-endpoint (predictable) quadrature.
//
//   B  = int f_k ds            (drift part)
//   C  = int sigma_k^2 ds      (bracket of the continuous martingale part)
//   nu = int beta_k * size ds  (integrated jump compensator)
//
// The compensator of X_k is taken as Lambda_k = B + nu.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "locindep/error.hpp"
#include "locindep/expr.hpp"
#include "locindep/model.hpp"
#include "locindep/simulate.hpp"

namespace locindep {

/// Dense (path x grid point) array of reals.
class PathMatrix {
 public:
  PathMatrix() = default;
  PathMatrix(std::size_t n_paths, std::size_t points)
      : n_paths_(n_paths), points_(points), data_(n_paths * points, 0.0) {}

  std::size_t n_paths() const { return n_paths_; }
  std::size_t points() const { return points_; }

  double operator()(std::size_t path, std::size_t i) const { return data_[path * points_ + i]; }
  double& operator()(std::size_t path, std::size_t i) { return data_[path * points_ + i]; }

  std::span<const double> row(std::size_t path) const {
    return {data_.data() + path * points_, points_};
  }
  std::span<double> row(std::size_t path) { return {data_.data() + path * points_, points_}; }

  /// Values at the last grid point, one per path.
  std::vector<double> terminal() const {
    std::vector<double> out(n_paths_);
    for (std::size_t p = 0; p < n_paths_; ++p) out[p] = (*this)(p, points_ - 1);
    return out;
  }

 private:
  std::size_t n_paths_ = 0;
  std::size_t points_ = 0;
  std::vector<double> data_;
};

struct Triplet {
  PathMatrix B;
  PathMatrix C;
  PathMatrix nu;

  /// Lambda_k = B + nu at path p, grid point i.
  double compensator(std::size_t p, std::size_t i) const { return B(p, i) + nu(p, i); }
};

/// Throws SpecError when `paths` cannot have come from `spec`.
inline void check_compatible(const ProcessSpec& spec, const PathSet& paths, std::size_t k) {
  if (paths.dimension() != spec.size())
    throw SpecError("grid mismatch: paths have " + std::to_string(paths.dimension()) +
                    " components, spec has " + std::to_string(spec.size()));
  if (std::fabs(paths.horizon() - spec.horizon) > 1e-9 * std::max(1.0, spec.horizon))
    throw SpecError("grid mismatch: path horizon " + format_double(paths.horizon()) +
                    " differs from spec horizon " + format_double(spec.horizon));
  if (k >= spec.size()) throw SpecError("component index out of range");
  if (spec.params > 0 && !spec.has_bound_theta())
    throw SpecError("spec parameters are unbound");
}

inline Triplet evaluate_triplet(const ProcessSpec& spec, const PathSet& paths, std::size_t k) {
  check_compatible(spec, paths, k);
  const auto& c = spec.components[k];
  const std::size_t n = paths.n_paths();
  const std::size_t steps = paths.steps();
  const double h = paths.dt();
  const auto& grid = paths.grid();
  const std::span<const double> theta(spec.theta);

  Triplet out{PathMatrix(n, steps + 1), PathMatrix(n, steps + 1), PathMatrix(n, steps + 1)};
  const bool continuous = has_continuous_part(c.kind);
  const bool jumps = has_jump_part(c.kind);
  const Program drift(continuous ? *c.drift : Expr::number(0.0));
  const Program intensity(jumps ? *c.jump_intensity : Expr::number(0.0));
  const Program size(effective_jump_size(c));

  std::vector<double> sigma2(steps, 0.0);
  if (continuous) {
    for (std::size_t i = 0; i < steps; ++i) {
      const double s = eval(*c.sigma, {}, grid[i], theta);
      sigma2[i] = s * s;
    }
  }

  parallel_for(n, [&](std::size_t p) {
    double b = 0.0, cc = 0.0, v = 0.0;
    for (std::size_t i = 0; i < steps; ++i) {
      const auto x = paths.state(p, i);
      const double t = grid[i];
      if (continuous) {
        b += drift(x, t, theta) * h;
        cc += sigma2[i] * h;
      }
      if (jumps) v += intensity(x, t, theta) * size(x, t, theta) * h;
      out.B(p, i + 1) = b;
      out.C(p, i + 1) = cc;
      out.nu(p, i + 1) = v;
    }
  });
  return out;
}

/// M_k(t_i) = X_k(t_i) - X_k(0) - Lambda_k(t_i) per path.
inline PathMatrix martingale_residual(const ProcessSpec& spec, const PathSet& paths,
                                      std::size_t k) {
  const Triplet tr = evaluate_triplet(spec, paths, k);
  const std::size_t points = paths.steps() + 1;
  PathMatrix out(paths.n_paths(), points);
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    const double x0 = paths.value(p, 0, k);
    for (std::size_t i = 0; i < points; ++i)
      out(p, i) = paths.value(p, i, k) - x0 - tr.compensator(p, i);
  }
  return out;
}

}  // namespace locindep
