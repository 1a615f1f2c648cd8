#pragma once

// Girsanov log-likelihood-ratio processes log Z^{P/P0} of one component
// against its canonical reference measure P0:
//
//   diffusion       P0: driftless diffusion with the same sigma(t)
//     log Z = sum f/sigma^2 dX - 1/2 sum f^2/sigma^2 dt
//   counting        P0: unit-rate Poisson process
//     log Z = sum_{jumps} log beta(X_{s-}) + sum (1 - beta) dt
//   jump-diffusion  P0: the sum of both references; the diffusion term uses
//                   the continuous increment dX - (recorded jumps)
//
// Integrands are evaluated at the left end of each step. Under P0 the
// exponential of log Z has mean one.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "locindep/characteristics.hpp"
#include "locindep/error.hpp"
#include "locindep/expr.hpp"
#include "locindep/model.hpp"
#include "locindep/parallel.hpp"
#include "locindep/simulate.hpp"

namespace locindep {

enum class Reference { DriftlessDiffusion, UnitPoisson, DriftlessDiffusionPlusUnitPoisson };

inline std::string_view to_string(Reference r) {
  switch (r) {
    case Reference::DriftlessDiffusion: return "driftless diffusion with the same sigma";
    case Reference::UnitPoisson: return "unit-rate Poisson";
    case Reference::DriftlessDiffusionPlusUnitPoisson:
      return "driftless diffusion plus unit-rate Poisson";
  }
  return "?";
}

inline Reference reference_for(Kind k) {
  switch (k) {
    case Kind::Diffusion: return Reference::DriftlessDiffusion;
    case Kind::Counting: return Reference::UnitPoisson;
    case Kind::JumpDiffusion: return Reference::DriftlessDiffusionPlusUnitPoisson;
  }
  return Reference::DriftlessDiffusion;
}

struct LogLikProcess {
  std::size_t component = 0;
  Reference reference = Reference::DriftlessDiffusion;
  PathMatrix logZ;
};

/// The spec under the canonical reference measure for component `k`: its
/// drift becomes 0 and its jump intensity 1. Everything else is unchanged.
inline ProcessSpec reference_spec(const ProcessSpec& spec, std::size_t k) {
  if (k >= spec.size()) throw SpecError("component index out of range");
  ProcessSpec out = spec;
  auto& c = out.components[k];
  if (has_continuous_part(c.kind)) c.drift = Expr::number(0.0);
  if (has_jump_part(c.kind)) c.jump_intensity = Expr::number(1.0);
  return out;
}

/// Likelihood of one component on a fixed data set, reusable across
/// parameter values. The data and spec must outlive this object.
class ComponentLikelihood {
 public:
  ComponentLikelihood(const ProcessSpec& spec, const PathSet& paths, std::size_t k)
      : paths_(paths), k_(k) {
    check_compatible_grid(spec, paths, k);
    const auto& c = spec.components[k];
    kind_ = c.kind;
    continuous_ = has_continuous_part(kind_);
    jumps_ = has_jump_part(kind_);
    drift_ = Program(continuous_ ? *c.drift : Expr::number(0.0));
    intensity_ = Program(jumps_ ? *c.jump_intensity : Expr::number(1.0));

    const std::size_t steps = paths.steps();
    if (continuous_) {
      // sigma may depend on parameters only through bound spec values.
      inv_sigma2_.resize(steps);
      for (std::size_t i = 0; i < steps; ++i) {
        const double s = eval(*c.sigma, {}, paths.grid()[i], spec.theta);
        if (!(s > 0.0) || !std::isfinite(s))
          throw LikelihoodError("sigma of component " + std::to_string(k + 1) +
                                " must be positive; got " + format_double(s) + " at t = " +
                                format_double(paths.grid()[i]));
        inv_sigma2_[i] = 1.0 / (s * s);
      }
    }

    offsets_.assign(paths.n_paths() + 1, 0);
    for (const auto& e : paths.events()) {
      if (e.component != k) continue;
      if (!jumps_)
        throw LikelihoodError("component " + std::to_string(k + 1) +
                              " is a diffusion but the data record jumps for it");
      if (!jump_steps_.empty() && jump_path_.back() == e.path && jump_steps_.back() == e.step - 1) {
        jump_total_.back() += e.size;
        jump_count_.back() += 1;
      } else {
        jump_path_.push_back(e.path);
        jump_steps_.push_back(e.step - 1);
        jump_total_.push_back(e.size);
        jump_count_.push_back(1);
      }
    }
    for (auto p : jump_path_) ++offsets_[p + 1];
    for (std::size_t p = 0; p < paths.n_paths(); ++p) offsets_[p + 1] += offsets_[p];
  }

  std::size_t component() const { return k_; }
  Reference reference() const { return reference_for(kind_); }

  /// log Z at every grid point of every path.
  LogLikProcess process(std::span<const double> theta) const {
    LogLikProcess out{k_, reference(), PathMatrix(paths_.n_paths(), paths_.steps() + 1)};
    parallel_for(paths_.n_paths(), [&](std::size_t p) {
      auto row = out.logZ.row(p);
      row[0] = 0.0;
      accumulate(p, 0, paths_.steps(), theta, [&](std::size_t i, double acc) { row[i + 1] = acc; });
    });
    return out;
  }

  /// Per-path log Z(t_hi) - log Z(t_lo), computed on the window alone.
  std::vector<double> window(std::span<const double> theta, std::size_t lo, std::size_t hi) const {
    if (lo > hi || hi > paths_.steps()) throw SpecError("window outside the grid");
    std::vector<double> out(paths_.n_paths());
    parallel_for(paths_.n_paths(), [&](std::size_t p) {
      out[p] = accumulate(p, lo, hi, theta, [](std::size_t, double) {});
    });
    return out;
  }

  /// Sum over paths of log Z(tau); the MLE objective.
  double terminal_sum(std::span<const double> theta) const {
    double total = 0.0;
    for (std::size_t p = 0; p < paths_.n_paths(); ++p)
      total += accumulate(p, 0, paths_.steps(), theta, [](std::size_t, double) {});
    return total;
  }

  /// terminal_sum plus its gradient with respect to theta[wrt[i]]. With
  /// `fisher`, also accumulates the expected information
  ///   sum h/sigma^2 grad f grad f' + sum h/beta grad beta grad beta'.
  double terminal_sum_gradient(std::span<const double> theta, std::span<const std::size_t> wrt,
                               Eigen::VectorXd& grad, Eigen::MatrixXd* fisher = nullptr) const {
    const auto n = static_cast<Eigen::Index>(wrt.size());
    grad.setZero(n);
    if (fisher) fisher->setZero(n, n);
    Eigen::VectorXd gf(n), gb(n);
    const double h = paths_.dt();
    const auto& grid = paths_.grid();
    double total = 0.0;
    for (std::size_t p = 0; p < paths_.n_paths(); ++p) {
      std::size_t next_jump = offsets_[p];
      const std::size_t last_jump = offsets_[p + 1];
      for (std::size_t i = 0; i < paths_.steps(); ++i) {
        const auto x = paths_.state(p, i);
        const double t = grid[i];
        double jump_total = 0.0;
        unsigned jump_count = 0;
        if (next_jump < last_jump && jump_steps_[next_jump] == i) {
          jump_total = jump_total_[next_jump];
          jump_count = jump_count_[next_jump];
          ++next_jump;
        }
        if (continuous_) {
          const double f = drift_.gradient(x, t, theta, wrt, {gf.data(), wrt.size()});
          const double dxc = paths_.value(p, i + 1, k_) - x[k_] - jump_total;
          const double w = inv_sigma2_[i];
          total += w * f * (dxc - 0.5 * f * h);
          grad.noalias() += (w * (dxc - f * h)) * gf;
          if (fisher) fisher->selfadjointView<Eigen::Lower>().rankUpdate(gf, w * h);
        }
        if (jumps_) {
          const double beta = intensity_.gradient(x, t, theta, wrt, {gb.data(), wrt.size()});
          if (!std::isfinite(beta) || beta < 0.0)
            throw LikelihoodError("jump intensity " + format_double(beta) + " of component " +
                                  std::to_string(k_ + 1) + " is invalid on path " +
                                  std::to_string(p) + " at t = " + format_double(t));
          double coef = -h;
          if (jump_count > 0) {
            if (!(beta > 0.0))
              throw LikelihoodError("jump intensity of component " + std::to_string(k_ + 1) +
                                    " is zero at a jump on path " + std::to_string(p) +
                                    " at t = " + format_double(t));
            const double cnt = kind_ == Kind::Counting ? jump_total : static_cast<double>(jump_count);
            total += cnt * std::log(beta);
            coef += cnt / beta;
          }
          total += (1.0 - beta) * h;
          grad.noalias() += coef * gb;
          if (fisher && beta > 0.0) fisher->selfadjointView<Eigen::Lower>().rankUpdate(gb, h / beta);
        }
      }
    }
    if (fisher) *fisher = fisher->selfadjointView<Eigen::Lower>();
    return total;
  }

 private:
  static void check_compatible_grid(const ProcessSpec& spec, const PathSet& paths, std::size_t k) {
    if (paths.dimension() != spec.size())
      throw SpecError("grid mismatch: paths have " + std::to_string(paths.dimension()) +
                      " components, spec has " + std::to_string(spec.size()));
    if (k >= spec.size()) throw SpecError("component index out of range");
  }

  template <class Sink>
  double accumulate(std::size_t p, std::size_t lo, std::size_t hi, std::span<const double> theta,
                    Sink&& sink) const {
    const double h = paths_.dt();
    const auto& grid = paths_.grid();
    std::size_t next_jump = offsets_[p];
    const std::size_t last_jump = offsets_[p + 1];
    while (next_jump < last_jump && jump_steps_[next_jump] < lo) ++next_jump;

    double acc = 0.0;
    for (std::size_t i = lo; i < hi; ++i) {
      const auto x = paths_.state(p, i);
      const double t = grid[i];
      double jump_total = 0.0;
      unsigned jump_count = 0;
      if (next_jump < last_jump && jump_steps_[next_jump] == i) {
        jump_total = jump_total_[next_jump];
        jump_count = jump_count_[next_jump];
        ++next_jump;
      }
      if (continuous_) {
        const double f = drift_(x, t, theta);
        const double dxc = paths_.value(p, i + 1, k_) - x[k_] - jump_total;
        acc += inv_sigma2_[i] * f * (dxc - 0.5 * f * h);
      }
      if (jumps_) {
        const double beta = intensity_(x, t, theta);
        if (!std::isfinite(beta) || beta < 0.0)
          throw LikelihoodError("jump intensity " + format_double(beta) + " of component " +
                                std::to_string(k_ + 1) + " is invalid on path " +
                                std::to_string(p) + " at t = " + format_double(t));
        if (jump_count > 0) {
          if (!(beta > 0.0))
            throw LikelihoodError("jump intensity of component " + std::to_string(k_ + 1) +
                                  " is zero at a jump on path " + std::to_string(p) +
                                  " at t = " + format_double(t));
          const double n = kind_ == Kind::Counting ? jump_total : static_cast<double>(jump_count);
          acc += n * std::log(beta);
        }
        acc += (1.0 - beta) * h;
      }
      sink(i, acc);
    }
    return acc;
  }

  const PathSet& paths_;
  std::size_t k_;
  Kind kind_ = Kind::Diffusion;
  bool continuous_ = false;
  bool jumps_ = false;
  Program drift_;
  Program intensity_;
  std::vector<double> inv_sigma2_;
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> jump_path_;
  std::vector<std::size_t> jump_steps_;
  std::vector<double> jump_total_;
  std::vector<unsigned> jump_count_;
};

namespace detail {

inline LogLikProcess loglik_of_kind(const ProcessSpec& spec, const PathSet& paths, std::size_t k,
                                    Kind expected) {
  if (k >= spec.size()) throw SpecError("component index out of range");
  if (spec.components[k].kind != expected)
    throw SpecError("component " + std::to_string(k + 1) + " is " +
                    std::string(to_string(spec.components[k].kind)) + ", not " +
                    std::string(to_string(expected)));
  return ComponentLikelihood(spec, paths, k).process(spec.theta);
}

}  // namespace detail

inline LogLikProcess loglik_diffusion(const ProcessSpec& spec, const PathSet& paths,
                                      std::size_t k) {
  return detail::loglik_of_kind(spec, paths, k, Kind::Diffusion);
}

inline LogLikProcess loglik_counting(const ProcessSpec& spec, const PathSet& paths,
                                     std::size_t k) {
  return detail::loglik_of_kind(spec, paths, k, Kind::Counting);
}

inline LogLikProcess loglik_jumpdiff(const ProcessSpec& spec, const PathSet& paths,
                                     std::size_t k) {
  return detail::loglik_of_kind(spec, paths, k, Kind::JumpDiffusion);
}

/// Dispatches on the kind of component `k`.
inline LogLikProcess loglik(const ProcessSpec& spec, const PathSet& paths, std::size_t k) {
  if (k >= spec.size()) throw SpecError("component index out of range");
  return ComponentLikelihood(spec, paths, k).process(spec.theta);
}

/// Shifts every value of component `j` by `epsilon` and returns the largest
/// resulting change of log Z_k over all paths and grid points. Zero exactly
/// when the likelihood of k never reads x_j on this data.
inline double lwcli_perturbation_check(const ProcessSpec& spec, const PathSet& paths,
                                       std::size_t k, std::size_t j, double epsilon) {
  if (j == k) throw SpecError("perturbation check needs two distinct components");
  if (j >= spec.size() || k >= spec.size()) throw SpecError("component index out of range");
  const LogLikProcess base = loglik(spec, paths, k);

  PathSet shifted = paths;
  for (std::size_t p = 0; p < shifted.n_paths(); ++p)
    for (std::size_t i = 0; i <= shifted.steps(); ++i) shifted.value(p, i, j) += epsilon;
  LogLikProcess moved;
  try {
    moved = loglik(spec, shifted, k);
  } catch (const DomainError& e) {
    throw LikelihoodError(std::string("perturbed data leave the expression domain: ") + e.what());
  } catch (const LikelihoodError& e) {
    throw LikelihoodError(std::string("perturbed data leave the likelihood domain: ") + e.what());
  }

  double worst = 0.0;
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    const auto a = base.logZ.row(p);
    const auto b = moved.logZ.row(p);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::fabs(a[i] - b[i]));
  }
  return worst;
}

}  // namespace locindep
