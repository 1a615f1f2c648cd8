#pragma once

// Euler-Maruyama paths for validated specs. Jumps use a per-step Bernoulli
// approximation with probability 1 - exp(-beta * dt), so each component
// jumps at most once per step. All expressions read the state at the start
// of the step (the left limit).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "locindep/error.hpp"
#include "locindep/expr.hpp"
#include "locindep/format.hpp"
#include "locindep/model.hpp"
#include "locindep/parallel.hpp"
#include "locindep/rng.hpp"

namespace locindep {

struct JumpEvent {
  std::size_t path;
  std::size_t component;
  std::size_t step;  // grid index of the post-jump value
  double size;

  friend bool operator==(const JumpEvent&, const JumpEvent&) = default;
};

/// Trajectories on a uniform grid plus the jump record. Values hold the
/// post-jump state at each grid point. Events are ordered by (path, step,
/// component).
class PathSet {
 public:
  PathSet() = default;

  PathSet(std::size_t n_paths, std::size_t m, std::size_t steps, double horizon,
          std::uint64_t seed)
      : n_paths_(n_paths),
        m_(m),
        steps_(steps),
        dt_(horizon / static_cast<double>(steps)),
        seed_(seed),
        grid_(steps + 1),
        values_(n_paths * (steps + 1) * m, 0.0) {
    for (std::size_t i = 0; i <= steps; ++i) grid_[i] = static_cast<double>(i) * dt_;
    grid_[steps] = horizon;
  }

  std::size_t n_paths() const { return n_paths_; }
  std::size_t dimension() const { return m_; }
  /// Number of steps G; the grid has G + 1 points.
  std::size_t steps() const { return steps_; }
  double dt() const { return dt_; }
  double horizon() const { return grid_.back(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& grid() const { return grid_; }
  const std::vector<JumpEvent>& events() const { return events_; }

  std::span<const double> state(std::size_t path, std::size_t i) const {
    return {values_.data() + offset(path, i), m_};
  }
  std::span<double> state(std::size_t path, std::size_t i) {
    return {values_.data() + offset(path, i), m_};
  }
  double value(std::size_t path, std::size_t i, std::size_t k) const {
    return values_[offset(path, i) + k];
  }
  double& value(std::size_t path, std::size_t i, std::size_t k) {
    return values_[offset(path, i) + k];
  }

  /// Per-step jump totals of component k on `path`: entry i is the jump
  /// between grid points i and i + 1.
  std::vector<double> jumps(std::size_t path, std::size_t k) const {
    std::vector<double> out(steps_, 0.0);
    const std::size_t lo = path < event_offsets_.size() ? event_offsets_[path] : 0;
    const std::size_t hi = path + 1 < event_offsets_.size() ? event_offsets_[path + 1] : 0;
    for (std::size_t e = lo; e < hi; ++e)
      if (events_[e].component == k) out[events_[e].step - 1] += events_[e].size;
    return out;
  }

  /// Replaces the event list; `events` must be ordered by path.
  void set_events(std::vector<JumpEvent> events) {
    events_ = std::move(events);
    event_offsets_.assign(n_paths_ + 1, 0);
    for (const auto& e : events_) {
      if (e.path >= n_paths_ || e.step == 0 || e.step > steps_ || e.component >= m_)
        throw SimulationError("jump event outside the path set");
      ++event_offsets_[e.path + 1];
    }
    for (std::size_t p = 0; p < n_paths_; ++p) event_offsets_[p + 1] += event_offsets_[p];
  }

  friend bool operator==(const PathSet& a, const PathSet& b) {
    return a.n_paths_ == b.n_paths_ && a.m_ == b.m_ && a.steps_ == b.steps_ &&
           a.grid_ == b.grid_ && a.values_ == b.values_ && a.events_ == b.events_;
  }

 private:
  std::size_t offset(std::size_t path, std::size_t i) const {
    return (path * (steps_ + 1) + i) * m_;
  }

  std::size_t n_paths_ = 0;
  std::size_t m_ = 0;
  std::size_t steps_ = 0;
  double dt_ = 0.0;
  std::uint64_t seed_ = 0;
  std::vector<double> grid_;
  std::vector<double> values_;
  std::vector<JumpEvent> events_;
  std::vector<std::size_t> event_offsets_;
};

/// Number of grid steps for `dt` over `horizon`; dt must divide the horizon.
inline std::size_t grid_steps(double horizon, double dt) {
  if (!(dt > 0.0) || !(dt <= horizon * (1.0 + 1e-12)))
    throw SimulationError("dt must satisfy 0 < dt <= horizon");
  const double ratio = horizon / dt;
  const double steps = std::round(ratio);
  if (std::fabs(ratio - steps) > 1e-9 * std::max(1.0, ratio))
    throw SimulationError("dt = " + format_double(dt) + " does not divide the horizon " +
                          format_double(horizon));
  return static_cast<std::size_t>(steps);
}

namespace detail {

struct CompiledComponent {
  Kind kind;
  Program drift;
  Program intensity;
  Program jump_size;
  std::vector<double> sigma;  // per step, deterministic
};

inline std::string where(std::size_t path, std::size_t step, std::size_t k, double t) {
  return "path " + std::to_string(path) + ", step " + std::to_string(step) + " (t = " +
         format_double(t) + "), component " + std::to_string(k + 1);
}

}  // namespace detail

/// Simulates `n_paths` independent trajectories of `spec` on a uniform grid.
/// The result is a pure function of the arguments; the number of worker
/// threads does not affect it.
inline PathSet simulate(const ProcessSpec& spec, double dt, std::size_t n_paths,
                        std::uint64_t seed) {
  require_valid(spec);
  if (n_paths == 0) throw SimulationError("n_paths must be at least 1");
  if (spec.params > 0 && !spec.has_bound_theta())
    throw SimulationError("simulation needs bound values for all parameters");
  const std::size_t m = spec.size();
  const std::size_t steps = grid_steps(spec.horizon, dt);
  PathSet out(n_paths, m, steps, spec.horizon, seed);
  const double h = out.dt();
  const double sqrt_h = std::sqrt(h);
  const auto& grid = out.grid();
  const std::span<const double> theta(spec.theta);

  std::vector<detail::CompiledComponent> comps;
  for (std::size_t k = 0; k < m; ++k) {
    const auto& c = spec.components[k];
    detail::CompiledComponent cc{c.kind,
                                 Program(c.drift.value_or(Expr::number(0.0))),
                                 Program(c.jump_intensity.value_or(Expr::number(0.0))),
                                 Program(effective_jump_size(c)),
                                 std::vector<double>(steps, 0.0)};
    if (c.sigma) {
      for (std::size_t i = 0; i < steps; ++i) {
        const double s = eval(*c.sigma, {}, grid[i], theta);
        if (!(s >= 0.0) || !std::isfinite(s))
          throw SimulationError("sigma is negative or undefined at t = " + format_double(grid[i]) +
                                " for component " + std::to_string(k + 1));
        cc.sigma[i] = s;
      }
    }
    comps.push_back(std::move(cc));
  }

  std::vector<std::vector<JumpEvent>> path_events(n_paths);
  parallel_for(n_paths, [&](std::size_t p) {
    std::vector<Stream> brownian;
    std::vector<Stream> poisson;
    brownian.reserve(m);
    poisson.reserve(m);
    for (std::size_t k = 0; k < m; ++k) {
      brownian.emplace_back(derive_seed(seed, p, k, StreamTag::Brownian));
      poisson.emplace_back(derive_seed(seed, p, k, StreamTag::Poisson));
    }
    for (std::size_t k = 0; k < m; ++k) out.value(p, 0, k) = spec.components[k].x0;
    auto& events = path_events[p];

    for (std::size_t i = 0; i < steps; ++i) {
      const auto x = out.state(p, i);
      auto next = out.state(p, i + 1);
      const double t = grid[i];
      for (std::size_t k = 0; k < m; ++k) {
        const auto& cc = comps[k];
        double v = x[k];
        try {
          if (has_continuous_part(cc.kind)) {
            const double xi = brownian[k].normal();
            v += cc.drift(x, t, theta) * h + cc.sigma[i] * sqrt_h * xi;
          }
          if (has_jump_part(cc.kind)) {
            const double u = poisson[k].uniform();
            const double beta = cc.intensity(x, t, theta);
            if (!(beta >= 0.0) || !std::isfinite(beta))
              throw SimulationError("jump intensity " + format_double(beta) +
                                    " is not a finite non-negative rate at " +
                                    detail::where(p, i, k, t));
            if (u < -std::expm1(-beta * h)) {
              const double size = cc.jump_size(x, t, theta);
              if (!std::isfinite(size) || std::fabs(size) > spec.jump_bound)
                throw SimulationError("jump size " + format_double(size) + " exceeds jump_bound at " +
                                      detail::where(p, i, k, t));
              v += size;
              events.push_back({p, k, i + 1, size});
            }
          }
        } catch (const DomainError& e) {
          throw SimulationError(std::string(e.what()) + " at " + detail::where(p, i, k, t));
        }
        if (!std::isfinite(v))
          throw SimulationError("state became non-finite at " + detail::where(p, i, k, t));
        next[k] = v;
      }
    }
  });

  std::vector<JumpEvent> events;
  for (auto& pe : path_events) events.insert(events.end(), pe.begin(), pe.end());
  out.set_events(std::move(events));
  return out;
}

/// Keeps every `stride`-th grid point. Jumps inside a coarse step are summed
/// into one event per component at the coarse step's end point.
inline PathSet discretize(const PathSet& paths, std::size_t stride) {
  if (stride == 0 || paths.steps() % stride != 0)
    throw SimulationError("stride " + std::to_string(stride) + " does not divide " +
                          std::to_string(paths.steps()) + " steps");
  if (stride == 1) return paths;
  const std::size_t coarse = paths.steps() / stride;
  const std::size_t m = paths.dimension();
  PathSet out(paths.n_paths(), m, coarse, paths.horizon(), paths.seed());
  for (std::size_t p = 0; p < paths.n_paths(); ++p)
    for (std::size_t i = 0; i <= coarse; ++i)
      for (std::size_t k = 0; k < m; ++k) out.value(p, i, k) = paths.value(p, i * stride, k);

  std::vector<JumpEvent> events;
  const auto& fine = paths.events();
  for (std::size_t e = 0; e < fine.size();) {
    const std::size_t p = fine[e].path;
    std::size_t end = e;
    while (end < fine.size() && fine[end].path == p) ++end;
    // Within one path: accumulate per (coarse step, component).
    std::vector<std::pair<std::size_t, std::size_t>> keys;
    std::vector<double> sums;
    for (std::size_t q = e; q < end; ++q) {
      const std::size_t cstep = (fine[q].step + stride - 1) / stride;
      const std::pair key{cstep, fine[q].component};
      auto it = std::find(keys.begin(), keys.end(), key);
      if (it == keys.end()) {
        keys.push_back(key);
        sums.push_back(fine[q].size);
      } else {
        sums[static_cast<std::size_t>(it - keys.begin())] += fine[q].size;
      }
    }
    std::vector<std::size_t> order(keys.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return keys[a] < keys[b]; });
    for (auto i : order) events.push_back({p, keys[i].second, keys[i].first, sums[i]});
    e = end;
  }
  out.set_events(std::move(events));
  return out;
}

}  // namespace locindep
