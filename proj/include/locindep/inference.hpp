#pragma once

// Statistical detection of direct influence from path data:
//  * maximum likelihood on the Girsanov log-likelihood of one component,
//    with nested likelihood-ratio tests for the parameters of an edge;
//  * pooled Granger regressions on a discretized grid (horizon one step);
//  * a conditional-independence test of the terminal value of k against
//    the sampled history of j, given the sampled history of the others.
//
// The Granger and terminal-value tests pool independent replicate paths
// rather than one long stationary series.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "locindep/error.hpp"
#include "locindep/expr.hpp"
#include "locindep/graph.hpp"
#include "locindep/likelihood.hpp"
#include "locindep/model.hpp"
#include "locindep/optimize.hpp"
#include "locindep/rng.hpp"
#include "locindep/simulate.hpp"
#include "locindep/stats.hpp"

namespace locindep {

enum class Method { Lrt, Granger, Fscli };
enum class Correction { None, Bonferroni };

inline std::string_view to_string(Method m) {
  switch (m) {
    case Method::Lrt: return "lrt";
    case Method::Granger: return "granger";
    case Method::Fscli: return "fscli";
  }
  return "?";
}

inline Method parse_method(std::string_view s) {
  if (s == "lrt") return Method::Lrt;
  if (s == "granger") return Method::Granger;
  if (s == "fscli") return Method::Fscli;
  throw SpecError("unknown test method '" + std::string(s) + "'");
}

inline std::string_view to_string(Correction c) {
  return c == Correction::Bonferroni ? "bonferroni" : "none";
}

inline Correction parse_correction(std::string_view s) {
  if (s == "none") return Correction::None;
  if (s == "bonferroni") return Correction::Bonferroni;
  throw SpecError("unknown correction '" + std::string(s) + "'");
}

struct TestReport {
  std::size_t from = 0;
  std::size_t to = 0;
  Method method = Method::Lrt;
  double statistic = 0.0;
  std::size_t dof = 0;
  std::size_t dof_denominator = 0;  // F tests only
  double p_value = 1.0;
  double alpha = 0.05;
  bool reject = false;
  std::vector<double> theta;  // full-model estimate, LRT only
  std::vector<std::string> warnings;
};

inline nlohmann::json to_json(const TestReport& r) {
  nlohmann::json j;
  j["pair"] = {r.from + 1, r.to + 1};
  j["method"] = std::string(to_string(r.method));
  j["statistic"] = r.statistic;
  j["dof"] = r.dof;
  if (r.dof_denominator) j["dof_denominator"] = r.dof_denominator;
  j["p_value"] = r.p_value;
  j["alpha"] = r.alpha;
  j["decision"] = r.reject ? "reject" : "retain";
  if (!r.theta.empty()) j["theta"] = r.theta;
  if (!r.warnings.empty()) j["warnings"] = r.warnings;
  return j;
}

// ---------------------------------------------------------------------------
// Parametric families

/// A spec template with free parameters, plus for each ordered pair (j, k)
/// the parameters whose vanishing removes x_j from k's characteristics.
struct ModelFamily {
  ProcessSpec spec;  // spec.theta, when present, holds starting values
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> edge_params;

  const std::vector<std::size_t>& edge(std::size_t j, std::size_t k) const {
    static const std::vector<std::size_t> kNone;
    const auto it = edge_params.find({j, k});
    return it == edge_params.end() ? kNone : it->second;
  }

  std::vector<double> start() const {
    return spec.theta.size() == spec.params ? spec.theta : std::vector<double>(spec.params, 0.0);
  }
};

/// Parameters that enter the drift, intensity or jump size of component k.
inline std::set<std::size_t> component_params(const ProcessSpec& spec, std::size_t k) {
  std::set<std::size_t> out;
  const auto& c = spec.components[k];
  for (const auto* e : {&c.drift, &c.jump_intensity, &c.jump_size})
    if (*e) out.merge(free_params(**e));
  return out;
}

/// Throws SpecError unless zeroing each edge's parameters removes the
/// corresponding variable from the target component.
inline void check_family(const ModelFamily& fam) {
  const auto& spec = fam.spec;
  const std::size_t m = spec.size();
  for (const auto& c : spec.components)
    if (c.sigma && !free_params(*c.sigma).empty())
      throw SpecError("family sigma expressions must not contain parameters");
  for (const auto& [pair, params] : fam.edge_params) {
    const auto [j, k] = pair;
    if (j >= m || k >= m || j == k) throw SpecError("edge parameters declared for an invalid pair");
    if (params.empty()) throw SpecError("edge parameter list is empty");
    std::vector<std::optional<double>> zeros(spec.params);
    for (auto p : params) {
      if (p >= spec.params) throw SpecError("edge parameter index out of range");
      zeros[p] = 0.0;
    }
    const auto& c = spec.components[k];
    for (const auto* e : {&c.drift, &c.jump_intensity, &c.jump_size}) {
      if (!*e) continue;
      if (free_components(bind_params(**e, zeros)).contains(j))
        throw SpecError("zeroing the edge parameters of (" + std::to_string(j + 1) + ", " +
                        std::to_string(k + 1) + ") leaves x" + std::to_string(j + 1) + " in '" +
                        to_string(**e) + "'");
    }
  }
}

/// Linear drifts and log-linear intensities in all components:
///   drift_k     = a_k + sum_j b_kj x_j
///   intensity_k = exp(c_k + sum_j d_kj x_j)
/// with E(j, k) = {b_kj, d_kj} for whichever parts component k has. Sigma
/// and jump sizes are copied from `spec` and must not read the state.
inline ModelFamily linear_family(const ProcessSpec& spec) {
  ModelFamily fam;
  fam.spec = spec;
  fam.spec.theta.clear();
  const std::size_t m = spec.size();
  std::size_t next = 0;
  auto linear = [&](std::size_t k, bool exponentiate) {
    Expr e = Expr::param(next++);
    for (std::size_t j = 0; j < m; ++j) {
      const std::size_t p = next++;
      e = Expr::binary(Op::Add, e, Expr::binary(Op::Mul, Expr::param(p), Expr::variable(j)));
      if (j != k) fam.edge_params[{j, k}].push_back(p);
    }
    return exponentiate ? Expr::unary(Op::Exp, e) : e;
  };
  for (std::size_t k = 0; k < m; ++k) {
    auto& c = fam.spec.components[k];
    if (c.sigma && !free_components(*c.sigma).empty())
      throw SpecError("linear family needs a deterministic sigma");
    if (c.jump_size && !free_components(*c.jump_size).empty())
      throw SpecError("linear family needs state-free jump sizes");
    if (c.sigma && !spec.theta.empty())
      c.sigma = bind_params(*c.sigma, std::vector<std::optional<double>>(spec.theta.begin(), spec.theta.end()));
    if (c.jump_size && !spec.theta.empty())
      c.jump_size = bind_params(*c.jump_size, std::vector<std::optional<double>>(spec.theta.begin(), spec.theta.end()));
    if (has_continuous_part(c.kind)) c.drift = linear(k, false);
    if (has_jump_part(c.kind)) c.jump_intensity = linear(k, true);
  }
  fam.spec.params = next;
  check_family(fam);
  return fam;
}

inline ModelFamily family_from_json(const nlohmann::json& doc) {
  ModelFamily fam;
  fam.spec = spec_from_json(doc);
  try {
    for (const auto& e : doc.at("edge_params")) {
      const auto from = e.at("from").get<std::size_t>();
      const auto to = e.at("to").get<std::size_t>();
      if (from == 0 || to == 0) throw SpecError("edge_params use 1-based component numbers");
      std::vector<std::size_t> params;
      for (auto p : e.at("params").get<std::vector<std::size_t>>()) {
        if (p == 0) throw SpecError("edge_params use 1-based parameter numbers");
        params.push_back(p - 1);
      }
      fam.edge_params[{from - 1, to - 1}] = std::move(params);
    }
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("malformed family: ") + e.what());
  }
  check_family(fam);
  return fam;
}

inline ModelFamily load_family(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw SpecError("cannot open family file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SpecError(std::string("invalid JSON: ") + e.what());
  }
  return family_from_json(doc);
}

// ---------------------------------------------------------------------------
// Maximum likelihood

struct MleFit {
  std::vector<double> theta;  // full parameter vector
  double loglik = 0.0;        // sum over paths of log Z_k(tau)
  bool converged = false;
  double gradient_norm = 0.0;  // of the per-path mean objective
  int iterations = 0;
};

struct FitOptions {
  /// Parameters held fixed at the given value instead of being estimated.
  std::map<std::size_t, double> fixed;
  /// Starting point; the family's start when empty.
  std::vector<double> start;
  int starts = 5;
  optimize::Options optimizer;
};

/// Maximizes sum_paths log Z_k(tau; theta) over the parameters of component
/// k by BFGS from the starting point and four deterministic perturbations of
/// it, keeping the best. Gradients are exact (forward mode); the expected
/// information at each start seeds the inverse Hessian.
inline MleFit fit_mle(const ModelFamily& fam, const PathSet& paths, std::size_t k,
                      const FitOptions& opts = {}) {
  if (k >= fam.spec.size()) throw SpecError("component index out of range");
  const ComponentLikelihood lik(fam.spec, paths, k);
  std::vector<double> theta = opts.start.empty() ? fam.start() : opts.start;
  if (theta.size() != fam.spec.params) throw SpecError("starting point has the wrong length");
  for (const auto& [p, v] : opts.fixed) theta.at(p) = v;

  std::vector<std::size_t> free;
  for (auto p : component_params(fam.spec, k))
    if (!opts.fixed.contains(p)) free.push_back(p);

  const double scale = 1.0 / static_cast<double>(paths.n_paths());
  std::vector<double> work = theta;
  auto load = [&](const Eigen::VectorXd& x) {
    for (std::size_t i = 0; i < free.size(); ++i) work[free[i]] = x[static_cast<Eigen::Index>(i)];
  };
  auto objective = [&](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    load(x);
    try {
      const double v = -lik.terminal_sum_gradient(work, free, g) * scale;
      g *= -scale;
      return v;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  // Inverse expected information at x, the starting curvature for BFGS.
  auto curvature = [&](const Eigen::VectorXd& x) -> std::optional<Eigen::MatrixXd> {
    load(x);
    Eigen::VectorXd g;
    Eigen::MatrixXd info;
    try {
      lik.terminal_sum_gradient(work, free, g, &info);
    } catch (const Error&) {
      return std::nullopt;
    }
    info *= scale;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-10 * std::max(1.0, ldlt.vectorD().maxCoeff()))
      return std::nullopt;
    return Eigen::MatrixXd(ldlt.solve(Eigen::MatrixXd::Identity(info.rows(), info.cols())));
  };

  Eigen::VectorXd x0(static_cast<Eigen::Index>(free.size()));
  for (std::size_t i = 0; i < free.size(); ++i) x0[static_cast<Eigen::Index>(i)] = theta[free[i]];

  Stream jitter(0x6c6f63696e646570ULL);
  std::optional<optimize::Result> best;
  Eigen::VectorXd g0;
  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    Eigen::VectorXd start = x0;
    if (s > 0)
      for (Eigen::Index i = 0; i < start.size(); ++i)
        start[i] += 0.1 * (1.0 + std::fabs(x0[i])) * jitter.normal();
    if (!std::isfinite(objective(start, g0))) continue;
    const auto H0 = curvature(start);
    auto r = optimize::bfgs_with_gradient(objective, start, opts.optimizer, H0 ? &*H0 : nullptr);
    if (!best || r.value < best->value) best = std::move(r);
  }
  if (!best) throw InferenceError("log-likelihood is not finite at the initial point");

  MleFit fit;
  fit.theta = theta;
  for (std::size_t i = 0; i < free.size(); ++i) fit.theta[free[i]] = best->x[static_cast<Eigen::Index>(i)];
  fit.loglik = lik.terminal_sum(fit.theta);
  fit.converged = best->converged;
  fit.gradient_norm = best->gradient_norm;
  fit.iterations = best->iterations;
  return fit;
}

namespace detail {

inline TestReport lrt_from_full(const ModelFamily& fam, const PathSet& paths, std::size_t j,
                                std::size_t k, double alpha, const MleFit& full,
                                const FitOptions& base) {
  const auto& edge = fam.edge(j, k);
  if (edge.empty())
    throw InferenceError("family has no parameters for the edge (" + std::to_string(j + 1) + ", " +
                         std::to_string(k + 1) + ")");
  FitOptions ropts = base;
  ropts.start = full.theta;
  for (auto p : edge) ropts.fixed[p] = 0.0;
  const MleFit restricted = fit_mle(fam, paths, k, ropts);

  TestReport rep;
  rep.from = j;
  rep.to = k;
  rep.method = Method::Lrt;
  rep.statistic = std::max(0.0, 2.0 * (full.loglik - restricted.loglik));
  rep.dof = edge.size();
  rep.p_value = stats::chi_square_upper(rep.statistic, static_cast<double>(rep.dof));
  rep.alpha = alpha;
  rep.reject = rep.p_value < alpha;
  rep.theta = full.theta;
  if (!full.converged)
    rep.warnings.push_back("full fit stopped with gradient norm " + format_double(full.gradient_norm));
  if (!restricted.converged)
    rep.warnings.push_back("restricted fit stopped with gradient norm " +
                           format_double(restricted.gradient_norm));
  return rep;
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw SpecError("alpha must lie in (0, 1)");
}

inline void check_pair(const PathSet& paths, std::size_t j, std::size_t k) {
  if (j == k) throw SpecError("tests need two distinct components");
  if (j >= paths.dimension() || k >= paths.dimension())
    throw SpecError("component index out of range");
}

/// Drops constant columns (never column 0, the intercept) from the full
/// design and the matching columns of the restricted design.
inline std::pair<Eigen::MatrixXd, Eigen::MatrixXd> prune_designs(
    const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& tested, std::vector<std::string>& warnings,
    std::size_t& kept_tested) {
  const auto dropped = stats::constant_columns(X, {0});
  std::vector<Eigen::Index> full_cols, restricted_cols;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    if (std::find(dropped.begin(), dropped.end(), c) != dropped.end()) continue;
    full_cols.push_back(c);
    if (std::find(tested.begin(), tested.end(), c) == tested.end()) restricted_cols.push_back(c);
  }
  if (!dropped.empty())
    warnings.push_back("dropped " + std::to_string(dropped.size()) + " zero-variance regressor(s)");
  kept_tested = full_cols.size() - restricted_cols.size();
  return {stats::select_columns(X, full_cols), stats::select_columns(X, restricted_cols)};
}

inline TestReport f_report(std::size_t j, std::size_t k, Method method, double alpha,
                           const Eigen::MatrixXd& X, const std::vector<Eigen::Index>& tested,
                           const Eigen::VectorXd& y) {
  TestReport rep;
  rep.from = j;
  rep.to = k;
  rep.method = method;
  rep.alpha = alpha;
  std::size_t kept = 0;
  const auto [full, restricted] = prune_designs(X, tested, rep.warnings, kept);
  if (kept == 0) {
    rep.warnings.push_back("every regressor of x" + std::to_string(j + 1) + " is constant");
    rep.dof_denominator = static_cast<std::size_t>(full.rows() - full.cols());
    return rep;
  }
  const auto f = stats::nested_f_test(full, restricted, y);
  rep.statistic = f.statistic;
  rep.dof = f.df_num;
  rep.dof_denominator = f.df_den;
  rep.p_value = f.p_value;
  rep.reject = rep.p_value < alpha;
  return rep;
}

}  // namespace detail

/// Likelihood-ratio test of the edge parameters E(j, k) against zero.
inline TestReport lrt_direct_influence(const ModelFamily& fam, const PathSet& paths, std::size_t j,
                                       std::size_t k, double alpha, const FitOptions& opts = {}) {
  detail::check_alpha(alpha);
  detail::check_pair(paths, j, k);
  if (fam.edge(j, k).empty())
    throw InferenceError("family has no parameters for the edge (" + std::to_string(j + 1) + ", " +
                         std::to_string(k + 1) + ")");
  const MleFit full = fit_mle(fam, paths, k, opts);
  return detail::lrt_from_full(fam, paths, j, k, alpha, full, opts);
}

/// Pooled regression of X_k(t+1) - X_k(t) on `order` lags of every
/// component; F test that all lags of X_j vanish.
inline TestReport granger_test(const PathSet& paths, std::size_t j, std::size_t k,
                               std::size_t order, double alpha) {
  detail::check_alpha(alpha);
  detail::check_pair(paths, j, k);
  if (order == 0) throw SpecError("Granger order must be at least 1");
  const std::size_t m = paths.dimension();
  const std::size_t G = paths.steps();
  if (G < order) throw InferenceError("path grid is shorter than the lag order");
  const std::size_t per_path = G - order + 1;
  const std::size_t n = per_path * paths.n_paths();
  const std::size_t cols = 1 + m * order;
  if (n <= 10 * cols)
    throw InferenceError("Granger test needs more than " + std::to_string(10 * cols) +
                         " observations; have " + std::to_string(n));

  Eigen::MatrixXd X(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols));
  Eigen::VectorXd y(static_cast<Eigen::Index>(n));
  Eigen::Index row = 0;
  for (std::size_t p = 0; p < paths.n_paths(); ++p) {
    for (std::size_t i = order - 1; i < G; ++i, ++row) {
      y[row] = paths.value(p, i + 1, k) - paths.value(p, i, k);
      X(row, 0) = 1.0;
      for (std::size_t lag = 0; lag < order; ++lag)
        for (std::size_t c = 0; c < m; ++c)
          X(row, static_cast<Eigen::Index>(1 + lag * m + c)) = paths.value(p, i - lag, c);
    }
  }
  std::vector<Eigen::Index> tested;
  for (std::size_t lag = 0; lag < order; ++lag) tested.push_back(static_cast<Eigen::Index>(1 + lag * m + j));
  return detail::f_report(j, k, Method::Granger, alpha, X, tested, y);
}

/// Grid indices of the interior deciles 0.1 tau, ..., 0.9 tau.
inline std::vector<std::size_t> probe_indices(const PathSet& paths) {
  std::vector<std::size_t> out;
  for (int q = 1; q <= 9; ++q) {
    const auto i = static_cast<std::size_t>(std::llround(q * static_cast<double>(paths.steps()) / 10.0));
    if (i > 0 && i < paths.steps() && (out.empty() || out.back() != i)) out.push_back(i);
  }
  if (out.empty()) throw InferenceError("grid too coarse for probe times");
  return out;
}

/// Regression of X_k(tau) on the values of every component at the probe
/// times, with and without the block of X_j; F test on that block.
inline TestReport fscli_test(const PathSet& paths, std::size_t j, std::size_t k, double alpha) {
  detail::check_alpha(alpha);
  detail::check_pair(paths, j, k);
  if (paths.n_paths() < 100) throw InferenceError("terminal-value test needs at least 100 paths");
  const std::size_t m = paths.dimension();
  const auto probes = probe_indices(paths);
  const std::size_t cols = 1 + m * probes.size();
  const auto n = static_cast<Eigen::Index>(paths.n_paths());
  Eigen::MatrixXd X(n, static_cast<Eigen::Index>(cols));
  Eigen::VectorXd y(n);
  for (Eigen::Index p = 0; p < n; ++p) {
    const auto path = static_cast<std::size_t>(p);
    y[p] = paths.value(path, paths.steps(), k);
    X(p, 0) = 1.0;
    for (std::size_t q = 0; q < probes.size(); ++q)
      for (std::size_t c = 0; c < m; ++c)
        X(p, static_cast<Eigen::Index>(1 + q * m + c)) = paths.value(path, probes[q], c);
  }
  std::vector<Eigen::Index> tested;
  for (std::size_t q = 0; q < probes.size(); ++q) tested.push_back(static_cast<Eigen::Index>(1 + q * m + j));
  return detail::f_report(j, k, Method::Fscli, alpha, X, tested, y);
}

// ---------------------------------------------------------------------------
// Graph recovery

struct RecoveryOptions {
  Method method = Method::Lrt;
  double alpha = 0.05;
  Correction correction = Correction::None;
  std::size_t granger_order = 1;
  std::size_t stride = 1;  // subsampling before Granger / terminal-value tests
  FitOptions fit;
};

struct GraphRecovery {
  InfluenceGraph graph;
  std::vector<TestReport> reports;
  std::vector<std::string> errors;  // one per undecided pair
};

inline double per_test_alpha(double alpha, Correction c, std::size_t m) {
  if (c == Correction::None || m < 2) return alpha;
  return alpha / static_cast<double>(m * (m - 1));
}

/// Tests every ordered pair and keeps an edge wherever the null of no
/// direct influence is rejected. Pairs whose test fails are marked
/// undecided and carry no edge.
inline GraphRecovery recover_graph(const PathSet& paths, const RecoveryOptions& opts,
                                   const ModelFamily* family = nullptr) {
  detail::check_alpha(opts.alpha);
  const std::size_t m = paths.dimension();
  if (opts.method == Method::Lrt) {
    if (!family) throw SpecError("likelihood-ratio recovery needs a model family");
    if (family->spec.size() != m) throw SpecError("family and data disagree on the dimension");
  }
  const double level = per_test_alpha(opts.alpha, opts.correction, m);
  GraphRecovery out{InfluenceGraph(m), {}, {}};
  const PathSet coarse = opts.method == Method::Lrt ? PathSet{} : discretize(paths, opts.stride);
  const PathSet& data = opts.method == Method::Lrt ? paths : coarse;

  for (std::size_t k = 0; k < m; ++k) {
    std::optional<MleFit> full;
    std::string full_error;
    if (opts.method == Method::Lrt && m > 1) {
      try {
        full = fit_mle(*family, paths, k, opts.fit);
      } catch (const Error& e) {
        full_error = e.what();
      }
    }
    for (std::size_t j = 0; j < m; ++j) {
      if (j == k) continue;
      try {
        TestReport rep;
        switch (opts.method) {
          case Method::Lrt:
            if (!full) throw InferenceError(full_error);
            rep = detail::lrt_from_full(*family, paths, j, k, level, *full, opts.fit);
            break;
          case Method::Granger:
            rep = granger_test(data, j, k, opts.granger_order, level);
            break;
          case Method::Fscli:
            rep = fscli_test(data, j, k, level);
            break;
        }
        if (rep.reject) out.graph.add_edge(j, k, Provenance::Statistical, rep.p_value);
        out.reports.push_back(std::move(rep));
      } catch (const Error& e) {
        out.graph.mark_undecided(j, k);
        out.errors.push_back("(" + std::to_string(j + 1) + ", " + std::to_string(k + 1) +
                             "): " + e.what());
      }
    }
  }
  return out;
}

}  // namespace locindep
