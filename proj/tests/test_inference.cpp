#include <cmath>
#include <filesystem>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace locindep;
using namespace testing_support;

namespace {

ModelFamily family(const std::vector<nlohmann::json>& components, std::size_t params, double horizon,
                   const nlohmann::json& edges = nlohmann::json::array()) {
  nlohmann::json doc = spec_to_json(make_spec(components, horizon, params));
  doc["edge_params"] = edges;
  return family_from_json(doc);
}

// x1 is OU; x2 = -x2 + b x1 with the given b.
ProcessSpec coupled(double b) {
  return make_spec({diffusion("-x1", "1", 1.0), diffusion("-x2 + " + std::to_string(b) + "*x1")}, 5.0);
}

}  // namespace

TEST(Mle, OuMatchesRegressionOracle) {
  const auto data = simulate(make_spec({diffusion("-x1", "1", 1.0)}, 5.0), 0.01, 200, 11);
  const auto fam = family({diffusion("-theta1*x1", "1", 1.0)}, 1, 5.0);
  const auto fit = fit_mle(fam, data, 0);
  // log Z = sum(-th x dX) - th^2/2 sum(x^2 dt) is maximized in closed form.
  double sxdx = 0.0, sxx = 0.0;
  for (std::size_t p = 0; p < data.n_paths(); ++p)
    for (std::size_t i = 0; i < data.steps(); ++i) {
      const double x = data.value(p, i, 0);
      sxdx += x * (data.value(p, i + 1, 0) - x);
      sxx += x * x * data.dt();
    }
  EXPECT_TRUE(fit.converged);
  EXPECT_NEAR(fit.theta[0], -sxdx / sxx, 1e-6);
  EXPECT_NEAR(fit.theta[0], 1.0, 0.1);
}

TEST(Mle, PoissonRateIsEventFrequency) {
  const auto data = simulate(make_spec({counting("1.7")}, 3.0), 0.01, 100, 12);
  const auto fam = [] {
    auto f = family({counting("theta1")}, 1, 3.0);
    f.spec.theta = {1.0};
    return f;
  }();
  const auto fit = fit_mle(fam, data, 0);
  double n = 0.0;
  for (std::size_t p = 0; p < data.n_paths(); ++p) n += data.value(p, data.steps(), 0);
  EXPECT_NEAR(fit.theta[0], n / (100 * 3.0), 1e-6);
}

TEST(Mle, ZeroEdgeEstimatedNearZero) {
  const auto data = simulate(coupled(0.0), 0.01, 200, 13);
  const auto fam = linear_family(coupled(0.0));
  const auto fit = fit_mle(fam, data, 1);
  const auto edge = fam.edge(0, 1);
  ASSERT_EQ(edge.size(), 1u);
  EXPECT_NEAR(fit.theta[edge[0]], 0.0, 0.1);
}

TEST(Mle, FixedParametersStayFixed) {
  const auto data = simulate(coupled(0.8), 0.01, 50, 14);
  const auto fam = linear_family(coupled(0.8));
  FitOptions opts;
  opts.fixed[fam.edge(0, 1)[0]] = 0.0;
  const auto fit = fit_mle(fam, data, 1, opts);
  EXPECT_EQ(fit.theta[fam.edge(0, 1)[0]], 0.0);
  EXPECT_LE(fit.loglik, fit_mle(fam, data, 1).loglik + 1e-9);
}

TEST(Lrt, DetectsEdgeAndStatisticIsNonNegative) {
  const auto fam = linear_family(coupled(1.0));
  const auto strong = lrt_direct_influence(fam, simulate(coupled(1.0), 0.01, 100, 15), 0, 1, 0.05);
  EXPECT_TRUE(strong.reject);
  EXPECT_LT(strong.p_value, 1e-6);
  EXPECT_EQ(strong.dof, 1u);
  const auto null = lrt_direct_influence(fam, simulate(coupled(0.0), 0.01, 100, 16), 1, 0, 0.05);
  EXPECT_GE(null.statistic, 0.0);
  EXPECT_GE(null.p_value, 0.0);
  EXPECT_LE(null.p_value, 1.0);
}

TEST(Lrt, MissingEdgeIsAnError) {
  const auto data = simulate(coupled(0.5), 0.01, 10, 17);
  const auto fam = family({diffusion("-theta1*x1", "1", 1.0), diffusion("-x2 + theta2*x1")}, 2, 5.0,
                          nlohmann::json::parse(R"([{"from": 1, "to": 2, "params": [2]}])"));
  EXPECT_THROW(lrt_direct_influence(fam, data, 1, 0, 0.05), InferenceError);
  EXPECT_THROW(lrt_direct_influence(fam, data, 0, 1, 0.0), SpecError);
  EXPECT_THROW(lrt_direct_influence(fam, data, 1, 1, 0.05), SpecError);
}

TEST(Family, CheckRejectsBadEdges) {
  const std::vector<nlohmann::json> comps = {diffusion("-theta1*x1"), diffusion("-x2 + theta2*x1 + x1")};
  EXPECT_THROW(family(comps, 2, 1.0, nlohmann::json::parse(R"([{"from": 1, "to": 2, "params": [2]}])")),
               SpecError);
  EXPECT_THROW(family({diffusion("0"), diffusion("theta1*x1")}, 1, 1.0,
                      nlohmann::json::parse(R"([{"from": 1, "to": 2, "params": []}])")),
               SpecError);
  EXPECT_THROW(family({diffusion("0"), diffusion("theta1*x1")}, 1, 1.0,
                      nlohmann::json::parse(R"([{"from": 0, "to": 2, "params": [1]}])")),
               SpecError);
  EXPECT_THROW(family({diffusion("0", "theta1"), diffusion("0")}, 1, 1.0), SpecError);
  EXPECT_THROW(linear_family(make_spec({diffusion("0"), jump_diffusion("0", "1", "1", "x1")})), SpecError);
}

TEST(Family, LinearFamilyShape) {
  const auto fam = linear_family(builtin_example(3));
  // Each component: drift (1 + 3) and intensity (1 + 3) parameters.
  EXPECT_EQ(fam.spec.params, 24u);
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = 0; k < 3; ++k)
      if (j != k) { EXPECT_EQ(fam.edge(j, k).size(), 2u); }
  const auto ex2 = linear_family(builtin_example(2));
  EXPECT_EQ(ex2.edge(0, 2).size(), 1u);
}

TEST(Granger, DetectsEdgeAndErrors) {
  const auto data = simulate(coupled(1.0), 0.01, 50, 18);
  const auto rep = granger_test(discretize(data, 10), 0, 1, 1, 0.05);
  EXPECT_TRUE(rep.reject);
  EXPECT_EQ(rep.dof, 1u);
  EXPECT_EQ(rep.dof_denominator, 50u * 50u - 3u);
  EXPECT_THROW(granger_test(data, 0, 1, 0, 0.05), SpecError);
  EXPECT_THROW(granger_test(data, 0, 0, 1, 0.05), SpecError);
  const auto tiny = simulate(make_spec({diffusion("0"), diffusion("0")}, 1.0), 0.5, 3, 1);
  EXPECT_THROW(granger_test(tiny, 0, 1, 1, 0.05), InferenceError);
}

TEST(Granger, ConstantRegressorIsDropped) {
  // x1 never moves: its lag column is constant and cannot be tested.
  const auto spec = make_spec({diffusion("0", "0", 2.0), diffusion("-x2")}, 5.0);
  const auto rep = granger_test(simulate(spec, 0.01, 20, 19), 0, 1, 1, 0.05);
  EXPECT_FALSE(rep.reject);
  EXPECT_FALSE(rep.warnings.empty());
}

TEST(Fscli, NeedsEnoughPaths) {
  const auto spec = coupled(1.0);
  EXPECT_THROW(fscli_test(simulate(spec, 0.01, 50, 20), 0, 1, 0.05), InferenceError);
  const auto rep = fscli_test(simulate(spec, 0.01, 300, 21), 0, 1, 0.05);
  EXPECT_TRUE(rep.reject);
  EXPECT_EQ(rep.dof, 9u);
}

TEST(Recovery, AllMethodsOnCoupledPair) {
  const auto spec = coupled(1.0);
  const auto data = simulate(spec, 0.01, 200, 22);
  const auto fam = linear_family(spec);
  const std::set<std::pair<std::size_t, std::size_t>> truth = {{0, 1}};
  RecoveryOptions lrt;
  EXPECT_EQ(recover_graph(data, lrt, &fam).graph.edge_set(), truth);
  EXPECT_THROW(recover_graph(data, lrt), SpecError);
  RecoveryOptions granger;
  granger.method = Method::Granger;
  granger.stride = 10;
  granger.correction = Correction::Bonferroni;
  const auto g = recover_graph(data, granger);
  EXPECT_EQ(g.graph.edge_set(), truth);
  EXPECT_EQ(g.reports.size(), 2u);
  for (const auto& e : g.graph.edges()) EXPECT_EQ(e.provenance, Provenance::Statistical);
}

TEST(Recovery, SingleComponentIsEmpty) {
  const auto spec = make_spec({diffusion("-x1")}, 1.0);
  const auto fam = linear_family(spec);
  const auto r = recover_graph(simulate(spec, 0.01, 10, 23), {}, &fam);
  EXPECT_TRUE(r.graph.edges().empty());
  EXPECT_TRUE(r.reports.empty());
}

TEST(Recovery, PerTestAlpha) {
  EXPECT_EQ(per_test_alpha(0.05, Correction::None, 3), 0.05);
  EXPECT_DOUBLE_EQ(per_test_alpha(0.06, Correction::Bonferroni, 3), 0.01);
  EXPECT_EQ(per_test_alpha(0.05, Correction::Bonferroni, 1), 0.05);
}

TEST(Stats, Distributions) {
  EXPECT_NEAR(stats::chi_square_upper(3.841458820694124, 1), 0.05, 1e-12);
  EXPECT_NEAR(stats::chi_square_upper(2.0, 2), std::exp(-1.0), 1e-14);
  EXPECT_EQ(stats::chi_square_upper(0.0, 3), 1.0);
  // F(2, d) with d large approaches chi-square(2) / 2.
  EXPECT_NEAR(stats::f_upper(1.0, 2, 1e7), std::exp(-1.0), 1e-6);
}

TEST(Stats, OlsRecoversExactCoefficients) {
  Eigen::MatrixXd X(6, 2);
  Eigen::VectorXd y(6);
  for (int i = 0; i < 6; ++i) {
    X(i, 0) = 1.0;
    X(i, 1) = i;
    y[i] = 2.0 - 0.5 * i + (i % 2 ? 0.1 : -0.1);
  }
  const auto fit = stats::ols(X, y);
  // Residuals alternate around the line; slope is biased by a known amount.
  Eigen::VectorXd expected = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  EXPECT_TRUE(fit.coef.isApprox(expected, 1e-12));
  Eigen::MatrixXd bad(6, 2);
  bad.col(0) = X.col(1);
  bad.col(1) = 2.0 * X.col(1);
  EXPECT_THROW(stats::ols(bad, y), InferenceError);
  EXPECT_THROW(stats::ols(X.topRows(2), y.head(2)), InferenceError);
}

TEST(Stats, KsAndMeanSe) {
  std::vector<double> grid;
  for (int i = 0; i < 100; ++i) grid.push_back((i + 0.5) / 100.0);
  EXPECT_NEAR(stats::ks_uniform_distance(grid), 0.005, 1e-12);
  EXPECT_NEAR(stats::ks_uniform_distance(std::vector<double>(10, 0.0)), 1.0, 1e-12);
  const auto ms = stats::mean_se({1.0, 2.0, 3.0, 4.0});
  EXPECT_EQ(ms.mean, 2.5);
  EXPECT_NEAR(ms.se, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
}

TEST(Optimize, QuadraticAndRosenbrock) {
  auto quad = [](const Eigen::VectorXd& x) { return (x[0] - 1) * (x[0] - 1) + 10 * (x[1] + 2) * (x[1] + 2); };
  const auto q = optimize::bfgs(quad, Eigen::Vector2d(5, 5));
  EXPECT_NEAR(q.x[0], 1.0, 1e-6);
  EXPECT_NEAR(q.x[1], -2.0, 1e-6);

  auto rosen = [](const Eigen::VectorXd& x, Eigen::VectorXd& g) {
    const double a = 1 - x[0], b = x[1] - x[0] * x[0];
    g.resize(2);
    g[0] = -2 * a - 400 * x[0] * b;
    g[1] = 200 * b;
    return a * a + 100 * b * b;
  };
  optimize::Options opts;
  opts.max_iterations = 500;
  const auto r = optimize::bfgs_with_gradient(rosen, Eigen::Vector2d(-1.2, 1.0), opts);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-6);
  EXPECT_NEAR(r.x[1], 1.0, 1e-6);
}

TEST(Experiment, SingleReplicationWritesFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "locindep_experiment_test";
  std::filesystem::remove_all(dir);
  nlohmann::json doc = {{"spec", spec_to_json(coupled(1.0))},
                        {"dt", 0.01},
                        {"n_paths", 60},
                        {"seed", 5},
                        {"method", "granger"},
                        {"stride", 10},
                        {"replications", 1},
                        {"pairs", {{1, 2}}},
                        {"output", dir.string()}};
  const auto res = run_experiment(config_from_json(doc));
  ASSERT_EQ(res.pairs.size(), 1u);
  EXPECT_EQ(res.pairs[0].decided, 1u);
  EXPECT_EQ(res.pairs[0].rejection_rate(), 1.0);
  EXPECT_TRUE(std::filesystem::exists(dir / "summary.csv"));
  EXPECT_TRUE(std::filesystem::exists(dir / "replication_0000.json"));
  std::filesystem::remove_all(dir);

  doc["replications"] = 0;
  EXPECT_THROW(config_from_json(doc), SpecError);
  doc["replications"] = 1;
  doc["pairs"] = {{0, 1}};
  EXPECT_THROW(config_from_json(doc), SpecError);
  doc.erase("dt");
  EXPECT_THROW(config_from_json(doc), SpecError);
}
