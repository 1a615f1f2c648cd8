#include <cmath>

#include <gtest/gtest.h>

#include "support.hpp"

using namespace locindep;
using namespace testing_support;

TEST(Triplet, ExampleOneDiffusionComponent) {
  const auto spec = builtin_example(1);
  const auto paths = simulate(spec, 0.01, 5, 1);
  const auto tr = evaluate_triplet(spec, paths, 2);
  for (std::size_t p = 0; p < 5; ++p)
    for (std::size_t i = 0; i <= paths.steps(); ++i) {
      EXPECT_NEAR(tr.C(p, i), paths.grid()[i], 1e-12);
      EXPECT_EQ(tr.nu(p, i), 0.0);
    }
}

TEST(Triplet, ExampleTwoCountingComponent) {
  const auto spec = builtin_example(2);
  const auto paths = simulate(spec, 0.01, 5, 2);
  const auto tr = evaluate_triplet(spec, paths, 2);
  for (std::size_t p = 0; p < 5; ++p)
    for (std::size_t i = 0; i <= paths.steps(); ++i) {
      EXPECT_EQ(tr.B(p, i), 0.0);
      EXPECT_EQ(tr.C(p, i), 0.0);
      EXPECT_EQ(tr.nu(p, i), tr.compensator(p, i));
    }
  EXPECT_GT(tr.nu(0, paths.steps()), 0.0);
}

TEST(Triplet, ConstantIntensityQuadratureIsExact) {
  const auto spec = make_spec({counting("2")}, 1.0);
  const auto tr = evaluate_triplet(spec, simulate(spec, 0.01, 3, 3), 0);
  for (std::size_t p = 0; p < 3; ++p) EXPECT_NEAR(tr.nu(p, 100), 2.0, 1e-12);
}

TEST(Triplet, JumpDiffusionCompensator) {
  // nu integrates intensity * size; Lambda = B + nu.
  const auto spec = make_spec({jump_diffusion("0.5", "2", "3", "-0.25")}, 1.0);
  const auto tr = evaluate_triplet(spec, simulate(spec, 0.01, 2, 4), 0);
  EXPECT_NEAR(tr.B(0, 100), 0.5, 1e-12);
  EXPECT_NEAR(tr.C(0, 100), 4.0, 1e-12);
  EXPECT_NEAR(tr.nu(0, 100), -0.75, 1e-12);
  EXPECT_NEAR(tr.compensator(1, 100), -0.25, 1e-12);
}

TEST(Triplet, StartsAtZeroAndCIsPathIndependent) {
  const auto spec = builtin_example(3);
  const auto paths = simulate(spec, 0.01, 30, 5);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto tr = evaluate_triplet(spec, paths, k);
    double spread = 0.0;
    for (std::size_t p = 0; p < 30; ++p) {
      EXPECT_EQ(tr.B(p, 0), 0.0);
      EXPECT_EQ(tr.C(p, 0), 0.0);
      EXPECT_EQ(tr.nu(p, 0), 0.0);
      for (std::size_t i = 0; i <= paths.steps(); ++i)
        spread = std::max(spread, std::fabs(tr.C(p, i) - tr.C(0, i)));
    }
    EXPECT_EQ(spread, 0.0);
  }
}

TEST(Triplet, NeverReadsExcludedColumns) {
  // Replacing data or expressions of j outside D(k) leaves k's triplet
  // bit-identical.
  const auto spec = builtin_example(3);
  const auto paths = simulate(spec, 0.01, 10, 6);
  for (std::size_t k = 0; k < 3; ++k) {
    const auto deps = dependency_set(spec, k);
    const auto base = evaluate_triplet(spec, paths, k);
    for (std::size_t j = 0; j < 3; ++j) {
      if (deps.contains(j)) continue;
      PathSet moved = paths;
      for (std::size_t p = 0; p < 10; ++p)
        for (std::size_t i = 0; i <= paths.steps(); ++i) moved.value(p, i, j) = std::sin(3.0 * i + p);
      auto other = spec;
      other.components[j].drift = parse("7*x1 - x2");
      other.components[j].jump_intensity = parse("exp(x1)");
      const auto tr = evaluate_triplet(other, moved, k);
      for (std::size_t p = 0; p < 10; ++p)
        for (std::size_t i = 0; i <= paths.steps(); ++i) {
          ASSERT_EQ(tr.B(p, i), base.B(p, i));
          ASSERT_EQ(tr.nu(p, i), base.nu(p, i));
        }
    }
  }
}

TEST(Triplet, GridMismatch) {
  const auto paths = simulate(builtin_example(1), 0.01, 2, 1);
  auto longer = builtin_example(1);
  longer.horizon = 6.0;
  EXPECT_THROW(evaluate_triplet(longer, paths, 0), SpecError);
  EXPECT_THROW(evaluate_triplet(make_spec({diffusion("0")}, 5.0), paths, 0), SpecError);
  EXPECT_THROW(martingale_residual(longer, paths, 0), SpecError);
}

TEST(Residual, ZeroCompensator) {
  const auto spec = make_spec({diffusion("0", "1", 0.7)}, 1.0);
  const auto paths = simulate(spec, 0.01, 4, 7);
  const auto m = martingale_residual(spec, paths, 0);
  for (std::size_t p = 0; p < 4; ++p)
    for (std::size_t i = 0; i <= paths.steps(); ++i) EXPECT_EQ(m(p, i), paths.value(p, i, 0) - 0.7);
}

TEST(Residual, CompensatedPoissonIsMeanZero) {
  const auto spec = make_spec({counting("1")}, 1.0);
  const auto m = martingale_residual(spec, simulate(spec, 0.01, 10000, 8), 0).terminal();
  const auto ms = stats::mean_se(m);
  EXPECT_NEAR(ms.mean, 0.0, 3.0 * ms.se + 0.005);  // 0.005: Bernoulli-scheme bias
}

TEST(Residual, DistinctComponentsAreOrthogonal) {
  const auto spec = builtin_example(3);
  const auto paths = simulate(spec, 0.01, 4000, 9);
  std::vector<std::vector<double>> res;
  for (std::size_t k = 0; k < 3; ++k) {
    // Value at t = 1 (grid index 100).
    const auto m = martingale_residual(spec, paths, k);
    std::vector<double> col(paths.n_paths());
    for (std::size_t p = 0; p < paths.n_paths(); ++p) col[p] = m(p, 100);
    res.push_back(col);
  }
  for (std::size_t j = 0; j < 3; ++j)
    for (std::size_t k = j + 1; k < 3; ++k) {
      const auto mj = stats::mean_se(res[j]).mean;
      const auto mk = stats::mean_se(res[k]).mean;
      std::vector<double> prod(paths.n_paths());
      for (std::size_t p = 0; p < prod.size(); ++p) prod[p] = (res[j][p] - mj) * (res[k][p] - mk);
      const auto cov = stats::mean_se(prod);
      EXPECT_NEAR(cov.mean, 0.0, 3.5 * cov.se) << j << "," << k;
    }
}
