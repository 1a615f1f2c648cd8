#pragma once

// Least squares, nested-model F tests and reference distributions.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>

#include "locindep/error.hpp"

namespace locindep::stats {

/// Upper tail P(X > x) of a chi-square with `dof` degrees of freedom.
inline double chi_square_upper(double x, double dof) {
  if (!(x > 0.0)) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(dof), x));
}

/// Upper tail P(F > f) of Fisher's F(d1, d2).
inline double f_upper(double f, double d1, double d2) {
  if (!(f > 0.0)) return 1.0;
  return boost::math::cdf(boost::math::complement(boost::math::fisher_f(d1, d2), f));
}

struct OlsFit {
  Eigen::VectorXd coef;
  double rss = 0.0;
};

/// Ordinary least squares. Throws InferenceError on a rank-deficient design.
inline OlsFit ols(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  if (X.rows() <= X.cols()) throw InferenceError("not enough observations for the regression");
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
  qr.setThreshold(1e-10);
  if (qr.rank() < X.cols())
    throw InferenceError("rank-deficient design: rank " + std::to_string(qr.rank()) + " < " +
                         std::to_string(X.cols()) + " columns");
  OlsFit fit;
  fit.coef = qr.solve(y);
  fit.rss = (y - X * fit.coef).squaredNorm();
  return fit;
}

/// Columns of X (other than those listed in `keep`) whose sample variance
/// is zero up to rounding.
inline std::vector<Eigen::Index> constant_columns(const Eigen::MatrixXd& X,
                                                  const std::vector<Eigen::Index>& keep = {}) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    if (std::find(keep.begin(), keep.end(), c) != keep.end()) continue;
    const auto col = X.col(c);
    const double lo = col.minCoeff();
    const double hi = col.maxCoeff();
    if (hi - lo <= 1e-12 * std::max(1.0, std::max(std::fabs(lo), std::fabs(hi)))) out.push_back(c);
  }
  return out;
}

inline Eigen::MatrixXd select_columns(const Eigen::MatrixXd& X,
                                      const std::vector<Eigen::Index>& cols) {
  Eigen::MatrixXd out(X.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t i = 0; i < cols.size(); ++i) out.col(static_cast<Eigen::Index>(i)) = X.col(cols[i]);
  return out;
}

struct FTest {
  double statistic = 0.0;
  std::size_t df_num = 0;
  std::size_t df_den = 0;
  double p_value = 1.0;
};

/// F test of the restricted design (a column subset) against the full one.
inline FTest nested_f_test(const Eigen::MatrixXd& full, const Eigen::MatrixXd& restricted,
                           const Eigen::VectorXd& y) {
  const auto f = ols(full, y);
  const auto r = ols(restricted, y);
  FTest out;
  out.df_num = static_cast<std::size_t>(full.cols() - restricted.cols());
  out.df_den = static_cast<std::size_t>(full.rows() - full.cols());
  if (out.df_num == 0) return out;
  const double num = std::max(0.0, r.rss - f.rss) / static_cast<double>(out.df_num);
  const double den = f.rss / static_cast<double>(out.df_den);
  if (!(den > 0.0)) throw InferenceError("regression fits the data exactly; F test undefined");
  out.statistic = num / den;
  out.p_value = f_upper(out.statistic, static_cast<double>(out.df_num),
                        static_cast<double>(out.df_den));
  return out;
}

/// Kolmogorov-Smirnov distance between the sample and Uniform(0, 1).
inline double ks_uniform_distance(std::vector<double> sample) {
  if (sample.empty()) return 0.0;
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double u = std::clamp(sample[i], 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
  }
  return d;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and its standard error.
inline MeanSe mean_se(const std::vector<double>& x) {
  MeanSe out;
  if (x.empty()) return out;
  const double n = static_cast<double>(x.size());
  double s = 0.0;
  for (double v : x) s += v;
  out.mean = s / n;
  if (x.size() < 2) return out;
  double ss = 0.0;
  for (double v : x) ss += (v - out.mean) * (v - out.mean);
  out.se = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

}  // namespace locindep::stats
