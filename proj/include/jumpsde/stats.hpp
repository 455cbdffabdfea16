#pragma once

// Statistics used by the harness and the property suites: log-log rate fits,
// Kolmogorov-Smirnov and chi-square tests, sample moments, empirical W_q.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "jumpsde/error.hpp"

namespace jumpsde {

enum class Abscissa { steps, eps };

struct RateFit {
  double slope = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double intercept = 0.0;
  int points = 0;
};

/// OLS of log y on log x. The slope is reported as the decay exponent for
/// step-count abscissae (y ~ n^{-slope}) and as the growth exponent for eps
/// abscissae (y ~ eps^{slope}); the CI is the 95% Student-t interval.
inline RateFit fit_rate(std::span<const double> x, std::span<const double> y, Abscissa kind) {
  require(x.size() == y.size(), "fit_rate: abscissae and estimates differ in length");
  std::vector<double> lx;
  std::vector<double> ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0) || !(x[i] > 0.0)) {
      warn("fit_rate: dropping nonpositive point at abscissa " + std::to_string(x[i]));
      continue;
    }
    lx.push_back(std::log(x[i]));
    ly.push_back(std::log(y[i]));
  }
  const std::size_t m = lx.size();
  require(m >= 3, "fit_rate: need at least 3 positive points");
  const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / m;
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  require(sxx > 0.0, "fit_rate: abscissae are all equal");
  const double beta = sxy / sxx;
  double rss = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double r = ly[i] - (my + beta * (lx[i] - mx));
    rss += r * r;
  }
  const double se = std::sqrt(rss / static_cast<double>(m - 2) / sxx);
  const boost::math::students_t dist(static_cast<double>(m - 2));
  const double half = boost::math::quantile(boost::math::complement(dist, 0.025)) * se;
  RateFit fit;
  fit.slope = kind == Abscissa::steps ? -beta : beta;
  fit.ci_low = fit.slope - half;
  fit.ci_high = fit.slope + half;
  fit.intercept = my - beta * mx;
  fit.points = static_cast<int>(m);
  return fit;
}

struct TestResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_tail(double lambda) {
  if (lambda < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

/// Two-sample Kolmogorov-Smirnov test with the Stephens small-sample correction.
inline TestResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  require(!a.empty() && !b.empty(), "ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double v = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == v) ++i;
    while (j < b.size() && b[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() - static_cast<double>(j) / b.size()));
  }
  const double ne = static_cast<double>(a.size()) * b.size() / (a.size() + b.size());
  const double sq = std::sqrt(ne);
  return {d, kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d)};
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF.
template <class Cdf>
TestResult ks_one_sample(std::vector<double> sample, Cdf&& cdf) {
  require(!sample.empty(), "ks_one_sample: empty sample");
  std::sort(sample.begin(), sample.end());
  const double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const double f = cdf(sample[i]);
    d = std::max({d, f - i / n, (i + 1) / n - f});
  }
  const double sq = std::sqrt(n);
  return {d, kolmogorov_tail((sq + 0.12 + 0.11 / sq) * d)};
}

/// Chi-square goodness of fit of integer counts to Poisson(mean). Cells are
/// pooled from both tails until every expected count is at least 5.
inline TestResult chi_square_poisson(std::span<const long> counts, double mean) {
  require(!counts.empty() && mean > 0.0, "chi_square_poisson: need counts and a positive mean");
  const double total = static_cast<double>(counts.size());
  const long max_count = *std::max_element(counts.begin(), counts.end());
  std::vector<double> observed(static_cast<std::size_t>(max_count) + 1, 0.0);
  for (long c : counts) observed[static_cast<std::size_t>(c)] += 1.0;
  // Poisson pmf by recurrence in log space.
  std::vector<double> expected(observed.size());
  double log_p = -mean;
  double cdf = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    if (k > 0) log_p += std::log(mean) - std::log(static_cast<double>(k));
    expected[k] = std::exp(log_p);
    cdf += expected[k];
  }
  expected.back() += std::max(0.0, 1.0 - cdf);  // upper tail folded into the last cell
  for (double& e : expected) e *= total;
  std::vector<double> obs_cells;
  std::vector<double> exp_cells;
  double o_acc = 0.0;
  double e_acc = 0.0;
  for (std::size_t k = 0; k < expected.size(); ++k) {
    o_acc += observed[k];
    e_acc += expected[k];
    if (e_acc >= 5.0) {
      obs_cells.push_back(o_acc);
      exp_cells.push_back(e_acc);
      o_acc = e_acc = 0.0;
    }
  }
  if (e_acc > 0.0 || o_acc > 0.0) {
    if (exp_cells.empty()) {
      obs_cells.push_back(o_acc);
      exp_cells.push_back(e_acc);
    } else {
      obs_cells.back() += o_acc;
      exp_cells.back() += e_acc;
    }
  }
  require(exp_cells.size() >= 2, "chi_square_poisson: too few cells after pooling");
  double chi2 = 0.0;
  for (std::size_t k = 0; k < exp_cells.size(); ++k) {
    const double diff = obs_cells[k] - exp_cells[k];
    chi2 += diff * diff / exp_cells[k];
  }
  const boost::math::chi_squared dist(static_cast<double>(exp_cells.size() - 1));
  return {chi2, boost::math::cdf(boost::math::complement(dist, chi2))};
}

/// Running sums for mean, variance, skewness and kurtosis; merged in a fixed
/// order for reproducible parallel reductions.
struct MomentSums {
  double count = 0.0;
  double s1 = 0.0;
  double s2 = 0.0;

  void add(double v) {
    count += 1.0;
    s1 += v;
    s2 += v * v;
  }
  void merge(const MomentSums& o) {
    count += o.count;
    s1 += o.s1;
    s2 += o.s2;
  }
  double mean() const { return s1 / count; }
  double variance() const {
    if (count < 2.0) return 0.0;
    return std::max(0.0, (s2 - s1 * s1 / count) / (count - 1.0));
  }
  /// 95% CLT half-width of the mean.
  double half_width() const { return 1.96 * std::sqrt(variance() / count); }
};

struct SampleMoments {
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
};

inline SampleMoments sample_moments(std::span<const double> v) {
  require(v.size() >= 4, "sample_moments: need at least 4 values");
  const double n = static_cast<double>(v.size());
  SampleMoments out;
  out.mean = std::accumulate(v.begin(), v.end(), 0.0) / n;
  double m2 = 0.0;
  double m3 = 0.0;
  double m4 = 0.0;
  for (double x : v) {
    const double d = x - out.mean;
    const double d2 = d * d;
    m2 += d2;
    m3 += d2 * d;
    m4 += d2 * d2;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  out.variance = m2 * n / (n - 1.0);
  if (m2 > 0.0) {
    out.skewness = m3 / std::pow(m2, 1.5);
    out.excess_kurtosis = m4 / (m2 * m2) - 3.0;
  }
  return out;
}

/// Empirical W_q between two equally sized samples via the sorted coupling.
inline double wasserstein_sorted(std::span<const double> sorted_a, std::span<const double> sorted_b,
                                 double q) {
  require(sorted_a.size() == sorted_b.size() && !sorted_a.empty(),
          "wasserstein_sorted: samples must be nonempty and of equal size");
  require(q >= 1.0, "wasserstein_sorted: q must be >= 1");
  double acc = 0.0;
  for (std::size_t i = 0; i < sorted_a.size(); ++i) {
    acc += std::pow(std::abs(sorted_a[i] - sorted_b[i]), q);
  }
  return std::pow(acc / sorted_a.size(), 1.0 / q);
}

inline double normal_quantile(double p) {
  static const boost::math::normal standard;
  return boost::math::quantile(standard, p);
}

inline double normal_cdf(double x) {
  static const boost::math::normal standard;
  return boost::math::cdf(standard, x);
}

}  // namespace jumpsde
