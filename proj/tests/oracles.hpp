#pragma once

// Independent reference computations for the unit and acceptance tests. None
// of these reuse library quadrature, samplers or closed forms.

#include <cmath>
#include <functional>
#include <numeric>
#include <vector>

namespace oracle {

/// Plain composite Simpson with an even panel count.
inline double simpson(const std::function<double(double)>& f, double a, double b, long panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / panels;
  double acc = f(a) + f(b);
  for (long k = 1; k < panels; ++k) acc += (k % 2 ? 4.0 : 2.0) * f(a + k * h);
  return acc * h / 3.0;
}

/// Integral of g over [a, b] with 0 < a < b via z = e^u, which tames the
/// power singularities of Levy densities near 0.
inline double log_simpson(const std::function<double(double)>& g, double a, double b,
                          long panels = 20000) {
  return simpson([&](double u) {
    const double z = std::exp(u);
    return g(z) * z;
  }, std::log(a), std::log(b), panels);
}

/// Smallest x in [lo, hi] with g(x) >= target for non-decreasing g.
inline double bisect(const std::function<double(double)>& g, double target, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (g(mid) >= target) hi = mid; else lo = mid;
  }
  return 0.5 * (lo + hi);
}

/// Tensor Simpson on [s0, s1] x [z0, z1].
inline double simpson_2d(const std::function<double(double, double)>& f, double s0, double s1,
                         double z0, double z1, long panels = 400) {
  return simpson([&](double s) { return simpson([&](double z) { return f(s, z); }, z0, z1, panels); },
                 s0, s1, panels);
}

/// Central second difference.
inline double second_difference(const std::function<double(double)>& f, double x, double h = 1e-4) {
  return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

/// Least-squares slope of log y on log x.
inline double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

inline double variance(const std::vector<double>& v) {
  const double m = mean(v);
  double acc = 0;
  for (double x : v) acc += (x - m) * (x - m);
  return acc / (v.size() - 1);
}

}  // namespace oracle
