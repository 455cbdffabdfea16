#pragma once

// Numerical integration and root finding used by the measure and model layers.
//
// The adaptive rule is a globally adaptive 15-point Gauss-Kronrod scheme in the
// spirit of QUADPACK's QAG: the subinterval with the largest error estimate is
// bisected until the summed estimate meets the tolerance. Integrable endpoint
// singularities (|z|^{-1/2} and the like) are handled because the rule never
// evaluates the endpoints.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <string>
#include <vector>

#include "jumpsde/error.hpp"

namespace jumpsde::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
};

struct Options {
  double abs_tol = 1e-10;
  double rel_tol = 1e-12;
  int max_subdivisions = 4000;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights attached to the odd-indexed Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class F>
Segment gauss_kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    kronrod += kKronrodWeights[j] * (f1 + f2);
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * (f1 + f2);
  }
  kronrod *= half;
  gauss *= half;
  if (!std::isfinite(kronrod)) {
    throw QuadratureError("non-finite integrand on [" + std::to_string(a) + ", " +
                          std::to_string(b) + "]");
  }
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over the union of the
/// intervals [breaks[k], breaks[k+1]]. Zero-length pieces are skipped.
template <class F>
Result integrate(F&& f, const std::vector<double>& breaks, const Options& opt = {}) {
  Result out;
  if (breaks.size() < 2) return out;
  std::priority_queue<detail::Segment> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
    if (!(breaks[k + 1] > breaks[k])) continue;
    auto seg = detail::gauss_kronrod15(f, breaks[k], breaks[k + 1]);
    out.evaluations += 15;
    total += seg.value;
    total_err += seg.error;
    heap.push(seg);
  }
  int subdivisions = 0;
  while (!heap.empty() && total_err > std::max(opt.abs_tol, opt.rel_tol * std::abs(total))) {
    if (subdivisions >= opt.max_subdivisions) {
      throw QuadratureError("adaptive quadrature did not converge: estimate " +
                            std::to_string(total) + " +/- " + std::to_string(total_err));
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // Interval cannot be split further in double precision; accept it.
      total_err -= worst.error;
      continue;
    }
    auto left = detail::gauss_kronrod15(f, worst.a, mid);
    auto right = detail::gauss_kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++subdivisions;
  }
  // Re-sum to shed the cancellation noise of the running total.
  double resummed = 0.0;
  double err = 0.0;
  while (!heap.empty()) {
    resummed += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  out.value = resummed;
  out.abs_error = err;
  return out;
}

template <class F>
Result integrate(F&& f, double a, double b, const Options& opt = {}) {
  return integrate(std::forward<F>(f), std::vector<double>{a, b}, opt);
}

/// Composite Simpson 1/3 rule with an even number of panels.
template <class F>
double simpson(F&& f, double a, double b, int panels) {
  require(panels >= 2 && panels % 2 == 0, "simpson: panel count must be even and >= 2");
  const double h = (b - a) / panels;
  double odd = 0.0;
  double even = 0.0;
  for (int k = 1; k < panels; ++k) {
    const double v = f(a + k * h);
    (k % 2 == 1 ? odd : even) += v;
  }
  return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

/// Composite Simpson with panel doubling until two successive estimates agree
/// to `tol` (absolute or relative, whichever is looser).
template <class F>
double simpson_refined(F&& f, double a, double b, double tol = 1e-11, int max_panels = 1 << 22) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  if (!std::isfinite(fa) || !std::isfinite(fb)) {
    throw DomainError("simpson_refined: integrand is singular at an endpoint");
  }
  int panels = 16;
  double h = (b - a) / panels;
  double odd = 0.0;
  double even = 0.0;
  for (int k = 1; k < panels; ++k) (k % 2 == 1 ? odd : even) += f(a + k * h);
  double estimate = h / 3.0 * (fa + fb + 4.0 * odd + 2.0 * even);
  while (panels < max_panels) {
    // New midpoints become the odd nodes; old nodes are all even.
    even += odd;
    panels *= 2;
    h *= 0.5;
    odd = 0.0;
    for (int k = 1; k < panels; k += 2) odd += f(a + k * h);
    const double refined = h / 3.0 * (fa + fb + 4.0 * odd + 2.0 * even);
    if (std::abs(refined - estimate) <= std::max(tol, tol * std::abs(refined))) return refined;
    estimate = refined;
  }
  throw QuadratureError("simpson_refined: no convergence after " + std::to_string(max_panels) +
                        " panels");
}

/// Bisection for a non-decreasing function g on [lo, hi]; returns the smallest x
/// (to within xtol) with g(x) >= target.
template <class G>
double bisect_increasing(G&& g, double target, double lo, double hi, double xtol = 1e-12) {
  require(lo <= hi, "bisect_increasing: empty bracket");
  for (int it = 0; it < 400 && hi - lo > xtol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

/// Iterated adaptive quadrature of f(s, z) over [s0, s1] x (union of z pieces).
template <class F>
Result integrate_2d(F&& f, double s0, double s1, const std::vector<double>& z_breaks,
                    const Options& opt = {}) {
  Options inner = opt;
  inner.abs_tol = opt.abs_tol / std::max(1.0, s1 - s0) * 0.1;
  int evaluations = 0;
  auto outer_integrand = [&](double s) {
    auto r = integrate([&](double z) { return f(s, z); }, z_breaks, inner);
    evaluations += r.evaluations;
    return r.value;
  };
  auto r = integrate(outer_integrand, s0, s1, opt);
  r.evaluations = evaluations;
  return r;
}

}  // namespace jumpsde::quad
