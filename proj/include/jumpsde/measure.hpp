#pragma once

// Time-inhomogeneous compensator kernels nu_t(dz) with Lebesgue densities and
// the integrals the schemes consume: tail intensities, cumulative intensities,
// truncated moments and the conditional law of jump sizes outside B(eps).

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "jumpsde/error.hpp"
#include "jumpsde/quadrature.hpp"

namespace jumpsde {

/// Multiplicative time modulation phi(t) of a kernel with an antiderivative.
class TimeProfile {
 public:
  enum class Kind { constant, power, capped_power, custom };

  static TimeProfile constant(double level = 1.0) {
    require(level >= 0.0, "TimeProfile::constant: level must be nonnegative");
    TimeProfile p;
    p.kind_ = Kind::constant;
    p.level_ = level;
    return p;
  }

  /// phi(t) = t^exponent.
  static TimeProfile power(double exponent) {
    TimeProfile p;
    p.kind_ = Kind::power;
    p.exponent_ = exponent;
    return p;
  }

  /// phi(t) = min(t, cap)^exponent.
  static TimeProfile capped_power(double cap, double exponent) {
    require(cap > 0.0, "TimeProfile::capped_power: cap must be positive");
    TimeProfile p;
    p.kind_ = Kind::capped_power;
    p.cap_ = cap;
    p.exponent_ = exponent;
    return p;
  }

  static TimeProfile custom(std::function<double(double)> f, std::string label = "custom") {
    require(static_cast<bool>(f), "TimeProfile::custom: empty function");
    TimeProfile p;
    p.kind_ = Kind::custom;
    p.fn_ = std::make_shared<const std::function<double(double)>>(std::move(f));
    p.label_ = std::move(label);
    return p;
  }

  Kind kind() const { return kind_; }
  double exponent() const { return exponent_; }
  double cap() const { return cap_; }
  bool has_closed_form() const { return kind_ != Kind::custom; }
  bool is_constant() const {
    return kind_ == Kind::constant || (kind_ == Kind::power && exponent_ == 0.0) ||
           (kind_ == Kind::capped_power && exponent_ == 0.0);
  }

  double operator()(double t) const {
    switch (kind_) {
      case Kind::constant: return level_;
      case Kind::power: return exponent_ == 0.0 ? 1.0 : std::pow(t, exponent_);
      case Kind::capped_power: return exponent_ == 0.0 ? 1.0 : std::pow(std::min(t, cap_), exponent_);
      case Kind::custom: return (*fn_)(t);
    }
    return 0.0;
  }

  /// Integral of phi over [t0, t1].
  double integral(double t0, double t1) const {
    require(t0 <= t1, "TimeProfile::integral: t0 > t1");
    if (t0 == t1) return 0.0;
    switch (kind_) {
      case Kind::constant: return level_ * (t1 - t0);
      case Kind::power: return power_integral(t0, t1, exponent_);
      case Kind::capped_power: {
        double total = 0.0;
        if (t0 < cap_) total += power_integral(t0, std::min(t1, cap_), exponent_);
        if (t1 > cap_) total += std::pow(cap_, exponent_) * (t1 - std::max(t0, cap_));
        return total;
      }
      case Kind::custom: return quad::simpson_refined(*fn_, t0, t1, 1e-13);
    }
    return 0.0;
  }

  /// Smallest t1 in [t0, t_max] with integral(t0, t1) >= target; t_max when the
  /// target exceeds the available mass.
  double inverse_integral(double t0, double target, double t_max) const {
    if (target <= 0.0) return t0;
    double t = t_max;
    switch (kind_) {
      case Kind::constant:
        t = level_ > 0.0 ? t0 + target / level_ : t_max;
        break;
      case Kind::power:
        t = power_inverse(t0, target, exponent_);
        break;
      case Kind::capped_power: {
        const double below = t0 < cap_ ? power_integral(t0, cap_, exponent_) : 0.0;
        if (t0 < cap_ && target <= below) {
          t = power_inverse(t0, target, exponent_);
        } else {
          const double level = std::pow(cap_, exponent_);
          t = std::max(t0, cap_) + (target - below) / level;
        }
        break;
      }
      case Kind::custom:
        return quad::bisect_increasing([&](double s) { return integral(t0, s); }, target, t0,
                                       t_max, 1e-12);
    }
    return std::min(t, t_max);
  }

  std::string describe() const {
    switch (kind_) {
      case Kind::constant: return "constant(" + std::to_string(level_) + ")";
      case Kind::power: return "power(" + std::to_string(exponent_) + ")";
      case Kind::capped_power:
        return "capped_power(" + std::to_string(cap_) + "," + std::to_string(exponent_) + ")";
      case Kind::custom: return label_;
    }
    return "";
  }

 private:
  TimeProfile() = default;

  static double power_integral(double t0, double t1, double rho) {
    if (rho == 0.0) return t1 - t0;
    if (rho <= -1.0 && t0 <= 0.0) {
      throw DomainError("time factor t^" + std::to_string(rho) + " is not integrable at 0");
    }
    if (rho == -1.0) return std::log(t1 / t0);
    return (std::pow(t1, rho + 1.0) - std::pow(t0, rho + 1.0)) / (rho + 1.0);
  }

  static double power_inverse(double t0, double target, double rho) {
    if (rho == 0.0) return t0 + target;
    if (rho == -1.0) return t0 * std::exp(target);
    const double base = std::pow(t0, rho + 1.0) + (rho + 1.0) * target;
    if (base <= 0.0) return std::numeric_limits<double>::infinity();
    return std::pow(base, 1.0 / (rho + 1.0));
  }

  Kind kind_ = Kind::constant;
  double level_ = 1.0;
  double exponent_ = 0.0;
  double cap_ = 1.0;
  std::shared_ptr<const std::function<double(double)>> fn_;
  std::string label_;
};

namespace detail {

/// Integral of u^{e-1} over [a, b] with 0 <= a <= b.
inline double power_moment(double a, double b, double e) {
  if (!(b > a)) return 0.0;
  if (e == 0.0) {
    if (a <= 0.0) return std::numeric_limits<double>::infinity();
    return std::log(b / a);
  }
  if (a <= 0.0 && e < 0.0) return std::numeric_limits<double>::infinity();
  return (std::pow(b, e) - std::pow(a, e)) / e;
}

}  // namespace detail

/// Power-law jump-size shape |z|^{-1-alpha} on [-lower, upper]. alpha < 0 gives
/// a finite-activity law (alpha = -1 is uniform).
class PowerLawShape {
 public:
  PowerLawShape(double alpha, double lower, double upper)
      : alpha_(alpha), lower_(lower), upper_(upper) {
    require(alpha < 2.0, "PowerLawShape: alpha must be < 2");
    require(lower >= 0.0 && upper >= 0.0 && lower + upper > 0.0,
            "PowerLawShape: truncation bounds must be nonnegative with nonempty support");
  }

  static PowerLawShape symmetric(double alpha, double bound) { return {alpha, bound, bound}; }

  double alpha() const { return alpha_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool symmetric() const { return lower_ == upper_; }
  bool finite_activity() const { return alpha_ < 0.0; }

  double density(double z) const {
    if (z == 0.0 || z < -lower_ || z > upper_) return 0.0;
    return std::pow(std::abs(z), -1.0 - alpha_);
  }

  double negative_mass(double eps) const { return detail::power_moment(eps, lower_, -alpha_); }
  double positive_mass(double eps) const { return detail::power_moment(eps, upper_, -alpha_); }
  double mass(double eps) const { return negative_mass(eps) + positive_mass(eps); }

  /// Integral of |z|^p over the part of the support with a < |z| <= b, split by side.
  double negative_moment(double a, double b, double p) const {
    return detail::power_moment(a, std::min(b, lower_), p - alpha_);
  }
  double positive_moment(double a, double b, double p) const {
    return detail::power_moment(a, std::min(b, upper_), p - alpha_);
  }

  double cdf(double eps, double x) const {
    const double m_neg = negative_mass(eps);
    const double m_pos = positive_mass(eps);
    const double total = m_neg + m_pos;
    require(total > 0.0, "jump-size law undefined: eps at or beyond the truncation bounds");
    if (x < -lower_) return 0.0;
    if (x <= -eps) return detail::power_moment(-x, lower_, -alpha_) / total;
    if (x < eps) return m_neg / total;
    if (x >= upper_) return 1.0;
    return (m_neg + detail::power_moment(eps, x, -alpha_)) / total;
  }

  double quantile(double eps, double y) const {
    require(y > 0.0 && y <= 1.0, "jump_size_quantile: y must lie in (0, 1]");
    const double m_neg = negative_mass(eps);
    const double m_pos = positive_mass(eps);
    const double total = m_neg + m_pos;
    require(total > 0.0, "jump-size law undefined: eps at or beyond the truncation bounds");
    const double target = y * total;
    if (target <= m_neg) {
      // Mass of [-lower, x] equals target.
      if (alpha_ == 0.0) return -lower_ * std::exp(-target);
      return -std::pow(alpha_ * target + std::pow(lower_, -alpha_), -1.0 / alpha_);
    }
    const double rest = std::min(target - m_neg, m_pos);
    double x;
    if (alpha_ == 0.0) {
      x = eps * std::exp(rest);
    } else {
      x = std::pow(std::pow(eps, -alpha_) - alpha_ * rest, -1.0 / alpha_);
    }
    return std::clamp(x, std::max(eps, 0.0), upper_);
  }

 private:
  double alpha_;
  double lower_;
  double upper_;
};

enum class Region { inside, outside };

inline bool in_region(double z, double eps, Region region) {
  return region == Region::outside ? std::abs(z) > eps : std::abs(z) <= eps;
}

/// The compensator family nu_t(dz) = density(t, z) dz on [z_low, z_high].
class CompensatorKernel {
 public:
  /// phi(t) |z|^{-1-alpha} on [-lower, upper], all integrals in closed form.
  static CompensatorKernel power_law(PowerLawShape shape,
                                     TimeProfile time = TimeProfile::constant()) {
    CompensatorKernel k;
    k.z_low_ = -shape.lower();
    k.z_high_ = shape.upper();
    k.bg_index_ = std::max(shape.alpha(), 0.0);
    k.symmetric_ = shape.symmetric();
    k.finite_activity_ = shape.finite_activity();
    k.time_ = std::move(time);
    k.shape_ = std::move(shape);
    return k;
  }

  /// phi(t) g(z) with a user shape g; integrals in z by quadrature.
  static CompensatorKernel factorised(std::function<double(double)> shape_density, double z_low,
                                      double z_high, TimeProfile time, double bg_index,
                                      bool symmetric = false, bool finite_activity = false) {
    require(static_cast<bool>(shape_density), "CompensatorKernel: empty shape density");
    CompensatorKernel k = general_base(z_low, z_high, bg_index, symmetric, finite_activity);
    k.shape_fn_ = std::make_shared<const std::function<double(double)>>(std::move(shape_density));
    k.time_ = std::move(time);
    return k;
  }

  /// Arbitrary density(t, z); every integral goes through quadrature.
  static CompensatorKernel general(std::function<double(double, double)> density, double z_low,
                                   double z_high, double bg_index, bool symmetric = false,
                                   bool finite_activity = false) {
    require(static_cast<bool>(density), "CompensatorKernel: empty density");
    CompensatorKernel k = general_base(z_low, z_high, bg_index, symmetric, finite_activity);
    k.density_fn_ = std::make_shared<const std::function<double(double, double)>>(std::move(density));
    return k;
  }

  double density(double t, double z) const {
    if (z < z_low_ || z > z_high_) return 0.0;
    if (density_fn_) return std::max(0.0, (*density_fn_)(t, z));
    return (*time_)(t) * shape_density(z);
  }

  /// The time-free factor g(z); only meaningful for factorised kernels.
  double shape_density(double z) const {
    if (z < z_low_ || z > z_high_) return 0.0;
    if (shape_) return shape_->density(z);
    if (shape_fn_) return std::max(0.0, (*shape_fn_)(z));
    throw PreconditionError("shape_density: kernel is not factorised");
  }

  double z_low() const { return z_low_; }
  double z_high() const { return z_high_; }
  double bg_index() const { return bg_index_; }
  bool symmetric() const { return symmetric_; }
  bool finite_activity() const { return finite_activity_; }
  bool factorised() const { return time_.has_value(); }
  const std::optional<TimeProfile>& time_factor() const { return time_; }
  const std::optional<PowerLawShape>& closed_form() const { return shape_; }

  /// Same kernel with its support intersected with [lo, hi].
  CompensatorKernel restricted(double lo, double hi) const {
    require(lo <= 0.0 && hi >= 0.0, "restricted: bounds must bracket 0");
    CompensatorKernel k = *this;
    k.z_low_ = std::max(z_low_, lo);
    k.z_high_ = std::min(z_high_, hi);
    if (shape_) k.shape_ = PowerLawShape(shape_->alpha(), -k.z_low_, k.z_high_);
    k.symmetric_ = symmetric_ && (-k.z_low_ == k.z_high_);
    return k;
  }

  /// Quadrature breakpoints for the part of the support in the region. The
  /// pieces are consecutive, so for the outside region the middle piece spans
  /// B(eps); integrands must be masked with in_region().
  std::vector<double> breakpoints(double eps, Region region) const {
    std::vector<double> out;
    if (region == Region::inside) {
      const double lo = std::max(z_low_, -eps);
      const double hi = std::min(z_high_, eps);
      out = {lo, 0.0, hi};
    } else {
      out = {z_low_, std::min(-eps, 0.0), std::max(eps, 0.0), z_high_};
      if (out[1] < out[0]) out[1] = out[0];
      if (out[2] > out[3]) out[2] = out[3];
    }
    return out;
  }

 private:
  CompensatorKernel() = default;

  static CompensatorKernel general_base(double z_low, double z_high, double bg_index,
                                        bool symmetric, bool finite_activity) {
    require(z_low <= 0.0 && z_high >= 0.0 && z_high > z_low,
            "CompensatorKernel: support must satisfy z_low <= 0 <= z_high");
    require(bg_index >= 0.0 && bg_index <= 2.0, "CompensatorKernel: bg_index must lie in [0, 2]");
    CompensatorKernel k;
    k.z_low_ = z_low;
    k.z_high_ = z_high;
    k.bg_index_ = bg_index;
    k.symmetric_ = symmetric;
    k.finite_activity_ = finite_activity;
    return k;
  }

  double z_low_ = 0.0;
  double z_high_ = 0.0;
  double bg_index_ = 0.0;
  bool symmetric_ = false;
  bool finite_activity_ = false;
  std::optional<TimeProfile> time_;
  std::optional<PowerLawShape> shape_;
  std::shared_ptr<const std::function<double(double)>> shape_fn_;
  std::shared_ptr<const std::function<double(double, double)>> density_fn_;
};

/// Truncated alpha-stable kernel kappa(t)|z|^{-1-alpha} 1{-z_lower <= z <= z_upper}.
struct TruncatedStableSpec {
  double alpha = 1.0;
  double b_trunc = 1.0;
  std::optional<TimeProfile> kappa;
  std::optional<std::pair<double, double>> asym_bounds;  // (z_lower, z_upper) magnitudes

  CompensatorKernel kernel() const {
    require(alpha > 0.0 && alpha < 2.0, "TruncatedStableSpec: alpha must lie in (0, 2)");
    require(b_trunc > 0.0, "TruncatedStableSpec: b_trunc must be positive");
    const double lower = asym_bounds ? asym_bounds->first : b_trunc;
    const double upper = asym_bounds ? asym_bounds->second : b_trunc;
    return CompensatorKernel::power_law(PowerLawShape(alpha, lower, upper),
                                        kappa.value_or(TimeProfile::constant()));
  }
};

namespace detail {

inline void check_eps(const CompensatorKernel& kernel, double eps) {
  if (eps < 0.0 || (eps == 0.0 && !kernel.finite_activity())) {
    throw PreconditionError("eps must be positive (eps = 0 needs a finite-activity kernel)");
  }
}

template <class F>
double kernel_integral(const CompensatorKernel& kernel, double t, double eps, Region region,
                       F&& weight) {
  const auto r = quad::integrate(
      [&](double z) {
        if (!in_region(z, eps, region)) return 0.0;
        const double d = kernel.density(t, z);
        return d == 0.0 ? 0.0 : weight(z) * d;
      },
      kernel.breakpoints(eps, region));
  return r.value;
}

}  // namespace detail

/// lambda^eps(t): mass of nu_t outside B(eps).
inline double tail_intensity(const CompensatorKernel& kernel, double t, double eps) {
  detail::check_eps(kernel, eps);
  if (const auto& shape = kernel.closed_form()) {
    const double phi = (*kernel.time_factor())(t);
    return phi == 0.0 ? 0.0 : phi * shape->mass(eps);
  }
  return detail::kernel_integral(kernel, t, eps, Region::outside, [](double) { return 1.0; });
}

/// Integral of a weight against nu_t over the region inside or outside B(eps).
template <class F>
double region_integral(const CompensatorKernel& kernel, double t, double eps, Region region,
                       F&& weight) {
  if (region == Region::outside) detail::check_eps(kernel, eps);
  if (region == Region::inside && eps <= 0.0) return 0.0;
  return detail::kernel_integral(kernel, t, eps, region, std::forward<F>(weight));
}

/// Integral over the region of |z|^p nu_t(dz).
inline double truncated_moment(const CompensatorKernel& kernel, double t, double eps, double p,
                               Region region) {
  require(p >= 0.0, "truncated_moment: p must be nonnegative");
  if (region == Region::inside && eps <= 0.0) return 0.0;
  if (region == Region::outside) detail::check_eps(kernel, eps);
  if (const auto& shape = kernel.closed_form()) {
    const double phi = (*kernel.time_factor())(t);
    if (phi == 0.0) return 0.0;
    const double inf = std::numeric_limits<double>::infinity();
    const double m = region == Region::inside
                         ? shape->negative_moment(0.0, eps, p) + shape->positive_moment(0.0, eps, p)
                         : shape->negative_moment(eps, inf, p) + shape->positive_moment(eps, inf, p);
    if (!std::isfinite(m)) throw DomainError("truncated_moment: divergent integral");
    return phi * m;
  }
  return region_integral(kernel, t, eps, region, [p](double z) { return std::pow(std::abs(z), p); });
}

/// Mass of the time-free shape outside B(eps); factorised kernels only.
inline double shape_tail_mass(const CompensatorKernel& kernel, double eps) {
  detail::check_eps(kernel, eps);
  require(kernel.factorised(), "shape_tail_mass: kernel is not factorised");
  if (const auto& shape = kernel.closed_form()) return shape->mass(eps);
  return quad::integrate(
             [&](double z) { return in_region(z, eps, Region::outside) ? kernel.shape_density(z) : 0.0; },
             kernel.breakpoints(eps, Region::outside))
      .value;
}

/// Lambda^eps(t0, t1) = integral of the tail intensity over [t0, t1].
inline double cumulative_intensity(const CompensatorKernel& kernel, double eps, double t0,
                                   double t1) {
  require(0.0 <= t0 && t0 <= t1, "cumulative_intensity: need 0 <= t0 <= t1");
  if (t0 == t1) return 0.0;
  if (kernel.factorised()) {
    const double mass = shape_tail_mass(kernel, eps);
    if (mass == 0.0) return 0.0;
    return mass * kernel.time_factor()->integral(t0, t1);
  }
  const double a = tail_intensity(kernel, t0, eps);
  const double b = tail_intensity(kernel, t1, eps);
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("cumulative_intensity: intensity is singular at an endpoint");
  }
  return quad::simpson_refined([&](double s) { return tail_intensity(kernel, s, eps); }, t0, t1,
                               1e-12);
}

/// G^eps(x): conditional CDF of a jump size at time t given |Z| > eps.
inline double jump_size_cdf(const CompensatorKernel& kernel, double t, double eps, double x) {
  detail::check_eps(kernel, eps);
  if (const auto& shape = kernel.closed_form()) return shape->cdf(eps, x);
  const double total = tail_intensity(kernel, t, eps);
  require(total > 0.0, "jump-size law undefined: zero tail mass");
  if (x < kernel.z_low()) return 0.0;
  if (x >= kernel.z_high()) return 1.0;
  std::vector<double> breaks;
  if (x <= -eps) {
    breaks = {kernel.z_low(), x};
  } else {
    breaks = {kernel.z_low(), std::min(-eps, 0.0)};
    if (x >= eps) {
      breaks.push_back(std::max(eps, 0.0));
      breaks.push_back(x);
    }
  }
  double below = 0.0;
  for (std::size_t k = 0; k + 1 < breaks.size(); k += 2) {
    below += quad::integrate([&](double z) { return kernel.density(t, z); }, breaks[k],
                             breaks[k + 1])
                 .value;
  }
  return std::clamp(below / total, 0.0, 1.0);
}

/// Q^eps(y) = inf{x : y <= G^eps(x)}.
inline double jump_size_quantile(const CompensatorKernel& kernel, double t, double eps, double y) {
  require(y > 0.0 && y <= 1.0, "jump_size_quantile: y must lie in (0, 1]");
  detail::check_eps(kernel, eps);
  if (const auto& shape = kernel.closed_form()) return shape->quantile(eps, y);
  require(tail_intensity(kernel, t, eps) > 0.0, "jump-size law undefined: zero tail mass");
  // Negative branch [z_low, -eps] or positive branch [eps, z_high].
  const double neg_share = jump_size_cdf(kernel, t, eps, std::min(-eps, 0.0));
  auto g = [&](double x) { return jump_size_cdf(kernel, t, eps, x); };
  if (y <= neg_share) {
    return quad::bisect_increasing(g, y, kernel.z_low(), std::min(-eps, 0.0), 1e-12);
  }
  return quad::bisect_increasing(g, y, std::max(eps, 0.0), kernel.z_high(), 1e-12);
}

/// Quantile evaluator that hoists per-eps work out of the sampling loop. For
/// factorised kernels without closed forms the conditional CDF is tabulated on
/// a log-spaced grid and refined by bisection with local quadrature.
class JumpSizeSampler {
 public:
  JumpSizeSampler(const CompensatorKernel& kernel, double eps) : kernel_(&kernel), eps_(eps) {
    detail::check_eps(kernel, eps);
    if (kernel.closed_form() || !kernel.factorised()) return;
    build_table();
  }

  double operator()(double t, double y) const {
    if (const auto& shape = kernel_->closed_form()) return shape->quantile(eps_, y);
    if (!kernel_->factorised()) return jump_size_quantile(*kernel_, t, eps_, y);
    require(y > 0.0 && y <= 1.0, "jump_size_quantile: y must lie in (0, 1]");
    const double target = y * cumulative_.back();
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), target);
    std::size_t cell = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cumulative_.begin(), 1));
    const double base = cumulative_[cell - 1];
    const double left = nodes_[cell - 1];
    auto mass_to = [&](double x) {
      return base + quad::integrate([&](double z) { return kernel_->shape_density(z); }, left, x).value;
    };
    return quad::bisect_increasing(mass_to, target, left, nodes_[cell], 1e-12);
  }

 private:
  void build_table() {
    constexpr int kCellsPerSide = 128;
    const double lo = std::max(eps_, 1e-300);
    // Nodes run from z_low up to -eps, then from eps up to z_high; the jump
    // across B(eps) is a zero-mass cell.
    auto side = [&](double bound, bool negative) {
      std::vector<double> pts;
      if (!(bound > eps_)) return pts;
      const double a = std::max(lo, bound * 1e-12);
      for (int k = 0; k <= kCellsPerSide; ++k) {
        const double u = static_cast<double>(k) / kCellsPerSide;
        pts.push_back(a * std::pow(bound / a, u));
      }
      if (eps_ <= 0.0) pts.front() = 0.0;
      if (negative) {
        std::reverse(pts.begin(), pts.end());
        for (double& v : pts) v = -v;
      }
      return pts;
    };
    auto neg = side(-kernel_->z_low(), true);
    auto pos = side(kernel_->z_high(), false);
    nodes_ = neg;
    nodes_.insert(nodes_.end(), pos.begin(), pos.end());
    require(nodes_.size() >= 2, "jump-size law undefined: zero tail mass");
    cumulative_.assign(nodes_.size(), 0.0);
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
      const bool gap = nodes_[k - 1] < 0.0 && nodes_[k] > 0.0;
      const double cell =
          gap ? 0.0
              : quad::integrate([&](double z) { return kernel_->shape_density(z); }, nodes_[k - 1],
                                nodes_[k])
                    .value;
      cumulative_[k] = cumulative_[k - 1] + cell;
    }
    require(cumulative_.back() > 0.0, "jump-size law undefined: zero tail mass");
  }

  const CompensatorKernel* kernel_;
  double eps_;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
};

}  // namespace jumpsde
