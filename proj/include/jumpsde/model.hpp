#pragma once

// SDE description dX = a dt + b dW + int c(t, X-, z) Ntilde(dt, dz) and the
// per-step integrals of the eps-schemes: large-jump compensator, small-jump
// variance, and the moment ratios behind the strong-rate diagnostics.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jumpsde/error.hpp"
#include "jumpsde/measure.hpp"
#include "jumpsde/quadrature.hpp"
#include "jumpsde/random.hpp"

namespace jumpsde {

using TimeStateFn = std::function<double(double, double)>;
using JumpFn = std::function<double(double, double, double)>;

/// The z-factor f of a multiplicative jump coefficient c = scale(t, x) f(z).
class JumpProfile {
 public:
  /// f(z) = sign(z)|z|^power when odd, |z|^power otherwise.
  static JumpProfile monomial(double power, bool odd) {
    require(power >= 0.0, "JumpProfile::monomial: power must be nonnegative");
    JumpProfile p;
    p.power_ = power;
    p.odd_ = odd;
    return p;
  }

  static JumpProfile custom(std::function<double(double)> f, bool odd = false) {
    require(static_cast<bool>(f), "JumpProfile::custom: empty function");
    JumpProfile p;
    p.fn_ = std::make_shared<const std::function<double(double)>>(std::move(f));
    p.odd_ = odd;
    return p;
  }

  double operator()(double z) const {
    if (fn_) return (*fn_)(z);
    if (power_ == 1.0 && odd_) return z;
    const double m = power_ == 1.0 ? std::abs(z) : std::pow(std::abs(z), power_);
    return odd_ && z < 0.0 ? -m : m;
  }

  bool is_monomial() const { return !fn_; }
  double power() const { return power_; }
  bool odd() const { return odd_; }

 private:
  JumpProfile() = default;
  double power_ = 1.0;
  bool odd_ = true;
  std::shared_ptr<const std::function<double(double)>> fn_;
};

struct MultiplicativeJump {
  TimeStateFn scale;
  JumpProfile profile = JumpProfile::monomial(1.0, true);
  bool time_homogeneous_scale = true;  // scale(t, x) does not depend on t
};

enum class JumpFamily { multiplicative, arctan, general };

struct RateHypotheses {
  double gamma = 1.0;  // time-Hoelder exponent of a and b
  double zeta = 1.0;   // psi_p lies in L^{1+zeta}
  int p = 2;
  bool sublinear = false;
  double sublinear_constant = 1.0;  // |c| <= C |z| (1 + |x|)
  std::function<double(double, double)> c_lip_bound;
  bool absolutely_continuous = false;  // coupling hypothesis, asserted not checked
  double time_singularity = 0.0;       // psi_p(t) ~ t^{-order} near t = 0

  void validate() const {
    require(gamma > 0.0 && gamma <= 1.0, "RateHypotheses: gamma must lie in (0, 1]");
    require(zeta > 0.0 && zeta <= 1.0, "RateHypotheses: zeta must lie in (0, 1]");
    require(p >= 2 && p % 2 == 0, "RateHypotheses: p must be an even integer >= 2");
    require(time_singularity >= 0.0 && time_singularity < 1.0,
            "RateHypotheses: time singularity order must lie in [0, 1)");
  }

  /// Strong-rate exponent gamma ^ 2 zeta / (p (1 + zeta)).
  double predicted_rate() const { return predicted_rate(p); }
  double predicted_rate(int norm) const {
    return std::min(gamma, 2.0 * zeta / (norm * (1.0 + zeta)));
  }
};

struct SdeModel {
  std::string name;
  TimeStateFn drift;
  TimeStateFn diffusion;  // empty means b == 0
  JumpFamily family = JumpFamily::general;
  std::optional<MultiplicativeJump> multiplicative;
  JumpFn jump;  // c(t, x, z); always set
  CompensatorKernel kernel;
  double x0 = 0.0;
  double T = 1.0;
  RateHypotheses rate;
  bool jump_odd_in_z = false;

  double a(double t, double x) const { return drift ? drift(t, x) : 0.0; }
  double b(double t, double x) const { return diffusion ? diffusion(t, x) : 0.0; }
  double c(double t, double x, double z) const { return jump(t, x, z); }
  bool has_diffusion() const { return static_cast<bool>(diffusion); }
  bool jump_compensator_vanishes() const { return jump_odd_in_z && kernel.symmetric(); }
};

inline SdeModel make_multiplicative_model(std::string name, TimeStateFn drift,
                                          TimeStateFn diffusion, MultiplicativeJump jump,
                                          CompensatorKernel kernel, double x0, double T,
                                          RateHypotheses rate) {
  require(static_cast<bool>(jump.scale), "multiplicative model: empty scale function");
  SdeModel m{std::move(name), std::move(drift), std::move(diffusion), JumpFamily::multiplicative,
             std::nullopt, {}, std::move(kernel), x0, T, std::move(rate), jump.profile.odd()};
  m.jump = [scale = jump.scale, profile = jump.profile](double t, double x, double z) {
    return scale(t, x) * profile(z);
  };
  m.multiplicative = std::move(jump);
  return m;
}

/// c(t, x, z) = arctan(x z).
inline SdeModel make_arctan_model(std::string name, TimeStateFn drift, TimeStateFn diffusion,
                                  CompensatorKernel kernel, double x0, double T,
                                  RateHypotheses rate) {
  SdeModel m{std::move(name), std::move(drift), std::move(diffusion), JumpFamily::arctan,
             std::nullopt, [](double, double x, double z) { return std::atan(x * z); },
             std::move(kernel), x0, T, std::move(rate), true};
  return m;
}

inline SdeModel make_general_model(std::string name, TimeStateFn drift, TimeStateFn diffusion,
                                   JumpFn jump, CompensatorKernel kernel, double x0, double T,
                                   RateHypotheses rate, bool jump_odd_in_z = false) {
  require(static_cast<bool>(jump), "general model: empty jump coefficient");
  SdeModel m{std::move(name), std::move(drift), std::move(diffusion), JumpFamily::general,
             std::nullopt, std::move(jump), std::move(kernel), x0, T, std::move(rate),
             jump_odd_in_z};
  return m;
}

// ---------------------------------------------------------------------------
// Jump-profile integrals against the time-free shape of a factorised kernel.

namespace detail {

inline bool closed_form_profile(const SdeModel& m) {
  return m.multiplicative && m.multiplicative->profile.is_monomial() && m.kernel.closed_form();
}

}  // namespace detail

/// Integral of f over |z| > eps against the kernel shape.
inline double profile_outside_mean(const SdeModel& m, double eps) {
  require(m.multiplicative && m.kernel.factorised(),
          "profile_outside_mean: needs a multiplicative model with a factorised kernel");
  const auto& profile = m.multiplicative->profile;
  if (profile.odd() && m.kernel.symmetric()) return 0.0;
  if (detail::closed_form_profile(m)) {
    const auto& shape = *m.kernel.closed_form();
    const double inf = std::numeric_limits<double>::infinity();
    const double pos = shape.positive_moment(eps, inf, profile.power());
    const double neg = shape.negative_moment(eps, inf, profile.power());
    const double v = profile.odd() ? pos - neg : pos + neg;
    if (!std::isfinite(v)) throw DomainError("profile_outside_mean: divergent integral");
    return v;
  }
  return quad::integrate(
             [&](double z) {
               return in_region(z, eps, Region::outside) ? profile(z) * m.kernel.shape_density(z) : 0.0;
             },
             m.kernel.breakpoints(eps, Region::outside))
      .value;
}

/// Integral of |f|^q over B(eps) against the kernel shape.
inline double profile_inside_moment(const SdeModel& m, double eps, double q) {
  require(m.multiplicative && m.kernel.factorised(),
          "profile_inside_moment: needs a multiplicative model with a factorised kernel");
  if (eps <= 0.0) return 0.0;
  const auto& profile = m.multiplicative->profile;
  if (detail::closed_form_profile(m)) {
    const auto& shape = *m.kernel.closed_form();
    const double k = q * profile.power();
    const double v = shape.positive_moment(0.0, eps, k) + shape.negative_moment(0.0, eps, k);
    if (!std::isfinite(v)) throw DomainError("profile_inside_moment: divergent integral");
    return v;
  }
  return quad::integrate(
             [&](double z) { return std::pow(std::abs(profile(z)), q) * m.kernel.shape_density(z); },
             m.kernel.breakpoints(eps, Region::inside))
      .value;
}

// ---------------------------------------------------------------------------
// Truncated arctan^2 integral: 2 int_0^y arctan(u)^2 / u du.

namespace detail {

/// Coefficients d_s of P(u)^2 / u = sum_s d_s u^{2s+1}, P the order-11 Taylor
/// polynomial of arctan.
inline constexpr std::array<double, 11> arctan_square_coefficients() {
  std::array<double, 6> c{};
  for (int k = 0; k < 6; ++k) c[k] = (k % 2 == 0 ? 1.0 : -1.0) / (2 * k + 1);
  std::array<double, 11> d{};
  for (int j = 0; j < 6; ++j) {
    for (int k = 0; k < 6; ++k) d[j + k] += c[j] * c[k];
  }
  return d;
}

/// int_0^y P(u)^2 / u du for 0 <= y.
inline double arctan_square_taylor(double y) {
  static constexpr auto d = arctan_square_coefficients();
  const double y2 = y * y;
  // sum_s d_s y^{2s+2} / (2s+2), Horner in y^2.
  double acc = 0.0;
  for (int s = 10; s >= 0; --s) acc = acc * y2 + d[s] / (2.0 * s + 2.0);
  return acc * y2;
}

}  // namespace detail

inline constexpr double kArctanTaylorSwitch = 0.5;
inline constexpr int kArctanSimpsonPanels = 100;

/// int_{-eps}^{eps} arctan(x z)^2 / |z| dz = 2 int_0^{eps|x|} arctan(u)^2 / u du.
/// Taylor series of order 11 below the switch, Taylor on [0, 1/2] plus a
/// 100-panel Simpson rule above it.
inline double arctan_square_integral(double y) {
  y = std::abs(y);
  if (y < kArctanTaylorSwitch) return 2.0 * detail::arctan_square_taylor(y);
  const double head = detail::arctan_square_taylor(kArctanTaylorSwitch);
  const double tail = quad::simpson(
      [](double u) {
        const double a = std::atan(u);
        return a * a / u;
      },
      kArctanTaylorSwitch, y, kArctanSimpsonPanels);
  return 2.0 * (head + tail);
}

// ---------------------------------------------------------------------------
// Per-step integrals.

/// a(s, x) - int_{|z| > eps} c(t, x, z) nu_s(dz).
inline double corrected_drift(const SdeModel& m, double eps, double s, double t, double x) {
  const double a = m.a(s, x);
  if (m.jump_compensator_vanishes()) return a;
  if (m.multiplicative && m.kernel.factorised()) {
    const double phi = (*m.kernel.time_factor())(s);
    if (phi == 0.0) return a;
    return a - m.multiplicative->scale(t, x) * phi * profile_outside_mean(m, eps);
  }
  return a - region_integral(m.kernel, s, eps, Region::outside,
                             [&](double z) { return m.c(t, x, z); });
}

/// int_{t0}^{t1} int_{|z| > eps} c(s, x, z) nu_s(dz) ds.
inline double large_jump_compensator(const SdeModel& m, double eps, double x, double t0, double t1) {
  require(0.0 <= t0 && t0 <= t1, "large_jump_compensator: need 0 <= t0 <= t1");
  if (t0 == t1 || m.jump_compensator_vanishes()) return 0.0;
  if (m.multiplicative && m.kernel.factorised()) {
    const double mean = profile_outside_mean(m, eps);
    if (mean == 0.0) return 0.0;
    const auto& phi = *m.kernel.time_factor();
    if (m.multiplicative->time_homogeneous_scale) {
      return m.multiplicative->scale(t0, x) * phi.integral(t0, t1) * mean;
    }
    return mean * quad::integrate(
                      [&](double s) { return m.multiplicative->scale(s, x) * phi(s); }, t0, t1)
                      .value;
  }
  if (eps == 0.0) detail::check_eps(m.kernel, eps);
  return quad::integrate_2d(
             [&](double s, double z) {
               return in_region(z, eps, Region::outside) ? m.c(s, x, z) * m.kernel.density(s, z) : 0.0;
             },
             t0, t1, m.kernel.breakpoints(eps, Region::outside))
      .value;
}

namespace detail {

inline double clamp_variance(double v) {
  if (v < 0.0) {
    if (v < -1e-14) warn("small_jump_variance: negative value " + std::to_string(v) + " clamped to 0");
    return 0.0;
  }
  return v;
}

inline bool arctan_closed_form(const SdeModel& m, double eps) {
  const auto& shape = m.kernel.closed_form();
  return m.family == JumpFamily::arctan && shape && shape->alpha() == 0.0 &&
         eps <= std::min(shape->lower(), shape->upper());
}

}  // namespace detail

/// int_{t0}^{t1} int_{B(eps)} c(s, x, z)^2 nu_s(dz) ds.
inline double small_jump_variance(const SdeModel& m, double eps, double x, double t0, double t1) {
  require(0.0 <= t0 && t0 <= t1, "small_jump_variance: need 0 <= t0 <= t1");
  if (t0 == t1 || eps <= 0.0) return 0.0;
  if (m.multiplicative && m.kernel.factorised()) {
    const double second = profile_inside_moment(m, eps, 2.0);
    const auto& phi = *m.kernel.time_factor();
    if (m.multiplicative->time_homogeneous_scale) {
      const double sc = m.multiplicative->scale(t0, x);
      return detail::clamp_variance(sc * sc * phi.integral(t0, t1) * second);
    }
    const auto time_part = quad::integrate(
        [&](double s) {
          const double sc = m.multiplicative->scale(s, x);
          return sc * sc * phi(s);
        },
        t0, t1);
    return detail::clamp_variance(second * time_part.value);
  }
  if (detail::arctan_closed_form(m, eps)) {
    return detail::clamp_variance(m.kernel.time_factor()->integral(t0, t1) *
                                  arctan_square_integral(eps * x));
  }
  const auto r = quad::integrate_2d(
      [&](double s, double z) {
        const double c = m.c(s, x, z);
        return c * c * m.kernel.density(s, z);
      },
      t0, t1, m.kernel.breakpoints(eps, Region::inside));
  return detail::clamp_variance(r.value);
}

/// int_{t0}^{t1} int_{B(eps)} |c(s, x, z)|^q nu_s(dz) ds.
inline double jump_moment_integral(const SdeModel& m, double eps, double x, double t0, double t1,
                                   double q) {
  require(0.0 <= t0 && t0 <= t1, "jump_moment_integral: need 0 <= t0 <= t1");
  if (t0 == t1 || eps <= 0.0) return 0.0;
  if (m.multiplicative && m.kernel.factorised() && m.multiplicative->time_homogeneous_scale) {
    const double sc = std::abs(m.multiplicative->scale(t0, x));
    return std::pow(sc, q) * m.kernel.time_factor()->integral(t0, t1) *
           profile_inside_moment(m, eps, q);
  }
  return quad::integrate_2d(
             [&](double s, double z) {
               return std::pow(std::abs(m.c(s, x, z)), q) * m.kernel.density(s, z);
             },
             t0, t1, m.kernel.breakpoints(eps, Region::inside))
      .value;
}

/// psi_p(t) = (int Lc^2 nu_t)^{p/2} + int Lc^p nu_t with Lc the supplied bound.
inline double psi_p_evaluate(const SdeModel& m, double t, double p) {
  require(static_cast<bool>(m.rate.c_lip_bound), "psi_p_evaluate: c_lip_bound not supplied");
  require(p >= 2.0, "psi_p_evaluate: p must be >= 2");
  const double reach = std::max(-m.kernel.z_low(), m.kernel.z_high());
  const auto& bound = m.rate.c_lip_bound;
  const double second = region_integral(m.kernel, t, reach, Region::inside, [&](double z) {
    const double l = bound(t, z);
    return l * l;
  });
  const double pth = region_integral(m.kernel, t, reach, Region::inside,
                                     [&](double z) { return std::pow(std::abs(bound(t, z)), p); });
  const double v = std::pow(second, p / 2.0) + pth;
  if (!std::isfinite(v)) throw DomainError("psi_p_evaluate: divergent integral");
  return v;
}

/// Monte Carlo estimate of delta_p^n(eps) from states sampled on the grid:
/// states[path][k] is the state at t_k, k = 0..n.
inline double delta_diagnostic(const SdeModel& m, double eps, int n,
                               const std::vector<std::vector<double>>& states, int p = 0) {
  require(n >= 1, "delta_diagnostic: n must be >= 1");
  require(!states.empty(), "delta_diagnostic: no sampled paths");
  if (p == 0) p = m.rate.p;
  const double dt = m.T / n;
  double total = 0.0;
  int excluded = 0;
  for (int k = 1; k <= n; ++k) {
    const double t0 = (k - 1) * dt;
    const double t1 = k == n ? m.T : k * dt;
    double mean = 0.0;
    int used = 0;
    for (const auto& path : states) {
      require(path.size() >= static_cast<std::size_t>(n), "delta_diagnostic: short path");
      const double x = path[k - 1];
      const double den = jump_moment_integral(m, eps, x, t0, t1, 2.0);
      if (!(den > 0.0)) {
        ++excluded;
        continue;
      }
      const double num = jump_moment_integral(m, eps, x, t0, t1, p + 2.0);
      mean += std::pow(num / den, 1.0 / p);
      ++used;
    }
    if (used > 0) mean /= static_cast<double>(states.size());
    total += mean * mean;
  }
  if (excluded > 0) {
    warn("delta_diagnostic: " + std::to_string(excluded) +
         " (path, step) pairs excluded, c vanishes on B(eps)");
  }
  return std::sqrt(total);
}

/// Probe checks of the declared model structure; throws PreconditionError.
/// `declared_jump` is the user's c when a multiplicative split was also declared.
inline void validate_model(const SdeModel& m, const JumpFn& declared_jump = {}) {
  m.rate.validate();
  require(m.T > 0.0, "model: T must be positive");
  require(std::isfinite(m.x0), "model: x0 must be finite");
  if (!m.kernel.finite_activity() && m.kernel.closed_form()) {
    require(m.kernel.closed_form()->alpha() < 2.0, "model: kernel alpha must be < 2");
  }
  RandomStream rng(SeedStream{0x5eed, 0, Substream::thinning});
  const double zl = m.kernel.z_low();
  const double zh = m.kernel.z_high();
  for (int k = 0; k < 1000; ++k) {
    const double t = m.T * rng.uniform();
    const double x = 20.0 * (rng.uniform() - 0.5);
    const double z = zl + (zh - zl) * rng.uniform();
    const double c = m.c(t, x, z);
    if (declared_jump) {
      const double ref = declared_jump(t, x, z);
      if (std::abs(ref - c) > 1e-12 * std::max(1.0, std::abs(ref))) {
        throw PreconditionError("model '" + m.name +
                                "': declared multiplicative split disagrees with c at t=" +
                                std::to_string(t) + " x=" + std::to_string(x) +
                                " z=" + std::to_string(z));
      }
    }
    if (m.rate.sublinear &&
        std::abs(c) > m.rate.sublinear_constant * std::abs(z) * (1.0 + std::abs(x)) * (1.0 + 1e-12)) {
      throw PreconditionError("model '" + m.name + "': sublinear bound violated at x=" +
                              std::to_string(x) + " z=" + std::to_string(z));
    }
  }
}

}  // namespace jumpsde
