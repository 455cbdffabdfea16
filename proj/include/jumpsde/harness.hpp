#pragma once

// Monte Carlo experiments: strong L^p sup-errors against coupled fine-grid
// references, weak errors through a manufactured Kolmogorov solution with a
// source term, empirical W_q distances between the small-jump integral and its
// Gaussian substitute, and the subordinator lower-bound check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "jumpsde/error.hpp"
#include "jumpsde/grid.hpp"
#include "jumpsde/measure.hpp"
#include "jumpsde/model.hpp"
#include "jumpsde/noise.hpp"
#include "jumpsde/parallel.hpp"
#include "jumpsde/presets.hpp"
#include "jumpsde/quadrature.hpp"
#include "jumpsde/random.hpp"
#include "jumpsde/scheme.hpp"
#include "jumpsde/stats.hpp"

namespace jumpsde {

/// Paths per work chunk; fixed so reductions do not depend on the thread count.
inline constexpr std::uint64_t kPathChunk = 256;

/// Divergent paths are dropped; more than this fraction aborts the run.
inline constexpr double kMaxExcludedFraction = 1e-4;

struct ErrorReport {
  std::string label;
  int norm = 0;               // p of the L^p norm; 0 for weak errors
  Abscissa kind = Abscissa::steps;
  std::vector<double> abscissae;
  std::vector<double> estimates;
  std::vector<double> std_errors;  // 95% CLT half-widths
  std::vector<int> steps;          // grid size used at each point
  std::vector<double> signed_bias; // weak errors only
  double fitted_slope = std::numeric_limits<double>::quiet_NaN();
  std::pair<double, double> slope_ci{std::numeric_limits<double>::quiet_NaN(),
                                     std::numeric_limits<double>::quiet_NaN()};
  double predicted_slope = std::numeric_limits<double>::quiet_NaN();
  std::uint64_t paths = 0;
  std::uint64_t excluded_paths = 0;
  double runtime_seconds = 0.0;
};

/// Fits the report's points in place; fewer than 3 usable points leave NaN.
inline RateFit fit_rate(ErrorReport& report) {
  std::size_t usable = 0;
  for (double e : report.estimates) usable += e > 0.0 ? 1 : 0;
  if (usable < 3) {
    warn("fit_rate: '" + report.label + "' has fewer than 3 positive estimates");
    return {};
  }
  const RateFit fit = fit_rate(report.abscissae, report.estimates, report.kind);
  report.fitted_slope = fit.slope;
  report.slope_ci = {fit.ci_low, fit.ci_high};
  return fit;
}

namespace detail {

inline void check_exclusions(std::uint64_t excluded, std::uint64_t paths, const std::string& what) {
  if (static_cast<double>(excluded) > kMaxExcludedFraction * static_cast<double>(paths)) {
    throw DivergenceError(what + ": " + std::to_string(excluded) + " of " + std::to_string(paths) +
                          " paths diverged, above the 0.01% exclusion limit");
  }
}

inline bool is_power_of_two(int v) { return v >= 1 && (v & (v - 1)) == 0; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Strong error

enum class EpsRule { half_plus_inv_p, bg_rule, integrability, explicit_value };

inline std::string_view to_string(EpsRule r) {
  switch (r) {
    case EpsRule::half_plus_inv_p: return "half_plus_inv_p";
    case EpsRule::bg_rule: return "bg_rule";
    case EpsRule::integrability: return "integrability";
    case EpsRule::explicit_value: return "explicit";
  }
  return "unknown";
}

inline EpsRule parse_eps_rule(std::string_view s) {
  if (s == "half_plus_inv_p") return EpsRule::half_plus_inv_p;
  if (s == "bg_rule") return EpsRule::bg_rule;
  if (s == "integrability") return EpsRule::integrability;
  if (s == "explicit") return EpsRule::explicit_value;
  throw PreconditionError("unknown eps rule '" + std::string(s) + "'");
}

struct StrongErrorPlan {
  std::vector<int> p_norms{2};
  std::vector<int> n_grid;
  int n_max = 0;
  EpsRule eps_rule = EpsRule::half_plus_inv_p;
  double eps_explicit = 0.0;
  std::uint64_t mc_paths = 10000;
  Variant variant = Variant::with_substitute;  // used for reference and coarse paths

  void validate() const {
    require(!p_norms.empty(), "strong plan: no p norms");
    for (int p : p_norms) require(p >= 2 && p % 2 == 0, "strong plan: p norms must be even and >= 2");
    require(detail::is_power_of_two(n_max), "strong plan: n_max must be a power of two");
    require(n_grid.size() >= 3, "strong plan: n_grid needs at least 3 points for a rate fit");
    for (int n : n_grid) {
      require(detail::is_power_of_two(n) && n <= n_max,
              "strong plan: n_grid entries must be powers of two dividing n_max");
    }
    require(mc_paths >= 2, "strong plan: need at least 2 paths");
    if (eps_rule == EpsRule::explicit_value) {
      require(eps_explicit >= 0.0, "strong plan: explicit eps must be >= 0");
    }
  }

  /// eps of the reference and coarse paths.
  double eps_min(const SdeModel& model) const {
    const int p = *std::min_element(p_norms.begin(), p_norms.end());
    const double gamma = model.rate.gamma;
    const double n = static_cast<double>(n_max);
    switch (eps_rule) {
      case EpsRule::half_plus_inv_p:
        return std::pow(n, -(0.5 + std::min(gamma, 1.0 / p)));
      case EpsRule::bg_rule: {
        const double beta = model.kernel.bg_index();
        require(beta < 2.0, "bg_rule needs a Blumenthal-Getoor index below 2");
        return std::pow(n, -std::min(gamma, 1.0 / p) * 2.0 / (2.0 - beta));
      }
      case EpsRule::integrability: {
        // psi_p ~ t^{-r} lies in L^{1+zeta} for zeta < 1/r - 1, so 2 zeta / (p (1 + zeta))
        // approaches 2 (1 - r) / p.
        const double r = model.rate.time_singularity;
        return std::pow(n, -(0.5 + std::min(gamma, 2.0 * (1.0 - r) / p)));
      }
      case EpsRule::explicit_value:
        return eps_explicit;
    }
    return eps_explicit;
  }
};

/// One report per p. Each path draws noise at (n_max, eps_min), simulates the
/// reference and then every coarse grid on noise aggregated level by level.
inline std::vector<ErrorReport> run_strong_error(const SdeModel& model, const StrongErrorPlan& plan,
                                                 std::uint64_t seed, int threads = 0) {
  const auto start = std::chrono::steady_clock::now();
  plan.validate();
  require(model.multiplicative.has_value(), "strong error needs a multiplicative jump coefficient");
  const double eps = plan.eps_min(model);
  const SchemeConfig ref_config{plan.n_max, eps, model.T, plan.variant};
  const SchemeStepper ref_stepper(model, ref_config);

  // Coarse levels from fine to coarse, each with its aggregation weights.
  std::vector<int> levels = plan.n_grid;
  std::sort(levels.begin(), levels.end(), std::greater<>());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  std::vector<SchemeStepper> steppers;
  std::vector<std::vector<double>> weights;
  steppers.reserve(levels.size());
  for (int n : levels) {
    steppers.emplace_back(model, SchemeConfig{n, eps, model.T, plan.variant});
    weights.push_back(steppers.back().substitute_weights());
  }
  const auto ref_weights = ref_stepper.substitute_weights();

  NoiseOptions opts;
  opts.brownian = model.has_diffusion();
  opts.substitute = plan.variant != Variant::without_substitute;
  const std::size_t np = plan.p_norms.size();
  const std::size_t nl = levels.size();

  struct Chunk {
    std::vector<MomentSums> sums;
    std::uint64_t excluded = 0;
  };
  const auto chunks = run_chunks<Chunk>(
      plan.mc_paths, threads, kPathChunk, [&](std::uint64_t begin, std::uint64_t end) {
        Chunk acc;
        acc.sums.assign(nl * np, MomentSums{});
        std::vector<double> ref;
        std::vector<double> coarse;
        std::vector<double> sup(nl);
        bool divergent = false;
        for (std::uint64_t path = begin; path < end; ++path) {
          NoiseRealization level_noise = generate_noise(model.kernel, ref_config, seed, path, opts);
          ref_stepper.simulate_into(level_noise, ref, divergent);
          bool bad = divergent;
          std::span<const double> level_weights = ref_weights;
          for (std::size_t l = 0; l < nl && !bad; ++l) {
            const int m = level_noise.grid_n / levels[l];
            if (m > 1) level_noise = aggregate_to_coarser_grid(level_noise, m, level_weights);
            level_weights = weights[l];
            steppers[l].simulate_into(level_noise, coarse, divergent);
            sup[l] = divergent ? std::numeric_limits<double>::infinity() : sup_distance(coarse, ref);
            bad = !std::isfinite(sup[l]);
          }
          if (bad) {
            ++acc.excluded;
            continue;
          }
          for (std::size_t l = 0; l < nl; ++l) {
            for (std::size_t k = 0; k < np; ++k) {
              acc.sums[l * np + k].add(std::pow(sup[l], plan.p_norms[k]));
            }
          }
        }
        return acc;
      });

  std::vector<MomentSums> total(nl * np);
  std::uint64_t excluded = 0;
  for (const auto& c : chunks) {
    for (std::size_t i = 0; i < total.size(); ++i) total[i].merge(c.sums[i]);
    excluded += c.excluded;
  }
  detail::check_exclusions(excluded, plan.mc_paths, "strong error");

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::vector<ErrorReport> reports;
  for (std::size_t k = 0; k < np; ++k) {
    const int p = plan.p_norms[k];
    ErrorReport r;
    r.label = model.name + " strong L^" + std::to_string(p);
    r.norm = p;
    r.kind = Abscissa::steps;
    r.paths = plan.mc_paths;
    r.excluded_paths = excluded;
    r.runtime_seconds = elapsed;
    r.predicted_slope = model.rate.predicted_rate(p);
    // Ascending n in the report.
    for (std::size_t l = nl; l-- > 0;) {
      const MomentSums& s = total[l * np + k];
      const double mu = s.mean();
      const double est = std::pow(mu, 1.0 / p);
      const double hw = mu > 0.0 ? 1.96 * (1.0 / p) * std::pow(mu, 1.0 / p - 1.0) *
                                       std::sqrt(s.variance() / s.count)
                                 : 0.0;
      r.abscissae.push_back(levels[l]);
      r.steps.push_back(levels[l]);
      r.estimates.push_back(est);
      r.std_errors.push_back(hw);
    }
    fit_rate(r);
    reports.push_back(std::move(r));
  }
  return reports;
}

/// Indices k where estimate[k+1] exceeds estimate[k] by more than twice the
/// combined half-widths; empty when the curve is non-increasing within noise.
inline std::vector<std::size_t> monotonicity_violations(const ErrorReport& r) {
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k + 1 < r.estimates.size(); ++k) {
    const double slack = 2.0 * std::hypot(r.std_errors[k], r.std_errors[k + 1]);
    if (r.estimates[k + 1] > r.estimates[k] + slack) out.push_back(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Weak error

/// n = factor * floor(scale * eps^{-exponent}).
struct StepRule {
  double factor = 1.0;
  double exponent = 1.0;
  double scale = 1.0;

  int operator()(double eps) const {
    const double n = factor * std::floor(scale * std::pow(eps, -exponent));
    require(n >= 1.0 && n < 1e9, "step rule produced n outside [1, 1e9)");
    return static_cast<int>(n);
  }
};

struct WeakVariantPlan {
  Variant variant = Variant::with_substitute;
  StepRule n_rule;
};

struct WeakErrorPlan {
  std::vector<double> eps_grid;
  std::vector<WeakVariantPlan> variants;
  double start_t = 0.0;
  std::optional<double> start_x;  // defaults to the model's x0
  std::uint64_t mc_paths = 100000;

  void validate() const {
    require(eps_grid.size() >= 2, "weak plan: eps grid needs at least 2 points");
    for (std::size_t k = 0; k < eps_grid.size(); ++k) {
      require(eps_grid[k] > 0.0, "weak plan: eps values must be positive");
      if (k > 0) require(eps_grid[k] < eps_grid[k - 1], "weak plan: eps grid must be decreasing");
    }
    require(!variants.empty(), "weak plan: no variants");
    require(start_t == 0.0, "weak plan: only start time 0 is supported");
    require(mc_paths >= 2, "weak plan: need at least 2 paths");
  }
};

/// Composite Simpson of grid samples with spacing h; an odd panel count closes
/// with one trapezoid panel.
inline double simpson_on_grid(std::span<const double> values, double h) {
  require(values.size() >= 2, "simpson_on_grid: need at least 2 samples");
  const std::size_t panels = values.size() - 1;
  const std::size_t even = panels - panels % 2;
  double acc = 0.0;
  for (std::size_t k = 0; k + 2 <= even; k += 2) {
    acc += values[k] + 4.0 * values[k + 1] + values[k + 2];
  }
  acc *= h / 3.0;
  if (panels % 2 == 1) acc += 0.5 * h * (values[panels - 1] + values[panels]);
  return acc;
}

/// One report per variant: |E[phi(X_T) - int_0^T G(s, X_s) ds] - u(0, x0)|.
/// Variants draw their noise from the same seed and path indices.
inline std::vector<ErrorReport> run_weak_error(const SdeModel& model_in, const WeakErrorSpec& spec,
                                               const WeakErrorPlan& plan, std::uint64_t seed,
                                               int threads = 0) {
  plan.validate();
  require(spec.phi && spec.source_g && spec.u_exact, "weak error: incomplete WeakErrorSpec");
  SdeModel model = model_in;
  if (plan.start_x) model.x0 = *plan.start_x;
  const double target = spec.u_exact(plan.start_t, model.x0);

  std::vector<ErrorReport> reports;
  for (const auto& vp : plan.variants) {
    const auto start = std::chrono::steady_clock::now();
    ErrorReport r;
    r.label = model.name + " weak " + std::string(to_string(vp.variant));
    r.kind = Abscissa::eps;
    r.paths = plan.mc_paths;
    NoiseOptions opts;
    opts.brownian = model.has_diffusion();
    opts.substitute = vp.variant != Variant::without_substitute;
    for (double eps : plan.eps_grid) {
      const SchemeConfig config{vp.n_rule(eps), eps, model.T, vp.variant};
      const SchemeStepper stepper(model, config);
      struct Chunk {
        MomentSums sums;
        std::uint64_t excluded = 0;
      };
      const auto chunks = run_chunks<Chunk>(
          plan.mc_paths, threads, kPathChunk, [&](std::uint64_t begin, std::uint64_t end) {
            Chunk acc;
            std::vector<double> values;
            std::vector<double> g(static_cast<std::size_t>(config.n) + 1);
            bool divergent = false;
            for (std::uint64_t path = begin; path < end; ++path) {
              const auto noise = generate_noise(model.kernel, config, seed, path, opts);
              stepper.simulate_into(noise, values, divergent);
              if (divergent) {
                ++acc.excluded;
                continue;
              }
              for (int i = 0; i <= config.n; ++i) g[i] = spec.source_g(config.time(i), values[i]);
              const double y = spec.phi(values.back()) - simpson_on_grid(g, config.step());
              if (!std::isfinite(y)) {
                ++acc.excluded;
                continue;
              }
              acc.sums.add(y);
            }
            return acc;
          });
      MomentSums total;
      for (const auto& c : chunks) {
        total.merge(c.sums);
        r.excluded_paths += c.excluded;
      }
      detail::check_exclusions(r.excluded_paths, plan.mc_paths, "weak error");
      const double bias = total.mean() - target;
      r.abscissae.push_back(eps);
      r.steps.push_back(config.n);
      r.signed_bias.push_back(bias);
      r.estimates.push_back(std::abs(bias));
      r.std_errors.push_back(total.half_width());
    }
    r.runtime_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fit_rate(r);
    reports.push_back(std::move(r));
  }
  return reports;
}

// ---------------------------------------------------------------------------
// Empirical Wasserstein distance of the Gaussian substitute

using SpaceTimeFn = std::function<double(double, double)>;

struct WassersteinPoint {
  double eps = 0.0;
  double distance = 0.0;
  double half_width = 0.0;    // 1.96 bootstrap standard deviations
  double bound_ratio = 0.0;   // (int |F|^{q+2} / int |F|^2)^{1/q}
  double gaussian_sd = 0.0;
  double mean_jumps = 0.0;    // simulated jumps per sample
};

struct WassersteinReport {
  double q = 2.0;
  std::uint64_t samples = 0;
  double inner_ratio = 0.01;
  std::vector<WassersteinPoint> points;
  double runtime_seconds = 0.0;
};

struct WassersteinOptions {
  double q = 2.0;
  double inner_ratio = 0.01;  // inner cutoff as a fraction of eps
  int bootstrap = 20;
};

/// W_q between the small-jump integral int_{t0}^{t1} int_{|z|<=eps} F dNtilde
/// and the centred Gaussian of the same variance, for each eps. Jumps above
/// eps * inner_ratio are simulated; the rest enter as an exact Gaussian.
inline WassersteinReport empirical_wasserstein_check(const CompensatorKernel& kernel,
                                                     const SpaceTimeFn& F,
                                                     std::span<const double> eps_grid, double t0,
                                                     double t1, std::uint64_t samples,
                                                     std::uint64_t seed, int threads = 0,
                                                     const WassersteinOptions& opt = {}) {
  const auto start = std::chrono::steady_clock::now();
  require(static_cast<bool>(F), "wasserstein: empty F");
  require(samples >= 10000, "wasserstein: need at least 1e4 samples");
  require(0.0 <= t0 && t0 < t1, "wasserstein: need 0 <= t0 < t1");
  require(opt.inner_ratio > 0.0 && opt.inner_ratio <= 0.01,
          "wasserstein: inner cutoff must be at most eps/100");
  require(opt.q >= 1.0, "wasserstein: q must be >= 1");
  require(opt.bootstrap >= 2, "wasserstein: need at least 2 bootstrap replicates");
  require(!eps_grid.empty(), "wasserstein: empty eps grid");

  WassersteinReport report;
  report.q = opt.q;
  report.samples = samples;
  report.inner_ratio = opt.inner_ratio;
  const double m = static_cast<double>(samples);
  for (double eps : eps_grid) {
    require(eps > 0.0, "wasserstein: eps must be positive");
    const double inner = eps * opt.inner_ratio;
    const CompensatorKernel local = kernel.restricted(-eps, eps);
    const std::vector<double> ring{-eps, -inner, inner, eps};
    const std::vector<double> ball{-eps, 0.0, eps};
    const std::vector<double> core{-inner, 0.0, inner};
    auto weighted = [&](auto weight, const std::vector<double>& breaks, bool ring_only) {
      return quad::integrate_2d(
                 [&](double s, double z) {
                   if (ring_only && std::abs(z) <= inner) return 0.0;
                   const double d = local.density(s, z);
                   return d == 0.0 ? 0.0 : weight(F(s, z)) * d;
                 },
                 t0, t1, breaks)
          .value;
    };
    const double compensation = weighted([](double f) { return f; }, ring, true);
    const double inner_var = weighted([](double f) { return f * f; }, core, false);
    const double full_var = weighted([](double f) { return f * f; }, ball, false);
    const double q = opt.q;
    const double high = weighted([q](double f) { return std::pow(std::abs(f), q + 2.0); }, ball, false);

    WassersteinPoint point;
    point.eps = eps;
    point.gaussian_sd = std::sqrt(full_var);
    point.bound_ratio = full_var > 0.0 ? std::pow(high / full_var, 1.0 / q) : 0.0;
    const double inner_sd = std::sqrt(inner_var);
    const JumpSizeSampler sizes(local, inner);

    struct Chunk {
      std::vector<double> values;
      std::uint64_t jumps = 0;
    };
    const auto chunks =
        run_chunks<Chunk>(samples, threads, kPathChunk, [&](std::uint64_t begin, std::uint64_t end) {
          Chunk acc;
          acc.values.reserve(end - begin);
          for (std::uint64_t k = begin; k < end; ++k) {
            RandomStream times_stream(SeedStream{seed, k, Substream::jump_times});
            RandomStream size_stream(SeedStream{seed, k, Substream::jump_sizes});
            RandomStream gauss_stream(SeedStream{seed, k, Substream::substitute});
            const auto times = sample_jump_times_timechange(local, inner, t1, times_stream);
            double sum = -compensation;
            for (double t : times) {
              const double z = sizes(t, size_stream.uniform());
              if (t <= t0) continue;
              sum += F(t, z);
              ++acc.jumps;
            }
            sum += inner_sd * gauss_stream.normal();
            acc.values.push_back(sum);
          }
          return acc;
        });
    std::vector<double> values;
    values.reserve(samples);
    std::uint64_t jumps = 0;
    for (const auto& c : chunks) {
      values.insert(values.end(), c.values.begin(), c.values.end());
      jumps += c.jumps;
    }
    point.mean_jumps = static_cast<double>(jumps) / m;

    std::vector<double> gaussian(samples);
    for (std::uint64_t i = 0; i < samples; ++i) {
      gaussian[i] = point.gaussian_sd * normal_quantile((static_cast<double>(i) + 0.5) / m);
    }
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    point.distance = wasserstein_sorted(sorted, gaussian, q);

    MomentSums boot;
    std::vector<double> resample(samples);
    for (int b = 0; b < opt.bootstrap; ++b) {
      RandomStream pick(SeedStream{seed, samples + static_cast<std::uint64_t>(b), Substream::thinning});
      for (auto& v : resample) {
        const auto idx = static_cast<std::uint64_t>(pick.uniform() * m);
        v = values[std::min(idx, samples - 1)];
      }
      std::sort(resample.begin(), resample.end());
      boot.add(wasserstein_sorted(resample, gaussian, q));
    }
    point.half_width = 1.96 * std::sqrt(boot.variance());
    report.points.push_back(point);
  }
  report.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

struct WassersteinAssessment {
  bool monotone = true;  // W non-increasing along decreasing eps, within CIs
  bool linear = true;    // W(eps) <= C eps within CIs, C fitted at the largest eps
  double constant = 0.0;
};

/// Expects eps in decreasing order.
inline WassersteinAssessment assess_wasserstein(const WassersteinReport& r) {
  WassersteinAssessment a;
  require(!r.points.empty(), "assess_wasserstein: empty report");
  for (std::size_t k = 1; k < r.points.size(); ++k) {
    require(r.points[k].eps < r.points[k - 1].eps, "assess_wasserstein: eps must be decreasing");
  }
  const auto& head = r.points.front();
  a.constant = head.distance / head.eps;
  for (std::size_t k = 1; k < r.points.size(); ++k) {
    const auto& prev = r.points[k - 1];
    const auto& cur = r.points[k];
    if (cur.distance > prev.distance + std::hypot(cur.half_width, prev.half_width)) a.monotone = false;
    const double line = a.constant * cur.eps;
    const double line_hw = head.half_width * cur.eps / head.eps;
    if (cur.distance > line + std::hypot(cur.half_width, line_hw)) a.linear = false;
  }
  return a;
}

// ---------------------------------------------------------------------------
// Lower bound on the subordinator model

struct LowerBoundReport {
  std::vector<ErrorReport> reports;
  std::vector<double> ceilings;  // 1/p + 0.1 per report
  bool passed = false;
};

/// Euler-Peano strong errors on a one-sided kernel with finite first moment.
/// Passes when every fitted decay exponent is at most 1/p + 0.1.
inline LowerBoundReport lower_bound_check(const SdeModel& model, StrongErrorPlan plan,
                                          std::uint64_t seed, int threads = 0) {
  require(plan.n_grid.size() >= 3, "lower bound: n_grid needs at least 3 points for a rate fit");
  require(model.kernel.z_low() >= 0.0, "lower bound: kernel must be one-sided on (0, inf)");
  require(model.kernel.bg_index() < 1.0,
          "lower bound: kernel needs a finite first moment near 0 (index below 1)");
  plan.variant = Variant::euler_peano;
  LowerBoundReport out;
  out.reports = run_strong_error(model, plan, seed, threads);
  out.passed = true;
  for (const auto& r : out.reports) {
    const double ceiling = 1.0 / r.norm + 0.1;
    out.ceilings.push_back(ceiling);
    out.passed = out.passed && std::isfinite(r.fitted_slope) && r.fitted_slope <= ceiling;
  }
  return out;
}

}  // namespace jumpsde
