#pragma once

// Angular dynamics of a rigid fibre driven by a time-modulated truncated
// stable process L with kappa(t) = min(t, T*)^{q-1}:
//
//   dtheta = (a(theta) + (b^2)''(theta) / 4) dt + b(theta-) dL
//   a(theta) = sigma/2 (cos 2 theta - 1)
//   b^2(theta) = g0 + g1 sin 2 theta + g2 sin 4 theta + g3 cos 2 theta + g4 cos 4 theta

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include "jumpsde/error.hpp"
#include "jumpsde/grid.hpp"
#include "jumpsde/measure.hpp"
#include "jumpsde/model.hpp"
#include "jumpsde/noise.hpp"
#include "jumpsde/parallel.hpp"
#include "jumpsde/quadrature.hpp"
#include "jumpsde/scheme.hpp"
#include "jumpsde/stats.hpp"

namespace jumpsde {

struct FiberParams {
  double sigma = 0.0;
  std::array<double, 5> gammas{1.0, 0.0, 0.0, 0.0, 0.0};
  double alpha = 1.5;
  double z_minus = 8.0;
  double z_plus = 8.0;
  double T_star = 0.2;
  double q = 1.5;
  double theta0 = 0.0;
  double T = 1.0;
  bool jumps = true;  // false gives the Gaussian control driven by b dW

  double b_squared(double th) const {
    const auto& g = gammas;
    return g[0] + g[1] * std::sin(2 * th) + g[2] * std::sin(4 * th) + g[3] * std::cos(2 * th) +
           g[4] * std::cos(4 * th);
  }
  double b_squared_d1(double th) const {
    const auto& g = gammas;
    return 2 * g[1] * std::cos(2 * th) + 4 * g[2] * std::cos(4 * th) - 2 * g[3] * std::sin(2 * th) -
           4 * g[4] * std::sin(4 * th);
  }
  double b_squared_d2(double th) const {
    const auto& g = gammas;
    return -4 * g[1] * std::sin(2 * th) - 16 * g[2] * std::sin(4 * th) -
           4 * g[3] * std::cos(2 * th) - 16 * g[4] * std::cos(4 * th);
  }
  double shear_drift(double th) const { return 0.5 * sigma * (std::cos(2 * th) - 1.0); }

  void validate() const {
    require(sigma >= 0.0, "FiberParams: sigma must be >= 0");
    require(alpha > 0.0 && alpha < 2.0, "FiberParams: alpha must lie in (0, 2)");
    require(z_minus >= 0.0 && z_plus >= 0.0 && z_minus + z_plus > 0.0,
            "FiberParams: z_minus, z_plus must be >= 0 with a nonempty support");
    require(T_star > 0.0, "FiberParams: T_star must be positive");
    require(q > 1.0, "FiberParams: q must be > 1");
    require(T > 0.0, "FiberParams: T must be positive");
    constexpr int kProbes = 10000;
    for (int k = 0; k < kProbes; ++k) {
      const double th = std::numbers::pi * k / kProbes;  // b^2 has period pi
      if (b_squared(th) < 0.0) {
        throw PreconditionError("FiberParams: diffusion polynomial is negative at theta=" +
                                std::to_string(th));
      }
    }
  }

  CompensatorKernel kernel() const {
    return CompensatorKernel::power_law(PowerLawShape(alpha, z_minus, z_plus),
                                        TimeProfile::capped_power(T_star, q - 1.0));
  }
};

inline SdeModel build_fiber_model(const FiberParams& params) {
  params.validate();
  RateHypotheses rate;
  rate.gamma = 1.0;
  rate.zeta = 1.0;
  auto b = [params](double, double th) { return std::sqrt(std::max(0.0, params.b_squared(th))); };
  if (!params.jumps) {
    auto drift = [params](double, double th) {
      return params.shear_drift(th) + 0.25 * params.b_squared_d1(th);
    };
    auto off = CompensatorKernel::power_law(PowerLawShape(params.alpha, 1.0, 1.0),
                                            TimeProfile::constant(0.0));
    return make_multiplicative_model("fiber_gaussian_control", drift, b,
                                     MultiplicativeJump{[](double, double) { return 0.0; }},
                                     std::move(off), params.theta0, params.T, rate);
  }
  auto drift = [params](double, double th) {
    return params.shear_drift(th) + 0.25 * params.b_squared_d2(th);
  };
  return make_multiplicative_model("fiber", drift, {}, MultiplicativeJump{b}, params.kernel(),
                                   params.theta0, params.T, rate);
}

/// Var(L_t) by quadrature of kappa over [0, t] times the z^2 moment of the shape.
inline std::vector<double> noise_variance_curve(const FiberParams& params,
                                                std::span<const double> t_grid) {
  params.validate();
  const PowerLawShape shape(params.alpha, params.z_minus, params.z_plus);
  const double inf = std::numeric_limits<double>::infinity();
  const double moment = shape.negative_moment(0.0, inf, 2.0) + shape.positive_moment(0.0, inf, 2.0);
  const auto kappa = TimeProfile::capped_power(params.T_star, params.q - 1.0);
  std::vector<double> out;
  out.reserve(t_grid.size());
  for (double t : t_grid) {
    require(t >= 0.0 && t <= params.T, "noise_variance_curve: time outside [0, T]");
    // Breakpoint at T* where kappa has a kink.
    std::vector<double> breaks{0.0};
    if (t > params.T_star) breaks.push_back(params.T_star);
    breaks.push_back(t);
    out.push_back(moment * quad::integrate([&](double s) { return kappa(s); }, breaks).value);
  }
  return out;
}

inline constexpr int kFiberBins = 401;
inline constexpr double kFiberRange = 10.0;

struct FiberSnapshot {
  double t = 0.0;
  double mean = 0.0;
  double variance = 0.0;
  double variance_half_width = 0.0;
  double skewness = 0.0;
  double excess_kurtosis = 0.0;
  std::vector<double> density;  // kFiberBins values on [-kFiberRange, kFiberRange]
};

struct FiberReport {
  std::vector<double> bin_centers;
  std::vector<FiberSnapshot> snapshots;
  std::uint64_t paths = 0;
  std::uint64_t excluded_paths = 0;
};

/// Simulates delta theta_t = theta_t - theta_0 with the substitute scheme and
/// reports moments plus a histogram of delta theta_t / sd(delta theta_t) per
/// snapshot time (snapshots must be grid times).
inline FiberReport run_fiber_pdf(const FiberParams& params, SchemeConfig config,
                                 std::uint64_t mc_paths, std::span<const double> snapshot_times,
                                 std::uint64_t seed, int threads = 0) {
  require(mc_paths >= 10000, "run_fiber_pdf: need at least 1e4 paths");
  config.T = params.T;
  config.variant = Variant::with_substitute;
  const SdeModel model = build_fiber_model(params);
  const SchemeStepper stepper(model, config);
  std::vector<int> snap_index;
  for (double t : snapshot_times) {
    const int k = config.rho(t);
    require(std::abs(config.time(k) - t) <= 1e-12 * std::max(1.0, t) && k > 0,
            "run_fiber_pdf: snapshot " + std::to_string(t) + " is not a positive grid time");
    snap_index.push_back(k);
  }
  const std::size_t ns = snap_index.size();
  std::vector<double> values(mc_paths * ns, 0.0);
  std::vector<char> ok(mc_paths, 1);
  NoiseOptions opts;
  opts.brownian = model.has_diffusion();
  constexpr std::uint64_t kChunk = 256;
  run_chunks<int>(mc_paths, threads, kChunk, [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<double> grid;
    bool divergent = false;
    for (std::uint64_t p = begin; p < end; ++p) {
      const auto noise = generate_noise(model.kernel, config, seed, p, opts);
      stepper.simulate_into(noise, grid, divergent);
      if (divergent) {
        ok[p] = 0;
        continue;
      }
      for (std::size_t s = 0; s < ns; ++s) values[p * ns + s] = grid[snap_index[s]] - params.theta0;
    }
    return 0;
  });
  FiberReport report;
  report.paths = mc_paths;
  for (char f : ok) report.excluded_paths += f ? 0 : 1;
  if (report.excluded_paths * 10000 > mc_paths) {
    throw DivergenceError("run_fiber_pdf: " + std::to_string(report.excluded_paths) +
                          " divergent paths exceed 0.01%");
  }
  const double width = 2.0 * kFiberRange / kFiberBins;
  for (int b = 0; b < kFiberBins; ++b) report.bin_centers.push_back(-kFiberRange + (b + 0.5) * width);
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<double> v;
    v.reserve(mc_paths);
    for (std::uint64_t p = 0; p < mc_paths; ++p) {
      if (ok[p]) v.push_back(values[p * ns + s]);
    }
    const auto mom = sample_moments(v);
    if (!(mom.variance > 0.0)) {
      throw PreconditionError("run_fiber_pdf: zero variance at snapshot " +
                              std::to_string(snapshot_times[s]));
    }
    FiberSnapshot snap;
    snap.t = snapshot_times[s];
    snap.mean = mom.mean;
    snap.variance = mom.variance;
    snap.skewness = mom.skewness;
    snap.excess_kurtosis = mom.excess_kurtosis;
    // Half-width of the variance estimate from the fourth central moment.
    const double m4 = (mom.excess_kurtosis + 3.0) * mom.variance * mom.variance;
    snap.variance_half_width =
        1.96 * std::sqrt(std::max(0.0, m4 - mom.variance * mom.variance) / v.size());
    const double sd = std::sqrt(mom.variance);
    snap.density.assign(kFiberBins, 0.0);
    for (double x : v) {
      const double r = x / sd;
      const double pos = (r + kFiberRange) / width;
      if (pos >= 0.0 && pos < kFiberBins) snap.density[static_cast<std::size_t>(pos)] += 1.0;
    }
    for (double& d : snap.density) d /= (static_cast<double>(v.size()) * width);
    report.snapshots.push_back(std::move(snap));
  }
  return report;
}

}  // namespace jumpsde
