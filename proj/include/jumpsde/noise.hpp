#pragma once

// Per-path randomness: Brownian increments, substitute Gaussians, jump times of
// the Poisson process of jumps larger than eps, and their conditional sizes.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "jumpsde/error.hpp"
#include "jumpsde/grid.hpp"
#include "jumpsde/measure.hpp"
#include "jumpsde/quadrature.hpp"
#include "jumpsde/random.hpp"

namespace jumpsde {

struct NoiseRealization {
  std::vector<double> brownian_increments;
  std::vector<double> substitute_gaussians;
  std::vector<double> jump_times;
  std::vector<double> jump_sizes;
  std::vector<int> jump_steps;  // i such that jump_times[j] lies in (t_{i-1}, t_i]
  double eps = 0.0;
  double T = 1.0;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  int grid_n = 0;

  bool operator==(const NoiseRealization&) const = default;
};

enum class JumpTimeMethod { timechange, thinning };

struct NoiseOptions {
  JumpTimeMethod method = JumpTimeMethod::timechange;
  double lambda_star = 0.0;  // thinning bound
  bool brownian = true;      // false leaves zero increments (b == 0 models)
  bool substitute = true;    // false leaves zero substitute Gaussians
};

/// s -> Lambda^eps(0, s) and its inverse on [0, T]. Factorised kernels use the
/// time profile's antiderivative; other kernels tabulate Lambda on 512 cells and
/// refine inside a cell by bisection on Simpson integrals.
class IntensityClock {
 public:
  IntensityClock(const CompensatorKernel& kernel, double eps, double T)
      : kernel_(&kernel), eps_(eps), T_(T) {
    require(T > 0.0, "IntensityClock: T must be positive");
    if (kernel.factorised()) {
      mass_ = shape_tail_mass(kernel, eps);
      total_ = mass_ == 0.0 ? 0.0 : mass_ * kernel.time_factor()->integral(0.0, T);
    } else {
      constexpr int kCells = 512;
      nodes_.resize(kCells + 1);
      cumulative_.assign(kCells + 1, 0.0);
      for (int k = 0; k <= kCells; ++k) nodes_[k] = T * k / kCells;
      for (int k = 1; k <= kCells; ++k) {
        cumulative_[k] = cumulative_[k - 1] + cumulative_intensity(kernel, eps, nodes_[k - 1], nodes_[k]);
      }
      total_ = cumulative_.back();
    }
    if (!std::isfinite(total_)) throw DomainError("cumulative intensity is infinite on [0, T]");
  }

  double total() const { return total_; }

  /// Smallest t in [0, T] with Lambda(0, t) >= s.
  double inverse(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= total_) return T_;
    if (kernel_->factorised()) return kernel_->time_factor()->inverse_integral(0.0, s / mass_, T_);
    const auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), s);
    const auto cell = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - cumulative_.begin(), 1));
    const double base = cumulative_[cell - 1];
    const double left = nodes_[cell - 1];
    return quad::bisect_increasing(
        [&](double t) { return base + cumulative_intensity(*kernel_, eps_, left, t); }, s, left,
        nodes_[cell], 1e-12);
  }

 private:
  const CompensatorKernel* kernel_;
  double eps_;
  double T_;
  double mass_ = 0.0;
  double total_ = 0.0;
  std::vector<double> nodes_;
  std::vector<double> cumulative_;
};

/// Unit-rate arrivals on [0, Lambda(0,T)] mapped through the inverse clock.
inline std::vector<double> sample_jump_times_timechange(const CompensatorKernel& kernel, double eps,
                                                        double T, RandomStream& stream) {
  const IntensityClock clock(kernel, eps, T);
  std::vector<double> times;
  if (clock.total() == 0.0) return times;
  double s = stream.exponential();
  while (s <= clock.total()) {
    const double t = clock.inverse(s);
    if (t > 0.0 && (times.empty() || t > times.back())) times.push_back(t);
    s += stream.exponential();
  }
  return times;
}

/// Rate-lambda_star proposals from `proposals`, accepted with probability
/// lambda^eps(t)/lambda_star using uniforms from `acceptance`.
inline std::vector<double> sample_jump_times_thinning(const CompensatorKernel& kernel, double eps,
                                                      double T, double lambda_star,
                                                      RandomStream& proposals,
                                                      RandomStream& acceptance) {
  require(lambda_star > 0.0 && std::isfinite(lambda_star),
          "thinning: lambda_star must be positive and finite");
  constexpr int kChecks = 1024;
  for (int k = 0; k < kChecks; ++k) {
    const double t = T * k / (kChecks - 1);
    const double lam = tail_intensity(kernel, t, eps);
    if (!(lam <= lambda_star)) {
      throw PreconditionError("thinning: intensity " + std::to_string(lam) + " at t=" +
                              std::to_string(t) + " exceeds lambda_star " +
                              std::to_string(lambda_star));
    }
  }
  std::vector<double> times;
  double t = proposals.exponential() / lambda_star;
  while (t <= T) {
    const double u = acceptance.uniform();
    if (u * lambda_star <= tail_intensity(kernel, t, eps)) times.push_back(t);
    t += proposals.exponential() / lambda_star;
  }
  return times;
}

/// One conditional size per jump time, via the quantile of a (0,1] uniform.
inline std::vector<double> sample_jump_sizes(const CompensatorKernel& kernel, double eps,
                                             std::span<const double> jump_times,
                                             RandomStream& stream) {
  std::vector<double> sizes;
  if (jump_times.empty()) return sizes;
  const JumpSizeSampler sampler(kernel, eps);
  sizes.reserve(jump_times.size());
  for (double t : jump_times) sizes.push_back(sampler(t, stream.uniform()));
  return sizes;
}

inline NoiseRealization generate_noise(const CompensatorKernel& kernel, const SchemeConfig& config,
                                       std::uint64_t master_seed, std::uint64_t path_index,
                                       const NoiseOptions& options = {}) {
  config.validate();
  NoiseRealization out;
  out.eps = config.eps;
  out.T = config.T;
  out.seed = master_seed;
  out.path_index = path_index;
  out.grid_n = config.n;
  auto stream = [&](Substream tag) { return RandomStream(SeedStream{master_seed, path_index, tag}); };

  out.brownian_increments.assign(config.n, 0.0);
  if (options.brownian) {
    auto s = stream(Substream::brownian);
    s.fill_normal(out.brownian_increments, std::sqrt(config.step()));
  }
  out.substitute_gaussians.assign(config.n, 0.0);
  if (options.substitute) {
    auto s = stream(Substream::substitute);
    s.fill_normal(out.substitute_gaussians);
  }

  auto times_stream = stream(Substream::jump_times);
  if (options.method == JumpTimeMethod::thinning) {
    auto accept_stream = stream(Substream::thinning);
    out.jump_times = sample_jump_times_thinning(kernel, config.eps, config.T, options.lambda_star,
                                                times_stream, accept_stream);
  } else {
    out.jump_times = sample_jump_times_timechange(kernel, config.eps, config.T, times_stream);
  }
  auto sizes_stream = stream(Substream::jump_sizes);
  out.jump_sizes = sample_jump_sizes(kernel, config.eps, out.jump_times, sizes_stream);
  out.jump_steps.reserve(out.jump_times.size());
  for (double t : out.jump_times) out.jump_steps.push_back(config.step_of(t));
  return out;
}

/// Noise for a grid m times coarser. Brownian increments are summed per block;
/// substitute Gaussians are combined as sum_i sqrt(w_i) xi_i / sqrt(sum_i w_i),
/// where w_i is the small-jump variance weight of fine step i (uniform when
/// `weights` is empty), so sqrt(W) xi_coarse equals the fine-grid sum.
inline NoiseRealization aggregate_to_coarser_grid(const NoiseRealization& noise, int m,
                                                  std::span<const double> weights = {}) {
  require(m >= 1 && (m & (m - 1)) == 0, "aggregate: factor must be a power of two");
  require(noise.grid_n % m == 0, "aggregate: factor does not divide grid_n");
  require(weights.empty() || weights.size() == static_cast<std::size_t>(noise.grid_n),
          "aggregate: weights must have one entry per fine step");
  if (m == 1) return noise;
  NoiseRealization out;
  out.eps = noise.eps;
  out.T = noise.T;
  out.seed = noise.seed;
  out.path_index = noise.path_index;
  out.grid_n = noise.grid_n / m;
  out.brownian_increments.assign(out.grid_n, 0.0);
  out.substitute_gaussians.assign(out.grid_n, 0.0);
  for (int k = 0; k < out.grid_n; ++k) {
    double dw = 0.0;
    double weighted = 0.0;
    double wsum = 0.0;
    double plain = 0.0;
    for (int j = k * m; j < (k + 1) * m; ++j) {
      dw += noise.brownian_increments[j];
      plain += noise.substitute_gaussians[j];
      if (!weights.empty()) {
        weighted += std::sqrt(weights[j]) * noise.substitute_gaussians[j];
        wsum += weights[j];
      }
    }
    out.brownian_increments[k] = dw;
    out.substitute_gaussians[k] = wsum > 0.0 ? weighted / std::sqrt(wsum) : plain / std::sqrt(m);
  }
  out.jump_times = noise.jump_times;
  out.jump_sizes = noise.jump_sizes;
  out.jump_steps.reserve(noise.jump_steps.size());
  for (int s : noise.jump_steps) out.jump_steps.push_back((s + m - 1) / m);
  return out;
}

}  // namespace jumpsde
