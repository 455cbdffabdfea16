#pragma once

// The eps-Euler-Maruyama schemes on the uniform grid t_i = i T / n:
//
//   x_i = x + a(t_{i-1}, x) dt - C_i(x) + b(t_{i-1}, x) dW_i
//           + sqrt(V_i(x)) xi_i + sum_{T_j in (t_{i-1}, t_i]} c(T_j, x, Z_j)
//
// with x = x_{i-1}, C_i the large-jump compensator integrated once over the
// step and V_i the small-jump variance over the step. The variant without
// substitute drops the xi term; the Euler-Peano variant is the substitute
// scheme run at reference parameters.

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "jumpsde/error.hpp"
#include "jumpsde/grid.hpp"
#include "jumpsde/model.hpp"
#include "jumpsde/noise.hpp"

namespace jumpsde {

struct JumpRecord {
  int step = 0;
  double time = 0.0;
  double size = 0.0;
  double increment = 0.0;

  bool operator==(const JumpRecord&) const = default;
};

struct Path {
  std::vector<double> grid_values;
  std::vector<JumpRecord> jump_log;
  SchemeConfig config;
  bool divergent = false;
};

/// Per-configuration stepping engine. Construction precomputes every per-step
/// factor that does not depend on the state; stepping is then allocation-free.
class SchemeStepper {
 public:
  SchemeStepper(const SdeModel& model, const SchemeConfig& config)
      : model_(&model), config_(config) {
    config.validate();
    if (config.eps == 0.0) {
      require(model.kernel.finite_activity(),
              "eps = 0 is only allowed for finite-activity kernels");
    }
    const int n = config.n;
    const bool factorised = model.kernel.factorised();
    fast_multiplicative_ = model.multiplicative && factorised &&
                           model.multiplicative->time_homogeneous_scale;
    fast_arctan_ = detail::arctan_closed_form(model, config.eps) ||
                   (model.family == JumpFamily::arctan && config.eps == 0.0);
    if (factorised) {
      step_mass_.resize(n);
      for (int i = 1; i <= n; ++i) {
        step_mass_[i - 1] = model.kernel.time_factor()->integral(config.time(i - 1), config.time(i));
      }
    }
    if (fast_multiplicative_) {
      const double mean = profile_outside_mean(model, config.eps);
      const double second = profile_inside_moment(model, config.eps, 2.0);
      compensator_.resize(n);
      sqrt_variance_.resize(n);
      for (int i = 0; i < n; ++i) {
        compensator_[i] = step_mass_[i] * mean;
        sqrt_variance_[i] = std::sqrt(step_mass_[i] * second);
      }
    }
  }

  const SchemeConfig& config() const { return config_; }
  const SdeModel& model() const { return *model_; }

  /// Large-jump compensator over step i at frozen state x.
  double compensator(int i, double x) const {
    if (model_->jump_compensator_vanishes()) return 0.0;
    if (fast_multiplicative_) return model_->multiplicative->scale(config_.time(i - 1), x) * compensator_[i - 1];
    return large_jump_compensator(*model_, config_.eps, x, config_.time(i - 1), config_.time(i));
  }

  /// Small-jump variance over step i at frozen state x.
  double variance(int i, double x) const {
    if (fast_multiplicative_) {
      const double s = model_->multiplicative->scale(config_.time(i - 1), x) * sqrt_variance_[i - 1];
      return s * s;
    }
    if (fast_arctan_) {
      return config_.eps == 0.0 ? 0.0 : step_mass_[i - 1] * arctan_square_integral(config_.eps * x);
    }
    return small_jump_variance(*model_, config_.eps, x, config_.time(i - 1), config_.time(i));
  }

  /// sqrt(variance) without squaring and rooting the scale on the fast path.
  double substitute_scale(int i, double x) const {
    if (fast_multiplicative_) {
      return std::abs(model_->multiplicative->scale(config_.time(i - 1), x)) * sqrt_variance_[i - 1];
    }
    return std::sqrt(variance(i, x));
  }

  /// Weights w_i of the substitute Gaussians used when aggregating this grid's
  /// noise: the state-free part of the small-jump variance of each step.
  std::vector<double> substitute_weights() const {
    if (!step_mass_.empty()) return step_mass_;
    std::vector<double> w(config_.n, 1.0);
    if (model_->multiplicative && config_.eps > 0.0) {
      const auto& profile = model_->multiplicative->profile;
      for (int i = 1; i <= config_.n; ++i) {
        w[i - 1] = quad::integrate_2d(
                       [&](double s, double z) {
                         const double f = profile(z);
                         return f * f * model_->kernel.density(s, z);
                       },
                       config_.time(i - 1), config_.time(i),
                       model_->kernel.breakpoints(config_.eps, Region::inside))
                       .value;
      }
    }
    return w;
  }

  /// One step from x_prev over (t_{i-1}, t_i]. `cursor` indexes the first jump
  /// not yet applied and is advanced past the jumps of this step.
  double step(int i, double x, const NoiseRealization& noise, std::size_t& cursor,
              Variant variant, std::vector<JumpRecord>* log = nullptr) const {
    const double t = config_.time(i - 1);
    const double dt = config_.time(i) - t;
    double next = x + model_->a(t, x) * dt - compensator(i, x);
    if (model_->diffusion) next += model_->b(t, x) * noise.brownian_increments[i - 1];
    if (variant != Variant::without_substitute) {
      const double xi = noise.substitute_gaussians[i - 1];
      if (xi != 0.0) next += substitute_scale(i, x) * xi;
    }
    while (cursor < noise.jump_steps.size() && noise.jump_steps[cursor] == i) {
      const double inc = model_->c(noise.jump_times[cursor], x, noise.jump_sizes[cursor]);
      next += inc;
      if (log) log->push_back({i, noise.jump_times[cursor], noise.jump_sizes[cursor], inc});
      ++cursor;
    }
    return next;
  }

  /// Full path from x0. Non-finite states stop the path and flag it divergent.
  Path simulate(const NoiseRealization& noise, bool record_jumps = false) const {
    Path path;
    path.config = config_;
    simulate_into(noise, path.grid_values, path.divergent, record_jumps ? &path.jump_log : nullptr);
    return path;
  }

  /// Allocation-reusing variant of simulate(); returns false on divergence.
  bool simulate_into(const NoiseRealization& noise, std::vector<double>& values, bool& divergent,
                     std::vector<JumpRecord>* log = nullptr) const {
    check_noise(noise);
    const int n = config_.n;
    values.resize(static_cast<std::size_t>(n) + 1);
    values[0] = model_->x0;
    std::size_t cursor = 0;
    divergent = false;
    double x = model_->x0;
    for (int i = 1; i <= n; ++i) {
      x = step(i, x, noise, cursor, config_.variant, log);
      if (!std::isfinite(x)) {
        divergent = true;
        for (int k = i; k <= n; ++k) values[k] = x;
        return false;
      }
      values[i] = x;
    }
    return true;
  }

 private:
  void check_noise(const NoiseRealization& noise) const {
    require(noise.grid_n == config_.n, "noise grid does not match the scheme grid");
    require(noise.eps == config_.eps, "noise eps does not match the scheme eps");
    require(noise.brownian_increments.size() == static_cast<std::size_t>(config_.n) &&
                noise.substitute_gaussians.size() == static_cast<std::size_t>(config_.n),
            "noise arrays have the wrong length");
  }

  const SdeModel* model_;
  SchemeConfig config_;
  bool fast_multiplicative_ = false;
  bool fast_arctan_ = false;
  std::vector<double> step_mass_;  // integral of the time factor over each step
  std::vector<double> compensator_;
  std::vector<double> sqrt_variance_;
};

inline double step_with_substitute(const SdeModel& model, const SchemeConfig& config, int i,
                                   double x_prev, const NoiseRealization& noise) {
  require(i >= 1 && i <= config.n, "step index out of range");
  const SchemeStepper stepper(model, config);
  std::size_t cursor = 0;
  while (cursor < noise.jump_steps.size() && noise.jump_steps[cursor] < i) ++cursor;
  return stepper.step(i, x_prev, noise, cursor, Variant::with_substitute);
}

inline double step_without_substitute(const SdeModel& model, const SchemeConfig& config, int i,
                                      double x_prev, const NoiseRealization& noise) {
  require(i >= 1 && i <= config.n, "step index out of range");
  const SchemeStepper stepper(model, config);
  std::size_t cursor = 0;
  while (cursor < noise.jump_steps.size() && noise.jump_steps[cursor] < i) ++cursor;
  return stepper.step(i, x_prev, noise, cursor, Variant::without_substitute);
}

/// Frozen-coefficient reference step; realised as the substitute scheme.
inline double step_euler_peano(const SdeModel& model, const SchemeConfig& config, int i,
                               double x_prev, const NoiseRealization& noise_fine) {
  return step_with_substitute(model, config, i, x_prev, noise_fine);
}

/// Simulates on config's grid. Finer noise is aggregated first, which needs a
/// multiplicative jump coefficient.
inline Path simulate_path(const SdeModel& model, const SchemeConfig& config,
                          const NoiseRealization& noise, bool record_jumps = false) {
  const SchemeStepper stepper(model, config);
  if (noise.grid_n == config.n) return stepper.simulate(noise, record_jumps);
  require(model.multiplicative.has_value(),
          "simulating from finer noise needs a multiplicative jump coefficient");
  require(noise.grid_n % config.n == 0, "noise grid is not a refinement of the scheme grid");
  SchemeConfig fine = config;
  fine.n = noise.grid_n;
  const auto weights = SchemeStepper(model, fine).substitute_weights();
  const auto coarse = aggregate_to_coarser_grid(noise, noise.grid_n / config.n, weights);
  return stepper.simulate(coarse, record_jumps);
}

/// Reference path on config_ref's grid and coarse path on aggregated noise.
inline std::pair<Path, Path> simulate_coupled_pair(const SdeModel& model,
                                                   const SchemeConfig& config_coarse,
                                                   const SchemeConfig& config_ref,
                                                   const NoiseRealization& shared_noise) {
  require(model.multiplicative.has_value(), "coupled pair needs a multiplicative jump coefficient");
  require(config_ref.n % config_coarse.n == 0, "reference grid must refine the coarse grid");
  require(config_ref.eps == config_coarse.eps, "coupled pair needs a common eps");
  require(config_ref.T == config_coarse.T, "coupled pair needs a common horizon");
  Path ref = simulate_path(model, config_ref, shared_noise);
  Path coarse = simulate_path(model, config_coarse, shared_noise);
  return {std::move(ref), std::move(coarse)};
}

/// sup_k |coarse(t_k) - reference(t_k)| over the coarse grid.
inline double sup_distance(std::span<const double> coarse, std::span<const double> reference) {
  require(coarse.size() >= 2 && reference.size() >= coarse.size() &&
              (reference.size() - 1) % (coarse.size() - 1) == 0,
          "sup_distance: reference grid must refine the coarse grid");
  const std::size_t m = (reference.size() - 1) / (coarse.size() - 1);
  double sup = 0.0;
  for (std::size_t k = 0; k < coarse.size(); ++k) {
    sup = std::max(sup, std::abs(coarse[k] - reference[k * m]));
  }
  return sup;
}

}  // namespace jumpsde
