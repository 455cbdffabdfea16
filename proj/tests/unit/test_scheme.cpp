#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "jumpsde/presets.hpp"
#include "jumpsde/scheme.hpp"

using namespace jumpsde;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const auto kOddZ = JumpProfile::monomial(1.0, true);

NoiseRealization zero_noise(int n, double eps, double T = 1.0) {
  NoiseRealization z;
  z.brownian_increments.assign(n, 0.0);
  z.substitute_gaussians.assign(n, 0.0);
  z.eps = eps;
  z.T = T;
  z.grid_n = n;
  return z;
}

SdeModel drift_only(TimeStateFn a) {
  return make_general_model("drift", std::move(a), {}, [](double, double, double) { return 0.0; },
                            TruncatedStableSpec{0.5, 1.0, std::nullopt, std::nullopt}.kernel(), 0.0, 1.0,
                            {});
}

}  // namespace

TEST_CASE("single steps") {
  const SchemeConfig cfg{4, 0.1, 1.0};
  const auto noise = zero_noise(4, 0.1);
  CHECK(step_with_substitute(drift_only({}), cfg, 2, 1.3, noise) == 1.3);
  CHECK(step_with_substitute(drift_only([](double, double) { return 1.0; }), cfg, 2, 1.3, noise) ==
        1.3 + 0.25);
  const auto linear = drift_only([](double, double x) { return -2.0 * x; });
  CHECK_THAT(step_without_substitute(linear, cfg, 3, 2.0, noise), WithinRel(2.0 * (1.0 - 2.0 * 0.25), 1e-15));
}

TEST_CASE("a step with one large jump and no Gaussian draws") {
  // Asymmetric kernel so the compensator does not vanish.
  const auto kernel = CompensatorKernel::power_law(PowerLawShape(0.5, 0.5, 1.0));
  const auto m = make_multiplicative_model(
      "asym", [](double, double x) { return std::cos(x); }, {},
      MultiplicativeJump{[](double, double x) { return std::sin(x); }, kOddZ}, kernel, 0.0, 1.0, {});
  const SchemeConfig cfg{8, 0.1, 1.0};
  auto noise = zero_noise(8, 0.1);
  noise.jump_times = {0.3};
  noise.jump_sizes = {0.7};
  noise.jump_steps = {cfg.step_of(0.3)};
  REQUIRE(noise.jump_steps[0] == 3);
  const double x = 0.8;
  // int_{|z| > eps} z |z|^{-3/2} dz over [-1/2, 1]: 2 (1 - eps^{1/2}) - 2 (1/2^{1/2} - eps^{1/2}).
  const double mean = 2.0 * (1.0 - std::sqrt(0.1)) - 2.0 * (std::sqrt(0.5) - std::sqrt(0.1));
  const double expected = x + (std::cos(x) - std::sin(x) * mean) * 0.125 + std::sin(x) * 0.7;
  CHECK_THAT(step_with_substitute(m, cfg, 3, x, noise), WithinRel(expected, 1e-12));
  CHECK_THAT(step_with_substitute(m, cfg, 2, x, noise), WithinRel(x + (std::cos(x) - std::sin(x) * mean) * 0.125, 1e-12));
}

TEST_CASE("substitute and plain steps differ by sqrt(variance) xi") {
  const auto m = make_preset("weak_multiplicative").model;
  const SchemeConfig cfg{16, 0.2, 1.0};
  const auto noise = generate_noise(m.kernel, cfg, 31, 0);
  const SchemeStepper stepper(m, cfg);
  for (int i = 1; i <= 16; ++i) {
    for (double x : {-3.0, 0.4, 10.0}) {
      const double with = step_with_substitute(m, cfg, i, x, noise);
      const double without = step_without_substitute(m, cfg, i, x, noise);
      CHECK_THAT(with - without,
                 WithinAbs(std::sqrt(stepper.variance(i, x)) * noise.substitute_gaussians[i - 1], 1e-12));
    }
  }
}

TEST_CASE("zero substitute variance makes the variants agree") {
  // Profile vanishing on B(eps).
  const double eps = 0.3;
  const auto profile = JumpProfile::custom([eps](double z) { return std::abs(z) > eps ? z : 0.0; }, true);
  const auto m = make_multiplicative_model(
      "outside_only", [](double, double x) { return -x; }, {},
      MultiplicativeJump{[](double, double x) { return std::cos(x); }, profile},
      TruncatedStableSpec{1.0, 1.0, std::nullopt, std::nullopt}.kernel(), 0.5, 1.0, {});
  const SchemeConfig cfg{8, eps, 1.0};
  const auto noise = generate_noise(m.kernel, cfg, 32, 0);
  for (int i = 1; i <= 8; ++i) {
    CHECK(step_with_substitute(m, cfg, i, 0.7, noise) == step_without_substitute(m, cfg, i, 0.7, noise));
  }
}

TEST_CASE("finite activity at eps = 0 is the classical jump-Euler step") {
  const auto kernel = CompensatorKernel::power_law(PowerLawShape(-1.0, 1.0, 1.0));  // uniform on [-1, 1]
  const auto m = make_multiplicative_model(
      "uniform", [](double, double x) { return 0.5 * x; }, {},
      MultiplicativeJump{[](double, double x) { return x; }, kOddZ}, kernel, 1.0, 1.0, {});
  const SchemeConfig cfg{10, 0.0, 1.0};
  const auto noise = generate_noise(m.kernel, cfg, 33, 0);
  REQUIRE_FALSE(noise.jump_times.empty());
  const auto path = simulate_path(m, cfg, noise);
  double x = 1.0;
  std::size_t j = 0;
  for (int i = 1; i <= 10; ++i) {
    double next = x + 0.5 * x * 0.1;
    while (j < noise.jump_times.size() && noise.jump_steps[j] == i) next += x * noise.jump_sizes[j++];
    x = next;
    CHECK_THAT(path.grid_values[i], WithinAbs(x, 1e-13));
  }
}

TEST_CASE("Euler-Peano at reference parameters is the substitute scheme") {
  const auto m = make_preset("strong_p_sweep").model;
  const SchemeConfig cfg{64, 1.0 / 64, 1.0};
  const auto noise = generate_noise(m.kernel, cfg, 34, 0);
  for (int i = 1; i <= 64; i += 7) {
    CHECK(step_euler_peano(m, cfg, i, 0.3, noise) == step_with_substitute(m, cfg, i, 0.3, noise));
  }
}

TEST_CASE("coarse paths from aggregated noise satisfy the Chasles identity", "[property]") {
  // Time-modulated kernel with a Brownian part, so every noise component moves.
  const double rho = -0.5;
  const auto kernel = TruncatedStableSpec{0.5, 1.0, TimeProfile::power(rho), std::nullopt}.kernel();
  const auto asym = CompensatorKernel::power_law(PowerLawShape(0.5, 0.6, 1.0), TimeProfile::power(rho));
  for (const auto* k : {&kernel, &asym}) {
    const auto m = make_multiplicative_model(
        "chasles", [](double t, double x) { return std::cos(x) + t; },
        [](double, double x) { return 0.3 + 0.1 * std::sin(x); },
        MultiplicativeJump{[](double, double x) { return std::sin(x); }, kOddZ}, *k, 0.2, 1.0, {});
    const int fine_n = 64;
    const int m_factor = 8;
    const double eps = 0.05;
    const SchemeConfig fine{fine_n, eps, 1.0};
    const SchemeConfig coarse{fine_n / m_factor, eps, 1.0};
    const auto noise = generate_noise(m.kernel, fine, 35, 0);
    const auto path = simulate_path(m, coarse, noise);

    const SchemeStepper fine_stepper(m, fine);
    double x = m.x0;
    std::size_t j = 0;
    for (int k = 1; k <= coarse.n; ++k) {
      // Sum the fine contributions over the block with the state frozen at the
      // coarse left endpoint; the drift is evaluated at the coarse left time.
      const double t = coarse.time(k - 1);
      double next = x + m.a(t, x) * coarse.step();
      double variance = 0.0;
      double gauss = 0.0;
      double dw = 0.0;
      for (int i = (k - 1) * m_factor + 1; i <= k * m_factor; ++i) {
        next -= fine_stepper.compensator(i, x);
        variance += fine_stepper.variance(i, x);
        gauss += fine_stepper.substitute_scale(i, x) * noise.substitute_gaussians[i - 1];
        dw += noise.brownian_increments[i - 1];
      }
      next += m.b(t, x) * dw + gauss;
      CHECK(variance >= 0.0);
      while (j < noise.jump_times.size() && noise.jump_times[j] <= coarse.time(k)) {
        next += std::sin(x) * noise.jump_sizes[j++];
      }
      x = next;
      CHECK_THAT(path.grid_values[k], WithinAbs(x, 1e-12));
    }
  }
}

TEST_CASE("paths", "[property]") {
  SECTION("constant path under zero noise and zero drift") {
    const auto m = drift_only({});
    const auto path = simulate_path(m, SchemeConfig{1, 0.1, 1.0}, zero_noise(1, 0.1));
    CHECK(path.grid_values == std::vector<double>{0.0, 0.0});
  }
  SECTION("bit-identical reruns") {
    const auto m = make_preset("low_integrability", {{"rho", -0.75}}).model;
    const SchemeConfig cfg{128, 0.01, 1.0};
    const auto a = simulate_path(m, cfg, generate_noise(m.kernel, cfg, 36, 5), true);
    const auto b = simulate_path(m, cfg, generate_noise(m.kernel, cfg, 36, 5), true);
    CHECK(a.grid_values == b.grid_values);
    CHECK(a.jump_log == b.jump_log);
  }
  SECTION("subordinator paths are positive and non-decreasing without the substitute") {
    // Net drift is x times the small-jump first moment and every jump is upward.
    const auto m = make_preset("subordinator_lower_bound").model;
    const SchemeConfig cfg{256, 1.0 / 256, 1.0, Variant::without_substitute};
    for (int p = 0; p < 50; ++p) {
      const auto path = simulate_path(m, cfg, generate_noise(m.kernel, cfg, 37, p));
      for (std::size_t k = 1; k < path.grid_values.size(); ++k) {
        REQUIRE(path.grid_values[k] > 0.0);
        REQUIRE(path.grid_values[k] >= path.grid_values[k - 1]);
      }
    }
  }
  SECTION("finer grids track the shared fine noise more closely") {
    const auto m = make_preset("strong_p_sweep").model;
    const int n_ref = 1 << 13;
    const SchemeConfig ref{n_ref, 1.0 / n_ref, 1.0};
    double sum9 = 0.0;
    double sum10 = 0.0;
    for (int seed = 0; seed < 100; ++seed) {
      const auto noise = generate_noise(m.kernel, ref, 38, seed);
      const auto [fine_path, c9] = simulate_coupled_pair(m, SchemeConfig{1 << 9, ref.eps, 1.0}, ref, noise);
      const auto c10 = simulate_path(m, SchemeConfig{1 << 10, ref.eps, 1.0}, noise);
      const double d9 = sup_distance(c9.grid_values, fine_path.grid_values);
      const double d10 = sup_distance(c10.grid_values, fine_path.grid_values);
      sum9 += d9 * d9;
      sum10 += d10 * d10;
    }
    CHECK(sum10 < sum9);
  }
}

TEST_CASE("coupled pairs") {
  const auto m = make_preset("strong_p_sweep").model;
  const SchemeConfig cfg{256, 1.0 / 256, 1.0};
  const auto noise = generate_noise(m.kernel, cfg, 39, 0);
  const auto [ref, coarse] = simulate_coupled_pair(m, cfg, cfg, noise);
  CHECK(ref.grid_values == coarse.grid_values);
  CHECK(sup_distance(coarse.grid_values, ref.grid_values) == 0.0);

  // Pure diffusion: the coarse path is Euler on summed Brownian increments.
  const auto diffusion = make_multiplicative_model(
      "diffusion", [](double, double x) { return -x; }, [](double, double x) { return 1.0 + 0.5 * std::cos(x); },
      MultiplicativeJump{[](double, double) { return 0.0; }, kOddZ},
      TruncatedStableSpec{0.5, 1.0, std::nullopt, std::nullopt}.kernel(), 1.0, 1.0, {});
  const SchemeConfig fine{64, 1.0, 1.0};
  const SchemeConfig coarse_cfg{8, 1.0, 1.0};
  const auto dn = generate_noise(diffusion.kernel, fine, 40, 0);
  const auto [fine_path, coarse_path] = simulate_coupled_pair(diffusion, coarse_cfg, fine, dn);
  double x = 1.0;
  for (int k = 1; k <= 8; ++k) {
    double dw = 0.0;
    for (int i = 8 * (k - 1); i < 8 * k; ++i) dw += dn.brownian_increments[i];
    x += -x * 0.125 + (1.0 + 0.5 * std::cos(x)) * dw;
    CHECK_THAT(coarse_path.grid_values[k], WithinAbs(x, 1e-13));
  }
  CHECK(fine_path.grid_values.size() == 65);

  const auto general = make_preset("weak_arctan").model;
  CHECK_THROWS_AS(simulate_coupled_pair(general, coarse_cfg, fine, dn), PreconditionError);
  CHECK_THROWS_AS(simulate_coupled_pair(m, SchemeConfig{3, 1.0, 1.0}, fine, dn), PreconditionError);
}

TEST_CASE("grid maps", "[property]") {
  const SchemeConfig cfg{7, 0.1, 1.3};
  for (int i = 0; i <= 7; ++i) {
    CHECK(cfg.eta(cfg.time(i)) == cfg.time(i));
    CHECK(cfg.rho(cfg.time(i)) == i);
  }
  CHECK(cfg.rho(1.3) == 7);
  // Right-continuous and piecewise constant between grid points.
  for (int i = 0; i < 7; ++i) {
    const double a = cfg.time(i);
    const double b = cfg.time(i + 1);
    CHECK(cfg.eta(std::nextafter(b, 0.0)) == a);
    CHECK(cfg.eta(0.5 * (a + b)) == a);
    CHECK(cfg.eta(b) == b);
    CHECK(cfg.step_of(b) == i + 1);
    CHECK(cfg.step_of(std::nextafter(a, 2.0)) == i + 1);
  }
  CHECK_THROWS_AS((SchemeConfig{0, 0.1, 1.0}.validate()), PreconditionError);
  CHECK_THROWS_AS((SchemeConfig{4, -0.1, 1.0}.validate()), PreconditionError);
  CHECK(parse_variant("euler_peano") == Variant::euler_peano);
  CHECK_THROWS_AS(parse_variant("implicit"), PreconditionError);
}
