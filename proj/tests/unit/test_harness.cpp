#include <catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "jumpsde/harness.hpp"
#include "oracles.hpp"

using namespace jumpsde;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

ErrorReport synthetic(std::vector<double> x, std::vector<double> y, Abscissa kind) {
  ErrorReport r;
  r.label = "synthetic";
  r.kind = kind;
  r.abscissae = std::move(x);
  r.estimates = std::move(y);
  r.std_errors.assign(r.estimates.size(), 0.0);
  return r;
}

}  // namespace

TEST_CASE("rate fits on synthetic data") {
  std::vector<double> n{64, 128, 256, 512, 1024};
  std::vector<double> y;
  for (double v : n) y.push_back(7.0 / std::sqrt(v));
  auto r = synthetic(n, y, Abscissa::steps);
  fit_rate(r);
  CHECK_THAT(r.fitted_slope, WithinAbs(0.5, 1e-12));
  CHECK_THAT(r.slope_ci.second - r.slope_ci.first, WithinAbs(0.0, 1e-10));

  std::vector<double> eps{0.4, 0.2, 0.1, 0.05};
  std::vector<double> cubic;
  for (double e : eps) cubic.push_back(2.5 * e * e * e);
  auto c = synthetic(eps, cubic, Abscissa::eps);
  fit_rate(c);
  CHECK_THAT(c.fitted_slope, WithinAbs(3.0, 1e-12));

  // 5% lognormal jitter at 8 points.
  RandomStream rng(SeedStream{77, 0, Substream::thinning});
  std::vector<double> xs, ys;
  for (int k = 0; k < 8; ++k) {
    xs.push_back(std::pow(2.0, 6 + k));
    ys.push_back(3.0 * std::pow(xs.back(), -0.25) * std::exp(0.05 * rng.normal()));
  }
  auto j = synthetic(xs, ys, Abscissa::steps);
  const auto fit = fit_rate(j);
  CHECK(std::abs(j.fitted_slope - 0.25) < 0.05);
  CHECK_THAT(fit.slope, WithinAbs(-oracle::log_log_slope(xs, ys), 1e-12));
  CHECK(j.slope_ci.first < j.fitted_slope);
  CHECK(j.slope_ci.second > j.fitted_slope);

  auto few = synthetic({1, 2}, {1, 0.5}, Abscissa::steps);
  fit_rate(few);
  CHECK(std::isnan(few.fitted_slope));
}

TEST_CASE("Simpson on grid samples") {
  std::vector<double> cubic;
  for (int k = 0; k <= 8; ++k) {
    const double t = 0.25 * k;
    cubic.push_back(t * t * t - t);
  }
  CHECK_THAT(simpson_on_grid(cubic, 0.25), WithinAbs(4.0 - 2.0, 1e-13));
  // Odd panel count closes with a trapezoid, exact for linear integrands.
  std::vector<double> linear{0.0, 1.0, 2.0, 3.0};
  CHECK_THAT(simpson_on_grid(linear, 1.0), WithinAbs(4.5, 1e-14));
}

TEST_CASE("step rule and eps rules") {
  CHECK(StepRule{6.0, 1.5}(1.0 / 2.25) == 6 * 3);
  CHECK(StepRule{24.0, 0.5}(0.25) == 48);
  CHECK(StepRule{2.0, 3.0, 10.0}(0.5) == 160);
  CHECK(StepRule{8.0, 2.0, 10.0}(0.3) == 8 * 111);
  CHECK_THROWS_AS((StepRule{1.0, 1.0}(10.0)), PreconditionError);

  const auto m = make_preset("strong_p_sweep").model;
  StrongErrorPlan plan;
  plan.n_grid = {4, 8, 16};
  plan.n_max = 1 << 10;
  CHECK_THAT(plan.eps_min(m), WithinRel(std::pow(1024.0, -1.0), 1e-15));
  plan.eps_rule = EpsRule::bg_rule;
  CHECK_THAT(plan.eps_min(m), WithinRel(std::pow(1024.0, -0.5 * 2.0 / 1.5), 1e-15));
  plan.eps_rule = EpsRule::integrability;
  const auto low = make_preset("low_integrability", {{"rho", -0.75}}).model;
  CHECK_THAT(plan.eps_min(low), WithinRel(std::pow(1024.0, -(0.5 + 0.25)), 1e-15));
  plan.eps_rule = EpsRule::explicit_value;
  plan.eps_explicit = 0.01;
  CHECK(plan.eps_min(m) == 0.01);
  CHECK(parse_eps_rule("integrability") == EpsRule::integrability);
  CHECK_THROWS_AS(parse_eps_rule("fancy"), PreconditionError);
}

TEST_CASE("strong error harness", "[property]") {
  const auto m = make_preset("strong_p_sweep").model;
  StrongErrorPlan plan;
  plan.p_norms = {2, 4};
  plan.n_grid = {32, 64, 128, 256};
  plan.n_max = 256;
  plan.mc_paths = 300;
  const auto reports = run_strong_error(m, plan, 5, 1);
  REQUIRE(reports.size() == 2);
  for (const auto& r : reports) {
    CHECK(r.abscissae == std::vector<double>{32, 64, 128, 256});
    CHECK(r.estimates.back() == 0.0);
    CHECK(r.estimates.front() > 0.0);
    CHECK(r.excluded_paths == 0);
    CHECK(monotonicity_violations(r).empty());
  }
  CHECK(reports[1].estimates[0] >= reports[0].estimates[0]);  // L^4 >= L^2

  SECTION("identical bytes across thread counts") {
    const auto again = run_strong_error(m, plan, 5, 3);
    for (std::size_t k = 0; k < reports.size(); ++k) {
      CHECK(again[k].estimates == reports[k].estimates);
      CHECK(again[k].std_errors == reports[k].std_errors);
    }
  }
  SECTION("plan preconditions") {
    StrongErrorPlan bad = plan;
    bad.n_grid = {64};
    CHECK_THROWS_AS(run_strong_error(m, bad, 1, 1), PreconditionError);
    bad.n_grid = {32, 48, 64};
    CHECK_THROWS_AS(run_strong_error(m, bad, 1, 1), PreconditionError);
    bad.n_grid = {32, 64, 128};
    bad.p_norms = {3};
    CHECK_THROWS_AS(run_strong_error(m, bad, 1, 1), PreconditionError);
  }
}

TEST_CASE("monotonicity check allows noise within two half-widths") {
  auto r = synthetic({1, 2, 4}, {1.0, 1.05, 0.5}, Abscissa::steps);
  r.std_errors = {0.02, 0.02, 0.02};
  CHECK(monotonicity_violations(r).empty());
  r.estimates[1] = 1.2;
  CHECK(monotonicity_violations(r) == std::vector<std::size_t>{0});
}

TEST_CASE("weak error harness", "[property]") {
  const auto preset = make_preset("weak_multiplicative");
  WeakErrorPlan plan;
  plan.eps_grid = {1.0 / 1.5, 1.0 / 2.25};
  plan.variants = {{Variant::with_substitute, {6.0, 1.5}}, {Variant::without_substitute, {24.0, 0.5}}};
  plan.mc_paths = 4000;
  const auto reports = run_weak_error(preset.model, *preset.weak, plan, 8, 1);
  REQUIRE(reports.size() == 2);
  CHECK(reports[0].steps == std::vector<int>{6, 18});
  CHECK(reports[1].steps == std::vector<int>{24, 24});
  for (const auto& r : reports) {
    for (std::size_t k = 0; k < r.estimates.size(); ++k) {
      CHECK(r.estimates[k] == std::abs(r.signed_bias[k]));
      CHECK(r.std_errors[k] > 0.0);
    }
  }

  SECTION("doubling the paths shrinks half-widths by sqrt(2)") {
    WeakErrorPlan twice = plan;
    twice.mc_paths = 2 * plan.mc_paths;
    const auto doubled = run_weak_error(preset.model, *preset.weak, twice, 8, 1);
    for (std::size_t v = 0; v < reports.size(); ++v) {
      for (std::size_t k = 0; k < reports[v].std_errors.size(); ++k) {
        const double ratio = reports[v].std_errors[k] / doubled[v].std_errors[k];
        CHECK(std::abs(ratio - std::sqrt(2.0)) < 0.1 * std::sqrt(2.0));
      }
    }
  }
  SECTION("reproducible across thread counts") {
    const auto again = run_weak_error(preset.model, *preset.weak, plan, 8, 2);
    for (std::size_t v = 0; v < reports.size(); ++v) CHECK(again[v].signed_bias == reports[v].signed_bias);
  }
  SECTION("plan preconditions") {
    WeakErrorPlan bad = plan;
    bad.eps_grid = {0.1, 0.2};
    CHECK_THROWS_AS(run_weak_error(preset.model, *preset.weak, bad, 1, 1), PreconditionError);
    bad = plan;
    bad.start_t = 0.5;
    CHECK_THROWS_AS(run_weak_error(preset.model, *preset.weak, bad, 1, 1), PreconditionError);
  }
}

TEST_CASE("Wasserstein check") {
  const auto kernel = make_kernel_preset("truncated_stable", {{"alpha", 0.5}, {"b", 1.0}});
  const std::vector<double> eps{0.2, 0.1};
  SECTION("F = 0 gives W = 0") {
    const auto r = empirical_wasserstein_check(kernel, [](double, double) { return 0.0; }, eps, 0.0, 1.0,
                                               10000, 3, 1);
    for (const auto& p : r.points) {
      CHECK(p.distance == 0.0);
      CHECK(p.gaussian_sd == 0.0);
    }
  }
  SECTION("F = z: variance and ratio functional in closed form") {
    const auto r = empirical_wasserstein_check(kernel, [](double, double z) { return z; }, eps, 0.0, 1.0,
                                               10000, 3, 1);
    for (const auto& p : r.points) {
      const double e = p.eps;
      CHECK_THAT(p.gaussian_sd * p.gaussian_sd, WithinRel(2.0 * std::pow(e, 1.5) / 1.5, 1e-8));
      CHECK_THAT(p.bound_ratio, WithinRel(std::sqrt(e * e * 1.5 / 3.5), 1e-8));
      CHECK(p.distance > 0.0);
      CHECK(p.half_width > 0.0);
    }
    CHECK(r.points[1].bound_ratio / r.points[0].bound_ratio == Catch::Approx(0.5).epsilon(1e-10));
  }
  SECTION("preconditions") {
    auto f = [](double, double z) { return z; };
    CHECK_THROWS_AS(empirical_wasserstein_check(kernel, f, eps, 0.0, 1.0, 999, 1, 1), PreconditionError);
    WassersteinOptions wide;
    wide.inner_ratio = 0.05;
    CHECK_THROWS_AS(empirical_wasserstein_check(kernel, f, eps, 0.0, 1.0, 10000, 1, 1, wide), PreconditionError);
  }
}

TEST_CASE("Wasserstein assessment") {
  WassersteinReport r;
  r.points = {{0.2, 0.02, 0.001}, {0.1, 0.011, 0.001}, {0.05, 0.004, 0.001}};
  auto a = assess_wasserstein(r);
  CHECK(a.monotone);
  CHECK(a.linear);
  CHECK_THAT(a.constant, WithinRel(0.1, 1e-12));
  r.points[2].distance = 0.03;
  a = assess_wasserstein(r);
  CHECK_FALSE(a.monotone);
  CHECK_FALSE(a.linear);
}

TEST_CASE("lower-bound preconditions") {
  const auto m = make_preset("subordinator_lower_bound").model;
  StrongErrorPlan plan;
  plan.p_norms = {2};
  plan.n_grid = {64};
  plan.n_max = 256;
  plan.eps_rule = EpsRule::explicit_value;
  plan.eps_explicit = 1.0 / 256;
  plan.mc_paths = 10;
  CHECK_THROWS_AS(lower_bound_check(m, plan, 1, 1), PreconditionError);
  const auto two_sided = make_preset("strong_p_sweep").model;
  plan.n_grid = {16, 32, 64};
  CHECK_THROWS_AS(lower_bound_check(two_sided, plan, 1, 1), PreconditionError);
}

TEST_CASE("statistical helpers") {
  std::vector<double> a{0.1, 0.2, 0.3, 0.4, 0.5};
  CHECK(ks_two_sample(a, a).statistic == 0.0);
  const auto moments = sample_moments(std::vector<double>{1, 2, 3, 4, 5, 6});
  CHECK_THAT(moments.mean, WithinRel(3.5, 1e-15));
  CHECK_THAT(moments.variance, WithinRel(3.5, 1e-15));
  CHECK_THAT(moments.skewness, WithinAbs(0.0, 1e-14));
  CHECK_THAT(normal_quantile(0.975), WithinRel(1.959963984540054, 1e-12));
  CHECK_THAT(normal_cdf(normal_quantile(0.3)), WithinRel(0.3, 1e-12));
  std::vector<double> s1{0, 1, 2};
  std::vector<double> s2{1, 2, 3};
  CHECK_THAT(wasserstein_sorted(s1, s2, 2.0), WithinRel(1.0, 1e-15));
}
