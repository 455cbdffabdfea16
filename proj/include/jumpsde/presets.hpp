#pragma once

// Named kernels and models for the reproduced experiments, with numeric
// parameter overrides. Unknown parameter names are rejected.

#include <cmath>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "jumpsde/error.hpp"
#include "jumpsde/fiber.hpp"
#include "jumpsde/measure.hpp"
#include "jumpsde/model.hpp"

namespace jumpsde {

using ParamMap = std::map<std::string, double>;

/// Closed-form Kolmogorov solution u with terminal function phi and source G,
/// so that u(t, x) = E[phi(X_T) - int_t^T G(s, X_s) ds].
struct WeakErrorSpec {
  std::function<double(double)> phi;
  std::function<double(double, double)> source_g;
  std::function<double(double, double)> u_exact;
};

struct Preset {
  std::string name;
  SdeModel model;
  std::optional<WeakErrorSpec> weak;
  ParamMap params;  // resolved parameter values
};

namespace detail {

inline ParamMap resolve_params(std::string_view preset, ParamMap defaults, const ParamMap& overrides) {
  for (const auto& [key, value] : overrides) {
    auto it = defaults.find(key);
    if (it == defaults.end()) {
      std::string known;
      for (const auto& kv : defaults) known += (known.empty() ? "" : ", ") + kv.first;
      throw PreconditionError("preset '" + std::string(preset) + "' has no parameter '" + key +
                              "' (known: " + known + ")");
    }
    it->second = value;
  }
  return defaults;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Kernels

inline std::vector<std::string> kernel_preset_names() {
  return {"truncated_stable", "time_modulated_stable", "fiber_kernel"};
}

inline ParamMap kernel_preset_defaults(std::string_view name) {
  if (name == "truncated_stable") return {{"alpha", 0.5}, {"b", 1.0}};
  if (name == "time_modulated_stable") return {{"alpha", 0.5}, {"b", 10.0}, {"rho", 0.0}};
  if (name == "fiber_kernel") {
    return {{"alpha", 1.5}, {"z_minus", 8.0}, {"z_plus", 8.0}, {"Tstar", 0.2}, {"q", 1.5}};
  }
  throw PreconditionError("unknown kernel preset '" + std::string(name) + "'");
}

inline CompensatorKernel make_kernel_preset(std::string_view name, const ParamMap& overrides = {}) {
  const ParamMap p = detail::resolve_params(name, kernel_preset_defaults(name), overrides);
  if (name == "truncated_stable") {
    return TruncatedStableSpec{p.at("alpha"), p.at("b"), std::nullopt, std::nullopt}.kernel();
  }
  if (name == "time_modulated_stable") {
    require(p.at("rho") > -1.0, "time_modulated_stable: rho must be > -1");
    return TruncatedStableSpec{p.at("alpha"), p.at("b"), TimeProfile::power(p.at("rho")),
                               std::nullopt}
        .kernel();
  }
  require(p.at("q") > 1.0, "fiber_kernel: q must be > 1");
  return TruncatedStableSpec{p.at("alpha"), 1.0,
                             TimeProfile::capped_power(p.at("Tstar"), p.at("q") - 1.0),
                             std::make_pair(p.at("z_minus"), p.at("z_plus"))}
      .kernel();
}

// ---------------------------------------------------------------------------
// Models

inline std::vector<std::string> model_preset_names() {
  return {"strong_p_sweep", "low_integrability", "weak_multiplicative",
          "weak_arctan",    "subordinator_lower_bound", "fiber"};
}

inline ParamMap model_preset_defaults(std::string_view name) {
  if (name == "strong_p_sweep") return {{"alpha", 0.5}, {"b", 1.0}, {"x0", 0.0}, {"T", 1.0}};
  if (name == "low_integrability") {
    return {{"rho", 0.0}, {"alpha", 0.5}, {"b", 10.0}, {"x0", 1.0}, {"T", 1.0}};
  }
  if (name == "weak_multiplicative") return {{"alpha", 1.5}, {"b", 10.0}, {"x0", 10.0}, {"T", 1.0}};
  if (name == "weak_arctan") return {{"b", 1.0}, {"x0", 10.0}, {"T", 1.0}};
  if (name == "subordinator_lower_bound") return {{"alpha", 0.5}, {"b", 1.0}, {"x0", 1.0}, {"T", 1.0}};
  if (name == "fiber") {
    const FiberParams d;
    return {{"sigma", d.sigma},     {"gamma0", d.gammas[0]}, {"gamma1", d.gammas[1]},
            {"gamma2", d.gammas[2]}, {"gamma3", d.gammas[3]}, {"gamma4", d.gammas[4]},
            {"alpha", d.alpha},     {"z_minus", d.z_minus},  {"z_plus", d.z_plus},
            {"Tstar", d.T_star},    {"q", d.q},              {"theta0", d.theta0},
            {"T", d.T},             {"jumps", 1.0}};
  }
  throw PreconditionError("unknown model preset '" + std::string(name) + "'");
}

inline FiberParams fiber_params_from(const ParamMap& p) {
  FiberParams f;
  f.sigma = p.at("sigma");
  f.gammas = {p.at("gamma0"), p.at("gamma1"), p.at("gamma2"), p.at("gamma3"), p.at("gamma4")};
  f.alpha = p.at("alpha");
  f.z_minus = p.at("z_minus");
  f.z_plus = p.at("z_plus");
  f.T_star = p.at("Tstar");
  f.q = p.at("q");
  f.theta0 = p.at("theta0");
  f.T = p.at("T");
  f.jumps = p.at("jumps") != 0.0;
  return f;
}

/// Weak-error manufactured solution for a = -2x, c = sin(x) z and the
/// symmetric alpha-stable kernel truncated at b: u = (1 - e^{T-t}/2) x^2.
/// G = du/dt + L u includes the drift contribution -4 (1 - e^{T-t}/2) x^2.
inline WeakErrorSpec weak_multiplicative_spec(double alpha, double b_trunc, double T) {
  const double jump_second = 2.0 * std::pow(b_trunc, 2.0 - alpha) / (2.0 - alpha);
  WeakErrorSpec s;
  s.phi = [](double x) { return 0.5 * x * x; };
  s.u_exact = [T](double t, double x) { return (1.0 - 0.5 * std::exp(T - t)) * x * x; };
  s.source_g = [T, jump_second](double t, double x) {
    const double e = std::exp(T - t);
    const double w = 1.0 - 0.5 * e;
    const double sn = std::sin(x);
    return 0.5 * x * x * e - 4.0 * w * x * x + w * sn * sn * jump_second;
  };
  return s;
}

/// Weak-error manufactured solution for a = -2x, c = arctan(x z), kernel
/// 1{|z| <= 1}/|z|: u = phi = sin.
inline WeakErrorSpec weak_arctan_spec() {
  WeakErrorSpec s;
  s.phi = [](double x) { return std::sin(x); };
  s.u_exact = [](double, double x) { return std::sin(x); };
  s.source_g = [](double, double x) {
    return -2.0 * x * std::cos(x) +
           2.0 * std::sin(x) * (std::log(2.0) - std::log(std::sqrt(x * x + 1.0) + 1.0));
  };
  return s;
}

inline Preset make_preset(std::string_view name, const ParamMap& overrides = {}) {
  const ParamMap p = detail::resolve_params(name, model_preset_defaults(name), overrides);
  Preset out{std::string(name), make_general_model("placeholder", {}, {},
                                                   [](double, double, double) { return 0.0; },
                                                   make_kernel_preset("truncated_stable"), 0.0,
                                                   1.0, {}),
             std::nullopt, p};
  const auto odd_z = JumpProfile::monomial(1.0, true);
  if (name == "strong_p_sweep") {
    RateHypotheses rate;
    rate.sublinear = true;
    rate.c_lip_bound = [](double, double z) { return std::abs(z); };
    out.model = make_multiplicative_model(
        "strong_p_sweep", [](double, double x) { return std::cos(x); }, {},
        MultiplicativeJump{[](double, double x) { return std::sin(x); }, odd_z},
        TruncatedStableSpec{p.at("alpha"), p.at("b"), std::nullopt, std::nullopt}.kernel(),
        p.at("x0"), p.at("T"), rate);
  } else if (name == "low_integrability") {
    const double rho = p.at("rho");
    require(rho > -1.0 && rho <= 0.0, "low_integrability: rho must lie in (-1, 0]");
    RateHypotheses rate;
    // psi_p ~ s^rho lies in L^{1+zeta} for every zeta < 1/|rho| - 1.
    rate.zeta = rho == 0.0 ? 1.0 : std::min(1.0, 1.0 / std::abs(rho) - 1.0);
    rate.time_singularity = std::abs(rho);
    rate.sublinear = true;
    rate.c_lip_bound = [rho](double t, double z) { return std::abs(z) * std::pow(t, rho / 2.0); };
    out.model = make_multiplicative_model(
        "low_integrability", [](double, double x) { return std::sin(x); }, {},
        MultiplicativeJump{[](double, double x) { return std::cos(x); }, odd_z},
        TruncatedStableSpec{p.at("alpha"), p.at("b"), TimeProfile::power(rho), std::nullopt}.kernel(),
        p.at("x0"), p.at("T"), rate);
  } else if (name == "weak_multiplicative") {
    RateHypotheses rate;
    rate.sublinear = true;
    out.model = make_multiplicative_model(
        "weak_multiplicative", [](double, double x) { return -2.0 * x; }, {},
        MultiplicativeJump{[](double, double x) { return std::sin(x); }, odd_z},
        TruncatedStableSpec{p.at("alpha"), p.at("b"), std::nullopt, std::nullopt}.kernel(),
        p.at("x0"), p.at("T"), rate);
    out.weak = weak_multiplicative_spec(p.at("alpha"), p.at("b"), p.at("T"));
  } else if (name == "weak_arctan") {
    RateHypotheses rate;
    rate.sublinear = true;
    out.model = make_arctan_model(
        "weak_arctan", [](double, double x) { return -2.0 * x; }, {},
        CompensatorKernel::power_law(PowerLawShape::symmetric(0.0, p.at("b"))), p.at("x0"),
        p.at("T"), rate);
    out.weak = weak_arctan_spec();
  } else if (name == "subordinator_lower_bound") {
    // dX = X- dL with L a subordinator: the uncompensated jump integral is the
    // compensated one plus the drift x int z nu(dz).
    const double alpha = p.at("alpha");
    const double b = p.at("b");
    require(alpha < 1.0, "subordinator_lower_bound: alpha must be < 1 for int z nu(dz) < inf");
    const PowerLawShape shape(alpha, 0.0, b);
    const double first = shape.positive_moment(0.0, b, 1.0);
    RateHypotheses rate;
    rate.sublinear = true;
    out.model = make_multiplicative_model(
        "subordinator_lower_bound", [first](double, double x) { return first * x; }, {},
        MultiplicativeJump{[](double, double x) { return x; }, odd_z},
        CompensatorKernel::power_law(shape), p.at("x0"), p.at("T"), rate);
  } else {
    out.model = build_fiber_model(fiber_params_from(p));
  }
  // Every preset kernel has a Lebesgue density.
  out.model.rate.absolutely_continuous = true;
  return out;
}

}  // namespace jumpsde
