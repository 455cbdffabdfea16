#pragma once

// Experiment orchestration behind the `jumpsde` binary: resolves a config
// (defaults, then file, then flags), runs one subcommand and writes the
// artifacts of a run directory:
//
//   report.csv     plot-ready numbers
//   summary.json   fitted slopes, CIs, excluded paths, assertion outcomes
//   manifest.json  resolved config, enough to replay the run byte for byte
//   timing.json    wall-clock runtime, kept apart so the others stay reproducible

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "jumpsde/config.hpp"
#include "jumpsde/expression.hpp"
#include "jumpsde/fiber.hpp"
#include "jumpsde/harness.hpp"
#include "jumpsde/presets.hpp"
#include "jumpsde/report_io.hpp"
#include "jumpsde/scheme.hpp"

namespace jumpsde::cli {

inline constexpr std::string_view kToolName = "jumpsde";
inline constexpr std::string_view kVersion = "0.1.0";

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitAssertion = 3;

enum class Command { simulate, strong_error, weak_error, wasserstein, lower_bound, fiber_pdf };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::simulate: return "simulate";
    case Command::strong_error: return "strong-error";
    case Command::weak_error: return "weak-error";
    case Command::wasserstein: return "wasserstein";
    case Command::lower_bound: return "lower-bound";
    case Command::fiber_pdf: return "fiber-pdf";
  }
  return "unknown";
}

inline Command parse_command(std::string_view s) {
  for (Command c : {Command::simulate, Command::strong_error, Command::weak_error,
                    Command::wasserstein, Command::lower_bound, Command::fiber_pdf}) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError("unknown command '" + std::string(s) + "'");
}

/// Plan keys with their defaults; an empty default means "unset".
inline std::vector<std::pair<std::string, std::string>> plan_schema(Command c) {
  switch (c) {
    case Command::simulate:
      return {{"n", "16"}, {"eps", "0.01"}, {"variant", "with_substitute"},
              {"record_jumps", "false"}, {"dump_noise", "false"}, {"format", "csv"}};
    case Command::strong_error:
      return {{"p_norms", "2"},
              {"n_grid", "256, 512, 1024, 2048"},
              {"n_max", "16384"},
              {"eps_rule", "half_plus_inv_p"},
              {"eps", ""},
              {"variant", "with_substitute"},
              {"expect_slope_low", ""},
              {"expect_slope_high", ""}};
    case Command::lower_bound:
      return {{"p_norms", "2, 4"},
              {"n_grid", "256, 512, 1024, 2048, 4096"},
              {"n_max", "65536"},
              {"eps_rule", "explicit"},
              {"eps", "1.52587890625e-05"}};
    case Command::weak_error:
      return {{"eps_grid", "0.4444444444444444, 0.2962962962962963, 0.19753086419753085, 0.13168724279835392"},
              {"variants", "with_substitute, without_substitute"},
              {"n_rule_with_substitute", "6, 1.5"},
              {"n_rule_without_substitute", "24, 0.5"},
              {"start_x", ""},
              {"expect_slope_low", ""},
              {"expect_slope_high", ""}};
    case Command::wasserstein:
      return {{"F", "z"},          {"eps_grid", "0.2, 0.1, 0.05, 0.025"},
              {"t0", "0"},         {"t1", "1"},
              {"q", "2"},          {"inner_ratio", "0.01"},
              {"bootstrap", "20"}};
    case Command::fiber_pdf:
      return {{"n", "256"}, {"eps", "0.00390625"}, {"snapshots", "0.125, 0.25, 0.5, 1"}};
  }
  return {};
}

inline std::string default_preset(Command c) {
  switch (c) {
    case Command::simulate:
    case Command::strong_error: return "strong_p_sweep";
    case Command::lower_bound: return "subordinator_lower_bound";
    case Command::weak_error: return "weak_multiplicative";
    case Command::wasserstein: return "truncated_stable";
    case Command::fiber_pdf: return "fiber";
  }
  return {};
}

inline std::uint64_t default_paths(Command c) {
  switch (c) {
    case Command::simulate: return 1;
    case Command::strong_error:
    case Command::lower_bound: return 10000;
    case Command::weak_error:
    case Command::wasserstein:
    case Command::fiber_pdf: return 100000;
  }
  return 1;
}

inline const std::vector<std::string>& model_keys() {
  static const std::vector<std::string> keys{"drift", "diffusion", "jump", "jump_scale",
                                             "kernel", "x0", "T", "absolutely_continuous"};
  return keys;
}

struct ExperimentConfig {
  Command command = Command::simulate;
  std::string preset;
  ParamMap overrides;
  std::map<std::string, std::string> model;  // coefficients of the "custom" preset
  std::map<std::string, std::string> plan;
  std::uint64_t seed = 1;
  int threads = 0;
  std::uint64_t paths = 0;  // 0 selects the command default
  std::string out_dir = "runs";
  std::string run_name;
};

inline bool custom_model(const ExperimentConfig& cfg) { return cfg.preset == "custom"; }

/// Parameter names the preset (or, for custom models and wasserstein runs, the
/// kernel preset) accepts.
inline ParamMap preset_parameters(const ExperimentConfig& cfg) {
  if (cfg.command == Command::wasserstein) return kernel_preset_defaults(cfg.preset);
  if (custom_model(cfg)) {
    const auto it = cfg.model.find("kernel");
    return kernel_preset_defaults(it == cfg.model.end() ? "truncated_stable" : it->second);
  }
  return model_preset_defaults(cfg.preset);
}

inline void set_plan_value(ExperimentConfig& cfg, const std::string& key, const std::string& value,
                           const std::string& origin) {
  const auto schema = plan_schema(cfg.command);
  const bool known = std::any_of(schema.begin(), schema.end(), [&](const auto& kv) { return kv.first == key; });
  if (!known) {
    std::string names;
    for (const auto& kv : schema) names += (names.empty() ? "" : ", ") + kv.first;
    throw ConfigError(origin + ": unknown plan key '" + key + "' for " +
                      std::string(to_string(cfg.command)) + " (known: " + names + ")");
  }
  cfg.plan[key] = value;
}

inline void set_experiment_value(ExperimentConfig& cfg, const std::string& key,
                                 const std::string& value, const std::string& origin) {
  if (key == "command") cfg.command = parse_command(value);
  else if (key == "preset") cfg.preset = value;
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_integer(value, origin));
  else if (key == "threads") cfg.threads = static_cast<int>(parse_integer(value, origin));
  else if (key == "paths") cfg.paths = static_cast<std::uint64_t>(parse_integer(value, origin));
  else if (key == "out_dir") cfg.out_dir = value;
  else if (key == "run_name") cfg.run_name = value;
  else throw ConfigError(origin + ": unknown key '" + key + "' in [experiment]");
}

/// Reads a config file. The command comes from the file unless `command` is given.
inline ExperimentConfig from_file(const ConfigFile& file, std::optional<Command> command = {}) {
  ExperimentConfig cfg;
  const auto& secs = file.sections();
  const auto loc = [&](int line) { return file.source() + ":" + std::to_string(line); };
  if (auto it = secs.find("experiment"); it != secs.end()) {
    for (const auto& [key, entry] : it->second) set_experiment_value(cfg, key, entry.value, loc(entry.line));
  }
  if (command) {
    if (auto it = secs.find("experiment"); it != secs.end() && it->second.count("command") &&
                                            cfg.command != *command) {
      file.fail(it->second.at("command").line,
                "config is for '" + std::string(to_string(cfg.command)) + "', not '" +
                    std::string(to_string(*command)) + "'");
    }
    cfg.command = *command;
  }
  if (cfg.preset.empty()) cfg.preset = default_preset(cfg.command);
  for (const auto& [name, entries] : secs) {
    if (name == "experiment") continue;
    if (name == "plan") {
      for (const auto& [key, entry] : entries) set_plan_value(cfg, key, entry.value, loc(entry.line));
    } else if (name == "model") {
      for (const auto& [key, entry] : entries) {
        if (std::find(model_keys().begin(), model_keys().end(), key) == model_keys().end()) {
          file.fail(entry.line, "unknown key '" + key + "' in [model]");
        }
        cfg.model[key] = entry.value;
      }
    } else if (name != "preset") {
      const int line = entries.empty() ? 0 : entries.begin()->second.line;
      file.fail(line, "unknown section [" + name + "]");
    }
  }
  if (auto it = secs.find("preset"); it != secs.end()) {
    const ParamMap known = preset_parameters(cfg);
    for (const auto& [key, entry] : it->second) {
      if (!known.count(key)) file.fail(entry.line, "preset '" + cfg.preset + "' has no parameter '" + key + "'");
      cfg.overrides[key] = parse_double(entry.value, loc(entry.line) + ": " + key);
    }
  }
  return cfg;
}

/// Applies defaults and checks cross-field constraints.
inline void finalize(ExperimentConfig& cfg) {
  if (cfg.preset.empty()) cfg.preset = default_preset(cfg.command);
  if (cfg.paths == 0) cfg.paths = default_paths(cfg.command);
  if (cfg.command == Command::fiber_pdf && cfg.preset != "fiber") {
    throw ConfigError("fiber-pdf runs the 'fiber' preset only");
  }
  if (!cfg.model.empty() && !custom_model(cfg)) {
    throw ConfigError("[model] coefficients need preset = custom");
  }
  const ParamMap known = preset_parameters(cfg);
  for (const auto& [key, value] : cfg.overrides) {
    if (!known.count(key)) throw ConfigError("preset '" + cfg.preset + "' has no parameter '" + key + "'");
  }
  for (const auto& [key, value] : plan_schema(cfg.command)) {
    if (!cfg.plan.count(key)) cfg.plan[key] = value;
  }
  if (cfg.plan.count("eps_rule")) {
    const EpsRule rule = parse_eps_rule(cfg.plan.at("eps_rule"));
    const bool has_eps = !cfg.plan.at("eps").empty();
    if (has_eps && rule != EpsRule::explicit_value) {
      throw ConfigError("eps = " + cfg.plan.at("eps") + " conflicts with eps_rule = " +
                        cfg.plan.at("eps_rule") + "; use eps_rule = explicit");
    }
    if (!has_eps && rule == EpsRule::explicit_value) {
      throw ConfigError("eps_rule = explicit needs an eps value");
    }
  }
  if (cfg.threads < 0) throw ConfigError("threads must be >= 0");
}

/// The resolved config in the file format accepted by from_file.
inline std::string to_config_text(const ExperimentConfig& cfg) {
  std::string out = "[experiment]\n";
  out += "command = " + std::string(to_string(cfg.command)) + "\n";
  out += "preset = " + cfg.preset + "\n";
  out += "seed = " + std::to_string(cfg.seed) + "\n";
  out += "threads = " + std::to_string(cfg.threads) + "\n";
  out += "paths = " + std::to_string(cfg.paths) + "\n";
  if (!cfg.overrides.empty()) {
    out += "\n[preset]\n";
    for (const auto& [k, v] : cfg.overrides) out += k + " = " + format_number(v) + "\n";
  }
  if (!cfg.model.empty()) {
    out += "\n[model]\n";
    for (const auto& [k, v] : cfg.model) out += k + " = " + v + "\n";
  }
  out += "\n[plan]\n";
  for (const auto& [k, v] : cfg.plan) {
    if (!v.empty()) out += k + " = " + v + "\n";
  }
  return out;
}

inline Json manifest_json(const ExperimentConfig& cfg) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["command"] = to_string(cfg.command);
  j["preset"] = cfg.preset;
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["paths"] = cfg.paths;
  Json ov = Json::object();
  for (const auto& [k, v] : cfg.overrides) ov[k] = v;
  j["overrides"] = ov;
  Json model = Json::object();
  for (const auto& [k, v] : cfg.model) model[k] = v;
  j["model"] = model;
  Json plan = Json::object();
  for (const auto& [k, v] : cfg.plan) plan[k] = v;
  j["plan"] = plan;
  j["config"] = to_config_text(cfg);
  return j;
}

inline ExperimentConfig from_manifest(const Json& j) {
  if (j.value("tool", "") != kToolName) throw ConfigError("not a jumpsde manifest");
  ExperimentConfig cfg;
  cfg.command = parse_command(j.at("command").get<std::string>());
  cfg.preset = j.at("preset").get<std::string>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  cfg.threads = j.at("threads").get<int>();
  cfg.paths = j.at("paths").get<std::uint64_t>();
  for (const auto& [k, v] : j.at("overrides").items()) cfg.overrides[k] = v.get<double>();
  for (const auto& [k, v] : j.at("model").items()) cfg.model[k] = v.get<std::string>();
  for (const auto& [k, v] : j.at("plan").items()) set_plan_value(cfg, k, v.get<std::string>(), "manifest");
  finalize(cfg);
  return cfg;
}

// ---------------------------------------------------------------------------
// Building blocks from a resolved config

inline Preset build_preset(const ExperimentConfig& cfg) {
  if (!custom_model(cfg)) return make_preset(cfg.preset, cfg.overrides);
  const auto get = [&](const std::string& key, const std::string& fallback) {
    const auto it = cfg.model.find(key);
    return it == cfg.model.end() ? fallback : it->second;
  };
  const std::string kernel_name = get("kernel", "truncated_stable");
  auto kernel = make_kernel_preset(kernel_name, cfg.overrides);
  const auto drift = Expression::parse(get("drift", "0"));
  const std::string diffusion_src = get("diffusion", "");
  TimeStateFn diffusion;
  if (!diffusion_src.empty()) {
    const auto e = Expression::parse(diffusion_src);
    diffusion = [e](double t, double x) { return e(t, x); };
  }
  const double x0 = parse_double(get("x0", "0"), "model.x0");
  const double T = parse_double(get("T", "1"), "model.T");
  RateHypotheses rate;
  // The coupling hypothesis cannot be checked numerically; the user vouches for it.
  rate.absolutely_continuous = parse_bool(get("absolutely_continuous", "false"), "model.absolutely_continuous");
  Preset out{"custom", make_general_model("custom", {}, {}, [](double, double, double) { return 0.0; },
                                           kernel, x0, T, rate),
             std::nullopt, cfg.overrides};
  const std::string scale_src = get("jump_scale", "");
  const std::string jump_src = get("jump", "");
  if (scale_src.empty() == jump_src.empty()) {
    throw ConfigError("[model] needs exactly one of jump_scale (c = scale(t, x) z) or jump (c(t, x, z))");
  }
  auto drift_fn = [drift](double t, double x) { return drift(t, x); };
  if (!scale_src.empty()) {
    const auto scale = Expression::parse(scale_src);
    if (scale.uses_z()) throw ConfigError("[model] jump_scale must not depend on z");
    MultiplicativeJump jump{[scale](double t, double x) { return scale(t, x); },
                            JumpProfile::monomial(1.0, true), !scale.uses_t()};
    out.model = make_multiplicative_model("custom", drift_fn, diffusion, std::move(jump),
                                          std::move(kernel), x0, T, rate);
  } else {
    const auto jump = Expression::parse(jump_src);
    out.model = make_general_model("custom", drift_fn, diffusion,
                                   [jump](double t, double x, double z) { return jump(t, x, z); },
                                   std::move(kernel), x0, T, rate);
  }
  return out;
}

inline StrongErrorPlan build_strong_plan(const ExperimentConfig& cfg) {
  const auto& p = cfg.plan;
  StrongErrorPlan plan;
  plan.p_norms = parse_int_list(p.at("p_norms"), "plan.p_norms");
  plan.n_grid = parse_int_list(p.at("n_grid"), "plan.n_grid");
  plan.n_max = static_cast<int>(parse_integer(p.at("n_max"), "plan.n_max"));
  plan.eps_rule = parse_eps_rule(p.at("eps_rule"));
  if (!p.at("eps").empty()) plan.eps_explicit = parse_double(p.at("eps"), "plan.eps");
  if (p.count("variant")) plan.variant = parse_variant(p.at("variant"));
  plan.mc_paths = cfg.paths;
  plan.validate();
  return plan;
}

inline StepRule parse_step_rule(const std::string& s, const std::string& what) {
  const auto v = parse_double_list(s, what);
  if (v.size() != 2 && v.size() != 3) throw ConfigError(what + ": expected 'factor, exponent[, scale]'");
  return {v[0], v[1], v.size() == 3 ? v[2] : 1.0};
}

inline WeakErrorPlan build_weak_plan(const ExperimentConfig& cfg) {
  const auto& p = cfg.plan;
  WeakErrorPlan plan;
  plan.eps_grid = parse_double_list(p.at("eps_grid"), "plan.eps_grid");
  for (const auto& name : split_list(p.at("variants"))) {
    const Variant v = parse_variant(name);
    const std::string key = "n_rule_" + std::string(to_string(v == Variant::euler_peano
                                                                  ? Variant::with_substitute
                                                                  : v));
    plan.variants.push_back({v, parse_step_rule(p.at(key), "plan." + key)});
  }
  if (!p.at("start_x").empty()) plan.start_x = parse_double(p.at("start_x"), "plan.start_x");
  plan.mc_paths = cfg.paths;
  plan.validate();
  return plan;
}

// ---------------------------------------------------------------------------
// Running

struct Assertion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunOutcome {
  std::filesystem::path run_dir;
  std::vector<Assertion> assertions;
  bool assertions_passed() const {
    return std::all_of(assertions.begin(), assertions.end(), [](const Assertion& a) { return a.passed; });
  }
};

namespace detail {

inline std::vector<double> optional_list(const ExperimentConfig& cfg, const std::string& key) {
  const auto it = cfg.plan.find(key);
  if (it == cfg.plan.end() || it->second.empty()) return {};
  return parse_double_list(it->second, "plan." + key);
}

/// Slope expectations: explicit [low, high] per series when given, otherwise
/// predicted slope +- 0.1 when a prediction exists.
inline void slope_assertions(const ExperimentConfig& cfg, const std::vector<ErrorReport>& reports,
                             std::vector<Assertion>& out) {
  const auto lows = optional_list(cfg, "expect_slope_low");
  const auto highs = optional_list(cfg, "expect_slope_high");
  if ((!lows.empty() && lows.size() != reports.size()) || (!highs.empty() && highs.size() != reports.size())) {
    throw ConfigError("expect_slope_low/high need one value per reported series");
  }
  for (std::size_t k = 0; k < reports.size(); ++k) {
    const auto& r = reports[k];
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    if (!lows.empty()) lo = lows[k];
    if (!highs.empty()) hi = highs[k];
    if (lows.empty() && highs.empty()) {
      if (!std::isfinite(r.predicted_slope)) continue;
      lo = r.predicted_slope - 0.1;
      hi = r.predicted_slope + 0.1;
    }
    const bool ok = std::isfinite(r.fitted_slope) && r.fitted_slope >= lo && r.fitted_slope <= hi;
    out.push_back({r.label + " slope", ok,
                   "slope " + format_brief(r.fitted_slope) + " expected in [" + format_brief(lo) +
                       ", " + format_brief(hi) + "]"});
  }
}

}  // namespace detail

/// Runs one experiment and writes its run directory.
inline RunOutcome run(const ExperimentConfig& cfg_in, std::ostream& log) {
  ExperimentConfig cfg = cfg_in;
  finalize(cfg);
  const auto start = std::chrono::steady_clock::now();
  RunOutcome outcome;
  Json summary;
  summary["command"] = to_string(cfg.command);
  summary["preset"] = cfg.preset;
  std::string report_csv;
  std::string report_name = "report.csv";
  std::vector<std::pair<std::string, std::string>> extra_files;

  switch (cfg.command) {
    case Command::simulate: {
      const Preset preset = build_preset(cfg);
      const SchemeConfig config{static_cast<int>(parse_integer(cfg.plan.at("n"), "plan.n")),
                                parse_double(cfg.plan.at("eps"), "plan.eps"), preset.model.T,
                                parse_variant(cfg.plan.at("variant"))};
      const bool record = parse_bool(cfg.plan.at("record_jumps"), "plan.record_jumps");
      const bool dump = parse_bool(cfg.plan.at("dump_noise"), "plan.dump_noise");
      const SchemeStepper stepper(preset.model, config);
      NoiseOptions opts;
      opts.brownian = preset.model.has_diffusion();
      opts.substitute = config.variant != Variant::without_substitute;
      const bool as_json = cfg.plan.at("format") == "json";
      if (!as_json && cfg.plan.at("format") != "csv") throw ConfigError("plan.format must be csv or json");
      CsvWriter csv({"path_index", "t", "x"});
      CsvWriter jumps({"path_index", "step", "time", "size", "increment"});
      CsvWriter noise_csv({"path_index", "kind", "index", "value"});
      Json paths_json = Json::array();
      std::uint64_t divergent = 0;
      for (std::uint64_t path = 0; path < cfg.paths; ++path) {
        const auto noise = generate_noise(preset.model.kernel, config, cfg.seed, path, opts);
        const Path result = stepper.simulate(noise, record);
        divergent += result.divergent ? 1 : 0;
        if (as_json) {
          paths_json.push_back({{"path_index", path}, {"x", result.grid_values}});
        } else {
          for (int i = 0; i <= config.n; ++i) csv.row(path, config.time(i), result.grid_values[i]);
        }
        for (const auto& j : result.jump_log) jumps.row(path, j.step, j.time, j.size, j.increment);
        if (dump) {
          const auto put = [&](const char* kind, const auto& values) {
            for (std::size_t k = 0; k < values.size(); ++k) {
              noise_csv.row(path, kind, k, static_cast<double>(values[k]));
            }
          };
          put("brownian", noise.brownian_increments);
          put("substitute", noise.substitute_gaussians);
          put("jump_time", noise.jump_times);
          put("jump_size", noise.jump_sizes);
          put("jump_step", noise.jump_steps);
        }
      }
      if (as_json) {
        report_name = "report.json";
        report_csv = paths_json.dump(1) + "\n";
      } else {
        report_csv = csv.str();
      }
      if (record) extra_files.emplace_back("jumps.csv", jumps.str());
      if (dump) extra_files.emplace_back("noise.csv", noise_csv.str());
      summary["n"] = config.n;
      summary["eps"] = config.eps;
      summary["paths"] = cfg.paths;
      summary["divergent_paths"] = divergent;
      outcome.assertions.push_back({"no divergent paths", divergent == 0, std::to_string(divergent) + " divergent"});
      break;
    }
    case Command::strong_error:
    case Command::lower_bound: {
      const Preset preset = build_preset(cfg);
      StrongErrorPlan plan = build_strong_plan(cfg);
      std::vector<ErrorReport> reports;
      if (cfg.command == Command::lower_bound) {
        const auto lb = lower_bound_check(preset.model, plan, cfg.seed, cfg.threads);
        reports = lb.reports;
        for (std::size_t k = 0; k < reports.size(); ++k) {
          const auto& r = reports[k];
          outcome.assertions.push_back(
              {r.label + " exponent ceiling", std::isfinite(r.fitted_slope) && r.fitted_slope <= lb.ceilings[k],
               "slope " + format_brief(r.fitted_slope) + " <= " + format_brief(lb.ceilings[k])});
        }
      } else {
        reports = run_strong_error(preset.model, plan, cfg.seed, cfg.threads);
        detail::slope_assertions(cfg, reports, outcome.assertions);
        for (const auto& r : reports) {
          const auto bad = monotonicity_violations(r);
          outcome.assertions.push_back({r.label + " non-increasing", bad.empty(),
                                        std::to_string(bad.size()) + " violations beyond 2 half-widths"});
        }
      }
      summary["eps_min"] = plan.eps_min(preset.model);
      summary["n_max"] = plan.n_max;
      summary["absolutely_continuous"] = preset.model.rate.absolutely_continuous;
      Json series = Json::array();
      for (const auto& r : reports) series.push_back(error_report_json(r));
      summary["series"] = series;
      report_csv = error_reports_csv(reports);
      break;
    }
    case Command::weak_error: {
      const Preset preset = build_preset(cfg);
      if (!preset.weak) throw ConfigError("preset '" + cfg.preset + "' has no closed-form weak reference");
      const WeakErrorPlan plan = build_weak_plan(cfg);
      const auto reports = run_weak_error(preset.model, *preset.weak, plan, cfg.seed, cfg.threads);
      detail::slope_assertions(cfg, reports, outcome.assertions);
      // Ordering at the smallest common eps between the two variants.
      const ErrorReport* with = nullptr;
      const ErrorReport* without = nullptr;
      for (std::size_t k = 0; k < reports.size(); ++k) {
        if (plan.variants[k].variant == Variant::without_substitute) without = &reports[k];
        else with = &reports[k];
      }
      if (with && without) {
        const std::size_t last = with->estimates.size() - 1;
        const double slack = 2.0 * std::hypot(with->std_errors[last], without->std_errors[last]);
        outcome.assertions.push_back(
            {"substitute bias ordering", with->estimates[last] < without->estimates[last] + slack,
             "|bias| " + format_brief(with->estimates[last]) + " vs " +
                 format_brief(without->estimates[last]) + " + " + format_brief(slack)});
      }
      summary["u_exact"] = preset.weak->u_exact(plan.start_t, plan.start_x.value_or(preset.model.x0));
      Json series = Json::array();
      for (const auto& r : reports) series.push_back(error_report_json(r));
      summary["series"] = series;
      report_csv = error_reports_csv(reports);
      break;
    }
    case Command::wasserstein: {
      const auto kernel = make_kernel_preset(cfg.preset, cfg.overrides);
      const auto f_expr = Expression::parse(cfg.plan.at("F"));
      const SpaceTimeFn F = [f_expr](double t, double z) { return f_expr(t, 0.0, z); };
      const auto eps_grid = parse_double_list(cfg.plan.at("eps_grid"), "plan.eps_grid");
      WassersteinOptions opt;
      opt.q = parse_double(cfg.plan.at("q"), "plan.q");
      opt.inner_ratio = parse_double(cfg.plan.at("inner_ratio"), "plan.inner_ratio");
      opt.bootstrap = static_cast<int>(parse_integer(cfg.plan.at("bootstrap"), "plan.bootstrap"));
      const auto report = empirical_wasserstein_check(
          kernel, F, eps_grid, parse_double(cfg.plan.at("t0"), "plan.t0"),
          parse_double(cfg.plan.at("t1"), "plan.t1"), cfg.paths, cfg.seed, cfg.threads, opt);
      const auto a = assess_wasserstein(report);
      outcome.assertions.push_back({"W_q monotone in eps", a.monotone, "within combined CIs"});
      outcome.assertions.push_back({"W_q <= C eps", a.linear, "C = " + format_brief(a.constant)});
      summary["q"] = report.q;
      summary["samples"] = report.samples;
      summary["linear_constant"] = a.constant;
      report_csv = wasserstein_csv(report);
      break;
    }
    case Command::fiber_pdf: {
      const Preset preset = build_preset(cfg);
      const FiberParams params = fiber_params_from(preset.params);
      const SchemeConfig config{static_cast<int>(parse_integer(cfg.plan.at("n"), "plan.n")),
                                parse_double(cfg.plan.at("eps"), "plan.eps"), params.T,
                                Variant::with_substitute};
      const auto snapshots = parse_double_list(cfg.plan.at("snapshots"), "plan.snapshots");
      const auto report = run_fiber_pdf(params, config, cfg.paths, snapshots, cfg.seed, cfg.threads);
      const auto noise_var = noise_variance_curve(params, snapshots);
      summary["stats"] = fiber_stats_json(report, noise_var);
      report_csv = fiber_histogram_csv(report);
      if (report.snapshots.size() >= 2) {
        const double first = report.snapshots.front().excess_kurtosis;
        const double last = report.snapshots.back().excess_kurtosis;
        outcome.assertions.push_back({"kurtosis decreases", first > last,
                                      format_brief(first) + " > " + format_brief(last)});
      }
      break;
    }
  }

  Json checks = Json::array();
  for (const auto& a : outcome.assertions) {
    checks.push_back({{"name", a.name}, {"passed", a.passed}, {"detail", a.detail}});
  }
  summary["assertions"] = checks;
  summary["assertions_passed"] = outcome.assertions_passed();

  outcome.run_dir = make_run_dir(cfg.out_dir, cfg.run_name, cfg.seed);
  write_text(outcome.run_dir / report_name, report_csv);
  for (const auto& [name, text] : extra_files) write_text(outcome.run_dir / name, text);
  write_json(outcome.run_dir / "summary.json", summary);
  write_json(outcome.run_dir / "manifest.json", manifest_json(cfg));
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_json(outcome.run_dir / "timing.json", Json{{"runtime_seconds", elapsed}});
  log << to_string(cfg.command) << ": wrote " << outcome.run_dir.string() << " ("
      << format_brief(elapsed) << " s)\n";
  for (const auto& a : outcome.assertions) {
    log << "  [" << (a.passed ? "ok" : "FAILED") << "] " << a.name << ": " << a.detail << "\n";
  }
  return outcome;
}

}  // namespace jumpsde::cli
