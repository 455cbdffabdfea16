// Command-line front end: one subcommand per experiment, plus `replay` to
// rerun the experiment recorded in a manifest.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jumpsde/cli.hpp"

namespace {

using namespace jumpsde;
using namespace jumpsde::cli;

struct Flags {
  std::string config;
  std::string preset;
  std::uint64_t seed = 1;
  int threads = 0;
  std::uint64_t paths = 0;
  std::string out_dir;
  std::string run_name;
  bool assert_mode = false;
  std::vector<std::string> set;
  std::vector<std::string> plan;
  bool dump_noise = false;
  bool record_jumps = false;
  std::string n;
  std::string eps;
  std::string eps_rule;
  std::string variant;
  std::string format;
  std::map<std::string, double> fiber;
  std::string manifest;
};

std::pair<std::string, std::string> split_assignment(const std::string& s, const std::string& flag) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw ConfigError(flag + " expects KEY=VALUE, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "Experiment config file");
  sub->add_option("--preset", f.preset, "Model (or kernel) preset name");
  sub->add_option("--seed", f.seed, "Master seed");
  sub->add_option("--threads", f.threads, "Worker threads (0: JUMPSDE_THREADS or hardware)");
  sub->add_option("--paths", f.paths, "Monte Carlo paths or samples");
  sub->add_option("--out-dir", f.out_dir, "Parent directory of run directories");
  sub->add_option("--run-name", f.run_name, "Run directory name (default: timestamp and seed)");
  sub->add_flag("--assert", f.assert_mode, "Exit with status 3 when a built-in check fails");
  sub->add_option("--set", f.set, "Preset parameter override KEY=VALUE")->take_all();
  sub->add_option("--plan", f.plan, "Plan entry KEY=VALUE")->take_all();
}

ExperimentConfig resolve(Command command, const Flags& f, const CLI::App& sub) {
  ExperimentConfig cfg;
  if (!f.config.empty()) {
    cfg = from_file(ConfigFile::load(f.config), command);
  } else {
    cfg.command = command;
  }
  if (sub.count("--preset")) cfg.preset = f.preset;
  if (cfg.preset.empty()) cfg.preset = default_preset(command);
  if (sub.count("--seed")) cfg.seed = f.seed;
  if (sub.count("--threads")) cfg.threads = f.threads;
  if (sub.count("--paths")) cfg.paths = f.paths;
  if (sub.count("--out-dir")) cfg.out_dir = f.out_dir;
  if (sub.count("--run-name")) cfg.run_name = f.run_name;
  for (const auto& s : f.set) {
    const auto [k, v] = split_assignment(s, "--set");
    cfg.overrides[k] = parse_double(v, "--set " + k);
  }
  for (const auto& [k, v] : f.fiber) cfg.overrides[k] = v;
  for (const auto& s : f.plan) {
    const auto [k, v] = split_assignment(s, "--plan");
    set_plan_value(cfg, k, v, "--plan");
  }
  if (!f.n.empty()) set_plan_value(cfg, "n", f.n, "--n");
  if (!f.eps.empty()) set_plan_value(cfg, "eps", f.eps, "--eps");
  if (!f.eps_rule.empty()) set_plan_value(cfg, "eps_rule", f.eps_rule, "--eps-rule");
  if (!f.variant.empty()) set_plan_value(cfg, "variant", f.variant, "--variant");
  if (!f.format.empty()) set_plan_value(cfg, "format", f.format, "--out");
  if (f.dump_noise) set_plan_value(cfg, "dump_noise", "true", "--dump-noise");
  if (f.record_jumps) set_plan_value(cfg, "record_jumps", "true", "--record-jumps");
  finalize(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and convergence experiments for jump SDEs with eps-Euler-Maruyama schemes"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));
  Flags flags;
  std::map<CLI::App*, Command> commands;

  auto* sim = app.add_subcommand("simulate", "Simulate paths on one grid and write them as CSV");
  add_common(sim, flags);
  sim->add_option("--n", flags.n, "Number of steps");
  sim->add_option("--eps", flags.eps, "Small-jump cutoff");
  sim->add_option("--variant", flags.variant, "with_substitute, without_substitute or euler_peano");
  sim->add_flag("--dump-noise", flags.dump_noise, "Also write every noise realisation to noise.csv");
  sim->add_option("--out", flags.format, "Path output format: csv or json");
  sim->add_flag("--record-jumps", flags.record_jumps, "Also write the applied jumps to jumps.csv");
  commands[sim] = Command::simulate;

  auto* strong = app.add_subcommand("strong-error", "Strong L^p sup-error against a fine reference");
  add_common(strong, flags);
  strong->add_option("--eps", flags.eps, "Explicit eps_min (needs --eps-rule explicit)");
  strong->add_option("--eps-rule", flags.eps_rule, "half_plus_inv_p, bg_rule, integrability or explicit");
  commands[strong] = Command::strong_error;

  auto* weak = app.add_subcommand("weak-error", "Weak error against a closed-form Kolmogorov solution");
  add_common(weak, flags);
  commands[weak] = Command::weak_error;

  auto* wass = app.add_subcommand("wasserstein", "Empirical W_q of the Gaussian small-jump substitute");
  add_common(wass, flags);
  commands[wass] = Command::wasserstein;

  auto* lower = app.add_subcommand("lower-bound", "Euler-Peano error decay on the subordinator model");
  add_common(lower, flags);
  lower->add_option("--eps", flags.eps, "Explicit eps_min (needs --eps-rule explicit)");
  lower->add_option("--eps-rule", flags.eps_rule, "half_plus_inv_p, bg_rule, integrability or explicit");
  commands[lower] = Command::lower_bound;

  auto* fiber = app.add_subcommand("fiber-pdf", "Fibre angle statistics and renormalised PDFs");
  add_common(fiber, flags);
  fiber->add_option("--n", flags.n, "Number of steps");
  fiber->add_option("--eps", flags.eps, "Small-jump cutoff");
  for (const char* name : {"sigma", "gamma0", "gamma1", "gamma2", "gamma3", "gamma4", "alpha",
                           "z_minus", "z_plus", "Tstar", "q", "theta0", "T", "jumps"}) {
    std::string flag = "--";
    for (const char* c = name; *c; ++c) flag += *c == '_' ? '-' : *c;
    fiber->add_option_function<double>(
        flag, [&flags, key = std::string(name)](double v) { flags.fiber[key] = v; },
        "Fibre parameter " + std::string(name));
  }
  commands[fiber] = Command::fiber_pdf;

  auto* replay = app.add_subcommand("replay", "Rerun the experiment recorded in a manifest.json");
  replay->add_option("manifest", flags.manifest, "Path to manifest.json")->required();
  replay->add_option("--out-dir", flags.out_dir, "Parent directory of the new run directory");
  replay->add_option("--run-name", flags.run_name, "Run directory name");
  replay->add_flag("--assert", flags.assert_mode, "Exit with status 3 when a built-in check fails");

  CLI11_PARSE(app, argc, argv);

  try {
    ExperimentConfig cfg;
    if (replay->parsed()) {
      std::ifstream in(flags.manifest);
      if (!in) throw ConfigError("cannot read manifest '" + flags.manifest + "'");
      cfg = from_manifest(Json::parse(in));
      if (replay->count("--out-dir")) cfg.out_dir = flags.out_dir;
      cfg.run_name = replay->count("--run-name") ? flags.run_name : std::string();
    } else {
      for (const auto& [sub, command] : commands) {
        if (sub->parsed()) cfg = resolve(command, flags, *sub);
      }
    }
    const RunOutcome outcome = run(cfg, std::cout);
    if (flags.assert_mode && !outcome.assertions_passed()) return kExitAssertion;
    return kExitOk;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
}
