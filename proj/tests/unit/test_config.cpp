#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <string>

#include "jumpsde/cli.hpp"
#include "jumpsde/config.hpp"
#include "jumpsde/expression.hpp"

using namespace jumpsde;
using namespace jumpsde::cli;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("config files parse sections, comments and whitespace") {
  const auto f = ConfigFile::parse(
      "# leading comment\n"
      "command = strong-error\n"
      "\n"
      "[plan]\n"
      "  n_grid = 16, 32 ,64   ; trailing comment\n"
      "[preset]\n"
      "alpha=0.7\n",
      "demo.cfg");
  const auto& s = f.sections();
  CHECK(s.at("experiment").at("command").value == "strong-error");
  CHECK(s.at("plan").at("n_grid").value == "16, 32 ,64");
  CHECK(s.at("plan").at("n_grid").line == 5);
  CHECK(s.at("preset").at("alpha").value == "0.7");
}

TEST_CASE("config errors name the line") {
  CHECK_THROWS_WITH(ConfigFile::parse("a = 1\nbroken\n", "x.cfg"), ContainsSubstring("x.cfg:2:"));
  CHECK_THROWS_WITH(ConfigFile::parse("[plan\n", "x.cfg"), ContainsSubstring("x.cfg:1: malformed section"));
  CHECK_THROWS_WITH(ConfigFile::parse("a = 1\n\na = 2\n", "x.cfg"),
                    ContainsSubstring("x.cfg:3: duplicate key 'a' (first set on line 1)"));
  CHECK_THROWS_WITH(ConfigFile::parse("bad key = 1\n", "x.cfg"), ContainsSubstring("invalid key"));
  CHECK_THROWS_WITH(from_file(ConfigFile::parse("command = simulate\n[plan]\nsteps = 4\n", "x.cfg")),
                    ContainsSubstring("x.cfg:3: unknown plan key 'steps'"));
  CHECK_THROWS_WITH(from_file(ConfigFile::parse("[extra]\nk = 1\n", "x.cfg")),
                    ContainsSubstring("unknown section [extra]"));
  CHECK_THROWS_WITH(from_file(ConfigFile::parse("[preset]\nbeta = 1\n", "x.cfg")),
                    ContainsSubstring("x.cfg:2: preset 'strong_p_sweep' has no parameter 'beta'"));
  CHECK_THROWS_WITH(from_file(ConfigFile::parse("nonsense = 1\n", "x.cfg")),
                    ContainsSubstring("unknown key 'nonsense'"));
  CHECK_THROWS_WITH(from_file(ConfigFile::parse("command = weak-error\n", "x.cfg"), Command::simulate),
                    ContainsSubstring("x.cfg:1: config is for 'weak-error'"));
}

TEST_CASE("value parsing") {
  CHECK(parse_double("0.25", "v") == 0.25);
  CHECK_THROWS_AS(parse_double("0.25x", "v"), ConfigError);
  CHECK(parse_integer("1e4", "v") == 10000);
  CHECK_THROWS_AS(parse_integer("1.5", "v"), ConfigError);
  CHECK(parse_bool("yes", "v"));
  CHECK_FALSE(parse_bool("off", "v"));
  CHECK_THROWS_AS(parse_bool("maybe", "v"), ConfigError);
  CHECK(split_list(" a, b ,,c ") == std::vector<std::string>{"a", "b", "c"});
  CHECK(parse_int_list("16,32", "v") == std::vector<int>{16, 32});
  CHECK_THROWS_AS(parse_double_list(" , ", "v"), ConfigError);
}

TEST_CASE("finalize applies defaults and rejects conflicts") {
  ExperimentConfig cfg;
  cfg.command = Command::strong_error;
  finalize(cfg);
  CHECK(cfg.preset == "strong_p_sweep");
  CHECK(cfg.paths == 10000);
  CHECK(cfg.plan.at("eps_rule") == "half_plus_inv_p");

  ExperimentConfig conflict;
  conflict.command = Command::strong_error;
  set_plan_value(conflict, "eps", "0.01", "test");
  CHECK_THROWS_WITH(finalize(conflict), ContainsSubstring("conflicts with eps_rule"));
  set_plan_value(conflict, "eps_rule", "explicit", "test");
  CHECK_NOTHROW(finalize(conflict));

  ExperimentConfig missing;
  missing.command = Command::strong_error;
  set_plan_value(missing, "eps_rule", "explicit", "test");
  CHECK_THROWS_AS(finalize(missing), ConfigError);

  ExperimentConfig fiber;
  fiber.command = Command::fiber_pdf;
  fiber.preset = "strong_p_sweep";
  CHECK_THROWS_AS(finalize(fiber), ConfigError);

  ExperimentConfig stray;
  stray.command = Command::simulate;
  stray.model["drift"] = "x";
  CHECK_THROWS_WITH(finalize(stray), ContainsSubstring("preset = custom"));
}

TEST_CASE("empty overrides give the preset defaults") {
  for (const auto& name : model_preset_names()) {
    const auto preset = make_preset(name);
    CHECK(preset.params == model_preset_defaults(name));
  }
  CHECK_THROWS_AS(make_preset("strong_p_sweep", {{"beta", 1.0}}), PreconditionError);
  CHECK_THROWS_AS(make_preset("no_such_preset"), PreconditionError);
}

TEST_CASE("resolved configs round-trip through text and manifests") {
  ExperimentConfig cfg;
  cfg.command = Command::weak_error;
  cfg.seed = 42;
  cfg.paths = 500;
  cfg.overrides["alpha"] = 1.25;
  set_plan_value(cfg, "start_x", "3", "test");
  finalize(cfg);

  auto reread = from_file(ConfigFile::parse(to_config_text(cfg)));
  finalize(reread);
  CHECK(to_config_text(reread) == to_config_text(cfg));
  CHECK(manifest_json(reread) == manifest_json(cfg));

  const auto replayed = from_manifest(manifest_json(cfg));
  CHECK(to_config_text(replayed) == to_config_text(cfg));
  CHECK_THROWS_AS(from_manifest(Json{{"tool", "other"}}), ConfigError);
}

TEST_CASE("custom models from expressions") {
  ExperimentConfig cfg;
  cfg.command = Command::simulate;
  cfg.preset = "custom";
  cfg.model["drift"] = "-x";
  cfg.model["jump_scale"] = "sin(x)";
  cfg.model["x0"] = "0.5";
  finalize(cfg);
  const auto preset = build_preset(cfg);
  CHECK(preset.model.x0 == 0.5);
  CHECK_THAT(preset.model.a(0.0, 2.0), WithinAbs(-2.0, 1e-15));
  CHECK_THAT(preset.model.c(0.0, 0.3, 0.5), WithinRel(std::sin(0.3) * 0.5, 1e-14));
  CHECK_FALSE(preset.model.rate.absolutely_continuous);
  cfg.model["absolutely_continuous"] = "true";
  CHECK(build_preset(cfg).model.rate.absolutely_continuous);
  CHECK(make_preset("weak_arctan").model.rate.absolutely_continuous);
}

TEST_CASE("expressions") {
  const auto eval = [](const char* s, double t = 0.0, double x = 0.0, double z = 0.0) {
    return Expression::parse(s)(t, x, z);
  };
  CHECK(eval("2 + 3 * 4") == 14.0);
  CHECK(eval("(2 + 3) * 4") == 20.0);
  CHECK(eval("-2^2") == -4.0);
  CHECK(eval("2^3^2") == 512.0);
  CHECK(eval("8 / 4 / 2") == 1.0);
  CHECK(eval("1 - 2 - 3") == -4.0);
  CHECK(eval("1.5e-1") == 0.15);
  CHECK_THAT(eval("sin(pi / 2) + log(e)"), WithinAbs(2.0, 1e-15));
  CHECK_THAT(eval("arctan(x * z)", 0.0, 2.0, 0.5), WithinAbs(std::atan(1.0), 1e-15));
  CHECK(eval("atan(x)", 0.0, 1.0) == eval("arctan(x)", 0.0, 1.0));
  CHECK(eval("abs(t - x) + sqrt(z)", 1.0, 3.0, 4.0) == 4.0);
  CHECK_THAT(eval("exp(-x^2) * cos(2*t)", 0.5, 1.0), WithinAbs(std::exp(-1.0) * std::cos(1.0), 1e-15));

  const auto e = Expression::parse("x * z");
  CHECK(e.uses_z());
  CHECK_FALSE(e.uses_t());
  CHECK(e.source() == "x * z");

  for (const char* bad : {"", "sin(", "2 3", "foo", "sin x", "(1 + 2", "1 +", "cosh(x)", "x ** 2"}) {
    CHECK_THROWS_AS(Expression::parse(bad), PreconditionError);
  }
}

TEST_CASE("shipped configs resolve") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(JUMPSDE_CONFIG_DIR)) {
    if (entry.path().extension() != ".cfg") continue;
    ++seen;
    INFO(entry.path().string());
    auto cfg = from_file(ConfigFile::load(entry.path().string()));
    REQUIRE_NOTHROW(finalize(cfg));
    if (cfg.command != Command::wasserstein) CHECK_NOTHROW(build_preset(cfg));
  }
  CHECK(seen >= 7);
}
