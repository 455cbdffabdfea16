#include <catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "jumpsde/report_io.hpp"

namespace fs = std::filesystem;
using jumpsde::Json;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("jumpsde_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
};

int run_cli(const std::string& args, const fs::path& log) {
  const std::string cmd = std::string(JUMPSDE_CLI_PATH) + " " + args + " > " + log.string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n' ? 1 : 0;
  return n;
}

}  // namespace

TEST_CASE("simulate writes one row per grid point and path", "[property]") {
  Scratch s;
  const auto out = s.dir.string();
  REQUIRE(run_cli("simulate --preset strong_p_sweep --n 16 --paths 2 --seed 1 --out-dir " + out +
                      " --run-name a --record-jumps --dump-noise",
                  s.dir / "log") == 0);
  const auto report = slurp(s.dir / "a" / "report.csv");
  CHECK(report.rfind("path_index,t,x\n", 0) == 0);
  CHECK(count_lines(report) == 1 + 2 * 17);
  CHECK(fs::exists(s.dir / "a" / "jumps.csv"));
  CHECK(slurp(s.dir / "a" / "noise.csv").rfind("path_index,kind,index,value\n", 0) == 0);
  for (const char* f : {"summary.json", "manifest.json", "timing.json"}) CHECK(fs::exists(s.dir / "a" / f));

  SECTION("identical bytes across reruns and thread counts") {
    REQUIRE(run_cli("simulate --preset strong_p_sweep --n 16 --paths 2 --seed 1 --threads 3 --out-dir " + out +
                        " --run-name b --record-jumps --dump-noise",
                    s.dir / "log") == 0);
    CHECK(slurp(s.dir / "b" / "report.csv") == report);
    CHECK(slurp(s.dir / "b" / "noise.csv") == slurp(s.dir / "a" / "noise.csv"));
  }
  SECTION("json output") {
    REQUIRE(run_cli("simulate --n 16 --paths 2 --seed 1 --out json --out-dir " + out + " --run-name j",
                    s.dir / "log") == 0);
    const auto j = Json::parse(slurp(s.dir / "j" / "report.json"));
    REQUIRE(j.size() == 2);
    CHECK(j[1]["x"].size() == 17);
  }
}

TEST_CASE("strong-error desk run", "[property]") {
  Scratch s;
  const auto out = s.dir.string();
  const std::string args = "strong-error --paths 64 --seed 3 --plan n_grid=16,32,64 --plan n_max=256 --out-dir " + out;
  REQUIRE(run_cli(args + " --run-name first", s.dir / "log") == 0);
  const auto summary = Json::parse(slurp(s.dir / "first" / "summary.json"));
  REQUIRE(summary["series"].size() == 1);
  CHECK(summary["series"][0]["fitted_slope"].is_number());
  CHECK(summary["eps_min"].get<double>() == 1.0 / 256);

  SECTION("thread count does not change the report") {
    REQUIRE(run_cli(args + " --threads 4 --run-name threads", s.dir / "log") == 0);
    CHECK(slurp(s.dir / "threads" / "report.csv") == slurp(s.dir / "first" / "report.csv"));
  }
  SECTION("manifest replay reproduces the report") {
    REQUIRE(run_cli("replay " + (s.dir / "first" / "manifest.json").string() + " --out-dir " + out +
                        " --run-name again",
                    s.dir / "log") == 0);
    CHECK(slurp(s.dir / "again" / "report.csv") == slurp(s.dir / "first" / "report.csv"));
    CHECK(slurp(s.dir / "again" / "manifest.json") == slurp(s.dir / "first" / "manifest.json"));
  }
  SECTION("failed expectations exit with status 3 under --assert") {
    CHECK(run_cli(args + " --plan expect_slope_low=5 --run-name strict --assert", s.dir / "log") == 3);
    CHECK(run_cli(args + " --plan expect_slope_low=5 --run-name lax", s.dir / "log") == 0);
  }
}

TEST_CASE("config files drive runs") {
  Scratch s;
  std::ofstream(s.dir / "sim.cfg") << "[experiment]\ncommand = simulate\npaths = 3\nseed = 9\n"
                                      "[plan]\nn = 8\neps = 0.05\n";
  REQUIRE(run_cli("simulate --config " + (s.dir / "sim.cfg").string() + " --out-dir " + s.dir.string() +
                      " --run-name c",
                  s.dir / "log") == 0);
  CHECK(count_lines(slurp(s.dir / "c" / "report.csv")) == 1 + 3 * 9);
  // Flags override the file.
  REQUIRE(run_cli("simulate --config " + (s.dir / "sim.cfg").string() + " --n 4 --out-dir " +
                      s.dir.string() + " --run-name d",
                  s.dir / "log") == 0);
  CHECK(count_lines(slurp(s.dir / "d" / "report.csv")) == 1 + 3 * 5);
}

TEST_CASE("invalid input exits with status 1 and a message") {
  Scratch s;
  const auto out = " --out-dir " + s.dir.string();
  CHECK(run_cli("simulate --plan steps=4" + out, s.dir / "log") == 1);
  CHECK_THAT(slurp(s.dir / "log"), Catch::Matchers::ContainsSubstring("unknown plan key 'steps'"));
  CHECK(run_cli("strong-error --eps 0.01" + out, s.dir / "log") == 1);
  CHECK_THAT(slurp(s.dir / "log"), Catch::Matchers::ContainsSubstring("conflicts with eps_rule"));
  CHECK(run_cli("simulate --set beta=1" + out, s.dir / "log") == 1);
  CHECK(run_cli("simulate --config /nonexistent.cfg" + out, s.dir / "log") == 1);
  std::ofstream(s.dir / "bad.cfg") << "[plan]\nn = 8\nn = 9\n";
  CHECK(run_cli("simulate --config " + (s.dir / "bad.cfg").string() + out, s.dir / "log") == 1);
  CHECK_THAT(slurp(s.dir / "log"), Catch::Matchers::ContainsSubstring("bad.cfg:3: duplicate key 'n'"));
}
