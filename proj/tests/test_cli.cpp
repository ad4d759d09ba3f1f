#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string output;
};

Run run(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / "phasenet_cli_test.log";
  const std::string cmd = std::string(PHASENET_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  std::ifstream is(log);
  std::ostringstream ss;
  ss << is.rdbuf();
  r.output = ss.str();
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("phasenet_cli_" + name);
  fs::remove_all(p);
  return p;
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream os(p);
  os << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

const char* kTwoTerminals = R"([grid]
width = 1
height = 1
h = 0.02

[problem]
mode = steiner
terminals = 0.25 0.5; 0.75 0.5

[schedule]
eps0 = 0.2
rho = 0.7
eps_final = 0.02
)";

}  // namespace

TEST_CASE("malformed config exits with status 2 and writes nothing") {
  const fs::path dir = scratch("bad");
  fs::create_directories(dir);
  write_file(dir / "bad.cfg", "[grid]\nwidth = 1\nbogus = 3\n");
  const fs::path out = dir / "out";
  const Run r = run("compliance --config " + (dir / "bad.cfg").string() + " --out " + out.string());
  CHECK(r.status == 2);
  CHECK(r.output.find("bogus") != std::string::npos);
  CHECK_FALSE(fs::exists(out));

  CHECK(run("compliance --config " + (dir / "missing.cfg").string() + " --out " + out.string()).status == 2);
  CHECK(run("compliance --lambda -4 --out " + out.string()).status == 2);
  CHECK_FALSE(fs::exists(out));
  fs::remove_all(dir);
}

TEST_CASE("oracle and check commands") {
  const Run o = run("oracle 0 0 1 0 1 1 0 1");
  CHECK(o.status == 0);
  CHECK(std::stod(o.output) == doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(1e-10));
  CHECK(run("oracle 0 0 1").status == 2);
  const Run c = run("check");
  CHECK(c.status == 0);
  CHECK(c.output.find("FAIL") == std::string::npos);
}

TEST_CASE("steiner runs write the documented outputs") {
  const fs::path dir = scratch("steiner");
  fs::create_directories(dir);
  write_file(dir / "two.cfg", kTwoTerminals);

  SUBCASE("two terminals") {
    const Run r = run("steiner --config " + (dir / "two.cfg").string() + " --out " + (dir / "a").string());
    REQUIRE(r.status == 0);
    for (const char* f : {"phi.csv", "d.csv", "phi.pgm", "runlog.jsonl", "summary.json", "config.txt",
                          "level_00/phi.csv", "level_07/phi.pgm"})
      CHECK(fs::exists(dir / "a" / f));
    const auto summary = nlohmann::json::parse(slurp(dir / "a" / "summary.json"));
    CHECK(summary["connected"].get<bool>());
    CHECK(summary["contains_terminals"].get<bool>());
    CHECK(summary["exact_steiner"].get<double>() == doctest::Approx(0.5));
    CHECK(std::abs(summary["mm_length"].get<double>() - 0.5) <= 0.15 * 0.5);

    std::ifstream log(dir / "a" / "runlog.jsonl");
    std::string line;
    int lines = 0;
    while (std::getline(log, line)) {
      const auto rec = nlohmann::json::parse(line);
      CHECK(rec.contains("breakdown"));
      CHECK(rec.contains("grad_norms"));
      CHECK(rec.contains("wall_ms"));
      ++lines;
    }
    CHECK(lines > 0);

    const std::string pgm = slurp(dir / "a" / "phi.pgm");
    CHECK(pgm.rfind("P5\n50 50\n255\n", 0) == 0);
    CHECK(pgm.size() == std::string("P5\n50 50\n255\n").size() + 2500);

    // same config and seed reproduce the fields byte for byte
    const Run again = run("steiner --config " + (dir / "two.cfg").string() + " --out " + (dir / "b").string());
    REQUIRE(again.status == 0);
    CHECK(slurp(dir / "a" / "phi.csv") == slurp(dir / "b" / "phi.csv"));
    CHECK(slurp(dir / "a" / "d.csv") == slurp(dir / "b" / "d.csv"));
    CHECK(slurp(dir / "a" / "level_03" / "phi.csv") == slurp(dir / "b" / "level_03" / "phi.csv"));
  }
  SUBCASE("single terminal has no length") {
    std::string text = kTwoTerminals;
    text.replace(text.find("0.25 0.5; 0.75 0.5"), 18, "0.5 0.5");
    write_file(dir / "one.cfg", text);
    const Run r = run("steiner --config " + (dir / "one.cfg").string() + " --out " + (dir / "c").string());
    REQUIRE(r.status == 0);
    const auto summary = nlohmann::json::parse(slurp(dir / "c" / "summary.json"));
    CHECK(summary["mm_length"].get<double>() <= 1e-3);
  }
  SUBCASE("mode mismatch is a config error") {
    const Run r = run("compliance --config " + (dir / "two.cfg").string() + " --out " + (dir / "d").string());
    CHECK(r.status == 2);
    CHECK_FALSE(fs::exists(dir / "d"));
  }
  fs::remove_all(dir);
}
