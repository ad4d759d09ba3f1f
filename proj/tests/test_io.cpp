#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "phasenet/io.hpp"

using namespace phasenet;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("pgm maps eta to black and one to white, top row first") {
  const GridSpec g(3, 2, 0.5);
  const double eta = 0.01;
  ScalarField phi(g, 1.0);
  phi(0, 0) = eta;                   // bottom-left
  phi(2, 1) = 0.5 * (1.0 + eta);     // top-right, mid gray
  const std::string path = (std::filesystem::temp_directory_path() / "phasenet_io.pgm").string();
  write_pgm(phi, eta, 1.0, path);
  const std::string data = slurp(path);
  const std::string header = "P5\n3 2\n255\n";
  REQUIRE(data.size() == header.size() + 6);
  CHECK(data.substr(0, header.size()) == header);
  const auto px = [&](std::size_t k) { return static_cast<unsigned char>(data[header.size() + k]); };
  // first written row is j = 1
  CHECK(px(0) == 255);
  CHECK(px(1) == 255);
  CHECK((px(2) == 127 || px(2) == 128));
  CHECK(px(3) == 0);
  CHECK(px(4) == 255);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(write_pgm(phi, 1.0, 1.0, path), std::invalid_argument);
}

TEST_CASE("json records carry the logged fields") {
  OuterRecord r;
  r.level = 2;
  r.eps = 0.1;
  r.outer_n = 4;
  r.breakdown.total = 3.5;
  r.grad_norm_v = 1e-3;
  r.wall_ms = 12.0;
  const nlohmann::json j = to_json(r);
  CHECK(j["level"] == 2);
  CHECK(j["breakdown"]["total"] == 3.5);
  CHECK(j["grad_norms"]["v"] == 1e-3);
  CHECK(j["wall_ms"] == 12.0);

  RunLog log;
  log.records = {r, r};
  const std::string path = (std::filesystem::temp_directory_path() / "phasenet_io.jsonl").string();
  write_runlog(log, path);
  std::ifstream is(path);
  std::string line;
  int n = 0;
  while (std::getline(is, line)) {
    CHECK(nlohmann::json::parse(line)["outer_n"] == 4);
    ++n;
  }
  CHECK(n == 2);
  std::filesystem::remove(path);
}
