#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "phasenet/energy.hpp"
#include "phasenet/grid.hpp"
#include "phasenet/optimize.hpp"

namespace phasenet {

/// Raised for malformed or inconsistent configuration text.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run needs. Defaults reproduce the compliance experiment on
/// (0, 0.5) x (0, 1) with h = 1/100.
struct RunConfig {
  double width = 0.5;
  double height = 1.0;
  double h = 0.01;
  Point origin{0.0, 0.0};

  ProblemConfig problem;

  double eps0 = 0.2;
  double rho = 0.7;
  double eps_final = 0.05;
  double delta = 1e-6;
  bool delta_relative = true;

  OptimizerParams optimizer;

  std::string output_dir = "out";
  std::uint64_t seed = 0;
  /// Write field snapshots every this many levels; the last level is always
  /// written.
  int snapshot_every = 1;

  RunConfig();

  GridSpec grid() const;
  Schedule schedule() const;
  /// Throws ConfigError on the first violated invariant.
  void validate() const;
};

/// Parses "key = value" lines grouped under [section] headers. Blank lines
/// and lines starting with '#' are ignored. Unknown sections or keys, bad
/// numbers and duplicate keys raise ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical text of a config, with every key present; parse_config of the
/// result reproduces the config.
std::string echo_config(const RunConfig& cfg);

}  // namespace phasenet
