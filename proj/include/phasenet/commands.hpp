#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "phasenet/config.hpp"

namespace phasenet {

/// Exit statuses shared by the command-line tool.
enum ExitStatus : int {
  kExitOk = 0,
  kExitFailure = 1,   ///< a check failed or the run could not complete
  kExitBadConfig = 2,
  kExitFlagged = 3,   ///< finished, but some level did not converge
};

/// Values given on the command line; they take precedence over the file.
struct Overrides {
  std::optional<double> lambda;
  std::optional<double> eps_final;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
};

/// Default configuration of the Steiner command: three terminals on an
/// equilateral triangle of side 0.4 centered in the unit square.
RunConfig steiner_defaults();

/// Loads `config_path` (or starts from `defaults` when empty), applies the
/// overrides and validates. Throws ConfigError.
RunConfig resolve_config(const std::string& config_path, const RunConfig& defaults,
                         const Overrides& overrides);

/// Runs continuation and writes fields, run log, summary and a config echo
/// into cfg.output_dir. Returns kExitOk or kExitFlagged.
int run_compliance(const RunConfig& cfg, std::ostream& log);
int run_steiner(const RunConfig& cfg, std::ostream& log);

/// Prints the Steiner tree length of 1 to 4 points given as x y pairs.
int run_oracle(const std::vector<double>& coords, std::ostream& out);

int run_check(std::uint64_t seed, std::ostream& out);

}  // namespace phasenet
