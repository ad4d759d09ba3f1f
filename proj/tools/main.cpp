#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "phasenet/commands.hpp"

using namespace phasenet;

namespace {

struct Common {
  std::string config;
  Overrides overrides;
  double lambda = 0.0;
  double eps_final = 0.0;
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "configuration file ([section] key = value)");
  cmd->add_option("--out", c.out, "output directory (overrides output.dir)");
  cmd->add_option("--lambda", c.lambda, "length penalty (overrides problem.lambda)");
  cmd->add_option("--eps-final", c.eps_final, "final eps (overrides schedule.eps_final)");
  cmd->add_option("--seed", c.seed, "random seed (overrides output.seed)");
}

Overrides collect(CLI::App* cmd, const Common& c) {
  Overrides o;
  if (cmd->count("--lambda")) o.lambda = c.lambda;
  if (cmd->count("--eps-final")) o.eps_final = c.eps_final;
  if (cmd->count("--seed")) o.seed = c.seed;
  if (cmd->count("--out")) o.output_dir = c.out;
  return o;
}

int run_solver(CLI::App* cmd, const Common& c, const RunConfig& defaults, bool steiner) {
  RunConfig cfg;
  try {
    cfg = resolve_config(c.config, defaults, collect(cmd, c));
    if (cfg.problem.mode != (steiner ? Mode::kSteiner : Mode::kCompliance)) {
      throw ConfigError(std::string("problem.mode must be ") +
                        (steiner ? "steiner" : "compliance") + " for this command");
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  try {
    return steiner ? run_steiner(cfg, std::cout) : run_compliance(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-field solver for connected-set problems"};
  app.require_subcommand(1);

  Common comp, stein;
  CLI::App* c_cmd = app.add_subcommand("compliance", "minimize compliance plus length");
  add_common(c_cmd, comp);
  CLI::App* s_cmd = app.add_subcommand("steiner", "approximate a Steiner tree");
  add_common(s_cmd, stein);

  std::vector<double> coords;
  CLI::App* o_cmd = app.add_subcommand("oracle", "exact Steiner length of 1 to 4 points");
  o_cmd->add_option("points", coords, "coordinates x1 y1 x2 y2 ...")->required();

  std::uint64_t check_seed = 12345;
  CLI::App* k_cmd = app.add_subcommand("check", "run the invariant and oracle suite");
  k_cmd->add_option("--seed", check_seed, "random seed for the generated fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitBadConfig;
  }

  if (*c_cmd) return run_solver(c_cmd, comp, RunConfig{}, false);
  if (*s_cmd) return run_solver(s_cmd, stein, steiner_defaults(), true);
  if (*o_cmd) return run_oracle(coords, std::cout);
  if (*k_cmd) return run_check(check_seed, std::cout);
  return kExitFailure;
}
