#include "phasenet/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "phasenet/analysis.hpp"
#include "phasenet/checks.hpp"
#include "phasenet/io.hpp"

namespace phasenet {

namespace fs = std::filesystem;

namespace {

std::string level_dir(const std::string& root, std::size_t level) {
  char name[32];
  std::snprintf(name, sizeof name, "level_%02zu", level);
  return (fs::path(root) / name).string();
}

bool snapshot_due(const RunConfig& cfg, std::size_t level, std::size_t levels) {
  return level + 1 == levels || level % static_cast<std::size_t>(cfg.snapshot_every) == 0;
}

void write_config_echo(const RunConfig& cfg, const Schedule& sched) {
  const GridSpec g = cfg.grid();
  std::ofstream os(fs::path(cfg.output_dir) / "config.txt");
  os << echo_config(cfg);
  os << "\n# resolved: nx = " << g.nx() << ", ny = " << g.ny() << '\n';
  for (std::size_t l = 0; l < sched.eps_values.size(); ++l) {
    const ProblemConfig p = config_at(cfg.problem, sched.eps_values[l], cfg.optimizer);
    os << "# level " << l << ": eps = " << p.eps << ", eta = " << p.eta;
    if (cfg.problem.mode == Mode::kSteiner) os << ", c_eps = " << p.c_eps;
    os << '\n';
  }
}

void write_fields(const std::string& dir, const ScalarField& phi, const ScalarField& d,
                  const StaggeredField* v, double eta) {
  fs::create_directories(dir);
  write_csv(phi, (fs::path(dir) / "phi.csv").string());
  write_csv(d, (fs::path(dir) / "d.csv").string());
  if (v) {
    write_csv(divergence(*v), (fs::path(dir) / "divv.csv").string());
  }
  write_pgm(phi, eta, 1.0, (fs::path(dir) / "phi.pgm").string());
}

nlohmann::json mask_summary(const CellMask& mask, const std::vector<CellIndex>& cells) {
  const Connectivity c = connected(mask);
  bool contains = true;
  for (const CellIndex& k : cells) contains = contains && mask(k);
  return {{"connected", c.is_connected},
          {"component_count", c.component_count},
          {"contains_terminals", contains},
          {"cells", mask.count()}};
}

RunLog merge_logs(const std::vector<AlternateResult>& levels) {
  RunLog log;
  for (const AlternateResult& r : levels) {
    log.records.insert(log.records.end(), r.log.records.begin(), r.log.records.end());
    log.levels.insert(log.levels.end(), r.log.levels.begin(), r.log.levels.end());
    log.warnings.insert(log.warnings.end(), r.log.warnings.begin(), r.log.warnings.end());
    log.flagged = log.flagged || r.log.flagged;
  }
  return log;
}

nlohmann::json levels_json(const RunLog& log) {
  nlohmann::json arr = nlohmann::json::array();
  for (const LevelSummary& s : log.levels) arr.push_back(to_json(s));
  return arr;
}

}  // namespace

RunConfig steiner_defaults() {
  RunConfig cfg;
  cfg.width = 1.0;
  cfg.height = 1.0;
  cfg.h = 0.01;
  cfg.problem.mode = Mode::kSteiner;
  cfg.problem.lambda = 1.0;
  const double side = 0.4, r = side / std::sqrt(3.0);
  for (int k = 0; k < 3; ++k) {
    const double a = std::acos(-1.0) * (0.5 + 2.0 * k / 3.0);
    cfg.problem.terminals.push_back({0.5 + r * std::cos(a), 0.5 + r * std::sin(a)});
  }
  cfg.problem.source = cfg.problem.terminals.front();
  cfg.eps0 = 0.2;
  cfg.eps_final = 0.02;
  return cfg;
}

RunConfig resolve_config(const std::string& config_path, const RunConfig& defaults,
                         const Overrides& o) {
  RunConfig cfg = config_path.empty() ? defaults : load_config(config_path);
  if (o.lambda) cfg.problem.lambda = *o.lambda;
  if (o.eps_final) cfg.eps_final = *o.eps_final;
  if (o.seed) cfg.seed = *o.seed;
  if (o.output_dir) cfg.output_dir = *o.output_dir;
  cfg.validate();
  return cfg;
}

int run_compliance(const RunConfig& cfg, std::ostream& log) {
  if (cfg.problem.mode != Mode::kCompliance) {
    throw ConfigError("problem.mode must be compliance for this command");
  }
  cfg.validate();
  const GridSpec grid = cfg.grid();
  const Schedule sched = cfg.schedule();
  fs::create_directories(cfg.output_dir);
  write_config_echo(cfg, sched);

  const ProblemConfig first = config_at(cfg.problem, sched.eps_values.front(), cfg.optimizer);
  const ScalarField phi0 = initial_guess(grid, cfg.problem.source, first.eta);
  log << "compliance: " << grid.nx() << "x" << grid.ny() << " cells, lambda = "
      << cfg.problem.lambda << ", " << sched.eps_values.size() << " levels\n";
  const std::vector<AlternateResult> levels =
      continuation(cfg.problem, sched, phi0, cfg.optimizer);

  const CellIndex y0 = grid.snap(cfg.problem.source);
  for (std::size_t l = 0; l < levels.size(); ++l) {
    const ProblemConfig p = config_at(cfg.problem, sched.eps_values[l], cfg.optimizer);
    const GeodesicResult geo = fast_march(levels[l].phi, y0, p.eta);
    if (snapshot_due(cfg, l, levels.size())) {
      write_fields(level_dir(cfg.output_dir, l), levels[l].phi, geo.d, &levels[l].v, p.eta);
    }
    log << "  level " << l << " eps = " << p.eps << " G = " << levels[l].energy.total
        << " outer = " << levels[l].log.levels.front().outer_iterations << '\n';
  }
  const RunLog all = merge_logs(levels);
  write_runlog(all, (fs::path(cfg.output_dir) / "runlog.jsonl").string());

  const AlternateResult& last = levels.back();
  const ProblemConfig pf = config_at(cfg.problem, sched.eps_values.back(), cfg.optimizer);
  const GeodesicResult geo = fast_march(last.phi, y0, pf.eta);
  write_fields(cfg.output_dir, last.phi, geo.d, &last.v, pf.eta);

  const CellMask phi_set = threshold(last.phi, 0.5, true);
  const double dstar = default_distance_threshold(last.phi);
  const CellMask d_set = threshold(geo.d, dstar, true);
  const nlohmann::json a = mask_summary(phi_set, {y0});
  nlohmann::json summary = {
      {"mode", "compliance"},
      {"mm_length", mm_length(last.phi, pf.eps)},
      {"connected", a["connected"]},
      {"component_count", a["component_count"]},
      {"contains_terminals", a["contains_terminals"]},
      {"i_lambda", i_lambda(phi_set, 5.0 * grid.h(), 64)},
      {"phi_level_set", a},
      {"distance_set", mask_summary(d_set, {y0})},
      {"distance_threshold", dstar},
      {"energy", to_json(last.energy)},
      {"levels", levels_json(all)},
      {"warnings", all.warnings},
      {"flagged", all.flagged}};
  write_json(summary, (fs::path(cfg.output_dir) / "summary.json").string());
  for (const std::string& w : all.warnings) log << "warning: " << w << '\n';
  return all.flagged ? kExitFlagged : kExitOk;
}

int run_steiner(const RunConfig& cfg, std::ostream& log) {
  if (cfg.problem.mode != Mode::kSteiner) {
    throw ConfigError("problem.mode must be steiner for this command");
  }
  cfg.validate();
  const GridSpec grid = cfg.grid();
  const Schedule sched = cfg.schedule();
  ProblemConfig base = cfg.problem;
  base.source = base.terminals.front();
  fs::create_directories(cfg.output_dir);
  write_config_echo(cfg, sched);

  const ProblemConfig first = config_at(base, sched.eps_values.front(), cfg.optimizer);
  const ScalarField phi0 = initial_guess(grid, base.source, first.eta);
  log << "steiner: " << grid.nx() << "x" << grid.ny() << " cells, "
      << base.terminals.size() << " terminals, " << sched.eps_values.size() << " levels\n";
  const SteinerResult res = steiner_minimize(base, sched, phi0, cfg.optimizer);

  const CellIndex src = grid.snap(base.source);
  for (std::size_t l = 0; l < res.levels.size(); ++l) {
    const ProblemConfig p = config_at(base, res.levels[l].eps, cfg.optimizer);
    if (snapshot_due(cfg, l, res.levels.size())) {
      const GeodesicResult geo = fast_march(res.levels[l].phi, src, p.eta);
      write_fields(level_dir(cfg.output_dir, l), res.levels[l].phi, geo.d, nullptr, p.eta);
    }
    log << "  level " << l << " eps = " << p.eps << " S = " << res.levels[l].energy.total << '\n';
  }
  write_runlog(res.log, (fs::path(cfg.output_dir) / "runlog.jsonl").string());

  const ProblemConfig pf = config_at(base, sched.eps_values.back(), cfg.optimizer);
  const GeodesicResult geo = fast_march(res.phi, src, pf.eta);
  write_fields(cfg.output_dir, res.phi, geo.d, nullptr, pf.eta);

  const std::vector<CellIndex> cells = snap_terminals(grid, base);
  const double dstar = default_distance_threshold(res.phi);
  const CellMask d_set = threshold(geo.d, dstar, true);
  const CellMask phi_set = threshold(res.phi, 0.5, true);
  const nlohmann::json a = mask_summary(d_set, cells);
  nlohmann::json summary = {
      {"mode", "steiner"},
      {"mm_length", mm_length(res.phi, pf.eps)},
      {"connected", a["connected"]},
      {"component_count", a["component_count"]},
      {"contains_terminals", a["contains_terminals"]},
      {"i_lambda", i_lambda(d_set, 5.0 * grid.h(), 64)},
      {"distance_set", a},
      {"phi_level_set", mask_summary(phi_set, cells)},
      {"distance_threshold", dstar},
      {"energy", to_json(res.energy)},
      {"levels", levels_json(res.log)},
      {"warnings", res.log.warnings},
      {"flagged", res.log.flagged}};
  if (base.terminals.size() <= 4) summary["exact_steiner"] = exact_steiner(base.terminals);
  write_json(summary, (fs::path(cfg.output_dir) / "summary.json").string());
  for (const std::string& w : res.log.warnings) log << "warning: " << w << '\n';
  return res.log.flagged ? kExitFlagged : kExitOk;
}

int run_oracle(const std::vector<double>& coords, std::ostream& out) {
  if (coords.size() % 2 != 0 || coords.size() < 2 || coords.size() > 8) {
    out << "oracle: expected 1 to 4 points as x y pairs\n";
    return kExitBadConfig;
  }
  std::vector<Point> pts;
  for (std::size_t k = 0; k < coords.size(); k += 2) pts.push_back({coords[k], coords[k + 1]});
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g\n", exact_steiner(pts));
  out << buf;
  return kExitOk;
}

int run_check(std::uint64_t seed, std::ostream& out) {
  CheckOptions opt;
  opt.seed = seed;
  const std::vector<CheckResult> results = run_checks(opt);
  out << format_checks(results);
  for (const CheckResult& r : results)
    if (!r.passed) return kExitFailure;
  return kExitOk;
}

}  // namespace phasenet
