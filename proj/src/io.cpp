#include "phasenet/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace phasenet {

namespace {

std::ofstream open_out(const std::string& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw std::runtime_error("cannot write '" + path + "'");
  return os;
}

}  // namespace

void write_pgm(const ScalarField& field, double lo, double hi,
               const std::string& path) {
  if (!(hi > lo)) throw std::invalid_argument("write_pgm: need hi > lo");
  const GridSpec& g = field.spec();
  std::ofstream os = open_out(path, true);
  os << "P5\n" << g.nx() << ' ' << g.ny() << "\n255\n";
  std::string row(static_cast<std::size_t>(g.nx()), '\0');
  for (int j = g.ny() - 1; j >= 0; --j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double t = std::clamp((field(i, j) - lo) / (hi - lo), 0.0, 1.0);
      row[i] = static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * t)));
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

nlohmann::json to_json(const EnergyBreakdown& e) {
  return {{"flux_term", e.flux_term},
          {"mm_penalty", e.mm_penalty},
          {"mm_gradient", e.mm_gradient},
          {"geodesic_term", e.geodesic_term},
          {"total", e.total}};
}

nlohmann::json to_json(const OuterRecord& r) {
  return {{"level", r.level},
          {"eps", r.eps},
          {"outer_n", r.outer_n},
          {"breakdown", to_json(r.breakdown)},
          {"grad_norms", {{"v", r.grad_norm_v}, {"phi", r.pg_norm_phi}}},
          {"cg_iters", r.cg_iters},
          {"spg_iters", r.spg_iters},
          {"spg_acceptance_margin", r.spg_acceptance_margin},
          {"wall_ms", r.wall_ms}};
}

nlohmann::json to_json(const LevelSummary& s) {
  return {{"level", s.level},
          {"eps", s.eps},
          {"eta", s.eta},
          {"initial_energy", s.initial_energy},
          {"final_energy", s.final_energy},
          {"delta", s.delta},
          {"outer_iterations", s.outer_iterations},
          {"converged", s.converged}};
}

void write_runlog(const RunLog& log, const std::string& path) {
  std::ofstream os = open_out(path);
  for (const OuterRecord& r : log.records) os << to_json(r).dump() << '\n';
}

void write_json(const nlohmann::json& j, const std::string& path) {
  std::ofstream os = open_out(path);
  os << j.dump(2) << '\n';
}

}  // namespace phasenet
