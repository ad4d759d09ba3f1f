#pragma once

#include <string>
#include <vector>

#include "phasenet/energy.hpp"
#include "phasenet/grid.hpp"
#include "phasenet/solvers.hpp"

namespace phasenet {

/// Decreasing relaxation parameters for continuation, plus the outer
/// tolerance of the alternating loop. With `delta_relative` the tolerance at
/// each level is delta * |G| at the level's starting point.
struct Schedule {
  std::vector<double> eps_values;
  double delta = 1e-6;
  bool delta_relative = true;

  /// eps0 * rho^l for l = 0, 1, ... while above eps_final, then eps_final.
  static Schedule geometric(double eps0, double rho, double eps_final);
  void validate() const;
};

struct OptimizerParams {
  CGParams cg;
  SPGParams spg;
  int max_outer = 200;
  /// Lower bound override; unset (<= 0) means ProblemConfig::default_eta(eps).
  double eta_override = 0.0;
  /// Steiner coefficient override; unset (<= 0) means sqrt(eps).
  double c_eps_override = 0.0;
};

/// One outer iteration of the alternating loop (or one SPG call in Steiner
/// mode).
struct OuterRecord {
  int level = 0;
  double eps = 0.0;
  int outer_n = 0;
  EnergyBreakdown breakdown;
  double grad_norm_v = 0.0;
  double pg_norm_phi = 0.0;
  int cg_iters = 0;
  int spg_iters = 0;
  double wall_ms = 0.0;
  /// max over the SPG steps of f_new - (f_ref + gamma lambda <g,d>), in the
  /// solver's internal scaling; <= 0 when every step passed the test.
  double spg_acceptance_margin = 0.0;
};

struct LevelSummary {
  int level = 0;
  double eps = 0.0;
  double eta = 0.0;
  double initial_energy = 0.0;  ///< at the warm start, this level's eps
  double final_energy = 0.0;
  double delta = 0.0;           ///< absolute outer tolerance used
  int outer_iterations = 0;
  bool converged = false;
};

struct RunLog {
  std::vector<OuterRecord> records;
  std::vector<LevelSummary> levels;
  std::vector<std::string> warnings;
  bool flagged = false;
};

/// phi0(x) = clamp(|x - center|^2 / R^2, eta, 1), R half the domain diagonal,
/// with the outermost ring of cells set to 1.
ScalarField initial_guess(const GridSpec& grid, Point center, double eta);

/// Cells that the phi solvers may move: everything but the outer ring.
std::vector<char> free_cell_mask(const GridSpec& grid);

/// ProblemConfig at a given eps with eta and c_eps resolved.
ProblemConfig config_at(const ProblemConfig& base, double eps,
                        const OptimizerParams& params);

struct VSolveResult {
  StaggeredField v;
  CGResult cg;
};

/// Global minimizer of G^h(., phi) by nonlinear CG, warm-started at v0.
/// `geo` is the distance field of phi. The solver works on G^h / h^2.
VSolveResult minimize_v(const ScalarField& phi, const StaggeredField& v0,
                        const ProblemConfig& cfg, const GeodesicResult& geo,
                        const CGParams& params);
VSolveResult minimize_v(const ScalarField& phi, const StaggeredField& v0,
                        const ProblemConfig& cfg, const CGParams& params);

struct PhiSolveResult {
  ScalarField phi;
  SPGResult spg;
};

/// Local minimizer of G^h(V, .) over eta <= phi <= 1 (outer ring pinned to
/// 1) by SPG. Every function evaluation runs one fast march.
PhiSolveResult minimize_phi(const StaggeredField& v, const ScalarField& phi0,
                            const ProblemConfig& cfg, const SPGParams& params);

/// SPG on the Steiner energy at fixed eps.
PhiSolveResult minimize_phi_steiner(const ScalarField& phi0,
                                    const ProblemConfig& cfg,
                                    const SPGParams& params);

struct AlternateResult {
  StaggeredField v;
  ScalarField phi;
  EnergyBreakdown energy;
  RunLog log;
};

/// Alternating minimization at fixed eps: V from CG, then phi from SPG, until
/// two consecutive energies differ by at most delta. V starts at zero.
/// `delta` is absolute; pass a negative value for 1e-6 |G(0, phi0)|.
AlternateResult alternate(const ProblemConfig& cfg, const ScalarField& phi0,
                          const OptimizerParams& params, double delta = -1.0,
                          int level = 0);

/// Runs `alternate` at every eps of the schedule, warm-starting phi.
std::vector<AlternateResult> continuation(const ProblemConfig& base,
                                          const Schedule& schedule,
                                          const ScalarField& phi0,
                                          const OptimizerParams& params);

struct SteinerLevel {
  ScalarField phi;
  EnergyBreakdown energy;
  double eps = 0.0;
};

struct SteinerResult {
  ScalarField phi;
  EnergyBreakdown energy;
  std::vector<SteinerLevel> levels;
  RunLog log;
};

/// Continuation on the Steiner energy; one SPG solve per level until the
/// energy change between successive SPG calls is below delta.
SteinerResult steiner_minimize(const ProblemConfig& base,
                               const Schedule& schedule,
                               const ScalarField& phi0,
                               const OptimizerParams& params);

}  // namespace phasenet
