#include "phasenet/optimize.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace phasenet {

Schedule Schedule::geometric(double eps0, double rho, double eps_final) {
  if (!(eps0 > 0.0) || !(eps_final > 0.0) || !(rho > 0.0 && rho < 1.0)) {
    throw std::invalid_argument(
        "Schedule::geometric: need eps0, eps_final > 0 and 0 < rho < 1");
  }
  Schedule s;
  for (double e = eps0; e > eps_final * (1.0 + 1e-12); e *= rho) {
    s.eps_values.push_back(e);
  }
  s.eps_values.push_back(eps_final);
  return s;
}

void Schedule::validate() const {
  if (eps_values.empty()) throw std::invalid_argument("Schedule: empty");
  for (std::size_t k = 0; k < eps_values.size(); ++k) {
    if (!(eps_values[k] > 0.0)) {
      throw std::invalid_argument("Schedule: eps values must be positive");
    }
    if (k > 0 && !(eps_values[k] < eps_values[k - 1])) {
      throw std::invalid_argument("Schedule: eps values must strictly decrease");
    }
  }
  if (!(delta > 0.0)) throw std::invalid_argument("Schedule: delta must be > 0");
}

std::vector<char> free_cell_mask(const GridSpec& grid) {
  std::vector<char> mask(grid.cell_count(), 0);
  for (int j = 1; j + 1 < grid.ny(); ++j) {
    for (int i = 1; i + 1 < grid.nx(); ++i) mask[grid.index(i, j)] = 1;
  }
  return mask;
}

ScalarField initial_guess(const GridSpec& grid, Point center, double eta) {
  const double r2 = 0.25 * (grid.width() * grid.width() +
                            grid.height() * grid.height());
  ScalarField phi(grid, 1.0);
  const auto free = free_cell_mask(grid);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (!free[k]) continue;
    const Point c = grid.center(grid.cell(k));
    const double dx = c.x - center.x;
    const double dy = c.y - center.y;
    phi[k] = std::clamp((dx * dx + dy * dy) / r2, eta, 1.0);
  }
  return phi;
}

ProblemConfig config_at(const ProblemConfig& base, double eps,
                        const OptimizerParams& params) {
  ProblemConfig cfg = base;
  cfg.eps = eps;
  cfg.eta = params.eta_override > 0.0 ? params.eta_override
                                      : ProblemConfig::default_eta(eps);
  cfg.c_eps = params.c_eps_override > 0.0 ? params.c_eps_override
                                          : ProblemConfig::default_c_eps(eps);
  return cfg;
}

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

// Interior faces of a staggered field, packed u first then w.
struct FaceLayout {
  int nx = 0;
  int ny = 0;
  std::size_t u_count() const { return std::size_t(nx - 1) * ny; }
  std::size_t size() const { return u_count() + std::size_t(nx) * (ny - 1); }

  std::vector<double> pack(const StaggeredField& v) const {
    std::vector<double> x;
    x.reserve(size());
    for (int j = 0; j < ny; ++j)
      for (int i = 1; i < nx; ++i) x.push_back(v.u(i, j));
    for (int j = 1; j < ny; ++j)
      for (int i = 0; i < nx; ++i) x.push_back(v.w(i, j));
    return x;
  }

  void unpack(std::span<const double> x, StaggeredField& v) const {
    std::size_t k = 0;
    for (int j = 0; j < ny; ++j)
      for (int i = 1; i < nx; ++i) v.u(i, j) = x[k++];
    for (int j = 1; j < ny; ++j)
      for (int i = 0; i < nx; ++i) v.w(i, j) = x[k++];
  }
};

// G^h(., phi) / h^2 restricted to the V-dependent terms.
class VObjective {
 public:
  VObjective(const ProblemConfig& cfg, const ScalarField& d)
      : cfg_(cfg), d_(d), layout_{d.spec().nx(), d.spec().ny()},
        v_(d.spec()), s_(d.spec()) {}

  const FaceLayout& layout() const { return layout_; }

  double operator()(std::span<const double> x, std::span<double> g) {
    const GridSpec& grid = d_.spec();
    const int nx = grid.nx();
    const int ny = grid.ny();
    const double inv_h = 1.0 / grid.h();
    const double coef = 0.5 / std::sqrt(cfg_.eps);
    const double eps2 = cfg_.eps * cfg_.eps;
    layout_.unpack(x, v_);

    double value = 0.0;
    for (double xk : x) value += 0.5 * xk * xk;
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const double div = (v_.u(i + 1, j) - v_.u(i, j)) * inv_h +
                           (v_.w(i, j + 1) - v_.w(i, j)) * inv_h;
        const double t = div + cfg_.f_const;
        const double r = std::sqrt(t * t + eps2);
        const double dk = d_(i, j);
        value += coef * r * dk;
        s_(i, j) = coef * t / r * dk;
      }
    }
    std::size_t k = 0;
    for (int j = 0; j < ny; ++j) {
      for (int i = 1; i < nx; ++i, ++k) {
        g[k] = x[k] - (s_(i, j) - s_(i - 1, j)) * inv_h;
      }
    }
    for (int j = 1; j < ny; ++j) {
      for (int i = 0; i < nx; ++i, ++k) {
        g[k] = x[k] - (s_(i, j) - s_(i, j - 1)) * inv_h;
      }
    }
    return value;
  }

 private:
  const ProblemConfig& cfg_;
  const ScalarField& d_;
  FaceLayout layout_;
  StaggeredField v_;
  ScalarField s_;
};

double norm_of(std::span<const double> g) {
  double s = 0.0;
  for (double x : g) s += x * x;
  return std::sqrt(s);
}

// Runs SPG over the free cells of phi for an objective defined on whole
// fields. `eval` returns G/h^2 and writes the descent field / h^2.
template <typename FieldEval>
PhiSolveResult run_phi_spg(const ScalarField& phi0, double eta,
                           const SPGParams& params, FieldEval&& eval) {
  const GridSpec& grid = phi0.spec();
  const auto free = free_cell_mask(grid);
  std::vector<std::size_t> cells;
  for (std::size_t k = 0; k < free.size(); ++k)
    if (free[k]) cells.push_back(k);

  ScalarField work(grid, 1.0);
  ScalarField dir(grid);
  std::vector<double> x0(cells.size());
  for (std::size_t m = 0; m < cells.size(); ++m) x0[m] = phi0[cells[m]];
  const std::vector<double> lower(cells.size(), eta);
  const std::vector<double> upper(cells.size(), 1.0);

  Objective f = [&](std::span<const double> x, std::span<double> g) {
    for (std::size_t m = 0; m < cells.size(); ++m) work[cells[m]] = x[m];
    const double value = eval(work, dir);
    for (std::size_t m = 0; m < cells.size(); ++m) g[m] = dir[cells[m]];
    return value;
  };

  PhiSolveResult out{ScalarField(grid, 1.0), {}};
  out.spg = minimize_spg(f, std::move(x0), lower, upper, params);
  for (std::size_t m = 0; m < cells.size(); ++m) {
    out.phi[cells[m]] = out.spg.x[m];
  }
  return out;
}

ScalarField admissible(const ScalarField& phi, double eta) {
  ScalarField out(phi.spec(), 1.0);
  const auto free = free_cell_mask(phi.spec());
  for (std::size_t k = 0; k < phi.size(); ++k) {
    if (free[k]) out[k] = std::clamp(phi[k], eta, 1.0);
  }
  return out;
}

double spg_margin(const SPGResult& r, double gamma) {
  double m = -std::numeric_limits<double>::infinity();
  for (const SPGStep& s : r.steps) {
    m = std::max(m, s.f_new - (s.f_ref + gamma * s.lambda * s.gtd));
  }
  return r.steps.empty() ? 0.0 : m;
}

}  // namespace

VSolveResult minimize_v(const ScalarField& phi, const StaggeredField& v0,
                        const ProblemConfig& cfg, const GeodesicResult& geo,
                        const CGParams& params) {
  if (!(phi.spec() == v0.spec()) || !(geo.d.spec() == phi.spec())) {
    throw std::invalid_argument("minimize_v: grid mismatch");
  }
  if (cfg.q != 2.0) throw std::invalid_argument("minimize_v: requires q = 2");
  VObjective obj(cfg, geo.d);
  const FaceLayout& layout = obj.layout();

  // Tolerance floor: gradient norm at V = 0, so warm starts are not held to
  // an ever tighter relative target.
  std::vector<double> zero(layout.size(), 0.0), g0(layout.size());
  obj(zero, g0);
  const double floor = norm_of(g0);

  Objective f = [&obj](std::span<const double> x, std::span<double> g) {
    return obj(x, g);
  };
  VSolveResult out{StaggeredField(phi.spec()), {}};
  out.cg = minimize_fletcher_reeves(f, layout.pack(v0), params, floor);
  layout.unpack(out.cg.x, out.v);
  return out;
}

VSolveResult minimize_v(const ScalarField& phi, const StaggeredField& v0,
                        const ProblemConfig& cfg, const CGParams& params) {
  const GeodesicResult geo =
      fast_march(phi, geodesic_source(phi.spec(), cfg), cfg.eta);
  return minimize_v(phi, v0, cfg, geo, params);
}

PhiSolveResult minimize_phi(const StaggeredField& v, const ScalarField& phi0,
                            const ProblemConfig& cfg,
                            const SPGParams& params) {
  const GridSpec& grid = phi0.spec();
  if (!(v.spec() == grid)) throw std::invalid_argument("minimize_phi: grid mismatch");
  const double h2 = grid.h() * grid.h();
  const ScalarField weights = geodesic_weights(v, cfg);
  const double flux = 0.5 * inner_staggered(v, v);
  const CellIndex src = geodesic_source(grid, cfg);

  auto eval = [&](const ScalarField& phi, ScalarField& dir) {
    const GeodesicResult geo = fast_march(phi, src, cfg.eta);
    const auto mm = modica_mortola_terms(phi, cfg.lambda, cfg.eps);
    const auto sup = weighted_distance_gradient(phi, weights, geo);
    dir = modica_mortola_gradient(phi, cfg.lambda, cfg.eps);
    for (std::size_t k = 0; k < dir.size(); ++k) {
      dir[k] = (dir[k] + sup.g[k]) / h2;
    }
    return (flux + mm.penalty + mm.gradient + sup.value) / h2;
  };
  PhiSolveResult out = run_phi_spg(admissible(phi0, cfg.eta), cfg.eta, params, eval);
  out.spg.f *= h2;
  return out;
}

PhiSolveResult minimize_phi_steiner(const ScalarField& phi0,
                                    const ProblemConfig& cfg,
                                    const SPGParams& params) {
  const GridSpec& grid = phi0.spec();
  const double h2 = grid.h() * grid.h();
  const CellIndex src = geodesic_source(grid, cfg);

  auto eval = [&](const ScalarField& phi, ScalarField& dir) {
    const GeodesicResult geo = fast_march(phi, src, cfg.eta);
    const EnergyBreakdown e = steiner_energy(phi, cfg, geo);
    dir = steiner_descent(phi, cfg, geo);
    for (std::size_t k = 0; k < dir.size(); ++k) dir[k] /= h2;
    return e.total / h2;
  };
  PhiSolveResult out = run_phi_spg(admissible(phi0, cfg.eta), cfg.eta, params, eval);
  out.spg.f *= h2;
  return out;
}

AlternateResult alternate(const ProblemConfig& cfg, const ScalarField& phi0,
                          const OptimizerParams& params, double delta,
                          int level) {
  const GridSpec& grid = phi0.spec();
  cfg.validate(grid);
  const CellIndex src = geodesic_source(grid, cfg);

  AlternateResult res{StaggeredField(grid), admissible(phi0, cfg.eta), {}, {}};
  GeodesicResult geo = fast_march(res.phi, src, cfg.eta);
  res.energy = compliance_energy(res.v, res.phi, cfg, geo);

  LevelSummary summary;
  summary.level = level;
  summary.eps = cfg.eps;
  summary.eta = cfg.eta;
  summary.initial_energy = res.energy.total;
  summary.delta = delta >= 0.0 ? delta : 1e-6 * std::abs(res.energy.total);

  double previous = res.energy.total;
  for (int n = 1; n <= params.max_outer; ++n) {
    const auto start = Clock::now();
    VSolveResult vs = minimize_v(res.phi, res.v, cfg, geo, params.cg);
    res.v = std::move(vs.v);
    if (vs.cg.line_search_failed) {
      res.log.warnings.push_back("CG line search failed at level " +
                                 std::to_string(level) + ", outer " +
                                 std::to_string(n));
    }
    PhiSolveResult ps = minimize_phi(res.v, res.phi, cfg, params.spg);
    res.phi = std::move(ps.phi);
    geo = fast_march(res.phi, src, cfg.eta);
    res.energy = compliance_energy(res.v, res.phi, cfg, geo);

    OuterRecord rec;
    rec.level = level;
    rec.eps = cfg.eps;
    rec.outer_n = n;
    rec.breakdown = res.energy;
    rec.grad_norm_v = vs.cg.grad_norm;
    rec.pg_norm_phi = ps.spg.pg_norm;
    rec.cg_iters = vs.cg.iterations;
    rec.spg_iters = ps.spg.iterations;
    rec.spg_acceptance_margin = spg_margin(ps.spg, params.spg.gamma);
    rec.wall_ms = elapsed_ms(start);
    res.log.records.push_back(rec);
    summary.outer_iterations = n;

    if (std::abs(res.energy.total - previous) <= summary.delta) {
      summary.converged = true;
      break;
    }
    previous = res.energy.total;
  }
  summary.final_energy = res.energy.total;
  if (!summary.converged) {
    res.log.flagged = true;
    res.log.warnings.push_back("outer loop hit max_outer at level " +
                               std::to_string(level));
  }
  res.log.levels.push_back(summary);
  return res;
}

std::vector<AlternateResult> continuation(const ProblemConfig& base,
                                          const Schedule& schedule,
                                          const ScalarField& phi0,
                                          const OptimizerParams& params) {
  schedule.validate();
  std::vector<AlternateResult> out;
  ScalarField phi = phi0;
  for (std::size_t l = 0; l < schedule.eps_values.size(); ++l) {
    const ProblemConfig cfg = config_at(base, schedule.eps_values[l], params);
    double delta = schedule.delta;
    if (schedule.delta_relative) {
      const ScalarField start = admissible(phi, cfg.eta);
      const GeodesicResult geo =
          fast_march(start, geodesic_source(start.spec(), cfg), cfg.eta);
      const auto e = compliance_energy(StaggeredField(start.spec()), start, cfg, geo);
      delta *= std::abs(e.total);
    }
    out.push_back(alternate(cfg, phi, params, delta, static_cast<int>(l)));
    phi = out.back().phi;
  }
  return out;
}

SteinerResult steiner_minimize(const ProblemConfig& base,
                               const Schedule& schedule,
                               const ScalarField& phi0,
                               const OptimizerParams& params) {
  schedule.validate();
  if (base.mode != Mode::kSteiner) {
    throw std::invalid_argument("steiner_minimize: config is not in steiner mode");
  }
  const GridSpec& grid = phi0.spec();
  SteinerResult res{phi0, {}, {}, {}};

  for (std::size_t l = 0; l < schedule.eps_values.size(); ++l) {
    const ProblemConfig cfg = config_at(base, schedule.eps_values[l], params);
    cfg.validate(grid);
    res.phi = admissible(res.phi, cfg.eta);
    res.energy = steiner_energy(res.phi, cfg);

    LevelSummary summary;
    summary.level = static_cast<int>(l);
    summary.eps = cfg.eps;
    summary.eta = cfg.eta;
    summary.initial_energy = res.energy.total;
    summary.delta = schedule.delta_relative
                        ? schedule.delta * std::abs(res.energy.total)
                        : schedule.delta;

    double previous = res.energy.total;
    for (int n = 1; n <= params.max_outer; ++n) {
      const auto start = Clock::now();
      PhiSolveResult ps = minimize_phi_steiner(res.phi, cfg, params.spg);
      res.phi = std::move(ps.phi);
      res.energy = steiner_energy(res.phi, cfg);

      OuterRecord rec;
      rec.level = static_cast<int>(l);
      rec.eps = cfg.eps;
      rec.outer_n = n;
      rec.breakdown = res.energy;
      rec.pg_norm_phi = ps.spg.pg_norm;
      rec.spg_iters = ps.spg.iterations;
      rec.spg_acceptance_margin = spg_margin(ps.spg, params.spg.gamma);
      rec.wall_ms = elapsed_ms(start);
      res.log.records.push_back(rec);
      summary.outer_iterations = n;
      if (std::abs(res.energy.total - previous) <= summary.delta) {
        summary.converged = true;
        break;
      }
      previous = res.energy.total;
    }
    summary.final_energy = res.energy.total;
    if (!summary.converged) {
      res.log.flagged = true;
      res.log.warnings.push_back("steiner level " + std::to_string(l) +
                                 " hit max_outer");
    }
    res.log.levels.push_back(summary);
    res.levels.push_back({res.phi, res.energy, cfg.eps});
  }
  return res;
}

}  // namespace phasenet
