#include "phasenet/energy.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace phasenet {

const char* to_string(Mode mode) {
  return mode == Mode::kSteiner ? "steiner" : "compliance";
}

double ProblemConfig::default_eta(double eps) {
  return std::max(1e-3, eps * eps);
}

double ProblemConfig::default_c_eps(double eps) { return std::sqrt(eps); }

void ProblemConfig::validate(const GridSpec& grid) const {
  auto fail = [](const std::string& what) {
    throw std::invalid_argument("ProblemConfig: " + what);
  };
  if (!(eps > 0.0)) fail("eps must be positive");
  if (!(eta > 0.0) || eta > 1.0) fail("eta must lie in (0, 1]");
  if (!(q >= 1.0)) fail("q must be >= 1");
  if (!std::isfinite(f_const)) fail("f_const must be finite");
  if (mode == Mode::kCompliance) {
    if (!(lambda > 0.0)) fail("lambda must be positive");
    if (!terminals.empty()) fail("compliance mode takes no terminals");
    if (!grid.contains(source)) fail("source lies outside the domain");
  } else {
    if (!(c_eps > 0.0)) fail("c_eps must be positive");
    if (terminals.empty()) fail("steiner mode needs at least one terminal");
    for (const Point& p : terminals) {
      if (!grid.contains(p)) {
        std::ostringstream os;
        os << "terminal (" << p.x << ", " << p.y << ") lies outside the domain";
        fail(os.str());
      }
    }
  }
}

CellIndex geodesic_source(const GridSpec& grid, const ProblemConfig& cfg) {
  if (cfg.mode == Mode::kSteiner) {
    if (cfg.terminals.empty()) {
      throw std::invalid_argument("steiner mode needs at least one terminal");
    }
    return grid.snap(cfg.terminals.front());
  }
  return grid.snap(cfg.source);
}

std::vector<CellIndex> snap_terminals(const GridSpec& grid,
                                      const ProblemConfig& cfg) {
  std::vector<CellIndex> cells;
  for (const Point& p : cfg.terminals) {
    const CellIndex c = grid.snap(p);
    if (std::find(cells.begin(), cells.end(), c) == cells.end()) {
      cells.push_back(c);
    }
  }
  return cells;
}

ModicaMortolaTerms modica_mortola_terms(const ScalarField& phi, double lambda,
                                        double eps) {
  const GridSpec& g = phi.spec();
  const double h2 = g.h() * g.h();
  double pen = 0.0;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double r = 1.0 - phi[k];
    pen += r * r;
  }
  const StaggeredField dphi = grad(phi);
  const double grad_sq = inner_staggered(dphi, dphi);
  return {lambda / (4.0 * eps) * h2 * pen, lambda * eps * grad_sq};
}

ScalarField modica_mortola_gradient(const ScalarField& phi, double lambda,
                                    double eps) {
  const GridSpec& g = phi.spec();
  const double h2 = g.h() * g.h();
  const ScalarField lap = divergence(grad(phi));
  ScalarField out(g);
  for (std::size_t k = 0; k < phi.size(); ++k) {
    out[k] = -(lambda / (2.0 * eps)) * h2 * (1.0 - phi[k]) -
             2.0 * lambda * eps * h2 * lap[k];
  }
  return out;
}

ScalarField geodesic_weights(const StaggeredField& v,
                             const ProblemConfig& cfg) {
  const GridSpec& g = v.spec();
  const double coef = g.h() * g.h() / (2.0 * std::sqrt(cfg.eps));
  const double eps2 = cfg.eps * cfg.eps;
  ScalarField w = divergence(v);
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double t = w[k] + cfg.f_const;
    w[k] = coef * std::sqrt(t * t + eps2);
  }
  return w;
}

namespace {

void require_same_grid(const GridSpec& a, const GridSpec& b,
                       const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

double flux_term(const StaggeredField& v, double q) {
  const GridSpec& g = v.spec();
  if (q == 2.0) return 0.5 * inner_staggered(v, v);
  double sum = 0.0;
  for (double x : v.u_values()) sum += std::pow(std::abs(x), q);
  for (double x : v.w_values()) sum += std::pow(std::abs(x), q);
  return g.h() * g.h() * sum / q;
}

}  // namespace

EnergyBreakdown compliance_energy(const StaggeredField& v,
                                  const ScalarField& phi,
                                  const ProblemConfig& cfg,
                                  const GeodesicResult& geo) {
  require_same_grid(v.spec(), phi.spec(), "compliance_energy");
  require_same_grid(geo.d.spec(), phi.spec(), "compliance_energy");
  EnergyBreakdown e;
  e.flux_term = flux_term(v, cfg.q);
  const auto mm = modica_mortola_terms(phi, cfg.lambda, cfg.eps);
  e.mm_penalty = mm.penalty;
  e.mm_gradient = mm.gradient;
  const ScalarField w = geodesic_weights(v, cfg);
  double geo_sum = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) geo_sum += w[k] * geo.d[k];
  e.geodesic_term = geo_sum;
  e.total = e.flux_term + e.mm_penalty + e.mm_gradient + e.geodesic_term;
  return e;
}

StaggeredField grad_v(const StaggeredField& v, const ProblemConfig& cfg,
                      const GeodesicResult& geo) {
  require_same_grid(v.spec(), geo.d.spec(), "grad_v");
  if (cfg.q != 2.0) {
    throw std::invalid_argument("grad_v: only q = 2 is supported");
  }
  const GridSpec& g = v.spec();
  const double h2 = g.h() * g.h();
  const double coef = h2 / (2.0 * std::sqrt(cfg.eps));
  const double eps2 = cfg.eps * cfg.eps;

  // s = d(geodesic term)/d(Div V), then the pullback through Div is -grad(s).
  ScalarField s = divergence(v);
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double t = s[k] + cfg.f_const;
    s[k] = coef * t / std::sqrt(t * t + eps2) * geo.d[k];
  }
  StaggeredField out = grad(s);
  auto ou = out.u_values();
  auto ow = out.w_values();
  const auto vu = v.u_values();
  const auto vw = v.w_values();
  for (std::size_t k = 0; k < ou.size(); ++k) ou[k] = h2 * vu[k] - ou[k];
  for (std::size_t k = 0; k < ow.size(); ++k) ow[k] = h2 * vw[k] - ow[k];
  out.clear_boundary();
  return out;
}

ScalarField descent_dir_phi(const StaggeredField& v, const ScalarField& phi,
                            const ProblemConfig& cfg,
                            const GeodesicResult& geo) {
  require_same_grid(v.spec(), phi.spec(), "descent_dir_phi");
  ScalarField dir = modica_mortola_gradient(phi, cfg.lambda, cfg.eps);
  const ScalarField w = geodesic_weights(v, cfg);
  const auto sup = weighted_distance_gradient(phi, w, geo);
  for (std::size_t k = 0; k < dir.size(); ++k) dir[k] += sup.g[k];
  return dir;
}

ScalarField descent_dir_phi(const StaggeredField& v, const ScalarField& phi,
                            const ProblemConfig& cfg) {
  const GeodesicResult geo =
      fast_march(phi, geodesic_source(phi.spec(), cfg), cfg.eta);
  return descent_dir_phi(v, phi, cfg, geo);
}

namespace {

ScalarField terminal_weights(const GridSpec& g, const ProblemConfig& cfg) {
  ScalarField w(g);
  for (const CellIndex& c : snap_terminals(g, cfg)) w(c.i, c.j) = 1.0 / cfg.c_eps;
  return w;
}

}  // namespace

EnergyBreakdown steiner_energy(const ScalarField& phi,
                               const ProblemConfig& cfg,
                               const GeodesicResult& geo) {
  require_same_grid(geo.d.spec(), phi.spec(), "steiner_energy");
  EnergyBreakdown e;
  const auto mm = modica_mortola_terms(phi, 1.0, cfg.eps);
  e.mm_penalty = mm.penalty;
  e.mm_gradient = mm.gradient;
  double dist = 0.0;
  for (const CellIndex& c : snap_terminals(phi.spec(), cfg)) {
    dist += geo.d(c.i, c.j);
  }
  e.geodesic_term = dist / cfg.c_eps;
  e.total = e.mm_penalty + e.mm_gradient + e.geodesic_term;
  return e;
}

EnergyBreakdown steiner_energy(const ScalarField& phi,
                               const ProblemConfig& cfg) {
  const GeodesicResult geo =
      fast_march(phi, geodesic_source(phi.spec(), cfg), cfg.eta);
  return steiner_energy(phi, cfg, geo);
}

ScalarField steiner_descent(const ScalarField& phi, const ProblemConfig& cfg,
                            const GeodesicResult& geo) {
  ScalarField dir = modica_mortola_gradient(phi, 1.0, cfg.eps);
  const auto sup =
      weighted_distance_gradient(phi, terminal_weights(phi.spec(), cfg), geo);
  for (std::size_t k = 0; k < dir.size(); ++k) dir[k] += sup.g[k];
  return dir;
}

ScalarField steiner_descent(const ScalarField& phi, const ProblemConfig& cfg) {
  const GeodesicResult geo =
      fast_march(phi, geodesic_source(phi.spec(), cfg), cfg.eta);
  return steiner_descent(phi, cfg, geo);
}

double flux_total_variation(const StaggeredField& v, double f_const) {
  const ScalarField div = divergence(v);
  const double h = v.spec().h();
  double sum = 0.0;
  for (std::size_t k = 0; k < div.size(); ++k) sum += std::abs(div[k] + f_const);
  return h * h * sum;
}

}  // namespace phasenet
