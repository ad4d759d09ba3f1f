#include "phasenet/checks.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "phasenet/analysis.hpp"
#include "phasenet/eikonal.hpp"
#include "phasenet/energy.hpp"

namespace phasenet {

namespace {

using Rng = std::mt19937_64;

ScalarField uniform_field(const GridSpec& g, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = u(rng);
  return f;
}

StaggeredField uniform_faces(const GridSpec& g, Rng& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  StaggeredField v(g);
  for (double& x : v.u_values()) x = u(rng);
  for (double& x : v.w_values()) x = u(rng);
  v.clear_boundary();
  return v;
}

double relative(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

template <class F>
CheckResult timed(const std::string& name, double tol, bool upper, F body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r;
  r.name = name;
  r.tolerance = tol;
  r.measured = body();
  r.passed = std::isfinite(r.measured) && (upper ? r.measured <= tol : r.measured >= tol);
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

ProblemConfig small_compliance(double eps) {
  ProblemConfig cfg;
  cfg.mode = Mode::kCompliance;
  cfg.lambda = 2.0;
  cfg.eps = eps;
  cfg.eta = ProblemConfig::default_eta(eps);
  cfg.source = {0.5, 0.5};
  return cfg;
}

CellMask row_segment(const GridSpec& g, double x0, double x1, int j) {
  CellMask m(g);
  for (int i = 0; i < g.nx(); ++i) {
    const double x = g.center({i, j}).x;
    if (x >= x0 && x <= x1) m.set(i, j, true);
  }
  return m;
}

}  // namespace

std::vector<CheckResult> run_checks(const CheckOptions& opt) {
  std::vector<CheckResult> out;
  Rng rng(opt.seed);

  out.push_back(timed("adjointness grad/div", 1e-12, true, [&] {
    const GridSpec g(16, 16, 1.0 / 16);
    double worst = 0.0;
    for (int t = 0; t < 100; ++t) {
      const ScalarField phi = uniform_field(g, rng, -1.0, 1.0);
      const StaggeredField v = uniform_faces(g, rng, -1.0, 1.0);
      worst = std::max(worst, relative(inner_staggered(grad(phi), v),
                                       -inner_scalar(phi, opt.divergence(v))));
    }
    return worst;
  }));

  out.push_back(timed("fast march corner vs Euclidean", 0.03, true, [&] {
    const GridSpec g(129, 129, 1.0 / 129);
    const GeodesicResult r = fast_march(ScalarField(g, 1.0), {64, 64});
    return std::abs(r.d(0, 0) - std::sqrt(0.5)) / std::sqrt(0.5);
  }));

  out.push_back(timed("fast march <= 4-neighbor Dijkstra", 1e-9, true, [&] {
    const GridSpec g(32, 32, 1.0 / 32);
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 20; ++t) {
      const ScalarField phi = uniform_field(g, rng, 0.05, 1.0);
      const CellIndex s{static_cast<int>(rng() % 32), static_cast<int>(rng() % 32)};
      const ScalarField a = fast_march(phi, s).d;
      const ScalarField b = dijkstra_oracle(phi, s, Neighborhood::kFour);
      for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, a[k] - b[k]);
    }
    return worst;
  }));

  out.push_back(timed("homogeneity d(c phi) = c d(phi)", 0.0, true, [&] {
    const GridSpec g(16, 16, 1.0 / 16);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const ScalarField phi = uniform_field(g, rng, 0.05, 1.0);
      const ScalarField d = fast_march(phi, {3, 12}).d;
      for (double c : {0.5, 2.0}) {
        ScalarField s(g);
        for (std::size_t k = 0; k < s.size(); ++k) s[k] = c * phi[k];
        const ScalarField dc = fast_march(s, {3, 12}).d;
        for (std::size_t k = 0; k < s.size(); ++k) worst = std::max(worst, std::abs(dc[k] - c * d[k]));
      }
    }
    return worst;
  }));

  out.push_back(timed("Euler identity sum g phi = L", 1e-9, true, [&] {
    const GridSpec g(16, 16, 1.0 / 16);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const ScalarField phi = uniform_field(g, rng, 0.05, 1.0);
      const ScalarField w = uniform_field(g, rng, 0.0, 1.0);
      const DistanceFunctionalGradient dg = weighted_distance_gradient(phi, w, fast_march(phi, {8, 5}));
      double s = 0.0;
      for (std::size_t k = 0; k < phi.size(); ++k) s += dg.g[k] * phi[k];
      worst = std::max(worst, relative(s, dg.value));
    }
    return worst;
  }));

  out.push_back(timed("concavity midpoint slack", -1e-10, false, [&] {
    const GridSpec g(16, 16, 1.0 / 16);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 20; ++t) {
      const ScalarField a = uniform_field(g, rng, 0.05, 1.0);
      const ScalarField b = uniform_field(g, rng, 0.05, 1.0);
      ScalarField m(g);
      for (std::size_t k = 0; k < m.size(); ++k) m[k] = 0.5 * (a[k] + b[k]);
      const ScalarField da = fast_march(a, {7, 9}).d, db = fast_march(b, {7, 9}).d;
      const ScalarField dm = fast_march(m, {7, 9}).d;
      for (std::size_t k = 0; k < m.size(); ++k)
        worst = std::min(worst, dm[k] - 0.5 * (da[k] + db[k]));
    }
    return worst;
  }));

  out.push_back(timed("grad_v vs central differences", 1e-5, true, [&] {
    const GridSpec g(12, 12, 1.0 / 12);
    const ProblemConfig cfg = small_compliance(0.08);
    const ScalarField phi = uniform_field(g, rng, 0.1, 1.0);
    const GeodesicResult geo = fast_march(phi, geodesic_source(g, cfg));
    StaggeredField v = uniform_faces(g, rng, -1.0, 1.0);
    const StaggeredField gv = grad_v(v, cfg, geo);
    std::uniform_int_distribution<int> pick(1, 10);
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const int i = pick(rng), j = pick(rng);
      double& face = (t % 2 == 0) ? v.u(i, j) : v.w(i, j);
      const double save = face, step = 1e-6;
      face = save + step;
      const double fp = compliance_energy(v, phi, cfg, geo).total;
      face = save - step;
      const double fm = compliance_energy(v, phi, cfg, geo).total;
      face = save;
      const double an = (t % 2 == 0) ? gv.u(i, j) : gv.w(i, j);
      worst = std::max(worst, relative(an, (fp - fm) / (2 * step)));
    }
    return worst;
  }));

  out.push_back(timed("quadratic phi gradient vs differences", 1e-6, true, [&] {
    const GridSpec g(12, 12, 1.0 / 12);
    ScalarField phi = uniform_field(g, rng, 0.0, 1.0);
    const double lambda = 2.0, eps = 0.08;
    const ScalarField an = modica_mortola_gradient(phi, lambda, eps);
    double worst = 0.0;
    for (std::size_t k = 0; k < phi.size(); k += 5) {
      const double save = phi[k], step = 1e-5;
      phi[k] = save + step;
      const ModicaMortolaTerms p = modica_mortola_terms(phi, lambda, eps);
      phi[k] = save - step;
      const ModicaMortolaTerms m = modica_mortola_terms(phi, lambda, eps);
      phi[k] = save;
      const double fd = (p.penalty + p.gradient - m.penalty - m.gradient) / (2 * step);
      worst = std::max(worst, std::abs(fd - an[k]) / std::max(1.0, std::abs(an[k])));
    }
    return worst;
  }));

  out.push_back(timed("supergradient directional inequality", 1e-8, true, [&] {
    const GridSpec g(16, 16, 1.0 / 16);
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < 50; ++t) {
      const ScalarField phi = uniform_field(g, rng, 0.1, 1.0);
      const ScalarField w = uniform_field(g, rng, 0.0, 1.0);
      const DistanceFunctionalGradient dg = weighted_distance_gradient(phi, w, fast_march(phi, {6, 6}));
      const ScalarField psi = uniform_field(g, rng, -0.05, 0.05);
      ScalarField moved(g);
      double lin = 0.0;
      for (std::size_t k = 0; k < phi.size(); ++k) {
        moved[k] = phi[k] + psi[k];
        lin += dg.g[k] * psi[k];
      }
      worst = std::max(worst, weighted_distance_sum(moved, {6, 6}, w) - dg.value - lin);
    }
    return worst;
  }));

  out.push_back(timed("enlargement measure of a segment", 0.05, true, [&] {
    const GridSpec g(800, 800, 1.0 / 800);
    const double v = i_lambda(row_segment(g, 0.25, 0.75, 400), 0.05, 64);
    const double exact = 2.0 / std::numbers::pi * 0.5;
    return std::abs(v - exact) / exact;
  }));

  out.push_back(timed("enlargement measure additivity", 0.05, true, [&] {
    const GridSpec g(800, 800, 1.0 / 800);
    const CellMask a = row_segment(g, 0.1, 0.4, 200);
    const CellMask b = row_segment(g, 0.5, 0.9, 600);
    CellMask u(g);
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) u.set(i, j, a(i, j) || b(i, j));
    const double sum = i_lambda(a, 0.05, 64) + i_lambda(b, 0.05, 64);
    return std::abs(i_lambda(u, 0.05, 64) - sum) / sum;
  }));

  out.push_back(timed("Steiner oracle: unit square", 1e-8, true, [&] {
    const Point sq[4] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    return std::abs(exact_steiner(sq) - (1.0 + std::sqrt(3.0)));
  }));

  out.push_back(timed("Steiner oracle: two points", 1e-14, true, [&] {
    const Point two[2] = {{0.1, 0.2}, {0.4, 0.6}};
    return std::abs(exact_steiner(two) - 0.5);
  }));

  return out;
}

std::string format_checks(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-40s %-6s %14s %14s %9s\n", "check", "status", "measured",
                "tolerance", "seconds");
  os << line;
  for (const CheckResult& r : results) {
    std::snprintf(line, sizeof line, "%-40s %-6s %14.6e %14.6e %9.3f\n", r.name.c_str(),
                  r.passed ? "ok" : "FAIL", r.measured, r.tolerance, r.seconds);
    os << line;
  }
  return os.str();
}

}  // namespace phasenet
