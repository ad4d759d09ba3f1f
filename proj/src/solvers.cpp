#include "phasenet/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace phasenet {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

// Evaluates f and its slope along p at x + t p.
struct LineProbe {
  const Objective& f;
  std::span<const double> x;
  std::span<const double> p;
  std::vector<double> trial;
  std::vector<double> grad;
  int evaluations = 0;

  LineProbe(const Objective& fn, std::span<const double> x0,
            std::span<const double> dir)
      : f(fn), x(x0), p(dir), trial(x0.size()), grad(x0.size()) {}

  std::pair<double, double> operator()(double t) {
    for (std::size_t k = 0; k < x.size(); ++k) trial[k] = x[k] + t * p[k];
    const double value = f(trial, grad);
    ++evaluations;
    return {value, dot(grad, p)};
  }
};

struct LineSearchResult {
  double t = 0.0;
  double f = 0.0;
  bool ok = false;
};

double interpolate(double lo, double flo, double dlo, double hi, double fhi,
                   double dhi) {
  // Cubic interpolation of (lo, flo, dlo) and (hi, fhi, dhi); falls back to
  // bisection when the cubic is degenerate.
  const double d1 = dlo + dhi - 3.0 * (flo - fhi) / (lo - hi);
  const double rad = d1 * d1 - dlo * dhi;
  double t = 0.5 * (lo + hi);
  if (rad >= 0.0) {
    const double d2 = std::copysign(std::sqrt(rad), hi - lo);
    const double denom = dhi - dlo + 2.0 * d2;
    if (denom != 0.0) t = hi - (hi - lo) * (dhi + d2 - d1) / denom;
  }
  const double a = std::min(lo, hi);
  const double b = std::max(lo, hi);
  const double margin = 0.1 * (b - a);
  if (!std::isfinite(t) || t < a + margin || t > b - margin) t = 0.5 * (a + b);
  return t;
}

LineSearchResult strong_wolfe(LineProbe& probe, double f0, double slope0,
                              double t0, int max_evals) {
  constexpr double c1 = 1e-4;
  constexpr double c2 = 0.1;
  // Near a minimizer the Armijo test drowns in rounding; within `noise` of f0
  // the slope alone decides (approximate Wolfe).
  const double noise = 1e-12 * std::abs(f0);
  auto sufficient = [&](double t, double ft) {
    return std::isfinite(ft) &&
           (ft <= f0 + c1 * t * slope0 || ft <= f0 + noise);
  };
  int evals = 0;

  // Bracketing phase: grow t until the interval [lo, hi] contains a point
  // satisfying the strong Wolfe conditions.
  double lo = 0.0, flo = f0, dlo = slope0;
  double hi = 0.0, fhi = 0.0, dhi = 0.0;
  bool bracketed = false;
  double t = t0;
  while (evals < max_evals) {
    const auto [ft, dt] = probe(t);
    ++evals;
    if (!sufficient(t, ft) || (evals > 1 && ft > flo + noise)) {
      hi = t, fhi = ft, dhi = dt;
      bracketed = true;
      break;
    }
    if (std::abs(dt) <= -c2 * slope0) return {t, ft, true};
    if (dt >= 0.0) {
      hi = lo, fhi = flo, dhi = dlo;
      lo = t, flo = ft, dlo = dt;
      bracketed = true;
      break;
    }
    lo = t, flo = ft, dlo = dt;
    t *= 4.0;
  }

  // Zoom phase; lo always satisfies sufficient decrease.
  while (bracketed && evals < max_evals) {
    if (std::abs(hi - lo) <= 1e-15 * std::max(1.0, std::abs(lo))) break;
    t = std::isfinite(fhi) ? interpolate(lo, flo, dlo, hi, fhi, dhi)
                           : 0.5 * (lo + hi);
    const auto [ft, dt] = probe(t);
    ++evals;
    if (!sufficient(t, ft) || ft > flo + noise) {
      hi = t, fhi = ft, dhi = dt;
    } else {
      if (std::abs(dt) <= -c2 * slope0) return {t, ft, true};
      if (dt * (hi - lo) >= 0.0) hi = lo, fhi = flo, dhi = dlo;
      lo = t, flo = ft, dlo = dt;
    }
  }
  if (lo > 0.0) return {lo, flo, true};
  return {0.0, f0, false};
}

}  // namespace

CGResult minimize_fletcher_reeves(const Objective& f, std::vector<double> x0,
                                  const CGParams& params, double abs_floor) {
  if (params.max_iters < 1 || !(params.grad_tol > 0.0)) {
    throw std::invalid_argument("CGParams: need grad_tol > 0, max_iters >= 1");
  }
  CGResult r;
  r.x = std::move(x0);
  const std::size_t n = r.x.size();
  std::vector<double> g(n), p(n);
  r.f = f(r.x, g);
  r.evaluations = 1;
  double gg = dot(g, g);
  r.initial_grad_norm = std::sqrt(gg);
  r.grad_norm = r.initial_grad_norm;
  const double tol = params.grad_tol * std::max(r.initial_grad_norm, abs_floor);
  for (std::size_t k = 0; k < n; ++k) p[k] = -g[k];

  double prev_t = 0.0, prev_slope = 0.0;
  for (int it = 0; it < params.max_iters; ++it) {
    if (r.grad_norm <= tol) {
      r.converged = true;
      break;
    }
    double slope = dot(g, p);
    if (slope >= 0.0) {
      for (std::size_t k = 0; k < n; ++k) p[k] = -g[k];
      slope = -gg;
    }
    double t0 = prev_t > 0.0 ? prev_t * prev_slope / slope
                             : 1.0 / std::max(1.0, norm2(p));
    if (!(t0 > 0.0) || !std::isfinite(t0)) t0 = 1.0 / std::max(1.0, norm2(p));

    LineProbe probe(f, r.x, p);
    const auto ls =
        strong_wolfe(probe, r.f, slope, t0, params.max_line_search_evals);
    r.evaluations += probe.evaluations;
    if (!ls.ok) {
      if (slope != -gg) {
        // retry once along steepest descent
        for (std::size_t k = 0; k < n; ++k) p[k] = -g[k];
        prev_t = 0.0;
        continue;
      }
      r.line_search_failed = true;
      break;
    }
    for (std::size_t k = 0; k < n; ++k) r.x[k] += ls.t * p[k];
    r.f = f(r.x, g);
    ++r.evaluations;
    const double gg_new = dot(g, g);
    r.grad_norm = std::sqrt(gg_new);
    ++r.iterations;

    double beta = gg_new / gg;
    if ((it + 1) % params.restart_period == 0) beta = 0.0;
    for (std::size_t k = 0; k < n; ++k) p[k] = -g[k] + beta * p[k];
    gg = gg_new;
    prev_t = ls.t;
    prev_slope = slope;
  }
  if (r.grad_norm <= tol) r.converged = true;
  return r;
}

void project_box(std::span<double> x, std::span<const double> lower,
                 std::span<const double> upper) {
  for (std::size_t k = 0; k < x.size(); ++k) {
    x[k] = std::clamp(x[k], lower[k], upper[k]);
  }
}

namespace {

double projected_gradient_norm(std::span<const double> x,
                               std::span<const double> g,
                               std::span<const double> lower,
                               std::span<const double> upper) {
  double m = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double y = std::clamp(x[k] - g[k], lower[k], upper[k]);
    m = std::max(m, std::abs(y - x[k]));
  }
  return m;
}

}  // namespace

SPGResult minimize_spg(const Objective& f, std::vector<double> x0,
                       std::span<const double> lower,
                       std::span<const double> upper, const SPGParams& params) {
  if (params.memory < 1 || !(params.alpha_min > 0.0) ||
      !(params.alpha_min < params.alpha_max) || !(params.gamma > 0.0) ||
      !(params.gamma < 1.0)) {
    throw std::invalid_argument("SPGParams: invalid constants");
  }
  const std::size_t n = x0.size();
  if (lower.size() != n || upper.size() != n) {
    throw std::invalid_argument("minimize_spg: bound size mismatch");
  }
  SPGResult r;
  r.x = std::move(x0);
  project_box(r.x, lower, upper);
  std::vector<double> g(n), x_new(n), g_new(n), d(n);
  r.f = f(r.x, g);
  r.evaluations = 1;
  r.pg_norm = projected_gradient_norm(r.x, g, lower, upper);

  std::deque<double> window{r.f};
  double alpha =
      r.pg_norm > 0.0
          ? std::clamp(1.0 / r.pg_norm, params.alpha_min, params.alpha_max)
          : params.alpha_max;

  for (int it = 0; it < params.max_iters; ++it) {
    if (r.pg_norm <= params.pg_tol) {
      r.converged = true;
      break;
    }
    for (std::size_t k = 0; k < n; ++k) {
      d[k] = std::clamp(r.x[k] - alpha * g[k], lower[k], upper[k]) - r.x[k];
    }
    const double gtd = dot(g, d);
    const double f_ref = *std::max_element(window.begin(), window.end());

    double lambda = 1.0;
    double f_new = 0.0;
    bool accepted = false;
    for (int bt = 0; bt <= params.max_backtracks; ++bt) {
      // x + lambda d is feasible; the clamp only removes rounding drift.
      for (std::size_t k = 0; k < n; ++k) {
        x_new[k] = std::clamp(r.x[k] + lambda * d[k], lower[k], upper[k]);
      }
      f_new = f(x_new, g_new);
      ++r.evaluations;
      if (f_new <= f_ref + params.gamma * lambda * gtd) {
        accepted = true;
        break;
      }
      const double denom = f_new - r.f - lambda * gtd;
      const double trial = denom > 0.0 ? -0.5 * lambda * lambda * gtd / denom
                                       : 0.5 * lambda;
      lambda = (trial >= params.sigma1 * lambda && trial <= params.sigma2 * lambda)
                   ? trial
                   : 0.5 * lambda;
    }
    if (!accepted) {
      r.line_search_failed = true;
      break;
    }

    double sts = 0.0, sty = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = x_new[k] - r.x[k];
      const double y = g_new[k] - g[k];
      sts += s * s;
      sty += s * y;
    }
    r.steps.push_back({f_new, f_ref, lambda, gtd, alpha});
    r.x.swap(x_new);
    g.swap(g_new);
    r.f = f_new;
    ++r.iterations;
    window.push_back(f_new);
    if (static_cast<int>(window.size()) > params.memory) window.pop_front();

    alpha = sty <= 0.0 ? params.alpha_max
                       : std::clamp(sts / sty, params.alpha_min, params.alpha_max);
    r.pg_norm = projected_gradient_norm(r.x, g, lower, upper);
  }
  if (r.pg_norm <= params.pg_tol) r.converged = true;
  return r;
}

}  // namespace phasenet
