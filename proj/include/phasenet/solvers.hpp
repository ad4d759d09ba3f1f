#pragma once

#include <functional>
#include <span>
#include <vector>

namespace phasenet {

/// Smooth objective on a flat vector: returns f(x) and writes grad f(x).
using Objective =
    std::function<double(std::span<const double> x, std::span<double> grad)>;

struct CGParams {
  double grad_tol = 1e-6;    ///< relative to the gradient norm at the start
  int max_iters = 2000;
  int restart_period = 50;
  int max_line_search_evals = 40;
};

struct CGResult {
  std::vector<double> x;
  double f = 0.0;
  double grad_norm = 0.0;
  double initial_grad_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool line_search_failed = false;
};

/// Fletcher-Reeves nonlinear conjugate gradient with periodic restarts and a
/// bracketing line search enforcing the strong Wolfe conditions (c1 = 1e-4,
/// c2 = 0.1). Stops when ||grad|| <= grad_tol * max(||grad(x0)||, abs_floor).
CGResult minimize_fletcher_reeves(const Objective& f, std::vector<double> x0,
                                  const CGParams& params,
                                  double abs_floor = 0.0);

struct SPGParams {
  int memory = 10;
  double alpha_min = 1e-10;
  double alpha_max = 1e10;
  double gamma = 1e-4;
  double sigma1 = 0.1;
  double sigma2 = 0.9;
  int max_iters = 100;
  int max_backtracks = 40;
  double pg_tol = 1e-5;   ///< sup norm of P(x - g) - x
};

/// One accepted SPG step, kept for auditing the nonmonotone test.
struct SPGStep {
  double f_new = 0.0;
  double f_ref = 0.0;     ///< max of the last `memory` accepted values
  double lambda = 0.0;
  double gtd = 0.0;       ///< <g, d> at the previous iterate
  double alpha = 0.0;     ///< spectral step used to form d
};

struct SPGResult {
  std::vector<double> x;
  double f = 0.0;
  double pg_norm = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  bool line_search_failed = false;
  std::vector<SPGStep> steps;
};

/// Clamp onto [lower, upper] componentwise.
void project_box(std::span<double> x, std::span<const double> lower,
                 std::span<const double> upper);

/// Spectral projected gradient with nonmonotone Armijo line search (SPG2).
/// The objective's "gradient" may be any supergradient-plus-gradient
/// direction; acceptance only uses <g, d>.
SPGResult minimize_spg(const Objective& f, std::vector<double> x0,
                       std::span<const double> lower,
                       std::span<const double> upper, const SPGParams& params);

}  // namespace phasenet
