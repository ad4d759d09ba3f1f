#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "phasenet/grid.hpp"

namespace phasenet {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;   ///< worst observed error or violation
  double tolerance = 0.0;
  double seconds = 0.0;
};

struct CheckOptions {
  std::uint64_t seed = 12345;
  /// Divergence operator under test; replaceable to exercise the suite.
  std::function<ScalarField(const StaggeredField&)> divergence =
      [](const StaggeredField& v) { return phasenet::divergence(v); };
};

/// Invariant and oracle suite: operator adjointness, fast marching against
/// Euclidean and graph distances, homogeneity, Euler identity, concavity,
/// energy gradients, the enlargement measure and the Steiner oracle.
std::vector<CheckResult> run_checks(const CheckOptions& options = {});

/// Fixed-width table, one row per check.
std::string format_checks(const std::vector<CheckResult>& results);

}  // namespace phasenet
