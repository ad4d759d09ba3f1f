#pragma once

#include <cstdint>
#include <vector>

#include "phasenet/grid.hpp"

namespace phasenet {

/// How a node's final distance was produced by the upwind update.
enum class UpdateBranch : std::uint8_t {
  kSource,    ///< the source cell, d = 0
  kOneSided,  ///< d = min(a, b) + h phi
  kTwoSided,  ///< d = (a + b + sqrt(2 h^2 phi^2 - (a - b)^2)) / 2
};

/// Inputs of the update that fixed a node's distance. `a_node` / `b_node`
/// are linear indices of the horizontal / vertical neighbors that supplied a
/// and b, or -1 when that direction did not contribute. For a one-sided
/// update only `a_node` is set and names the neighbor that achieved the min.
struct UpdateRecord {
  std::int64_t a_node = -1;
  std::int64_t b_node = -1;
  UpdateBranch branch = UpdateBranch::kSource;
};

struct GeodesicResult {
  ScalarField d;
  CellIndex source;
  std::vector<std::size_t> acceptance_order;
  std::vector<UpdateRecord> update_record;
};

/// Supergradient of L(phi) = sum_k w_k d_k together with L.
struct DistanceFunctionalGradient {
  ScalarField g;
  double value = 0.0;
};

/// Weighted geodesic distance to `source` by fast marching on the first-order
/// upwind scheme |grad d| = phi, phi sampled at the updated node. Heap ties are
/// broken by linear cell index, so results are bit-reproducible.
///
/// Throws std::invalid_argument if some phi value is not strictly positive
/// and finite, or lies below `eta` when `eta` is given; std::out_of_range for
/// a source outside the grid.
GeodesicResult fast_march(const ScalarField& phi, CellIndex source,
                          double eta = 0.0);

/// sum_k weights_k d_k for the distance field of (phi, source).
double weighted_distance_sum(const ScalarField& phi, CellIndex source,
                             const ScalarField& weights);

/// One reverse sweep over the acceptance order of `result`, which must come
/// from fast_march(phi, source). Returns an element of the superdifferential
/// of phi -> sum_k weights_k d_k at phi.
DistanceFunctionalGradient weighted_distance_gradient(
    const ScalarField& phi, const ScalarField& weights,
    const GeodesicResult& result);

enum class Neighborhood { kFour = 4, kEight = 8 };

/// Shortest paths on the cell-center graph. Entering node k through an edge
/// of length l costs l * phi_k, the same node sampling fast_march uses.
ScalarField dijkstra_oracle(const ScalarField& phi, CellIndex source,
                            Neighborhood neighborhood);

}  // namespace phasenet
