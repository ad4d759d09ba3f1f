#pragma once

#include <span>
#include <vector>

#include "phasenet/grid.hpp"

namespace phasenet {

class CellMask {
 public:
  CellMask() = default;
  explicit CellMask(const GridSpec& spec, bool fill = false);

  const GridSpec& spec() const { return spec_; }
  bool operator()(int i, int j) const { return bits_[spec_.index(i, j)] != 0; }
  bool operator()(CellIndex c) const { return (*this)(c.i, c.j); }
  void set(int i, int j, bool value) { bits_[spec_.index(i, j)] = value ? 1 : 0; }
  bool operator[](std::size_t k) const { return bits_[k] != 0; }
  std::size_t count() const;
  std::size_t size() const { return bits_.size(); }

 private:
  GridSpec spec_;
  std::vector<unsigned char> bits_;
};

/// value <= delta when `below`, value >= delta otherwise.
CellMask threshold(const ScalarField& field, double delta, bool below = true);

struct Connectivity {
  bool is_connected = true;
  int component_count = 0;
};

/// Components under 8-connectivity. An empty mask is connected with zero
/// components.
Connectivity connected(const CellMask& mask);

/// Labels of the 8-connected component containing `seed`.
CellMask component_of(const CellMask& mask, CellIndex seed);

/// Modica-Mortola length proxy (1/(4 eps)) sum h^2 (1-phi)^2
/// + eps sum h^2 |D phi|^2.
double mm_length(const ScalarField& phi, double eps);

/// Directional enlargement measure: the mean over `n_dirs` directions on the
/// half circle of the area of the mask dilated by the segment [-lambda nu,
/// lambda nu], divided by 2 lambda. A straight segment of length l gives
/// (2/pi) l.
double i_lambda(const CellMask& mask, double lambda, int n_dirs);

/// Length of the Euclidean Steiner minimal tree of up to four points.
double exact_steiner(std::span<const Point> points);

/// Fermat point of a triangle: the vertex if its angle is >= 120 degrees,
/// otherwise the first isogonic center.
Point fermat_point(Point a, Point b, Point c);

/// Reporting threshold 2 h max{phi : phi <= 0.5}, or 2 h min(phi) if no cell
/// is at or below 0.5.
double default_distance_threshold(const ScalarField& phi);

}  // namespace phasenet
