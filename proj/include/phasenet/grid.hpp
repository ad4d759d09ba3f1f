#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace phasenet {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

/// 0-based cell index; cell (i, j) is column i counted from the left and
/// row j counted from the bottom.
struct CellIndex {
  int i = 0;
  int j = 0;

  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Uniform grid of square cells covering [origin, origin + (nx*h, ny*h)].
///
/// Cell (i, j) (0-based) has its center at origin + ((i + 1/2) h, (j + 1/2) h).
/// Scalar storage is row-major with rows ordered bottom to top, so the linear
/// index of (i, j) is j * nx + i.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(int nx, int ny, double h, Point origin = {});

  /// Square grid over the rectangle [0, width] x [0, height]. Both extents
  /// must be integer multiples of h up to rounding.
  static GridSpec covering(double width, double height, double h);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double h() const { return h_; }
  Point origin() const { return origin_; }
  double width() const { return nx_ * h_; }
  double height() const { return ny_ * h_; }
  std::size_t cell_count() const {
    return static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_);
  }

  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * nx_ + i;
  }
  std::size_t index(CellIndex c) const { return index(c.i, c.j); }
  CellIndex cell(std::size_t linear) const {
    return {static_cast<int>(linear % nx_), static_cast<int>(linear / nx_)};
  }
  bool in_range(CellIndex c) const {
    return c.i >= 0 && c.i < nx_ && c.j >= 0 && c.j < ny_;
  }

  Point center(CellIndex c) const;
  bool contains(Point p) const;

  /// Nearest cell center; ties go to the smaller index. Throws
  /// std::out_of_range when p lies outside the closed domain.
  CellIndex snap(Point p) const;

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  int nx_ = 0;
  int ny_ = 0;
  double h_ = 0.0;
  Point origin_{};
};

/// Cell-centered scalar field.
class ScalarField {
 public:
  ScalarField() = default;
  explicit ScalarField(const GridSpec& spec, double fill = 0.0);
  ScalarField(const GridSpec& spec, std::vector<double> values);

  const GridSpec& spec() const { return spec_; }
  std::size_t size() const { return values_.size(); }

  double& operator()(int i, int j) { return values_[spec_.index(i, j)]; }
  double operator()(int i, int j) const { return values_[spec_.index(i, j)]; }
  double& operator()(CellIndex c) { return (*this)(c.i, c.j); }
  double operator()(CellIndex c) const { return (*this)(c.i, c.j); }
  double& operator[](std::size_t k) { return values_[k]; }
  double operator[](std::size_t k) const { return values_[k]; }

  std::span<double> values() { return values_; }
  std::span<const double> values() const { return values_; }

 private:
  GridSpec spec_;
  std::vector<double> values_;
};

/// Face-centered (MAC) vector field. u(i, j) lives on the vertical face to the
/// left of cell (i, j), i in [0, nx]; w(i, j) on the horizontal face below
/// cell (i, j), j in [0, ny]. Faces on the domain boundary (u at i = 0, nx and
/// w at j = 0, ny) are stored but always zero.
class StaggeredField {
 public:
  StaggeredField() = default;
  explicit StaggeredField(const GridSpec& spec);

  const GridSpec& spec() const { return spec_; }

  std::size_t u_index(int i, int j) const {
    return static_cast<std::size_t>(j) * (spec_.nx() + 1) + i;
  }
  std::size_t w_index(int i, int j) const {
    return static_cast<std::size_t>(j) * spec_.nx() + i;
  }

  double& u(int i, int j) { return u_[u_index(i, j)]; }
  double u(int i, int j) const { return u_[u_index(i, j)]; }
  double& w(int i, int j) { return w_[w_index(i, j)]; }
  double w(int i, int j) const { return w_[w_index(i, j)]; }

  std::span<double> u_values() { return u_; }
  std::span<const double> u_values() const { return u_; }
  std::span<double> w_values() { return w_; }
  std::span<const double> w_values() const { return w_; }

  /// Zeroes every boundary face.
  void clear_boundary();
  bool boundary_is_zero() const;

 private:
  GridSpec spec_;
  std::vector<double> u_;
  std::vector<double> w_;
};

/// Forward differences onto interior faces; boundary faces are zero.
StaggeredField grad(const ScalarField& phi);

/// Cell-centered divergence of a face field.
ScalarField divergence(const StaggeredField& v);

/// Sum of h^2 a b over cell centers.
double inner_scalar(const ScalarField& a, const ScalarField& b);

/// Sum of h^2 (A.u B.u + A.w B.w) over interior faces.
double inner_staggered(const StaggeredField& a, const StaggeredField& b);

/// Writes "nx,ny,h,origin_x,origin_y" followed by ny rows of nx values,
/// bottom row first. Values are printed with 17 significant digits.
void write_csv(const ScalarField& field, const std::string& path);

/// Writes the u and w components to <stem>_u.csv and <stem>_w.csv. Both carry
/// the grid header; u rows have nx + 1 values (ny rows), w rows nx values
/// (ny + 1 rows), boundary faces included.
void write_csv(const StaggeredField& field, const std::string& stem);

ScalarField read_csv(const std::string& path);

}  // namespace phasenet
