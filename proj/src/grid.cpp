#include "phasenet/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace phasenet {

GridSpec::GridSpec(int nx, int ny, double h, Point origin)
    : nx_(nx), ny_(ny), h_(h), origin_(origin) {
  if (nx < 2 || ny < 2) {
    throw std::invalid_argument("GridSpec: nx and ny must be >= 2");
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("GridSpec: h must be positive and finite");
  }
}

GridSpec GridSpec::covering(double width, double height, double h) {
  const double fx = width / h;
  const double fy = height / h;
  const auto nx = static_cast<int>(std::lround(fx));
  const auto ny = static_cast<int>(std::lround(fy));
  if (std::abs(fx - nx) > 1e-9 * std::max(1.0, fx) ||
      std::abs(fy - ny) > 1e-9 * std::max(1.0, fy)) {
    throw std::invalid_argument(
        "GridSpec::covering: domain extents are not multiples of h");
  }
  return GridSpec(nx, ny, h);
}

Point GridSpec::center(CellIndex c) const {
  return {origin_.x + (c.i + 0.5) * h_, origin_.y + (c.j + 0.5) * h_};
}

bool GridSpec::contains(Point p) const {
  return p.x >= origin_.x && p.x <= origin_.x + width() &&
         p.y >= origin_.y && p.y <= origin_.y + height();
}

namespace {

int nearest_center(double offset, double h, int n) {
  // Center k sits at (k + 1/2) h; rounding half-way cases down.
  const int k = static_cast<int>(std::ceil(offset / h - 1.0));
  return std::clamp(k, 0, n - 1);
}

}  // namespace

CellIndex GridSpec::snap(Point p) const {
  if (!contains(p)) {
    std::ostringstream os;
    os << "point (" << p.x << ", " << p.y << ") lies outside the grid";
    throw std::out_of_range(os.str());
  }
  return {nearest_center(p.x - origin_.x, h_, nx_),
          nearest_center(p.y - origin_.y, h_, ny_)};
}

ScalarField::ScalarField(const GridSpec& spec, double fill)
    : spec_(spec), values_(spec.cell_count(), fill) {}

ScalarField::ScalarField(const GridSpec& spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
  if (values_.size() != spec_.cell_count()) {
    throw std::invalid_argument("ScalarField: value count does not match grid");
  }
}

StaggeredField::StaggeredField(const GridSpec& spec)
    : spec_(spec),
      u_(static_cast<std::size_t>(spec.nx() + 1) * spec.ny(), 0.0),
      w_(static_cast<std::size_t>(spec.nx()) * (spec.ny() + 1), 0.0) {}

void StaggeredField::clear_boundary() {
  const int nx = spec_.nx();
  const int ny = spec_.ny();
  for (int j = 0; j < ny; ++j) {
    u(0, j) = 0.0;
    u(nx, j) = 0.0;
  }
  for (int i = 0; i < nx; ++i) {
    w(i, 0) = 0.0;
    w(i, ny) = 0.0;
  }
}

bool StaggeredField::boundary_is_zero() const {
  const int nx = spec_.nx();
  const int ny = spec_.ny();
  for (int j = 0; j < ny; ++j) {
    if (u(0, j) != 0.0 || u(nx, j) != 0.0) return false;
  }
  for (int i = 0; i < nx; ++i) {
    if (w(i, 0) != 0.0 || w(i, ny) != 0.0) return false;
  }
  return true;
}

StaggeredField grad(const ScalarField& phi) {
  const GridSpec& g = phi.spec();
  const int nx = g.nx();
  const int ny = g.ny();
  const double inv_h = 1.0 / g.h();
  StaggeredField out(g);
  for (int j = 0; j < ny; ++j) {
    for (int i = 1; i < nx; ++i) {
      out.u(i, j) = (phi(i, j) - phi(i - 1, j)) * inv_h;
    }
  }
  for (int j = 1; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      out.w(i, j) = (phi(i, j) - phi(i, j - 1)) * inv_h;
    }
  }
  return out;
}

ScalarField divergence(const StaggeredField& v) {
  const GridSpec& g = v.spec();
  const double inv_h = 1.0 / g.h();
  ScalarField out(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      out(i, j) = (v.u(i + 1, j) - v.u(i, j)) * inv_h +
                  (v.w(i, j + 1) - v.w(i, j)) * inv_h;
    }
  }
  return out;
}

double inner_scalar(const ScalarField& a, const ScalarField& b) {
  if (!(a.spec() == b.spec())) {
    throw std::invalid_argument("inner_scalar: grid mismatch");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  const double h = a.spec().h();
  return h * h * sum;
}

double inner_staggered(const StaggeredField& a, const StaggeredField& b) {
  if (!(a.spec() == b.spec())) {
    throw std::invalid_argument("inner_staggered: grid mismatch");
  }
  const GridSpec& g = a.spec();
  double sum = 0.0;
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 1; i < g.nx(); ++i) sum += a.u(i, j) * b.u(i, j);
  }
  for (int j = 1; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) sum += a.w(i, j) * b.w(i, j);
  }
  return g.h() * g.h() * sum;
}

namespace {

void write_header(std::ostream& os, const GridSpec& g) {
  os << g.nx() << ',' << g.ny() << ',' << g.h() << ',' << g.origin().x << ','
     << g.origin().y << '\n';
}

void write_rows(std::ostream& os, std::span<const double> values, int cols,
                int rows) {
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) {
      if (i > 0) os << ',';
      os << values[static_cast<std::size_t>(j) * cols + i];
    }
    os << '\n';
  }
}

std::ofstream open_for_write(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << std::setprecision(17);
  return os;
}

}  // namespace

void write_csv(const ScalarField& field, const std::string& path) {
  auto os = open_for_write(path);
  const GridSpec& g = field.spec();
  write_header(os, g);
  write_rows(os, field.values(), g.nx(), g.ny());
}

void write_csv(const StaggeredField& field, const std::string& stem) {
  const GridSpec& g = field.spec();
  {
    auto os = open_for_write(stem + "_u.csv");
    write_header(os, g);
    write_rows(os, field.u_values(), g.nx() + 1, g.ny());
  }
  {
    auto os = open_for_write(stem + "_w.csv");
    write_header(os, g);
    write_rows(os, field.w_values(), g.nx(), g.ny() + 1);
  }
}

ScalarField read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
    return out;
  };
  if (!std::getline(is, line)) throw std::runtime_error(path + ": empty file");
  const auto head = split(line);
  if (head.size() != 5) throw std::runtime_error(path + ": bad header");
  GridSpec g(static_cast<int>(head[0]), static_cast<int>(head[1]), head[2],
             {head[3], head[4]});
  std::vector<double> values;
  values.reserve(g.cell_count());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto row = split(line);
    if (row.size() != static_cast<std::size_t>(g.nx())) {
      throw std::runtime_error(path + ": row width does not match header");
    }
    values.insert(values.end(), row.begin(), row.end());
  }
  return ScalarField(g, std::move(values));
}

}  // namespace phasenet
