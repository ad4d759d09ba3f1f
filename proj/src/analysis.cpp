#include "phasenet/analysis.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "phasenet/energy.hpp"

namespace phasenet {

CellMask::CellMask(const GridSpec& spec, bool fill)
    : spec_(spec), bits_(spec.cell_count(), fill ? 1 : 0) {}

std::size_t CellMask::count() const {
  return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), 1));
}

CellMask threshold(const ScalarField& field, double delta, bool below) {
  const GridSpec& g = field.spec();
  CellMask mask(g);
  for (int j = 0; j < g.ny(); ++j) {
    for (int i = 0; i < g.nx(); ++i) {
      const double v = field(i, j);
      mask.set(i, j, below ? v <= delta : v >= delta);
    }
  }
  return mask;
}

namespace {

// Flood fill from `seed`, marking visited cells with `label`.
void flood(const CellMask& mask, CellIndex seed, std::vector<int>& labels,
           int label) {
  const GridSpec& g = mask.spec();
  std::vector<CellIndex> stack{seed};
  labels[g.index(seed)] = label;
  while (!stack.empty()) {
    const CellIndex c = stack.back();
    stack.pop_back();
    for (int dj = -1; dj <= 1; ++dj) {
      for (int di = -1; di <= 1; ++di) {
        const CellIndex q{c.i + di, c.j + dj};
        if ((di == 0 && dj == 0) || !g.in_range(q)) continue;
        const std::size_t k = g.index(q);
        if (mask[k] && labels[k] == 0) {
          labels[k] = label;
          stack.push_back(q);
        }
      }
    }
  }
}

}  // namespace

Connectivity connected(const CellMask& mask) {
  const GridSpec& g = mask.spec();
  std::vector<int> labels(mask.size(), 0);
  int count = 0;
  for (std::size_t k = 0; k < mask.size(); ++k) {
    if (mask[k] && labels[k] == 0) flood(mask, g.cell(k), labels, ++count);
  }
  return {count <= 1, count};
}

CellMask component_of(const CellMask& mask, CellIndex seed) {
  const GridSpec& g = mask.spec();
  CellMask out(g);
  if (!g.in_range(seed) || !mask(seed)) return out;
  std::vector<int> labels(mask.size(), 0);
  flood(mask, seed, labels, 1);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k]) {
      const CellIndex c = g.cell(k);
      out.set(c.i, c.j, true);
    }
  }
  return out;
}

double mm_length(const ScalarField& phi, double eps) {
  const auto t = modica_mortola_terms(phi, 1.0, eps);
  return t.penalty + t.gradient;
}

double i_lambda(const CellMask& mask, double lambda, int n_dirs) {
  if (!(lambda > 0.0)) throw std::invalid_argument("i_lambda: lambda must be > 0");
  if (n_dirs < 8) throw std::invalid_argument("i_lambda: need at least 8 directions");
  const GridSpec& g = mask.spec();
  const double h = g.h();
  const int pad = static_cast<int>(std::ceil(lambda / h)) + 1;
  const int width = g.nx() + 2 * pad;
  const int height = g.ny() + 2 * pad;

  std::vector<CellIndex> cells;
  for (std::size_t k = 0; k < mask.size(); ++k)
    if (mask[k]) cells.push_back(g.cell(k));
  if (cells.empty()) return 0.0;

  // Sample offsets t in [-lambda, lambda] at spacing h/2, endpoints included.
  const int steps = static_cast<int>(std::ceil(2.0 * lambda / (0.5 * h)));
  std::vector<double> offsets(steps + 1);
  for (int m = 0; m <= steps; ++m) offsets[m] = -lambda + 2.0 * lambda * m / steps;

  std::vector<unsigned> stamp(static_cast<std::size_t>(width) * height, 0);
  double area_sum = 0.0;
  for (int k = 0; k < n_dirs; ++k) {
    const double theta = std::numbers::pi * k / n_dirs;
    const double cx = std::cos(theta);
    const double cy = std::sin(theta);
    const unsigned tag = static_cast<unsigned>(k) + 1;
    std::size_t hits = 0;
    for (const CellIndex& c : cells) {
      // Cell-unit coordinates of the center relative to the padded raster.
      const double px = c.i + 0.5 + pad;
      const double py = c.j + 0.5 + pad;
      for (double t : offsets) {
        const int qi = static_cast<int>(std::floor(px + t * cx / h));
        const int qj = static_cast<int>(std::floor(py + t * cy / h));
        if (qi < 0 || qj < 0 || qi >= width || qj >= height) continue;
        unsigned& s = stamp[static_cast<std::size_t>(qj) * width + qi];
        if (s != tag) {
          s = tag;
          ++hits;
        }
      }
    }
    area_sum += static_cast<double>(hits) * h * h;
  }
  return area_sum / n_dirs / (2.0 * lambda);
}

namespace {

double dist(Point a, Point b) { return std::hypot(a.x - b.x, a.y - b.y); }

Point lerp(Point a, Point b, double t) {
  return {a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
}

// cos of the angle at p in triangle (p, q, r)
double cos_at(Point p, Point q, Point r) {
  const double ux = q.x - p.x, uy = q.y - p.y;
  const double vx = r.x - p.x, vy = r.y - p.y;
  return (ux * vx + uy * vy) / (std::hypot(ux, uy) * std::hypot(vx, vy));
}

double steiner3(Point a, Point b, Point c) {
  const Point f = fermat_point(a, b, c);
  return dist(f, a) + dist(f, b) + dist(f, c);
}

double mst_length(std::span<const Point> pts) {
  const std::size_t n = pts.size();
  std::vector<char> in(n, 0);
  std::vector<double> best(n, INFINITY);
  best[0] = 0.0;
  double total = 0.0;
  for (std::size_t it = 0; it < n; ++it) {
    std::size_t u = n;
    for (std::size_t k = 0; k < n; ++k)
      if (!in[k] && (u == n || best[k] < best[u])) u = k;
    in[u] = 1;
    total += best[u];
    for (std::size_t k = 0; k < n; ++k)
      if (!in[k]) best[k] = std::min(best[k], dist(pts[u], pts[k]));
  }
  return total;
}

// Two Steiner points s1 ~ {a, b}, s2 ~ {c, d}, joined by an edge. Block
// coordinate descent on the (convex) total length; each block update is a
// Fermat point.
double full_topology(Point a, Point b, Point c, Point d) {
  const Point mid{(a.x + b.x + c.x + d.x) / 4.0, (a.y + b.y + c.y + d.y) / 4.0};
  Point s1 = lerp(lerp(a, b, 0.5), mid, 0.5);
  Point s2 = lerp(lerp(c, d, 0.5), mid, 0.5);
  for (int it = 0; it < 200000; ++it) {
    const Point n1 = fermat_point(a, b, s2);
    const Point n2 = fermat_point(c, d, n1);
    const double move = std::max(dist(n1, s1), dist(n2, s2));
    s1 = n1;
    s2 = n2;
    if (move < 1e-14) break;
  }
  return dist(s1, a) + dist(s1, b) + dist(s1, s2) + dist(s2, c) + dist(s2, d);
}

}  // namespace

Point fermat_point(Point a, Point b, Point c) {
  constexpr double tiny = 1e-15;
  if (dist(a, b) < tiny || dist(a, c) < tiny) return a;
  if (dist(b, c) < tiny) return b;
  const double ca = cos_at(a, b, c);
  const double cb = cos_at(b, a, c);
  const double cc = cos_at(c, a, b);
  if (ca <= -0.5) return a;
  if (cb <= -0.5) return b;
  if (cc <= -0.5) return c;
  const double third = std::numbers::pi / 3.0;
  const double wa = dist(b, c) / std::sin(std::acos(ca) + third);
  const double wb = dist(a, c) / std::sin(std::acos(cb) + third);
  const double wc = dist(a, b) / std::sin(std::acos(cc) + third);
  const double s = wa + wb + wc;
  return {(wa * a.x + wb * b.x + wc * c.x) / s,
          (wa * a.y + wb * b.y + wc * c.y) / s};
}

double exact_steiner(std::span<const Point> points) {
  std::vector<Point> pts;
  for (const Point& p : points) {
    const bool dup = std::any_of(pts.begin(), pts.end(),
                                 [&](const Point& q) { return dist(p, q) < 1e-12; });
    if (!dup) pts.push_back(p);
  }
  if (pts.empty() || pts.size() > 4) {
    throw std::invalid_argument("exact_steiner: need between 1 and 4 points");
  }
  switch (pts.size()) {
    case 1:
      return 0.0;
    case 2:
      return dist(pts[0], pts[1]);
    case 3:
      return steiner3(pts[0], pts[1], pts[2]);
    default:
      break;
  }
  double best = mst_length(pts);
  // A Steiner tree on three of the points plus an edge to the fourth.
  for (int skip = 0; skip < 4; ++skip) {
    std::array<Point, 3> tri;
    int m = 0;
    for (int k = 0; k < 4; ++k)
      if (k != skip) tri[m++] = pts[k];
    double attach = INFINITY;
    for (const Point& p : tri) attach = std::min(attach, dist(p, pts[skip]));
    best = std::min(best, steiner3(tri[0], tri[1], tri[2]) + attach);
  }
  const Point &a = pts[0], &b = pts[1], &c = pts[2], &d = pts[3];
  best = std::min(best, full_topology(a, b, c, d));
  best = std::min(best, full_topology(a, c, b, d));
  best = std::min(best, full_topology(a, d, b, c));
  return best;
}

double default_distance_threshold(const ScalarField& phi) {
  double top = -1.0;
  double lowest = INFINITY;
  for (std::size_t k = 0; k < phi.size(); ++k) {
    lowest = std::min(lowest, phi[k]);
    if (phi[k] <= 0.5) top = std::max(top, phi[k]);
  }
  const double h = phi.spec().h();
  return 2.0 * h * (top >= 0.0 ? top : lowest);
}

}  // namespace phasenet
