#include "phasenet/eikonal.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace phasenet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (distance, linear index); std::greater makes this a min-heap with ties
// resolved toward the smaller index.
using HeapEntry = std::pair<double, std::size_t>;
using MinHeap =
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>>;

void validate_metric(const ScalarField& phi, double eta) {
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double v = phi[k];
    if (!std::isfinite(v) || v <= 0.0 || v < eta) {
      std::ostringstream os;
      os << "fast_march: metric value " << v << " at cell " << k
         << " violates the lower bound " << (eta > 0.0 ? eta : 0.0);
      throw std::invalid_argument(os.str());
    }
  }
}

struct Candidate {
  double d = kInf;
  UpdateRecord record;
};

// Smallest accepted value among the two neighbors along one axis.
std::pair<double, std::int64_t> upwind_min(const std::vector<double>& d,
                                           const std::vector<char>& accepted,
                                           std::int64_t lo, std::int64_t hi) {
  double best = kInf;
  std::int64_t node = -1;
  if (lo >= 0 && accepted[lo]) {
    best = d[lo];
    node = lo;
  }
  if (hi >= 0 && accepted[hi] && d[hi] < best) {
    best = d[hi];
    node = hi;
  }
  return {best, node};
}

Candidate solve_update(double a, std::int64_t a_node, double b,
                       std::int64_t b_node, double cost) {
  Candidate c;
  if (b_node < 0 || (a_node >= 0 && a - b <= -cost)) {
    // only a, or a dominates by at least h phi
    c.d = a + cost;
    c.record = {a_node, -1, UpdateBranch::kOneSided};
    return c;
  }
  if (a_node < 0 || b - a <= -cost) {
    c.d = b + cost;
    c.record = {b_node, -1, UpdateBranch::kOneSided};
    return c;
  }
  const double diff = a - b;
  const double disc = 2.0 * cost * cost - diff * diff;
  c.d = 0.5 * (a + b + std::sqrt(disc));
  c.record = {a_node, b_node, UpdateBranch::kTwoSided};
  return c;
}

}  // namespace

GeodesicResult fast_march(const ScalarField& phi, CellIndex source,
                          double eta) {
  const GridSpec& g = phi.spec();
  if (!g.in_range(source)) {
    throw std::out_of_range("fast_march: source cell outside the grid");
  }
  validate_metric(phi, eta);

  const int nx = g.nx();
  const int ny = g.ny();
  const double h = g.h();
  const std::size_t n = g.cell_count();

  std::vector<double> d(n, kInf);
  std::vector<char> accepted(n, 0);
  GeodesicResult result;
  result.source = source;
  result.acceptance_order.reserve(n);
  result.update_record.assign(n, UpdateRecord{});

  MinHeap heap;
  const std::size_t s = g.index(source);
  d[s] = 0.0;
  heap.emplace(0.0, s);

  while (!heap.empty()) {
    const auto [dk, k] = heap.top();
    heap.pop();
    if (accepted[k] || dk != d[k]) continue;  // stale entry
    accepted[k] = 1;
    result.acceptance_order.push_back(k);

    const CellIndex c = g.cell(k);
    const CellIndex nbrs[4] = {
        {c.i - 1, c.j}, {c.i + 1, c.j}, {c.i, c.j - 1}, {c.i, c.j + 1}};
    for (const CellIndex& q : nbrs) {
      if (!g.in_range(q)) continue;
      const std::size_t m = g.index(q);
      if (accepted[m]) continue;

      const std::int64_t left = q.i > 0 ? std::int64_t(m - 1) : -1;
      const std::int64_t right = q.i + 1 < nx ? std::int64_t(m + 1) : -1;
      const std::int64_t down = q.j > 0 ? std::int64_t(m - nx) : -1;
      const std::int64_t up = q.j + 1 < ny ? std::int64_t(m + nx) : -1;
      const auto [a, a_node] = upwind_min(d, accepted, left, right);
      const auto [b, b_node] = upwind_min(d, accepted, down, up);

      const Candidate cand = solve_update(a, a_node, b, b_node, h * phi[m]);
      if (cand.d < d[m]) {
        d[m] = cand.d;
        result.update_record[m] = cand.record;
        heap.emplace(cand.d, m);
      }
    }
  }

  result.d = ScalarField(g, std::move(d));
  return result;
}

double weighted_distance_sum(const ScalarField& phi, CellIndex source,
                             const ScalarField& weights) {
  const GeodesicResult geo = fast_march(phi, source);
  double sum = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    sum += weights[k] * geo.d[k];
  }
  return sum;
}

DistanceFunctionalGradient weighted_distance_gradient(
    const ScalarField& phi, const ScalarField& weights,
    const GeodesicResult& result) {
  const GridSpec& g = phi.spec();
  if (!(weights.spec() == g) || !(result.d.spec() == g)) {
    throw std::invalid_argument("weighted_distance_gradient: grid mismatch");
  }
  const double h = g.h();

  DistanceFunctionalGradient out{ScalarField(g), 0.0};
  std::vector<double> adj(weights.values().begin(), weights.values().end());
  for (std::size_t k = 0; k < weights.size(); ++k) {
    out.value += weights[k] * result.d[k];
  }

  const auto& order = result.acceptance_order;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    const std::size_t k = *it;
    const double sens = adj[k];
    if (sens == 0.0) continue;
    const UpdateRecord& rec = result.update_record[k];
    switch (rec.branch) {
      case UpdateBranch::kSource:
        break;
      case UpdateBranch::kOneSided:
        out.g[k] += sens * h;
        adj[rec.a_node] += sens;
        break;
      case UpdateBranch::kTwoSided: {
        const double a = result.d[rec.a_node];
        const double b = result.d[rec.b_node];
        const double cost = h * phi[k];
        const double diff = a - b;
        const double root = std::sqrt(2.0 * cost * cost - diff * diff);
        out.g[k] += sens * h * cost / root;
        adj[rec.a_node] += sens * 0.5 * (1.0 - diff / root);
        adj[rec.b_node] += sens * 0.5 * (1.0 + diff / root);
        break;
      }
    }
  }
  return out;
}

ScalarField dijkstra_oracle(const ScalarField& phi, CellIndex source,
                            Neighborhood neighborhood) {
  const GridSpec& g = phi.spec();
  if (!g.in_range(source)) {
    throw std::out_of_range("dijkstra_oracle: source cell outside the grid");
  }
  const double h = g.h();
  const std::size_t n = g.cell_count();
  std::vector<double> d(n, kInf);
  std::vector<char> done(n, 0);

  struct Step {
    int di, dj;
    double length;
  };
  const double diag = std::sqrt(2.0) * h;
  std::vector<Step> steps = {{-1, 0, h}, {1, 0, h}, {0, -1, h}, {0, 1, h}};
  if (neighborhood == Neighborhood::kEight) {
    steps.push_back({-1, -1, diag});
    steps.push_back({1, -1, diag});
    steps.push_back({-1, 1, diag});
    steps.push_back({1, 1, diag});
  }

  MinHeap heap;
  const std::size_t s = g.index(source);
  d[s] = 0.0;
  heap.emplace(0.0, s);
  while (!heap.empty()) {
    const auto [dk, k] = heap.top();
    heap.pop();
    if (done[k] || dk != d[k]) continue;
    done[k] = 1;
    const CellIndex c = g.cell(k);
    for (const Step& st : steps) {
      const CellIndex q{c.i + st.di, c.j + st.dj};
      if (!g.in_range(q)) continue;
      const std::size_t m = g.index(q);
      const double cand = dk + st.length * phi[m];
      if (cand < d[m]) {
        d[m] = cand;
        heap.emplace(cand, m);
      }
    }
  }
  return ScalarField(g, std::move(d));
}

}  // namespace phasenet
