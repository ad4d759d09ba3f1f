#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include "doctest.h"
#include "phasenet/grid.hpp"
#include "test_support.hpp"

using namespace phasenet;
using namespace phasenet::testing;

namespace {

// Index-by-index reference with 1-based loops.
StaggeredField naive_grad(const ScalarField& phi) {
  const GridSpec& g = phi.spec();
  const int n1 = g.nx(), n2 = g.ny();
  StaggeredField out(g);
  for (int jj = 1; jj <= n2; ++jj)
    for (int ii = 1; ii <= n1 - 1; ++ii)
      out.u(ii, jj - 1) = (phi(ii, jj - 1) - phi(ii - 1, jj - 1)) / g.h();
  for (int ii = 1; ii <= n1; ++ii)
    for (int jj = 1; jj <= n2 - 1; ++jj)
      out.w(ii - 1, jj) = (phi(ii - 1, jj) - phi(ii - 1, jj - 1)) / g.h();
  return out;
}

ScalarField naive_div(const StaggeredField& v) {
  const GridSpec& g = v.spec();
  ScalarField out(g);
  for (int ii = 1; ii <= g.nx(); ++ii)
    for (int jj = 1; jj <= g.ny(); ++jj)
      out(ii - 1, jj - 1) = (v.u(ii, jj - 1) - v.u(ii - 1, jj - 1)) / g.h() +
                            (v.w(ii - 1, jj) - v.w(ii - 1, jj - 1)) / g.h();
  return out;
}

double kahan(const std::vector<double>& terms) {
  double sum = 0.0, c = 0.0;
  for (double t : terms) {
    const double y = t - c;
    const double s = sum + y;
    c = (s - sum) - y;
    sum = s;
  }
  return sum;
}

}  // namespace

TEST_CASE("grid spec geometry") {
  const GridSpec g(4, 3, 0.25, {1.0, -1.0});
  CHECK(g.cell_count() == 12);
  CHECK(g.width() == doctest::Approx(1.0));
  // 1-based center ((i - 1/2) h, (j - 1/2) h) for i = 2, j = 3
  const Point c = g.center({1, 2});
  CHECK(c.x == doctest::Approx(1.0 + 1.5 * 0.25));
  CHECK(c.y == doctest::Approx(-1.0 + 2.5 * 0.25));
  CHECK(g.index(3, 2) == 11);
  CHECK(g.cell(11) == CellIndex{3, 2});

  CHECK_THROWS_AS(GridSpec(1, 3, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(GridSpec(3, 3, 0.0), std::invalid_argument);

  const GridSpec r = GridSpec::covering(0.5, 1.0, 0.01);
  CHECK(r.nx() == 50);
  CHECK(r.ny() == 100);
  CHECK_THROWS_AS(GridSpec::covering(0.5, 1.0, 0.3), std::invalid_argument);
}

TEST_CASE("snap picks the nearest center with ties to the smaller index") {
  const GridSpec g(4, 4, 1.0);
  CHECK(g.snap({0.2, 3.9}) == CellIndex{0, 3});
  CHECK(g.snap({1.0, 1.0}) == CellIndex{0, 0});  // corner of four cells
  CHECK(g.snap({1.01, 2.99}) == CellIndex{1, 2});
  CHECK(g.snap({4.0, 0.0}) == CellIndex{3, 0});
  CHECK_THROWS_AS(g.snap({4.5, 1.0}), std::out_of_range);
}

TEST_CASE("grad") {
  SUBCASE("constant field has zero gradient") {
    const GridSpec g(5, 4, 0.3);
    const StaggeredField d = grad(ScalarField(g, 2.5));
    for (double x : d.u_values()) CHECK(x == 0.0);
    for (double x : d.w_values()) CHECK(x == 0.0);
  }
  SUBCASE("linear ramp in x") {
    const GridSpec g(3, 3, 1.0);
    ScalarField phi(g);
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i) phi(i, j) = (i + 1) * 1.0;
    const StaggeredField d = grad(phi);
    for (int j = 0; j < 3; ++j) {
      CHECK(d.u(0, j) == 0.0);
      CHECK(d.u(1, j) == 1.0);
      CHECK(d.u(2, j) == 1.0);
      CHECK(d.u(3, j) == 0.0);
    }
    for (double x : d.w_values()) CHECK(x == 0.0);
  }
  SUBCASE("random field matches the index loop exactly") {
    std::mt19937_64 rng(7);
    const GridSpec g(8, 8, 0.125);
    const ScalarField phi = random_scalar(g, rng);
    const StaggeredField a = grad(phi);
    const StaggeredField b = naive_grad(phi);
    CHECK(std::equal(a.u_values().begin(), a.u_values().end(), b.u_values().begin()));
    CHECK(std::equal(a.w_values().begin(), a.w_values().end(), b.w_values().begin()));
    CHECK(a.boundary_is_zero());
  }
}

TEST_CASE("divergence") {
  std::mt19937_64 rng(11);
  const GridSpec g(8, 8, 0.125);
  SUBCASE("zero field") {
    const ScalarField d = divergence(StaggeredField(g));
    for (double x : d.values()) CHECK(x == 0.0);
  }
  SUBCASE("integral vanishes for admissible fields") {
    for (int trial = 0; trial < 10; ++trial) {
      const StaggeredField v = random_staggered(g, rng);
      const ScalarField one(g, 1.0);
      CHECK(std::abs(inner_scalar(one, divergence(v))) < 1e-14);
    }
  }
  SUBCASE("random field matches the index loop exactly") {
    const StaggeredField v = random_staggered(g, rng);
    const ScalarField a = divergence(v);
    const ScalarField b = naive_div(v);
    CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  }
}

TEST_CASE("inner products") {
  const GridSpec g(10, 10, 0.1);
  const ScalarField one(g, 1.0);
  CHECK(inner_scalar(one, one) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(inner_scalar(one, ScalarField(g)) == 0.0);

  std::mt19937_64 rng(3);
  const GridSpec g2(13, 9, 0.07);
  const ScalarField a = random_scalar(g2, rng), b = random_scalar(g2, rng);
  std::vector<double> terms;
  for (std::size_t k = 0; k < a.size(); ++k) terms.push_back(0.07 * 0.07 * a[k] * b[k]);
  CHECK(rel_err(inner_scalar(a, b), kahan(terms)) < 1e-13);

  const StaggeredField va = random_staggered(g2, rng), vb = random_staggered(g2, rng);
  terms.clear();
  for (int j = 0; j < 9; ++j)
    for (int i = 1; i < 13; ++i) terms.push_back(0.0049 * va.u(i, j) * vb.u(i, j));
  for (int j = 1; j < 9; ++j)
    for (int i = 0; i < 13; ++i) terms.push_back(0.0049 * va.w(i, j) * vb.w(i, j));
  CHECK(rel_err(inner_staggered(va, vb), kahan(terms)) < 1e-13);
  CHECK(inner_staggered(va, StaggeredField(g2)) == 0.0);

  CHECK_THROWS_AS(inner_scalar(a, one), std::invalid_argument);
}

TEST_CASE("summation by parts and linearity hold on random fields") {
  std::mt19937_64 rng(2024);
  const GridSpec g(16, 16, 1.0 / 16);
  for (int trial = 0; trial < 50; ++trial) {
    const ScalarField phi = random_scalar(g, rng, -3.0, 3.0);
    const StaggeredField v = random_staggered(g, rng, -3.0, 3.0);
    const double lhs = inner_staggered(grad(phi), v);
    const double rhs = -inner_scalar(phi, divergence(v));
    CHECK(rel_err(lhs, rhs) <= 1e-12);
  }
  const ScalarField a = random_scalar(g, rng), b = random_scalar(g, rng);
  ScalarField comb(g);
  for (std::size_t k = 0; k < comb.size(); ++k) comb[k] = 0.3 * a[k] - 1.7 * b[k];
  const StaggeredField ga = grad(a), gb = grad(b), gc = grad(comb);
  for (std::size_t k = 0; k < gc.u_values().size(); ++k) {
    CHECK(gc.u_values()[k] ==
          doctest::Approx(0.3 * ga.u_values()[k] - 1.7 * gb.u_values()[k]).epsilon(1e-12));
  }
}

TEST_CASE("csv round trip and layout") {
  const GridSpec g(3, 2, 0.5, {0.25, 0.0});
  ScalarField f(g);
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = 0.1 * k + 1.0 / 3.0;
  const auto path = (std::filesystem::temp_directory_path() / "phasenet_grid.csv").string();
  write_csv(f, path);
  std::ifstream is(path);
  std::string header, row0;
  std::getline(is, header);
  std::getline(is, row0);
  CHECK(header == "3,2,0.5,0.25,0");
  CHECK(row0.substr(0, 18) == "0.3333333333333333");
  const ScalarField back = read_csv(path);
  CHECK(back.spec() == g);
  CHECK(std::equal(back.values().begin(), back.values().end(), f.values().begin()));
  std::filesystem::remove(path);
}

TEST_CASE("covering grids reproduce the extents and divergence is linear") {
  const GridSpec g = GridSpec::covering(0.5, 1.0, 0.01);
  CHECK(std::abs(g.nx() * g.h() - 0.5) <= 1e-15);
  CHECK(std::abs(g.ny() * g.h() - 1.0) <= 1e-15);

  std::mt19937_64 rng(97);
  const GridSpec s(9, 7, 0.2);
  const StaggeredField a = random_staggered(s, rng), b = random_staggered(s, rng);
  StaggeredField c(s);
  for (std::size_t k = 0; k < c.u_values().size(); ++k)
    c.u_values()[k] = 2.0 * a.u_values()[k] + 0.5 * b.u_values()[k];
  for (std::size_t k = 0; k < c.w_values().size(); ++k)
    c.w_values()[k] = 2.0 * a.w_values()[k] + 0.5 * b.w_values()[k];
  const ScalarField da = divergence(a), db = divergence(b), dc = divergence(c);
  for (std::size_t k = 0; k < dc.size(); ++k)
    CHECK(dc[k] == doctest::Approx(2.0 * da[k] + 0.5 * db[k]).epsilon(1e-12));
}
