#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dfrt/errors.hpp"
#include "dfrt/grid.hpp"

using namespace dfrt;

TEST_CASE("make_grid places endpoints and spacing") {
  const Grid1D g = make_grid(-1.0, 1.0, 3);
  CHECK(g.size() == 3);
  CHECK(g[0] == doctest::Approx(-1.0));
  CHECK(g[1] == doctest::Approx(0.0));
  CHECK(g[2] == doctest::Approx(1.0));
  CHECK(g.spacing() == doctest::Approx(1.0));

  const Grid1D big = make_grid(-10.0, 10.0, 299);
  CHECK(std::abs(big.spacing() - 20.0 / 298.0) < 1e-15);
  CHECK(big[298] == 10.0);
}

TEST_CASE("make_grid rejects degenerate input") {
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 2), ConfigError);
  CHECK_THROWS_AS(make_grid(1.0, 1.0, 10), ConfigError);
  CHECK_THROWS_AS(make_grid(2.0, 1.0, 10), ConfigError);
}

TEST_CASE("trapezoid weights") {
  const Grid1D g(0.0, 1.0, 11);
  CHECK(g.weights()[0] == doctest::Approx(0.05));
  CHECK(g.weights()[5] == doctest::Approx(0.1));
  CHECK(g.weights().sum() == doctest::Approx(1.0));
}

TEST_CASE("integrate simple functions") {
  const Grid1D unit(0.0, 1.0, 17);
  CHECK(std::abs(integrate(unit, CVector(CVector::Ones(17))) - Complex(1.0)) < 1e-14);

  const Grid1D sym(-1.0, 1.0, 41);
  CVector x(41);
  for (int i = 0; i < 41; ++i) x[i] = sym[i];
  CHECK(std::abs(integrate(sym, x)) < 1e-14);

  const Grid1D wide(-10.0, 10.0, 2001);
  CVector gauss(wide.size());
  for (int i = 0; i < wide.size(); ++i) gauss[i] = std::exp(-wide[i] * wide[i]);
  CHECK(std::abs(integrate(wide, gauss) - std::sqrt(std::numbers::pi)) < 1e-10);

  CHECK_THROWS_AS(integrate(wide, CVector(CVector::Ones(3))), DimensionError);
}

TEST_CASE("laplacian is exact on quadratics") {
  const Grid1D g(-1.0, 1.0, 41);
  CVector f(g.size());
  for (int i = 0; i < g.size(); ++i) f[i] = g[i] * g[i];
  for (int order : {2, 4, 6}) {
    const BandedOperator lap = laplacian(g, order);
    CHECK(lap.dimension() == g.size());
    CHECK(lap.bandwidth() == order / 2);
    const CVector d2 = lap.apply(f);
    for (int i = order / 2; i < g.size() - order / 2; ++i) {
      CHECK(std::abs(d2[i] - Complex(2.0)) < 1e-9);
    }
  }
  CHECK_THROWS_AS(laplacian(g, 3), ConfigError);
}

TEST_CASE("fourth-order laplacian of sin") {
  const int n = 201;
  const Grid1D g(0.0, 10.0, n);
  REQUIRE(std::abs(g.spacing() - 0.05) < 1e-15);
  CVector f(n);
  for (int i = 0; i < n; ++i) f[i] = std::sin(g[i]);
  const CVector d2 = laplacian(g, 4).apply(f);
  double worst = 0.0;
  for (int i = 2; i < n - 2; ++i) worst = std::max(worst, std::abs(d2[i] + std::sin(g[i])));
  CHECK(worst < 1e-5);
}

TEST_CASE("scaled kinetic rotates every entry") {
  const Grid1D g(-5.0, 5.0, 51);
  const Eigen::MatrixXcd base = laplacian(g, 4).to_dense() * -0.5;
  CHECK((scaled_kinetic(g, 0.0, 4).to_dense() - base).norm() < 1e-12);
  const Eigen::MatrixXcd rotated = scaled_kinetic(g, 0.35, 4).to_dense();
  CHECK((rotated - base * std::exp(Complex(0.0, -0.7))).norm() < 1e-12);
  CHECK_THROWS_AS(scaled_kinetic(g, 0.8, 4), ConfigError);
  CHECK_THROWS_AS(scaled_kinetic(g, -0.1, 4), ConfigError);
}

TEST_CASE("banded operator agrees with its sparse and dense forms") {
  const Grid1D g(-2.0, 2.0, 30);
  CVector diag(30);
  for (int i = 0; i < 30; ++i) diag[i] = Complex(g[i], 0.5 * i);
  const BandedOperator op = laplacian(g, 6).plus_diagonal(diag);
  CVector v(30);
  for (int i = 0; i < 30; ++i) v[i] = Complex(std::cos(i), std::sin(2.0 * i));
  const CVector a = op.apply(v);
  CHECK((a - op.to_dense() * v).norm() < 1e-10);
  CHECK((a - op.to_sparse() * v).norm() < 1e-10);
  CHECK(op.entry(3, 5) == op.entry(5, 3));
  CHECK(op.entry(0, 4) == Complex(0.0));
}
