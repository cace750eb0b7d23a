#include <cmath>

#include "doctest.h"
#include "dfrt/errors.hpp"
#include "dfrt/exact.hpp"
#include "dfrt/resonance.hpp"

using namespace dfrt;

TEST_CASE("free-particle trajectories rotate") {
  const Grid1D g(-10.0, 10.0, 120);
  const auto traj = theta_trajectory(
      [&](double t) { return SparseOperator(scaled_kinetic(g, t, 4), g); }, {0.2, 0.3}, 8);
  REQUIRE(traj.paths.size() == 8);
  for (std::size_t p = 0; p < traj.paths.size(); ++p) {
    CHECK(std::abs(std::arg(traj.at(p, 0).value) + 0.4) < 1e-3);
    CHECK(std::abs(std::arg(traj.at(p, 1).value) + 0.6) < 1e-3);
  }
  CHECK_THROWS_AS(select_ler(traj), NoResonanceError);
}

TEST_CASE("one-body model potential has a single stationary trajectory") {
  const Grid1D g(-10.0, 10.0, 1299);
  const PotentialParams p;
  const auto traj = theta_trajectory(
      [&](double t) { return SparseOperator(one_body_hamiltonian(g, p, t, 4), g); },
      {0.27, 0.43}, 16);
  int stationary = 0;
  for (std::size_t k = 0; k < traj.paths.size(); ++k) {
    const double moved = std::abs(traj.at(k, 1).value - traj.at(k, 0).value);
    if (moved < 1e-3) {
      ++stationary;
      continue;
    }
    const double turned = std::abs(std::arg(traj.at(k, 1).value) - std::arg(traj.at(k, 0).value));
    CHECK(turned > 0.1);
    if (std::abs(traj.at(k, 0).value) > 0.5) CHECK(moved > 1e-1);
  }
  CHECK(stationary == 1);
  const auto ler = select_ler(traj);
  CHECK(std::abs(ler.energy.real() - 1.6285) < 1e-3);
}

TEST_CASE("theta-independent builder: everything is stationary") {
  const Grid1D g(-5.0, 5.0, 60);
  CVector well(g.size());
  for (int i = 0; i < g.size(); ++i) well[i] = 0.5 * g[i] * g[i];
  const SparseOperator op(scaled_kinetic(g, 0.0, 4).plus_diagonal(well), g);
  const auto traj = theta_trajectory([&](double) { return op; }, {0.1, 0.2, 0.3}, 5);
  for (std::size_t k = 0; k < traj.paths.size(); ++k) CHECK(traj.stationarity(k) < 1e-9);
  // lowest positive real part among stationary paths is the ground state
  const auto ler = select_ler(traj);
  CHECK(std::abs(ler.energy - Complex(0.5)) < 1e-3);
  CHECK_FALSE(ler.lifetime.has_value());
}

TEST_CASE("theta_trajectory argument checks") {
  const Grid1D g(-5.0, 5.0, 40);
  auto builder = [&](double t) { return SparseOperator(scaled_kinetic(g, t, 4), g); };
  CHECK_THROWS_AS(theta_trajectory(builder, {0.2}, 4), ConfigError);
  CHECK_THROWS_AS(theta_trajectory(builder, {0.3, 0.2}, 4), ConfigError);
  CHECK_THROWS_AS(theta_trajectory(builder, {0.2, 0.9}, 4), ConfigError);
}

TEST_CASE("lifetime") {
  CHECK(lifetime(Complex(1.0, -0.5)) == 1.0);
  CHECK(lifetime(Complex(5.00198, -0.0159848)) == doctest::Approx(31.28).epsilon(1e-3));
  CHECK_THROWS_AS(lifetime(Complex(1.0, 0.0)), BoundStateError);
  CHECK_THROWS_AS(lifetime(Complex(1.0, 0.1)), NotDecayingError);
  CHECK_FALSE(try_lifetime(Complex(2.0, 0.0)).has_value());
  const Complex e(4.1, -0.0113);
  CHECK(*try_lifetime(e) * (-2.0 * e.imag()) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("orbital density") {
  const Grid1D g(-8.0, 8.0, 401);
  CVector phi(g.size());
  for (int i = 0; i < g.size(); ++i) phi[i] = std::exp(-0.5 * g[i] * g[i]);
  c_normalize(g.weights(), phi);

  const auto n = orbital_density(g, {phi}, {2.0});
  CHECK((n.values - 2.0 * phi.cwiseProduct(phi)).norm() < 1e-14);
  CHECK(std::abs(n.total() - Complex(2.0)) < 1e-12);

  const Complex phase = std::exp(Complex(0.0, 0.3));
  const CVector rotated = phase * phi;
  CHECK_THROWS_AS(orbital_density(g, {rotated}, {2.0}), NormalizationError);
  CHECK_NOTHROW(orbital_density(g, {CVector(-phi)}, {2.0}));
  CHECK_THROWS_AS(orbital_density(g, {phi}, {2.0, 1.0}), DimensionError);
}
