#include "dfrt/resonance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dfrt/errors.hpp"

namespace dfrt {

double ThetaTrajectory::stationarity(int path) const {
  double worst = 0.0;
  for (size_t t = 0; t + 1 < thetas.size(); ++t) {
    const Complex step = at(path, static_cast<int>(t) + 1).value -
                         at(path, static_cast<int>(t)).value;
    worst = std::max(worst, std::abs(step) / (thetas[t + 1] - thetas[t]));
  }
  return worst;
}

SpectrumSolver lowest_real_part_solver(int k) {
  return [k](const SparseOperator& op, double) {
    return dense_lowest(op, k);
  };
}

namespace {

struct Match {
  std::vector<int> next;  // next[a] = index at t+1 matched to a at t
  std::vector<bool> ambiguous;
};

// Greedy maximal-overlap bijection between two equally sized sets.
Match match_sets(const RVector& weights, const std::vector<Eigenpair>& left,
                 const std::vector<Eigenpair>& right) {
  const int n = static_cast<int>(left.size());
  Eigen::MatrixXd overlap(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      overlap(a, b) =
          std::abs(c_inner(weights, left[a].vector, right[b].vector));
    }
  }
  Match m{std::vector<int>(n, -1), std::vector<bool>(n, false)};
  std::vector<bool> row_used(n, false);
  std::vector<bool> col_used(n, false);
  for (int step = 0; step < n; ++step) {
    int best_a = -1;
    int best_b = -1;
    double best = -1.0;
    for (int a = 0; a < n; ++a) {
      if (row_used[a]) continue;
      for (int b = 0; b < n; ++b) {
        if (!col_used[b] && overlap(a, b) > best) {
          best = overlap(a, b);
          best_a = a;
          best_b = b;
        }
      }
    }
    double runner_up = -1.0;
    for (int b = 0; b < n; ++b) {
      if (!col_used[b] && b != best_b) {
        runner_up = std::max(runner_up, overlap(best_a, b));
      }
    }
    m.next[best_a] = best_b;
    m.ambiguous[best_a] = runner_up >= 0.99 * best && best > 0.0;
    row_used[best_a] = true;
    col_used[best_b] = true;
  }
  return m;
}

}  // namespace

ThetaTrajectory theta_trajectory(const OperatorBuilder& builder,
                                 const std::vector<double>& thetas, int k,
                                 const SpectrumSolver& solver) {
  if (thetas.size() < 2) {
    throw ConfigError("theta_trajectory needs at least 2 angles");
  }
  if (!std::is_sorted(thetas.begin(), thetas.end())) {
    throw ConfigError("theta_trajectory: angles must be sorted");
  }
  constexpr double kQuarterPi = std::numbers::pi / 4.0;
  for (double t : thetas) {
    if (!(t > 0.0 && t < kQuarterPi)) {
      std::ostringstream msg;
      msg << "theta must lie in (0, 0.7854) (got " << t << ")";
      throw ConfigError(msg.str());
    }
  }
  const SpectrumSolver solve = solver ? solver : lowest_real_part_solver(k);

  ThetaTrajectory traj;
  traj.thetas = thetas;
  int dimension = -1;
  for (double t : thetas) {
    const SparseOperator op = builder(t);
    if (dimension >= 0 && op.dimension() != dimension) {
      throw DimensionError("theta_trajectory: operator dimension changed");
    }
    dimension = op.dimension();
    if (traj.weights.size() == 0) traj.weights = op.weights();
    traj.spectra.push_back(solve(op, t));
  }
  size_t retained = traj.spectra.front().size();
  for (const auto& s : traj.spectra) retained = std::min(retained, s.size());
  for (auto& s : traj.spectra) s.resize(retained);

  const int n = static_cast<int>(retained);
  traj.paths.assign(n, std::vector<int>(thetas.size(), -1));
  traj.ambiguous.assign(n, false);
  for (int p = 0; p < n; ++p) traj.paths[p][0] = p;
  for (size_t t = 0; t + 1 < thetas.size(); ++t) {
    const Match m =
        match_sets(traj.weights, traj.spectra[t], traj.spectra[t + 1]);
    for (int p = 0; p < n; ++p) {
      const int a = traj.paths[p][t];
      traj.paths[p][t + 1] = m.next[a];
      if (m.ambiguous[a]) traj.ambiguous[p] = true;
    }
  }
  return traj;
}

ResonanceEigenpair select_ler(const ThetaTrajectory& trajectory,
                              const SelectOptions& options) {
  const int count = static_cast<int>(trajectory.thetas.size());
  const int at = options.at < 0 ? count / 2 : options.at;
  if (at >= count) throw ConfigError("select_ler: angle index out of range");

  int best = -1;
  double best_stationarity = 0.0;
  double best_real = std::numeric_limits<double>::infinity();
  double least_drift = std::numeric_limits<double>::infinity();
  for (int p = 0; p < static_cast<int>(trajectory.paths.size()); ++p) {
    const double s = trajectory.stationarity(p);
    least_drift = std::min(least_drift, s);
    const Eigenpair& pair = trajectory.at(p, at);
    if (!(s < options.stationarity_tol) || !(pair.value.real() > 0.0)) continue;
    if (options.accept && !options.accept(pair)) continue;
    if (pair.value.real() < best_real) {
      best = p;
      best_real = pair.value.real();
      best_stationarity = s;
    }
  }
  if (best < 0) {
    std::ostringstream msg;
    msg << "no theta-stationary eigenvalue (tolerance "
        << options.stationarity_tol << " hartree/rad, least drift "
        << least_drift << "); box too small, bad angles or no resonance";
    throw NoResonanceError(msg.str());
  }
  const Eigenpair& pair = trajectory.at(best, at);
  ResonanceEigenpair out;
  out.energy = pair.value;
  out.vector = pair.vector;
  out.theta = trajectory.thetas[at];
  out.stationarity = best_stationarity;
  out.lifetime = try_lifetime(pair.value);
  out.path = best;
  out.ambiguous = trajectory.ambiguous[best];
  return out;
}

double lifetime(Complex energy) {
  if (energy.imag() == 0.0) {
    throw BoundStateError("Im(E) = 0: bound state, lifetime is infinite");
  }
  if (energy.imag() > 0.0) {
    std::ostringstream msg;
    msg << "Im(E) = " << energy.imag() << " > 0: not a decaying state";
    throw NotDecayingError(msg.str());
  }
  return 1.0 / (-2.0 * energy.imag());
}

std::optional<double> try_lifetime(Complex energy) {
  if (!(energy.imag() < 0.0)) return std::nullopt;
  return 1.0 / (-2.0 * energy.imag());
}

ComplexDensity orbital_density(const Grid1D& grid,
                               const std::vector<CVector>& orbitals,
                               const std::vector<double>& occupations) {
  if (orbitals.size() != occupations.size()) {
    throw DimensionError("orbital_density: one occupation per orbital");
  }
  ComplexDensity out{grid, CVector::Zero(grid.size()), 0};
  double electrons = 0.0;
  for (size_t i = 0; i < orbitals.size(); ++i) {
    const CVector& phi = orbitals[i];
    if (phi.size() != grid.size()) {
      throw DimensionError("orbital_density: orbital length mismatch");
    }
    const Complex norm = c_inner(grid, phi, phi);
    if (std::abs(norm - 1.0) > 1e-8) {
      std::ostringstream msg;
      msg << "orbital " << i << " is not c-normalized (c-norm " << norm << ")";
      throw NormalizationError(msg.str());
    }
    out.values += occupations[i] * phi.cwiseProduct(phi);
    electrons += occupations[i];
  }
  out.particle_number = static_cast<int>(std::lround(electrons));
  return out;
}

}  // namespace dfrt
