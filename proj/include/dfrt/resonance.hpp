#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "dfrt/density.hpp"
#include "dfrt/eigensolver.hpp"

namespace dfrt {

/// Eigenpairs of a family of complex-scaled operators, linked across
/// consecutive angles by maximal |c-overlap| of their eigenvectors.
struct ThetaTrajectory {
  std::vector<double> thetas;
  /// spectra[t] holds the retained eigenpairs at thetas[t].
  std::vector<std::vector<Eigenpair>> spectra;
  /// paths[p][t] indexes spectra[t]; each path is one eigenvalue followed in θ.
  std::vector<std::vector<int>> paths;
  /// True when some matching step of the path had a runner-up overlap within
  /// 1% of the chosen one.
  std::vector<bool> ambiguous;
  RVector weights;

  const Eigenpair& at(int path, int t) const {
    return spectra[t][paths[path][t]];
  }
  /// max_t |E_{t+1} − E_t| / (θ_{t+1} − θ_t), hartree/radian.
  double stationarity(int path) const;
};

using OperatorBuilder = std::function<SparseOperator(double theta)>;
/// Returns the eigenpairs retained at one angle.
using SpectrumSolver =
    std::function<std::vector<Eigenpair>(const SparseOperator&, double theta)>;

/// Dense solve keeping the k eigenpairs of lowest real part.
SpectrumSolver lowest_real_part_solver(int k);

/// Requires ≥ 2 angles in (0, π/4). With no solver, lowest_real_part_solver(k)
/// is used.
ThetaTrajectory theta_trajectory(const OperatorBuilder& builder,
                                 const std::vector<double>& thetas, int k,
                                 const SpectrumSolver& solver = {});

/// Lowest-energy resonance picked out of a trajectory.
struct ResonanceEigenpair {
  Complex energy;
  CVector vector;  // c-normalized
  double theta = 0.0;
  double stationarity = 0.0;  // hartree/radian
  /// (−2 Im E)^{-1}; empty unless Im E < 0.
  std::optional<double> lifetime;
  int path = -1;
  bool ambiguous = false;
};

struct SelectOptions {
  double stationarity_tol = 1e-2;
  /// Angle index at which the pair is reported; −1 means the middle angle.
  int at = -1;
  /// Paths whose reported eigenpair fails this test are skipped.
  std::function<bool(const Eigenpair&)> accept;
};

/// Among θ-stationary paths, the one with smallest positive real part.
/// Throws NoResonanceError when no path is stationary.
ResonanceEigenpair select_ler(const ThetaTrajectory& trajectory,
                              const SelectOptions& options = {});

/// (−2 Im E)^{-1}. BoundStateError when Im E == 0, NotDecayingError when
/// Im E > 0.
double lifetime(Complex energy);

/// Lifetime if the energy decays, empty otherwise.
std::optional<double> try_lifetime(Complex energy);

/// n(x) = Σ occ_i φ_i(x)² (square, not modulus). Each orbital must be
/// c-normalized to 1e-8, otherwise NormalizationError.
ComplexDensity orbital_density(const Grid1D& grid,
                               const std::vector<CVector>& orbitals,
                               const std::vector<double>& occupations);

}  // namespace dfrt
