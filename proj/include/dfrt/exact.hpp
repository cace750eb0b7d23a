#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dfrt/density.hpp"
#include "dfrt/eigensolver.hpp"
#include "dfrt/potentials.hpp"
#include "dfrt/resonance.hpp"

namespace dfrt {

/// −½ e^{−2iθ} ∇² + v(x e^{iθ}).
BandedOperator one_body_hamiltonian(const Grid1D& grid,
                                    const PotentialParams& params,
                                    double theta, int order = 4);

/// Two electrons on grid ⊗ grid: h_θ ⊗ I + I ⊗ h_θ + diag W_θ(x_i − x_j).
///
/// Composite index i·N + j addresses (x_i, x_j).
class TwoBodyOperator {
 public:
  TwoBodyOperator(const Grid1D& grid, const PotentialParams& params,
                  double theta, int order = 4);

  const Grid1D& grid() const { return grid_; }
  double theta() const { return theta_; }
  const PotentialParams& params() const { return params_; }
  const BandedOperator& one_body() const { return one_body_; }
  const SparseOperator& sparse() const { return sparse_; }
  int dimension() const { return sparse_.dimension(); }

  /// Matrix-free product through the Kronecker structure.
  CVector apply(const CVector& psi) const;

 private:
  Grid1D grid_;
  double theta_;
  PotentialParams params_;
  BandedOperator one_body_;
  CVector interaction_;  // W_θ(x_i − x_j) at i·N + j
  SparseOperator sparse_;
};

TwoBodyOperator build_h2(const Grid1D& grid, const PotentialParams& params,
                         double theta, int order = 4);

/// Ψ(x_j, x_i) at composite index i·N + j.
CVector swap_particles(const CVector& psi, int n);
/// ‖Ψ − PΨ‖ / ‖Ψ‖.
double exchange_defect(const CVector& psi, int n);

struct ExactOptions {
  int order = 4;
  /// Companion-angle step used for the θ-stationarity test.
  double theta_step = 0.02;
  double stationarity_tol = 1e-2;
  /// Eigenpairs retained per angle (lowest real parts for one body).
  int one_body_k = 16;
  /// Eigenpairs retained per angle around the shift for two bodies.
  int two_body_k = 8;
  double solver_tol = 1e-10;
  /// Two-body paths with larger exchange defect are skipped.
  double symmetry_tol = 1e-8;
};

/// Angles {θ, θ+Δ} or {θ−Δ, θ, θ+Δ} etc. used for stationarity around θ.
/// Returns the angles and the index of θ among them.
std::pair<std::vector<double>, int> companion_angles(double theta,
                                                     double step, int count);

/// LER of the one-body scaled Hamiltonian, θ-stationary over companion
/// angles, reported at θ.
ResonanceEigenpair exact_1e_ler(const Grid1D& grid,
                                const PotentialParams& params, double theta,
                                const ExactOptions& options = {});

struct TwoBodyResult {
  ResonanceEigenpair resonance;  // vector = c-normalized Ψ on grid ⊗ grid
  double symmetry_defect = 0.0;
  Complex shift;
  std::vector<std::string> notices;
};

/// Default shift: 2·E_1(θ) + soft_coulomb(θ, 0).
Complex default_two_body_shift(const Grid1D& grid,
                               const PotentialParams& params, double theta,
                               const ExactOptions& options = {});

/// The two-body LER at each of `thetas` (≥ 2, sorted), following one
/// θ-stationary, exchange-symmetric path.
std::vector<TwoBodyResult> solve_2e_trajectory(
    const Grid1D& grid, const PotentialParams& params,
    const std::vector<double>& thetas,
    std::optional<Complex> shift_hint = std::nullopt,
    const ExactOptions& options = {});

/// The two-body LER at θ, checked for stationarity against θ + Δ.
TwoBodyResult solve_2e_ler(const Grid1D& grid, const PotentialParams& params,
                           double theta,
                           std::optional<Complex> shift_hint = std::nullopt,
                           const ExactOptions& options = {});

/// n(x) = 2 ∫ Ψ(x, x′)² dx′. Ψ must be c-normalized to 1e-8.
ComplexDensity reduce_density(const Grid1D& grid, const CVector& psi);

struct PerturbationResult {
  Complex zeroth;       // 2 ε₁, non-interacting LER
  Complex interaction;  // ⟨Φ₀|W_θ|Φ₀⟩_c at unit strength
  Complex energy;       // zeroth + λ·interaction
};

PerturbationResult first_order_pt_terms(const Grid1D& grid,
                                        const PotentialParams& params,
                                        double theta,
                                        const ExactOptions& options = {});

/// E₀ + λ ⟨Φ₀|W_θ|Φ₀⟩_c with Φ₀ = φ₁ ⊗ φ₁.
Complex first_order_pt(const Grid1D& grid, const PotentialParams& params,
                       double theta, const ExactOptions& options = {});

}  // namespace dfrt
