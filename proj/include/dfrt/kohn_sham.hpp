#pragma once

#include <optional>
#include <vector>

#include "dfrt/density.hpp"
#include "dfrt/eigensolver.hpp"
#include "dfrt/errors.hpp"
#include "dfrt/exact.hpp"
#include "dfrt/potentials.hpp"

namespace dfrt {

/// v_s^θ = external + hartree_exchange + correlation.
struct KSPotential {
  Grid1D grid;
  CVector external;          // v(x e^{iθ})
  CVector hartree_exchange;  // ½ v_H^θ[n] for two electrons in one orbital
  CVector correlation;

  CVector values() const { return external + hartree_exchange + correlation; }
};

/// −½ e^{−2iθ} ∇² + v_s(x).
BandedOperator ks_hamiltonian(const Grid1D& grid, double theta,
                              const CVector& vs, int order = 4);
BandedOperator ks_hamiltonian(const Grid1D& grid, double theta,
                              const KSPotential& vs, int order = 4);

/// Real representation of the complex KS operator acting on (Re φ, Im φ):
/// [[h₁, −h₂], [h₂, h₁]] with h₁ = −½cos2θ ∇² + Re v_s and
/// h₂ = ½ sin2θ ∇² + Im v_s. Its spectrum is spec(H) ∪ conj spec(H).
Eigen::MatrixXd ks_block_form(const Grid1D& grid, double theta,
                              const CVector& vs, int order = 4);

/// Applies the block equations with ε = Re ε̃ and 2τ⁻¹ = −Im ε̃ to
/// (Re φ, Im φ); vanishes for an eigenpair of the complex operator.
RVector ks_block_residual(const Grid1D& grid, double theta, const CVector& vs,
                          Complex orbital_energy, const CVector& orbital,
                          int order = 4);

/// Orbital energy split ε̃ = ε − 2i/τ.
struct OrbitalEnergy {
  double energy;    // ε
  double lifetime;  // τ, infinite for real ε̃
};
OrbitalEnergy split_orbital_energy(Complex orbital_energy);

struct SCFConfig {
  double theta = 0.35;
  double mixing = 1.0;
  int max_iter = 50;
  double tol = 1e-10;  // L2 norm of the density change
  double eig_tol = 1e-10;
  int order = 4;
  HartreeScaling hartree_scaling = HartreeScaling::kScaledKernel;
  /// Starting orbital (doubly occupied); the θ-stationary non-interacting
  /// LER orbital when empty.
  std::optional<Eigenpair> initial_orbital;
  ExactOptions exact;

  void validate() const;
};

struct SCFIteration {
  int iteration;
  Complex orbital_energy;
  Complex total_energy;
  Complex closed_form_energy;
  double density_change;
  Complex particle_number;
  double overlap;
  bool ambiguous;
};

struct SCFResult {
  explicit SCFResult(const Grid1D& grid)
      : density{grid, {}, 2}, potential{grid, {}, {}, {}} {}

  bool converged = false;
  int iterations = 0;
  Eigenpair orbital;
  Complex orbital_energy;
  ComplexDensity density;
  KSPotential potential;
  Complex total_energy;
  Complex closed_form_energy;
  std::optional<double> lifetime;
  Complex non_interacting_energy;  // ε̃ of the initial-guess orbital
  std::vector<SCFIteration> trace;
};

/// Carries the iteration trace of a run that hit max_iter.
class ScfConvergenceError : public ConvergenceError {
 public:
  ScfConvergenceError(const std::string& what, std::vector<SCFIteration> trace)
      : ConvergenceError(what), trace_(std::move(trace)) {}
  const std::vector<SCFIteration>& trace() const { return trace_; }

 private:
  std::vector<SCFIteration> trace_;
};

/// Exchange-only DFRT self-consistency for two electrons in one orbital.
SCFResult scf_xonly(const Grid1D& grid, const PotentialParams& params,
                    const SCFConfig& config = {});

/// Σε̃ + E_Hx^θ[n] − ∫ v_Hx n with E_Hx^θ = ½ E_H^θ[n] evaluated from the
/// density, and the orbital sum 2ε̃.
Complex total_energy(const Grid1D& grid, double theta,
                     const PotentialParams& params, Complex orbital_energy,
                     const ComplexDensity& density, const CVector& vhx,
                     HartreeScaling scaling = HartreeScaling::kScaledKernel);

/// 2ε̃ − ½ E_H^θ[n].
Complex closed_form_energy(const Grid1D& grid, double theta,
                           const PotentialParams& params,
                           Complex orbital_energy,
                           const ComplexDensity& density,
                           HartreeScaling scaling =
                               HartreeScaling::kScaledKernel);

struct InversionOptions {
  /// Width of the asymptotic matching window at each box edge (bohr).
  double window_width = 1.0;
  /// Points with |n| ≤ cutoff · max|n| are outside the retained window.
  double cutoff = 1e-12;
  int order = 4;
};

struct InversionResult {
  CVector potential;     // v_s^θ on the full grid
  Complex orbital_energy;  // ε̃_H, the additive constant
  CVector sqrt_density;  // branch-tracked √n
  int window_begin = 0;  // retained window [begin, end)
  int window_end = 0;
};

/// Two-electron singlet inversion: v_s = e^{−2iθ} ∇²√n / (2√n) + ε̃_H,
/// with ε̃_H fixed by matching the mean of v_s to the mean of v(x e^{iθ})
/// over the points within window_width of the box edges.
InversionResult invert_ks(const Grid1D& grid, double theta,
                          const ComplexDensity& density,
                          const PotentialParams& params,
                          const InversionOptions& options = {});

/// Doubly occupied KS orbital in v_s nearest `orbital_energy`, followed by
/// maximal overlap with `reference` (c-normalized).
struct KSSolution {
  Eigenpair orbital;
  ComplexDensity density;
  double overlap = 0.0;     // |c_inner(orbital, reference)|
  double runner_up = 0.0;   // next best overlap among the candidates
};
KSSolution solve_ks_orbital(const Grid1D& grid, double theta,
                            const CVector& vs, Complex orbital_energy,
                            const CVector& reference, int order = 4,
                            double tol = 1e-10);

/// Round trip of an inversion: the doubly occupied orbital of v_s and the
/// squared deviation of its density from the target, ∫(Re Δn)² and ∫(Im Δn)².
struct InversionFidelity {
  KSSolution solution;
  double real_error = 0.0;
  double imag_error = 0.0;
};
InversionFidelity inversion_fidelity(const Grid1D& grid, double theta,
                                     const InversionResult& inversion,
                                     const ComplexDensity& target,
                                     int order = 4, double tol = 1e-10);

struct CorrelationSplit {
  CVector hartree_exchange;  // ½ v_H^θ[n]
  CVector correlation;       // v_s − v(x e^{iθ}) − ½ v_H^θ[n]
};

CorrelationSplit correlation_potential(
    const Grid1D& grid, double theta, const PotentialParams& params,
    const CVector& exact_vs, const ComplexDensity& density,
    HartreeScaling scaling = HartreeScaling::kScaledKernel);

struct AffinityReport {
  Complex energy_one;          // E_θ(N=1)
  Complex energy_two;          // E_θ(N=2), exact
  Complex affinity_gap;        // I_θ = E_θ(N=1) − E_θ(N=2)
  Complex ks_homo_exact;       // from inversion of the exact density
  Complex ks_homo_xonly;       // from the exchange-only SCF
  Complex xonly_total_energy;
  double koopmans_gap;         // |Re(ks_homo_exact) + Re(I_θ)|
};

AffinityReport affinity_report(const Grid1D& grid,
                               const PotentialParams& params, double theta,
                               const SCFConfig& scf = {},
                               const InversionOptions& inversion = {});

}  // namespace dfrt
