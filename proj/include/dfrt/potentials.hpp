#pragma once

#include "dfrt/density.hpp"
#include "dfrt/grid.hpp"

namespace dfrt {

/// Parameters of the step-bounded well and of the soft-Coulomb repulsion.
///
/// v(x) = a·[box(x) − e^{−x²/b}], box(x) = σ(2c(x+d)) − σ(2c(x−d)) with
/// σ(u) = 1/(1+e^{−u}). The parent potential a(1 − e^{−x²/b}) agrees with
/// v for |x| < d but tends to a instead of 0.
struct PotentialParams {
  double a = 4.0;       // barrier height (hartree)
  double b = 0.5;       // well width² (bohr²)
  double c = 4.0;       // step steepness (1/bohr)
  double d = 2.0;       // step position (bohr)
  double lambda = 1.0;  // interaction strength

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// How the Hartree term is continued to complex coordinates.
enum class HartreeScaling {
  /// λ/√(1 + (x−x′)² e^{2iθ}): the same kernel as the scaled two-body
  /// interaction.
  kScaledKernel,
  /// e^{−iθ} λ/√(1 + (x−x′)²): the pure-Coulomb scaling law applied to the
  /// soft kernel.
  kCoulombPrefactor,
};

double parent_potential(const PotentialParams& p, double x);
double model_potential(const PotentialParams& p, double x);

/// v(x e^{iθ}) by analytic continuation of the closed form.
Complex scaled_potential(const PotentialParams& p, double theta, double x);
Complex scaled_parent_potential(const PotentialParams& p, double theta,
                                double x);

/// Samples of v(x e^{iθ}) on every grid point.
CVector scaled_potential(const PotentialParams& p, double theta,
                         const Grid1D& grid);
CVector scaled_parent_potential(const PotentialParams& p, double theta,
                                const Grid1D& grid);

/// λ / √(1 + s² e^{2iθ}), principal branch.
Complex soft_coulomb(const PotentialParams& p, double theta, double s);

/// Unscaled v_H[n](x) = λ ∫ n(x′)/√(1+(x−x′)²) dx′ (trapezoid).
CVector hartree_potential(const Grid1D& grid, const ComplexDensity& density,
                          const PotentialParams& p);

/// The complex-scaled Hartree potential entering v_s^θ.
CVector scaled_hartree_potential(const Grid1D& grid,
                                 const ComplexDensity& density,
                                 const PotentialParams& p, double theta,
                                 HartreeScaling scaling);

/// ½ ∫ n v_H.
Complex hartree_energy(const Grid1D& grid, const ComplexDensity& density,
                       const CVector& hartree);

}  // namespace dfrt
