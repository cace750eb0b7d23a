#pragma once

#include <functional>

#include <vector>

#include "dfrt/grid.hpp"

namespace dfrt {

/// Explicitly stored complex-symmetric operator plus the quadrature weights
/// of the space it acts on (used for c-normalization of eigenvectors).
class SparseOperator {
 public:
  SparseOperator(CSparse matrix, RVector weights);
  /// One-body operator on `grid`.
  SparseOperator(const BandedOperator& op, const Grid1D& grid);

  int dimension() const { return static_cast<int>(matrix_.rows()); }
  const CSparse& matrix() const { return matrix_; }
  const RVector& weights() const { return weights_; }

  CVector apply(const CVector& v) const { return matrix_ * v; }

 private:
  CSparse matrix_;
  RVector weights_;
};

/// Eigenvalue and its right eigenvector, c-normalized: Σ w_i ψ_i² = 1.
///
/// For complex-symmetric operators the left eigenvector is the transpose of
/// the right one, so only the right vector is kept.
struct Eigenpair {
  Complex value;
  CVector vector;
};

/// Bilinear product Σ w_i u_i v_i; no complex conjugation.
Complex c_inner(const RVector& weights, const CVector& u, const CVector& v);
Complex c_inner(const Grid1D& grid, const CVector& u, const CVector& v);

/// Scales v so that c_inner(v, v) = 1 and fixes the remaining ± sign so that
/// the entry of largest modulus has positive real part. Vectors whose c-norm
/// vanishes (relative 1e-14) are only 2-normalized; returns false then.
bool c_normalize(const RVector& weights, CVector& v);

/// ‖A ψ − E ψ‖₂ / ‖ψ‖₂.
double residual(const SparseOperator& op, const Eigenpair& pair);

struct DenseEigOptions {
  int max_dimension = 4000;
};

/// Every eigenpair of the operator, sorted by ascending real part and then by
/// ascending |Im|. Throws SizeError above the dimension cap.
std::vector<Eigenpair> dense_eig(const SparseOperator& op,
                                 const DenseEigOptions& options = {});

/// Eigenvalues only (cheaper); same ordering as dense_eig.
std::vector<Complex> dense_eigenvalues(const SparseOperator& op,
                                       const DenseEigOptions& options = {});

/// The k eigenpairs of lowest real part: dense eigenvalues, then each vector
/// by inverse iteration with a sparse LU at the eigenvalue. Falls back to
/// dense_eig when an inverse-iteration residual exceeds 1e-8·max(1, ‖A‖₁).
std::vector<Eigenpair> dense_lowest(const SparseOperator& op, int k,
                                    const DenseEigOptions& options = {});

struct ShiftInvertOptions {
  /// Residual bound relative to max(1, ‖A‖₁): ‖Aψ − Eψ‖/‖ψ‖ < tol·max(1, ‖A‖₁).
  double tol = 1e-10;
  int max_subspace = 120;
  int max_restarts = 8;
  int max_breakdown_restarts = 3;
  unsigned seed = 20110701u;
  /// Number of the k nearest pairs that must meet tol; only converged pairs
  /// are returned. Non-positive means all k.
  int min_converged = 0;
  /// Optional Krylov start vector (e.g. restricted to a symmetry sector).
  CVector start;
  /// Optional projector onto an invariant subspace, applied to every Krylov
  /// vector so that rounding cannot leak into other symmetry sectors.
  std::function<void(CVector&)> projector;
};

/// The k eigenpairs nearest to `shift`, nearest first.
///
/// Complex-symmetric Lanczos on (A − σI)^{−1} with full re-orthogonalization
/// in the bilinear product; (A − σI) is factorized once by sparse LU.
/// Eigenpairs are extracted by Rayleigh-Ritz on A over the Krylov basis;
/// pairs missing tol are dropped once options.min_converged of them pass.
/// Throws ShiftError if the factorization fails and SolverError if the
/// residuals do not reach tol.
std::vector<Eigenpair> shift_invert(const SparseOperator& op, Complex shift,
                                    int k,
                                    const ShiftInvertOptions& options = {});

/// Sort helper used by every solver: ascending real part, then |Im|.
void sort_by_real_part(std::vector<Eigenpair>& pairs);

}  // namespace dfrt
