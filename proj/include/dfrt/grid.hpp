#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace dfrt {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;
using CSparse = Eigen::SparseMatrix<Complex>;

inline constexpr Complex kI{0.0, 1.0};

/// Uniform grid on [x_min, x_max] with both endpoints included.
///
/// Carries trapezoid quadrature weights. Immutable after construction.
class Grid1D {
 public:
  /// Throws ConfigError when x_max <= x_min or n_points < kMinPoints.
  Grid1D(double x_min, double x_max, int n_points);

  static constexpr int kMinPoints = 3;

  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  int size() const { return static_cast<int>(points_.size()); }
  double spacing() const { return spacing_; }
  double operator[](int i) const { return points_[i]; }
  const RVector& points() const { return points_; }
  const RVector& weights() const { return weights_; }

  /// Same bounds and point count.
  bool operator==(const Grid1D& other) const;

 private:
  double x_min_;
  double x_max_;
  double spacing_;
  RVector points_;
  RVector weights_;
};

Grid1D make_grid(double x_min, double x_max, int n_points);

/// Symmetric band matrix: entry(i, j) == entry(j, i).
///
/// Only the main diagonal and the `bandwidth` upper diagonals are stored;
/// diagonal(k)[i] is entry(i, i + k).
class BandedOperator {
 public:
  BandedOperator(int dimension, int bandwidth);

  int dimension() const { return dimension_; }
  int bandwidth() const { return static_cast<int>(diagonals_.size()) - 1; }

  const CVector& diagonal(int offset) const { return diagonals_.at(offset); }
  CVector& diagonal(int offset) { return diagonals_.at(offset); }

  Complex entry(int i, int j) const;

  CVector apply(const CVector& v) const;
  BandedOperator scaled(Complex factor) const;
  /// Returns this + diag(values).
  BandedOperator plus_diagonal(const CVector& values) const;

  CSparse to_sparse() const;
  Eigen::MatrixXcd to_dense() const;

 private:
  int dimension_;
  std::vector<CVector> diagonals_;
};

/// Central finite-difference second derivative with Dirichlet zeros outside
/// the grid. order ∈ {2, 4, 6}; bandwidth = order / 2.
BandedOperator laplacian(const Grid1D& grid, int order = 4);

/// −½ e^{−2iθ} ∇², the complex-scaled kinetic energy. 0 ≤ θ < π/4.
BandedOperator scaled_kinetic(const Grid1D& grid, double theta, int order = 4);

/// Trapezoid rule.
Complex integrate(const Grid1D& grid, const CVector& samples);
double integrate(const Grid1D& grid, const RVector& samples);

/// Throws ConfigError unless 0 ≤ θ < π/4.
void check_theta(double theta);

}  // namespace dfrt
