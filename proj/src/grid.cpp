#include "dfrt/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "dfrt/errors.hpp"

namespace dfrt {

Grid1D::Grid1D(double x_min, double x_max, int n_points)
    : x_min_(x_min), x_max_(x_max) {
  if (!(x_max > x_min) || !std::isfinite(x_min) || !std::isfinite(x_max)) {
    std::ostringstream msg;
    msg << "grid bounds must satisfy x_max > x_min (got " << x_min << ", "
        << x_max << ")";
    throw ConfigError(msg.str());
  }
  if (n_points < kMinPoints) {
    std::ostringstream msg;
    msg << "grid needs at least " << kMinPoints << " points (got " << n_points
        << ")";
    throw ConfigError(msg.str());
  }
  spacing_ = (x_max - x_min) / (n_points - 1);
  points_.resize(n_points);
  for (int i = 0; i < n_points; ++i) points_[i] = x_min + i * spacing_;
  points_[n_points - 1] = x_max;
  weights_ = RVector::Constant(n_points, spacing_);
  weights_[0] *= 0.5;
  weights_[n_points - 1] *= 0.5;
}

bool Grid1D::operator==(const Grid1D& other) const {
  return x_min_ == other.x_min_ && x_max_ == other.x_max_ &&
         size() == other.size();
}

Grid1D make_grid(double x_min, double x_max, int n_points) {
  return Grid1D(x_min, x_max, n_points);
}

BandedOperator::BandedOperator(int dimension, int bandwidth)
    : dimension_(dimension) {
  if (dimension <= 0 || bandwidth < 0 || bandwidth >= dimension) {
    throw DimensionError("banded operator: invalid dimension/bandwidth");
  }
  diagonals_.reserve(bandwidth + 1);
  for (int k = 0; k <= bandwidth; ++k) {
    diagonals_.push_back(CVector::Zero(dimension - k));
  }
}

Complex BandedOperator::entry(int i, int j) const {
  const int k = std::abs(i - j);
  if (k > bandwidth()) return {0.0, 0.0};
  return diagonals_[k][std::min(i, j)];
}

CVector BandedOperator::apply(const CVector& v) const {
  if (v.size() != dimension_) {
    throw DimensionError("banded operator: vector length mismatch");
  }
  CVector out = diagonals_[0].cwiseProduct(v);
  for (int k = 1; k <= bandwidth(); ++k) {
    const int m = dimension_ - k;
    const auto& d = diagonals_[k];
    out.head(m) += d.cwiseProduct(v.tail(m));
    out.tail(m) += d.cwiseProduct(v.head(m));
  }
  return out;
}

BandedOperator BandedOperator::scaled(Complex factor) const {
  BandedOperator out = *this;
  for (auto& d : out.diagonals_) d *= factor;
  return out;
}

BandedOperator BandedOperator::plus_diagonal(const CVector& values) const {
  if (values.size() != dimension_) {
    throw DimensionError("banded operator: diagonal length mismatch");
  }
  BandedOperator out = *this;
  out.diagonals_[0] += values;
  return out;
}

CSparse BandedOperator::to_sparse() const {
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<size_t>(dimension_) * (2 * bandwidth() + 1));
  for (int i = 0; i < dimension_; ++i) {
    triplets.emplace_back(i, i, diagonals_[0][i]);
  }
  for (int k = 1; k <= bandwidth(); ++k) {
    for (int i = 0; i + k < dimension_; ++i) {
      triplets.emplace_back(i, i + k, diagonals_[k][i]);
      triplets.emplace_back(i + k, i, diagonals_[k][i]);
    }
  }
  CSparse m(dimension_, dimension_);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

Eigen::MatrixXcd BandedOperator::to_dense() const {
  return Eigen::MatrixXcd(to_sparse());
}

namespace {

// Central stencil coefficients c_0, c_1, ... for f'' (times h²).
std::vector<double> second_derivative_stencil(int order) {
  switch (order) {
    case 2:
      return {-2.0, 1.0};
    case 4:
      return {-5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0};
    case 6:
      return {-49.0 / 18.0, 3.0 / 2.0, -3.0 / 20.0, 1.0 / 90.0};
    default: {
      std::ostringstream msg;
      msg << "laplacian order must be 2, 4 or 6 (got " << order << ")";
      throw ConfigError(msg.str());
    }
  }
}

}  // namespace

BandedOperator laplacian(const Grid1D& grid, int order) {
  const auto stencil = second_derivative_stencil(order);
  const int bw = static_cast<int>(stencil.size()) - 1;
  if (grid.size() <= bw) {
    throw ConfigError("grid too small for the requested stencil order");
  }
  BandedOperator op(grid.size(), bw);
  const double inv_h2 = 1.0 / (grid.spacing() * grid.spacing());
  for (int k = 0; k <= bw; ++k) {
    op.diagonal(k).setConstant(Complex(stencil[k] * inv_h2, 0.0));
  }
  return op;
}

void check_theta(double theta) {
  constexpr double kQuarterPi = std::numbers::pi / 4.0;
  if (!(theta >= 0.0 && theta < kQuarterPi)) {
    std::ostringstream msg;
    msg << "theta must lie in [0, 0.7854) (got " << theta << ")";
    throw ConfigError(msg.str());
  }
}

BandedOperator scaled_kinetic(const Grid1D& grid, double theta, int order) {
  check_theta(theta);
  return laplacian(grid, order).scaled(-0.5 * std::exp(-2.0 * kI * theta));
}

Complex integrate(const Grid1D& grid, const CVector& samples) {
  if (samples.size() != grid.size()) {
    throw DimensionError("integrate: sample count does not match grid");
  }
  return (samples.array() * grid.weights().array().cast<Complex>()).sum();
}

double integrate(const Grid1D& grid, const RVector& samples) {
  if (samples.size() != grid.size()) {
    throw DimensionError("integrate: sample count does not match grid");
  }
  return samples.dot(grid.weights());
}

}  // namespace dfrt
