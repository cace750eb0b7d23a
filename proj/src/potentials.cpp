#include "dfrt/potentials.hpp"

#include <cmath>
#include <sstream>

#include "dfrt/errors.hpp"

namespace dfrt {

namespace {

constexpr double kSaturation = 700.0;

// 1 / (1 + e^{-u}), saturated where e^{-u} would overflow or vanish.
Complex sigmoid(Complex u) {
  if (-u.real() > kSaturation) return {0.0, 0.0};
  if (-u.real() < -kSaturation) return {1.0, 0.0};
  return 1.0 / (1.0 + std::exp(-u));
}

Complex model_form(const PotentialParams& p, Complex z) {
  const Complex box = sigmoid(2.0 * p.c * (z + p.d)) - sigmoid(2.0 * p.c * (z - p.d));
  return p.a * (box - std::exp(-z * z / p.b));
}

void require_positive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << name << " must be > 0 (got " << value << ")";
    throw ConfigError(msg.str());
  }
}

void check_same_grid(const Grid1D& grid, const ComplexDensity& density) {
  if (!(grid == density.grid) || density.values.size() != grid.size()) {
    throw DimensionError("density lives on a different grid");
  }
}

// Hartree convolution with a kernel that depends only on the index offset.
template <typename Kernel>
CVector convolve(const Grid1D& grid, const ComplexDensity& density,
                 Kernel&& kernel) {
  const int n = grid.size();
  const double h = grid.spacing();
  std::vector<Complex> table(n);
  for (int m = 0; m < n; ++m) table[m] = kernel(m * h);
  const CVector weighted =
      density.values.cwiseProduct(grid.weights().cast<Complex>());
  CVector out(n);
  for (int i = 0; i < n; ++i) {
    Complex acc{0.0, 0.0};
    for (int j = 0; j < n; ++j) acc += table[std::abs(i - j)] * weighted[j];
    out[i] = acc;
  }
  return out;
}

}  // namespace

void PotentialParams::validate() const {
  require_positive(a, "a");
  require_positive(b, "b");
  require_positive(c, "c");
  require_positive(d, "d");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    std::ostringstream msg;
    msg << "lambda must be >= 0 (got " << lambda << ")";
    throw ConfigError(msg.str());
  }
}

double parent_potential(const PotentialParams& p, double x) {
  return p.a * (1.0 - std::exp(-x * x / p.b));
}

double model_potential(const PotentialParams& p, double x) {
  return model_form(p, Complex(x, 0.0)).real();
}

Complex scaled_potential(const PotentialParams& p, double theta, double x) {
  return model_form(p, x * std::exp(kI * theta));
}

Complex scaled_parent_potential(const PotentialParams& p, double theta,
                                double x) {
  const Complex z = x * std::exp(kI * theta);
  return p.a * (1.0 - std::exp(-z * z / p.b));
}

CVector scaled_potential(const PotentialParams& p, double theta,
                         const Grid1D& grid) {
  CVector out(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    out[i] = scaled_potential(p, theta, grid[i]);
  }
  return out;
}

CVector scaled_parent_potential(const PotentialParams& p, double theta,
                                const Grid1D& grid) {
  CVector out(grid.size());
  for (int i = 0; i < grid.size(); ++i) {
    out[i] = scaled_parent_potential(p, theta, grid[i]);
  }
  return out;
}

Complex soft_coulomb(const PotentialParams& p, double theta, double s) {
  return p.lambda / std::sqrt(1.0 + s * s * std::exp(2.0 * kI * theta));
}

CVector hartree_potential(const Grid1D& grid, const ComplexDensity& density,
                          const PotentialParams& p) {
  check_same_grid(grid, density);
  if (p.lambda == 0.0) return CVector::Zero(grid.size());
  return convolve(grid, density, [&](double s) {
    return Complex(p.lambda / std::sqrt(1.0 + s * s), 0.0);
  });
}

CVector scaled_hartree_potential(const Grid1D& grid,
                                 const ComplexDensity& density,
                                 const PotentialParams& p, double theta,
                                 HartreeScaling scaling) {
  check_same_grid(grid, density);
  if (p.lambda == 0.0) return CVector::Zero(grid.size());
  switch (scaling) {
    case HartreeScaling::kScaledKernel:
      return convolve(grid, density,
                      [&](double s) { return soft_coulomb(p, theta, s); });
    case HartreeScaling::kCoulombPrefactor:
      return std::exp(-kI * theta) * hartree_potential(grid, density, p);
  }
  throw ConfigError("unknown Hartree scaling");
}

Complex hartree_energy(const Grid1D& grid, const ComplexDensity& density,
                       const CVector& hartree) {
  check_same_grid(grid, density);
  if (hartree.size() != grid.size()) {
    throw DimensionError("hartree_energy: potential length mismatch");
  }
  return 0.5 * integrate(grid, CVector(density.values.cwiseProduct(hartree)));
}

}  // namespace dfrt
