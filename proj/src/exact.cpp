#include "dfrt/exact.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "dfrt/errors.hpp"

namespace dfrt {

BandedOperator one_body_hamiltonian(const Grid1D& grid,
                                    const PotentialParams& params,
                                    double theta, int order) {
  params.validate();
  return scaled_kinetic(grid, theta, order)
      .plus_diagonal(scaled_potential(params, theta, grid));
}

namespace {

CSparse kronecker_matrix(const BandedOperator& h, const CVector& interaction) {
  const int n = h.dimension();
  const int bw = h.bandwidth();
  std::vector<Eigen::Triplet<Complex>> triplets;
  triplets.reserve(static_cast<size_t>(n) * n * (4 * bw + 1));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int row = i * n + j;
      triplets.emplace_back(row, row,
                            h.diagonal(0)[i] + h.diagonal(0)[j] +
                                interaction[row]);
      for (int k = 1; k <= bw; ++k) {
        if (i + k < n) {
          triplets.emplace_back(row, (i + k) * n + j, h.diagonal(k)[i]);
        }
        if (i - k >= 0) {
          triplets.emplace_back(row, (i - k) * n + j, h.diagonal(k)[i - k]);
        }
        if (j + k < n) {
          triplets.emplace_back(row, i * n + j + k, h.diagonal(k)[j]);
        }
        if (j - k >= 0) {
          triplets.emplace_back(row, i * n + j - k, h.diagonal(k)[j - k]);
        }
      }
    }
  }
  CSparse m(n * n, n * n);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return m;
}

RVector product_weights(const Grid1D& grid) {
  const int n = grid.size();
  RVector w(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) w[i * n + j] = grid.weights()[i] * grid.weights()[j];
  }
  return w;
}

CVector interaction_diagonal(const Grid1D& grid, const PotentialParams& params,
                             double theta) {
  const int n = grid.size();
  CVector w(n * n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      w[i * n + j] = soft_coulomb(params, theta, grid[i] - grid[j]);
    }
  }
  return w;
}

}  // namespace

TwoBodyOperator::TwoBodyOperator(const Grid1D& grid,
                                 const PotentialParams& params, double theta,
                                 int order)
    : grid_(grid),
      theta_(theta),
      params_(params),
      one_body_(one_body_hamiltonian(grid, params, theta, order)),
      interaction_(interaction_diagonal(grid, params, theta)),
      sparse_(kronecker_matrix(one_body_, interaction_),
              product_weights(grid)) {}

CVector TwoBodyOperator::apply(const CVector& psi) const {
  const int n = grid_.size();
  if (psi.size() != n * n) {
    throw DimensionError("two-body apply: vector length must be N^2");
  }
  CVector out = interaction_.cwiseProduct(psi);
  CVector column(n);
  // Acting on x_2 (index j) for every fixed i.
  for (int i = 0; i < n; ++i) {
    out.segment(i * n, n) += one_body_.apply(psi.segment(i * n, n));
  }
  // Acting on x_1 (index i) for every fixed j.
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) column[i] = psi[i * n + j];
    const CVector hc = one_body_.apply(column);
    for (int i = 0; i < n; ++i) out[i * n + j] += hc[i];
  }
  return out;
}

TwoBodyOperator build_h2(const Grid1D& grid, const PotentialParams& params,
                         double theta, int order) {
  return TwoBodyOperator(grid, params, theta, order);
}

CVector swap_particles(const CVector& psi, int n) {
  if (psi.size() != static_cast<Eigen::Index>(n) * n) {
    throw DimensionError("exchange: vector length must be N^2");
  }
  CVector out(psi.size());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out[i * n + j] = psi[j * n + i];
  }
  return out;
}

double exchange_defect(const CVector& psi, int n) {
  return (psi - swap_particles(psi, n)).norm() / psi.norm();
}

std::pair<std::vector<double>, int> companion_angles(double theta,
                                                     double step, int count) {
  constexpr double kQuarterPi = std::numbers::pi / 4.0;
  if (count < 2) throw ConfigError("need at least two companion angles");
  if (!(step > 0.0)) throw ConfigError("theta step must be > 0");
  int below = (count - 1) / 2;
  while (below > 0 && !(theta - below * step > 0.0)) --below;
  int above = count - 1 - below;
  while (above > 0 && !(theta + above * step < kQuarterPi)) {
    --above;
    ++below;
  }
  if (!(theta - below * step > 0.0)) {
    throw ConfigError("no room for companion angles around theta");
  }
  std::vector<double> angles;
  for (int i = -below; i <= above; ++i) angles.push_back(theta + i * step);
  return {angles, below};
}

ResonanceEigenpair exact_1e_ler(const Grid1D& grid,
                                const PotentialParams& params, double theta,
                                const ExactOptions& options) {
  check_theta(theta);
  const auto [angles, index] = companion_angles(theta, options.theta_step, 3);
  const auto traj = theta_trajectory(
      [&](double t) {
        return SparseOperator(
            one_body_hamiltonian(grid, params, t, options.order), grid);
      },
      angles, options.one_body_k);
  SelectOptions select;
  select.stationarity_tol = options.stationarity_tol;
  select.at = index;
  return select_ler(traj, select);
}

Complex default_two_body_shift(const Grid1D& grid,
                               const PotentialParams& params, double theta,
                               const ExactOptions& options) {
  const auto one = exact_1e_ler(grid, params, theta, options);
  return 2.0 * one.energy + soft_coulomb(params, theta, 0.0);
}

namespace {

CVector symmetric_start(int n, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  CVector v(n * n);
  for (auto& x : v) x = Complex(normal(rng), normal(rng));
  return v + swap_particles(v, n);
}

}  // namespace

std::vector<TwoBodyResult> solve_2e_trajectory(
    const Grid1D& grid, const PotentialParams& params,
    const std::vector<double>& thetas, std::optional<Complex> shift_hint,
    const ExactOptions& options) {
  if (thetas.size() < 2) {
    throw ConfigError("two-body stationarity needs at least two angles");
  }
  const int n = grid.size();
  const Complex shift = shift_hint.value_or(
      default_two_body_shift(grid, params, thetas.front(), options));

  ShiftInvertOptions si;
  si.tol = options.solver_tol;
  si.start = symmetric_start(n, si.seed);
  si.min_converged = 1;
  si.projector = [n](CVector& v) { v = 0.5 * (v + swap_particles(v, n)); };
  const auto traj = theta_trajectory(
      [&](double t) {
        return build_h2(grid, params, t, options.order).sparse();
      },
      thetas, options.two_body_k,
      [&](const SparseOperator& op, double) {
        return shift_invert(op, shift, options.two_body_k, si);
      });

  std::vector<std::string> notices;
  SelectOptions select;
  select.stationarity_tol = options.stationarity_tol;
  select.at = 0;
  const auto unfiltered = select_ler(traj, select);
  const double unfiltered_defect = exchange_defect(unfiltered.vector, n);
  if (unfiltered_defect > options.symmetry_tol) {
    std::ostringstream msg;
    msg << "skipped exchange-antisymmetric stationary state at E = "
        << unfiltered.energy << " (defect " << unfiltered_defect << ")";
    notices.push_back(msg.str());
  }
  select.accept = [&](const Eigenpair& p) {
    return exchange_defect(p.vector, n) <= options.symmetry_tol;
  };
  const auto chosen = select_ler(traj, select);

  std::vector<TwoBodyResult> out;
  for (size_t t = 0; t < thetas.size(); ++t) {
    const Eigenpair& p = traj.at(chosen.path, static_cast<int>(t));
    TwoBodyResult r;
    r.resonance = chosen;
    r.resonance.energy = p.value;
    r.resonance.vector = p.vector;
    r.resonance.theta = thetas[t];
    r.resonance.lifetime = try_lifetime(p.value);
    r.symmetry_defect = exchange_defect(p.vector, n);
    r.shift = shift;
    r.notices = notices;
    out.push_back(std::move(r));
  }
  return out;
}

TwoBodyResult solve_2e_ler(const Grid1D& grid, const PotentialParams& params,
                           double theta, std::optional<Complex> shift_hint,
                           const ExactOptions& options) {
  check_theta(theta);
  const auto [angles, index] = companion_angles(theta, options.theta_step, 2);
  auto results = solve_2e_trajectory(grid, params, angles, shift_hint, options);
  return std::move(results[index]);
}

ComplexDensity reduce_density(const Grid1D& grid, const CVector& psi) {
  const int n = grid.size();
  if (psi.size() != static_cast<Eigen::Index>(n) * n) {
    throw DimensionError("reduce_density: wavefunction length must be N^2");
  }
  const RVector& w = grid.weights();
  Complex norm{0.0, 0.0};
  CVector values(n);
  for (int i = 0; i < n; ++i) {
    Complex acc{0.0, 0.0};
    for (int j = 0; j < n; ++j) {
      const Complex x = psi[i * n + j];
      acc += w[j] * x * x;
    }
    values[i] = 2.0 * acc;
    norm += w[i] * acc;
  }
  if (std::abs(norm - 1.0) > 1e-8) {
    std::ostringstream msg;
    msg << "reduce_density: wavefunction is not c-normalized (" << norm << ")";
    throw NormalizationError(msg.str());
  }
  return {grid, std::move(values), 2};
}

PerturbationResult first_order_pt_terms(const Grid1D& grid,
                                        const PotentialParams& params,
                                        double theta,
                                        const ExactOptions& options) {
  const auto one = exact_1e_ler(grid, params, theta, options);
  const int n = grid.size();
  const CVector rho =
      one.vector.cwiseProduct(one.vector).cwiseProduct(grid.weights().cast<Complex>());
  PotentialParams unit = params;
  unit.lambda = 1.0;
  std::vector<Complex> kernel(n);
  for (int m = 0; m < n; ++m) {
    kernel[m] = soft_coulomb(unit, theta, m * grid.spacing());
  }
  Complex j{0.0, 0.0};
  for (int a = 0; a < n; ++a) {
    Complex acc{0.0, 0.0};
    for (int b = 0; b < n; ++b) acc += kernel[std::abs(a - b)] * rho[b];
    j += rho[a] * acc;
  }
  PerturbationResult r;
  r.zeroth = 2.0 * one.energy;
  r.interaction = j;
  r.energy = r.zeroth + params.lambda * j;
  return r;
}

Complex first_order_pt(const Grid1D& grid, const PotentialParams& params,
                       double theta, const ExactOptions& options) {
  return first_order_pt_terms(grid, params, theta, options).energy;
}

}  // namespace dfrt
