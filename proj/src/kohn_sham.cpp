#include "dfrt/kohn_sham.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "dfrt/errors.hpp"
#include "dfrt/resonance.hpp"

namespace dfrt {

BandedOperator ks_hamiltonian(const Grid1D& grid, double theta,
                              const CVector& vs, int order) {
  if (vs.size() != grid.size()) {
    throw DimensionError("ks_hamiltonian: potential length mismatch");
  }
  return scaled_kinetic(grid, theta, order).plus_diagonal(vs);
}

BandedOperator ks_hamiltonian(const Grid1D& grid, double theta,
                              const KSPotential& vs, int order) {
  if (!(vs.grid == grid)) {
    throw DimensionError("ks_hamiltonian: potential on a different grid");
  }
  return ks_hamiltonian(grid, theta, vs.values(), order);
}

Eigen::MatrixXd ks_block_form(const Grid1D& grid, double theta,
                              const CVector& vs, int order) {
  const int n = grid.size();
  if (vs.size() != n) {
    throw DimensionError("ks_block_form: potential length mismatch");
  }
  const Eigen::MatrixXd lap = laplacian(grid, order).to_dense().real();
  Eigen::MatrixXd h1 = -0.5 * std::cos(2.0 * theta) * lap;
  Eigen::MatrixXd h2 = 0.5 * std::sin(2.0 * theta) * lap;
  h1.diagonal() += vs.real();
  h2.diagonal() += vs.imag();
  Eigen::MatrixXd m(2 * n, 2 * n);
  m << h1, -h2, h2, h1;
  return m;
}

RVector ks_block_residual(const Grid1D& grid, double theta, const CVector& vs,
                          Complex orbital_energy, const CVector& orbital,
                          int order) {
  const int n = grid.size();
  const Eigen::MatrixXd m = ks_block_form(grid, theta, vs, order);
  const double eps = orbital_energy.real();
  const double two_over_tau = -orbital_energy.imag();
  RVector phi(2 * n);
  phi << orbital.real(), orbital.imag();
  RVector out = m * phi;
  out.head(n) -= eps * orbital.real() + two_over_tau * orbital.imag();
  out.tail(n) += two_over_tau * orbital.real() - eps * orbital.imag();
  return out;
}

OrbitalEnergy split_orbital_energy(Complex orbital_energy) {
  const double tau = orbital_energy.imag() == 0.0
                         ? std::numeric_limits<double>::infinity()
                         : -2.0 / orbital_energy.imag();
  return {orbital_energy.real(), tau};
}

void SCFConfig::validate() const {
  check_theta(theta);
  if (!(mixing > 0.0 && mixing <= 1.0)) {
    throw ConfigError("scf mixing must lie in (0, 1]");
  }
  if (!(tol > 0.0)) throw ConfigError("scf tol must be > 0");
  if (!(eig_tol > 0.0)) throw ConfigError("scf eig_tol must be > 0");
  if (max_iter < 1) throw ConfigError("scf max_iter must be >= 1");
}

Complex closed_form_energy(const Grid1D& grid, double theta,
                           const PotentialParams& params,
                           Complex orbital_energy,
                           const ComplexDensity& density,
                           HartreeScaling scaling) {
  const CVector vh =
      scaled_hartree_potential(grid, density, params, theta, scaling);
  return 2.0 * orbital_energy - 0.5 * hartree_energy(grid, density, vh);
}

Complex total_energy(const Grid1D& grid, double theta,
                     const PotentialParams& params, Complex orbital_energy,
                     const ComplexDensity& density, const CVector& vhx,
                     HartreeScaling scaling) {
  if (vhx.size() != grid.size()) {
    throw DimensionError("total_energy: potential length mismatch");
  }
  const CVector vh =
      scaled_hartree_potential(grid, density, params, theta, scaling);
  const Complex e_hx = 0.5 * hartree_energy(grid, density, vh);
  const Complex double_counting =
      integrate(grid, CVector(vhx.cwiseProduct(density.values)));
  return 2.0 * orbital_energy + e_hx - double_counting;
}

KSSolution solve_ks_orbital(const Grid1D& grid, double theta,
                            const CVector& vs, Complex orbital_energy,
                            const CVector& reference, int order, double tol) {
  const SparseOperator op(ks_hamiltonian(grid, theta, vs, order), grid);
  ShiftInvertOptions si;
  si.tol = tol;
  std::vector<Eigenpair> pairs;
  double offset = 1e-4;
  for (int attempt = 0;; ++attempt) {
    try {
      pairs = shift_invert(op, orbital_energy + Complex(offset, offset), 6, si);
      break;
    } catch (const ShiftError&) {
      if (attempt >= 3) throw;
      offset *= 10.0;
    }
  }
  int best = 0;
  double best_overlap = -1.0;
  double runner_up = 0.0;
  for (int i = 0; i < static_cast<int>(pairs.size()); ++i) {
    const double o = std::abs(c_inner(grid, pairs[i].vector, reference));
    if (o > best_overlap) {
      runner_up = std::max(runner_up, best_overlap);
      best_overlap = o;
      best = i;
    } else {
      runner_up = std::max(runner_up, o);
    }
  }
  KSSolution out{pairs[best], ComplexDensity{grid, {}, 2}, best_overlap,
                 runner_up};
  out.density.values = 2.0 * out.orbital.vector.cwiseProduct(out.orbital.vector);
  return out;
}

InversionFidelity inversion_fidelity(const Grid1D& grid, double theta,
                                     const InversionResult& inversion,
                                     const ComplexDensity& target, int order,
                                     double tol) {
  if (target.values.size() != grid.size() ||
      inversion.potential.size() != grid.size()) {
    throw DimensionError("inversion_fidelity: length mismatch");
  }
  CVector reference = inversion.sqrt_density / std::sqrt(2.0);
  c_normalize(grid.weights(), reference);
  InversionFidelity out{solve_ks_orbital(grid, theta, inversion.potential,
                                         inversion.orbital_energy, reference,
                                         order, tol),
                        0.0, 0.0};
  const CVector diff = out.solution.density.values - target.values;
  out.real_error = integrate(grid, RVector(diff.real().cwiseAbs2()));
  out.imag_error = integrate(grid, RVector(diff.imag().cwiseAbs2()));
  return out;
}

namespace {

double l2_change(const Grid1D& grid, const CVector& a, const CVector& b) {
  const RVector diff2 = (a - b).cwiseAbs2();
  return std::sqrt(integrate(grid, diff2));
}

}  // namespace

SCFResult scf_xonly(const Grid1D& grid, const PotentialParams& params,
                    const SCFConfig& config) {
  config.validate();
  params.validate();
  const double theta = config.theta;
  ExactOptions exact = config.exact;
  exact.order = config.order;

  SCFResult result(grid);
  CVector reference;
  Complex eps;
  ComplexDensity density{grid, {}, 2};
  if (config.initial_orbital) {
    eps = config.initial_orbital->value;
    reference = config.initial_orbital->vector;
  } else {
    const auto one = exact_1e_ler(grid, params, theta, exact);
    eps = one.energy;
    reference = one.vector;
  }
  density = orbital_density(grid, {reference}, {2.0});
  result.non_interacting_energy = eps;

  const CVector external = scaled_potential(params, theta, grid);
  for (int it = 1; it <= config.max_iter; ++it) {
    const CVector vhx =
        0.5 * scaled_hartree_potential(grid, density, params, theta,
                                       config.hartree_scaling);
    const CVector vs = external + vhx;
    const KSSolution ks = solve_ks_orbital(grid, theta, vs, eps, reference,
                                           config.order, config.eig_tol);

    const ComplexDensity& fresh = ks.density;
    const double change = l2_change(grid, fresh.values, density.values);
    const CVector vhx_out =
        0.5 * scaled_hartree_potential(grid, fresh, params, theta,
                                       config.hartree_scaling);
    SCFIteration step;
    step.iteration = it;
    step.orbital_energy = ks.orbital.value;
    step.total_energy =
        total_energy(grid, theta, params, ks.orbital.value, fresh, vhx_out,
                     config.hartree_scaling);
    step.closed_form_energy = closed_form_energy(
        grid, theta, params, ks.orbital.value, fresh, config.hartree_scaling);
    step.density_change = change;
    step.particle_number = fresh.total();
    step.overlap = ks.overlap;
    step.ambiguous = ks.runner_up >= 0.99 * ks.overlap;
    result.trace.push_back(step);

    result.potential = KSPotential{grid, external, vhx,
                                   CVector::Zero(grid.size())};
    result.orbital = ks.orbital;
    result.orbital_energy = ks.orbital.value;
    result.density = fresh;
    result.total_energy = step.total_energy;
    result.closed_form_energy = step.closed_form_energy;
    result.iterations = it;
    eps = ks.orbital.value;
    reference = ks.orbital.vector;

    if (change < config.tol) {
      result.converged = true;
      result.lifetime = try_lifetime(result.total_energy);
      return result;
    }
    density.values =
        config.mixing * fresh.values + (1.0 - config.mixing) * density.values;
  }
  std::ostringstream msg;
  msg << "exchange-only SCF did not converge in " << config.max_iter
      << " iterations (last density change "
      << result.trace.back().density_change << ")";
  throw ScfConvergenceError(msg.str(), result.trace);
}

namespace {

// √n continued from the point of largest modulus, choosing at each step the
// root nearer to the neighbour already fixed.
CVector tracked_sqrt(const CVector& n, int start) {
  const int size = static_cast<int>(n.size());
  CVector s = CVector::Zero(size);
  s[start] = std::sqrt(n[start]);
  auto extend = [&](int from, int to, int dir) {
    Complex last = s[from];
    for (int i = from + dir; i != to; i += dir) {
      const Complex r = std::sqrt(n[i]);
      s[i] = std::abs(r - last) <= std::abs(-r - last) ? r : -r;
      if (s[i] != Complex{0.0, 0.0}) last = s[i];
    }
  };
  extend(start, size, +1);
  extend(start, -1, -1);
  return s;
}

}  // namespace

InversionResult invert_ks(const Grid1D& grid, double theta,
                          const ComplexDensity& density,
                          const PotentialParams& params,
                          const InversionOptions& options) {
  check_theta(theta);
  const int size = grid.size();
  if (!(density.grid == grid) || density.values.size() != size) {
    throw DimensionError("invert_ks: density on a different grid");
  }
  if (!(options.window_width > 0.0)) {
    throw ConfigError("invert_ks: window_width must be > 0");
  }
  const RVector modulus = density.values.cwiseAbs();
  Eigen::Index peak = 0;
  const double max_modulus = modulus.maxCoeff(&peak);
  if (!(max_modulus > 0.0)) throw BranchError("invert_ks: density is zero");
  const double threshold = options.cutoff * max_modulus;

  InversionResult out;
  out.window_begin = 0;
  while (modulus[out.window_begin] <= threshold) ++out.window_begin;
  out.window_end = size;
  while (modulus[out.window_end - 1] <= threshold) --out.window_end;
  for (int i = out.window_begin; i < out.window_end; ++i) {
    if (modulus[i] <= threshold) {
      std::ostringstream msg;
      msg << "invert_ks: density vanishes inside the window at x = "
          << grid[i];
      throw BranchError(msg.str());
    }
  }

  out.sqrt_density = tracked_sqrt(density.values, static_cast<int>(peak));
  const CVector lap = laplacian(grid, options.order).apply(out.sqrt_density);
  const Complex prefactor = std::exp(-2.0 * kI * theta);
  const CVector external = scaled_potential(params, theta, grid);

  CVector kinetic = CVector::Zero(size);
  for (int i = out.window_begin; i < out.window_end; ++i) {
    kinetic[i] = prefactor * lap[i] / (2.0 * out.sqrt_density[i]);
  }

  Complex offset{0.0, 0.0};
  int count = 0;
  for (int i = out.window_begin; i < out.window_end; ++i) {
    const double edge_distance =
        std::min(grid[i] - grid.x_min(), grid.x_max() - grid[i]);
    if (edge_distance <= options.window_width) {
      offset += external[i] - kinetic[i];
      ++count;
    }
  }
  if (count == 0) {
    throw ConfigError(
        "invert_ks: no retained density within window_width of the box edge");
  }
  out.orbital_energy = offset / static_cast<double>(count);

  out.potential = external;
  for (int i = out.window_begin; i < out.window_end; ++i) {
    out.potential[i] = kinetic[i] + out.orbital_energy;
  }
  return out;
}

CorrelationSplit correlation_potential(const Grid1D& grid, double theta,
                                       const PotentialParams& params,
                                       const CVector& exact_vs,
                                       const ComplexDensity& density,
                                       HartreeScaling scaling) {
  if (exact_vs.size() != grid.size()) {
    throw DimensionError("correlation_potential: potential length mismatch");
  }
  CorrelationSplit out;
  out.hartree_exchange =
      0.5 * scaled_hartree_potential(grid, density, params, theta, scaling);
  out.correlation =
      exact_vs - scaled_potential(params, theta, grid) - out.hartree_exchange;
  return out;
}

AffinityReport affinity_report(const Grid1D& grid,
                               const PotentialParams& params, double theta,
                               const SCFConfig& scf,
                               const InversionOptions& inversion) {
  AffinityReport r;
  ExactOptions exact = scf.exact;
  exact.order = scf.order;
  const auto one = exact_1e_ler(grid, params, theta, exact);
  const auto two = solve_2e_ler(grid, params, theta, std::nullopt, exact);
  const auto density = reduce_density(grid, two.resonance.vector);
  const auto inv = invert_ks(grid, theta, density, params, inversion);
  SCFConfig cfg = scf;
  cfg.theta = theta;
  const auto xonly = scf_xonly(grid, params, cfg);

  r.energy_one = one.energy;
  r.energy_two = two.resonance.energy;
  r.affinity_gap = r.energy_one - r.energy_two;
  r.ks_homo_exact = inv.orbital_energy;
  r.ks_homo_xonly = xonly.orbital_energy;
  r.xonly_total_energy = xonly.total_energy;
  r.koopmans_gap = std::abs(r.ks_homo_exact.real() + r.affinity_gap.real());
  return r;
}

}  // namespace dfrt
