#include "dfrt/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseLU>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "dfrt/errors.hpp"

namespace dfrt {

SparseOperator::SparseOperator(CSparse matrix, RVector weights)
    : matrix_(std::move(matrix)), weights_(std::move(weights)) {
  if (matrix_.rows() != matrix_.cols()) {
    throw DimensionError("sparse operator must be square");
  }
  if (weights_.size() != matrix_.rows()) {
    throw DimensionError("sparse operator: weight count mismatch");
  }
  matrix_.makeCompressed();
}

SparseOperator::SparseOperator(const BandedOperator& op, const Grid1D& grid)
    : SparseOperator(op.to_sparse(), grid.weights()) {}

Complex c_inner(const RVector& weights, const CVector& u, const CVector& v) {
  if (u.size() != v.size() || u.size() != weights.size()) {
    throw DimensionError("c_inner: length mismatch");
  }
  Complex acc{0.0, 0.0};
  for (Eigen::Index i = 0; i < u.size(); ++i) acc += weights[i] * u[i] * v[i];
  return acc;
}

Complex c_inner(const Grid1D& grid, const CVector& u, const CVector& v) {
  return c_inner(grid.weights(), u, v);
}

bool c_normalize(const RVector& weights, CVector& v) {
  const double norm2 = v.squaredNorm();
  if (norm2 == 0.0) return false;
  const Complex cnorm = c_inner(weights, v, v);
  const double scale = weights.maxCoeff();
  bool ok = std::abs(cnorm) > 1e-14 * norm2 * scale;
  if (ok) {
    v /= std::sqrt(cnorm);
  } else {
    v /= std::sqrt(norm2 * scale);
  }
  Eigen::Index imax = 0;
  v.cwiseAbs().maxCoeff(&imax);
  if (v[imax].real() < 0.0) v = -v;
  return ok;
}

double residual(const SparseOperator& op, const Eigenpair& pair) {
  const CVector r = op.apply(pair.vector) - pair.value * pair.vector;
  return r.norm() / pair.vector.norm();
}

void sort_by_real_part(std::vector<Eigenpair>& pairs) {
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Eigenpair& l, const Eigenpair& r) {
                     if (l.value.real() != r.value.real()) {
                       return l.value.real() < r.value.real();
                     }
                     return std::abs(l.value.imag()) < std::abs(r.value.imag());
                   });
}

namespace {

void check_dense_size(const SparseOperator& op, const DenseEigOptions& o) {
  if (op.dimension() > o.max_dimension) {
    std::ostringstream msg;
    msg << "dense_eig: dimension " << op.dimension() << " exceeds cap "
        << o.max_dimension;
    throw SizeError(msg.str());
  }
}

// zgeev on a copy of the operator; vectors is left empty when not wanted.
void run_zgeev(const SparseOperator& op, bool want_vectors,
               std::vector<Complex>& values, Eigen::MatrixXcd& vectors) {
  const int n = op.dimension();
  Eigen::MatrixXcd a = Eigen::MatrixXcd(op.matrix());
  values.assign(n, Complex{});
  Complex dummy{};
  if (want_vectors) vectors.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', want_vectors ? 'V' : 'N', n, a.data(), n,
      values.data(), &dummy, 1, want_vectors ? vectors.data() : &dummy,
      want_vectors ? n : 1);
  if (info != 0) {
    std::ostringstream msg;
    msg << "dense_eig: zgeev failed (info = " << info << ")";
    throw SolverError(msg.str());
  }
}

}  // namespace

std::vector<Eigenpair> dense_eig(const SparseOperator& op,
                                 const DenseEigOptions& options) {
  check_dense_size(op, options);
  std::vector<Complex> values;
  Eigen::MatrixXcd vectors;
  run_zgeev(op, true, values, vectors);
  std::vector<Eigenpair> pairs;
  pairs.reserve(values.size());
  for (size_t i = 0; i < values.size(); ++i) {
    CVector v = vectors.col(static_cast<Eigen::Index>(i));
    c_normalize(op.weights(), v);
    pairs.push_back({values[i], std::move(v)});
  }
  sort_by_real_part(pairs);
  return pairs;
}

std::vector<Complex> dense_eigenvalues(const SparseOperator& op,
                                       const DenseEigOptions& options) {
  check_dense_size(op, options);
  std::vector<Complex> values;
  Eigen::MatrixXcd unused;
  run_zgeev(op, false, values, unused);
  std::stable_sort(values.begin(), values.end(),
                   [](Complex l, Complex r) {
                     if (l.real() != r.real()) return l.real() < r.real();
                     return std::abs(l.imag()) < std::abs(r.imag());
                   });
  return values;
}

namespace {

using LU = Eigen::SparseLU<CSparse, Eigen::COLAMDOrdering<int>>;

double one_norm(const CSparse& a) {
  RVector columns = RVector::Zero(a.cols());
  for (int c = 0; c < a.outerSize(); ++c) {
    for (CSparse::InnerIterator it(a, c); it; ++it) {
      columns[it.col()] += std::abs(it.value());
    }
  }
  return columns.size() ? columns.maxCoeff() : 0.0;
}

std::vector<Eigenpair> lowest_of(std::vector<Eigenpair> pairs, int k) {
  if (static_cast<int>(pairs.size()) > k) pairs.resize(k);
  return pairs;
}

Complex bilinear(const CVector& u, const CVector& v) {
  return (u.array() * v.array()).sum();
}

CVector random_start(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  CVector v(n);
  for (int i = 0; i < n; ++i) v[i] = Complex(normal(rng), normal(rng));
  return v;
}

struct RitzPair {
  Complex mu;        // eigenvalue of (A − σ)^{-1}
  CVector coeffs;    // in the Lanczos basis
  double estimate;   // |β s_last| ‖q_next‖ / |μ|
};

// Ritz pairs of the leading `m` block of the tridiagonal, largest |μ| first.
std::vector<RitzPair> ritz_pairs(const std::vector<Complex>& alpha,
                                 const std::vector<Complex>& beta, int m,
                                 double next_norm) {
  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < m) {
      t(i, i + 1) = beta[i];
      t(i + 1, i) = beta[i];
    }
  }
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(t);
  std::vector<RitzPair> out;
  out.reserve(m);
  const Complex beta_last = beta.size() >= static_cast<size_t>(m)
                                ? beta[m - 1]
                                : Complex{0.0, 0.0};
  for (int i = 0; i < m; ++i) {
    CVector s = es.eigenvectors().col(i);
    s /= s.norm();
    const Complex mu = es.eigenvalues()[i];
    const double est = std::abs(beta_last * s[m - 1]) * next_norm /
                       std::max(std::abs(mu), 1e-300);
    out.push_back({mu, std::move(s), est});
  }
  std::sort(out.begin(), out.end(), [](const RitzPair& l, const RitzPair& r) {
    return std::abs(l.mu) > std::abs(r.mu);
  });
  return out;
}

}  // namespace

std::vector<Eigenpair> shift_invert(const SparseOperator& op, Complex shift,
                                    int k, const ShiftInvertOptions& options) {
  const int n = op.dimension();
  if (k < 1) throw ConfigError("shift_invert: k must be >= 1");
  k = std::min(k, n);

  CSparse shifted = op.matrix();
  {
    CSparse id(n, n);
    id.setIdentity();
    shifted -= shift * id;
  }
  shifted.makeCompressed();
  LU lu;
  lu.analyzePattern(shifted);
  lu.factorize(shifted);
  if (lu.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "shift_invert: factorization of (A - sigma I) failed at sigma = "
        << shift << " (" << lu.lastErrorMessage() << ")";
    throw ShiftError(msg.str());
  }

  std::mt19937_64 rng(options.seed);
  CVector start = options.start.size() == n ? options.start
                                            : random_start(n, rng);
  if (options.projector) options.projector(start);
  const int max_m = std::min(n, std::max(options.max_subspace, 2 * k + 10));
  const double scale = std::max(1.0, one_norm(op.matrix()));
  int breakdowns = 0;

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    std::vector<CVector> q;
    std::vector<Complex> alpha;
    std::vector<Complex> beta;
    q.reserve(max_m + 1);

    Complex qq = bilinear(start, start);
    if (std::abs(qq) < 1e-10 * start.squaredNorm()) {
      if (++breakdowns > options.max_breakdown_restarts) {
        throw SolverError("shift_invert: c-orthogonalization breakdown");
      }
      start += 0.1 * start.norm() / std::sqrt(double(n)) *
               random_start(n, rng);
      if (options.projector) options.projector(start);
      --restart;
      continue;
    }
    q.push_back(start / std::sqrt(qq));

    bool serious_breakdown = false;
    std::vector<RitzPair> ritz;
    int m = 0;
    for (int j = 0; j < max_m; ++j) {
      CVector w = lu.solve(q[j]);
      if (options.projector) options.projector(w);
      alpha.push_back(bilinear(q[j], w));
      w -= alpha[j] * q[j];
      if (j > 0) w -= beta[j - 1] * q[j - 1];
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) w -= bilinear(q[i], w) * q[i];
      }
      m = j + 1;
      const double wnorm = w.norm();
      const Complex ww = bilinear(w, w);
      const bool invariant =
          wnorm < 1e-13 * std::abs(alpha[j]) || m == n;
      if (invariant) {
        beta.push_back(Complex{0.0, 0.0});
        if (m < n && m < k + 2) {
          // Deflate: carry on from a fresh direction c-orthogonal to the basis.
          CVector fresh = random_start(n, rng);
          if (options.projector) options.projector(fresh);
          for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i < m; ++i) fresh -= bilinear(q[i], fresh) * q[i];
          }
          const Complex ff = bilinear(fresh, fresh);
          if (std::abs(ff) > 1e-10 * fresh.squaredNorm()) {
            q.push_back(fresh / std::sqrt(ff));
            continue;
          }
        }
        ritz = ritz_pairs(alpha, beta, m, 0.0);
        break;
      }
      if (std::abs(ww) < 1e-12 * wnorm * wnorm) {
        serious_breakdown = true;
        break;
      }
      beta.push_back(std::sqrt(ww));
      q.push_back(w / beta[j]);
      if (m >= k) {
        ritz = ritz_pairs(alpha, beta, m, q[m].norm());
        bool all_small = true;
        for (int i = 0; i < k && i < m; ++i) {
          all_small = all_small && ritz[i].estimate < 1e-3 * options.tol;
        }
        if (all_small && m >= std::min(n, k + 2)) break;
      }
    }

    if (serious_breakdown) {
      if (++breakdowns > options.max_breakdown_restarts) {
        throw SolverError("shift_invert: c-orthogonalization breakdown");
      }
      start = random_start(n, rng);
      if (options.projector) options.projector(start);
      continue;
    }
    if (ritz.empty()) ritz = ritz_pairs(alpha, beta, m, q[m].norm());

    // Rayleigh-Ritz on A itself: rounding in the near-singular solves would
    // otherwise pollute the pairs far from the shift.
    std::vector<CVector> aq(m);
    for (int j = 0; j < m; ++j) aq[j] = op.apply(q[j]);
    Eigen::MatrixXcd projected(m, m);
    for (int i = 0; i < m; ++i) {
      for (int j = i; j < m; ++j) {
        projected(i, j) = 0.5 * (bilinear(q[i], aq[j]) + bilinear(q[j], aq[i]));
        projected(j, i) = projected(i, j);
      }
    }
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> small(projected);
    std::vector<int> order(m);
    for (int i = 0; i < m; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](int l, int r) {
      return std::abs(small.eigenvalues()[l] - shift) <
             std::abs(small.eigenvalues()[r] - shift);
    });

    const int wanted = std::min(k, m);
    const int required =
        options.min_converged > 0 ? std::min(options.min_converged, wanted) : wanted;
    std::vector<Eigenpair> pairs;
    pairs.reserve(wanted);
    int converged_count = 0;
    CVector next_start = CVector::Zero(n);
    for (int i = 0; i < wanted; ++i) {
      const auto coeffs = small.eigenvectors().col(order[i]);
      CVector y = CVector::Zero(n);
      CVector ay = CVector::Zero(n);
      for (int j = 0; j < m; ++j) {
        y += coeffs[j] * q[j];
        ay += coeffs[j] * aq[j];
      }
      Complex value = small.eigenvalues()[order[i]];
      const Complex yy = bilinear(y, y);
      if (std::abs(yy) > 1e-12 * y.squaredNorm()) value = bilinear(y, ay) / yy;
      const double res = (ay - value * y).norm() / y.norm();
      next_start += y / y.norm();
      if (!(res < options.tol * scale)) continue;
      ++converged_count;
      c_normalize(op.weights(), y);
      pairs.push_back({value, std::move(y)});
    }
    if (converged_count >= required) {
      std::stable_sort(pairs.begin(), pairs.end(),
                       [&](const Eigenpair& l, const Eigenpair& r) {
                         return std::abs(l.value - shift) <
                                std::abs(r.value - shift);
                       });
      return pairs;
    }
    start = next_start;
  }
  std::ostringstream msg;
  msg << "shift_invert: residuals did not reach tol = " << options.tol
      << " near sigma = " << shift;
  throw SolverError(msg.str());
}

std::vector<Eigenpair> dense_lowest(const SparseOperator& op, int k,
                                    const DenseEigOptions& options) {
  if (k < 1) throw ConfigError("dense_lowest: k must be >= 1");
  const std::vector<Complex> values = dense_eigenvalues(op, options);
  const int n = op.dimension();
  k = std::min(k, n);
  const double scale = std::max(1.0, one_norm(op.matrix()));

  std::mt19937_64 rng(20110701u);
  const CVector start = random_start(n, rng);
  CSparse id(n, n);
  id.setIdentity();
  std::vector<Eigenpair> pairs;
  pairs.reserve(k);
  for (int i = 0; i < k; ++i) {
    const Complex lambda = values[i];
    const Complex shift =
        lambda + Complex(1.0, 1.0) * (1e-10 * std::max(1.0, std::abs(lambda)));
    CSparse shifted = op.matrix() - shift * id;
    shifted.makeCompressed();
    LU lu;
    lu.compute(shifted);
    if (lu.info() != Eigen::Success) return lowest_of(dense_eig(op, options), k);
    CVector v = start;
    for (int step = 0; step < 3; ++step) {
      v = lu.solve(v);
      v /= v.norm();
    }
    if (!((op.apply(v) - lambda * v).norm() < 1e-8 * scale)) {
      return lowest_of(dense_eig(op, options), k);
    }
    c_normalize(op.weights(), v);
    pairs.push_back({lambda, std::move(v)});
  }
  return pairs;
}

}  // namespace dfrt
