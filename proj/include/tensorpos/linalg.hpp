#pragma once

// Dense complex linear algebra used throughout the library. Everything here is
// a pure function of its arguments.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "tensorpos/errors.hpp"

namespace tensorpos {

using cplx = std::complex<double>;
using CMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CVector = Eigen::Matrix<cplx, Eigen::Dynamic, 1>;
using Index = Eigen::Index;

inline constexpr double kDefaultUnitaryTol = 1e-10;

/// Result of a Hermitian top-eigenpair computation.
struct EigenPair {
  double value = 0.0;
  CVector vector;
};

/// Raised when the top eigenpair does not meet its residual bound; carries the
/// best iterate found.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, EigenPair best)
      : Error(what), best_(std::move(best)) {}
  const EigenPair& best() const noexcept { return best_; }

 private:
  EigenPair best_;
};

namespace detail {

inline Index checked_mul(Index a, Index b) {
  Index out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    throw SizingError("dimension product overflows the index type");
  }
  return out;
}

}  // namespace detail

inline bool all_finite(const CMatrix& m) {
  return std::all_of(m.data(), m.data() + m.size(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

inline bool all_finite(const CVector& v) {
  return std::all_of(v.data(), v.data() + v.size(), [](const cplx& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
  });
}

/// Kronecker product; (a ⊗ b)(x ⊗ y) = ax ⊗ by with x ⊗ y indexed as p * dim(y) + q.
inline CMatrix kron(const CMatrix& a, const CMatrix& b) {
  const Index rows = detail::checked_mul(a.rows(), b.rows());
  const Index cols = detail::checked_mul(a.cols(), b.cols());
  (void)detail::checked_mul(rows, cols);
  CMatrix out(rows, cols);
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

inline CVector kron(const CVector& x, const CVector& y) {
  const Index size = detail::checked_mul(x.size(), y.size());
  CVector out(size);
  for (Index p = 0; p < x.size(); ++p) {
    out.segment(p * y.size(), y.size()) = x(p) * y;
  }
  return out;
}

inline CMatrix identity(Index dim) { return CMatrix::Identity(dim, dim); }

/// Block-diagonal matrix with the given square blocks.
inline CMatrix direct_sum(std::span<const CMatrix> blocks) {
  if (blocks.empty()) throw ArgumentError("direct_sum: empty block list");
  Index total = 0;
  for (const auto& b : blocks) {
    if (b.rows() != b.cols()) throw ArgumentError("direct_sum: blocks must be square");
    total += b.rows();
  }
  CMatrix out = CMatrix::Zero(total, total);
  Index offset = 0;
  for (const auto& b : blocks) {
    out.block(offset, offset, b.rows(), b.cols()) = b;
    offset += b.rows();
  }
  return out;
}

inline CMatrix direct_sum(std::initializer_list<CMatrix> blocks) {
  return direct_sum(std::span<const CMatrix>(blocks.begin(), blocks.size()));
}

/// max |(m* m - I)_{pq}| <= tol.
inline bool is_unitary(const CMatrix& m, double tol = kDefaultUnitaryTol) {
  if (m.rows() != m.cols() || m.rows() == 0) return false;
  const CMatrix defect = m.adjoint() * m - identity(m.rows());
  return defect.cwiseAbs().maxCoeff() <= tol;
}

inline double hermitian_defect(const CMatrix& h) {
  if (h.rows() != h.cols()) return std::numeric_limits<double>::infinity();
  if (h.size() == 0) return 0.0;
  return (h - h.adjoint()).cwiseAbs().maxCoeff();
}

/// Largest eigenvalue of a Hermitian matrix with a unit eigenvector.
///
/// Uses a dense self-adjoint reduction, then polishes the vector with up to
/// `max_iters` shifted inverse iterations if the residual ||hv - λv|| exceeds
/// tol * ||h||. Throws ConvergenceError with the best iterate if polishing
/// fails.
inline EigenPair top_eigenpair(const CMatrix& h, double tol = 1e-10, int max_iters = 50) {
  if (h.rows() != h.cols() || h.rows() == 0) {
    throw ArgumentError("top_eigenpair: matrix must be square and non-empty");
  }
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if (hermitian_defect(h) > std::max(tol, 1e-12) * scale) {
    throw ArgumentError("top_eigenpair: matrix is not Hermitian");
  }
  const Eigen::MatrixXcd herm = 0.5 * (h + h.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("top_eigenpair: dense eigensolver failed", {});
  }
  const Index top = herm.rows() - 1;
  EigenPair pair{solver.eigenvalues()(top), solver.eigenvectors().col(top)};
  pair.vector.normalize();

  const double norm = std::max(std::abs(solver.eigenvalues()(0)),
                               std::abs(solver.eigenvalues()(top)));
  const double bound = tol * std::max(norm, std::numeric_limits<double>::min());
  auto residual = [&](const EigenPair& p) {
    return (herm * p.vector - p.value * p.vector).norm();
  };
  double res = residual(pair);
  if (res <= bound || norm == 0.0) return pair;

  EigenPair best = pair;
  double best_res = res;
  const double shift = pair.value + 1e-10 * std::max(1.0, norm);
  const Eigen::MatrixXcd shifted =
      herm - shift * Eigen::MatrixXcd::Identity(herm.rows(), herm.cols());
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(shifted);
  CVector v = pair.vector;
  for (int it = 0; it < max_iters; ++it) {
    v = lu.solve(v);
    const double vn = v.norm();
    if (!std::isfinite(vn) || vn == 0.0) break;
    v /= vn;
    EigenPair cand{(v.adjoint() * herm * v)(0).real(), v};
    const double cres = residual(cand);
    if (cres < best_res) {
      best = cand;
      best_res = cres;
    }
    if (best_res <= bound) return best;
  }
  throw ConvergenceError("top_eigenpair: residual bound not met", best);
}

/// Unitary factor U of the polar decomposition m = U P, i.e. the nearest
/// unitary in Frobenius norm.
inline CMatrix polar_unitary(const CMatrix& m, double rank_tol = 1e-12) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw ArgumentError("polar_unitary: matrix must be square and non-empty");
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smax > 0.0) || smin <= rank_tol * smax) {
    throw DegenerateInputError("polar_unitary: matrix is rank deficient");
  }
  return svd.matrixU() * svd.matrixV().adjoint();
}

/// Complex standard normal (E|z|^2 = 1).
template <class Rng>
cplx complex_normal(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));
  const double re = gauss(rng);
  const double im = gauss(rng);
  return {re, im};
}

template <class Rng>
CMatrix random_gaussian(Index rows, Index cols, Rng& rng) {
  CMatrix out(rows, cols);
  for (Index i = 0; i < out.size(); ++i) out.data()[i] = complex_normal(rng);
  return out;
}

template <class Rng>
CVector random_gaussian_vector(Index dim, Rng& rng) {
  CVector out(dim);
  for (Index i = 0; i < dim; ++i) out(i) = complex_normal(rng);
  return out;
}

/// Haar-distributed unitary via QR of a Ginibre matrix with phase correction.
template <class Rng>
CMatrix haar_unitary(Index dim, Rng& rng) {
  const Eigen::MatrixXcd g = random_gaussian(dim, dim, rng);
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index j = 0; j < dim; ++j) {
    const cplx d = r(j, j);
    const double ad = std::abs(d);
    q.col(j) *= (ad > 0.0 ? d / ad : cplx(1.0, 0.0));
  }
  return q;
}

/// Permutation matrix sending basis vector e_p to e_{image[p]}.
inline CMatrix permutation_matrix(std::span<const Index> image) {
  const auto dim = static_cast<Index>(image.size());
  CMatrix out = CMatrix::Zero(dim, dim);
  for (Index p = 0; p < dim; ++p) out(image[p], p) = 1.0;
  return out;
}

}  // namespace tensorpos
