#pragma once

// Span elements X = Σ λ^i_{r,s} W_i ⊗ e_{r,s}, witness triplets, tensor-position
// triplets and the Gram data that connects them.
//
// Conventions used everywhere:
//   * generator index i runs over 0..2n, with W_0 = U_0 = identity never stored;
//   * ⟨x, y⟩ is linear in x and conjugate-linear in y;
//   * a stacked vector ξ = ⊕_a ξ_a places ξ_a at offset a * dim, and e_{r,s}
//     acts on the block index;
//   * Gram and coefficient matrices of size (N k) x (N k) use row index i * k + a.

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "tensorpos/linalg.hpp"

namespace tensorpos {

inline int generator_count(int n) { return 2 * n + 1; }

/// The fourth roots of unity ε^s, s = 0..3, with ε = √-1. Exact.
inline cplx fourth_root(int s) {
  static constexpr std::array<cplx, 4> roots{cplx(1, 0), cplx(0, 1), cplx(-1, 0), cplx(0, -1)};
  return roots[static_cast<std::size_t>(((s % 4) + 4) % 4)];
}

/// An element of M_k(C) ⊗ span{W_0, ..., W_2n}.
class SpanElement {
 public:
  SpanElement(int n, int k) : n_(n), k_(k) {
    check_shape();
    coeffs_.assign(static_cast<std::size_t>(generator_count(n)), CMatrix::Zero(k, k));
  }

  /// coeffs[i](r, s) = λ^i_{r,s}.
  SpanElement(int n, int k, std::vector<CMatrix> coeffs) : n_(n), k_(k), coeffs_(std::move(coeffs)) {
    check_shape();
    if (static_cast<int>(coeffs_.size()) != generator_count(n)) {
      throw ArgumentError("SpanElement: expected 2n+1 coefficient matrices");
    }
    for (const auto& c : coeffs_) {
      if (c.rows() != k || c.cols() != k) throw ArgumentError("SpanElement: coefficient block must be k x k");
      if (!all_finite(c)) throw ArgumentError("SpanElement: non-finite coefficient");
    }
  }

  int n() const { return n_; }
  int k() const { return k_; }
  int N() const { return generator_count(n_); }
  const CMatrix& coeff(int i) const { return coeffs_.at(static_cast<std::size_t>(i)); }
  const std::vector<CMatrix>& coeffs() const { return coeffs_; }
  cplx coeff(int i, int r, int s) const { return coeff(i)(r, s); }

  /// Copy with one coefficient replaced.
  SpanElement with(int i, int r, int s, cplx value) const {
    SpanElement out = *this;
    out.coeffs_.at(static_cast<std::size_t>(i))(r, s) = value;
    return out;
  }

  SpanElement scaled(cplx c) const {
    SpanElement out = *this;
    for (auto& m : out.coeffs_) m *= c;
    return out;
  }

 private:
  void check_shape() const {
    if (n_ < 2) throw ArgumentError("SpanElement: n must be at least 2");
    if (k_ < 1) throw ArgumentError("SpanElement: k must be positive");
  }

  int n_;
  int k_;
  std::vector<CMatrix> coeffs_;
};

/// A finite-dimensional Hilbert space with 2n unitaries and k vectors.
class Triplet {
 public:
  /// Checks shapes and finiteness. Unitarity is only checked by `checked`,
  /// since it costs a dim^3 product per generator.
  Triplet(int n, int k, Index dim, std::vector<CMatrix> unitaries, std::vector<CVector> vectors)
      : n_(n), k_(k), dim_(dim), unitaries_(std::move(unitaries)), vectors_(std::move(vectors)) {
    if (n < 1 || k < 1 || dim < 1) throw ArgumentError("Triplet: n, k and dim must be positive");
    if (static_cast<int>(unitaries_.size()) != 2 * n) throw ArgumentError("Triplet: expected 2n unitaries");
    if (static_cast<int>(vectors_.size()) != k) throw ArgumentError("Triplet: expected k vectors");
    for (const auto& u : unitaries_) {
      if (u.rows() != dim || u.cols() != dim) throw ArgumentError("Triplet: unitary has wrong shape");
      if (!all_finite(u)) throw ArgumentError("Triplet: non-finite unitary entry");
    }
    for (const auto& v : vectors_) {
      if (v.size() != dim) throw ArgumentError("Triplet: vector has wrong dimension");
      if (!all_finite(v)) throw ArgumentError("Triplet: non-finite vector entry");
    }
  }

  static Triplet checked(int n, int k, Index dim, std::vector<CMatrix> unitaries,
                         std::vector<CVector> vectors, double tol = kDefaultUnitaryTol) {
    Triplet t(n, k, dim, std::move(unitaries), std::move(vectors));
    for (std::size_t i = 0; i < t.unitaries_.size(); ++i) {
      if (!is_unitary(t.unitaries_[i], tol)) {
        throw ArgumentError("Triplet: generator " + std::to_string(i + 1) + " is not unitary");
      }
    }
    return t;
  }

  int n() const { return n_; }
  int k() const { return k_; }
  int N() const { return generator_count(n_); }
  Index dim() const { return dim_; }
  const std::vector<CMatrix>& unitaries() const { return unitaries_; }
  const std::vector<CVector>& vectors() const { return vectors_; }
  /// U_i for i in 1..2n.
  const CMatrix& unitary(int i) const { return unitaries_.at(static_cast<std::size_t>(i - 1)); }
  const CVector& vector(int a) const { return vectors_.at(static_cast<std::size_t>(a)); }

  /// U_i v, with U_0 the identity.
  CVector apply(int i, const CVector& v) const { return i == 0 ? v : CVector(unitary(i) * v); }
  CVector apply_adjoint(int i, const CVector& v) const {
    return i == 0 ? v : CVector(unitary(i).adjoint() * v);
  }

  CVector stacked() const {
    CVector out(dim_ * k_);
    for (int a = 0; a < k_; ++a) out.segment(a * dim_, dim_) = vectors_[static_cast<std::size_t>(a)];
    return out;
  }

  Triplet with_vectors(std::vector<CVector> vectors) const {
    return Triplet(n_, k_, dim_, unitaries_, std::move(vectors));
  }

  /// Σ_a ||ξ_a||^2.
  double total_norm_sq() const {
    double s = 0.0;
    for (const auto& v : vectors_) s += v.squaredNorm();
    return s;
  }

 private:
  int n_;
  int k_;
  Index dim_;
  std::vector<CMatrix> unitaries_;
  std::vector<CVector> vectors_;
};

/// Gram data X_{ia,jb} = ⟨U_i η_a, U_j η_b⟩.
struct AssociatedMatrix {
  int n = 0;
  int k = 0;
  CMatrix entries;  // (N k) x (N k), row index i * k + a

  int N() const { return generator_count(n); }
  cplx at(int i, int a, int j, int b) const { return entries(i * k + a, j * k + b); }
};

/// Coefficients of X*X = Σ_{a,b} (Σ_{i≠j} A_{ia,jb} W_i* W_j + B_{a,b} Id) ⊗ e_{a,b}.
struct QuadCoeffs {
  int n = 0;
  int k = 0;
  CMatrix A;  // (N k) x (N k), zero on the diagonal blocks i = j
  CMatrix B;  // k x k

  int N() const { return generator_count(n); }
  cplx a_at(int i, int a, int j, int b) const { return A(i * k + a, j * k + b); }
};

/// Ordered generator pair 0 <= i0 < j0 <= 2n.
struct PairIndex {
  int i0 = 0;
  int j0 = 1;

  friend bool operator==(const PairIndex&, const PairIndex&) = default;
  friend auto operator<=>(const PairIndex&, const PairIndex&) = default;
};

inline bool valid_pair(const PairIndex& p, int n) {
  return 0 <= p.i0 && p.i0 < p.j0 && p.j0 <= 2 * n;
}

/// One elementary triplet with associated matrix X^{α,ε} and weights μ_a, as a
/// summand of a weighted direct sum.
struct ElementaryBlock {
  PairIndex pair;
  int phase = 0;  // eps = ε^phase
  std::vector<cplx> weights;

  cplx eps() const { return fourth_root(phase); }
};

/// A tensor-position triplet held as a lazy weighted direct sum of elementary
/// blocks. Each elementary summand lives on K ⊗ K with dim K = m.
struct TensorTriplet {
  int n = 0;
  int k = 0;
  int m = 0;
  std::vector<ElementaryBlock> blocks;

  int N() const { return generator_count(n); }
};

/// Matrix whose column i * k + a is U_i ξ_a.
inline CMatrix orbit_vectors(const Triplet& t) {
  const int N = t.N();
  CMatrix out(t.dim(), N * t.k());
  for (int i = 0; i < N; ++i) {
    for (int a = 0; a < t.k(); ++a) out.col(i * t.k() + a) = t.apply(i, t.vector(a));
  }
  return out;
}

inline AssociatedMatrix associated_matrix(const Triplet& t) {
  const CMatrix v = orbit_vectors(t);
  // ⟨v_x, v_y⟩ = v_y^H v_x, so X = V^T conj(V).
  CMatrix gram = v.transpose() * v.conjugate();
  return {t.n(), t.k(), std::move(gram)};
}

/// The matrix of the elementary triplet: 1 on the diagonal, ε at (i0, j0),
/// conj(ε) at (j0, i0), 0 elsewhere; the same for every a, b.
inline AssociatedMatrix elementary_matrix(int n, int k, const PairIndex& pair, int phase) {
  if (!valid_pair(pair, n)) throw ArgumentError("elementary_matrix: invalid pair");
  const int N = generator_count(n);
  const cplx eps = fourth_root(phase);
  CMatrix e = CMatrix::Zero(N * k, N * k);
  for (int i = 0; i < N; ++i) e.block(i * k, i * k, k, k).setOnes();
  e.block(pair.i0 * k, pair.j0 * k, k, k).setConstant(eps);
  e.block(pair.j0 * k, pair.i0 * k, k, k).setConstant(std::conj(eps));
  return {n, k, std::move(e)};
}

inline void check_tensor_triplet(const TensorTriplet& tt) {
  if (tt.n < 1 || tt.k < 1) throw ArgumentError("TensorTriplet: n and k must be positive");
  for (const auto& b : tt.blocks) {
    if (!valid_pair(b.pair, tt.n)) throw ArgumentError("TensorTriplet: block pair out of range");
    if (static_cast<int>(b.weights.size()) != tt.k) {
      throw ArgumentError("TensorTriplet: block weight row must have k entries");
    }
  }
}

/// X_{ia,jb} = Σ_blocks μ_a conj(μ_b) X^{block}_{ia,jb}, without building the
/// ambient space.
inline AssociatedMatrix associated_matrix_lazy(const TensorTriplet& tt) {
  check_tensor_triplet(tt);
  const int N = tt.N();
  const int k = tt.k;
  CMatrix diag = CMatrix::Zero(k, k);
  CMatrix out = CMatrix::Zero(N * k, N * k);
  for (const auto& b : tt.blocks) {
    const Eigen::Map<const CVector> mu(b.weights.data(), k);
    const CMatrix outer = mu * mu.adjoint();  // (a, b) -> μ_a conj(μ_b)
    diag += outer;
    out.block(b.pair.i0 * k, b.pair.j0 * k, k, k) += b.eps() * outer;
    out.block(b.pair.j0 * k, b.pair.i0 * k, k, k) += std::conj(b.eps()) * outer;
  }
  for (int i = 0; i < N; ++i) out.block(i * k, i * k, k, k) = diag;
  return {tt.n, k, std::move(out)};
}

/// Largest entrywise deviation between two associated matrices of equal shape.
inline double max_deviation(const AssociatedMatrix& x, const AssociatedMatrix& y) {
  if (x.n != y.n || x.k != y.k) throw ArgumentError("associated matrices differ in shape");
  return (x.entries - y.entries).cwiseAbs().maxCoeff();
}

/// True iff the Gram data of `t` is reproduced by the tensor-position
/// certificate within `tol`.
inline bool verify_tensor_position(const Triplet& t, const TensorTriplet& certificate, double tol) {
  if (t.n() != certificate.n || t.k() != certificate.k) {
    throw ArgumentError("verify_tensor_position: n or k mismatch");
  }
  return max_deviation(associated_matrix(t), associated_matrix_lazy(certificate)) <= tol;
}

/// Expansion coefficients of X*X:
///   A_{ia,jb} = Σ_r conj(λ^i_{r,a}) λ^j_{r,b}  (i ≠ j),
///   B_{a,b}   = Σ_r Σ_i conj(λ^i_{r,a}) λ^i_{r,b}.
inline QuadCoeffs quad_coeffs(const SpanElement& x) {
  const int N = x.N();
  const int k = x.k();
  QuadCoeffs q{x.n(), k, CMatrix::Zero(N * k, N * k), CMatrix::Zero(k, k)};
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const CMatrix block = x.coeff(i).adjoint() * x.coeff(j);
      if (i == j) {
        q.B += block;
      } else {
        q.A.block(i * k, j * k, k, k) = block;
      }
    }
  }
  return q;
}

namespace detail {

inline double real_part_checked(cplx value, const char* where) {
  constexpr double kDiscard = 1e-10;
  constexpr double kFatal = 1e-6;
  const double im = std::abs(value.imag());
  if (im > kDiscard && im > kFatal * std::max(1.0, std::abs(value.real()))) {
    throw NumericalInconsistencyError(std::string(where) + ": quadratic form has a significant imaginary part");
  }
  return value.real();
}

}  // namespace detail

/// ⟨X*X ξ, ξ⟩ for ξ = ⊕ ξ_a, evaluated through the operator expansion
/// Σ_{a,b} ⟨(Σ_{i≠j} A_{ia,jb} U_i* U_j + B_{a,b}) ξ_b, ξ_a⟩.
inline double quad_form(const QuadCoeffs& q, const Triplet& t) {
  if (q.n != t.n() || q.k != t.k()) throw ArgumentError("quad_form: n or k mismatch");
  const int N = q.N();
  const int k = q.k;
  std::vector<CVector> orbit(static_cast<std::size_t>(N * k));
  for (int j = 0; j < N; ++j) {
    for (int b = 0; b < k; ++b) orbit[static_cast<std::size_t>(j * k + b)] = t.apply(j, t.vector(b));
  }
  cplx total = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int i = 0; i < N; ++i) {
      CVector z = CVector::Zero(t.dim());
      for (int j = 0; j < N; ++j) {
        if (j == i) continue;
        for (int b = 0; b < k; ++b) {
          z += q.a_at(i, a, j, b) * orbit[static_cast<std::size_t>(j * k + b)];
        }
      }
      total += t.vector(a).dot(t.apply_adjoint(i, z));
    }
    for (int b = 0; b < k; ++b) total += q.B(a, b) * t.vector(a).dot(t.vector(b));
  }
  return detail::real_part_checked(total, "quad_form");
}

/// The same value as quad_form, consuming only Gram data:
/// Σ_{a,b} (Σ_{i≠j} A_{ia,jb} X_{jb,ia} + B_{a,b} X_{0b,0a}).
inline double quad_form_gram(const QuadCoeffs& q, const AssociatedMatrix& g) {
  if (q.n != g.n || q.k != g.k) throw ArgumentError("quad_form_gram: n or k mismatch");
  const int k = q.k;
  // Σ_{x,y} A_{x,y} G_{y,x} = tr(A G); A vanishes on the diagonal blocks.
  cplx total = q.A.cwiseProduct(g.entries.transpose()).sum();
  total += q.B.cwiseProduct(g.entries.block(0, 0, k, k).transpose()).sum();
  return detail::real_part_checked(total, "quad_form_gram");
}

/// The (dim k)-square operator Σ λ^i_{r,s} U_i ⊗ e_{r,s}; block (r, s) is
/// Σ_i λ^i_{r,s} U_i.
inline CMatrix represent(const SpanElement& x, const Triplet& t) {
  if (x.n() != t.n()) throw ArgumentError("represent: n mismatch");
  if (x.k() != t.k()) throw ArgumentError("represent: k mismatch");
  const Index d = t.dim();
  const int k = x.k();
  CMatrix out = CMatrix::Zero(d * k, d * k);
  for (int r = 0; r < k; ++r) {
    for (int s = 0; s < k; ++s) {
      auto block = out.block(r * d, s * d, d, d);
      block.diagonal().array() += x.coeff(0, r, s);
      for (int i = 1; i < x.N(); ++i) {
        const cplx c = x.coeff(i, r, s);
        if (c != cplx(0.0)) block += c * t.unitary(i);
      }
    }
  }
  return out;
}

}  // namespace tensorpos
