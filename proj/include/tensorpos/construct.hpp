#pragma once

// Elementary tensor-position triplets, weighted direct sums of them, and the
// polarization decomposition of an arbitrary finite-dimensional triplet.

#include <map>
#include <utility>
#include <vector>

#include "tensorpos/model.hpp"

namespace tensorpos {

/// All pairs 0 <= i < j <= 2n in lexicographic order; N(N-1)/2 of them.
inline std::vector<PairIndex> all_pairs(int n) {
  std::vector<PairIndex> out;
  const int N = generator_count(n);
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) out.push_back({i, j});
  }
  return out;
}

/// μ_a^{α,s,t} = (λ^t_{i,a} + ε^s λ^t_{j,a}) / 2 for α = (i, j).
class WeightTensor {
 public:
  WeightTensor(int n, int k, Index dim)
      : n_(n), k_(k), dim_(dim), pairs_(all_pairs(n)),
        data_(pairs_.size() * 4 * static_cast<std::size_t>(dim) * static_cast<std::size_t>(k)) {}

  int n() const { return n_; }
  int k() const { return k_; }
  Index dim() const { return dim_; }
  const std::vector<PairIndex>& pairs() const { return pairs_; }

  cplx& operator()(std::size_t pair, int s, Index t, int a) { return data_[offset(pair, s, t, a)]; }
  cplx operator()(std::size_t pair, int s, Index t, int a) const { return data_[offset(pair, s, t, a)]; }

  /// The k weights of one (α, s, t) block.
  std::vector<cplx> row(std::size_t pair, int s, Index t) const {
    const auto first = data_.begin() + static_cast<std::ptrdiff_t>(offset(pair, s, t, 0));
    return {first, first + k_};
  }

 private:
  std::size_t offset(std::size_t pair, int s, Index t, int a) const {
    return ((pair * 4 + static_cast<std::size_t>(s)) * static_cast<std::size_t>(dim_) +
            static_cast<std::size_t>(t)) *
               static_cast<std::size_t>(k_) +
           static_cast<std::size_t>(a);
  }

  int n_;
  int k_;
  Index dim_;
  std::vector<PairIndex> pairs_;
  std::vector<cplx> data_;
};

/// Polarization weights from orbit components λ^t_{i,a}, given as the
/// dim x (N k) matrix whose column i * k + a is U_i ξ_a.
inline WeightTensor polarization_weights(int n, int k, const CMatrix& components) {
  const int N = generator_count(n);
  if (components.cols() != N * k || components.rows() < 1) {
    throw ArgumentError("polarization_weights: component matrix has wrong shape");
  }
  const Index dim = components.rows();
  WeightTensor w(n, k, dim);
  const auto& pairs = w.pairs();
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    for (int s = 0; s < 4; ++s) {
      const cplx eps = fourth_root(s);
      for (Index t = 0; t < dim; ++t) {
        for (int a = 0; a < k; ++a) {
          w(p, s, t, a) = 0.5 * (components(t, i * k + a) + eps * components(t, j * k + a));
        }
      }
    }
  }
  return w;
}

inline WeightTensor polarization_weights(const Triplet& t) {
  return polarization_weights(t.n(), t.k(), orbit_vectors(t));
}

/// Tensor factors of an elementary triplet: unitaries Ũ_1..Ũ_n, Ṽ_1..Ṽ_n on K
/// (dim m) and the vector η ∈ K ⊗ K as its m x m coefficient matrix, so that
/// η = Σ_{p,q} C_{pq} e_p ⊗ e_q.
struct ElementaryFactors {
  int m = 0;
  CMatrix eta;
  std::vector<CMatrix> left;
  std::vector<CMatrix> right;
};

namespace detail {

inline CMatrix cyclic_shift(int m, int by) {
  std::vector<Index> image(static_cast<std::size_t>(m));
  for (int p = 0; p < m; ++p) image[static_cast<std::size_t>(p)] = (p + by) % m;
  return permutation_matrix(image);
}

/// Permutation with e_0 -> e_{to0}, e_1 -> e_{to1}; remaining basis vectors
/// are matched in increasing order.
inline CMatrix two_point_permutation(int m, int to0, int to1) {
  std::vector<Index> image(static_cast<std::size_t>(m), -1);
  std::vector<bool> used(static_cast<std::size_t>(m), false);
  image[0] = to0;
  image[1] = to1;
  used[static_cast<std::size_t>(to0)] = used[static_cast<std::size_t>(to1)] = true;
  int next = 0;
  for (int p = 2; p < m; ++p) {
    while (used[static_cast<std::size_t>(next)]) ++next;
    image[static_cast<std::size_t>(p)] = next;
    used[static_cast<std::size_t>(next)] = true;
  }
  return permutation_matrix(image);
}

inline CMatrix basis_outer(int m, int p) {
  CMatrix c = CMatrix::Zero(m, m);
  c(p, p) = 1.0;
  return c;
}

}  // namespace detail

/// Builds unitaries with ε̄ W̃_{i0} η = W̃_{j0} η and the remaining orbit
/// vectors W̃_i η orthonormal, on K = C^{n+1}.
///
/// Same-side pairs and mixed pairs with i0 = 0 use η = e_0 ⊗ e_0 and send e_0
/// to distinct basis vectors. A mixed pair with i0 >= 1 cannot use a product
/// vector: Ũ_{i0} e_0 ⊗ e_0 ∝ e_0 ⊗ Ṽ e_0 forces W̃_{i0} η ∝ W̃_0 η. There η is
/// (e_0 ⊗ e_0 + e_1 ⊗ e_1)/√2 with Ũ_{i0} = Z = diag(1, -1, 1, ...) and
/// Ṽ_{j0-n} = ε̄ Z; the other generators move {e_0, e_1} to disjoint cells.
inline ElementaryFactors elementary_factors(int n, const PairIndex& pair, int phase) {
  if (n < 1) throw ArgumentError("elementary_factors: n must be positive");
  if (!valid_pair(pair, n)) throw ArgumentError("elementary_factors: invalid pair");
  if (phase < 0 || phase > 3) throw ArgumentError("elementary_factors: eps must be one of 1, i, -1, -i");
  const int m = n + 1;
  const cplx eps_bar = std::conj(fourth_root(phase));
  ElementaryFactors f;
  f.m = m;
  for (int i = 1; i <= n; ++i) {
    f.left.push_back(detail::cyclic_shift(m, i));
    f.right.push_back(detail::cyclic_shift(m, i));
  }
  auto left = [&](int i) -> CMatrix& { return f.left[static_cast<std::size_t>(i - 1)]; };
  auto right = [&](int j) -> CMatrix& { return f.right[static_cast<std::size_t>(j - 1)]; };
  const auto [i0, j0] = pair;

  if (j0 <= n) {
    f.eta = detail::basis_outer(m, 0);
    left(j0) = (i0 == 0) ? CMatrix(eps_bar * identity(m)) : CMatrix(eps_bar * left(i0));
  } else if (i0 > n) {
    f.eta = detail::basis_outer(m, 0);
    right(j0 - n) = eps_bar * right(i0 - n);
  } else if (i0 == 0) {
    f.eta = detail::basis_outer(m, 0);
    right(j0 - n) = eps_bar * identity(m);
  } else {
    f.eta = (detail::basis_outer(m, 0) + detail::basis_outer(m, 1)) / std::sqrt(2.0);
    CMatrix z = identity(m);
    z(1, 1) = -1.0;
    left(i0) = z;
    right(j0 - n) = eps_bar * z;
    // The other n-1 generators on each side: e_0 -> e_{p+2}, e_1 -> e_{p+3},
    // wrapping the last e_1 image to e_0.
    auto place = [&](auto&& slot, int skip) {
      int p = 0;
      for (int g = 1; g <= n; ++g) {
        if (g == skip) continue;
        const int to0 = p + 2;
        const int to1 = (p < n - 2) ? p + 3 : 0;
        slot(g) = detail::two_point_permutation(m, to0, to1);
        ++p;
      }
    };
    place(left, i0);
    place(right, j0 - n);
  }
  return f;
}

/// Row-major vectorization, matching kron's index p * m + q.
inline CVector vectorize(const CMatrix& c) {
  CVector out(c.size());
  for (Index p = 0; p < c.rows(); ++p) {
    for (Index q = 0; q < c.cols(); ++q) out(p * c.cols() + q) = c(p, q);
  }
  return out;
}

/// Explicit triplet on K ⊗ K for a set of tensor factors.
inline Triplet tensor_triplet_from_factors(int k, const std::vector<CMatrix>& left,
                                           const std::vector<CMatrix>& right,
                                           std::vector<CVector> vectors) {
  const int n = static_cast<int>(left.size());
  const Index m = left.front().rows();
  const CMatrix id = identity(m);
  std::vector<CMatrix> unitaries;
  unitaries.reserve(static_cast<std::size_t>(2 * n));
  for (const auto& u : left) unitaries.push_back(kron(u, id));
  for (const auto& v : right) unitaries.push_back(kron(id, v));
  return Triplet(n, k, m * m, std::move(unitaries), std::move(vectors));
}

struct ElementaryTriplet {
  Triplet triplet;
  ElementaryBlock block;  // unit weights
};

/// The elementary triplet for (pair, ε^phase) with all k vectors equal to η,
/// together with its block form.
inline ElementaryTriplet build_elementary(int n, int k, const PairIndex& pair, int phase) {
  if (k < 1) throw ArgumentError("build_elementary: k must be positive");
  const ElementaryFactors f = elementary_factors(n, pair, phase);
  const CVector eta = vectorize(f.eta);
  Triplet t = tensor_triplet_from_factors(k, f.left, f.right,
                                          std::vector<CVector>(static_cast<std::size_t>(k), eta));
  ElementaryBlock block{pair, phase, std::vector<cplx>(static_cast<std::size_t>(k), cplx(1.0))};
  return {std::move(t), std::move(block)};
}

/// Lazy direct sum ⊕_α μ^α (elementary triplet α).
inline TensorTriplet weighted_direct_sum(int n, int k, std::vector<ElementaryBlock> blocks) {
  TensorTriplet tt{n, k, n + 1, std::move(blocks)};
  check_tensor_triplet(tt);
  for (const auto& b : tt.blocks) {
    if (b.phase < 0 || b.phase > 3) throw ArgumentError("weighted_direct_sum: eps must be one of 1, i, -1, -i");
  }
  return tt;
}

/// Explicit triplet on K̃ ⊗ K̃ with K̃ = ⊕ K^α, Ũ_i = ⊕ Ũ_i^α and
/// η̃_a = ⊕ μ_a^α η^α placed in the diagonal summands K^α ⊗ K^α.
/// Throws CapacityError if (Σ dim K^α)^2 exceeds `cap`.
inline Triplet materialize(const TensorTriplet& tt, Index cap) {
  check_tensor_triplet(tt);
  if (tt.blocks.empty()) throw ArgumentError("materialize: no blocks");
  const Index side = detail::checked_mul(static_cast<Index>(tt.blocks.size()), tt.m);
  const Index ambient = detail::checked_mul(side, side);
  if (ambient > cap) {
    throw CapacityError("materialize: ambient dimension " + std::to_string(ambient) +
                        " exceeds cap " + std::to_string(cap));
  }
  std::map<std::pair<PairIndex, int>, ElementaryFactors> cache;
  std::vector<const ElementaryFactors*> factors;
  for (const auto& b : tt.blocks) {
    auto key = std::make_pair(b.pair, b.phase);
    auto it = cache.find(key);
    if (it == cache.end()) it = cache.emplace(key, elementary_factors(tt.n, b.pair, b.phase)).first;
    if (it->second.m != tt.m) throw ArgumentError("materialize: block dimension does not match m");
    factors.push_back(&it->second);
  }

  std::vector<CMatrix> left, right;
  for (int g = 0; g < tt.n; ++g) {
    std::vector<CMatrix> lblocks, rblocks;
    for (const auto* f : factors) {
      lblocks.push_back(f->left[static_cast<std::size_t>(g)]);
      rblocks.push_back(f->right[static_cast<std::size_t>(g)]);
    }
    left.push_back(direct_sum(lblocks));
    right.push_back(direct_sum(rblocks));
  }

  std::vector<CVector> vectors;
  for (int a = 0; a < tt.k; ++a) {
    CMatrix coeffs = CMatrix::Zero(side, side);
    for (std::size_t b = 0; b < tt.blocks.size(); ++b) {
      const auto off = static_cast<Index>(b) * tt.m;
      coeffs.block(off, off, tt.m, tt.m) = tt.blocks[b].weights[static_cast<std::size_t>(a)] * factors[b]->eta;
    }
    vectors.push_back(vectorize(coeffs));
  }
  return tensor_triplet_from_factors(tt.k, left, right, std::move(vectors));
}

struct DecomposeOptions {
  bool prune = true;
  double prune_tol = 1e-14;
};

/// Tensor-position triplet reproducing every off-diagonal Gram entry of the
/// triplet with orbit components `components` and scaling the diagonal by N^2 - N.
/// Reads nothing but the components.
inline TensorTriplet decompose_components(int n, int k, const CMatrix& components,
                                          const DecomposeOptions& opts = {}) {
  const WeightTensor w = polarization_weights(n, k, components);
  std::vector<ElementaryBlock> blocks;
  blocks.reserve(w.pairs().size() * 4 * static_cast<std::size_t>(w.dim()));
  for (std::size_t p = 0; p < w.pairs().size(); ++p) {
    for (int s = 0; s < 4; ++s) {
      for (Index t = 0; t < w.dim(); ++t) {
        std::vector<cplx> row = w.row(p, s, t);
        if (opts.prune) {
          double largest = 0.0;
          for (const auto& mu : row) largest = std::max(largest, std::abs(mu));
          if (largest < opts.prune_tol) continue;
        }
        blocks.push_back({w.pairs()[p], s, std::move(row)});
      }
    }
  }
  return weighted_direct_sum(n, k, std::move(blocks));
}

inline TensorTriplet decompose(const Triplet& t, const DecomposeOptions& opts = {}) {
  return decompose_components(t.n(), t.k(), orbit_vectors(t), opts);
}

/// How far a decomposition is from preserving the off-diagonal Gram entries
/// and scaling the diagonal blocks by exactly N^2 - N.
struct DecompositionDeviation {
  double offdiag = 0.0;
  double diag = 0.0;
};

inline DecompositionDeviation decomposition_deviation(const AssociatedMatrix& original,
                                                      const AssociatedMatrix& decomposed) {
  if (original.n != decomposed.n || original.k != decomposed.k) {
    throw ArgumentError("decomposition_deviation: shape mismatch");
  }
  const int N = original.N();
  const int k = original.k;
  const double factor = static_cast<double>(N) * N - N;
  DecompositionDeviation dev;
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      const auto got = decomposed.entries.block(i * k, j * k, k, k);
      if (i == j) {
        const CMatrix want = factor * original.entries.block(0, 0, k, k);
        dev.diag = std::max(dev.diag, (got - want).cwiseAbs().maxCoeff());
      } else {
        const auto want = original.entries.block(i * k, j * k, k, k);
        dev.offdiag = std::max(dev.offdiag, (got - want).cwiseAbs().maxCoeff());
      }
    }
  }
  return dev;
}

}  // namespace tensorpos
