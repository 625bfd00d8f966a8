#include <gtest/gtest.h>

#include <random>

#include "tensorpos/construct.hpp"
#include "tensorpos/random.hpp"

namespace {

using namespace tensorpos;

constexpr cplx I{0.0, 1.0};

// Hand-written pattern: 1 on the diagonal, eps at (i0, j0), conj(eps) at (j0, i0).
cplx pattern(int i, int j, PairIndex p, cplx eps) {
  if (i == j) return 1.0;
  if (i == p.i0 && j == p.j0) return eps;
  if (i == p.j0 && j == p.i0) return std::conj(eps);
  return 0.0;
}

double pattern_deviation(const AssociatedMatrix& g, PairIndex p, cplx eps) {
  double dev = 0.0;
  for (int i = 0; i < g.N(); ++i)
    for (int j = 0; j < g.N(); ++j)
      for (int a = 0; a < g.k; ++a)
        for (int b = 0; b < g.k; ++b) dev = std::max(dev, std::abs(g.at(i, a, j, b) - pattern(i, j, p, eps)));
  return dev;
}

CMatrix components_single_t(int N, std::initializer_list<cplx> values) {
  CMatrix c = CMatrix::Zero(1, N);
  int i = 0;
  for (cplx v : values) c(0, i++) = v;
  return c;
}

TEST(Pairs, CountAndOrder) {
  for (int n : {1, 2, 3, 4}) {
    const auto ps = all_pairs(n);
    const int N = generator_count(n);
    EXPECT_EQ(static_cast<int>(ps.size()), N * (N - 1) / 2);
    for (std::size_t p = 0; p < ps.size(); ++p) {
      EXPECT_LT(ps[p].i0, ps[p].j0);
      if (p > 0) EXPECT_LT(ps[p - 1], ps[p]);
    }
  }
}

TEST(Polarization, OrthogonalPair) {
  const auto w = polarization_weights(2, 1, components_single_t(5, {1.0, 0.0}));
  cplx sum = 0.0;
  for (int s = 0; s < 4; ++s) {
    EXPECT_EQ(w(0, s, 0, 0), cplx(0.5));
    sum += fourth_root(s) * w(0, s, 0, 0) * std::conj(w(0, s, 0, 0));
  }
  EXPECT_LT(std::abs(sum), 1e-15);
}

TEST(Polarization, EqualComponents) {
  // Σ_s ε^s |1 + ε^s|^2 / 4 = 1 + i/2 + 0 - i/2 = 1.
  const auto w = polarization_weights(2, 1, components_single_t(5, {1.0, 1.0}));
  cplx sum = 0.0;
  for (int s = 0; s < 4; ++s) sum += fourth_root(s) * std::norm(w(0, s, 0, 0));
  EXPECT_LT(std::abs(sum - 1.0), 1e-15);
  EXPECT_LT(std::abs(w(0, 1, 0, 0) - 0.5 * (1.0 + I)), 1e-15);
}

TEST(Polarization, PolarizationIdentitiesOnRandomTriplets) {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 2 + rep % 2, k = 1 + rep % 3;
    const Index dim = 1 + rep % 4;
    const Triplet t = random_triplet(n, k, dim, rng);
    const auto w = polarization_weights(t);
    const int N = t.N();
    const double factor = double(N) * N - N;
    for (std::size_t p = 0; p < w.pairs().size(); ++p) {
      const auto [i, j] = w.pairs()[p];
      for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) {
          cplx twisted = 0.0, plain = 0.0;
          for (int s = 0; s < 4; ++s)
            for (Index tt = 0; tt < dim; ++tt) {
              const cplx prod = w(p, s, tt, a) * std::conj(w(p, s, tt, b));
              twisted += fourth_root(s) * prod;
              plain += prod;
            }
          const cplx cross = t.apply(j, t.vector(b)).dot(t.apply(i, t.vector(a)));
          const cplx self = t.vector(b).dot(t.vector(a));
          EXPECT_LT(std::abs(twisted - cross), 1e-12);
          EXPECT_LT(std::abs(plain - 2.0 * self), 1e-12);
        }
    }
    for (int a = 0; a < k; ++a) {
      double total = 0.0;
      for (std::size_t p = 0; p < w.pairs().size(); ++p)
        for (int s = 0; s < 4; ++s)
          for (Index tt = 0; tt < dim; ++tt) total += std::norm(w(p, s, tt, a));
      EXPECT_NEAR(total, factor * t.vector(a).squaredNorm(), 1e-10);
    }
  }
}

TEST(Elementary, MatchesPatternForEveryPairAndPhase) {
  for (int n : {2, 3})
    for (int k : {1, 3})
      for (const auto& p : all_pairs(n))
        for (int s = 0; s < 4; ++s) {
          const auto [t, block] = build_elementary(n, k, p, s);
          EXPECT_LE(pattern_deviation(associated_matrix(t), p, fourth_root(s)), 1e-12)
              << "n=" << n << " pair=(" << p.i0 << "," << p.j0 << ") s=" << s;
          for (const auto& u : t.unitaries()) EXPECT_TRUE(is_unitary(u, 1e-12));
          EXPECT_EQ(t.dim(), (n + 1) * (n + 1));
          EXPECT_NEAR(t.vector(0).norm(), 1.0, 1e-15);
          EXPECT_EQ(block.weights, std::vector<cplx>(k, 1.0));
        }
}

TEST(Elementary, FactorsHaveTensorForm) {
  const int n = 3;
  for (const auto& p : all_pairs(n)) {
    const auto f = elementary_factors(n, p, 1);
    const auto [t, block] = build_elementary(n, 1, p, 1);
    for (int i = 1; i <= n; ++i) {
      EXPECT_EQ(t.unitary(i), kron(f.left[i - 1], identity(n + 1)));
      EXPECT_EQ(t.unitary(i + n), kron(identity(n + 1), f.right[i - 1]));
    }
  }
}

TEST(Elementary, NamedExamples) {
  {
    const auto [t, b] = build_elementary(2, 1, {1, 4}, 1);
    const auto g = associated_matrix(t);
    EXPECT_LT(std::abs(g.at(1, 0, 4, 0) - I), 1e-12);
    EXPECT_LT(std::abs(g.at(4, 0, 1, 0) + I), 1e-12);
  }
  {
    const auto [t, b] = build_elementary(2, 2, {0, 2}, 0);
    const auto g = associated_matrix(t);
    EXPECT_LT(std::abs(g.at(0, 1, 2, 0) - 1.0), 1e-12);
    EXPECT_LT(std::abs(g.at(2, 0, 0, 1) - 1.0), 1e-12);
    EXPECT_LT(std::abs(g.at(0, 0, 1, 0)), 1e-12);
  }
  {
    const auto [t, b] = build_elementary(2, 1, {3, 4}, 2);
    EXPECT_TRUE(verify_tensor_position(t, weighted_direct_sum(2, 1, {b}), 1e-12));
  }
}

TEST(Elementary, InvalidArguments) {
  EXPECT_THROW(build_elementary(2, 1, {0, 0}, 0), ArgumentError);
  EXPECT_THROW(build_elementary(2, 1, {2, 1}, 0), ArgumentError);
  EXPECT_THROW(build_elementary(2, 1, {0, 5}, 0), ArgumentError);
  EXPECT_THROW(build_elementary(2, 1, {0, 1}, 4), ArgumentError);
  EXPECT_THROW(build_elementary(2, 0, {0, 1}, 0), ArgumentError);
}

TEST(WeightedDirectSum, Sesquilinearity) {
  const auto [t, b] = build_elementary(2, 1, {1, 3}, 3);
  const auto single = associated_matrix_lazy(weighted_direct_sum(2, 1, {b}));
  EXPECT_LT(max_deviation(single, associated_matrix(t)), 1e-12);

  const cplx mu(0.3, -1.2), nu(2.0, 0.5);
  ElementaryBlock bm = b, bn = b;
  bm.weights = {mu};
  bn.weights = {nu};
  const auto both = associated_matrix_lazy(weighted_direct_sum(2, 1, {bm, bn}));
  EXPECT_LT((both.entries - (std::norm(mu) + std::norm(nu)) * single.entries).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(WeightedDirectSum, RejectsMixedShapes) {
  const ElementaryBlock k1{{0, 1}, 0, {1.0}};
  const ElementaryBlock k2{{0, 1}, 0, {1.0, 1.0}};
  EXPECT_THROW(weighted_direct_sum(2, 1, {k1, k2}), ArgumentError);
  EXPECT_THROW(weighted_direct_sum(2, 1, {ElementaryBlock{{3, 6}, 0, {1.0}}}), ArgumentError);
}

std::vector<ElementaryBlock> random_blocks(int n, int k, int count, std::mt19937_64& rng) {
  const auto pairs = all_pairs(n);
  std::uniform_int_distribution<std::size_t> pick(0, pairs.size() - 1);
  std::uniform_int_distribution<int> phase(0, 3);
  std::vector<ElementaryBlock> out;
  for (int c = 0; c < count; ++c) {
    ElementaryBlock b{pairs[pick(rng)], phase(rng), {}};
    for (int a = 0; a < k; ++a) b.weights.push_back(complex_normal(rng));
    out.push_back(std::move(b));
  }
  return out;
}

TEST(Materialize, AgreesWithLazyMatrix) {
  std::mt19937_64 rng(32);
  {
    const auto tt = weighted_direct_sum(2, 1, random_blocks(2, 1, 1, rng));
    const Triplet t = materialize(tt, 100);
    EXPECT_EQ(t.dim(), 9);
    EXPECT_LT(max_deviation(associated_matrix(t), associated_matrix_lazy(tt)), 1e-10);
  }
  {
    const auto tt = weighted_direct_sum(2, 2, random_blocks(2, 2, 2, rng));
    const Triplet t = materialize(tt, 100);
    EXPECT_EQ(t.dim(), 36);
    EXPECT_LT(max_deviation(associated_matrix(t), associated_matrix_lazy(tt)), 1e-10);
    for (const auto& u : t.unitaries()) EXPECT_TRUE(is_unitary(u, 1e-12));
    EXPECT_THROW(materialize(tt, 10), CapacityError);
  }
  for (int rep = 0; rep < 10; ++rep) {
    const int n = 2 + rep % 2, k = 1 + rep % 3;
    const auto tt = weighted_direct_sum(n, k, random_blocks(n, k, 1 + rep % 5, rng));
    EXPECT_LT(max_deviation(associated_matrix(materialize(tt, 2500)), associated_matrix_lazy(tt)), 1e-10);
  }
}

TEST(Materialize, EmptyIsRejected) {
  EXPECT_THROW(materialize(TensorTriplet{2, 1, 3, {}}, 100), ArgumentError);
}

Triplet trivial_rep(int n) {
  return Triplet(n, 1, 1, std::vector<CMatrix>(2 * n, identity(1)), {CVector::Constant(1, 1.0)});
}

TEST(Decompose, TrivialRepresentation) {
  const auto g = associated_matrix_lazy(decompose(trivial_rep(2)));
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j) EXPECT_LT(std::abs(g.at(i, 0, j, 0) - (i == j ? 20.0 : 1.0)), 1e-12);
}

TEST(Decompose, ZeroVectorDropsOut) {
  std::mt19937_64 rng(33);
  Triplet t = random_triplet(2, 2, 3, rng);
  t = t.with_vectors({t.vector(0), CVector::Zero(3)});
  const auto g = associated_matrix_lazy(decompose(t));
  const auto orig = associated_matrix(t);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 5; ++j)
      for (int a = 0; a < 2; ++a) {
        EXPECT_EQ(g.at(i, 1, j, a), cplx(0.0));
        EXPECT_EQ(g.at(i, a, j, 1), cplx(0.0));
      }
  for (int i = 0; i < 5; ++i) EXPECT_LT(std::abs(g.at(i, 0, i, 0) - 20.0 * orig.at(0, 0, 0, 0)), 1e-10);
}

TEST(Decompose, PostconditionsAndBlockCount) {
  std::mt19937_64 rng(34);
  for (int rep = 0; rep < 30; ++rep) {
    const int n = 2 + rep % 2, k = 1 + rep % 3;
    const Index dim = 1 + rep % 4;
    const Triplet t = random_triplet(n, k, dim, rng);
    const TensorTriplet tt = decompose(t, {.prune = false});
    const int N = t.N();
    EXPECT_EQ(tt.blocks.size(), static_cast<std::size_t>(dim * 4 * N * (N - 1) / 2));
    const auto dev = decomposition_deviation(associated_matrix(t), associated_matrix_lazy(tt));
    EXPECT_LT(dev.offdiag, 1e-10);
    EXPECT_LT(dev.diag, 1e-10);
  }
}

TEST(Decompose, PruningDropsOnlyZeroBlocks) {
  // Triplet with identity unitaries and e_0: only the t = 0 component is nonzero,
  // and θ = λ_i + ε^s λ_j vanishes for s = 2.
  CVector e0 = CVector::Zero(3);
  e0(0) = 1.0;
  const Triplet t(2, 1, 3, std::vector<CMatrix>(4, identity(3)), {e0});
  const auto pruned = decompose(t);
  EXPECT_EQ(pruned.blocks.size(), 10u * 3u);
  EXPECT_LT(max_deviation(associated_matrix_lazy(pruned), associated_matrix_lazy(decompose(t, {.prune = false}))),
            1e-15);
}

// Decompose reads only the orbit components U_i ξ_a: altering the unitaries
// away from span{ξ} leaves the output unchanged.
TEST(Decompose, DependsOnlyOnOrbitComponents) {
  std::mt19937_64 rng(35);
  const Triplet t = random_triplet(2, 1, 3, rng);
  const CVector xi = t.vector(0).normalized();
  // Unitary fixing ξ: identity on ξ, a random unitary on its complement.
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(Eigen::MatrixXcd(
      (CMatrix(3, 3) << xi, random_gaussian(3, 2, rng)).finished()));
  const Eigen::MatrixXcd basis = qr.householderQ();
  Eigen::MatrixXcd inner = Eigen::MatrixXcd::Identity(3, 3);
  inner.block(1, 1, 2, 2) = haar_unitary(2, rng);
  const CMatrix fix = basis * inner * basis.adjoint();
  ASSERT_LT((fix * xi - xi).norm(), 1e-12);
  std::vector<CMatrix> us;
  for (const auto& u : t.unitaries()) us.push_back(u * fix);
  const Triplet altered(2, 1, 3, us, t.vectors());
  ASSERT_GT((us[0] - t.unitaries()[0]).cwiseAbs().maxCoeff(), 1e-3);
  const auto a = decompose(t), b = decompose(altered);
  ASSERT_EQ(a.blocks.size(), b.blocks.size());
  for (std::size_t i = 0; i < a.blocks.size(); ++i) {
    EXPECT_EQ(a.blocks[i].pair, b.blocks[i].pair);
    EXPECT_EQ(a.blocks[i].phase, b.blocks[i].phase);
    EXPECT_LT(std::abs(a.blocks[i].weights[0] - b.blocks[i].weights[0]), 1e-12);
  }
}

// A concrete triplet realizing "off-diagonal preserved, diagonal scaled by
// N^2 - N": H ⊕ (C^N ⊗ H) with U_i ⊕ (S^i ⊗ Id) and ξ_a ⊕ (e_0 ⊗ c ξ_a), where
// S is the cyclic shift and c^2 = N^2 - N - 1.
Triplet inflated(const Triplet& t) {
  const int N = t.N();
  const Index d = t.dim();
  const double c = std::sqrt(double(N) * N - N - 1);
  std::vector<CMatrix> us;
  for (int i = 1; i < N; ++i) {
    std::vector<Index> image(N);
    for (int p = 0; p < N; ++p) image[p] = (p + i) % N;
    us.push_back(direct_sum({t.unitary(i), kron(permutation_matrix(image), identity(d))}));
  }
  std::vector<CVector> vs;
  CVector e0 = CVector::Zero(N);
  e0(0) = 1.0;
  for (const auto& v : t.vectors()) {
    CVector w(d + N * d);
    w << v, kron(e0, CVector(c * v));
    vs.push_back(w);
  }
  return Triplet(t.n(), t.k(), d + N * d, us, vs);
}

TEST(VerifyTensorPosition, CertificateMatchesInflatedComparison) {
  std::mt19937_64 rng(36);
  for (int rep = 0; rep < 5; ++rep) {
    const Triplet t = random_triplet(2, 2, 3, rng);
    EXPECT_TRUE(verify_tensor_position(inflated(t), decompose(t), 1e-10));
    EXPECT_FALSE(verify_tensor_position(t, decompose(t), 1e-6));
  }
}

TEST(VerifyTensorPosition, SensitiveToWeights) {
  const auto [t, b] = build_elementary(2, 1, {1, 2}, 0);
  auto tt = weighted_direct_sum(2, 1, {b});
  EXPECT_TRUE(verify_tensor_position(t, tt, 1e-12));
  tt.blocks[0].weights[0] += 1e-3;
  EXPECT_FALSE(verify_tensor_position(t, tt, 1e-6));
  EXPECT_THROW(verify_tensor_position(t, weighted_direct_sum(3, 1, {b}), 1e-6), ArgumentError);
}

}  // namespace
