#pragma once

// Seeded random instances.

#include <random>

#include "tensorpos/model.hpp"

namespace tensorpos {

/// Each λ^i_{r,s} is nonzero with probability `density`, complex standard normal.
template <class Rng>
SpanElement random_span_element(int n, int k, double density, Rng& rng) {
  if (!(density > 0.0 && density <= 1.0)) throw ArgumentError("density must lie in (0, 1]");
  std::bernoulli_distribution keep(density);
  std::vector<CMatrix> coeffs;
  for (int i = 0; i < generator_count(n); ++i) {
    CMatrix c = CMatrix::Zero(k, k);
    for (int r = 0; r < k; ++r) {
      for (int s = 0; s < k; ++s) {
        // Draw the value unconditionally so the stream does not depend on density.
        const cplx z = complex_normal(rng);
        if (keep(rng)) c(r, s) = z;
      }
    }
    coeffs.push_back(std::move(c));
  }
  return SpanElement(n, k, std::move(coeffs));
}

/// Haar unitaries and Gaussian vectors; with `normalize`, Σ ||ξ_a||^2 = 1.
template <class Rng>
Triplet random_triplet(int n, int k, Index dim, Rng& rng, bool normalize = true) {
  std::vector<CMatrix> us;
  for (int i = 0; i < 2 * n; ++i) us.push_back(haar_unitary(dim, rng));
  std::vector<CVector> vs;
  double total = 0.0;
  for (int a = 0; a < k; ++a) {
    vs.push_back(random_gaussian_vector(dim, rng));
    total += vs.back().squaredNorm();
  }
  if (normalize && total > 0.0) {
    for (auto& v : vs) v /= std::sqrt(total);
  }
  return Triplet(n, k, dim, std::move(us), std::move(vs));
}

}  // namespace tensorpos
