// Walks one random instance through the whole pipeline: a full-norm witness,
// its tensor-position decomposition, and the resulting min-norm bound.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <random>

#include "tensorpos/tensorpos.hpp"

int main(int argc, char** argv) {
  using namespace tensorpos;
  const std::uint64_t seed = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 1;

  std::mt19937_64 rng(seed);
  const SpanElement x = random_span_element(2, 2, 0.8, rng);

  const NormEstimate full = estimate_lower_bound(x, WitnessConfig::defaults(Mode::full, seed));
  const NormEstimate min = estimate_lower_bound(x, WitnessConfig::defaults(Mode::min, seed));
  std::printf("full witness:  dim %td, value_sq %.6f (restart %d)\n", full.witness.dim(), full.value_sq, full.restart);
  std::printf("min witness:   %d x %d factors, value_sq %.6f\n", min.factor_dim, min.factor_dim, min.value_sq);

  const TensorTriplet tt = decompose(full.witness);
  const auto dev = decomposition_deviation(associated_matrix(full.witness), associated_matrix_lazy(tt));
  std::printf("decomposition: %zu blocks of dimension %d, deviations %.1e / %.1e\n", tt.blocks.size(), tt.m,
              dev.offdiag, dev.diag);

  const TheoremCertificate c = certify_theorem(x, full);
  std::printf("certified:     min_lb_sq %.6f, full <= %.0f * min_lb: %s\n", c.min_lb_sq, c.factor,
              c.verdict ? "yes" : "no");
  std::printf("ratio:         %.4f (ceiling %.4f)\n", norm_ratio(full.value_sq, std::max(min.value_sq, c.min_lb_sq)),
              std::sqrt(c.factor));
  return c.verdict ? 0 : 1;
}
