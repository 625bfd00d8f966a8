#pragma once

// Witness-based lower bounds for the C*(F_2n) norm and the min norm of a span
// element, and the certification pipeline that turns a full-norm witness into
// a min-norm witness through the polarization decomposition.

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "tensorpos/construct.hpp"
#include "tensorpos/model.hpp"

namespace tensorpos {

enum class Mode { full, min };

inline std::string to_string(Mode m) { return m == Mode::full ? "full" : "min"; }

inline Mode mode_from_string(const std::string& s) {
  if (s == "full") return Mode::full;
  if (s == "min") return Mode::min;
  throw ArgumentError("unknown mode '" + s + "' (expected full or min)");
}

struct WitnessConfig {
  Mode mode = Mode::full;
  int rep_dim = 4;  // dim H in full mode, dim K_1 = dim K_2 in min mode
  int restarts = 16;
  int iters = 200;
  std::uint64_t seed = 0;
  double tol = 1e-9;  // relative stall threshold for early stopping
  int max_halvings = 20;

  static WitnessConfig defaults(Mode mode, std::uint64_t seed = 0) {
    WitnessConfig cfg;
    cfg.mode = mode;
    cfg.rep_dim = mode == Mode::full ? 4 : 3;
    cfg.seed = seed;
    return cfg;
  }

  void validate() const {
    if (rep_dim < 1) throw ArgumentError("WitnessConfig: rep_dim must be at least 1");
    if (restarts < 1) throw ArgumentError("WitnessConfig: restarts must be at least 1");
    if (iters < 0) throw ArgumentError("WitnessConfig: iters must be non-negative");
    if (!(tol >= 0.0)) throw ArgumentError("WitnessConfig: tol must be non-negative");
  }
};

/// A lower bound on ||X||^2 together with the unit witness that attains it.
struct NormEstimate {
  Mode mode = Mode::full;
  double value_sq = 0.0;
  Triplet witness;
  std::vector<double> history;  // best restart, one value per iteration
  int restart = 0;
  int factor_dim = 0;  // dim K_1 = dim K_2 in min mode, 0 otherwise
};

namespace detail {

/// Stacked vector ξ -> k vectors of size dim.
inline std::vector<CVector> split_stacked(const CVector& xi, int k, Index dim) {
  std::vector<CVector> out;
  out.reserve(static_cast<std::size_t>(k));
  for (int a = 0; a < k; ++a) out.emplace_back(xi.segment(a * dim, dim));
  return out;
}

class WitnessSearch {
 public:
  WitnessSearch(const SpanElement& x, const WitnessConfig& cfg)
      : x_(x), cfg_(cfg), d_(cfg.rep_dim),
        dim_(cfg.mode == Mode::full ? Index(cfg.rep_dim) : Index(cfg.rep_dim) * cfg.rep_dim) {}

  struct Outcome {
    double value = 0.0;
    std::vector<CMatrix> factors;
    CVector xi;
    std::vector<double> history;
  };

  Outcome run(int restart) const {
    std::mt19937_64 rng(cfg_.seed ^ static_cast<std::uint64_t>(restart));
    std::vector<CMatrix> factors;
    for (int g = 0; g < 2 * x_.n(); ++g) factors.push_back(haar_unitary(d_, rng));

    std::vector<double> steps(factors.size(), 1.0);
    Outcome out;
    CMatrix rep = represent_with(factors);
    CVector xi = top_vector(rep);
    double current = (rep * xi).squaredNorm();
    out.history.push_back(current);

    int stalled = 0;
    for (int it = 0; it < cfg_.iters; ++it) {
      const double start = current;
      for (std::size_t g = 0; g < factors.size(); ++g) {
        current = improve_generator(factors, g, xi, current, steps[g]);
      }
      rep = represent_with(factors);
      xi = top_vector(rep);
      current = std::max(current, (rep * xi).squaredNorm());
      out.history.push_back(current);
      stalled = (current - start <= cfg_.tol * std::max(1.0, current)) ? stalled + 1 : 0;
      if (stalled >= 5) break;
    }
    out.value = current;
    out.factors = std::move(factors);
    out.xi = std::move(xi);
    return out;
  }

  std::vector<CMatrix> ambient_unitaries(const std::vector<CMatrix>& factors) const {
    if (cfg_.mode == Mode::full) return factors;
    const int n = x_.n();
    const CMatrix id = identity(d_);
    std::vector<CMatrix> out;
    for (int g = 0; g < 2 * n; ++g) {
      out.push_back(g < n ? kron(factors[static_cast<std::size_t>(g)], id)
                          : kron(id, factors[static_cast<std::size_t>(g)]));
    }
    return out;
  }

  Triplet witness(const std::vector<CMatrix>& factors, const CVector& xi) const {
    return Triplet(x_.n(), x_.k(), dim_, ambient_unitaries(factors), split_stacked(xi, x_.k(), dim_));
  }

 private:
  CMatrix represent_with(const std::vector<CMatrix>& factors) const {
    const std::vector<CVector> zeros(static_cast<std::size_t>(x_.k()), CVector::Zero(dim_));
    return represent(x_, Triplet(x_.n(), x_.k(), dim_, ambient_unitaries(factors), zeros));
  }

  static CVector top_vector(const CMatrix& rep) {
    const CMatrix h = rep.adjoint() * rep;
    try {
      return top_eigenpair(h, 1e-12, 50).vector;
    } catch (const ConvergenceError& e) {
      return e.best().vector;
    }
  }

  /// Euclidean gradient ∂f/∂conj(factor) of f = ||R ξ||^2 for one generator.
  CMatrix gradient(const std::vector<CMatrix>& factors, std::size_t g, const CVector& xi) const {
    const int k = x_.k();
    const int gen = static_cast<int>(g) + 1;
    const CVector y = represent_with(factors) * xi;
    CMatrix grad = CMatrix::Zero(dim_, dim_);
    for (int r = 0; r < k; ++r) {
      CVector w = CVector::Zero(dim_);
      for (int s = 0; s < k; ++s) w += x_.coeff(gen, r, s) * xi.segment(s * dim_, dim_);
      grad += y.segment(r * dim_, dim_) * w.adjoint();
    }
    if (cfg_.mode == Mode::full) return grad;
    // Partial trace onto the factor the generator acts on.
    CMatrix small = CMatrix::Zero(d_, d_);
    const bool left = gen <= x_.n();
    for (Index p = 0; p < d_; ++p) {
      for (Index q = 0; q < d_; ++q) {
        for (Index s = 0; s < d_; ++s) {
          small(p, q) += left ? grad(p * d_ + s, q * d_ + s) : grad(s * d_ + p, s * d_ + q);
        }
      }
    }
    return small;
  }

  /// One accepted-if-not-worse polar-retracted ascent step; returns the new value.
  double improve_generator(std::vector<CMatrix>& factors, std::size_t g, const CVector& xi,
                           double current, double& step) const {
    const CMatrix grad = gradient(factors, g, xi);
    const double gnorm = grad.norm();
    if (!(gnorm > 1e-14)) return current;
    const CMatrix dir = grad / gnorm;
    const CMatrix original = factors[g];
    for (int h = 0; h <= cfg_.max_halvings; ++h, step *= 0.5) {
      try {
        factors[g] = polar_unitary(original + step * dir);
      } catch (const DegenerateInputError&) {
        continue;
      }
      const double value = (represent_with(factors) * xi).squaredNorm();
      if (value >= current) {
        step = std::min(2.0 * step, 4.0);
        return value;
      }
    }
    factors[g] = original;
    step = 1.0;
    return current;
  }

  const SpanElement& x_;
  WitnessConfig cfg_;
  Index d_;
  Index dim_;
};

}  // namespace detail

/// Best witness found by alternating maximization: ξ is the top eigenvector of
/// the represented X*X, then each unitary takes a retracted gradient step.
/// The returned value is always a true lower bound of ||X||^2 in the chosen
/// mode, since it is the quadratic form of a feasible witness.
inline NormEstimate estimate_lower_bound(const SpanElement& x, const WitnessConfig& cfg) {
  cfg.validate();
  const detail::WitnessSearch search(x, cfg);
  std::optional<detail::WitnessSearch::Outcome> best;
  int best_restart = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    auto outcome = search.run(r);
    if (!best || outcome.value > best->value) {
      best = std::move(outcome);
      best_restart = r;
    }
  }
  Triplet witness = search.witness(best->factors, best->xi);
  const double value = quad_form(quad_coeffs(x), witness);
  return {cfg.mode, std::max(0.0, value), std::move(witness), std::move(best->history), best_restart,
          cfg.mode == Mode::min ? cfg.rep_dim : 0};
}

struct TheoremCertificate {
  SpanElement x;
  double full_witness_value = 0.0;  // ⟨X*X ξ, ξ⟩ on the full witness
  double tensor_gram_value = 0.0;   // same form on the tensor-position Gram data
  double min_lb_sq = 0.0;           // tensor_gram_value / (N^2 - N)
  double factor = 0.0;              // N^2 - N
  bool verdict = false;
  DecompositionDeviation deviation;
  std::size_t blocks = 0;
};

/// Decomposes a unit full-mode witness into a tensor-position witness and
/// checks ||X*X||_{C*(F_2n)} witness value <= (N^2 - N) * certified ||X||_min^2.
inline TheoremCertificate certify_theorem(const SpanElement& x, const NormEstimate& full_est) {
  if (full_est.mode != Mode::full) throw ArgumentError("certify_theorem: estimate must be in full mode");
  const Triplet& w = full_est.witness;
  if (w.n() != x.n() || w.k() != x.k()) throw ArgumentError("certify_theorem: witness shape mismatch");
  if (std::abs(w.total_norm_sq() - 1.0) > 1e-9) {
    throw ArgumentError("certify_theorem: witness vectors are not normalized");
  }
  const QuadCoeffs q = quad_coeffs(x);
  const AssociatedMatrix gram = associated_matrix(w);
  const TensorTriplet tt = decompose(w);
  const AssociatedMatrix tensor_gram = associated_matrix_lazy(tt);

  TheoremCertificate cert{x};
  cert.deviation = decomposition_deviation(gram, tensor_gram);
  const double scale = std::max(1.0, gram.entries.cwiseAbs().maxCoeff());
  if (cert.deviation.offdiag > 1e-9 * scale || cert.deviation.diag > 1e-9 * scale * x.N() * x.N()) {
    throw InternalConsistencyError("certify_theorem: decomposition postconditions violated");
  }
  const int N = x.N();
  cert.factor = static_cast<double>(N) * N - N;
  cert.blocks = tt.blocks.size();
  cert.full_witness_value = quad_form(q, w);
  cert.tensor_gram_value = quad_form_gram(q, tensor_gram);
  cert.min_lb_sq = cert.tensor_gram_value / cert.factor;
  cert.verdict = cert.full_witness_value <= cert.factor * cert.min_lb_sq + 1e-8;
  return cert;
}

struct GapReport {
  NormEstimate full;
  NormEstimate min;
  TheoremCertificate certificate;
  double lb_full_sq = 0.0;
  double lb_min_sq = 0.0;
  double certified_min_lb_sq = 0.0;
  double ratio = 0.0;            // sqrt(lb_full / max(lb_min, certified)), observational
  double certified_ratio = 0.0;  // sqrt(lb_full / certified), bounded by the ceiling
  double ceiling = 0.0;          // sqrt(N^2 - N)
  bool verdict = false;
};

inline double norm_ratio(double num_sq, double den_sq) {
  if (num_sq <= 0.0) return den_sq > 0.0 ? 0.0 : 1.0;
  return std::sqrt(num_sq / den_sq);
}

inline GapReport gap_report(const SpanElement& x, const WitnessConfig& cfg_full, const WitnessConfig& cfg_min) {
  if (cfg_full.mode != Mode::full || cfg_min.mode != Mode::min) {
    throw ArgumentError("gap_report: configurations must be full and min mode respectively");
  }
  NormEstimate full = estimate_lower_bound(x, cfg_full);
  NormEstimate min = estimate_lower_bound(x, cfg_min);
  TheoremCertificate cert = certify_theorem(x, full);
  GapReport rep{std::move(full), std::move(min), std::move(cert)};
  rep.lb_full_sq = rep.full.value_sq;
  rep.lb_min_sq = rep.min.value_sq;
  rep.certified_min_lb_sq = rep.certificate.min_lb_sq;
  rep.ratio = norm_ratio(rep.lb_full_sq, std::max(rep.lb_min_sq, rep.certified_min_lb_sq));
  rep.certified_ratio = norm_ratio(rep.lb_full_sq, rep.certified_min_lb_sq);
  rep.ceiling = std::sqrt(rep.certificate.factor);
  rep.verdict = rep.certificate.verdict;
  return rep;
}

}  // namespace tensorpos
