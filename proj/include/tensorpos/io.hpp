#pragma once

// JSON encodings. Complex scalars are [re, im]; matrices are arrays of rows.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "tensorpos/norms.hpp"

namespace tensorpos::io {

using json = nlohmann::json;

/// Malformed or inconsistent JSON input.
class ParseError : public Error {
 public:
  using Error::Error;
};

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ParseError("expected a complex number as [re, im]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const CMatrix& m) {
  json rows = json::array();
  for (Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline CMatrix matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) throw ParseError("expected a non-empty matrix");
  const auto rows = static_cast<Index>(j.size());
  const auto cols = static_cast<Index>(j[0].size());
  CMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) {
    const json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) throw ParseError("ragged matrix");
    for (Index c = 0; c < cols; ++c) m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

inline json to_json(const CVector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

inline CVector vector_from_json(const json& j) {
  if (!j.is_array()) throw ParseError("expected a vector");
  CVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = complex_from_json(j[i]);
  return v;
}

namespace detail {

inline const json& field(const json& j, const char* name) {
  if (!j.is_object() || !j.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
  return j.at(name);
}

inline int int_field(const json& j, const char* name) {
  const json& f = field(j, name);
  if (!f.is_number_integer()) throw ParseError(std::string("field '") + name + "' must be an integer");
  return f.get<int>();
}

/// Wraps library argument errors raised while constructing from JSON.
template <class F>
auto parse_guard(F&& f) {
  try {
    return f();
  } catch (const ArgumentError& e) {
    throw ParseError(e.what());
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

}  // namespace detail

// SpanElement: {"n", "k", "coeffs": [i][r][s]}.
inline json to_json(const SpanElement& x) {
  json coeffs = json::array();
  for (const auto& c : x.coeffs()) coeffs.push_back(to_json(c));
  return {{"n", x.n()}, {"k", x.k()}, {"coeffs", std::move(coeffs)}};
}

inline SpanElement span_element_from_json(const json& j) {
  return detail::parse_guard([&] {
    const int n = detail::int_field(j, "n");
    const int k = detail::int_field(j, "k");
    const json& coeffs = detail::field(j, "coeffs");
    if (!coeffs.is_array()) throw ParseError("'coeffs' must be an array");
    std::vector<CMatrix> blocks;
    for (const auto& c : coeffs) blocks.push_back(matrix_from_json(c));
    return SpanElement(n, k, std::move(blocks));
  });
}

// Triplet: {"n", "k", "dim", "unitaries": [matrix...], "vectors": [vector...]}.
inline json to_json(const Triplet& t) {
  json us = json::array();
  for (const auto& u : t.unitaries()) us.push_back(to_json(u));
  json vs = json::array();
  for (const auto& v : t.vectors()) vs.push_back(to_json(v));
  return {{"n", t.n()}, {"k", t.k()}, {"dim", t.dim()}, {"unitaries", std::move(us)}, {"vectors", std::move(vs)}};
}

/// Parses and validates a triplet, including unitarity at `tol`.
inline Triplet triplet_from_json(const json& j, double tol = kDefaultUnitaryTol) {
  return detail::parse_guard([&] {
    const int n = detail::int_field(j, "n");
    const int k = detail::int_field(j, "k");
    const int dim = detail::int_field(j, "dim");
    std::vector<CMatrix> us;
    for (const auto& u : detail::field(j, "unitaries")) us.push_back(matrix_from_json(u));
    std::vector<CVector> vs;
    for (const auto& v : detail::field(j, "vectors")) vs.push_back(vector_from_json(v));
    return Triplet::checked(n, k, dim, std::move(us), std::move(vs), tol);
  });
}

// TensorTriplet: {"n", "k", "m", "blocks": [{"pair", "eps", "weights"}]}.
inline json to_json(const TensorTriplet& tt) {
  json blocks = json::array();
  for (const auto& b : tt.blocks) {
    json w = json::array();
    for (const auto& mu : b.weights) w.push_back(to_json(mu));
    blocks.push_back({{"pair", {b.pair.i0, b.pair.j0}}, {"eps", to_json(b.eps())}, {"weights", std::move(w)}});
  }
  return {{"n", tt.n}, {"k", tt.k}, {"m", tt.m}, {"blocks", std::move(blocks)}};
}

inline int phase_from_eps(cplx eps) {
  for (int s = 0; s < 4; ++s) {
    if (std::abs(eps - fourth_root(s)) < 1e-12) return s;
  }
  throw ParseError("'eps' must be one of 1, i, -1, -i");
}

inline TensorTriplet tensor_triplet_from_json(const json& j) {
  return detail::parse_guard([&] {
    const int n = detail::int_field(j, "n");
    const int k = detail::int_field(j, "k");
    const int m = detail::int_field(j, "m");
    if (m != n + 1) throw ParseError("unsupported elementary dimension m");
    std::vector<ElementaryBlock> blocks;
    for (const auto& b : detail::field(j, "blocks")) {
      const json& pair = detail::field(b, "pair");
      if (!pair.is_array() || pair.size() != 2) throw ParseError("'pair' must be [i0, j0]");
      ElementaryBlock block{{pair[0].get<int>(), pair[1].get<int>()},
                            phase_from_eps(complex_from_json(detail::field(b, "eps"))),
                            {}};
      for (const auto& mu : detail::field(b, "weights")) block.weights.push_back(complex_from_json(mu));
      blocks.push_back(std::move(block));
    }
    return weighted_direct_sum(n, k, std::move(blocks));
  });
}

inline json to_json(const AssociatedMatrix& g) {
  return {{"n", g.n}, {"k", g.k}, {"entries", to_json(g.entries)}};
}

inline json to_json(const WitnessConfig& cfg) {
  return {{"mode", to_string(cfg.mode)}, {"rep_dim", cfg.rep_dim}, {"restarts", cfg.restarts},
          {"iters", cfg.iters},           {"seed", cfg.seed},       {"tol", cfg.tol}};
}

inline json to_json(const NormEstimate& e) {
  return {{"mode", to_string(e.mode)}, {"value_sq", e.value_sq}, {"restart", e.restart},
          {"factor_dim", e.factor_dim}, {"history", e.history},  {"witness", to_json(e.witness)}};
}

inline NormEstimate norm_estimate_from_json(const json& j) {
  return detail::parse_guard([&] {
    NormEstimate e{mode_from_string(detail::field(j, "mode").get<std::string>()),
                   detail::field(j, "value_sq").get<double>(),
                   triplet_from_json(detail::field(j, "witness")),
                   detail::field(j, "history").get<std::vector<double>>(),
                   detail::int_field(j, "restart"),
                   detail::int_field(j, "factor_dim")};
    return e;
  });
}

inline json to_json(const TheoremCertificate& c) {
  return {{"full_witness_value", c.full_witness_value},
          {"tensor_gram_value", c.tensor_gram_value},
          {"min_lb_sq", c.min_lb_sq},
          {"factor", c.factor},
          {"verdict", c.verdict},
          {"offdiag_deviation", c.deviation.offdiag},
          {"diag_deviation", c.deviation.diag},
          {"blocks", c.blocks}};
}

/// Report JSON for one instance.
inline json report_json(const SpanElement& x, const GapReport& r, std::uint64_t seed,
                        const WitnessConfig& cfg_full, const WitnessConfig& cfg_min) {
  return {{"instance", to_json(x)},
          {"lb_full_sq", r.lb_full_sq},
          {"lb_min_sq", r.lb_min_sq},
          {"certified_min_lb_sq", r.certified_min_lb_sq},
          {"ratio", r.ratio},
          {"certified_ratio", r.certified_ratio},
          {"ceiling", r.ceiling},
          {"verdict", r.verdict},
          {"seed", seed},
          {"config", {{"full", to_json(cfg_full)}, {"min", to_json(cfg_min)}}},
          {"certificate", to_json(r.certificate)}};
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

inline std::string dump(const json& j) { return j.dump(2) + "\n"; }

/// Writes to a sibling temporary file, then renames over the target.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << text;
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace tensorpos::io
