#pragma once

// Command-line front end. Exit codes: 0 success, 1 failed mathematical check,
// 2 usage or parse error.

#include <algorithm>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tensorpos/tensorpos.hpp"

namespace tensorpos::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Bad flags or flag combinations detected after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

struct GlobalOptions {
  std::uint64_t seed = 0;
  double tol = 1e-9;
  std::string out;
  bool quiet = false;
  int cap_n = 8;
  int cap_k = 8;
};

namespace detail {

inline void emit(const GlobalOptions& g, const io::json& j, std::ostream& out) {
  if (g.out.empty()) {
    out << io::dump(j);
  } else {
    io::write_file_atomic(g.out, io::dump(j));
  }
}

inline void check_caps(const GlobalOptions& g, int n, int k) {
  if (n < 2) throw UsageError("n must be at least 2");
  if (k < 1) throw UsageError("k must be at least 1");
  if (n > g.cap_n) throw UsageError("n exceeds cap " + std::to_string(g.cap_n) + " (raise with --cap-n)");
  if (k > g.cap_k) throw UsageError("k exceeds cap " + std::to_string(g.cap_k) + " (raise with --cap-k)");
}

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << std::scientific << v;
  return s.str();
}

inline std::vector<std::filesystem::path> instance_files(const std::filesystem::path& p) {
  if (!std::filesystem::is_directory(p)) return {p};
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(p)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw UsageError("no .json instances in " + p.string());
  return files;
}

}  // namespace detail

struct GenOptions {
  int n = 2;
  int k = 1;
  double density = 1.0;
};

inline int cmd_gen(const GlobalOptions& g, const GenOptions& o, std::ostream& out, std::ostream&) {
  detail::check_caps(g, o.n, o.k);
  if (!(o.density > 0.0 && o.density <= 1.0)) throw UsageError("density must lie in (0, 1]");
  std::mt19937_64 rng(g.seed);
  detail::emit(g, io::to_json(random_span_element(o.n, o.k, o.density, rng)), out);
  return kExitOk;
}

struct DecomposeCmdOptions {
  std::string input;
  bool no_prune = false;
};

inline int cmd_decompose(const GlobalOptions& g, const DecomposeCmdOptions& o, std::ostream& out,
                         std::ostream& err) {
  const Triplet t = io::triplet_from_json(io::read_json_file(o.input));
  const TensorTriplet tt = decompose(t, {.prune = !o.no_prune});
  const auto dev = decomposition_deviation(associated_matrix(t), associated_matrix_lazy(tt));
  detail::emit(g, io::to_json(tt), out);
  if (!g.quiet) {
    err << "decompose: blocks=" << tt.blocks.size() << " offdiag_deviation=" << detail::fmt(dev.offdiag)
        << " diag_deviation=" << detail::fmt(dev.diag) << "\n";
  }
  return (dev.offdiag <= g.tol && dev.diag <= g.tol) ? kExitOk : kExitCheckFailed;
}

struct SearchOptions {
  std::string input;
  int restarts = 16;
  std::vector<int> dims;  // [full rep dim, min factor dim]
  int iters = 200;
  std::string mode = "full";
};

inline WitnessConfig search_config(const GlobalOptions& g, const SearchOptions& o, Mode mode) {
  WitnessConfig cfg = WitnessConfig::defaults(mode, g.seed);
  cfg.restarts = o.restarts;
  cfg.iters = o.iters;
  if (mode == Mode::full && !o.dims.empty()) cfg.rep_dim = o.dims[0];
  if (mode == Mode::min && o.dims.size() >= 2) cfg.rep_dim = o.dims[1];
  if (cfg.rep_dim < 1 || cfg.restarts < 1 || cfg.iters < 0) throw UsageError("invalid search configuration");
  return cfg;
}

inline int cmd_verify(const GlobalOptions& g, const SearchOptions& o, std::ostream& out, std::ostream& err) {
  const auto files = detail::instance_files(o.input);
  const WitnessConfig cfg_full = search_config(g, o, Mode::full);
  const WitnessConfig cfg_min = search_config(g, o, Mode::min);
  io::json reports = io::json::array();
  std::size_t passed = 0;
  for (const auto& file : files) {
    const SpanElement x = io::span_element_from_json(io::read_json_file(file));
    detail::check_caps(g, x.n(), x.k());
    const GapReport r = gap_report(x, cfg_full, cfg_min);
    if (r.verdict) ++passed;
    reports.push_back(io::report_json(x, r, g.seed, cfg_full, cfg_min));
    if (!g.quiet) {
      err << file.filename().string() << ": lb_full_sq=" << detail::fmt(r.lb_full_sq)
          << " lb_min_sq=" << detail::fmt(r.lb_min_sq) << " certified_min_lb_sq="
          << detail::fmt(r.certified_min_lb_sq) << " ratio=" << detail::fmt(r.ratio)
          << " ceiling=" << detail::fmt(r.ceiling) << " verdict=" << (r.verdict ? "true" : "false") << "\n";
    }
  }
  if (files.size() == 1 && !std::filesystem::is_directory(o.input)) {
    detail::emit(g, reports[0], out);
  } else {
    detail::emit(g, {{"reports", reports}, {"summary", {{"total", files.size()}, {"verdicts_true", passed}}}},
                 out);
  }
  if (!g.quiet) err << "verify: " << passed << "/" << files.size() << " verdicts true\n";
  return passed == files.size() ? kExitOk : kExitCheckFailed;
}

inline int cmd_estimate(const GlobalOptions& g, const SearchOptions& o, std::ostream& out, std::ostream& err) {
  const Mode mode = mode_from_string(o.mode);
  const SpanElement x = io::span_element_from_json(io::read_json_file(o.input));
  detail::check_caps(g, x.n(), x.k());
  SearchOptions so = o;
  if (mode == Mode::min && so.dims.size() == 1) so.dims = {0, so.dims[0]};
  const WitnessConfig cfg = search_config(g, so, mode);
  const NormEstimate e = estimate_lower_bound(x, cfg);
  detail::emit(g, {{"instance", io::to_json(x)}, {"config", io::to_json(cfg)}, {"estimate", io::to_json(e)}}, out);
  if (!g.quiet) err << "estimate(" << o.mode << "): value_sq=" << detail::fmt(e.value_sq) << "\n";
  return kExitOk;
}

struct ElementaryOptions {
  int n = 2;
  int k = 1;
  std::vector<int> pair;
  int eps = 0;
};

inline int cmd_elementary(const GlobalOptions& g, const ElementaryOptions& o, std::ostream& out,
                          std::ostream& err) {
  detail::check_caps(g, o.n, o.k);
  if (o.pair.size() != 2) throw UsageError("--pair takes two indices");
  const PairIndex pair{o.pair[0], o.pair[1]};
  if (!valid_pair(pair, o.n)) throw UsageError("--pair must satisfy 0 <= i0 < j0 <= 2n");
  if (o.eps < 0 || o.eps > 3) throw UsageError("--eps must be in 0..3 (eps = i^s)");
  const auto [t, block] = build_elementary(o.n, o.k, pair, o.eps);
  const AssociatedMatrix got = associated_matrix(t);
  const double dev = max_deviation(got, elementary_matrix(o.n, o.k, pair, o.eps));
  const bool self_check = verify_tensor_position(t, weighted_direct_sum(o.n, o.k, {block}), g.tol);
  io::json blk = io::to_json(TensorTriplet{o.n, o.k, o.n + 1, {block}})["blocks"][0];
  detail::emit(g,
               {{"triplet", io::to_json(t)},
                {"block", blk},
                {"associated_matrix", io::to_json(got)},
                {"max_deviation", dev},
                {"self_check", self_check}},
               out);
  if (!g.quiet) {
    err << "associated matrix (rows i*k+a):\n";
    for (Index r = 0; r < got.entries.rows(); ++r) {
      for (Index c = 0; c < got.entries.cols(); ++c) {
        const cplx z = got.entries(r, c);
        err << std::setw(8) << std::fixed << std::setprecision(3) << z.real() << (z.imag() < 0 ? "-" : "+")
            << std::abs(z.imag()) << "i";
      }
      err << "\n";
    }
    err << "elementary: max_deviation=" << detail::fmt(dev) << " self_check=" << (self_check ? "true" : "false")
        << "\n";
  }
  return (dev <= 1e-12 && self_check) ? kExitOk : kExitCheckFailed;
}

/// Entry point shared by the executable and the tests.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Tensor-position witnesses and min/max norm comparison on the free-group generator span"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalOptions g;
  app.add_option("--seed", g.seed, "RNG seed")->capture_default_str();
  app.add_option("--tol", g.tol, "Check tolerance")->capture_default_str();
  app.add_option("--out", g.out, "Output file (default: stdout)");
  app.add_flag("--quiet", g.quiet, "Suppress summaries on stderr");
  app.add_option("--cap-n", g.cap_n, "Largest accepted n")->capture_default_str();
  app.add_option("--cap-k", g.cap_k, "Largest accepted k")->capture_default_str();

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a random span element");
  gen_cmd->add_option("--n", gen.n, "Generators per factor")->required();
  gen_cmd->add_option("--k", gen.k, "Matrix size")->capture_default_str();
  gen_cmd->add_option("--density", gen.density, "Probability that a coefficient is nonzero")
      ->capture_default_str();

  DecomposeCmdOptions dec;
  auto* dec_cmd = app.add_subcommand("decompose", "Decompose a triplet into elementary tensor-position blocks");
  dec_cmd->add_option("input,--in", dec.input, "Triplet JSON")->required();
  dec_cmd->add_flag("--no-prune", dec.no_prune, "Keep zero-weight blocks");

  SearchOptions ver;
  auto* ver_cmd = app.add_subcommand("verify", "Estimate both norms and certify the comparison chain");
  ver_cmd->add_option("input,--in", ver.input, "Instance JSON or directory of instances")->required();
  ver_cmd->add_option("--restarts", ver.restarts)->capture_default_str();
  ver_cmd->add_option("--iters", ver.iters)->capture_default_str();
  ver_cmd->add_option("--dims", ver.dims, "Full rep dim [and min factor dim]")->expected(1, 2);

  SearchOptions est;
  auto* est_cmd = app.add_subcommand("estimate", "Witness lower bound for one norm");
  est_cmd->add_option("input,--in", est.input, "Instance JSON")->required();
  est_cmd->add_option("--mode", est.mode, "full or min")->check(CLI::IsMember({"full", "min"}))
      ->capture_default_str();
  est_cmd->add_option("--restarts", est.restarts)->capture_default_str();
  est_cmd->add_option("--iters", est.iters)->capture_default_str();
  est_cmd->add_option("--dims", est.dims, "Rep dim (full) or factor dim (min)")->expected(1);

  ElementaryOptions el;
  auto* el_cmd = app.add_subcommand("elementary", "Build an elementary tensor-position triplet");
  el_cmd->add_option("--n", el.n)->required();
  el_cmd->add_option("--k", el.k)->capture_default_str();
  el_cmd->add_option("--pair", el.pair, "i0 j0")->expected(2)->required();
  el_cmd->add_option("--eps", el.eps, "s with eps = i^s")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (gen_cmd->parsed()) return cmd_gen(g, gen, out, err);
    if (dec_cmd->parsed()) return cmd_decompose(g, dec, out, err);
    if (ver_cmd->parsed()) return cmd_verify(g, ver, out, err);
    if (est_cmd->parsed()) return cmd_estimate(g, est, out, err);
    if (el_cmd->parsed()) return cmd_elementary(g, el, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const io::ParseError& e) {
    err << "parse error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ArgumentError& e) {
    err << "argument error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitCheckFailed;
  }
  return kExitUsage;
}

}  // namespace tensorpos::cli
