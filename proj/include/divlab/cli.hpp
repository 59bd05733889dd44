#pragma once

// Command-line front end. run() is the whole program; tools/divlab.cpp
// only forwards argv. Exit codes: 0 ok, 2 bad flags, 3 domain, 4 I/O.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "divlab/arith_core.hpp"
#include "divlab/error_terms.hpp"
#include "divlab/errors.hpp"
#include "divlab/moment_engine.hpp"
#include "divlab/report.hpp"
#include "divlab/residue_poly.hpp"
#include "divlab/voronoi.hpp"
#include "divlab/zeta_line.hpp"

namespace divlab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFlags = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitIo = 4;

inline constexpr const char* kCacheEnv = "DIVLAB_CACHE_DIR";

struct RunConfig {
  std::string command;
  int k = 2;
  double x_min = 1e4;
  double x_max = 1e6;
  std::size_t N = 100;
  double T = 1e4;
  double sigma = 0.75;
  bool dyadic = false;
  std::string out = "csv";
  std::string output;  // file, empty = stdout
  std::string cache_dir;
  unsigned threads = default_threads();
  double constant_c = 1.0;
  std::string kind = "delta2";
  std::string f = "delta2";
  std::string g = "delta3";
  std::string input;
  bool scan = false;
  bool fourth = false;
};

/// Caches keyed by what they contain; a larger cached table serves any
/// smaller request.
class CacheStore {
 public:
  CacheStore(std::filesystem::path dir, unsigned threads) : dir_(std::move(dir)), threads_(threads) {}

  const StieltjesSet& constants() {
    if (!constants_) {
      const auto path = dir_ / "constants.txt";
      if (std::filesystem::exists(path)) {
        constants_ = load_constants(path);
      } else {
        constants_ = compute_stieltjes_set();
        ensure_dir();
        store_constants(*constants_, path);
      }
    }
    return *constants_;
  }

  const DivisorTable& table(int k, std::uint64_t limit) {
    auto it = tables_.find(k);
    if (it != tables_.end() && it->second->limit() >= limit) return *it->second;
    std::shared_ptr<DivisorTable> t;
    if (std::filesystem::exists(dir_)) {
      for (const auto& e : std::filesystem::directory_iterator(dir_)) {
        const auto name = e.path().filename().string();
        const std::string prefix = "d" + std::to_string(k) + "_";
        if (name.rfind(prefix, 0) != 0 || e.path().extension() != ".dkt") continue;
        const auto have = std::stoull(name.substr(prefix.size()));
        if (have >= limit) {
          t = std::make_shared<DivisorTable>(load_table(e.path()));
          break;
        }
      }
    }
    if (!t) {
      t = std::make_shared<DivisorTable>(sieve_dk(k, limit));
      ensure_dir();
      store_table(*t, dir_ / ("d" + std::to_string(k) + "_" + std::to_string(limit) + ".dkt"));
    }
    tables_[k] = t;
    keep_.push_back(t);  // earlier references stay valid when a larger table replaces one
    return *t;
  }

  std::shared_ptr<const CumulativeZetaTable> zeta(double t_max) {
    if (zeta_ && zeta_->t_max >= t_max) return zeta_;
    std::ostringstream name;
    name << "zeta_" << static_cast<std::uint64_t>(std::ceil(t_max)) << ".ezt";
    const auto path = dir_ / name.str();
    const double top = std::ceil(t_max);
    if (std::filesystem::exists(path)) {
      zeta_ = std::make_shared<const CumulativeZetaTable>(load_zeta_table(path));
    } else {
      zeta_ = std::make_shared<const CumulativeZetaTable>(build_cumulative(top, ZetaLineConfig{}, threads_));
      ensure_dir();
      store_zeta_table(*zeta_, path);
    }
    return zeta_;
  }

 private:
  void ensure_dir() {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw IoError("cannot create cache directory " + dir_.string());
  }

  std::filesystem::path dir_;
  unsigned threads_;
  std::optional<StieltjesSet> constants_;
  std::map<int, std::shared_ptr<DivisorTable>> tables_;
  std::vector<std::shared_ptr<DivisorTable>> keep_;
  std::shared_ptr<const CumulativeZetaTable> zeta_;
};

namespace detail {

// Handle plus the objects it borrows.
struct BuiltHandle {
  ErrorTermHandle handle;
  double exponent = 1.0;
  std::optional<double> constant;
};

inline BuiltHandle build_handle(const std::string& kind, double x_top, CacheStore& cache) {
  const auto& g = cache.constants();
  const auto top = static_cast<std::uint64_t>(std::ceil(x_top)) + 1;
  BuiltHandle b;
  if (kind == "delta2" || kind == "delta3" || kind == "delta4") {
    const int k = kind.back() - '0';
    b.handle = make_delta_handle(cache.table(k, top), main_term_poly(k, g));
    b.exponent = k == 2   ? reference_exponent::kDeltaMeanSquare
                 : k == 3 ? reference_exponent::kDelta3MeanSquare
                          : reference_exponent::kDelta4MeanSquare;
    if (k <= 3) b.constant = series_constant_A(k).value;
  } else if (kind == "delta_star") {
    b.handle = make_delta_star_handle(cache.table(2, 4 * top), main_term_poly(2, g));
    b.exponent = reference_exponent::kDeltaMeanSquare;
  } else if (kind == "E") {
    b.handle = make_e_handle(cache.zeta(x_top));
    b.exponent = reference_exponent::kDeltaMeanSquare;
  } else if (kind == "E_star") {
    const auto dlimit = static_cast<std::uint64_t>(std::ceil(4 * x_top / (2 * std::numbers::pi))) + 1;
    b.handle = make_e_star_handle(cache.zeta(x_top), cache.table(2, dlimit));
    b.exponent = reference_exponent::kEStarMeanSquare;
  } else {
    throw ArgumentError("unknown kind '" + kind + "' (delta2, delta3, delta4, delta_star, E, E_star)");
  }
  return b;
}

inline std::vector<double> sample_points(const RunConfig& c) {
  if (c.dyadic) return dyadic_grid(c.x_min, c.x_max);
  return {c.x_max};
}

class Output {
 public:
  explicit Output(const std::string& path, std::ostream& fallback) : out_(&fallback) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw IoError("cannot open " + path + " for writing");
      out_ = &file_;
    }
  }
  std::ostream& stream() { return *out_; }
  void finish() {
    out_->flush();
    if (!*out_) throw IoError("write failed");
  }

 private:
  std::ofstream file_;
  std::ostream* out_;
};

inline std::filesystem::path resolve_cache_dir(const RunConfig& c) {
  if (!c.cache_dir.empty()) return c.cache_dir;
  if (const char* env = std::getenv(kCacheEnv); env && *env) return env;
  return ".divlab-cache";
}

inline void write_rows(std::ostream& out, const std::string& header,
                       const std::vector<std::vector<double>>& rows) {
  out << header << '\n';
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << fmt_double(r[i]);
    out << '\n';
  }
}

// Individual commands ---------------------------------------------------------

inline void cmd_sieve(const RunConfig& c, CacheStore& cache, std::ostream& out) {
  const auto limit = static_cast<std::uint64_t>(c.x_max);
  const auto& t = cache.table(c.k, limit);
  out << "k=" << t.k() << " limit=" << t.limit() << " summatory=" << t.summatory_index(limit) << '\n';
}

inline void cmd_delta(const RunConfig& c, CacheStore& cache, std::ostream& out) {
  if (c.scan) {
    const auto b = build_handle(c.kind, c.x_max, cache);
    const double exponent = b.handle.kind == TermKind::DeltaK ? (b.handle.k - 1.0) / b.handle.k : 0.5;
    const auto windows = sign_change_scan(b.handle, c.x_min, c.x_max, exponent, c.constant_c);
    out << "lo,hi,t1,v1,t2,v2\n";
    for (const auto& w : windows) {
      out << fmt_double(w.lo) << ',' << fmt_double(w.hi);
      if (w.pair) {
        out << ',' << fmt_double(w.pair->t1) << ',' << fmt_double(w.pair->v1) << ',' << fmt_double(w.pair->t2) << ','
            << fmt_double(w.pair->v2) << '\n';
      } else {
        out << ",,,,\n";
      }
    }
    return;
  }
  const auto xs = sample_points(c);
  const auto b = build_handle(c.kind, xs.back(), cache);
  std::vector<std::vector<double>> rows;
  for (double x : xs) rows.push_back({x, b.handle(x)});
  write_rows(out, "x," + c.kind, rows);
}

inline void cmd_voronoi(const RunConfig& c, CacheStore& cache, std::ostream& out) {
  const auto xs = sample_points(c);
  const auto limit = static_cast<std::uint64_t>(std::ceil(2 * xs.back())) + 1;
  const auto& t = cache.table(2, std::max<std::uint64_t>(limit, c.N));
  const auto p = make_voronoi_params(t, c.N);
  VoronoiOptions opts;
  opts.threads = c.threads;
  std::vector<std::vector<double>> rows;
  for (double X : xs) {
    const double v = remainder_mean_square(p, X, opts);
    const double scale = remainder_scale(X, static_cast<double>(c.N));
    rows.push_back({X, static_cast<double>(c.N), v, scale, v / scale});
  }
  write_rows(out, "X,N,remainder_mean_square,scale,ratio", rows);
}

inline void cmd_moment(const RunConfig& c, CacheStore& cache, std::ostream& out) {
  const auto xs = sample_points(c);
  const auto b = build_handle(c.kind, xs.back(), cache);
  MomentOptions opts;
  opts.threads = c.threads;
  const auto r = mean_square_report(b.handle, xs, b.exponent, b.constant, opts);
  emit_report(r, parse_format(c.out), out);
}

inline void cmd_correlate(const RunConfig& c, CacheStore& cache, std::ostream& out) {
  const auto xs = sample_points(c);
  const auto f = build_handle(c.f, xs.back(), cache);
  const auto g = build_handle(c.g, xs.back(), cache);
  MomentOptions opts;
  opts.threads = c.threads;
  double exponent = 0.5 * (f.exponent + g.exponent);  // Cauchy-Schwarz ceiling
  std::vector<double> guides{exponent};
  auto has = [&](const char* a, const char* b) {
    return (c.f == a && c.g == b) || (c.f == b && c.g == a);
  };
  if (has("delta2", "delta3")) {
    exponent = reference_exponent::kCrossCauchySchwarz;
    guides = {reference_exponent::kCrossDeltaDelta3, reference_exponent::kCrossCauchySchwarz};
  } else if (has("delta2", "delta4")) {
    exponent = reference_exponent::kCrossDelta4CauchySchwarz;
    guides = {reference_exponent::kCrossDeltaDelta4, reference_exponent::kCrossDelta4CauchySchwarz};
  } else if (has("E", "delta3")) {
    exponent = 1.5;
    guides = {1.5};
  }
  const auto r = cross_report(f.handle, g.handle, xs, exponent, guides, opts);
  emit_report(r, parse_format(c.out), out);
}

inline void cmd_zeta(const RunConfig& c, std::ostream& out) {
  if (c.fourth) {
    const double T = c.T;
    const double v = fourth_moment(c.sigma, T, ZetaLineConfig{}, c.threads);
    const long double z2 = zeta_real(2 * c.sigma), z4 = zeta_real(4 * c.sigma);
    out << "sigma,T,fourth_moment,value_over_T,zeta2_ratio,zeta4_ratio\n";
    out << fmt_double(c.sigma) << ',' << fmt_double(T) << ',' << fmt_double(v) << ',' << fmt_double(v / T) << ','
        << fmt_double(static_cast<double>(z2 * z2 / z4)) << ',' << fmt_double(static_cast<double>(z2 * z2 * z2 * z2 / z4))
        << '\n';
    return;
  }
  const cplx z = zeta_eval(c.sigma, c.T);
  out << "sigma,t,re,im,abs,functional_equation_residual\n";
  out << fmt_double(c.sigma) << ',' << fmt_double(c.T) << ',' << fmt_double(z.real()) << ',' << fmt_double(z.imag())
      << ',' << fmt_double(std::abs(z)) << ',' << fmt_double(functional_equation_residual(cplx(c.sigma, c.T)))
      << '\n';
}

inline void cmd_estar(const RunConfig& c, CacheStore& cache, std::ostream& out) {
  if (!c.dyadic) {
    const auto tab = cache.zeta(c.T);
    const auto dlimit = static_cast<std::uint64_t>(std::ceil(4 * c.T / (2 * std::numbers::pi))) + 1;
    const auto& d = cache.table(2, dlimit);
    const double e = e_of_x(*tab, c.T);
    const double ds = delta_star(d, c.T / (2 * std::numbers::pi));
    out << "t,E,delta_star,E_star\n";
    out << fmt_double(c.T) << ',' << fmt_double(e) << ',' << fmt_double(ds) << ','
        << fmt_double(e - 2 * std::numbers::pi * ds) << '\n';
    return;
  }
  RunConfig m = c;
  m.kind = "E_star";
  cmd_moment(m, cache, out);
}

inline void cmd_report(const RunConfig& c, std::ostream& out) {
  if (c.input.empty()) throw ArgumentError("report needs --in");
  emit_report(load_report(c.input), parse_format(c.out), out);
}

}  // namespace detail

/// Parses argv, runs the command, maps failures to exit codes.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig c;
  CLI::App app{"Numerical laboratory for divisor-problem error terms and zeta moments", "divlab"};
  app.require_subcommand(1);
  auto common = [&](CLI::App* s) {
    s->add_option("--k", c.k, "divisor order")->check(CLI::Range(1, 4));
    s->add_option("--Xmin", c.x_min, "smallest sample point");
    s->add_option("--Xmax", c.x_max, "largest sample point (sieve limit for 'sieve')");
    s->add_option("--N", c.N, "Voronoi truncation");
    s->add_option("--T", c.T, "height on the critical line / fourth-moment range");
    s->add_option("--sigma", c.sigma, "real part");
    s->add_flag("--dyadic", c.dyadic, "sample X in {Xmin * 2^j} up to Xmax");
    s->add_option("--out", c.out, "output format")->check(CLI::IsMember({"csv", "json", "svg"}));
    s->add_option("-o,--output", c.output, "output file (default stdout)");
    s->add_option("--cache-dir", c.cache_dir, std::string("cache directory (env ") + kCacheEnv + ")");
    s->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    s->add_option("--constant-C", c.constant_c, "window constant for sign scans")->check(CLI::PositiveNumber);
  };
  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {{"sieve", "build and cache d_k"},
                      {"delta", "evaluate an error term or scan its sign changes"},
                      {"voronoi", "mean square of the truncated Voronoi remainder over [X, 2X]"},
                      {"moment", "mean square report"},
                      {"correlate", "cross-correlation report"},
                      {"zeta", "zeta(sigma + iT) or the fourth moment"},
                      {"estar", "E, Delta* and E* values or the E* mean square"},
                      {"report", "re-emit a saved report"}};
  for (const auto& s : subs) {
    auto* sc = app.add_subcommand(s.name, s.help);
    common(sc);
    const std::string n = s.name;
    if (n == "delta" || n == "moment") sc->add_option("--kind", c.kind, "delta2|delta3|delta4|delta_star|E|E_star");
    if (n == "delta") sc->add_flag("--scan", c.scan, "sign-change scan over [Xmin, Xmax]");
    if (n == "correlate") {
      sc->add_option("--f", c.f, "first error term");
      sc->add_option("--g", c.g, "second error term");
    }
    if (n == "zeta") sc->add_flag("--fourth", c.fourth, "integral of |zeta|^4 over [1, T]");
    if (n == "report") sc->add_option("--in", c.input, "saved report (.json or .csv)")->required();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "divlab: " << e.what() << '\n' << app.help();
    return kExitFlags;
  }
  c.command = app.get_subcommands().front()->get_name();

  try {
    if (c.dyadic && !(c.x_min > 0 && c.x_min <= c.x_max)) throw ArgumentError("--dyadic needs 0 < Xmin <= Xmax");
    CacheStore cache(detail::resolve_cache_dir(c), c.threads);
    detail::Output o(c.output, out);
    auto& s = o.stream();
    if (c.command == "sieve") detail::cmd_sieve(c, cache, s);
    else if (c.command == "delta") detail::cmd_delta(c, cache, s);
    else if (c.command == "voronoi") detail::cmd_voronoi(c, cache, s);
    else if (c.command == "moment") detail::cmd_moment(c, cache, s);
    else if (c.command == "correlate") detail::cmd_correlate(c, cache, s);
    else if (c.command == "zeta") detail::cmd_zeta(c, s);
    else if (c.command == "estar") detail::cmd_estar(c, cache, s);
    else if (c.command == "report") detail::cmd_report(c, s);
    o.finish();
  } catch (const IoError& e) {
    err << "divlab: " << e.what() << '\n';
    return kExitIo;
  } catch (const FormatError& e) {
    err << "divlab: " << e.what() << '\n';
    return kExitIo;
  } catch (const VersionError& e) {
    err << "divlab: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "divlab: " << e.what() << '\n';
    return kExitIo;
  } catch (const Error& e) {
    err << "divlab: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitOk;
}

}  // namespace divlab
