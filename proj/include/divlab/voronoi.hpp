#pragma once

// Truncated Voronoi expansion of the classical divisor problem:
//   Delta(x) = (pi sqrt 2)^{-1} x^{1/4} sum_{n<=N} d(n) n^{-3/4} cos(4 pi sqrt(nx) - pi/4) + R(x, N).
// The remainder is obtained by subtraction from the exact Delta.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "divlab/arith_core.hpp"
#include "divlab/error_terms.hpp"
#include "divlab/errors.hpp"
#include "divlab/numeric.hpp"
#include "divlab/residue_poly.hpp"

namespace divlab {

struct VoronoiParams {
  std::size_t N = 0;
  std::vector<double> weights;  // d(n) n^{-3/4}, index n-1
  std::vector<double> root;     // sqrt(n), index n-1
  const DivisorTable* table = nullptr;
  MainTermPoly p1;
};

/// Weights for n <= N taken from a k = 2 table (which also supplies the
/// exact Delta for remainders).
[[nodiscard]] inline VoronoiParams make_voronoi_params(const DivisorTable& table, std::size_t N) {
  if (table.k() != 2) throw ArgumentError("voronoi: needs a k = 2 divisor table");
  if (N > table.limit()) throw RangeError("voronoi: N exceeds the divisor table");
  VoronoiParams p;
  p.N = N;
  p.table = &table;
  p.p1 = main_term_poly(2);
  p.weights.resize(N);
  p.root.resize(N);
  for (std::size_t n = 1; n <= N; ++n) {
    const double nd = static_cast<double>(n);
    p.weights[n - 1] = table[n] * std::pow(nd, -0.75);
    p.root[n - 1] = std::sqrt(nd);
  }
  return p;
}

namespace detail {

inline constexpr double kVoronoiScale = 1.0 / (std::numbers::pi * std::numbers::sqrt2);

/// Partial sums of the cosine series at each requested truncation (sorted,
/// all <= p.N); returns them already scaled by (pi sqrt 2)^{-1} x^{1/4}.
inline void voronoi_partials(const VoronoiParams& p, double x, const std::vector<std::size_t>& ns, double* out) {
  const double sx = std::sqrt(x);
  const double pref = kVoronoiScale * std::sqrt(sx);
  constexpr double kQuarterPi = std::numbers::pi / 4.0;
  constexpr double kFourPi = 4.0 * std::numbers::pi;
  CompensatedSum<double> acc;
  std::size_t n = 0;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (; n < ns[i]; ++n) acc.add(p.weights[n] * std::cos(kFourPi * p.root[n] * sx - kQuarterPi));
    out[i] = pref * acc.value();
  }
}

}  // namespace detail

/// (pi sqrt 2)^{-1} x^{1/4} sum_{n<=N} d(n) n^{-3/4} cos(4 pi sqrt(nx) - pi/4).
[[nodiscard]] inline double voronoi_sum(const VoronoiParams& p, double x) {
  if (!(x >= 0)) throw RangeError("voronoi_sum: x must be nonnegative");
  if (p.N == 0) return 0.0;
  double v;
  detail::voronoi_partials(p, x, {p.N}, &v);
  return v;
}

/// Delta(x) - voronoi_sum(p, x).
[[nodiscard]] inline double voronoi_remainder(const VoronoiParams& p, double x) {
  return delta_k(*p.table, p.p1, x) - voronoi_sum(p, x);
}

struct VoronoiOptions {
  unsigned threads = default_threads();
  // The truncation needs N small against X; enforced as N <= max_n_ratio * X.
  double max_n_ratio = 1.0;
};

/// integral_X^{2X} R(x, N)^2 dx for every N in `ns` (each <= p.N) in one
/// pass. Gauss-Legendre (16 points) on panels of width
/// min(1, sqrt(x/N_max)/4), a quarter period of the fastest cosine;
/// panels never straddle an integer so Delta is smooth on each.
[[nodiscard]] inline std::vector<double> remainder_mean_square_batch(const VoronoiParams& p, double X,
                                                                     std::vector<std::size_t> ns,
                                                                     const VoronoiOptions& opts = {}) {
  if (ns.empty()) return {};
  std::sort(ns.begin(), ns.end());
  if (ns.front() == 0 || ns.back() > p.N) throw ArgumentError("remainder_mean_square: N must lie in [1, params.N]");
  if (!(X >= 1)) throw ArgumentError("remainder_mean_square: X must be >= 1");
  if (static_cast<double>(ns.back()) > opts.max_n_ratio * X) {
    throw ArgumentError("remainder_mean_square: N too large for X (hypothesis N << X)");
  }
  if (2 * X > static_cast<double>(p.table->limit())) throw ArgumentError("remainder_mean_square: 2X beyond table");
  const double nmax = static_cast<double>(ns.back());

  // Unit intervals [m, m+1) clipped to [X, 2X], processed in fixed blocks.
  const double lo = X, hi = 2 * X;
  const auto first = static_cast<std::uint64_t>(std::floor(lo));
  const auto last = static_cast<std::uint64_t>(std::ceil(hi));
  const std::uint64_t units = last - first;
  constexpr std::uint64_t kBlock = 512;
  const std::size_t blocks = static_cast<std::size_t>((units + kBlock - 1) / kBlock);
  const std::size_t nn = ns.size();
  std::vector<double> partial(blocks * nn, 0.0);
  const auto& rule = gauss_legendre<16>();
  const DivisorTable& table = *p.table;

  parallel_blocks(blocks, opts.threads, [&](std::size_t blk) {
    std::vector<CompensatedSum<double>> acc(nn);
    std::vector<double> vs(nn);
    const std::uint64_t u0 = first + blk * kBlock;
    const std::uint64_t u1 = std::min<std::uint64_t>(u0 + kBlock, last);
    for (std::uint64_t m = u0; m < u1; ++m) {
      const double a = std::max(lo, static_cast<double>(m));
      const double b = std::min(hi, static_cast<double>(m + 1));
      if (!(b > a)) continue;
      const double S = static_cast<double>(table.summatory_index(m));
      const double width = std::min(1.0, 0.25 * std::sqrt(a / nmax));
      const int panels = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
      const double h = (b - a) / panels;
      for (int q = 0; q < panels; ++q) {
        const double pa = a + q * h;
        const double half = 0.5 * h, mid = pa + half;
        std::vector<double> panel(nn, 0.0);
        for (int i = 0; i < 16; ++i) {
          const double x = mid + half * rule.nodes[i];
          const auto [mh, ml] = main_term_dd(p.p1.coeffs, x);
          const double delta = (S - mh) - ml;
          detail::voronoi_partials(p, x, ns, vs.data());
          for (std::size_t j = 0; j < nn; ++j) {
            const double r = delta - vs[j];
            panel[j] += rule.weights[i] * r * r;
          }
        }
        for (std::size_t j = 0; j < nn; ++j) acc[j].add(panel[j] * half);
      }
    }
    for (std::size_t j = 0; j < nn; ++j) partial[blk * nn + j] = acc[j].value();
  });

  std::vector<double> out(nn);
  for (std::size_t j = 0; j < nn; ++j) {
    CompensatedSum<double> s;
    for (std::size_t blk = 0; blk < blocks; ++blk) s.add(partial[blk * nn + j]);
    out[j] = s.value();
  }
  return out;
}

/// integral_X^{2X} R(x, p.N)^2 dx.
[[nodiscard]] inline double remainder_mean_square(const VoronoiParams& p, double X, const VoronoiOptions& opts = {}) {
  return remainder_mean_square_batch(p, X, {p.N}, opts).front();
}

/// Engineering ceiling X^{3/2} N^{-1/2} log^3 X for the remainder mean square.
[[nodiscard]] inline double remainder_scale(double X, double N) {
  const double L = std::log(X);
  return std::pow(X, 1.5) / std::sqrt(N) * L * L * L;
}

}  // namespace divlab
