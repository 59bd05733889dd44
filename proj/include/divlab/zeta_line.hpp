#pragma once

// zeta(sigma + it) by Euler-Maclaurin (any sigma) and Riemann-Siegel
// (sigma = 1/2), the cumulative mean-square table behind E(t), Jutila's
// E*(t), and the fourth moment at fixed sigma.

#include <array>
#include <cmath>
#include <complex>
#include <memory>
#include <numbers>
#include <vector>

#include "divlab/arith_core.hpp"
#include "divlab/error_terms.hpp"
#include "divlab/errors.hpp"
#include "divlab/numeric.hpp"
#include "divlab/residue_poly.hpp"
#include "divlab/zeta_table.hpp"

namespace divlab {

using cplx = std::complex<double>;

namespace detail {

// Taylor coefficients of the Riemann-Siegel kernel
//   Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)
// in z = p - 1/2; entry i multiplies z^(2i). Generated by tools/gen_rs_psi.py.
inline constexpr std::array<double, 42> kPsiEven = {
    3.8268343236508977173e-1,   1.7489618723100817974,      2.1180252076854963732,
    -8.7072166705114807392e-1,  -3.4733112243465167073,     -1.6626947308999324496,
    1.2167312889192321345,      1.3014304161007975773,      3.0511021827361672421e-2,
    -3.7558030515450952428e-1,  -1.0857844165640659744e-1,  5.1832902999549623376e-2,
    2.999948061990227592e-2,    -2.275939670612564226e-3,   -4.3826474165803383059e-3,
    -4.0642301837298469931e-4,  4.0060977854221139279e-4,   8.9710579913888412978e-5,
    -2.3025650027239107116e-5,  -9.3800066019067924847e-6,  6.3235149476091075042e-7,
    6.5510228192315016662e-7,   2.2105237455526972587e-8,   -3.322316176445628835e-8,
    -3.7349109899336560818e-9,  1.2445067060797739195e-9,   2.4768205376502191843e-10,
    -3.2842728168916271945e-11, -1.1305406852298403678e-11, 4.5654639795886939276e-13,
    3.9598480945249215196e-13,  7.8495662212596173171e-15,  -1.1059043150991233194e-14,
    -7.7385439876415083171e-16, 2.4857755550271372185e-16,  3.051479718882721791e-17,
    -4.4142978877933028452e-18, -8.6313888781884147393e-19, 5.7012921968429752176e-20,
    1.9529640164199341077e-20,  -3.3707667135349602181e-22, -3.679459871576221269e-22,
};

/// m-th derivative of Psi at p = 1/2 + z.
inline double psi_derivative(int m, double z) {
  double acc = 0.0;
  double zp = 1.0;  // z^(j - m)
  // Walk powers j >= m; only even j carry coefficients.
  std::array<double, 2 * kPsiEven.size()> powers{};
  for (std::size_t j = 0; j < powers.size(); ++j) {
    powers[j] = zp;
    zp *= z;
  }
  for (std::size_t i = 0; i < kPsiEven.size(); ++i) {
    const int j = static_cast<int>(2 * i);
    if (j < m) continue;
    double falling = 1.0;
    for (int r = 0; r < m; ++r) falling *= (j - r);
    acc += kPsiEven[i] * falling * powers[static_cast<std::size_t>(j - m)];
  }
  return acc;
}

inline long double log_table(std::size_t n) {
  static const std::vector<long double> table = [] {
    std::vector<long double> t(4097);
    for (std::size_t i = 1; i < t.size(); ++i) t[i] = std::log(static_cast<long double>(i));
    return t;
  }();
  return n < table.size() ? table[n] : std::log(static_cast<long double>(n));
}

}  // namespace detail

/// Riemann-Siegel theta function by its Stirling expansion (t >= 10).
[[nodiscard]] inline long double riemann_siegel_theta(long double t) {
  constexpr long double pi = std::numbers::pi_v<long double>;
  const long double t2 = t * t;
  return t / 2 * std::log(t / (2 * pi)) - t / 2 - pi / 8 + 1 / (48 * t) + 7 / (5760 * t * t2) +
         31 / (80640 * t * t2 * t2) + 127 / (430080 * t * t2 * t2 * t2);
}

/// Hardy's Z(t) by the Riemann-Siegel formula with corrections C_0..C_order.
[[nodiscard]] inline double hardy_z_rs(double t, int order = 4) {
  constexpr long double two_pi = 2 * std::numbers::pi_v<long double>;
  constexpr double pi = std::numbers::pi;
  if (t < 10.0) throw RangeError("Riemann-Siegel formula needs t >= 10");
  const long double a = std::sqrt(static_cast<long double>(t) / two_pi);
  const auto n_terms = static_cast<std::size_t>(std::floor(a));
  const double p = static_cast<double>(a - static_cast<long double>(n_terms));
  const long double theta = riemann_siegel_theta(t);
  double sum = 0.0;
  for (std::size_t n = 1; n <= n_terms; ++n) {
    long double phase = theta - static_cast<long double>(t) * detail::log_table(n);
    phase = std::remainder(phase, two_pi);
    sum += std::cos(static_cast<double>(phase)) / std::sqrt(static_cast<double>(n));
  }
  sum *= 2.0;

  const double z = p - 0.5;
  auto d = [z](int m) { return detail::psi_derivative(m, z); };
  const double pi2 = pi * pi, pi4 = pi2 * pi2, pi6 = pi4 * pi2, pi8 = pi4 * pi4;
  const double ad = static_cast<double>(a);
  double corr = d(0);
  if (order >= 1) corr += (-d(3) / (96 * pi2)) / ad;
  if (order >= 2) corr += (d(2) / (64 * pi2) + d(6) / (18432 * pi4)) / (ad * ad);
  if (order >= 3) corr += (-d(1) / (64 * pi2) - d(5) / (3840 * pi4) - d(9) / (5308416 * pi6)) / (ad * ad * ad);
  if (order >= 4) {
    corr += (d(0) / (128 * pi2) + 19 * d(4) / (24576 * pi4) + 11 * d(8) / (5898240 * pi6) +
             d(12) / (2038431744 * pi8)) /
            (ad * ad * ad * ad);
  }
  const double sign = (n_terms % 2 == 1) ? 1.0 : -1.0;  // (-1)^(N-1)
  return sum + sign * corr / std::sqrt(ad);
}

/// zeta(s) by Euler-Maclaurin with n_terms - 1 explicit terms and
/// `bernoulli` correction terms. Valid for any s != 1.
[[nodiscard]] inline cplx zeta_em(cplx s, std::size_t n_terms, int bernoulli) {
  const double sigma = s.real(), t = s.imag();
  CompensatedSum<double> re, im;
  for (std::size_t n = 1; n < n_terms; ++n) {
    const double ln = std::log(static_cast<double>(n));
    const double mag = std::exp(-sigma * ln);
    re.add(mag * std::cos(t * ln));
    im.add(-mag * std::sin(t * ln));
  }
  cplx acc(re.value(), im.value());
  const double N = static_cast<double>(n_terms);
  const cplx n_pow = std::exp(-s * std::log(N));  // N^{-s}
  acc += N * n_pow / (s - 1.0) + 0.5 * n_pow;
  cplx rising = s;            // s (s+1) ... (s + 2j - 2)
  cplx npow = n_pow / N;      // N^{-s-2j+1}
  for (int j = 1; j <= bernoulli; ++j) {
    const double coef = static_cast<double>(detail::kBernoulliEven[static_cast<std::size_t>(j - 1)] /
                                            detail::factorial_ld(2 * j));
    acc += coef * rising * npow;
    rising *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
    npow /= N * N;
  }
  return acc;
}

[[nodiscard]] inline std::size_t em_terms(double t, const ZetaLineConfig& cfg) {
  return static_cast<std::size_t>(std::ceil(std::max(10.0, cfg.em_factor * std::abs(t))));
}

/// zeta(sigma + it) for sigma in [1/2, 1].
[[nodiscard]] inline cplx zeta_eval(double sigma, double t, const ZetaLineConfig& cfg = {}) {
  if (!(sigma >= 0.5 && sigma <= 1.0)) throw RangeError("zeta_eval: sigma must lie in [1/2, 1]");
  const bool critical = sigma == 0.5;
  const double max_t = critical ? cfg.max_t_critical : cfg.max_t_off_line;
  if (std::abs(t) > max_t) throw RangeError("zeta_eval: |t| beyond configured maximum");
  if (sigma == 1.0 && t == 0.0) throw RangeError("zeta_eval: pole at s = 1");
  const bool use_rs = critical && cfg.method != ZetaMethod::EulerMaclaurin &&
                      (cfg.method == ZetaMethod::RiemannSiegel || std::abs(t) >= cfg.rs_min_t);
  if (use_rs) {
    const double at = std::abs(t);
    const double z = hardy_z_rs(at, cfg.rs_correction_order);
    const auto theta = static_cast<double>(std::remainder(riemann_siegel_theta(at), 2 * std::numbers::pi_v<long double>));
    const cplx v = z * std::polar(1.0, -theta);
    return t >= 0 ? v : std::conj(v);
  }
  return zeta_em({sigma, t}, em_terms(t, cfg), cfg.em_bernoulli);
}

/// |zeta(1/2 + it)|^2, using Z(t)^2 on the Riemann-Siegel range.
[[nodiscard]] inline double zeta_abs2_critical(double t, const ZetaLineConfig& cfg = {}) {
  if (cfg.method != ZetaMethod::EulerMaclaurin && std::abs(t) >= cfg.rs_min_t) {
    if (std::abs(t) > cfg.max_t_critical) throw RangeError("zeta_abs2_critical: |t| beyond configured maximum");
    const double z = hardy_z_rs(std::abs(t), cfg.rs_correction_order);
    return z * z;
  }
  return std::norm(zeta_eval(0.5, t, cfg));
}

// ---------------------------------------------------------------------------
// Gamma factor of the functional equation
// ---------------------------------------------------------------------------

/// log Gamma(z) by Lanczos (g = 7, n = 9) with reflection for Re z < 1/2.
/// The imaginary part is only determined modulo 2 pi.
[[nodiscard]] inline cplx log_gamma(cplx z) {
  constexpr double pi = std::numbers::pi;
  if (z.real() < 0.5) {
    // log sin(pi z) written to stay finite for large |Im z|.
    const cplx iz = cplx(0, 1) * pi * z;
    cplx log_sin;
    if (z.imag() >= 0) {
      log_sin = -iz + std::log(std::exp(2.0 * iz) - 1.0) - std::log(cplx(0, 2));
    } else {
      log_sin = iz + std::log(std::exp(-2.0 * iz) - 1.0) - std::log(cplx(0, 2)) - cplx(0, pi);
    }
    return std::log(pi) - log_sin - log_gamma(1.0 - z);
  }
  static constexpr std::array<double, 9> c = {
      0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
      771.32342877765313,   -176.61502916214059,   12.507343278686905,
      -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};
  const cplx zz = z - 1.0;
  cplx x = c[0];
  for (std::size_t i = 1; i < c.size(); ++i) x += c[i] / (zz + static_cast<double>(i));
  const cplx tt = zz + 7.5;
  return 0.5 * std::log(2 * pi) + (zz + 0.5) * std::log(tt) - tt + std::log(x);
}

/// chi(s) = pi^{s-1/2} Gamma((1-s)/2) / Gamma(s/2), so zeta(s) = chi(s) zeta(1-s).
[[nodiscard]] inline cplx chi(cplx s) {
  const double pi = std::numbers::pi;
  return std::exp((s - 0.5) * std::log(pi) + log_gamma((1.0 - s) / 2.0) - log_gamma(s / 2.0));
}

/// |zeta(s) - chi(s) zeta(1-s)|, both zetas by Euler-Maclaurin.
[[nodiscard]] inline double functional_equation_residual(cplx s, const ZetaLineConfig& cfg = {}) {
  const std::size_t n = em_terms(s.imag(), cfg);
  const cplx lhs = zeta_em(s, n, cfg.em_bernoulli);
  const cplx rhs = chi(s) * zeta_em(1.0 - s, n, cfg.em_bernoulli);
  return std::abs(lhs - rhs);
}

// ---------------------------------------------------------------------------
// Cumulative table and E(t)
// ---------------------------------------------------------------------------

/// Panels from 0 to t_max with widths from ZetaLineConfig::panel_width,
/// Gauss-Legendre (order 8) on each, cumulative values at boundaries.
[[nodiscard]] inline CumulativeZetaTable build_cumulative(double t_max, const ZetaLineConfig& cfg = {},
                                                          unsigned threads = default_threads()) {
  if (!(t_max > 0)) throw ArgumentError("build_cumulative: t_max must be positive");
  if (t_max > cfg.max_t_critical) throw RangeError("build_cumulative: t_max beyond configured maximum");
  CumulativeZetaTable tab;
  tab.config = cfg;
  tab.t_max = t_max;
  tab.grid.push_back(0.0);
  while (tab.grid.back() < t_max) {
    const double t = tab.grid.back();
    const double w = cfg.panel_width(t);
    tab.grid.push_back(t + w >= t_max - 1e-3 * w ? t_max : t + w);
  }
  const std::size_t panels = tab.panels();
  tab.legendre.assign(panels * kZetaPanelOrder, 0.0);
  std::vector<double> panel_integral(panels, 0.0);

  const auto& rule = gauss_legendre<kZetaPanelOrder>();
  std::array<std::array<double, kZetaPanelOrder>, kZetaPanelOrder> pk{};  // P_k(node_j)
  for (int j = 0; j < kZetaPanelOrder; ++j) {
    double p[kZetaPanelOrder];
    detail::legendre_values(rule.nodes[j], kZetaPanelOrder, p);
    for (int k = 0; k < kZetaPanelOrder; ++k) pk[k][j] = p[k];
  }

  constexpr std::size_t kBlock = 4096;
  const std::size_t blocks = (panels + kBlock - 1) / kBlock;
  parallel_blocks(blocks, threads, [&](std::size_t blk) {
    const std::size_t end = std::min(panels, (blk + 1) * kBlock);
    for (std::size_t i = blk * kBlock; i < end; ++i) {
      const double a = tab.grid[i], b = tab.grid[i + 1];
      const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
      double f[kZetaPanelOrder];
      for (int j = 0; j < kZetaPanelOrder; ++j) f[j] = zeta_abs2_critical(mid + half * rule.nodes[j], cfg);
      for (int k = 0; k < kZetaPanelOrder; ++k) {
        double acc = 0;
        for (int j = 0; j < kZetaPanelOrder; ++j) acc += rule.weights[j] * f[j] * pk[k][j];
        tab.legendre[i * kZetaPanelOrder + k] = (2.0 * k + 1.0) / 2.0 * acc;
      }
      double q = 0;
      for (int j = 0; j < kZetaPanelOrder; ++j) q += rule.weights[j] * f[j];
      panel_integral[i] = half * q;
    }
  });

  tab.cumsq.assign(panels + 1, 0.0);
  CompensatedSum<double> run;
  for (std::size_t i = 0; i < panels; ++i) {
    run.add(panel_integral[i]);
    tab.cumsq[i + 1] = run.value();
  }
  return tab;
}

/// t (log(t / 2 pi) + 2 gamma - 1).
[[nodiscard]] inline double e_main_term(double t) {
  if (t == 0.0) return 0.0;
  const auto [hi, lo] = main_term_dd(e_main_poly(), t);
  return hi + lo;
}

/// E(x) with the partial panel re-integrated from fresh zeta values.
[[nodiscard]] inline double e_of_x(const CumulativeZetaTable& table, double x) {
  if (x < 0 || x > table.t_max) throw RangeError("e_of_x: x outside [0, t_max]");
  if (x == 0.0) return 0.0;
  const std::size_t i = table.panel_of(x);
  double integral = table.cumsq[i];
  if (x > table.grid[i]) {
    integral += gauss_integrate<kZetaPanelOrder>(
        [&](double u) { return zeta_abs2_critical(u, table.config); }, table.grid[i], x);
  }
  return integral - e_main_term(x);
}

/// E*(t) = E(t) - 2 pi Delta*(t / 2 pi).
[[nodiscard]] inline double e_star(double t, const CumulativeZetaTable& table, const DivisorTable& dtable) {
  if (t == 0.0) return 0.0;
  return e_of_x(table, t) - 2.0 * std::numbers::pi * delta_star(dtable, t / (2.0 * std::numbers::pi));
}

// ---------------------------------------------------------------------------
// Fourth moment
// ---------------------------------------------------------------------------

struct FourthMomentSample {
  double T;
  double value;
};

/// integral_1^T |zeta(sigma + it)|^4 dt for each T in `ts` (ascending), by
/// Gauss-Legendre panels following the same width rule as the
/// cumulative table. Euler-Maclaurin throughout; the Dirichlet-sum tables
/// (n^{-sigma}, log n) are shared across all evaluations.
[[nodiscard]] inline std::vector<FourthMomentSample> fourth_moment_series(double sigma, std::vector<double> ts,
                                                                          const ZetaLineConfig& cfg = {},
                                                                          unsigned threads = default_threads()) {
  if (!(sigma > 0.5 && sigma <= 1.0)) throw RangeError("fourth_moment: sigma must lie in (1/2, 1]");
  std::vector<FourthMomentSample> out;
  if (ts.empty()) return out;
  std::sort(ts.begin(), ts.end());
  if (ts.front() < 1.0) throw RangeError("fourth_moment: T must be >= 1");
  const double t_top = ts.back();
  if (t_top > cfg.max_t_off_line) throw RangeError("fourth_moment: T beyond configured maximum");

  const std::size_t n_max = em_terms(t_top, cfg);
  std::vector<double> logn(n_max + 1, 0.0), mag(n_max + 1, 0.0);
  for (std::size_t n = 1; n <= n_max; ++n) {
    logn[n] = std::log(static_cast<double>(n));
    mag[n] = std::exp(-sigma * logn[n]);
  }
  auto abs4 = [&](double t) {
    const std::size_t n_terms = em_terms(t, cfg);
    double re = 0, im = 0;
    for (std::size_t n = 1; n < n_terms; ++n) {
      const double ph = t * logn[n];
      re += mag[n] * std::cos(ph);
      im -= mag[n] * std::sin(ph);
    }
    const cplx s(sigma, t);
    const double N = static_cast<double>(n_terms);
    const cplx n_pow = std::exp(-s * logn[n_terms]);
    cplx acc(re, im);
    acc += N * n_pow / (s - 1.0) + 0.5 * n_pow;
    cplx rising = s, npow = n_pow / N;
    for (int j = 1; j <= cfg.em_bernoulli; ++j) {
      const double coef = static_cast<double>(detail::kBernoulliEven[static_cast<std::size_t>(j - 1)] /
                                              detail::factorial_ld(2 * j));
      acc += coef * rising * npow;
      rising *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
      npow /= N * N;
    }
    const double a2 = std::norm(acc);
    return a2 * a2;
  };

  // Panel grid over [1, t_top], split at every requested T.
  std::vector<double> grid{1.0};
  std::size_t next_t = 0;
  while (grid.back() < t_top) {
    const double t = grid.back();
    double b = t + cfg.panel_width(t);
    while (next_t < ts.size() && ts[next_t] <= t) ++next_t;
    if (next_t < ts.size() && b >= ts[next_t]) b = ts[next_t];
    grid.push_back(std::min(b, t_top));
  }
  const std::size_t panels = grid.size() - 1;
  std::vector<double> vals(panels, 0.0);
  constexpr std::size_t kBlock = 1024;
  parallel_blocks((panels + kBlock - 1) / kBlock, threads, [&](std::size_t blk) {
    const std::size_t end = std::min(panels, (blk + 1) * kBlock);
    for (std::size_t i = blk * kBlock; i < end; ++i) vals[i] = gauss_integrate<kZetaPanelOrder>(abs4, grid[i], grid[i + 1]);
  });
  CompensatedSum<double> run;
  std::size_t ti = 0;
  while (ti < ts.size() && ts[ti] <= 1.0) out.push_back({ts[ti++], 0.0});
  for (std::size_t i = 0; i < panels; ++i) {
    run.add(vals[i]);
    while (ti < ts.size() && ts[ti] <= grid[i + 1]) out.push_back({ts[ti++], run.value()});
  }
  return out;
}

[[nodiscard]] inline double fourth_moment(double sigma, double T, const ZetaLineConfig& cfg = {},
                                          unsigned threads = default_threads()) {
  return fourth_moment_series(sigma, {T}, cfg, threads).front().value;
}

}  // namespace divlab
