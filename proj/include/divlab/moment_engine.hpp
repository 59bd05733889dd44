#pragma once

// Mean squares, cross-correlations and asymptotic constants.
//
// For handles without zeta parts, products are integrated in closed form
// piece by piece: between breakpoints f(x) = S - x Q(log x) with S
// constant. Near the origin (x < 64) the product is expanded into
// monomials x^a log^j x and integrated exactly; further out the smooth
// part is Taylor-expanded about the left end of the piece, which avoids
// the catastrophic cancellation of expanding (S - xQ)^2 when S ~ xQ ~ 1e10.
// Each Taylor coefficient is exact up to truncation at a term below 1e-16
// relative. Handles with zeta parts fall back to Gauss-Legendre on every
// piece of the merged breakpoint set.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "divlab/arith_core.hpp"
#include "divlab/error_terms.hpp"
#include "divlab/errors.hpp"
#include "divlab/numeric.hpp"
#include "divlab/residue_poly.hpp"
#include "divlab/zeta_line.hpp"

namespace divlab {

/// Exponents the moment checks compare against.
namespace reference_exponent {
inline constexpr double kDeltaMeanSquare = 3.0 / 2.0;
inline constexpr double kDelta3MeanSquare = 5.0 / 3.0;
inline constexpr double kCrossDeltaDelta3 = 13.0 / 9.0;
inline constexpr double kCrossCauchySchwarz = 19.0 / 12.0;
inline constexpr double kCrossDeltaDelta4 = 25.0 / 16.0;
inline constexpr double kCrossDelta4CauchySchwarz = 13.0 / 8.0;
inline constexpr double kEStarMeanSquare = 4.0 / 3.0;
inline constexpr double kDelta4MeanSquare = 7.0 / 4.0;
}  // namespace reference_exponent

// ---------------------------------------------------------------------------
// Closed-form antiderivatives
// ---------------------------------------------------------------------------

/// x^{a+1} sum_{i<=j} (-1)^i j!/(j-i)! log^{j-i}x / (a+1)^{i+1}, the
/// antiderivative of x^a log^j x obtained by unrolling the recurrence
///   int x^a L^j = x^{a+1} L^j / (a+1) - j/(a+1) int x^a L^{j-1}.
template <typename T = double>
[[nodiscard]] T poly_log_antiderivative(T a, int j, T x) {
  if (x == 0) return 0;  // limit for a + 1 > 0
  const T ap1 = a + 1;
  const T L = std::log(x);
  T acc = 0;
  T coef = 1 / ap1;  // j!/(j-i)! / (a+1)^{i+1} with sign
  for (int i = 0; i <= j; ++i) {
    acc += coef * std::pow(L, static_cast<T>(j - i));
    coef *= -static_cast<T>(j - i) / ap1;
  }
  return std::pow(x, ap1) * acc;
}

/// integral_{lo}^{hi} x^a log^j x dx. lo = 0 is taken as the limit.
template <typename T = double>
[[nodiscard]] T poly_log_integral(int a, int j, T lo, T hi) {
  if (j < 0 || a + 1 <= 0) throw ArgumentError("poly_log_integral needs j >= 0 and a + 1 > 0");
  if (!(lo >= 0 && lo <= hi)) throw ArgumentError("poly_log_integral needs 0 <= lo <= hi");
  return poly_log_antiderivative<T>(static_cast<T>(a), j, hi) - poly_log_antiderivative<T>(static_cast<T>(a), j, lo);
}

/// integral_{lo}^{inf} x^{-s} log^j x dx for s > 1.
[[nodiscard]] inline long double poly_log_integral_to_infinity(long double s, int j, long double lo) {
  if (!(s > 1) || !(lo > 0)) throw ArgumentError("poly_log_integral_to_infinity needs s > 1, lo > 0");
  return -poly_log_antiderivative<long double>(-s, j, lo);
}

// ---------------------------------------------------------------------------
// Piecewise integration of products
// ---------------------------------------------------------------------------

struct MomentOptions {
  unsigned threads = default_threads();
  double block_length = 65536.0;  // fixed partition of the x-axis for reproducible parallel sums
};

namespace detail {

inline constexpr double kTaylorThreshold = 64.0;

/// g(x) = x Q(log x) has g^{(m)}(x) = x^{1-m} R_m(log x) with R_0 = Q and
/// R_{m+1} = (1-m) R_m + R_m'.
inline std::vector<Poly> smooth_derivative_polys(const Poly& q, int order) {
  std::vector<Poly> r(static_cast<std::size_t>(order + 1));
  r[0] = q;
  for (int m = 0; m < order; ++m) {
    r[static_cast<std::size_t>(m + 1)] =
        poly_add(poly_scale(r[static_cast<std::size_t>(m)], 1.0 - m), poly_derivative(r[static_cast<std::size_t>(m)]));
  }
  return r;
}

inline constexpr int kMaxTaylor = 10;

struct HandleExpansion {
  const ErrorTermHandle* h;
  std::vector<Poly> r;  // R_0..R_kMaxTaylor, each R_m pre-divided by m!

  explicit HandleExpansion(const ErrorTermHandle& handle) : h(&handle) {
    r = smooth_derivative_polys(handle.smooth, kMaxTaylor);
    double fact = 1.0;
    for (int m = 1; m <= kMaxTaylor; ++m) {
      fact *= m;
      r[static_cast<std::size_t>(m)] = poly_scale(r[static_cast<std::size_t>(m)], 1.0 / fact);
    }
  }

  /// Coefficients of u -> value(a + u) on a piece starting at a > 0.
  void local(double a, double step_sum, int order, double* out) const {
    const auto [mh, ml] = h->smooth_at(a);
    out[0] = (step_sum - mh) - ml;
    const double L = std::log(a);
    double apow = 1.0;  // a^{1-m}
    for (int m = 1; m <= order; ++m) {
      out[m] = -apow * horner<double>(r[static_cast<std::size_t>(m)], L);
      apow /= a;
    }
  }
};

/// integral over [a, b] of (Sf - x Qf(log x)) (Sg - x Qg(log x)) by monomials.
inline double product_by_monomials(double Sf, const Poly& qf, double Sg, const Poly& qg, double a, double b) {
  using LD = long double;
  LD acc = static_cast<LD>(Sf) * Sg * (static_cast<LD>(b) - a);
  for (std::size_t j = 0; j < qg.size(); ++j) acc -= static_cast<LD>(Sf) * qg[j] * poly_log_integral<LD>(1, static_cast<int>(j), a, b);
  for (std::size_t j = 0; j < qf.size(); ++j) acc -= static_cast<LD>(Sg) * qf[j] * poly_log_integral<LD>(1, static_cast<int>(j), a, b);
  for (std::size_t i = 0; i < qf.size(); ++i) {
    for (std::size_t j = 0; j < qg.size(); ++j) {
      acc += static_cast<LD>(qf[i]) * qg[j] * poly_log_integral<LD>(2, static_cast<int>(i + j), a, b);
    }
  }
  return static_cast<double>(acc);
}

inline int taylor_order(double a, double w) {
  // Truncation term ~ a (w/a)^{M+1} polylog(a); keep it below 1e-17.
  const double ratio = w / a;
  int m = 2;
  double term = a * ratio * ratio * ratio * 1e3;
  while (term > 1e-17 && m < kMaxTaylor) {
    ++m;
    term *= ratio;
  }
  return m;
}

/// Exact integral of f*g over [lo, hi] (both handles free of zeta parts).
inline double integrate_exact(const HandleExpansion& f, const HandleExpansion& g, double lo, double hi) {
  CompensatedSum<double> acc;
  const bool same = f.h == g.h;
  PieceWalker walker(same ? std::vector<const ErrorTermHandle*>{f.h} : std::vector<const ErrorTermHandle*>{f.h, g.h},
                     lo, hi);
  double pf[kMaxTaylor + 1], pg[kMaxTaylor + 1];
  while (walker.next()) {
    const double a = walker.a(), b = walker.b();
    if (!(b > a)) continue;
    const double sf = walker.step_sum(0);
    const double sg = same ? sf : walker.step_sum(1);
    if (a < kTaylorThreshold) {
      acc.add(product_by_monomials(sf, f.h->smooth, sg, g.h->smooth, a, b));
      continue;
    }
    const double w = b - a;
    const int order = taylor_order(a, w);
    f.local(a, sf, order, pf);
    if (same) {
      std::copy(pf, pf + order + 1, pg);
    } else {
      g.local(a, sg, order, pg);
    }
    // integral_0^w (sum pf_i u^i)(sum pg_j u^j) du, highest powers first.
    double piece = 0.0;
    for (int n = 2 * order; n >= 0; --n) {
      double c = 0.0;
      for (int i = std::max(0, n - order); i <= std::min(n, order); ++i) c += pf[i] * pg[n - i];
      piece = piece * w + c / (n + 1);
    }
    acc.add(piece * w);
  }
  return acc.value();
}

/// Gauss-Legendre (16 points) on every piece of the merged breakpoints.
inline double integrate_quadrature(const ErrorTermHandle& f, const ErrorTermHandle& g, double lo, double hi) {
  CompensatedSum<double> acc;
  const bool same = &f == &g;
  PieceWalker walker(same ? std::vector<const ErrorTermHandle*>{&f} : std::vector<const ErrorTermHandle*>{&f, &g}, lo,
                     hi);
  const auto& rule = gauss_legendre<16>();
  while (walker.next()) {
    const double a = walker.a(), b = walker.b();
    if (!(b > a)) continue;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double s = 0.0;
    for (int i = 0; i < 16; ++i) {
      const double x = mid + half * rule.nodes[i];
      const double fv = walker.eval(0, x);
      const double gv = same ? fv : walker.eval(1, x);
      s += rule.weights[i] * fv * gv;
    }
    acc.add(s * half);
  }
  return acc.value();
}

}  // namespace detail

/// integral_{lo}^{hi} f g dx with the exact method when both handles
/// allow it.
[[nodiscard]] inline double integrate_product(const ErrorTermHandle& f, const ErrorTermHandle& g, double lo, double hi) {
  if (!(lo <= hi)) throw ArgumentError("integrate_product: lo > hi");
  f.check_domain(lo);
  f.check_domain(hi);
  g.check_domain(lo);
  g.check_domain(hi);
  if (lo == hi) return 0.0;
  if (f.exact_integrable() && g.exact_integrable()) {
    const detail::HandleExpansion ef(f);
    if (&f == &g) return detail::integrate_exact(ef, ef, lo, hi);
    const detail::HandleExpansion eg(g);
    return detail::integrate_exact(ef, eg, lo, hi);
  }
  return detail::integrate_quadrature(f, g, lo, hi);
}

/// integral from the common lower domain end to each X in `xs`. One pass
/// over the x-axis, cut into fixed blocks (and at every sample) so the
/// summation order does not depend on the thread count.
[[nodiscard]] inline std::vector<double> moment_series(const ErrorTermHandle& f, const ErrorTermHandle& g,
                                                       std::vector<double> xs, const MomentOptions& opts = {}) {
  std::vector<double> out;
  if (xs.empty()) return out;
  std::sort(xs.begin(), xs.end());
  const double lo = std::max(f.lo, g.lo);
  const double top = xs.back();
  for (double x : xs) {
    if (x < lo) throw RangeError("moment_series: X below the lower integration limit");
    f.check_domain(x);
    g.check_domain(x);
  }
  std::vector<double> cuts{lo};
  for (double e = lo + opts.block_length; e < top; e += opts.block_length) cuts.push_back(e);
  for (double x : xs) cuts.push_back(x);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  const std::size_t segs = cuts.size() - 1;
  std::vector<double> seg_val(segs, 0.0);
  const bool exact = f.exact_integrable() && g.exact_integrable();
  std::optional<detail::HandleExpansion> ef, eg;
  if (exact) {
    ef.emplace(f);
    eg.emplace(g);
  }
  parallel_blocks(segs, opts.threads, [&](std::size_t s) {
    if (exact) {
      seg_val[s] = (&f == &g) ? detail::integrate_exact(*ef, *ef, cuts[s], cuts[s + 1])
                              : detail::integrate_exact(*ef, *eg, cuts[s], cuts[s + 1]);
    } else {
      seg_val[s] = detail::integrate_quadrature(f, g, cuts[s], cuts[s + 1]);
    }
  });

  CompensatedSum<double> run;
  std::size_t xi = 0;
  while (xi < xs.size() && xs[xi] <= lo) {
    out.push_back(0.0);
    ++xi;
  }
  for (std::size_t s = 0; s < segs; ++s) {
    run.add(seg_val[s]);
    while (xi < xs.size() && xs[xi] <= cuts[s + 1]) {
      out.push_back(run.value());
      ++xi;
    }
  }
  return out;
}

/// integral_{lo}^{X} f^2 over the handle's domain.
[[nodiscard]] inline double mean_square(const ErrorTermHandle& f, double X, const MomentOptions& opts = {}) {
  return moment_series(f, f, {X}, opts).front();
}

/// integral_{lo}^{X} f g.
[[nodiscard]] inline double cross_moment(const ErrorTermHandle& f, const ErrorTermHandle& g, double X,
                                         const MomentOptions& opts = {}) {
  return moment_series(f, g, {X}, opts).front();
}

/// (integral f^2 * integral g^2)^{1/2}, the Cauchy-Schwarz ceiling.
[[nodiscard]] inline double cs_bound(const ErrorTermHandle& f, const ErrorTermHandle& g, double X,
                                     const MomentOptions& opts = {}) {
  const double mf = mean_square(f, X, opts);
  if (&f == &g) return mf;
  return std::sqrt(mf * mean_square(g, X, opts));
}

// ---------------------------------------------------------------------------
// Series constants A_2, A_3
// ---------------------------------------------------------------------------

/// Real zeta(s), s > 1, by Euler-Maclaurin in long double.
[[nodiscard]] inline long double zeta_real(long double s) {
  if (!(s > 1)) throw ArgumentError("zeta_real needs s > 1");
  constexpr std::uint64_t N = 64;
  CompensatedSum<long double> acc;
  for (std::uint64_t n = N - 1; n >= 1; --n) acc.add(std::pow(static_cast<long double>(n), -s));
  const long double Nl = N;
  acc.add(std::pow(Nl, 1 - s) / (s - 1));
  acc.add(std::pow(Nl, -s) / 2);
  long double rising = s;
  long double npow = std::pow(Nl, -s - 1);
  for (int j = 1; j <= 12; ++j) {
    acc.add(detail::kBernoulliEven[static_cast<std::size_t>(j - 1)] / detail::factorial_ld(2 * j) * rising * npow);
    rising *= (s + 2 * j - 1) * (s + 2 * j);
    npow /= Nl * Nl;
  }
  return acc.value();
}

enum class SeriesMethod { DirectSumWithTail, ZetaIdentity };

struct SeriesConstant {
  int k = 0;
  double value = 0.0;       // A_k
  double series_sum = 0.0;  // sum d_k^2(n) n^{-s}
  double tail_bound = 0.0;  // estimated error of series_sum
  SeriesMethod method = SeriesMethod::ZetaIdentity;
};

namespace detail {

inline double series_exponent(int k) { return k == 2 ? 1.5 : 4.0 / 3.0; }
inline double series_normalizer(int k) {
  return (k == 2 ? 6.0 : 10.0) * std::numbers::pi * std::numbers::pi;
}

inline std::vector<std::uint32_t> primes_up_to(std::uint32_t n) {
  std::vector<bool> composite(n + 1, false);
  std::vector<std::uint32_t> ps;
  for (std::uint32_t i = 2; i <= n; ++i) {
    if (composite[i]) continue;
    ps.push_back(i);
    for (std::uint64_t j = std::uint64_t{i} * i; j <= n; j += i) composite[j] = true;
  }
  return ps;
}

}  // namespace detail

/// A_2 = (6 pi^2)^{-1} sum d^2(n) n^{-3/2} and A_3 = (10 pi^2)^{-1} sum d_3^2(n) n^{-4/3}.
///
/// k = 2 uses sum d^2(n) n^{-s} = zeta^4(s) / zeta(2s). k = 3 uses the
/// Euler product sum d_3^2(n) n^{-s} = zeta^9(s) prod_p (1 - 9x^2 + 16x^3 - 9x^4 + x^6),
/// x = p^{-s}, whose factors are 1 + O(p^{-2s}); the product runs over
/// p <= 10^6 and the tail bound covers the remaining primes.
[[nodiscard]] inline SeriesConstant series_constant_A(int k, double rel_precision = 1e-8) {
  if (k != 2 && k != 3) throw ArgumentError("series_constant_A supports k = 2 or 3");
  SeriesConstant c;
  c.k = k;
  c.method = SeriesMethod::ZetaIdentity;
  const long double s = detail::series_exponent(k);
  long double sum;
  long double tail;
  if (k == 2) {
    sum = std::pow(zeta_real(s), 4.0L) / zeta_real(2 * s);
    tail = 1e-17L * sum;
  } else {
    constexpr std::uint32_t kPrimeLimit = 1000000;
    long double prod = 1;
    for (std::uint32_t p : detail::primes_up_to(kPrimeLimit)) {
      const long double x = std::pow(static_cast<long double>(p), -s);
      const long double x2 = x * x;
      prod *= 1 - 9 * x2 + 16 * x2 * x - 9 * x2 * x2 + x2 * x2 * x2;
    }
    sum = std::pow(zeta_real(s), 9.0L) * prod;
    // |log factor| <= 10 x^2 for the remaining p; sum_{n > P} n^{-2s} <= P^{1-2s}/(2s-1).
    const long double P = kPrimeLimit;
    tail = sum * 10 * std::pow(P, 1 - 2 * s) / (2 * s - 1) * 1.01L;
  }
  if (tail > rel_precision * sum) throw PrecisionError("series_constant_A: requested precision unreachable");
  c.series_sum = static_cast<double>(sum);
  c.tail_bound = static_cast<double>(tail);
  c.value = static_cast<double>(sum / detail::series_normalizer(k));
  return c;
}

/// Direct partial sum of d_k^2(n) n^{-s} over n <= table.limit plus a tail
/// estimate. The tail uses partial summation with S(x) = sum_{n<=x} d_k^2(n)
/// replaced beyond the limit by x F(log x), F a polynomial of degree
/// k^2 - 1 fitted by least squares to S(x)/x on the upper half-decade.
[[nodiscard]] inline SeriesConstant series_constant_direct(const DivisorTable& table) {
  const int k = table.k();
  if (k != 2 && k != 3) throw ArgumentError("series_constant_direct supports k = 2 or 3");
  const long double s = detail::series_exponent(k);
  const std::uint64_t M = table.limit();
  CompensatedSum<long double> sum;
  long double S = 0;
  const int deg = k * k - 1;
  std::vector<long double> fx, fy;
  const std::uint64_t fit_from = M / 32;
  const std::uint64_t fit_step = std::max<std::uint64_t>(1, (M - fit_from) / 4000);
  for (std::uint64_t n = 1; n <= M; ++n) {
    const long double d = table[n];
    sum.add(d * d * std::pow(static_cast<long double>(n), -s));
    S += d * d;
    if (n >= fit_from && (n - fit_from) % fit_step == 0) {
      fx.push_back(std::log(static_cast<long double>(n)));
      fy.push_back(S / n);
    }
  }
  // Least squares for F in the shifted variable (L - L_M) for conditioning.
  const long double LM = std::log(static_cast<long double>(M));
  const int nc = deg + 1;
  std::vector<long double> ata(static_cast<std::size_t>(nc * nc), 0), atb(static_cast<std::size_t>(nc), 0);
  for (std::size_t i = 0; i < fx.size(); ++i) {
    std::vector<long double> row(static_cast<std::size_t>(nc));
    long double p = 1;
    for (int j = 0; j < nc; ++j, p *= (fx[i] - LM)) row[static_cast<std::size_t>(j)] = p;
    for (int r = 0; r < nc; ++r) {
      atb[static_cast<std::size_t>(r)] += row[static_cast<std::size_t>(r)] * fy[i];
      for (int c = 0; c < nc; ++c) ata[static_cast<std::size_t>(r * nc + c)] += row[static_cast<std::size_t>(r)] * row[static_cast<std::size_t>(c)];
    }
  }
  // Gaussian elimination with partial pivoting.
  std::vector<long double> coef = atb;
  for (int col = 0; col < nc; ++col) {
    int piv = col;
    for (int r = col + 1; r < nc; ++r) {
      if (std::abs(ata[static_cast<std::size_t>(r * nc + col)]) > std::abs(ata[static_cast<std::size_t>(piv * nc + col)])) piv = r;
    }
    for (int c = 0; c < nc; ++c) std::swap(ata[static_cast<std::size_t>(col * nc + c)], ata[static_cast<std::size_t>(piv * nc + c)]);
    std::swap(coef[static_cast<std::size_t>(col)], coef[static_cast<std::size_t>(piv)]);
    for (int r = col + 1; r < nc; ++r) {
      const long double f = ata[static_cast<std::size_t>(r * nc + col)] / ata[static_cast<std::size_t>(col * nc + col)];
      for (int c = col; c < nc; ++c) ata[static_cast<std::size_t>(r * nc + c)] -= f * ata[static_cast<std::size_t>(col * nc + c)];
      coef[static_cast<std::size_t>(r)] -= f * coef[static_cast<std::size_t>(col)];
    }
  }
  for (int r = nc - 1; r >= 0; --r) {
    for (int c = r + 1; c < nc; ++c) coef[static_cast<std::size_t>(r)] -= ata[static_cast<std::size_t>(r * nc + c)] * coef[static_cast<std::size_t>(c)];
    coef[static_cast<std::size_t>(r)] /= ata[static_cast<std::size_t>(r * nc + r)];
  }
  // Back to powers of L: F(L) = sum_j coef_j (L - LM)^j.
  Poly shifted(coef.begin(), coef.end());
  const Poly F = poly_shift(shifted, -static_cast<double>(LM));
  // sum_{n>M} a_n n^{-s} = -S(M) M^{-s} + s int_M^inf x^{-s} F(log x) dx.
  long double tail = -S * std::pow(static_cast<long double>(M), -s);
  for (std::size_t j = 0; j < F.size(); ++j) {
    tail += s * F[j] * poly_log_integral_to_infinity(s, static_cast<int>(j), static_cast<long double>(M));
  }
  SeriesConstant c;
  c.k = k;
  c.method = SeriesMethod::DirectSumWithTail;
  c.series_sum = static_cast<double>(sum.value() + tail);
  c.tail_bound = static_cast<double>(std::abs(tail));
  c.value = static_cast<double>((sum.value() + tail) / detail::series_normalizer(k));
  return c;
}

// ---------------------------------------------------------------------------
// Exponent fitting
// ---------------------------------------------------------------------------

struct FitResult {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // zero, non-finite, or below near_zero
};

/// Least squares on (log X, log |value|). Samples with value zero (or
/// |value| <= near_zero) are excluded and counted; fewer than four
/// remaining is an error.
[[nodiscard]] inline FitResult fit_exponent(std::span<const double> xs, std::span<const double> values,
                                            double near_zero = 0.0) {
  if (xs.size() != values.size()) throw ArgumentError("fit_exponent: size mismatch");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw ArgumentError("fit_exponent: X must be strictly increasing");
  }
  FitResult r;
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = std::abs(values[i]);
    if (!(xs[i] > 0) || !std::isfinite(v) || v <= near_zero || v == 0.0) {
      ++r.excluded;
      continue;
    }
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(v));
  }
  r.used = lx.size();
  if (r.used < 4) throw ArgumentError("fit_exponent: fewer than 4 usable samples");
  const double n = static_cast<double>(r.used);
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) mx += lx[i], my += ly[i];
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
  }
  r.slope = sxy / sxx;
  r.intercept = my - r.slope * mx;
  double ssr = 0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (r.intercept + r.slope * lx[i]);
    ssr += e * e;
  }
  r.stderr_slope = std::sqrt(ssr / (n - 2) / sxx);
  return r;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

struct MomentSample {
  double X = 0;
  double value = 0;
  double normalized = 0;  // value / X^reference_exponent
  double bound = 0;       // comparison: A X^e for mean squares, Cauchy-Schwarz for cross moments
  double ratio = 0;       // |value| / bound

  friend bool operator==(const MomentSample&, const MomentSample&) = default;
};

struct MomentReport {
  std::string kind;
  double reference_exponent = 0;
  std::vector<double> guide_exponents;
  std::vector<MomentSample> samples;
  double fitted_exponent = 0;
  double fit_stderr = 0;

  friend bool operator==(const MomentReport&, const MomentReport&) = default;
};

inline void fit_report(MomentReport& r) {
  std::vector<double> xs, vs;
  for (const auto& s : r.samples) xs.push_back(s.X), vs.push_back(s.value);
  const FitResult fit = fit_exponent(xs, vs);
  r.fitted_exponent = fit.slope;
  r.fit_stderr = fit.stderr_slope;
}

/// Mean square of f at each X, normalized by X^exponent; `constant` (if
/// given) turns the bound column into constant * X^exponent.
[[nodiscard]] inline MomentReport mean_square_report(const ErrorTermHandle& f, const std::vector<double>& xs,
                                                     double exponent, std::optional<double> constant = std::nullopt,
                                                     const MomentOptions& opts = {}) {
  MomentReport r;
  r.kind = "mean_square:" + f.name;
  r.reference_exponent = exponent;
  r.guide_exponents = {exponent};
  const auto vals = moment_series(f, f, xs, opts);
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    MomentSample s;
    s.X = sorted[i];
    s.value = vals[i];
    s.normalized = vals[i] / std::pow(s.X, exponent);
    s.bound = constant.value_or(1.0) * std::pow(s.X, exponent);
    s.ratio = std::abs(s.value) / s.bound;
    r.samples.push_back(s);
  }
  if (r.samples.size() >= 4) fit_report(r);
  return r;
}

/// Cross moment of f and g at each X against the Cauchy-Schwarz ceiling.
[[nodiscard]] inline MomentReport cross_report(const ErrorTermHandle& f, const ErrorTermHandle& g,
                                               const std::vector<double>& xs, double exponent,
                                               std::vector<double> guides, const MomentOptions& opts = {}) {
  MomentReport r;
  r.kind = "cross:" + f.name + "*" + g.name;
  r.reference_exponent = exponent;
  r.guide_exponents = std::move(guides);
  const auto fg = moment_series(f, g, xs, opts);
  const auto ff = moment_series(f, f, xs, opts);
  const auto gg = moment_series(g, g, xs, opts);
  auto sorted = xs;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    MomentSample s;
    s.X = sorted[i];
    s.value = fg[i];
    s.normalized = fg[i] / std::pow(s.X, exponent);
    s.bound = std::sqrt(ff[i] * gg[i]);
    s.ratio = s.bound > 0 ? std::abs(s.value) / s.bound : 0.0;
    r.samples.push_back(s);
  }
  if (r.samples.size() >= 4) fit_report(r);
  return r;
}

}  // namespace divlab
