#pragma once

// Stieltjes constants and the main-term polynomials P_{k-1}.
//
// Normalization. Two conventions are in circulation:
//
//   standard:  zeta(s) = 1/(s-1) + sum_j (-1)^j gamma_j / j! (s-1)^j
//   Laurent:   zeta(s) = 1/(s-1) + sum_j c_j (s-1)^j
//
// stieltjes(j) returns the standard gamma_j (gamma_1 = -0.0728158...).
// laurent_coefficient(j) returns c_j = (-1)^j gamma_j / j!, which is what
// the residue computation consumes. Written in the c_j, the familiar
//   P_2(t) = t^2/2 + (3c_0 - 1) t + (3c_0^2 - 3c_0 + 3c_1 + 1)
// holds verbatim with c_1 = -gamma_1 = +0.0728158...

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "divlab/errors.hpp"
#include "divlab/numeric.hpp"

namespace divlab {

namespace detail {

// B_2, B_4, ..., B_30.
inline constexpr std::array<long double, 15> kBernoulliEven = {
    1.0L / 6,          -1.0L / 30,          1.0L / 42,         -1.0L / 30,        5.0L / 66,
    -691.0L / 2730,    7.0L / 6,            -3617.0L / 510,    43867.0L / 798,    -174611.0L / 330,
    854513.0L / 138,   -236364091.0L / 2730, 8553103.0L / 6,   -23749461029.0L / 870,
    8615841276005.0L / 14322};

inline long double factorial_ld(int n) {
  long double f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// f(x) = log^j(x) / x has f^{(r)}(x) = x^{-1-r} Q_r(log x) with
// Q_0 = L^j and Q_{r+1} = -(r+1) Q_r + Q_r'.
inline std::vector<std::vector<long double>> stieltjes_derivative_polys(int j, int r_max) {
  std::vector<std::vector<long double>> q(static_cast<std::size_t>(r_max + 1));
  q[0].assign(static_cast<std::size_t>(j + 1), 0.0L);
  q[0][static_cast<std::size_t>(j)] = 1.0L;
  for (int r = 0; r < r_max; ++r) {
    const auto& cur = q[static_cast<std::size_t>(r)];
    std::vector<long double> nxt(cur.size(), 0.0L);
    for (std::size_t i = 0; i < cur.size(); ++i) nxt[i] -= (r + 1) * cur[i];
    for (std::size_t i = 1; i < cur.size(); ++i) nxt[i - 1] += static_cast<long double>(i) * cur[i];
    q[static_cast<std::size_t>(r + 1)] = std::move(nxt);
  }
  return q;
}

struct StieltjesEstimate {
  long double value;
  long double truncation;  // magnitude of the last Euler-Maclaurin term used
  long double rounding;    // rough bound on accumulated rounding
};

inline StieltjesEstimate stieltjes_em(int j, std::uint64_t m, int bernoulli_terms) {
  CompensatedSum<long double> sum;
  long double abs_sum = 0;
  for (std::uint64_t n = 2; n <= m; ++n) {
    const long double ln = std::log(static_cast<long double>(n));
    const long double term = std::pow(ln, static_cast<long double>(j)) / static_cast<long double>(n);
    sum.add(term);
    abs_sum += term;
  }
  if (j == 0) {
    sum.add(1.0L);  // n = 1 contributes log^0(1)/1
    abs_sum += 1.0L;
  }
  const long double lm = std::log(static_cast<long double>(m));
  const long double x = static_cast<long double>(m);
  sum.add(-std::pow(lm, static_cast<long double>(j + 1)) / (j + 1));
  const auto q = stieltjes_derivative_polys(j, 2 * bernoulli_terms);
  auto f_r = [&](int r) {
    long double acc = 0;
    const auto& p = q[static_cast<std::size_t>(r)];
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * lm + p[i];
    return acc * std::pow(x, -1.0L - r);
  };
  sum.add(-f_r(0) / 2);
  long double last = 0;
  for (int i = 1; i <= bernoulli_terms; ++i) {
    last = kBernoulliEven[static_cast<std::size_t>(i - 1)] / factorial_ld(2 * i) * f_r(2 * i - 1);
    sum.add(-last);
  }
  const long double eps = std::numeric_limits<long double>::epsilon();
  return {sum.value(), std::abs(last), 2 * eps * (abs_sum + std::pow(lm, static_cast<long double>(j + 1)))};
}

}  // namespace detail

/// Standard Stieltjes constant gamma_j, 0 <= j <= 4, by the limit
///   gamma_j = lim_m [ sum_{n<=m} log^j n / n - log^{j+1} m / (j+1) ]
/// with the Euler-Maclaurin tail applied at finite m. Throws
/// PrecisionError when `rel_precision` is below what long double can
/// deliver.
[[nodiscard]] inline double stieltjes(int j, double rel_precision = 1e-12) {
  if (j < 0 || j > 4) throw ArgumentError("stieltjes: index must be in [0, 4]");
  if (!(rel_precision > 0)) throw ArgumentError("stieltjes: precision must be positive");
  for (std::uint64_t m = 64; m <= 16384; m *= 2) {
    const auto est = detail::stieltjes_em(j, m, 12);
    const long double scale = std::max(std::abs(est.value), 1e-300L);
    if (est.rounding > rel_precision * scale) break;  // only gets worse with larger m
    if (est.truncation <= rel_precision * scale) return static_cast<double>(est.value);
  }
  std::ostringstream msg;
  msg << "stieltjes(" << j << "): relative precision " << rel_precision << " unreachable";
  throw PrecisionError(msg.str());
}

/// Euler's constant and gamma_1..gamma_4.
struct StieltjesSet {
  std::vector<double> gamma;  // standard normalization

  [[nodiscard]] double euler() const { return gamma.at(0); }

  /// c_j = (-1)^j gamma_j / j!  (coefficient of (s-1)^j in zeta(s) - 1/(s-1)).
  [[nodiscard]] double laurent_coefficient(int j) const {
    const double f = static_cast<double>(detail::factorial_ld(j));
    return ((j % 2) ? -1.0 : 1.0) * gamma.at(static_cast<std::size_t>(j)) / f;
  }
};

[[nodiscard]] inline StieltjesSet compute_stieltjes_set(int count = 5, double rel_precision = 1e-12) {
  StieltjesSet s;
  for (int j = 0; j < count; ++j) s.gamma.push_back(stieltjes(j, rel_precision));
  return s;
}

/// Process-wide constants, computed once.
[[nodiscard]] inline const StieltjesSet& stieltjes_constants() {
  static const StieltjesSet set = compute_stieltjes_set();
  return set;
}

[[nodiscard]] inline double euler_gamma() { return stieltjes_constants().euler(); }

// Constants cache: "key=value" lines, 17 significant digits, '#' comments.
inline void store_constants(const StieltjesSet& s, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# Stieltjes constants, standard normalization\n";
  out << std::setprecision(17);
  for (std::size_t j = 0; j < s.gamma.size(); ++j) out << "gamma_" << j << '=' << s.gamma[j] << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

[[nodiscard]] inline StieltjesSet load_constants(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<int, double> found;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos || line.rfind("gamma_", 0) != 0) {
      throw FormatError(path.string() + ": malformed line '" + line + "'");
    }
    try {
      found[std::stoi(line.substr(6, eq - 6))] = std::stod(line.substr(eq + 1));
    } catch (const std::exception&) {
      throw FormatError(path.string() + ": malformed line '" + line + "'");
    }
  }
  StieltjesSet s;
  for (int j = 0; found.count(j); ++j) s.gamma.push_back(found[j]);
  if (s.gamma.size() != found.size() || s.gamma.empty()) throw FormatError(path.string() + ": missing gamma_j");
  return s;
}

// ---------------------------------------------------------------------------
// Truncated Laurent series about s = 1 (variable u = s - 1)
// ---------------------------------------------------------------------------

inline constexpr int kLaurentTerms = 8;

struct LaurentSeries {
  int lowest = 0;                    // power of u carried by c[0]
  std::vector<long double> c;        // kLaurentTerms coefficients

  [[nodiscard]] long double coeff(int power) const {
    const int i = power - lowest;
    return (i >= 0 && i < static_cast<int>(c.size())) ? c[static_cast<std::size_t>(i)] : 0.0L;
  }
};

[[nodiscard]] inline LaurentSeries operator*(const LaurentSeries& a, const LaurentSeries& b) {
  LaurentSeries r;
  r.lowest = a.lowest + b.lowest;
  r.c.assign(kLaurentTerms, 0.0L);
  for (std::size_t i = 0; i < a.c.size(); ++i) {
    for (std::size_t j = 0; i + j < kLaurentTerms && j < b.c.size(); ++j) r.c[i + j] += a.c[i] * b.c[j];
  }
  return r;
}

[[nodiscard]] inline LaurentSeries zeta_laurent(const StieltjesSet& g) {
  LaurentSeries z;
  z.lowest = -1;
  z.c.assign(kLaurentTerms, 0.0L);
  z.c[0] = 1.0L;
  for (int j = 0; j + 1 < kLaurentTerms && j < static_cast<int>(g.gamma.size()); ++j) {
    z.c[static_cast<std::size_t>(j + 1)] = g.laurent_coefficient(j);
  }
  return z;
}

// ---------------------------------------------------------------------------
// Main-term polynomial
// ---------------------------------------------------------------------------

/// P_{k-1}(t) = sum_j coeffs[j] t^j, t = log x.
struct MainTermPoly {
  int k = 0;
  Poly coeffs;

  [[nodiscard]] double operator()(double t) const { return compensated_horner(coeffs, t); }
};

/// Residue of x^{s-1} zeta^k(s) / s at s = 1, as a polynomial in log x.
/// zeta^k / s is expanded as a Laurent series; multiplying by
/// x^u = sum t^i u^i / i! picks P's coefficient of t^i from the u^{-1-i}
/// term.
[[nodiscard]] inline MainTermPoly main_term_poly(int k, const StieltjesSet& g = stieltjes_constants()) {
  if (k < 1 || k > 4) throw ArgumentError("main_term_poly supports 1 <= k <= 4");
  const LaurentSeries z = zeta_laurent(g);
  LaurentSeries prod = z;
  for (int i = 1; i < k; ++i) prod = prod * z;
  LaurentSeries inv_s;
  inv_s.lowest = 0;
  inv_s.c.assign(kLaurentTerms, 0.0L);
  for (int i = 0; i < kLaurentTerms; ++i) inv_s.c[static_cast<std::size_t>(i)] = (i % 2) ? -1.0L : 1.0L;
  prod = prod * inv_s;

  MainTermPoly p;
  p.k = k;
  p.coeffs.resize(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    p.coeffs[static_cast<std::size_t>(i)] = static_cast<double>(prod.coeff(-1 - i) / detail::factorial_ld(i));
  }
  return p;
}

/// x * P(log x) as an unevaluated sum hi + lo (double-double), so callers
/// subtracting it from an exact integer keep the full cancellation.
[[nodiscard]] inline std::pair<double, double> main_term_dd(const Poly& coeffs, double x) {
  const double t = std::log(x);
  double s = coeffs.empty() ? 0.0 : coeffs.back();
  double err = 0.0;
  for (std::size_t i = coeffs.size(); i-- > 1;) {
    double p, pe, se;
    two_prod(s, t, p, pe);
    two_sum(p, coeffs[i - 1], s, se);
    err = err * t + (pe + se);
  }
  double hi, lo;
  two_prod(x, s, hi, lo);
  lo += x * err;
  two_sum(hi, lo, hi, lo);
  return {hi, lo};
}

/// x * P_{k-1}(log x).
[[nodiscard]] inline double eval_main_term(const MainTermPoly& poly, double x) {
  if (!(x > 0)) throw RangeError("eval_main_term needs x > 0");
  const auto [hi, lo] = main_term_dd(poly.coeffs, x);
  return hi + lo;
}

}  // namespace divlab
