#pragma once

// Small numerical kernels shared by every module: error-free
// transformations, compensated accumulation, polynomial helpers,
// Gauss-Legendre rules and a deterministic block-parallel driver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <thread>
#include <vector>

#include "divlab/errors.hpp"

namespace divlab {

// ---------------------------------------------------------------------------
// Compensated summation
// ---------------------------------------------------------------------------

/// Neumaier's variant of Kahan summation. The running error term is kept
/// separately so that two accumulators can be merged without losing it.
template <typename T = double>
class CompensatedSum {
 public:
  constexpr CompensatedSum() = default;
  constexpr explicit CompensatedSum(T init) : sum_(init) {}

  constexpr void add(T x) {
    const T t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  constexpr CompensatedSum& operator+=(T x) {
    add(x);
    return *this;
  }

  constexpr void merge(const CompensatedSum& other) {
    add(other.sum_);
    comp_ += other.comp_;
  }

  [[nodiscard]] constexpr T value() const { return sum_ + comp_; }

 private:
  T sum_{0};
  T comp_{0};
};

/// Error-free sum: a + b = s + e exactly.
inline void two_sum(double a, double b, double& s, double& e) {
  s = a + b;
  const double bb = s - a;
  e = (a - (s - bb)) + (b - bb);
}

/// Error-free product via fused multiply-add.
inline void two_prod(double a, double b, double& p, double& e) {
  p = a * b;
  e = std::fma(a, b, -p);
}

// ---------------------------------------------------------------------------
// Polynomials (coefficient vectors, lowest degree first)
// ---------------------------------------------------------------------------

using Poly = std::vector<double>;

template <typename T>
[[nodiscard]] T horner(std::span<const double> c, T t) {
  T acc{0};
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + static_cast<T>(*it);
  return acc;
}

/// Horner's scheme with the rounding error of every step carried along
/// (Graillat-Langlois-Louvet). Accurate to about twice working precision.
[[nodiscard]] inline double compensated_horner(std::span<const double> c, double t) {
  if (c.empty()) return 0.0;
  double s = c.back();
  double err = 0.0;
  for (std::size_t i = c.size() - 1; i-- > 0;) {
    double p, pe, se;
    two_prod(s, t, p, pe);
    two_sum(p, c[i], s, se);
    err = err * t + (pe + se);
  }
  return s + err;
}

[[nodiscard]] inline Poly poly_derivative(const Poly& p) {
  if (p.size() <= 1) return {};
  Poly d(p.size() - 1);
  for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = static_cast<double>(i) * p[i];
  return d;
}

[[nodiscard]] inline Poly poly_add(const Poly& a, const Poly& b, double scale_b = 1.0) {
  Poly r(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) r[i] += scale_b * b[i];
  return r;
}

[[nodiscard]] inline Poly poly_scale(Poly p, double s) {
  for (auto& c : p) c *= s;
  return p;
}

/// Returns q with q(t) = p(t + shift).
[[nodiscard]] inline Poly poly_shift(const Poly& p, double shift) {
  Poly r(p.size(), 0.0);
  // Horner in polynomial arithmetic: r = (...(p_n)(t+s) + p_{n-1})...
  for (std::size_t i = p.size(); i-- > 0;) {
    // r <- r*(t+s) + p_i
    for (std::size_t j = r.size() - 1; j > 0; --j) r[j] = r[j - 1] + shift * r[j];
    r[0] = shift * r[0] + p[i];
  }
  return r;
}

// ---------------------------------------------------------------------------
// Gauss-Legendre rules on [-1, 1]
// ---------------------------------------------------------------------------

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Newton iteration on the Legendre recurrence; nodes accurate to ~1 ulp.
[[nodiscard]] inline GaussRule make_gauss_legendre(int n) {
  if (n < 1) throw ArgumentError("Gauss-Legendre order must be positive");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    long double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    long double dp = 0;
    for (int iter = 0; iter < 100; ++iter) {
      long double p0 = 1, p1 = 0;
      for (int j = 1; j <= n; ++j) {
        const long double p2 = p1;
        p1 = p0;
        p0 = ((2.0L * j - 1) * z * p1 - (j - 1.0L) * p2) / j;
      }
      dp = n * (z * p0 - p1) / (z * z - 1);
      const long double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-19L) break;
    }
    long double p0 = 1, p1 = 0;
    for (int j = 1; j <= n; ++j) {
      const long double p2 = p1;
      p1 = p0;
      p0 = ((2.0L * j - 1) * z * p1 - (j - 1.0L) * p2) / j;
    }
    dp = n * (z * p0 - p1) / (z * z - 1);
    const auto w = static_cast<double>(2 / ((1 - z * z) * dp * dp));
    rule.nodes[static_cast<std::size_t>(i)] = -static_cast<double>(z);
    rule.nodes[static_cast<std::size_t>(n - 1 - i)] = static_cast<double>(z);
    rule.weights[static_cast<std::size_t>(i)] = w;
    rule.weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
  if (n % 2 == 1) rule.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
  return rule;
}

template <int N>
[[nodiscard]] const GaussRule& gauss_legendre() {
  static const GaussRule rule = make_gauss_legendre(N);
  return rule;
}

/// Integrates f over [a, b] with an N-point rule.
template <int N, typename F>
[[nodiscard]] double gauss_integrate(F&& f, double a, double b) {
  const auto& rule = gauss_legendre<N>();
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (b + a);
  double acc = 0.0;
  for (int i = 0; i < N; ++i) acc += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return acc * half;
}

// ---------------------------------------------------------------------------
// Deterministic block parallelism
// ---------------------------------------------------------------------------

/// Runs body(block) for block in [0, blocks) on up to `threads` workers.
/// Each block writes only to its own output slot, so the caller can
/// reduce results in block order and get bitwise identical output for
/// any thread count.
inline void parallel_blocks(std::size_t blocks, unsigned threads,
                            const std::function<void(std::size_t)>& body) {
  if (threads <= 1 || blocks <= 1) {
    for (std::size_t b = 0; b < blocks; ++b) body(b);
    return;
  }
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(threads, blocks));
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t b = w; b < blocks; b += workers) body(b);
    });
  }
}

[[nodiscard]] inline unsigned default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1u : hc;
}

// ---------------------------------------------------------------------------
// Sampling grids
// ---------------------------------------------------------------------------

/// {x_min * 2^j} up to x_max; x_max itself is appended when it is not on
/// the grid, so the top of the requested range is always sampled.
[[nodiscard]] inline std::vector<double> dyadic_grid(double x_min, double x_max) {
  if (!(x_min > 0) || !(x_max >= x_min)) throw ArgumentError("dyadic_grid needs 0 < x_min <= x_max");
  std::vector<double> xs;
  for (double x = x_min; x <= x_max * (1 + 1e-12); x *= 2) xs.push_back(std::min(x, x_max));
  if (xs.back() < x_max * (1 - 1e-12)) xs.push_back(x_max);
  return xs;
}

}  // namespace divlab
