#pragma once

// Error terms Delta_k(x), Delta*(x), E(t), E*(t) behind one evaluation
// interface.
//
// Every handle has the shape
//
//   value(x) = sum_i w_i * cum_i[floor(x / h_i)]      (step parts)
//            + sum_j w_j * I_j(x)                      (zeta parts)
//            - x * Q(log x)                            (smooth part)
//
// where cum_i is an exact integer prefix-sum array with breakpoints at
// multiples of h_i, and I_j is a cumulative |zeta|^2 table. Between
// consecutive breakpoints of all parts a handle is smooth; PieceWalker
// enumerates those pieces for the integrators.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "divlab/arith_core.hpp"
#include "divlab/errors.hpp"
#include "divlab/numeric.hpp"
#include "divlab/residue_poly.hpp"
#include "divlab/zeta_table.hpp"

namespace divlab {

enum class TermKind { DeltaK, DeltaStar, E, EStar, Combination };

struct StepPart {
  double weight = 1.0;
  double spacing = 1.0;
  std::shared_ptr<const std::vector<std::int64_t>> cum;

  [[nodiscard]] std::size_t index_at(double x) const {
    auto m = static_cast<std::int64_t>(std::floor(x / spacing));
    // x / spacing can round across an integer; settle on the exact cell.
    while (m > 0 && static_cast<double>(m) * spacing > x) --m;
    while (static_cast<double>(m + 1) * spacing <= x) ++m;
    return static_cast<std::size_t>(std::max<std::int64_t>(m, 0));
  }
  [[nodiscard]] double boundary_after(std::size_t m) const { return static_cast<double>(m + 1) * spacing; }
  [[nodiscard]] double contribution(std::size_t m) const {
    if (m >= cum->size()) throw RangeError("step part: index beyond table");
    return weight * static_cast<double>((*cum)[m]);
  }
};

struct ZetaPart {
  double weight = 1.0;
  std::shared_ptr<const CumulativeZetaTable> table;
};

class ErrorTermHandle {
 public:
  TermKind kind = TermKind::Combination;
  int k = 0;
  std::string name;
  double lo = 0.0;  // domain
  double hi = 0.0;
  std::vector<StepPart> steps;
  std::vector<ZetaPart> zetas;
  Poly smooth;  // Q; the smooth part subtracted is x * Q(log x)

  [[nodiscard]] bool exact_integrable() const { return zetas.empty(); }

  void check_domain(double x) const {
    if (!(x >= lo && x <= hi)) {
      throw RangeError(name + ": x = " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
    }
  }

  /// Smooth part x * Q(log x) split as hi + lo.
  [[nodiscard]] std::pair<double, double> smooth_at(double x) const {
    if (x == 0.0 || smooth.empty()) return {0.0, 0.0};
    return main_term_dd(smooth, x);
  }

  /// Right-continuous value at x.
  [[nodiscard]] double operator()(double x) const {
    check_domain(x);
    double s = 0.0;
    for (const auto& p : steps) s += p.contribution(p.index_at(x));
    return finish(s, x);
  }

  /// lim_{y -> x-} value(y).
  [[nodiscard]] double left_limit(double x) const {
    check_domain(x);
    double s = 0.0;
    for (const auto& p : steps) {
      std::size_t m = p.index_at(x);
      if (m > 0 && static_cast<double>(m) * p.spacing == x) --m;
      s += p.contribution(m);
    }
    return finish(s, x);
  }

 private:
  [[nodiscard]] double finish(double step_sum, double x) const {
    double z = 0.0;
    for (const auto& p : zetas) z += p.weight * p.table->integral_to(x);
    const auto [mh, ml] = smooth_at(x);
    return ((step_sum - mh) - ml) + z;
  }
};

// ---------------------------------------------------------------------------
// Factories
// ---------------------------------------------------------------------------

/// Delta_k(x) = D_k(x) - x P_{k-1}(log x) on [1, limit].
[[nodiscard]] inline ErrorTermHandle make_delta_handle(const DivisorTable& table, const MainTermPoly& poly) {
  if (table.k() != poly.k) throw ArgumentError("make_delta_handle: table and polynomial orders differ");
  ErrorTermHandle h;
  h.kind = TermKind::DeltaK;
  h.k = table.k();
  h.name = "delta" + std::to_string(table.k());
  h.lo = 1.0;
  h.hi = static_cast<double>(table.limit());
  h.steps.push_back({1.0, 1.0, std::make_shared<const std::vector<std::int64_t>>(table.prefix_sums())});
  h.smooth = poly.coeffs;
  return h;
}

/// Delta*(x) = (1/2) sum_{n<=4x} (-1)^n d(n) - x(log x + 2 gamma - 1) on [0, limit/4].
[[nodiscard]] inline ErrorTermHandle make_delta_star_handle(const DivisorTable& table,
                                                            const MainTermPoly& p1 = main_term_poly(2)) {
  if (table.k() != 2) throw ArgumentError("Delta* needs the d(n) table (k = 2)");
  ErrorTermHandle h;
  h.kind = TermKind::DeltaStar;
  h.k = 2;
  h.name = "delta_star";
  h.lo = 0.0;
  h.hi = static_cast<double>(table.limit()) / 4.0;
  h.steps.push_back({0.5, 0.25, std::make_shared<const std::vector<std::int64_t>>(table.alternating_prefix_sums())});
  h.smooth = p1.coeffs;
  return h;
}

/// x (log(x / 2 pi) + 2 gamma - 1) written as x * Q(log x).
[[nodiscard]] inline Poly e_main_poly(const MainTermPoly& p1 = main_term_poly(2)) {
  return poly_shift(p1.coeffs, -std::log(2.0 * std::numbers::pi));
}

/// E(t) = I(t) - t (log(t / 2 pi) + 2 gamma - 1) on [0, t_max].
[[nodiscard]] inline ErrorTermHandle make_e_handle(std::shared_ptr<const CumulativeZetaTable> table) {
  ErrorTermHandle h;
  h.kind = TermKind::E;
  h.name = "E";
  h.lo = 0.0;
  h.hi = table->t_max;
  h.zetas.push_back({1.0, std::move(table)});
  h.smooth = e_main_poly();
  return h;
}

/// 2 pi Delta*(t / 2 pi) as a function of t: breakpoints at multiples of
/// pi/2, step weight pi, smooth part identical to the one of E.
[[nodiscard]] inline ErrorTermHandle make_scaled_delta_star_handle(const DivisorTable& table) {
  if (table.k() != 2) throw ArgumentError("Delta* needs the d(n) table (k = 2)");
  ErrorTermHandle h;
  h.kind = TermKind::DeltaStar;
  h.k = 2;
  h.name = "2pi_delta_star(t/2pi)";
  h.lo = 0.0;
  h.hi = static_cast<double>(table.limit()) * std::numbers::pi / 2.0;
  h.steps.push_back({std::numbers::pi, std::numbers::pi / 2.0,
                     std::make_shared<const std::vector<std::int64_t>>(table.alternating_prefix_sums())});
  h.smooth = e_main_poly();
  return h;
}

/// a f + b g on the intersection of the domains.
[[nodiscard]] inline ErrorTermHandle combine(const ErrorTermHandle& f, double a, const ErrorTermHandle& g, double b) {
  ErrorTermHandle h;
  h.kind = TermKind::Combination;
  h.name = "combination(" + f.name + "," + g.name + ")";
  h.lo = std::max(f.lo, g.lo);
  h.hi = std::min(f.hi, g.hi);
  if (!(h.lo <= h.hi)) throw ArgumentError("combine: domains do not overlap");
  for (auto p : f.steps) h.steps.push_back({a * p.weight, p.spacing, p.cum});
  for (auto p : g.steps) h.steps.push_back({b * p.weight, p.spacing, p.cum});
  for (auto p : f.zetas) h.zetas.push_back({a * p.weight, p.table});
  for (auto p : g.zetas) h.zetas.push_back({b * p.weight, p.table});
  h.smooth = poly_add(poly_scale(f.smooth, a), g.smooth, b);
  return h;
}

/// E*(t) = E(t) - 2 pi Delta*(t / 2 pi). The smooth parts cancel exactly.
[[nodiscard]] inline ErrorTermHandle make_e_star_handle(std::shared_ptr<const CumulativeZetaTable> table,
                                                        const DivisorTable& dtable) {
  ErrorTermHandle h = combine(make_e_handle(std::move(table)), 1.0, make_scaled_delta_star_handle(dtable), -1.0);
  h.kind = TermKind::EStar;
  h.name = "E_star";
  return h;
}

// ---------------------------------------------------------------------------
// Piece enumeration
// ---------------------------------------------------------------------------

/// Walks [start, end] through the union of all breakpoints of a set of
/// handles. On each piece every handle is smooth.
class PieceWalker {
 public:
  PieceWalker(std::vector<const ErrorTermHandle*> handles, double start, double end)
      : handles_(std::move(handles)), cur_(start), end_(end) {
    for (const auto* h : handles_) {
      h->check_domain(start);
      h->check_domain(end);
      std::vector<std::size_t> s, z;
      for (const auto& p : h->steps) s.push_back(p.index_at(start));
      for (const auto& p : h->zetas) z.push_back(p.table->panel_of(start));
      step_idx_.push_back(std::move(s));
      panel_idx_.push_back(std::move(z));
    }
  }

  /// Moves to the next piece; false once [start, end] is exhausted.
  bool next() {
    if (started_) {
      if (b_ >= end_) return false;
      advance_past(b_);
      cur_ = b_;
    } else {
      started_ = true;
      if (cur_ >= end_) return false;
    }
    a_ = cur_;
    b_ = end_;
    for (std::size_t h = 0; h < handles_.size(); ++h) {
      const auto* H = handles_[h];
      for (std::size_t i = 0; i < H->steps.size(); ++i) b_ = std::min(b_, H->steps[i].boundary_after(step_idx_[h][i]));
      for (std::size_t j = 0; j < H->zetas.size(); ++j) {
        const auto& t = *H->zetas[j].table;
        const std::size_t p = panel_idx_[h][j];
        if (p + 1 < t.grid.size()) b_ = std::min(b_, t.grid[p + 1]);
      }
    }
    return true;
  }

  [[nodiscard]] double a() const { return a_; }
  [[nodiscard]] double b() const { return b_; }

  /// Sum of step contributions of handle h on the current piece.
  [[nodiscard]] double step_sum(std::size_t h) const {
    double s = 0.0;
    const auto* H = handles_[h];
    for (std::size_t i = 0; i < H->steps.size(); ++i) s += H->steps[i].contribution(step_idx_[h][i]);
    return s;
  }

  /// Value of handle h at x inside the current piece (right-continuous
  /// at a(), left limit at b()).
  [[nodiscard]] double eval(std::size_t h, double x) const {
    const auto* H = handles_[h];
    double z = 0.0;
    for (std::size_t j = 0; j < H->zetas.size(); ++j) {
      const auto& t = *H->zetas[j].table;
      const std::size_t p = panel_idx_[h][j];
      z += H->zetas[j].weight * (t.cumsq[p] + t.partial_panel(p, x));
    }
    const auto [mh, ml] = H->smooth_at(x);
    return ((step_sum(h) - mh) - ml) + z;
  }

  [[nodiscard]] const ErrorTermHandle& handle(std::size_t h) const { return *handles_[h]; }

 private:
  void advance_past(double x) {
    for (std::size_t h = 0; h < handles_.size(); ++h) {
      const auto* H = handles_[h];
      for (std::size_t i = 0; i < H->steps.size(); ++i) {
        while (H->steps[i].boundary_after(step_idx_[h][i]) <= x) ++step_idx_[h][i];
      }
      for (std::size_t j = 0; j < H->zetas.size(); ++j) {
        const auto& t = *H->zetas[j].table;
        auto& p = panel_idx_[h][j];
        while (p + 2 < t.grid.size() && t.grid[p + 1] <= x) ++p;
      }
    }
  }

  std::vector<const ErrorTermHandle*> handles_;
  std::vector<std::vector<std::size_t>> step_idx_;
  std::vector<std::vector<std::size_t>> panel_idx_;
  double cur_;
  double end_;
  double a_ = 0.0, b_ = 0.0;
  bool started_ = false;
};

// ---------------------------------------------------------------------------
// Direct evaluations
// ---------------------------------------------------------------------------

/// Delta_k(x) = sum_{n<=x} d_k(n) - x P_{k-1}(log x). With left_limit the
/// sum runs over n < x instead.
[[nodiscard]] inline double delta_k(const DivisorTable& table, const MainTermPoly& poly, double x,
                                    bool left_limit = false) {
  if (table.k() != poly.k) throw ArgumentError("delta_k: table has k = " + std::to_string(table.k()) +
                                               ", polynomial has k = " + std::to_string(poly.k));
  if (!(x >= 1.0) || x > static_cast<double>(table.limit())) {
    throw RangeError("delta_k: x = " + std::to_string(x) + " outside [1, " + std::to_string(table.limit()) + "]");
  }
  std::uint64_t s = table.summatory(x);
  if (left_limit && x == std::floor(x)) s -= table[static_cast<std::uint64_t>(x)];
  const auto [mh, ml] = main_term_dd(poly.coeffs, x);
  return (static_cast<double>(s) - mh) - ml;
}

/// Delta*(x) through its alternating-sum form; the integer sum is exact
/// and halved only at the end.
[[nodiscard]] inline double delta_star(const DivisorTable& table, double x,
                                       const MainTermPoly& p1 = main_term_poly(2)) {
  if (table.k() != 2) throw ArgumentError("delta_star needs the d(n) table (k = 2)");
  if (!(x > 0.0) || 4.0 * x > static_cast<double>(table.limit())) {
    throw RangeError("delta_star: need 0 < x and 4x <= table limit");
  }
  const std::int64_t alt = table.alternating_summatory(4.0 * x);
  const auto [mh, ml] = main_term_dd(p1.coeffs, x);
  return (0.5 * static_cast<double>(alt) - mh) - ml;
}

/// Delta*(x) = -Delta(x) + 2 Delta(2x) - Delta(4x)/2.
[[nodiscard]] inline double delta_star_from_deltas(const DivisorTable& table, double x,
                                                   const MainTermPoly& p1 = main_term_poly(2)) {
  return -delta_k(table, p1, x) + 2.0 * delta_k(table, p1, 2.0 * x) - 0.5 * delta_k(table, p1, 4.0 * x);
}

// ---------------------------------------------------------------------------
// Sign-change scan
// ---------------------------------------------------------------------------

struct SignChangePair {
  double t1 = 0, t2 = 0;  // value at t1 > 0, value at t2 < 0
  double v1 = 0, v2 = 0;
};

struct SignChangeWindow {
  double lo = 0, hi = 0;
  std::optional<SignChangePair> pair;
};

/// Splits [range_lo, range_hi] into windows [T, T + C T^exponent] and
/// reports the largest positive and the most negative value in each. The
/// candidates are piece endpoints (just inside the right end, where the
/// step has not yet jumped) plus a few interior points for non-monotone
/// smooth parts.
[[nodiscard]] inline std::vector<SignChangeWindow> sign_change_scan(const ErrorTermHandle& h, double range_lo,
                                                                    double range_hi, double exponent,
                                                                    double constant_c = 1.0) {
  std::vector<SignChangeWindow> out;
  if (!(range_hi > range_lo)) return out;
  h.check_domain(range_lo);
  h.check_domain(range_hi);
  if (!(constant_c > 0)) throw ArgumentError("sign_change_scan: window constant must be positive");

  double T = range_lo;
  while (T < range_hi) {
    const double len = constant_c * std::pow(std::max(T, 1.0), exponent);
    const double end = std::min(range_hi, T + std::max(len, 1e-9));
    SignChangeWindow w{T, end, std::nullopt};
    double best_pos = 0.0, best_neg = 0.0, at_pos = 0.0, at_neg = 0.0;
    auto consider = [&](double x, double v) {
      if (v > best_pos) best_pos = v, at_pos = x;
      if (v < best_neg) best_neg = v, at_neg = x;
    };
    PieceWalker walker({&h}, T, end);
    while (walker.next()) {
      const double a = walker.a(), b = walker.b();
      if (b <= a) continue;
      const double inner = std::nextafter(b, a);
      consider(a, walker.eval(0, a));
      consider(inner, walker.eval(0, inner));
      for (double f : {0.25, 0.5, 0.75}) {
        const double x = a + f * (b - a);
        consider(x, walker.eval(0, x));
      }
    }
    if (best_pos > 0 && best_neg < 0) w.pair = SignChangePair{at_pos, at_neg, best_pos, best_neg};
    out.push_back(w);
    T = end;
  }
  return out;
}

}  // namespace divlab
