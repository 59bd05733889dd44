#pragma once

// Storage for I(t) = integral_0^t |zeta(1/2 + iu)|^2 du on a panel grid.
//
// Each panel keeps the Legendre coefficients of the degree-7 polynomial
// interpolating |zeta|^2 at its Gauss nodes, so I(t) can be evaluated
// anywhere inside a panel without touching zeta again. The binary cache
// ("EZT1") uses the same discipline as the divisor tables:
//   "EZT1" | u64 panels | u32 order | f64 t_max | f64 rs_min_t
//          | u32 rs_order | f64 panel_scale | f64 em_factor | u32 em_bernoulli
//          | f64 grid[panels+1] | f64 cumsq[panels+1] | f64 legendre[panels*order]
//          | u64 fnv1a(payload)

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <vector>

#include "divlab/arith_core.hpp"
#include "divlab/errors.hpp"
#include "divlab/numeric.hpp"

namespace divlab {

inline constexpr int kZetaPanelOrder = 8;

enum class ZetaMethod { Auto, RiemannSiegel, EulerMaclaurin };

struct ZetaLineConfig {
  ZetaMethod method = ZetaMethod::Auto;
  double rs_min_t = 200.0;       // Auto switches to Riemann-Siegel above this height
  int rs_correction_order = 4;   // C_0 .. C_order
  double em_factor = 2.0;        // Euler-Maclaurin uses N = ceil(max(10, em_factor |t|)) terms
  int em_bernoulli = 4;
  double panel_max = 0.25;
  double panel_scale = 1.0;      // multiplies the oscillation-scale panel width
  double max_t_critical = 1.0e5;
  double max_t_off_line = 1.0e4;

  /// Panel width at height t: a quarter of the local oscillation scale
  /// 2 pi / log(t / 2 pi) of |zeta(1/2+it)|^2, capped at panel_max.
  [[nodiscard]] double panel_width(double t) const {
    const double osc = std::numbers::pi / (2.0 * std::log(t / (2.0 * std::numbers::pi) + 2.0));
    return panel_scale * std::min(panel_max, osc);
  }
};

namespace detail {

/// P_k(x) for k = 0..n-1.
inline void legendre_values(double x, int n, double* out) {
  out[0] = 1.0;
  if (n > 1) out[1] = x;
  for (int k = 2; k < n; ++k) out[k] = ((2.0 * k - 1) * x * out[k - 1] - (k - 1.0) * out[k - 2]) / k;
}

}  // namespace detail

struct CumulativeZetaTable {
  ZetaLineConfig config;
  double t_max = 0.0;
  std::vector<double> grid;      // panel boundaries, grid[0] = 0, grid.back() = t_max
  std::vector<double> cumsq;     // I(grid[i])
  std::vector<double> legendre;  // kZetaPanelOrder coefficients per panel

  [[nodiscard]] std::size_t panels() const { return grid.empty() ? 0 : grid.size() - 1; }

  /// Index i with grid[i] <= x < grid[i+1] (last panel includes t_max).
  [[nodiscard]] std::size_t panel_of(double x) const {
    if (x < 0 || x > t_max) throw RangeError("cumulative zeta table: t outside [0, t_max]");
    auto it = std::upper_bound(grid.begin(), grid.end(), x);
    std::size_t i = static_cast<std::size_t>(it - grid.begin());
    i = i == 0 ? 0 : i - 1;
    return std::min(i, panels() - 1);
  }

  /// Integral of the panel interpolant from grid[i] to x.
  [[nodiscard]] double partial_panel(std::size_t i, double x) const {
    const double a = grid[i], b = grid[i + 1];
    const double half = 0.5 * (b - a);
    const double xi = std::clamp((x - a) / half - 1.0, -1.0, 1.0);
    double p[kZetaPanelOrder + 1];
    detail::legendre_values(xi, kZetaPanelOrder + 1, p);
    const double* c = &legendre[i * kZetaPanelOrder];
    double acc = c[0] * (xi + 1.0);
    for (int k = 1; k < kZetaPanelOrder; ++k) acc += c[k] * (p[k + 1] - p[k - 1]) / (2.0 * k + 1.0);
    return half * acc;
  }

  /// I(x) from the stored interpolants.
  [[nodiscard]] double integral_to(double x) const {
    const std::size_t i = panel_of(x);
    if (x == grid[i]) return cumsq[i];
    return cumsq[i] + partial_panel(i, x);
  }

  /// Interpolated |zeta(1/2+ix)|^2.
  [[nodiscard]] double density(double x) const {
    const std::size_t i = panel_of(x);
    const double a = grid[i], b = grid[i + 1];
    const double xi = std::clamp(2.0 * (x - a) / (b - a) - 1.0, -1.0, 1.0);
    double p[kZetaPanelOrder];
    detail::legendre_values(xi, kZetaPanelOrder, p);
    double acc = 0;
    for (int k = 0; k < kZetaPanelOrder; ++k) acc += legendre[i * kZetaPanelOrder + k] * p[k];
    return acc;
  }

  friend bool operator==(const CumulativeZetaTable& a, const CumulativeZetaTable& b) {
    return a.t_max == b.t_max && a.grid == b.grid && a.cumsq == b.cumsq && a.legendre == b.legendre;
  }
};

inline void store_zeta_table(const CumulativeZetaTable& t, const std::filesystem::path& path) {
  detail::LeWriter w(path);
  w.raw("EZT1", 4);
  w.put(static_cast<std::uint64_t>(t.panels()));
  w.put(static_cast<std::uint32_t>(kZetaPanelOrder));
  w.put_double(t.t_max);
  w.put_double(t.config.rs_min_t);
  w.put(static_cast<std::uint32_t>(t.config.rs_correction_order));
  w.put_double(t.config.panel_scale);
  w.put_double(t.config.em_factor);
  w.put(static_cast<std::uint32_t>(t.config.em_bernoulli));
  for (double g : t.grid) w.put_double(g);
  for (double c : t.cumsq) w.put_double(c);
  for (double l : t.legendre) w.put_double(l);
  w.finish();
}

[[nodiscard]] inline CumulativeZetaTable load_zeta_table(const std::filesystem::path& path) {
  detail::LeReader r(path, "EZT1");
  CumulativeZetaTable t;
  const auto panels = r.get<std::uint64_t>();
  const auto order = r.get<std::uint32_t>();
  if (order != kZetaPanelOrder) throw VersionError(path.string() + ": unsupported panel order");
  t.t_max = r.get_double();
  t.config.rs_min_t = r.get_double();
  t.config.rs_correction_order = static_cast<int>(r.get<std::uint32_t>());
  t.config.panel_scale = r.get_double();
  t.config.em_factor = r.get_double();
  t.config.em_bernoulli = static_cast<int>(r.get<std::uint32_t>());
  if (panels == 0 || panels > r.remaining() / 8 ||
      r.remaining() != 8 * ((panels + 1) * 2 + panels * order)) {
    throw FormatError(path.string() + ": payload size does not match header");
  }
  t.grid.resize(panels + 1);
  t.cumsq.resize(panels + 1);
  t.legendre.resize(panels * order);
  for (auto& g : t.grid) g = r.get_double();
  for (auto& c : t.cumsq) c = r.get_double();
  for (auto& l : t.legendre) l = r.get_double();
  if (t.grid.front() != 0.0 || t.grid.back() != t.t_max) throw FormatError(path.string() + ": bad grid");
  return t;
}

}  // namespace divlab
