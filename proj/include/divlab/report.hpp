#pragma once

// MomentReport serialization: CSV (with '#' footer), JSON, SVG log-log plot.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "divlab/errors.hpp"
#include "divlab/moment_engine.hpp"

namespace divlab {

enum class ReportFormat { Csv, Json, Svg };

[[nodiscard]] inline ReportFormat parse_format(const std::string& s) {
  if (s == "csv") return ReportFormat::Csv;
  if (s == "json") return ReportFormat::Json;
  if (s == "svg") return ReportFormat::Svg;
  throw ArgumentError("unknown report format '" + s + "'");
}

namespace detail {

// Shortest text that reads back to the same double.
inline std::string fmt_double(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw FormatError("bad number '" + s + "'");
  }
  if (used != s.size()) throw FormatError("bad number '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace detail

inline constexpr const char* kCsvHeader = "X,value,normalized,bound,ratio";

inline void write_csv(const MomentReport& r, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const auto& s : r.samples) {
    out << detail::fmt_double(s.X) << ',' << detail::fmt_double(s.value) << ',' << detail::fmt_double(s.normalized)
        << ',' << detail::fmt_double(s.bound) << ',' << detail::fmt_double(s.ratio) << '\n';
  }
  out << "# kind=" << r.kind << '\n';
  out << "# reference_exponent=" << detail::fmt_double(r.reference_exponent) << '\n';
  out << "# guide_exponents=";
  for (std::size_t i = 0; i < r.guide_exponents.size(); ++i) {
    out << (i ? ";" : "") << detail::fmt_double(r.guide_exponents[i]);
  }
  out << '\n';
  out << "# fitted_exponent=" << detail::fmt_double(r.fitted_exponent) << '\n';
  out << "# fit_stderr=" << detail::fmt_double(r.fit_stderr) << '\n';
}

[[nodiscard]] inline MomentReport parse_csv(std::istream& in) {
  MomentReport r;
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) throw FormatError("csv: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (line.size() < 2 || eq == std::string::npos) throw FormatError("csv: bad footer line");
      const std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
      if (key == "kind") {
        r.kind = val;
      } else if (key == "reference_exponent") {
        r.reference_exponent = detail::parse_double(val);
      } else if (key == "guide_exponents") {
        if (!val.empty()) {
          for (const auto& g : detail::split(val, ';')) r.guide_exponents.push_back(detail::parse_double(g));
        }
      } else if (key == "fitted_exponent") {
        r.fitted_exponent = detail::parse_double(val);
      } else if (key == "fit_stderr") {
        r.fit_stderr = detail::parse_double(val);
      }
      continue;
    }
    const auto f = detail::split(line, ',');
    if (f.size() != 5) throw FormatError("csv: expected 5 columns");
    r.samples.push_back({detail::parse_double(f[0]), detail::parse_double(f[1]), detail::parse_double(f[2]),
                         detail::parse_double(f[3]), detail::parse_double(f[4])});
  }
  return r;
}

[[nodiscard]] inline nlohmann::json to_json(const MomentReport& r) {
  nlohmann::json j;
  j["kind"] = r.kind;
  j["reference_exponent"] = r.reference_exponent;
  j["guide_exponents"] = r.guide_exponents;
  j["fitted_exponent"] = r.fitted_exponent;
  j["fit_stderr"] = r.fit_stderr;
  j["samples"] = nlohmann::json::array();
  for (const auto& s : r.samples) {
    j["samples"].push_back(
        {{"X", s.X}, {"value", s.value}, {"normalized", s.normalized}, {"bound", s.bound}, {"ratio", s.ratio}});
  }
  return j;
}

[[nodiscard]] inline MomentReport from_json(const nlohmann::json& j) {
  try {
    MomentReport r;
    r.kind = j.at("kind").get<std::string>();
    r.reference_exponent = j.at("reference_exponent").get<double>();
    r.guide_exponents = j.at("guide_exponents").get<std::vector<double>>();
    r.fitted_exponent = j.at("fitted_exponent").get<double>();
    r.fit_stderr = j.at("fit_stderr").get<double>();
    for (const auto& s : j.at("samples")) {
      r.samples.push_back({s.at("X").get<double>(), s.at("value").get<double>(), s.at("normalized").get<double>(),
                           s.at("bound").get<double>(), s.at("ratio").get<double>()});
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("json report: ") + e.what());
  }
}

/// Log-log scatter of |value| against X with one dashed guide line per
/// guide exponent, anchored at the first sample.
inline void write_svg(const MomentReport& r, std::ostream& out) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 30, B = 50;
  std::vector<std::pair<double, double>> pts;
  for (const auto& s : r.samples) {
    if (s.X > 0 && s.value != 0 && std::isfinite(s.value)) pts.emplace_back(std::log10(s.X), std::log10(std::abs(s.value)));
  }
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty()) {
    x0 = x1 = pts[0].first;
    y0 = y1 = pts[0].second;
    for (auto [x, y] : pts) {
      x0 = std::min(x0, x), x1 = std::max(x1, x);
      y0 = std::min(y0, y), y1 = std::max(y1, y);
    }
    // Keep guide lines inside the frame.
    for (double e : r.guide_exponents) {
      const double ye = pts[0].second + e * (x1 - pts[0].first);
      y0 = std::min(y0, ye), y1 = std::max(y1, ye);
    }
  }
  if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  auto sx = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto sy = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };
  auto f = [](double v) { return detail::fmt_double(std::round(v * 100) / 100); };

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"18\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
      << r.kind << " (fitted exponent " << f(r.fitted_exponent) << ")</text>\n";
  out << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\"" << H - T - B
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">log10 X</text>\n";
  out << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
      << ")\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">log10 |value|</text>\n";
  for (int i = 0; i <= 4; ++i) {
    const double xv = x0 + (x1 - x0) * i / 4, yv = y0 + (y1 - y0) * i / 4;
    out << "<text x=\"" << f(sx(xv)) << "\" y=\"" << H - B + 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">" << f(xv) << "</text>\n";
    out << "<text x=\"" << L - 6 << "\" y=\"" << f(sy(yv) + 3)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">" << f(yv) << "</text>\n";
  }
  static constexpr const char* kColors[] = {"#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  for (std::size_t i = 0; i < r.guide_exponents.size() && !pts.empty(); ++i) {
    const double e = r.guide_exponents[i];
    const double ya = pts[0].second + e * (x0 - pts[0].first), yb = pts[0].second + e * (x1 - pts[0].first);
    out << "<line class=\"guide\" data-exponent=\"" << detail::fmt_double(e) << "\" x1=\"" << f(sx(x0)) << "\" y1=\""
        << f(sy(ya)) << "\" x2=\"" << f(sx(x1)) << "\" y2=\"" << f(sy(yb)) << "\" stroke=\"" << kColors[i % 5]
        << "\" stroke-dasharray=\"6 4\"/>\n";
    out << "<text x=\"" << L + 8 << "\" y=\"" << T + 16 + 14 * static_cast<double>(i) << "\" fill=\"" << kColors[i % 5]
        << "\" font-family=\"sans-serif\" font-size=\"11\">slope " << f(e) << "</text>\n";
  }
  for (auto [x, y] : pts) {
    out << "<circle class=\"sample\" cx=\"" << f(sx(x)) << "\" cy=\"" << f(sy(y)) << "\" r=\"3.5\" fill=\"#1f77b4\"/>\n";
  }
  out << "</svg>\n";
}

inline void emit_report(const MomentReport& r, ReportFormat fmt, std::ostream& out) {
  if (r.samples.empty()) throw ArgumentError("emit_report: empty report");
  switch (fmt) {
    case ReportFormat::Csv: write_csv(r, out); break;
    case ReportFormat::Json: out << to_json(r).dump(2) << '\n'; break;
    case ReportFormat::Svg: write_svg(r, out); break;
  }
  if (!out) throw IoError("emit_report: write failed");
}

inline void emit_report(const MomentReport& r, ReportFormat fmt, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  emit_report(r, fmt, out);
}

[[nodiscard]] inline MomentReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (path.extension() == ".csv") return parse_csv(in);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return from_json(j);
}

}  // namespace divlab
