#pragma once

// Text formats: curve CSV, treadmill path CSV, flux report CSV, OBJ meshes,
// raw 4D vertex CSV and the solver's JSON sidecar.

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cmc/conservation.hpp"
#include "cmc/curve.hpp"
#include "cmc/error.hpp"
#include "cmc/solver.hpp"
#include "cmc/treadmill.hpp"
#include "cmc/twizzler.hpp"

namespace cmc::io {

inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline double parse_double(std::string_view s, std::size_t line) {
  s = trim(s);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ": not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(trim(s.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

/// Numeric CSV with a required header; '#' lines and blank lines are skipped.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

inline Table read_table(std::istream& in) {
  Table t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view s = trim(line);
    if (s.empty() || s.front() == '#') continue;
    auto cells = split(s);
    if (!have_header) {
      for (auto c : cells) t.header.emplace_back(c);
      have_header = true;
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw Error(ErrorKind::ParseError, "line " + std::to_string(lineno) + ": expected " +
                                             std::to_string(t.header.size()) + " fields");
    }
    std::vector<double> row;
    for (auto c : cells) row.push_back(parse_double(c, lineno));
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw Error(ErrorKind::ParseError, "empty input");
  if (t.rows.empty()) throw Error(ErrorKind::ParseError, "no data rows");
  return t;
}

inline void require_header(const Table& t, std::initializer_list<std::string_view> cols) {
  std::size_t i = 0;
  for (auto c : cols) {
    if (i >= t.header.size() || t.header[i] != c) {
      throw Error(ErrorKind::ParseError, "unexpected header, column " + std::to_string(i + 1) + " should be " +
                                             std::string(c));
    }
    ++i;
  }
}

// --- curves -----------------------------------------------------------------

inline BaseCurve read_curve(std::istream& in) {
  const Table t = read_table(in);
  require_header(t, {"u", "gx", "gy", "dgx", "dgy"});
  const bool second = t.header.size() == 7;
  if (second) require_header(t, {"u", "gx", "gy", "dgx", "dgy", "ddgx", "ddgy"});
  else if (t.header.size() != 5) throw Error(ErrorKind::ParseError, "curve CSV has 5 or 7 columns");
  CurveSamples s;
  for (const auto& r : t.rows) {
    s.u.push_back(r[0]);
    s.pos.emplace_back(r[1], r[2]);
    s.d1.emplace_back(r[3], r[4]);
    if (second) s.d2.emplace_back(r[5], r[6]);
  }
  return BaseCurve::sampled(std::move(s));
}

/// Writes the sample nodes of a sampled curve, or n uniform samples otherwise.
inline void write_curve(std::ostream& out, const BaseCurve& c, std::size_t n = 1001) {
  out << "u,gx,gy,dgx,dgy,ddgx,ddgy\n";
  const std::vector<double> grid = c.check_grid(n);
  for (double u : grid) {
    const CurveJet j = c(u);
    out << fmt(u) << ',' << fmt(j.pos.real()) << ',' << fmt(j.pos.imag()) << ',' << fmt(j.d1.real()) << ','
        << fmt(j.d1.imag()) << ',' << fmt(j.d2.real()) << ',' << fmt(j.d2.imag()) << '\n';
  }
}

// --- treadmill paths --------------------------------------------------------

inline TreadmillPath read_path(std::istream& in, double ell = 1.0) {
  const Table t = read_table(in);
  require_header(t, {"t", "x", "y"});
  TreadmillPath p;
  p.ell = ell;
  for (const auto& r : t.rows) p.push(r[0], {r[1], r[2]});
  p.validate();
  return p;
}

inline void write_path(std::ostream& out, const TreadmillPath& p) {
  out << "t,x,y\n";
  for (std::size_t i = 0; i < p.size(); ++i) out << fmt(p.t[i]) << ',' << fmt(p.x[i]) << ',' << fmt(p.y[i]) << '\n';
}

// --- flux reports -----------------------------------------------------------

inline void write_flux_report(std::ostream& out, const FluxReport& r) {
  out << "u,omega,closed_form,abs_diff\n";
  for (std::size_t i = 0; i < r.u.size(); ++i) {
    out << fmt(r.u[i]) << ',' << fmt(r.omega[i]) << ',' << fmt(r.closed_form[i]) << ',' << fmt(r.abs_diff[i]) << '\n';
  }
  out << "# median_C=" << fmt(r.median_C) << " max_dev=" << fmt(r.max_dev()) << '\n';
}

/// Raw quadrature dump with both flux integrals per sample.
inline void write_flux_dump(std::ostream& out, const FluxReport& r) {
  out << "u,conormal,shaving,omega,closed_form,abs_diff\n";
  for (std::size_t i = 0; i < r.u.size(); ++i) {
    out << fmt(r.u[i]) << ',' << fmt(r.conormal.empty() ? 0.0 : r.conormal[i]) << ','
        << fmt(r.shaving.empty() ? 0.0 : r.shaving[i]) << ',' << fmt(r.omega[i]) << ',' << fmt(r.closed_form[i])
        << ',' << fmt(r.abs_diff[i]) << '\n';
  }
  out << "# median_C=" << fmt(r.median_C) << " max_dev=" << fmt(r.max_dev()) << '\n';
}

// --- meshes -----------------------------------------------------------------

inline void write_obj(std::ostream& out, const Mesh& m) {
  for (const auto& p : m.vertices) {
    const auto q = chart(p);
    out << "v " << fmt(q[0]) << ' ' << fmt(q[1]) << ' ' << fmt(q[2]) << '\n';
  }
  for (const auto& f : m.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

inline void write_vertices_4d(std::ostream& out, const Mesh& m) {
  out << "x1,x2,x3,x4\n";
  for (const auto& p : m.vertices) {
    out << fmt(p.c[0]) << ',' << fmt(p.c[1]) << ',' << fmt(p.c[2]) << ',' << fmt(p.c[3]) << '\n';
  }
}

// --- solver sidecar ---------------------------------------------------------

inline nlohmann::json sidecar(const SolveResult& r) {
  nlohmann::json j;
  j["spaceform"] = std::string(space_name(r.kind));
  j["H"] = r.H;
  j["C"] = r.C;
  j["M"] = r.M ? nlohmann::json(*r.M) : nlohmann::json(-r.C / kPi);
  j["m"] = r.m;
  j["diagnostics"] = {{"stop", std::string(stop_name(r.stop))},
                      {"note", r.note},
                      {"steps", r.steps},
                      {"cylinder", r.cylinder},
                      {"analytic", r.analytic},
                      {"max_level_drift", r.max_drift},
                      {"arc_length", r.curve.domain().length()}};
  return j;
}

// --- config files -----------------------------------------------------------

/// Plain `key = value` lines; '#' starts a comment.
inline std::vector<std::pair<std::string, std::string>> read_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = line;
    if (const auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
    s = trim(s);
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::ParseError, "config line " + std::to_string(lineno) + ": expected key = value");
    }
    out.emplace_back(std::string(trim(s.substr(0, eq))), std::string(trim(s.substr(eq + 1))));
  }
  return out;
}

}  // namespace cmc::io
