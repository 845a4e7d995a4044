#pragma once

// Command-line front end: solve, check, mesh, treadmill, flux, equiv.
// run() is the whole program; the twizzle binary only forwards argv to it.
//
// Exit codes: 0 success or CMC verified, 1 negative verdict, 2 usage or I/O
// error, 3 numeric failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cmc/conservation.hpp"
#include "cmc/curve.hpp"
#include "cmc/error.hpp"
#include "cmc/io.hpp"
#include "cmc/solver.hpp"
#include "cmc/treadmill.hpp"
#include "cmc/twizzler.hpp"

namespace cmc::cli {

enum Exit : int { kOk = 0, kNegative = 1, kUsage = 2, kNumeric = 3 };

struct RunConfig {
  std::string command;
  std::string space = "r3";
  std::optional<double> H, C, M;
  std::optional<double> m;
  std::optional<double> start;
  double xi = kPi / 4.0;
  double radius = 1.0;
  double eps = 0.1;
  std::string curve;  // built-in curve name, alternative to --in
  std::string in, out, sidecar, raw, report;
  std::size_t samples = 100;
  std::size_t nu = 64, nv = 64;
  std::optional<double> u0, u1;
  double v0 = 0.0, v1 = 2.0 * kPi;
  double ell = 1.0;
  bool reconstruct = false;
  bool bridge = false;
  bool no_quadrature = false;
  SolverConfig solver;
  std::uint64_t seed = 0;
};

namespace detail {

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::ParseError: return kUsage;
    default: return kNumeric;
  }
}

inline std::ifstream open_in(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw UsageError("cannot read " + path);
  return f;
}

inline std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write " + path);
  return f;
}

/// Runs `write` against the file at path, or against `fallback` when path is empty.
template <class F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  auto f = open_out(path);
  write(f);
  if (!f) throw UsageError("failed writing " + path);
}

inline BaseCurve builtin_curve(const RunConfig& rc) {
  const std::string& n = rc.curve;
  if (n == "circle") return curves::circle(rc.radius);
  if (n == "torus") return curves::circle(std::cos(rc.xi));
  if (n == "perturbed") return curves::perturbed_circle(rc.eps);
  if (n == "line") return curves::line({rc.u0.value_or(-2.0), rc.u1.value_or(2.0)});
  if (n == "spiral") return curves::log_spiral(rc.eps, {rc.u0.value_or(0.0), rc.u1.value_or(2.0 * kPi)});
  throw UsageError("unknown --curve '" + n + "' (circle, torus, perturbed, line, spiral)");
}

inline BaseCurve load_curve(const RunConfig& rc) {
  if (!rc.in.empty() && !rc.curve.empty()) throw UsageError("give either --in or --curve, not both");
  if (!rc.curve.empty()) return builtin_curve(rc);
  if (rc.in.empty()) throw UsageError("an input curve is required (--in FILE or --curve NAME)");
  auto f = open_in(rc.in);
  return io::read_curve(f);
}

inline double require_m(const RunConfig& rc) {
  if (!rc.m) throw UsageError("--m is required");
  return *rc.m;
}

inline std::vector<double> uniform(Interval d, std::size_t n) {
  if (n < 1) throw UsageError("--samples must be positive");
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = n == 1 ? d.lo : d.at(static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

inline double resolve_H(const RunConfig& rc, const Twizzler& t, const std::vector<double>& grid) {
  if (rc.H) return *rc.H;
  std::vector<double> h;
  for (double u : grid) h.push_back(mean_curvature(t, u));
  return median(h);
}

// --- commands ---------------------------------------------------------------

inline int cmd_solve(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const double m = require_m(rc);
  if (rc.C && rc.M) throw UsageError("give exactly one of --C and --M");
  if (!rc.C && !rc.M) throw UsageError("one of --C or --M is required");
  const double C = rc.C ? *rc.C : -kPi * *rc.M;
  const double M = rc.M ? *rc.M : -*rc.C / kPi;
  const double H = rc.H.value_or(0.0);
  const SpaceKind kind = parse_space(rc.space);
  SolveResult r;
  if (kind == SpaceKind::Euclidean3) {
    r = solve_r3(H, M, m, rc.solver);
  } else {
    if (!rc.start) throw UsageError("--start (initial radius |gamma0|) is required in s3 and h3");
    r = kind == SpaceKind::Sphere3 ? solve_s3(H, C, m, *rc.start, rc.solver) : solve_h3(H, C, m, *rc.start, rc.solver);
  }
  emit(rc.out, out, [&](std::ostream& o) { io::write_curve(o, r.curve); });
  std::string side = rc.sidecar;
  if (side.empty() && !rc.out.empty()) side = rc.out + ".json";
  auto j = io::sidecar(r);
  j["seed"] = rc.seed;
  if (!side.empty()) {
    auto f = open_out(side);
    f << j.dump(2) << '\n';
  } else {
    err << j.dump() << '\n';
  }
  if (r.stop != StopReason::Completed) {
    err << stop_name(r.stop) << ": " << r.note << " (partial curve written)\n";
    return kNumeric;
  }
  return kOk;
}

inline int cmd_check(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const BaseCurve c = load_curve(rc);
  const double m = require_m(rc);
  const SpaceForm sf{parse_space(rc.space)};
  const Twizzler t(sf, c, m);
  const auto grid = uniform(c.domain(), rc.samples);
  const double H = resolve_H(rc, t, grid);
  ConstancyOptions opt;
  opt.quadrature = !rc.no_quadrature;
  const FluxReport rep = check_constancy(t, H, grid, opt);
  if (!rc.report.empty()) {
    auto f = open_out(rc.report);
    io::write_flux_report(f, rep);
  }
  const Verdict v = verdict(rep.max_dev());
  out << "verdict=" << verdict_name(v) << " space=" << rc.space << " H=" << io::fmt(H)
      << " median_C=" << io::fmt(rep.median_C) << " max_dev=" << io::fmt(rep.max_dev())
      << " max_dev_closed=" << io::fmt(rep.max_dev_closed) << " max_dev_omega=" << io::fmt(rep.max_dev_omega)
      << " max_cross=" << io::fmt(rep.max_discrepancy);
  if (sf.kind == SpaceKind::Euclidean3) {
    const ConservationData d = equivalence_check(c, m, H, std::max<std::size_t>(rc.samples, 2));
    out << " M=" << io::fmt(*d.M) << " max_C_plus_piM=" << io::fmt(d.max_link) << " M_dev=" << io::fmt(d.M_deviation);
  }
  out << '\n';
  if (v == Verdict::Inconclusive) err << "deviation between the CMC and NON_CMC thresholds\n";
  return v == Verdict::Cmc ? kOk : kNegative;
}

inline int cmd_mesh(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const BaseCurve c = load_curve(rc);
  const double m = require_m(rc);
  const SpaceForm sf{parse_space(rc.space)};
  const Twizzler t(sf, c, m);
  const Interval ur{rc.u0.value_or(c.domain().lo), rc.u1.value_or(c.domain().hi)};
  const Mesh mesh = sample_mesh(t, ur, {rc.v0, rc.v1}, rc.nu, rc.nv);
  emit(rc.out, out, [&](std::ostream& o) { io::write_obj(o, mesh); });
  if (sf.curved()) {
    std::string raw = rc.raw;
    if (raw.empty() && !rc.out.empty()) raw = rc.out + ".4d.csv";
    if (!raw.empty()) {
      auto f = open_out(raw);
      io::write_vertices_4d(f, mesh);
    }
  }
  err << mesh.vertices.size() << " vertices, " << mesh.faces.size() << " triangles\n";
  return kOk;
}

inline int cmd_treadmill(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  if (rc.ell < 0.0 || rc.ell > 1.0) err << "warning: ell=" << rc.ell << " lies outside [0, 1]\n";
  if (rc.reconstruct) {
    if (rc.in.empty()) throw UsageError("--reconstruct needs a path CSV via --in");
    if (rc.ell != 1.0) throw UsageError("--reconstruct needs ell = 1");
    auto f = open_in(rc.in);
    const TreadmillPath p = io::read_path(f);
    ReconstructOptions opt;
    opt.bridge = rc.bridge;
    const Reconstruction r = reconstruct(p, opt);
    if (r.arcs.size() > 1) {
      err << "path splits into " << r.arcs.size() << " arcs at zeros of x x' + y y'; each arc has its own rotation\n";
    }
    for (std::size_t i = 0; i < r.arcs.size(); ++i) {
      std::string path = rc.out;
      if (i > 0) {
        if (path.empty()) throw UsageError("multiple arcs need --out");
        const std::filesystem::path base(rc.out);
        path = (base.parent_path() / (base.stem().string() + ".arc" + std::to_string(i) + base.extension().string())).string();
      }
      emit(path, out, [&](std::ostream& o) { io::write_curve(o, r.arcs[i]); });
    }
    return kOk;
  }
  const BaseCurve c = load_curve(rc);
  const std::vector<double> grid = c.is_sampled() ? c.check_grid() : uniform(c.domain(), std::max<std::size_t>(rc.samples, 2));
  const TreadmillPath p = treadmill(c, rc.ell, grid);
  emit(rc.out, out, [&](std::ostream& o) { io::write_path(o, p); });
  return kOk;
}

inline int cmd_flux(const RunConfig& rc, std::ostream& out, std::ostream&) {
  const BaseCurve c = load_curve(rc);
  const double m = require_m(rc);
  const Twizzler t(SpaceForm{parse_space(rc.space)}, c, m);
  const auto grid = uniform(c.domain(), rc.samples);
  const double H = resolve_H(rc, t, grid);
  const FluxReport rep = check_constancy(t, H, grid);
  emit(rc.out, out, [&](std::ostream& o) { io::write_flux_dump(o, rep); });
  return kOk;
}

inline int cmd_equiv(const RunConfig& rc, std::ostream& out, std::ostream&) {
  if (parse_space(rc.space) != SpaceKind::Euclidean3) throw UsageError("equiv is defined for r3 only");
  const BaseCurve c = load_curve(rc);
  const double m = require_m(rc);
  const Twizzler t(SpaceForm::euclidean(), c, m);
  const auto grid = uniform(c.domain(), rc.samples);
  const double H = resolve_H(rc, t, grid);
  const ConservationData d = equivalence_check(c, m, H, rc.samples);
  emit(rc.out, out, [&](std::ostream& o) {
    o << "u,C,M,C_plus_pi_M\n";
    for (double u : grid) {
      const double C = conserved_quantity(t, u, H);
      const double M = perdomo_M(c(u), H, m);
      o << io::fmt(u) << ',' << io::fmt(C) << ',' << io::fmt(M) << ',' << io::fmt(C + kPi * M) << '\n';
    }
    o << "# median_C=" << io::fmt(d.C) << " median_M=" << io::fmt(*d.M) << " max_C_plus_piM=" << io::fmt(d.max_link)
      << " M_dev=" << io::fmt(d.M_deviation) << '\n';
  });
  return kOk;
}

// --- argument handling ------------------------------------------------------

inline void add_common(CLI::App* s, RunConfig& rc) {
  s->add_option("--space", rc.space, "r3, s3 or h3")->check(CLI::IsMember({"r3", "s3", "h3"}));
  s->add_option("--m", rc.m, "pitch m > 0");
  s->add_option("--H", rc.H, "mean curvature");
  s->add_option("--seed", rc.seed, "seed for any stochastic probing")->capture_default_str();
  s->add_option("--config", "key = value file; flags override it");
  s->add_option("-o,--out", rc.out, "output file (default: standard output)");
}

inline void add_input(CLI::App* s, RunConfig& rc) {
  s->add_option("--in", rc.in, "input CSV");
  s->add_option("--curve", rc.curve, "built-in curve: circle, torus, perturbed, line, spiral");
  s->add_option("--radius", rc.radius, "radius of the built-in circle");
  s->add_option("--xi", rc.xi, "torus parameter: gamma = cos(xi) e^{iu}");
  s->add_option("--eps", rc.eps, "perturbation size / spiral rate");
  s->add_option("--u0", rc.u0, "start of the u-range");
  s->add_option("--u1", rc.u1, "end of the u-range");
  s->add_option("--samples", rc.samples, "number of u samples");
}

/// Inserts `--key value` for config entries of the chosen subcommand that the
/// command line does not already set.
inline std::vector<std::string> merge_config(CLI::App& app, const std::vector<std::string>& args) {
  std::string cfg_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) cfg_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) cfg_path = args[i].substr(9);
  }
  if (cfg_path.empty() || args.empty()) return args;
  CLI::App* sub = nullptr;
  for (auto* s : app.get_subcommands({})) if (s->get_name() == args[0]) sub = s;
  if (!sub) return args;
  std::set<std::string> given;
  for (const auto& a : args) {
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
  }
  auto f = open_in(cfg_path);
  std::vector<std::string> merged{args[0]};
  for (const auto& [key, value] : io::read_config(f)) {
    if (given.count(key) || key == "config") continue;
    const CLI::Option* opt = sub->get_option_no_throw("--" + key);
    if (!opt) throw UsageError("unknown config key '" + key + "' for " + args[0]);
    if (opt->get_expected_min() == 0) {
      if (value == "true" || value == "1" || value == "yes") merged.push_back("--" + key);
    } else {
      merged.push_back("--" + key);
      merged.push_back(value);
    }
  }
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

}  // namespace detail

/// Parses args (without the program name) and runs the chosen command.
inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  RunConfig rc;
  CLI::App app{"Helicoidal CMC surfaces: construction, conservation checks and export", "twizzle"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "generate a CMC base curve");
  detail::add_common(solve, rc);
  solve->add_option("--C", rc.C, "conserved quantity");
  solve->add_option("--M", rc.M, "level-set constant M (C = -pi M)");
  solve->add_option("--start", rc.start, "initial radius |gamma0| (s3, h3)");
  solve->add_option("--step", rc.solver.step, "arc-length step");
  solve->add_option("--length", rc.solver.length, "arc length of the curve");
  solve->add_option("--branch", rc.solver.branch, "+1 or -1");
  solve->add_option("--tol-root", rc.solver.tol_root, "level-set / root tolerance");
  solve->add_option("--max-steps", rc.solver.max_steps, "step cap");
  solve->add_option("--sidecar", rc.sidecar, "JSON sidecar path (default: OUT.json)");

  auto* check = app.add_subcommand("check", "flux constancy and C = -pi M checks, CMC verdict");
  detail::add_common(check, rc);
  detail::add_input(check, rc);
  check->add_option("--report", rc.report, "flux report CSV");
  check->add_flag("--no-quadrature", rc.no_quadrature, "closed form only");

  auto* mesh = app.add_subcommand("mesh", "triangle mesh as OBJ (+ raw 4D CSV in s3/h3)");
  detail::add_common(mesh, rc);
  detail::add_input(mesh, rc);
  mesh->add_option("--nu", rc.nu, "samples along u");
  mesh->add_option("--nv", rc.nv, "samples along v");
  mesh->add_option("--v0", rc.v0, "start of the v-range");
  mesh->add_option("--v1", rc.v1, "end of the v-range");
  mesh->add_option("--raw", rc.raw, "raw 4D vertex CSV (default: OUT.4d.csv)");

  auto* tread = app.add_subcommand("treadmill", "l-treadmill of a curve, or reconstruction from a path");
  detail::add_common(tread, rc);
  detail::add_input(tread, rc);
  tread->add_option("--ell", rc.ell, "treadmill parameter l");
  tread->add_flag("--reconstruct", rc.reconstruct, "read a t,x,y path and rebuild the curve");
  tread->add_flag("--bridge", rc.bridge, "continue through isolated singular samples");

  auto* flux = app.add_subcommand("flux", "raw conormal and shaving flux table");
  detail::add_common(flux, rc);
  detail::add_input(flux, rc);

  auto* equiv = app.add_subcommand("equiv", "C versus -pi M table along the curve (r3)");
  detail::add_common(equiv, rc);
  detail::add_input(equiv, rc);

  try {
    const std::vector<std::string> merged = detail::merge_config(app, args);
    std::vector<std::string> rev(merged.rbegin(), merged.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return kUsage;
  }

  try {
    if (*solve) return detail::cmd_solve(rc, out, err);
    if (*check) return detail::cmd_check(rc, out, err);
    if (*mesh) return detail::cmd_mesh(rc, out, err);
    if (*tread) return detail::cmd_treadmill(rc, out, err);
    if (*flux) return detail::cmd_flux(rc, out, err);
    if (*equiv) return detail::cmd_equiv(rc, out, err);
  } catch (const detail::UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << e.what() << '\n';
    return detail::exit_for(e.kind());
  }
  return kUsage;
}

}  // namespace cmc::cli
