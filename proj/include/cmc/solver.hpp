#pragma once

// CMC base curves from the first-order conservation condition.
//
// All three spaces share one formulation. Along a unit-speed base curve the
// treadmillsled tau = -gamma' conj(gamma) moves by tau' = -1 + i k tau, and
// R = |tau|^2 = |gamma|^2, a = gamma' . i gamma = -Im tau, (gamma . gamma')^2 =
// (Re tau)^2. The conserved quantity is therefore a function Phi(tau), and
// dPhi/ds = 0 fixes the curvature k away from the isolated critical points.
// Tracing {Phi = C} with RK4 in arc length (predictor) plus a Newton projection
// back onto the level set (corrector) and accumulating the tangent angle phi
// gives gamma = -conj(tau) e^{i phi} without a separate reconstruction pass.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cmc/conservation.hpp"
#include "cmc/curve.hpp"
#include "cmc/error.hpp"
#include "cmc/spaceform.hpp"
#include "cmc/treadmill.hpp"

namespace cmc {

struct SolverConfig {
  double step = 1e-3;
  double tol_root = 1e-12;
  std::size_t max_steps = 200000;
  int branch = 1;
  double turning_eps = 1e-9;
  double length = 4.0 * kPi;  // arc length of the produced curve
  double axis_eps = 1e-8;     // S^3: stop when 1 - |gamma|^2 falls below this

  void validate() const {
    if (!(step > 0.0)) throw Error(ErrorKind::InvalidArgument, "step must be positive");
    if (max_steps < 1) throw Error(ErrorKind::InvalidArgument, "max_steps must be at least 1");
    if (!(length > 0.0)) throw Error(ErrorKind::InvalidArgument, "length must be positive");
    if (branch != 1 && branch != -1) throw Error(ErrorKind::InvalidArgument, "branch must be +1 or -1");
  }
};

enum class StopReason { Completed, AxisTouch, Singular };

inline std::string_view stop_name(StopReason r) noexcept {
  switch (r) {
    case StopReason::Completed: return "completed";
    case StopReason::AxisTouch: return "AxisTouch";
    case StopReason::Singular: return "ReconstructionSingularity";
  }
  return "completed";
}

struct SolveResult {
  SpaceKind kind = SpaceKind::Euclidean3;
  BaseCurve curve;
  double H = 0.0;
  double C = 0.0;
  std::optional<double> M;
  double m = 1.0;
  StopReason stop = StopReason::Completed;
  std::string note;
  bool cylinder = false;
  bool analytic = false;   // closed-form short-circuit (line or circle)
  std::size_t steps = 0;
  double max_drift = 0.0;  // max |Phi(tau) - C| after correction
};

namespace detail {

/// Conserved quantity of a unit-speed curve as a function of tau = x + i y.
template <class T>
T level_of_tau(SpaceKind k, double m, double H, T x, T y) {
  return closed_form_C<T>(k, m, H, x * x + y * y, -y, x * x, T(1.0));
}

/// Same quantity in (R, a) with (gamma . gamma')^2 = R - a^2.
template <class T>
T level_of_Ra(SpaceKind k, double m, double H, T R, T a) {
  return closed_form_C<T>(k, m, H, R, a, R - a * a, T(1.0));
}

template <class F>
double complex_step(F&& f, double h = 1e-30) {
  return std::imag(f(std::complex<double>(0.0, h))) / h;
}

class LevelTracer {
 public:
  LevelTracer(SpaceKind k, double m, double H, double C) : k_(k), m_(m), H_(H), C_(C) {}

  double phi(cplx tau) const { return level_of_tau<double>(k_, m_, H_, tau.real(), tau.imag()) - C_; }

  std::array<double, 2> grad(cplx tau) const {
    using Z = std::complex<double>;
    const double x = tau.real(), y = tau.imag();
    return {complex_step([&](Z e) { return level_of_tau<Z>(k_, m_, H_, Z(x) + e, Z(y)); }),
            complex_step([&](Z e) { return level_of_tau<Z>(k_, m_, H_, Z(x), Z(y) + e); })};
  }

  /// k = -2 (dC/dR) / (dC/da) with (gamma . gamma')^2 = R - a^2 eliminated;
  /// the factor Re tau common to both sides of dPhi/ds = 0 is cancelled.
  std::optional<double> curvature(cplx tau) const {
    using Z = std::complex<double>;
    const double R = std::norm(tau), a = -tau.imag();
    const double CR = complex_step([&](Z e) { return level_of_Ra<Z>(k_, m_, H_, Z(R) + e, Z(a)); });
    const double Ca = complex_step([&](Z e) { return level_of_Ra<Z>(k_, m_, H_, Z(R), Z(a) + e); });
    if (!(std::abs(Ca) > 1e-300) || !std::isfinite(CR) || !std::isfinite(Ca)) return std::nullopt;
    return -2.0 * CR / Ca;
  }

  /// Newton projection along the gradient.
  cplx correct(cplx tau, double tol) const {
    for (int it = 0; it < 8; ++it) {
      const double f = phi(tau);
      if (std::abs(f) <= tol) break;
      const auto g = grad(tau);
      const double n2 = g[0] * g[0] + g[1] * g[1];
      if (!(n2 > 0.0)) break;
      tau -= cplx(g[0], g[1]) * (f / n2);
    }
    return tau;
  }

  SpaceKind kind() const noexcept { return k_; }

 private:
  SpaceKind k_;
  double m_, H_, C_;
};

struct TraceState {
  cplx tau;
  double phi;
};

inline SolveResult trace(SpaceKind kind, double m, double H, double C, TraceState st, const SolverConfig& cfg) {
  const LevelTracer tr(kind, m, H, C);
  const double tol = cfg.tol_root * std::max(1.0, std::abs(C));
  SolveResult res;
  res.kind = kind;
  res.H = H;
  res.C = C;
  res.m = m;

  std::size_t n = static_cast<std::size_t>(std::ceil(cfg.length / cfg.step));
  n = std::min(std::max<std::size_t>(n, 1), cfg.max_steps);
  const double h = cfg.length / static_cast<double>(n);

  auto rhs = [&](const TraceState& s) -> std::optional<std::array<double, 3>> {
    const auto k = tr.curvature(s.tau);
    if (!k) return std::nullopt;
    const cplx d = -1.0 + cplx(0, *k) * s.tau;
    return std::array<double, 3>{d.real(), d.imag(), *k};
  };
  auto add = [](const TraceState& s, const std::array<double, 3>& d, double f) {
    return TraceState{s.tau + cplx(d[0], d[1]) * f, s.phi + d[2] * f};
  };

  CurveSamples out;
  auto emit = [&](double s, const TraceState& x) -> bool {
    const auto k = tr.curvature(x.tau);
    if (!k) return false;
    const cplx e = std::polar(1.0, x.phi);
    out.u.push_back(s);
    out.pos.push_back(-std::conj(x.tau) * e);
    out.d1.push_back(e);
    out.d2.push_back(cplx(0, *k) * e);
    res.max_drift = std::max(res.max_drift, std::abs(tr.phi(x.tau)));
    return true;
  };
  auto axis_hit = [&](const TraceState& x) {
    return kind == SpaceKind::Sphere3 && 1.0 - std::norm(x.tau) <= cfg.axis_eps;
  };

  if (axis_hit(st)) throw Error(ErrorKind::AxisTouch, "start point lies on the axis circle");
  if (!emit(0.0, st)) throw Error(ErrorKind::ReconstructionSingularity, "curvature undefined at the start point");

  for (std::size_t i = 1; i <= n; ++i) {
    const auto k1 = rhs(st);
    std::optional<std::array<double, 3>> k2, k3, k4;
    if (k1) k2 = rhs(add(st, *k1, 0.5 * h));
    if (k2) k3 = rhs(add(st, *k2, 0.5 * h));
    if (k3) k4 = rhs(add(st, *k3, h));
    if (!k4) {
      // an RK stage that leaves the closed disc |gamma| <= 1 means the axis is within one step
      const double speed = k1 ? std::hypot((*k1)[0], (*k1)[1]) : 1.0;
      if (kind == SpaceKind::Sphere3 && 1.0 - std::abs(st.tau) <= 2.0 * h * std::max(1.0, speed)) {
        res.stop = StopReason::AxisTouch;
        res.note = "profile f vanishes within one step of s=" + std::to_string(static_cast<double>(i - 1) * h);
        break;
      }
      res.stop = StopReason::Singular;
      res.note = "dC/da vanishes near s=" + std::to_string(static_cast<double>(i - 1) * h);
      break;
    }
    std::array<double, 3> d{};
    for (std::size_t c = 0; c < 3; ++c) d[c] = ((*k1)[c] + 2 * (*k2)[c] + 2 * (*k3)[c] + (*k4)[c]) / 6.0;
    TraceState next = add(st, d, h);
    next.tau = tr.correct(next.tau, tol);
    if (axis_hit(next)) {
      res.stop = StopReason::AxisTouch;
      res.note = "profile f vanishes near s=" + std::to_string(static_cast<double>(i) * h);
      break;
    }
    if (!emit(static_cast<double>(i) * h, next)) {
      res.stop = StopReason::Singular;
      res.note = "dC/da vanishes near s=" + std::to_string(static_cast<double>(i) * h);
      break;
    }
    st = next;
    res.steps = i;
  }
  if (out.u.size() < 2) throw Error(ErrorKind::ReconstructionSingularity, "solver stopped before the first step");
  res.curve = BaseCurve::sampled(std::move(out));
  return res;
}

/// Root of Phi(a) = C over a in [-r0, r0] for the unit-speed start at radius r0.
inline double start_slope(SpaceKind kind, double m, double H, double C, double r0, double tol) {
  auto f = [&](double a) { return level_of_Ra<double>(kind, m, H, r0 * r0, a) - C; };
  double lo = -r0, hi = r0;
  double flo = f(lo), fhi = f(hi);
  const double ftol = tol * std::max(1.0, std::abs(C));
  if (std::abs(flo) <= ftol) return lo;
  if (std::abs(fhi) <= ftol) return hi;
  if (!std::isfinite(flo) || !std::isfinite(fhi) || flo * fhi > 0.0) {
    throw Error(ErrorKind::NoRoot, "C=" + std::to_string(C) + " is not attained at radius " + std::to_string(r0) +
                                       " (range [" + std::to_string(std::min(flo, fhi) + C) + ", " +
                                       std::to_string(std::max(flo, fhi) + C) + "])");
  }
  for (int it = 0; it < 200 && hi - lo > 1e-16 * std::max(1.0, r0); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  double a = 0.5 * (lo + hi);
  // Newton polish, kept inside the bracket
  for (int it = 0; it < 4; ++it) {
    using Z = std::complex<double>;
    const double d = complex_step([&](Z e) { return level_of_Ra<Z>(kind, m, H, Z(r0 * r0), Z(a) + e) - C; });
    if (!(std::abs(d) > 0.0)) break;
    const double next = a - f(a) / d;
    if (next < -r0 || next > r0) break;
    a = next;
  }
  return a;
}

inline SolveResult solve_curved(SpaceKind kind, double H, double C, double m, cplx start, const SolverConfig& cfg) {
  cfg.validate();
  if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "pitch m must be positive");
  const double r0 = std::abs(start);
  if (kind == SpaceKind::Sphere3 && !(r0 < 1.0)) throw Error(ErrorKind::OutsideSphere, "start must satisfy |gamma0| < 1");
  if (r0 <= 1e-12) throw Error(ErrorKind::NoRoot, "start on the axis: a = gamma' . i gamma vanishes there");
  const double a = start_slope(kind, m, H, C, r0, cfg.tol_root);
  const double sn = std::clamp(a / r0, -1.0, 1.0);
  const double phi0 = std::atan2(sn, cfg.branch * std::sqrt(std::max(0.0, 1.0 - sn * sn)));
  // gamma0 = r0, gamma0' = e^{i phi0}; rotate both by arg(start)
  TraceState st{-r0 * std::polar(1.0, phi0), phi0 + std::arg(start)};
  SolveResult r = trace(kind, m, H, C, st, cfg);
  return r;
}

}  // namespace detail

/// Sign-change probe of the level-set function perdomo_residual on an n x n grid over [-R, R]^2.
/// Returns a point of the level set on a grid edge, if any.
inline std::optional<std::array<double, 2>> probe_level_set(double H, double M, double m, std::size_t n = 201) {
  double R = 10.0 * std::max({1.0, std::abs(M), H != 0.0 ? 1.0 / std::abs(H) : 0.0});
  auto F = [&](double x, double y) { return perdomo_residual(x, y, H, m, M); };
  const double h = 2.0 * R / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = -R + h * static_cast<double>(i);
    for (std::size_t j = 0; j + 1 < n; ++j) {
      const double y0 = -R + h * static_cast<double>(j), y1 = y0 + h;
      double f0 = F(x, y0), f1 = F(x, y1);
      if (f0 == 0.0) return std::array{x, y0};
      if (f0 * f1 < 0.0) {
        double lo = y0, hi = y1;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi), fm = F(x, mid);
          if ((fm < 0) == (f0 < 0)) {
            lo = mid;
            f0 = fm;
          } else {
            hi = mid;
          }
        }
        return std::array{x, 0.5 * (lo + hi)};
      }
    }
  }
  return std::nullopt;
}

/// CMC base curve in R^3 with level-set data (H, M); C = -pi M. The starting
/// point of the level set is taken on the axis x = 0 when possible,
/// H y^2 - 2 y - M = 0, choosing (1 - branch sqrt(1 + H M)) / H, then falls
/// back to a grid probe. A double root is the isolated cylinder point and
/// returns the circle of radius 1/|H|.
inline SolveResult solve_r3(double H, double M, double m, const SolverConfig& cfg = {}) {
  cfg.validate();
  if (!(m > 0.0)) throw Error(ErrorKind::InvalidArgument, "pitch m must be positive");
  const double C = -kPi * M;
  SolveResult res;
  res.kind = SpaceKind::Euclidean3;
  res.H = H;
  res.C = C;
  res.M = M;
  res.m = m;
  if (H == 0.0 && M == 0.0) {
    res.analytic = true;
    res.curve = resample(curves::line({-0.5 * cfg.length, 0.5 * cfg.length}),
                         std::min<std::size_t>(cfg.max_steps + 1, static_cast<std::size_t>(std::ceil(cfg.length / cfg.step)) + 1));
    res.note = "helicoid";
    return res;
  }
  std::optional<std::array<double, 2>> start;  // (Re tau, -Im tau)
  if (H == 0.0) {
    start = std::array{0.0, -M / 2.0};
  } else {
    const double disc = 1.0 + H * M;
    if (std::abs(disc) <= cfg.turning_eps) {
      const double r = 1.0 / std::abs(H);
      const double n = std::ceil(2.0 * kPi * r / cfg.step);
      res.curve = resample(curves::circle(r, {}, H > 0 ? 1 : -1, {0.0, 2.0 * kPi}), static_cast<std::size_t>(n) + 1);
      res.cylinder = true;
      res.analytic = true;
      res.note = "cylinder";
      return res;
    }
    if (disc > 0.0) start = std::array{0.0, (1.0 - cfg.branch * std::sqrt(disc)) / H};
  }
  if (!start) start = probe_level_set(H, M, m);
  if (!start) {
    throw Error(ErrorKind::EmptyLevelSet, "no point with H(x^2+y^2) - 2my/sqrt(m^2+x^2) = M");
  }
  const cplx tau0((*start)[0], -(*start)[1]);
  SolveResult r = detail::trace(SpaceKind::Euclidean3, m, H, C, {tau0, 0.0}, cfg);
  r.M = M;
  return r;
}

/// CMC base curve in S^3 with conserved quantity C, started at gamma0 = start.
inline SolveResult solve_s3(double H, double C, double m, cplx start, const SolverConfig& cfg = {}) {
  return detail::solve_curved(SpaceKind::Sphere3, H, C, m, start, cfg);
}

/// CMC base curve in H^3 with conserved quantity C, started at gamma0 = start.
inline SolveResult solve_h3(double H, double C, double m, cplx start, const SolverConfig& cfg = {}) {
  return detail::solve_curved(SpaceKind::Hyperbolic3, H, C, m, start, cfg);
}

}  // namespace cmc
