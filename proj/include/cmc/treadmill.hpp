#pragma once

// l-treadmills sigma_l = (1 - l) s - gamma' conj(gamma) / v, the treadmillsled
// tau = sigma_1, reconstruction of gamma from tau, and the level-set
// description of CMC twizzlers in R^3.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cmc/conservation.hpp"
#include "cmc/curve.hpp"
#include "cmc/error.hpp"
#include "cmc/twizzler.hpp"

namespace cmc {

struct TreadmillPath {
  double ell = 1.0;
  std::vector<double> t;
  std::vector<double> x;
  std::vector<double> y;
  std::string provenance;  // empty for paths read from files

  std::size_t size() const noexcept { return t.size(); }
  cplx point(std::size_t i) const { return {x[i], y[i]}; }

  void push(double ti, cplx p) {
    t.push_back(ti);
    x.push_back(p.real());
    y.push_back(p.imag());
  }

  void validate() const {
    if (x.size() != t.size() || y.size() != t.size()) throw Error(ErrorKind::InvalidArgument, "path arrays differ in length");
    detail::require_increasing(t);
  }
};

/// -gamma' conj(gamma) / |gamma'|, depending only on the 1-jet.
inline cplx tau_point(const CurveJet& j) {
  const double v = std::abs(j.d1);
  if (v <= 1e-14) throw Error(ErrorKind::ZeroSpeed, "treadmill undefined at zero speed");
  return -j.d1 * std::conj(j.pos) / v;
}

/// sigma_l on the given parameters (sorted). Arc length is measured from the
/// left endpoint of the curve's domain.
inline TreadmillPath treadmill(const BaseCurve& c, double ell, std::span<const double> params) {
  TreadmillPath p;
  p.ell = ell;
  p.provenance = "computed";
  std::vector<double> s;
  if (ell != 1.0) s = cumulative_arclength(c, params);
  for (std::size_t i = 0; i < params.size(); ++i) {
    cplx z = tau_point(c(params[i]));
    if (ell != 1.0) z += (1.0 - ell) * s[i];
    p.push(params[i], z);
  }
  p.validate();
  return p;
}

inline TreadmillPath treadmill(const BaseCurve& c, double ell, std::size_t n = 1001) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) g[i] = c.domain().at(static_cast<double>(i) / static_cast<double>(n - 1));
  return treadmill(c, ell, g);
}

/// theta -> (-q'(theta), -q(theta)) on n uniform angles.
inline TreadmillPath support_tau(const SupportCurve& sc, std::size_t n = 1001) {
  TreadmillPath p;
  p.ell = 1.0;
  p.provenance = "support";
  for (std::size_t i = 0; i < n; ++i) {
    const double th = sc.domain().at(static_cast<double>(i) / static_cast<double>(n - 1));
    const SupportJet j = sc(th);
    p.push(th, {-j.dq, -j.q});
  }
  return p;
}

// ---------------------------------------------------------------------------
// Reconstruction

namespace detail {

/// Finite-difference weights for the first derivative at x0 on arbitrary
/// nodes (Fornberg's recursion).
inline std::vector<double> fd_weights(double x0, std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::array<double, 2>> c(n, {0.0, 0.0});
  double c1 = 1.0, c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t mn = std::min<std::size_t>(i, 1);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[i] - x0;
    for (std::size_t j = 0; j < i; ++j) {
      const double c3 = x[i] - x[j];
      c2 *= c3;
      if (j == i - 1) {
        for (std::size_t k = mn + 1; k-- > 1;) c[i][k] = c1 * (static_cast<double>(k) * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (std::size_t k = mn + 1; k-- > 1;) c[j][k] = (c4 * c[j][k] - static_cast<double>(k) * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = c[i][1];
  return w;
}

/// Fourth-order first derivative of sampled data: 5-point stencils, centered
/// in the interior and one-sided at the ends.
inline std::vector<double> derivative(std::span<const double> t, std::span<const double> f) {
  const std::size_t n = t.size();
  const std::size_t width = std::min<std::size_t>(5, n);
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = i >= width / 2 ? i - width / 2 : 0;
    lo = std::min(lo, n - width);
    const auto w = fd_weights(t[i], t.subspan(lo, width));
    double acc = 0.0;
    for (std::size_t k = 0; k < width; ++k) acc += w[k] * f[lo + k];
    d[i] = acc;
  }
  return d;
}

/// Cumulative integral of sampled f using local cubic interpolation.
inline std::vector<double> cumulative_integral(std::span<const double> t, std::span<const double> f) {
  const std::size_t n = t.size();
  std::vector<double> out(n, 0.0);
  static const std::array<double, 2> gx{-0.57735026918962576, 0.57735026918962576};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    std::size_t lo = i >= 1 ? i - 1 : 0;
    lo = std::min(lo, n >= 4 ? n - 4 : 0);
    const std::size_t w = std::min<std::size_t>(4, n);
    auto interp = [&](double x) {
      double acc = 0.0;
      for (std::size_t a = 0; a < w; ++a) {
        double l = 1.0;
        for (std::size_t b = 0; b < w; ++b)
          if (b != a) l *= (x - t[lo + b]) / (t[lo + a] - t[lo + b]);
        acc += l * f[lo + a];
      }
      return acc;
    };
    const double mid = 0.5 * (t[i] + t[i + 1]), half = 0.5 * (t[i + 1] - t[i]);
    out[i + 1] = out[i] + half * (interp(mid + half * gx[0]) + interp(mid + half * gx[1]));
  }
  return out;
}

}  // namespace detail

struct ReconstructOptions {
  /// Relative size of x x' + y y' below which a sample is treated as a zero.
  double singular_tol = 1e-9;
  /// Continue through isolated zeros by interpolating the removable
  /// singularity instead of splitting into independently rotated arcs.
  bool bridge = false;
};

struct Reconstruction {
  std::vector<BaseCurve> arcs;
  std::vector<double> singular_params;  // parameters flagged as zeros of x x' + y y'
};

/// Recovers gamma from a treadmillsled path (l = 1). Along tau,
///   x' = -s' - (s' k) y,   y' = (s' k) x,
/// with k the signed curvature, so s' k = y' / x and s' = -x' - (s' k) y; the
/// tangent angle phi integrates s' k and gamma = -conj(tau) e^{i phi}. Each arc
/// is anchored with phi = 0 at its first sample, which makes tau[gamma] equal
/// the path exactly at that sample.
inline Reconstruction reconstruct(const TreadmillPath& path, const ReconstructOptions& opt = {}) {
  if (path.ell != 1.0) throw Error(ErrorKind::InvalidArgument, "reconstruction needs an l = 1 path");
  path.validate();
  const std::size_t n = path.size();
  if (n < 2) throw Error(ErrorKind::DegenerateArc, "path needs at least 2 samples");
  const auto dx = detail::derivative(path.t, path.x);
  const auto dy = detail::derivative(path.t, path.y);

  double scale = 0.0, spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    scale = std::max(scale, std::hypot(path.x[i], path.y[i]));
    spread = std::max(spread, std::abs(path.point(i) - path.point(0)));
  }
  Reconstruction out;
  if (spread <= 1e-10 * std::max(1.0, scale)) {
    // Constant path: only the circle about the origin has one; its parameter is the angle.
    const double r = std::abs(path.y[0]);
    if (std::abs(path.x[0]) > 1e-9 * std::max(1.0, r) || r <= 1e-14) {
      throw Error(ErrorKind::ReconstructionSingularity, "constant path off the y-axis has no source curve");
    }
    const int orient = path.y[0] < 0 ? 1 : -1;
    out.arcs.push_back(curves::circle(r, {}, orient, {path.t.front(), path.t.back()}));
    return out;
  }

  std::vector<char> singular(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double D = path.x[i] * dx[i] + path.y[i] * dy[i];
    const double ref = std::hypot(path.x[i], path.y[i]) * std::hypot(dx[i], dy[i]);
    if (std::abs(D) <= opt.singular_tol * std::max(ref, 1e-300) || ref == 0.0) singular[i] = 1;
  }
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!singular[i] && !singular[i + 1] && path.x[i] * path.x[i + 1] < 0.0) {
      // sign change between samples: flag the closer one
      singular[std::abs(path.x[i]) < std::abs(path.x[i + 1]) ? i : i + 1] = 1;
    }
  }

  std::vector<double> B(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (!singular[i]) B[i] = dy[i] / path.x[i];
  for (std::size_t i = 0; i < n; ++i)
    if (singular[i]) out.singular_params.push_back(path.t[i]);

  // maximal runs of regular samples
  std::vector<std::pair<std::size_t, std::size_t>> runs;
  if (opt.bridge) {
    std::vector<double> tt, bb;
    for (std::size_t i = 0; i < n; ++i)
      if (!singular[i]) {
        tt.push_back(path.t[i]);
        bb.push_back(B[i]);
      }
    if (tt.size() < 2) throw Error(ErrorKind::SingularDenominator, "no regular samples to bridge from");
    for (std::size_t i = 0; i < n; ++i) {
      if (!singular[i]) continue;
      // cubic through the nearest regular samples on both sides
      const std::size_t k = static_cast<std::size_t>(std::lower_bound(tt.begin(), tt.end(), path.t[i]) - tt.begin());
      std::size_t lo = k >= 2 ? k - 2 : 0;
      const std::size_t w = std::min<std::size_t>(4, tt.size());
      lo = std::min(lo, tt.size() - w);
      double acc = 0.0;
      for (std::size_t a = 0; a < w; ++a) {
        double l = 1.0;
        for (std::size_t b = 0; b < w; ++b)
          if (b != a) l *= (path.t[i] - tt[lo + b]) / (tt[lo + a] - tt[lo + b]);
        acc += l * bb[lo + a];
      }
      B[i] = acc;
    }
    runs.push_back({0, n});
  } else {
    std::size_t i = 0;
    while (i < n) {
      while (i < n && singular[i]) ++i;
      std::size_t j = i;
      while (j < n && !singular[j]) ++j;
      if (j > i) runs.push_back({i, j});
      i = j;
    }
  }

  for (const auto& [a, b] : runs) {
    if (b - a < 2) continue;
    const std::span<const double> t(path.t.data() + a, b - a);
    std::vector<double> Bs(B.begin() + static_cast<std::ptrdiff_t>(a), B.begin() + static_cast<std::ptrdiff_t>(b));
    const auto phi = detail::cumulative_integral(t, Bs);
    CurveSamples s;
    for (std::size_t i = a; i < b; ++i) {
      const double speed = -dx[i] - B[i] * path.y[i];
      if (!(speed > 0.0)) {
        throw Error(ErrorKind::NonMonotoneArclength,
                    "recovered s' = " + std::to_string(speed) + " <= 0 at t=" + std::to_string(path.t[i]));
      }
      const cplx e = std::polar(1.0, phi[i - a]);
      s.u.push_back(path.t[i]);
      s.pos.push_back(-std::conj(path.point(i)) * e);
      s.d1.push_back(speed * e);
    }
    out.arcs.push_back(BaseCurve::sampled(std::move(s)));
  }
  if (out.arcs.empty()) throw Error(ErrorKind::SingularDenominator, "no regular arc in path");
  return out;
}

/// Single-curve reconstruction; SingularDenominator if the path splits.
inline BaseCurve reconstruct_curve(const TreadmillPath& path, const ReconstructOptions& opt = {}) {
  Reconstruction r = reconstruct(path, opt);
  if (r.arcs.size() != 1 || (!opt.bridge && !r.singular_params.empty())) {
    throw Error(ErrorKind::SingularDenominator,
                "x x' + y y' vanishes at t=" +
                    (r.singular_params.empty() ? std::string("?") : std::to_string(r.singular_params.front())));
  }
  return r.arcs.front();
}

// ---------------------------------------------------------------------------
// Level-set condition

/// H (x^2 + y^2) - 2 m y / sqrt(m^2 + x^2) - M.
inline double perdomo_residual(double x, double y, double H, double m, double M) {
  return H * (x * x + y * y) - 2.0 * m * y / std::sqrt(m * m + x * x) - M;
}

/// Coordinates in which the level-set equation is stated: (Re tau, -Im tau), so
/// that y equals the support function q on convex arcs.
inline std::array<double, 2> to_perdomo_frame(cplx tau) { return {tau.real(), -tau.imag()}; }

/// Level-set constant M of a curve at one parameter.
inline double perdomo_M(const CurveJet& j, double H, double m) {
  const auto [x, y] = to_perdomo_frame(tau_point(j));
  return perdomo_residual(x, y, H, m, 0.0);
}

/// Compares C along gamma with -pi times the level-set M fitted pointwise along
/// tau[gamma], on n uniform samples.
inline ConservationData equivalence_check(const BaseCurve& c, double m, double H, std::size_t n = 200) {
  const Twizzler t(SpaceForm::euclidean(), c, m);
  std::vector<double> Cs, Ms;
  double link = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = c.domain().at(n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1));
    const double C = conserved_quantity(t, u, H);
    const double M = perdomo_M(c(u), H, m);
    Cs.push_back(C);
    Ms.push_back(M);
    link = std::max(link, std::abs(C + kPi * M));
  }
  ConservationData d;
  d.H = H;
  d.C = median(Cs);
  d.M = median(Ms);
  d.deviation = max_deviation_from(Cs, d.C);
  d.M_deviation = max_deviation_from(Ms, *d.M);
  d.max_link = link;
  return d;
}

}  // namespace cmc
