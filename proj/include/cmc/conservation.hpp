#pragma once

// The conserved quantity of a twizzler: closed form, flux quadratures over a
// helix and its shaving, and constancy checks.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cmc/curve.hpp"
#include "cmc/error.hpp"
#include "cmc/quadrature.hpp"
#include "cmc/spaceform.hpp"
#include "cmc/twizzler.hpp"

namespace cmc {

/// Closed-form conserved quantity in terms of planar invariants of gamma at
/// one parameter: R = |gamma|^2, a = gamma' . i gamma, b2 = (gamma . gamma')^2,
/// v2 = |gamma'|^2. Templated so that derivatives can be taken by complex step.
///
///   R^3: 2 pi m a / sqrt(g) - H pi R
///   S^3: 2 pi m f^2 a / sqrt(g) - H pi R,      f^2 = 1 - R
///   H^3: 2 pi m f^2 <gamma', i gamma> / sqrt(g) + H pi R,   f^2 = 1 + R
///
/// On H^3 the pairing <gamma', i gamma> is the Lorentz one, equal to -a.
template <class T>
T closed_form_C(SpaceKind k, double m, double H, T R, T a, T b2, T v2) {
  using std::sqrt;
  T f2, E;
  switch (k) {
    case SpaceKind::Euclidean3:
      f2 = T(1.0);
      E = v2;
      break;
    case SpaceKind::Sphere3:
      f2 = 1.0 - R;
      E = v2 + b2 / f2;
      break;
    default:
      f2 = 1.0 + R;
      E = v2 - b2 / f2;
      break;
  }
  const T G = R + m * m * f2;
  const T g = E * G - a * a;
  const T flux = 2.0 * kPi * m * f2 * a / sqrt(g);
  if (k == SpaceKind::Hyperbolic3) return -flux + H * kPi * R;
  return flux - H * kPi * R;
}

/// Global sign s with  omega = s * C  (omega from the flux quadratures).
constexpr double flux_sign(SpaceKind k) noexcept { return k == SpaceKind::Hyperbolic3 ? 1.0 : -1.0; }

inline double conserved_quantity(const Twizzler& t, double u, double H) {
  const CurveJet j = t.base()(u);
  const double R = std::norm(j.pos);
  const double a = dot(j.d1, cplx(0, 1) * j.pos);
  const double b = dot(j.pos, j.d1);
  const SpaceKind k = t.space().kind;
  if (k == SpaceKind::Sphere3 && 1.0 - R <= 1e-14) throw Error(ErrorKind::AxisTouch, "profile f vanishes");
  const double v2 = std::norm(j.d1);
  // guard the metric before dividing by it
  double f2 = k == SpaceKind::Sphere3 ? 1.0 - R : (k == SpaceKind::Hyperbolic3 ? 1.0 + R : 1.0);
  double E = k == SpaceKind::Euclidean3 ? v2 : (k == SpaceKind::Sphere3 ? v2 + b * b / f2 : v2 - b * b / f2);
  const double g = E * (R + t.pitch() * t.pitch() * f2) - a * a;
  if (!(g > 1e-24)) throw Error(ErrorKind::DegenerateMetric, "sqrt(g) <= 1e-12 at u=" + std::to_string(u));
  return closed_form_C<double>(k, t.pitch(), H, R, a, b * b, v2);
}

/// Flux of Y through the conormal along the helix v in [0, 2 pi] at u0.
/// Equals flux_sign * (the H-free part of C).
inline double flux_conormal(const Twizzler& t, double u0, const quad::CompositeOptions& opts = {}) {
  const SpaceForm& sf = t.space();
  auto integrand = [&](double v) {
    const FrameAtPoint fr = helix_frame(t, u0, v);
    const AmbientVector p = t.immerse(u0, v);
    return metric(sf, killing_field(sf, p), fr.eta) * metric_norm(sf, fr.T_v);
  };
  return quad::composite_doubling(integrand, 0.0, 2.0 * kPi, opts).value;
}

/// Shaving through the helix at u0, parameterized by (v, t).
struct Shaving {
  double t_max = 0.0;
  std::function<std::array<AmbientVector, 3>(double, double)> eval;  // S, S_v, S_t
};

inline Shaving make_shaving(const Twizzler& t, double u0) {
  const cplx g0 = t.base()(u0).pos;
  const double r = std::abs(g0);
  const double m = t.pitch();
  const SpaceKind k = t.space().kind;
  auto pair = [k](cplx a, cplx b) { return AmbientVector::from_pair(k, a, b); };
  const cplx ie(0, 1);
  Shaving s;
  switch (k) {
    case SpaceKind::Euclidean3:
      s.t_max = 1.0;
      s.eval = [=](double v, double tt) {
        const cplx e = std::polar(1.0, v) * g0;
        return std::array{pair(tt * e, m * v), pair(ie * tt * e, m), pair(e, 0.0)};
      };
      break;
    case SpaceKind::Sphere3: {
      const cplx gh = g0 / r;
      s.t_max = std::acos(std::clamp(std::sqrt(std::max(0.0, 1.0 - r * r)), -1.0, 1.0));
      s.eval = [=](double v, double tt) {
        const cplx e = std::polar(1.0, v) * gh, w = std::polar(1.0, m * v);
        const double sn = std::sin(tt), cs = std::cos(tt);
        return std::array{pair(e * sn, w * cs), pair(ie * e * sn, cplx(0, m) * w * cs), pair(e * cs, -w * sn)};
      };
      break;
    }
    case SpaceKind::Hyperbolic3: {
      const cplx gh = g0 / r;
      s.t_max = std::acosh(std::sqrt(1.0 + r * r));
      s.eval = [=](double v, double tt) {
        const cplx e = std::polar(1.0, v) * gh;
        const Mat2 B = boost(m, v);
        const double sh = std::sinh(tt), ch = std::cosh(tt);
        auto bw = [&](double x, double y) {
          const auto q = B.apply({x, y});
          return cplx(q[0], q[1]);
        };
        return std::array{pair(e * sh, bw(0, ch)), pair(ie * e * sh, m * bw(ch, 0)), pair(e * ch, bw(0, sh))};
      };
      break;
    }
  }
  return s;
}

/// Flux of Y through the shaving, oriented by the volume form on (S_v, S_t).
/// In R^3 this is -pi |gamma(u0)|^2. A shaving of zero radius has zero flux.
inline double flux_shaving(const Twizzler& t, double u0, const quad::CompositeOptions& opts = {}) {
  if (std::abs(t.base()(u0).pos) <= 1e-12) return 0.0;
  const SpaceForm& sf = t.space();
  const Shaving s = make_shaving(t, u0);
  auto integrand = [&](double v, double tt) {
    const auto [p, sv, st] = s.eval(v, tt);
    return volume_form(sf, p, sv, st, killing_field(sf, p));
  };
  return quad::composite_doubling_2d(integrand, 0.0, 2.0 * kPi, 0.0, s.t_max, opts).value;
}

// ---------------------------------------------------------------------------

inline double median(std::vector<double> x) {
  if (x.empty()) return 0.0;
  const std::size_t n = x.size() / 2;
  std::nth_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n), x.end());
  if (x.size() % 2 == 1) return x[n];
  const double hi = x[n];
  const double lo = *std::max_element(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
  return 0.5 * (lo + hi);
}

inline double max_deviation_from(std::span<const double> x, double ref) {
  double d = 0.0;
  for (double v : x) d = std::max(d, std::abs(v - ref));
  return d;
}

struct FluxReport {
  SpaceKind kind = SpaceKind::Euclidean3;
  double H = 0.0;
  double sign = -1.0;
  std::vector<double> u;
  std::vector<double> conormal;
  std::vector<double> shaving;
  std::vector<double> omega;
  std::vector<double> closed_form;
  std::vector<double> abs_diff;  // |omega - sign * closed_form|

  double median_C = 0.0;
  double max_dev_closed = 0.0;  // max |C(u) - median C|
  double max_dev_omega = 0.0;   // max |omega(u) - median omega|
  double max_discrepancy = 0.0;

  /// Deviation used for verdicts: the larger of the two methods.
  double max_dev() const noexcept { return std::max(max_dev_closed, max_dev_omega); }
};

struct ConstancyOptions {
  bool quadrature = true;  // false: closed form only
  quad::CompositeOptions quad{};
};

/// omega(u) = flux_conormal - H flux_shaving and the closed form C(u) on each
/// sample, with deviation and cross-method summaries.
inline FluxReport check_constancy(const Twizzler& t, double H, std::span<const double> u_samples,
                                  const ConstancyOptions& opt = {}) {
  if (u_samples.empty()) throw Error(ErrorKind::InvalidArgument, "no u samples");
  FluxReport r;
  r.kind = t.space().kind;
  r.H = H;
  r.sign = flux_sign(r.kind);
  for (double u : u_samples) {
    const double C = conserved_quantity(t, u, H);
    r.u.push_back(u);
    r.closed_form.push_back(C);
    if (opt.quadrature) {
      const double a = flux_conormal(t, u, opt.quad);
      const double b = flux_shaving(t, u, opt.quad);
      r.conormal.push_back(a);
      r.shaving.push_back(b);
      r.omega.push_back(a - H * b);
    } else {
      r.omega.push_back(r.sign * C);
    }
    r.abs_diff.push_back(std::abs(r.omega.back() - r.sign * C));
  }
  r.median_C = median(r.closed_form);
  r.max_dev_closed = max_deviation_from(r.closed_form, r.median_C);
  r.max_dev_omega = max_deviation_from(r.omega, median(r.omega));
  r.max_discrepancy = *std::max_element(r.abs_diff.begin(), r.abs_diff.end());
  return r;
}

/// (H, C, M) with the link C = -pi M.
struct ConservationData {
  double H = 0.0;
  double C = 0.0;
  std::optional<double> M;
  double deviation = 0.0;     // max |C(u) - median C|
  double M_deviation = 0.0;   // max |M(u) - median M| when M is sampled
  double max_link = 0.0;      // max |C(u) + pi M(u)| over samples

  bool link_holds(double tol = 1e-9) const noexcept { return !M || std::abs(C + kPi * *M) <= tol; }
};

enum class Verdict { Cmc, NonCmc, Inconclusive };

inline std::string_view verdict_name(Verdict v) noexcept {
  switch (v) {
    case Verdict::Cmc: return "CMC";
    case Verdict::NonCmc: return "NON_CMC";
    case Verdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "INCONCLUSIVE";
}

struct VerdictThresholds {
  double cmc = 1e-6;      // deviation at or below: constant
  double non_cmc = 1e-3;  // deviation at or above: not constant
};

inline Verdict verdict(double deviation, const VerdictThresholds& th = {}) {
  if (deviation <= th.cmc) return Verdict::Cmc;
  if (deviation >= th.non_cmc) return Verdict::NonCmc;
  return Verdict::Inconclusive;
}

}  // namespace cmc
