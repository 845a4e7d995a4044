#pragma once

// Helicoidal ("twizzler") immersions T(u, v) of a planar base curve in R^3,
// S^3 and the Lorentz model of H^3, with fundamental forms and meshing.

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "cmc/curve.hpp"
#include "cmc/error.hpp"
#include "cmc/spaceform.hpp"

namespace cmc {

/// Derived profile f(u) with its first two derivatives (S^3 and H^3 only).
struct Profile {
  double f = 0.0;
  double df = 0.0;
  double ddf = 0.0;
};

/// Position and partial derivatives of T at one (u, v).
struct SurfaceJet {
  AmbientVector T, Tu, Tv, Tuu, Tuv, Tvv;
};

struct FundamentalData {
  double E = 0, F = 0, G = 0;
  double L = 0, M2 = 0, N2 = 0;
  double sqrt_g = 0;
  double h = 0;
  AmbientVector nu;
  AmbientVector position;
};

struct FrameAtPoint {
  AmbientVector T_u, T_v, eta, nu;
};

class Twizzler {
 public:
  /// S^3 points with |gamma| > 1 + 1e-12 are rejected; samples where the
  /// profile f vanishes (the surface touches the axis circle) are recorded
  /// in axis_touches().
  Twizzler(SpaceForm sf, BaseCurve base, double m) : sf_(sf), base_(std::move(base)), m_(m) {
    if (!(m > 0.0) || !std::isfinite(m)) throw Error(ErrorKind::InvalidArgument, "pitch m must be positive");
    if (!base_.valid()) throw Error(ErrorKind::InvalidArgument, "empty base curve");
    if (sf_.kind == SpaceKind::Sphere3) {
      for (double u : base_.check_grid()) {
        const double r = std::abs(base_(u).pos);
        if (r > 1.0 + 1e-12) throw Error(ErrorKind::OutsideSphere, "|gamma| > 1 at u=" + std::to_string(u));
        if (1.0 - r * r <= 1e-12) touches_.push_back(u);
      }
    }
  }

  const SpaceForm& space() const noexcept { return sf_; }
  const BaseCurve& base() const noexcept { return base_; }
  double pitch() const noexcept { return m_; }
  const std::vector<double>& axis_touches() const noexcept { return touches_; }

  /// f = sqrt(1 - |gamma|^2) on S^3, sqrt(1 + |gamma|^2) on H^3, 1 in R^3.
  Profile profile(double u) const { return profile_of(base_(u)); }

  Profile profile_of(const CurveJet& j) const {
    if (sf_.kind == SpaceKind::Euclidean3) return {1.0, 0.0, 0.0};
    const double r2 = std::norm(j.pos);
    const double gd = dot(j.pos, j.d1);
    const double dd = std::norm(j.d1) + dot(j.pos, j.d2);
    Profile p;
    if (sf_.kind == SpaceKind::Sphere3) {
      if (r2 > 1.0 + 2e-12) throw Error(ErrorKind::OutsideSphere, "|gamma| > 1");
      p.f = std::sqrt(std::max(0.0, 1.0 - r2));
      if (p.f <= 0.0) {
        p.df = p.ddf = std::numeric_limits<double>::infinity();
        return p;
      }
      p.df = -gd / p.f;
      p.ddf = -(dd + p.df * p.df) / p.f;
    } else {
      p.f = std::sqrt(1.0 + r2);
      p.df = gd / p.f;
      p.ddf = (dd - p.df * p.df) / p.f;
    }
    return p;
  }

  AmbientVector immerse(double u, double v) const {
    const CurveJet j = base_(u);
    const cplx z = std::polar(1.0, v) * j.pos;
    switch (sf_.kind) {
      case SpaceKind::Euclidean3: return AmbientVector::from_pair(sf_.kind, z, m_ * v);
      case SpaceKind::Sphere3: return AmbientVector::from_pair(sf_.kind, z, std::polar(profile_of(j).f, m_ * v));
      case SpaceKind::Hyperbolic3: {
        const auto w = boost(m_, v).apply({0.0, profile_of(j).f});
        return AmbientVector::from_pair(sf_.kind, z, {w[0], w[1]});
      }
    }
    return {};
  }

  /// Analytic first and second partials of T.
  SurfaceJet surface_jet(double u, double v) const {
    const CurveJet j = base_(u);
    const cplx e = std::polar(1.0, v);
    const cplx ie(0, 1);
    const cplx z = e * j.pos, zu = e * j.d1, zuu = e * j.d2;
    const cplx zv = ie * z, zuv = ie * zu, zvv = -z;
    const SpaceKind k = sf_.kind;
    auto pair = [k](cplx a, cplx b) { return AmbientVector::from_pair(k, a, b); };
    if (k == SpaceKind::Euclidean3) {
      return {pair(z, m_ * v), pair(zu, 0.0), pair(zv, m_), pair(zuu, 0.0), pair(zuv, 0.0), pair(zvv, 0.0)};
    }
    const Profile p = profile_of(j);
    if (!std::isfinite(p.df)) throw Error(ErrorKind::AxisTouch, "profile f vanishes at u=" + std::to_string(u));
    if (k == SpaceKind::Sphere3) {
      const cplx w = std::polar(1.0, m_ * v);
      const cplx im(0, m_);
      return {pair(z, w * p.f),          pair(zu, w * p.df),       pair(zv, im * w * p.f),
              pair(zuu, w * p.ddf),      pair(zuv, im * w * p.df), pair(zvv, -m_ * m_ * w * p.f)};
    }
    const Mat2 B = boost(m_, v);
    auto bw = [&](double a, double b) {
      const auto r = B.apply({a, b});
      return cplx(r[0], r[1]);
    };
    return {pair(z, bw(0, p.f)),    pair(zu, bw(0, p.df)),       pair(zv, m_ * bw(p.f, 0)),
            pair(zuu, bw(0, p.ddf)), pair(zuv, m_ * bw(p.df, 0)), pair(zvv, m_ * m_ * bw(0, p.f))};
  }

 private:
  SpaceForm sf_;
  BaseCurve base_;
  double m_ = 1.0;
  std::vector<double> touches_;
};

// ---------------------------------------------------------------------------
// Fundamental forms

namespace detail {

inline FundamentalData forms_from_jet(const SpaceForm& sf, const SurfaceJet& J, double u) {
  FundamentalData d;
  d.position = J.T;
  d.E = metric(sf, J.Tu, J.Tu);
  d.F = metric(sf, J.Tu, J.Tv);
  d.G = metric(sf, J.Tv, J.Tv);
  const double det = d.E * d.G - d.F * d.F;
  d.sqrt_g = det > 0.0 ? std::sqrt(det) : 0.0;
  if (!(d.sqrt_g > 1e-12)) throw Error(ErrorKind::DegenerateMetric, "sqrt(g) <= 1e-12 at u=" + std::to_string(u));
  const AmbientVector n = cross(sf, J.T, J.Tu, J.Tv);
  d.nu = n * (1.0 / metric_norm(sf, n));
  // h = div(nu): second-form coefficients carry the minus sign.
  d.L = -metric(sf, J.Tuu, d.nu);
  d.M2 = -metric(sf, J.Tuv, d.nu);
  d.N2 = -metric(sf, J.Tvv, d.nu);
  d.h = (d.G * d.L - 2.0 * d.F * d.M2 + d.E * d.N2) / det;
  return d;
}

}  // namespace detail

enum class SecondPartials { Analytic, FiniteDifference };

/// First and second fundamental forms at (u, v). h is the trace of the shape
/// operator of nu (h = div nu), so the cylinder over the counterclockwise unit
/// circle has h = +1. nu is T_u x T_v in R^3 and the oriented normal with
/// volume(T, T_u, T_v, nu) > 0 in the curved cases.
inline FundamentalData fundamental_forms(const Twizzler& t, double u, double v = 0.0,
                                         SecondPartials mode = SecondPartials::Analytic) {
  SurfaceJet J = t.surface_jet(u, v);
  if (mode == SecondPartials::FiniteDifference) {
    // central differences of the analytic first partials, one Richardson level
    const double hs = std::max(1e-5, 1e-5 * std::abs(u));
    const Interval dom = t.base().domain();
    auto d_du = [&](double h) {
      const double a = std::max(dom.lo, u - h), b = std::min(dom.hi, u + h);
      const SurfaceJet p = t.surface_jet(b, v), m = t.surface_jet(a, v);
      return std::array<AmbientVector, 2>{(p.Tu - m.Tu) * (1.0 / (b - a)), (p.Tv - m.Tv) * (1.0 / (b - a))};
    };
    auto d_dv = [&](double h) {
      const SurfaceJet p = t.surface_jet(u, v + h), m = t.surface_jet(u, v - h);
      return (p.Tv - m.Tv) * (1.0 / (2.0 * h));
    };
    const auto a1 = d_du(hs), a2 = d_du(0.5 * hs);
    J.Tuu = (4.0 * a2[0] - a1[0]) * (1.0 / 3.0);
    J.Tuv = (4.0 * a2[1] - a1[1]) * (1.0 / 3.0);
    J.Tvv = (4.0 * d_dv(0.5 * hs) - d_dv(hs)) * (1.0 / 3.0);
  }
  return detail::forms_from_jet(t.space(), J, u);
}

inline double mean_curvature(const Twizzler& t, double u) { return fundamental_forms(t, u).h; }

/// Area density sqrt(EG - F^2) of the induced Riemannian metric.
inline double area_density(const Twizzler& t, double u, double v = 0.0) {
  return fundamental_forms(t, u, v).sqrt_g;
}

/// Tangent frame along the helix through (u0, v). eta is the unit conormal
/// T_u - (F/G) T_v, normalized; it points toward increasing u.
inline FrameAtPoint helix_frame(const Twizzler& t, double u0, double v) {
  const SpaceForm& sf = t.space();
  const SurfaceJet J = t.surface_jet(u0, v);
  const FundamentalData d = detail::forms_from_jet(sf, J, u0);
  AmbientVector eta = J.Tu - J.Tv * (d.F / d.G);
  eta = eta * (1.0 / metric_norm(sf, eta));
  return {J.Tu, J.Tv, eta, d.nu};
}

// ---------------------------------------------------------------------------
// Meshes

struct Mesh {
  SpaceKind kind = SpaceKind::Euclidean3;
  std::vector<AmbientVector> vertices;
  std::vector<AmbientVector> normals;
  std::vector<std::array<std::size_t, 3>> faces;
};

/// Regular (nu x nv) grid over [u0, u1] x [v0, v1], two triangles per cell.
/// Vertex (i, j) has index i * nv + j.
inline Mesh sample_mesh(const Twizzler& t, Interval ur, Interval vr, std::size_t nu, std::size_t nv) {
  if (nu < 2 || nv < 2) throw Error(ErrorKind::InvalidArgument, "mesh needs at least 2 samples per direction");
  if (!(ur.hi > ur.lo) || !(vr.hi > vr.lo)) throw Error(ErrorKind::InvalidArgument, "degenerate mesh range");
  const Interval dom = t.base().domain();
  if (!dom.contains(ur.lo, 1e-12) || !dom.contains(ur.hi, 1e-12)) {
    throw Error(ErrorKind::DomainError, "mesh u-range outside the base curve domain");
  }
  const SpaceForm& sf = t.space();
  Mesh mesh;
  mesh.kind = sf.kind;
  mesh.vertices.resize(nu * nv);
  mesh.normals.resize(nu * nv);
  for (std::size_t i = 0; i < nu; ++i) {
    const double u = ur.at(static_cast<double>(i) / static_cast<double>(nu - 1));
    for (std::size_t j = 0; j < nv; ++j) {
      const double v = vr.at(static_cast<double>(j) / static_cast<double>(nv - 1));
      const FundamentalData d = fundamental_forms(t, u, v);
      AmbientVector p = d.position;
      if (sf.curved()) p = make_point(sf, p.c);
      mesh.vertices[i * nv + j] = p;
      mesh.normals[i * nv + j] = d.nu;
    }
  }
  mesh.faces.reserve(2 * (nu - 1) * (nv - 1));
  for (std::size_t i = 0; i + 1 < nu; ++i) {
    for (std::size_t j = 0; j + 1 < nv; ++j) {
      const std::size_t a = i * nv + j, b = (i + 1) * nv + j, c = i * nv + j + 1, d = (i + 1) * nv + j + 1;
      mesh.faces.push_back({a, b, d});
      mesh.faces.push_back({a, d, c});
    }
  }
  return mesh;
}

/// 3D chart used for visualization: identity in R^3, stereographic projection
/// from (0, 0, 0, -1) on S^3, Poincare ball x / (1 + x4) on H^3.
inline std::array<double, 3> chart(const AmbientVector& p) {
  if (p.kind == SpaceKind::Euclidean3) return {p.c[0], p.c[1], p.c[2]};
  const double s = 1.0 / (1.0 + p.c[3]);
  return {p.c[0] * s, p.c[1] * s, p.c[2] * s};
}

}  // namespace cmc
