#pragma once

// Ambient geometries for helicoidal surfaces: Euclidean space, the round
// 3-sphere in R^4 and the Lorentz model of hyperbolic space in R^4.
//
// R^4 is identified with C x C through (Re z, Im z, Re w, Im w), and the
// plane span(e1, e2) with C through a e1 + b e2 <-> a + ib.

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string_view>

#include "cmc/error.hpp"

namespace cmc {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

enum class SpaceKind { Euclidean3, Sphere3, Hyperbolic3 };

constexpr std::string_view space_name(SpaceKind k) noexcept {
  switch (k) {
    case SpaceKind::Euclidean3: return "r3";
    case SpaceKind::Sphere3: return "s3";
    case SpaceKind::Hyperbolic3: return "h3";
  }
  return "?";
}

inline SpaceKind parse_space(std::string_view s) {
  if (s == "r3" || s == "R3" || s == "euclidean") return SpaceKind::Euclidean3;
  if (s == "s3" || s == "S3" || s == "sphere") return SpaceKind::Sphere3;
  if (s == "h3" || s == "H3" || s == "hyperbolic") return SpaceKind::Hyperbolic3;
  throw Error(ErrorKind::InvalidArgument, "unknown space '" + std::string(s) + "'");
}

constexpr std::size_t ambient_dim(SpaceKind k) noexcept {
  return k == SpaceKind::Euclidean3 ? 3 : 4;
}

/// Diagonal metric weights of the ambient space. Hyperbolic space uses
/// Q = diag(-1, -1, -1, 1), so points satisfy <p, p> = 1 and tangent vectors
/// have negative square norm.
struct SpaceForm {
  SpaceKind kind = SpaceKind::Euclidean3;

  constexpr std::size_t dim() const noexcept { return ambient_dim(kind); }

  constexpr std::array<double, 4> signature() const noexcept {
    switch (kind) {
      case SpaceKind::Euclidean3: return {1, 1, 1, 0};
      case SpaceKind::Sphere3: return {1, 1, 1, 1};
      case SpaceKind::Hyperbolic3: return {-1, -1, -1, 1};
    }
    return {0, 0, 0, 0};
  }

  constexpr bool curved() const noexcept { return kind != SpaceKind::Euclidean3; }

  static constexpr SpaceForm euclidean() noexcept { return {SpaceKind::Euclidean3}; }
  static constexpr SpaceForm sphere() noexcept { return {SpaceKind::Sphere3}; }
  static constexpr SpaceForm hyperbolic() noexcept { return {SpaceKind::Hyperbolic3}; }
};

/// A vector in the ambient R^3 or R^4, tagged with the space it belongs to.
/// Unused trailing components of Euclidean vectors are kept at zero.
struct AmbientVector {
  SpaceKind kind = SpaceKind::Euclidean3;
  std::array<double, 4> c{0, 0, 0, 0};

  AmbientVector() = default;
  AmbientVector(SpaceKind k, std::array<double, 4> coords) : kind(k), c(coords) {
    if (k == SpaceKind::Euclidean3) c[3] = 0.0;
  }
  AmbientVector(SpaceKind k, double x, double y, double z, double w = 0.0)
      : AmbientVector(k, std::array<double, 4>{x, y, z, w}) {}

  /// Builds (z, w) in C x C, or (z, height) for R^3.
  static AmbientVector from_pair(SpaceKind k, cplx z, cplx w) {
    if (k == SpaceKind::Euclidean3) return {k, z.real(), z.imag(), w.real()};
    return {k, z.real(), z.imag(), w.real(), w.imag()};
  }

  std::size_t size() const noexcept { return ambient_dim(kind); }
  double operator[](std::size_t i) const { return c[i]; }
  double& operator[](std::size_t i) { return c[i]; }

  cplx z() const noexcept { return {c[0], c[1]}; }
  cplx w() const noexcept { return {c[2], c[3]}; }

  AmbientVector& operator+=(const AmbientVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < 4; ++i) c[i] += o.c[i];
    return *this;
  }
  AmbientVector& operator-=(const AmbientVector& o) {
    check_same(o);
    for (std::size_t i = 0; i < 4; ++i) c[i] -= o.c[i];
    return *this;
  }
  AmbientVector& operator*=(double s) noexcept {
    for (auto& x : c) x *= s;
    return *this;
  }

  friend AmbientVector operator+(AmbientVector a, const AmbientVector& b) { return a += b; }
  friend AmbientVector operator-(AmbientVector a, const AmbientVector& b) { return a -= b; }
  friend AmbientVector operator*(AmbientVector a, double s) { return a *= s; }
  friend AmbientVector operator*(double s, AmbientVector a) { return a *= s; }
  friend AmbientVector operator-(AmbientVector a) { return a *= -1.0; }

  void check_same(const AmbientVector& o) const {
    if (o.kind != kind) throw Error(ErrorKind::DimensionMismatch, "ambient vectors from different spaces");
  }
};

namespace detail {
inline void require_kind(const SpaceForm& sf, const AmbientVector& v) {
  if (v.kind != sf.kind) {
    throw Error(ErrorKind::DimensionMismatch,
                "vector tagged " + std::string(space_name(v.kind)) + " used in " +
                    std::string(space_name(sf.kind)));
  }
}
}  // namespace detail

/// Ambient bilinear form with the space's signature weights.
inline double inner(const SpaceForm& sf, const AmbientVector& a, const AmbientVector& b) {
  detail::require_kind(sf, a);
  detail::require_kind(sf, b);
  const auto w = sf.signature();
  double s = 0.0;
  for (std::size_t i = 0; i < sf.dim(); ++i) s += w[i] * a.c[i] * b.c[i];
  return s;
}

/// Riemannian metric on tangent vectors: the ambient form, negated for the
/// Lorentz model so that it is positive definite on T_p H^3.
inline double metric(const SpaceForm& sf, const AmbientVector& a, const AmbientVector& b) {
  const double s = inner(sf, a, b);
  return sf.kind == SpaceKind::Hyperbolic3 ? -s : s;
}

inline double metric_norm(const SpaceForm& sf, const AmbientVector& a) {
  return std::sqrt(std::max(0.0, metric(sf, a, a)));
}

/// Screw-motion Killing field. R^3: translation e3. S^3: (z, w) -> (0, i w).
/// H^3: (z, w) -> (0, J w) with J the swap of w's two real components.
inline AmbientVector killing_field(const SpaceForm& sf, const AmbientVector& p) {
  detail::require_kind(sf, p);
  switch (sf.kind) {
    case SpaceKind::Euclidean3: return {sf.kind, 0.0, 0.0, 1.0};
    case SpaceKind::Sphere3: return {sf.kind, 0.0, 0.0, -p.c[3], p.c[2]};
    case SpaceKind::Hyperbolic3: return {sf.kind, 0.0, 0.0, p.c[3], p.c[2]};
  }
  return p;
}

/// Removes the position component of v at p (identity in R^3).
inline AmbientVector project_tangent(const SpaceForm& sf, const AmbientVector& p,
                                     const AmbientVector& v) {
  detail::require_kind(sf, p);
  detail::require_kind(sf, v);
  if (!sf.curved()) return v;
  return v - p * (inner(sf, v, p) / inner(sf, p, p));
}

inline bool on_space(const SpaceForm& sf, const AmbientVector& p, double tol = 1e-9) {
  if (p.kind != sf.kind) return false;
  if (!sf.curved()) return true;
  if (sf.kind == SpaceKind::Hyperbolic3 && p.c[3] <= 0.0) return false;
  return std::abs(inner(sf, p, p) - 1.0) <= tol;
}

/// Validated point constructor. Curved cases are rescaled onto <p, p> = 1 to
/// absorb integrator drift; points that cannot be rescaled (non-positive norm,
/// lower sheet of the hyperboloid) are rejected.
inline AmbientVector make_point(const SpaceForm& sf, std::array<double, 4> coords) {
  AmbientVector p(sf.kind, coords);
  if (!sf.curved()) return p;
  const double n2 = inner(sf, p, p);
  if (!(n2 > 0.0) || (sf.kind == SpaceKind::Hyperbolic3 && p.c[3] <= 0.0)) {
    throw Error(ErrorKind::DomainError, "point cannot be normalized onto the space");
  }
  return p * (1.0 / std::sqrt(n2));
}

/// 2x2 real matrix, row major.
struct Mat2 {
  std::array<std::array<double, 2>, 2> a{};

  double det() const noexcept { return a[0][0] * a[1][1] - a[0][1] * a[1][0]; }

  std::array<double, 2> apply(std::array<double, 2> x) const noexcept {
    return {a[0][0] * x[0] + a[0][1] * x[1], a[1][0] * x[0] + a[1][1] * x[1]};
  }

  friend Mat2 operator*(const Mat2& l, const Mat2& r) noexcept {
    Mat2 out;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.a[i][j] = l.a[i][0] * r.a[0][j] + l.a[i][1] * r.a[1][j];
    return out;
  }
};

/// Hyperbolic boost B_m(v) in SO(1, 1).
inline Mat2 boost(double m, double v) noexcept {
  const double ch = std::cosh(m * v);
  const double sh = std::sinh(m * v);
  return Mat2{{{{ch, sh}, {sh, ch}}}};
}

/// Determinant of four R^4 column vectors.
inline double det4(const AmbientVector& a, const AmbientVector& b, const AmbientVector& c,
                   const AmbientVector& d) noexcept {
  const double m[4][4] = {{a.c[0], b.c[0], c.c[0], d.c[0]},
                          {a.c[1], b.c[1], c.c[1], d.c[1]},
                          {a.c[2], b.c[2], c.c[2], d.c[2]},
                          {a.c[3], b.c[3], c.c[3], d.c[3]}};
  auto minor3 = [&](int skip_row) {
    int r[3];
    for (int i = 0, k = 0; i < 4; ++i)
      if (i != skip_row) r[k++] = i;
    // columns 1..3
    return m[r[0]][1] * (m[r[1]][2] * m[r[2]][3] - m[r[1]][3] * m[r[2]][2]) -
           m[r[0]][2] * (m[r[1]][1] * m[r[2]][3] - m[r[1]][3] * m[r[2]][1]) +
           m[r[0]][3] * (m[r[1]][1] * m[r[2]][2] - m[r[1]][2] * m[r[2]][1]);
  };
  return m[0][0] * minor3(0) - m[1][0] * minor3(1) + m[2][0] * minor3(2) - m[3][0] * minor3(3);
}

inline double det3(const AmbientVector& a, const AmbientVector& b, const AmbientVector& c) noexcept {
  return a.c[0] * (b.c[1] * c.c[2] - b.c[2] * c.c[1]) - b.c[0] * (a.c[1] * c.c[2] - a.c[2] * c.c[1]) +
         c.c[0] * (a.c[1] * b.c[2] - a.c[2] * b.c[1]);
}

/// Oriented volume form of the space evaluated on tangent vectors at p:
/// det[a, b, c] in R^3 and det[p, a, b, c] in the curved cases. For the
/// Lorentz model the result is negated so that pairing with the positive
/// tangent metric is consistent with the Riemannian orientation used for
/// normals and shaving fluxes.
inline double volume_form(const SpaceForm& sf, const AmbientVector& p, const AmbientVector& a,
                          const AmbientVector& b, const AmbientVector& c) {
  switch (sf.kind) {
    case SpaceKind::Euclidean3: return det3(a, b, c);
    case SpaceKind::Sphere3: return det4(p, a, b, c);
    case SpaceKind::Hyperbolic3: return -det4(p, a, b, c);
  }
  return 0.0;
}

/// Tangent vector n at p with metric(n, x) = volume_form(p, a, b, x) for all
/// tangent x, i.e. the oriented normal to span{a, b} scaled by its area.
inline AmbientVector cross(const SpaceForm& sf, const AmbientVector& p, const AmbientVector& a,
                           const AmbientVector& b) {
  if (!sf.curved()) {
    return {sf.kind, a.c[1] * b.c[2] - a.c[2] * b.c[1], a.c[2] * b.c[0] - a.c[0] * b.c[2],
            a.c[0] * b.c[1] - a.c[1] * b.c[0]};
  }
  AmbientVector n(sf.kind, 0, 0, 0, 0);
  for (std::size_t i = 0; i < 4; ++i) {
    AmbientVector e(sf.kind, 0, 0, 0, 0);
    e.c[i] = 1.0;
    n.c[i] = det4(p, a, b, e);
  }
  if (sf.kind == SpaceKind::Hyperbolic3) {
    // metric(Q n', x) = -n'^T x; with volume_form = -det this is the cofactor vector mapped by Q.
    const auto w = sf.signature();
    for (std::size_t i = 0; i < 4; ++i) n.c[i] *= w[i];
  }
  return n;
}

}  // namespace cmc
