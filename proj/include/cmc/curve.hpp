#pragma once

// Planar C^2 curves gamma : I -> C, their kinematics, and the support
// parameterization of strictly convex arcs.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cmc/error.hpp"
#include "cmc/quadrature.hpp"
#include "cmc/spaceform.hpp"

namespace cmc {

/// Value and first two derivatives of a planar curve at one parameter.
struct CurveJet {
  cplx pos;
  cplx d1;
  cplx d2;
};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const noexcept { return hi - lo; }
  bool contains(double u, double slack = 0.0) const noexcept { return u >= lo - slack && u <= hi + slack; }
  double at(double t) const noexcept { return lo + t * (hi - lo); }
};

/// Real planar dot product under C ~ R^2.
inline double dot(cplx a, cplx b) noexcept { return a.real() * b.real() + a.imag() * b.imag(); }

/// Planar cross product a x b (e3 component).
inline double cross2(cplx a, cplx b) noexcept { return a.real() * b.imag() - a.imag() * b.real(); }

namespace detail {

// Monomial coefficients of a Hermite interpolant on t in [0, 1]; derivatives
// are returned with respect to t.
template <class T, std::size_t N>
struct Poly {
  std::array<T, N> c{};

  std::array<T, 4> eval(double t) const {
    std::array<T, 4> out{};
    for (std::size_t d = 0; d < 4; ++d) {
      T acc{};
      for (std::size_t k = N; k-- > d;) {
        double fall = 1.0;
        for (std::size_t j = 0; j < d; ++j) fall *= static_cast<double>(k - j);
        acc = acc * t + c[k] * fall;
      }
      out[d] = acc;
    }
    return out;
  }
};

// p0, p1 values; m0, m1 first derivatives and a0, a1 second derivatives, all
// already scaled to the unit interval.
template <class T>
Poly<T, 6> quintic_hermite(T p0, T p1, T m0, T m1, T a0, T a1) {
  const T dp = p1 - p0;
  Poly<T, 6> p;
  p.c[0] = p0;
  p.c[1] = m0;
  p.c[2] = a0 * 0.5;
  p.c[3] = dp * 10.0 - m0 * 6.0 - m1 * 4.0 - (a0 * 3.0 - a1) * 0.5;
  p.c[4] = dp * -15.0 + m0 * 8.0 + m1 * 7.0 + (a0 * 3.0 - a1 * 2.0) * 0.5;
  p.c[5] = dp * 6.0 - m0 * 3.0 - m1 * 3.0 - (a0 - a1) * 0.5;
  return p;
}

template <class T>
Poly<T, 6> cubic_hermite(T p0, T p1, T m0, T m1) {
  const T dp = p1 - p0;
  Poly<T, 6> p;
  p.c[0] = p0;
  p.c[1] = m0;
  p.c[2] = dp * 3.0 - m0 * 2.0 - m1;
  p.c[3] = dp * -2.0 + m0 + m1;
  return p;
}

inline void require_increasing(std::span<const double> u) {
  for (std::size_t i = 1; i < u.size(); ++i) {
    if (!(u[i] > u[i - 1])) throw Error(ErrorKind::InvalidArgument, "sample grid must be strictly increasing");
  }
}

// Index i with u[i] <= x <= u[i+1], clamped to the valid range.
inline std::size_t locate(std::span<const double> u, double x) {
  auto it = std::upper_bound(u.begin(), u.end(), x);
  std::size_t i = it == u.begin() ? 0 : static_cast<std::size_t>(it - u.begin()) - 1;
  return std::min(i, u.size() - 2);
}

}  // namespace detail

/// Dense samples of (gamma, gamma', [gamma'']) on a strictly increasing grid.
struct CurveSamples {
  std::vector<double> u;
  std::vector<cplx> pos;
  std::vector<cplx> d1;
  std::vector<cplx> d2;  // empty when only first derivatives are known
};

/// Immutable planar curve. Either a closed-form callable or dense samples.
/// Samples carrying gamma'' are interpolated by quintic Hermite pieces;
/// samples with only (gamma, gamma') use cubic Hermite pieces, and gamma'' at
/// a node is the average of its two one-sided values.
class BaseCurve {
 public:
  using Eval = std::function<CurveJet(double)>;

  BaseCurve() = default;

  BaseCurve(Interval domain, Eval eval) : domain_(domain), eval_(std::move(eval)) {
    if (!(domain.hi > domain.lo)) throw Error(ErrorKind::InvalidArgument, "curve domain must have positive length");
  }

  static BaseCurve sampled(CurveSamples s) {
    const std::size_t n = s.u.size();
    if (n < 2) throw Error(ErrorKind::DegenerateArc, "sampled curve needs at least 2 samples");
    if (s.pos.size() != n || s.d1.size() != n || (!s.d2.empty() && s.d2.size() != n)) {
      throw Error(ErrorKind::InvalidArgument, "sample arrays differ in length");
    }
    detail::require_increasing(s.u);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(s.d1[i]) <= 1e-14) {
        throw Error(ErrorKind::ZeroSpeed, "zero speed at sample u=" + std::to_string(s.u[i]));
      }
    }
    auto data = std::make_shared<const CurveSamples>(std::move(s));
    BaseCurve c;
    c.domain_ = {data->u.front(), data->u.back()};
    c.samples_ = data;
    c.eval_ = [data](double u) { return eval_samples(*data, u); };
    return c;
  }

  CurveJet operator()(double u) const {
    if (!eval_) throw Error(ErrorKind::InvalidArgument, "empty curve");
    const double slack = 1e-12 * std::max(1.0, std::abs(domain_.lo) + std::abs(domain_.hi));
    if (!domain_.contains(u, slack)) {
      throw Error(ErrorKind::DomainError, "u=" + std::to_string(u) + " outside [" + std::to_string(domain_.lo) +
                                              ", " + std::to_string(domain_.hi) + "]");
    }
    return eval_(std::clamp(u, domain_.lo, domain_.hi));
  }

  const Interval& domain() const noexcept { return domain_; }
  bool is_sampled() const noexcept { return samples_ != nullptr; }
  const CurveSamples* samples() const noexcept { return samples_.get(); }
  bool valid() const noexcept { return static_cast<bool>(eval_); }

  /// Grid used by checks "at sample resolution": the nodes for sampled
  /// curves, otherwise n uniform points.
  std::vector<double> check_grid(std::size_t n = 2001) const {
    if (samples_) return samples_->u;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = domain_.at(static_cast<double>(i) / static_cast<double>(n - 1));
    return g;
  }

 private:
  static CurveJet eval_samples(const CurveSamples& s, double u) {
    const std::size_t i = detail::locate(s.u, u);
    const double h = s.u[i + 1] - s.u[i];
    const double t = (u - s.u[i]) / h;
    if (!s.d2.empty()) {
      const auto p = detail::quintic_hermite<cplx>(s.pos[i], s.pos[i + 1], s.d1[i] * h, s.d1[i + 1] * h,
                                                   s.d2[i] * (h * h), s.d2[i + 1] * (h * h));
      const auto v = p.eval(t);
      return {v[0], v[1] / h, v[2] / (h * h)};
    }
    auto piece = [&](std::size_t j) {
      const double hj = s.u[j + 1] - s.u[j];
      return std::pair{detail::cubic_hermite<cplx>(s.pos[j], s.pos[j + 1], s.d1[j] * hj, s.d1[j + 1] * hj), hj};
    };
    const auto [p, hh] = piece(i);
    const auto v = p.eval(t);
    CurveJet jet{v[0], v[1] / hh, v[2] / (hh * hh)};
    // gamma'' jumps at interior nodes; report the one-sided average there.
    const double node_tol = 1e-13 * h;
    std::optional<std::size_t> node;
    if (std::abs(u - s.u[i]) <= node_tol && i > 0) node = i;
    if (std::abs(u - s.u[i + 1]) <= node_tol && i + 2 < s.u.size()) node = i + 1;
    if (node) {
      const std::size_t j = *node;
      const auto [pl, hl] = piece(j - 1);
      const auto [pr, hr] = piece(j);
      jet.d2 = 0.5 * (pl.eval(1.0)[2] / (hl * hl) + pr.eval(0.0)[2] / (hr * hr));
    }
    return jet;
  }

  Interval domain_{};
  Eval eval_;
  std::shared_ptr<const CurveSamples> samples_;
};

// ---------------------------------------------------------------------------
// Kinematics

/// Signed curvature of a planar curve, positive when turning counterclockwise.
inline double signed_curvature(const CurveJet& j) {
  const double v = std::abs(j.d1);
  if (v <= 1e-14) throw Error(ErrorKind::ZeroSpeed, "curvature undefined at zero speed");
  return cross2(j.d1, j.d2) / (v * v * v);
}

struct Kinematics {
  double speed = 0.0;
  cplx tangent;
  double curvature = 0.0;
  double arclength = 0.0;
};

/// Arc length between two parameters (signed by orientation of [a, b]).
inline double arclength(const BaseCurve& c, double a, double b, double tol = 1e-12) {
  auto speed = [&](double u) { return std::abs(c(u).d1); };
  if (const auto* s = c.samples()) {
    // integrate piece by piece so interpolation breakpoints are panel edges
    const double lo = std::min(a, b), hi = std::max(a, b);
    double total = 0.0;
    double x = lo;
    auto it = std::upper_bound(s->u.begin(), s->u.end(), lo);
    while (x < hi) {
      const double next = (it == s->u.end()) ? hi : std::min(hi, *it);
      if (next > x) total += quad::adaptive(speed, x, next, tol);
      x = next;
      if (it != s->u.end()) ++it;
    }
    return b >= a ? total : -total;
  }
  return quad::adaptive(speed, a, b, tol);
}

inline Kinematics kinematics(const BaseCurve& c, double u) {
  const CurveJet j = c(u);
  Kinematics k;
  k.speed = std::abs(j.d1);
  if (k.speed <= 1e-14) throw Error(ErrorKind::ZeroSpeed, "zero speed at u=" + std::to_string(u));
  k.tangent = j.d1 / k.speed;
  k.curvature = signed_curvature(j);
  k.arclength = arclength(c, c.domain().lo, u);
  return k;
}

/// Arc length from the left endpoint at each grid point (grid must be sorted).
inline std::vector<double> cumulative_arclength(const BaseCurve& c, std::span<const double> grid) {
  std::vector<double> s(grid.size());
  double prev_u = c.domain().lo;
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    acc += arclength(c, prev_u, grid[i]);
    s[i] = acc;
    prev_u = grid[i];
  }
  return s;
}

// ---------------------------------------------------------------------------
// Transformations

/// Composition gamma(phi(t)); phi returns (phi, phi', phi'') and must be
/// strictly monotone from the new domain onto a subset of the old one.
inline BaseCurve reparameterize(const BaseCurve& c, Interval new_domain,
                                std::function<std::array<double, 3>(double)> phi) {
  return BaseCurve(new_domain, [c, phi = std::move(phi)](double t) {
    const auto [p, dp, ddp] = phi(t);
    const CurveJet j = c(p);
    return CurveJet{j.pos, j.d1 * dp, j.d2 * (dp * dp) + j.d1 * ddp};
  });
}

/// e^{i alpha} gamma.
inline BaseCurve rotated(const BaseCurve& c, double alpha) {
  const cplx r = std::polar(1.0, alpha);
  return BaseCurve(c.domain(), [c, r](double u) {
    const CurveJet j = c(u);
    return CurveJet{r * j.pos, r * j.d1, r * j.d2};
  });
}

/// Same point set traversed backwards: u -> lo + hi - u.
inline BaseCurve reversed(const BaseCurve& c) {
  const Interval d = c.domain();
  return BaseCurve(d, [c, d](double u) {
    const CurveJet j = c(d.lo + d.hi - u);
    return CurveJet{j.pos, -j.d1, j.d2};
  });
}

inline BaseCurve restricted(const BaseCurve& c, Interval sub) {
  if (!c.domain().contains(sub.lo, 1e-12) || !c.domain().contains(sub.hi, 1e-12)) {
    throw Error(ErrorKind::DomainError, "restriction outside curve domain");
  }
  return BaseCurve(sub, [c](double u) { return c(u); });
}

/// Samples a curve on n uniform nodes, keeping gamma''.
inline BaseCurve resample(const BaseCurve& c, std::size_t n) {
  CurveSamples s;
  for (std::size_t i = 0; i < n; ++i) {
    const double u = c.domain().at(static_cast<double>(i) / static_cast<double>(n - 1));
    const CurveJet j = c(u);
    s.u.push_back(u);
    s.pos.push_back(j.pos);
    s.d1.push_back(j.d1);
    s.d2.push_back(j.d2);
  }
  return BaseCurve::sampled(std::move(s));
}

namespace curves {

/// center + r e^{i orientation u}.
inline BaseCurve circle(double r, cplx center = {}, int orientation = 1, Interval dom = {0.0, 2.0 * kPi}) {
  const double o = orientation >= 0 ? 1.0 : -1.0;
  return BaseCurve(dom, [=](double u) {
    const cplx e = std::polar(r, o * u);
    return CurveJet{center + e, cplx(0, o) * e, -e};
  });
}

/// gamma(u) = origin + u * direction.
inline BaseCurve line(Interval dom = {-1.0, 1.0}, cplx direction = 1.0, cplx origin = {}) {
  return BaseCurve(dom, [=](double u) { return CurveJet{origin + u * direction, direction, 0.0}; });
}

/// (1 + eps sin u) e^{iu}.
inline BaseCurve perturbed_circle(double eps, Interval dom = {0.0, 2.0 * kPi}) {
  return BaseCurve(dom, [=](double u) {
    const cplx e = std::polar(1.0, u);
    const cplx ie(0, 1);
    const double r = 1.0 + eps * std::sin(u);
    const double dr = eps * std::cos(u);
    const double ddr = -eps * std::sin(u);
    return CurveJet{r * e, (dr + ie * r) * e, (ddr - r + 2.0 * ie * dr) * e};
  });
}

/// Logarithmic spiral e^{(rate + i) u}.
inline BaseCurve log_spiral(double rate, Interval dom) {
  const cplx w(rate, 1.0);
  return BaseCurve(dom, [=](double u) {
    const cplx e = std::exp(w * u);
    return CurveJet{e, w * e, w * w * e};
  });
}

}  // namespace curves

// ---------------------------------------------------------------------------
// Support parameterization

struct SupportJet {
  double q = 0.0;
  double dq = 0.0;
  double ddq = 0.0;
  double dddq = 0.0;
};

/// Strictly convex arc described by its support function q(theta), so that
/// gamma(theta) = (q + i q') e^{i theta} with speed q + q''. theta is the
/// angle of the outward normal for the counterclockwise traversal.
/// orientation() is -1 when the arc was obtained from a clockwise curve.
class SupportCurve {
 public:
  using Eval = std::function<SupportJet(double)>;

  SupportCurve() = default;
  SupportCurve(Interval theta, Eval eval, int orientation = 1)
      : theta_(theta), eval_(std::move(eval)), orientation_(orientation >= 0 ? 1 : -1) {
    if (!(theta.hi > theta.lo)) throw Error(ErrorKind::InvalidArgument, "support domain must have positive length");
  }

  SupportJet operator()(double theta) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(theta_.lo) + std::abs(theta_.hi));
    if (!theta_.contains(theta, slack)) throw Error(ErrorKind::DomainError, "theta outside support domain");
    return eval_(std::clamp(theta, theta_.lo, theta_.hi));
  }

  const Interval& domain() const noexcept { return theta_; }
  int orientation() const noexcept { return orientation_; }

  /// Smallest q + q'' over n uniform points.
  double min_radius_of_curvature(std::size_t n = 2001) const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const auto j = (*this)(theta_.at(static_cast<double>(i) / static_cast<double>(n - 1)));
      m = std::min(m, j.q + j.ddq);
    }
    return m;
  }

 private:
  Interval theta_{};
  Eval eval_;
  int orientation_ = 1;
};

struct SupportOptions {
  std::size_t theta_nodes = 1025;  // uniform theta grid of the returned spline
  std::size_t u_grid = 2001;       // grid for convexity checks and angle accumulation
  double min_curvature = 1e-12;
};

/// Support function of a strictly convex curve. The cumulative normal angle is
/// accumulated by integrating theta' = v |k| over a fine grid (no branch cuts),
/// then snapped to the exact value arg(gamma') - pi/2 + 2 pi n.
inline SupportCurve support_parameterize(const BaseCurve& c, const SupportOptions& opt = {}) {
  std::vector<double> grid = c.check_grid(opt.u_grid);
  if (c.is_sampled() && grid.size() < opt.u_grid) {
    // refine sampled grids uniformly inside each node interval
    std::vector<double> fine;
    const std::size_t per = (opt.u_grid + grid.size() - 2) / (grid.size() - 1);
    for (std::size_t i = 0; i + 1 < grid.size(); ++i)
      for (std::size_t k = 0; k < per; ++k)
        fine.push_back(grid[i] + (grid[i + 1] - grid[i]) * static_cast<double>(k) / static_cast<double>(per));
    fine.push_back(grid.back());
    grid = std::move(fine);
  }
  if (grid.size() < 3) throw Error(ErrorKind::DegenerateArc, "arc has fewer than 3 samples");

  std::vector<double> k(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) k[i] = signed_curvature(c(grid[i]));
  const int sigma = k.front() > 0 ? 1 : -1;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(sigma * k[i] > opt.min_curvature)) {
      throw Error(ErrorKind::CurvatureVanishes, "curvature vanishes or changes sign near u=" + std::to_string(grid[i]));
    }
  }

  // Normal angle as a function of u (theta increases along the traversal
  // direction; for sigma = -1 that is decreasing u).
  auto raw_angle = [&](double u) { return std::arg(static_cast<double>(sigma) * c(u).d1) - 0.5 * kPi; };
  auto rate = [&](double u) {
    const CurveJet j = c(u);
    return std::abs(j.d1) * std::abs(signed_curvature(j));
  };
  std::vector<double> ang(grid.size());
  ang[0] = raw_angle(grid[0]);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double est = ang[i - 1] + sigma * quad::adaptive(rate, grid[i - 1], grid[i], 1e-13);
    const double base = raw_angle(grid[i]);
    ang[i] = base + 2.0 * kPi * std::round((est - base) / (2.0 * kPi));
  }

  // Theta(u) is monotone (increasing for sigma = 1, decreasing otherwise).
  auto theta_of = [&](double u, std::size_t i) {
    const double base = raw_angle(u);
    return base + 2.0 * kPi * std::round((ang[i] - base) / (2.0 * kPi));
  };
  auto u_of = [&](double theta) {
    // bracket on the grid
    std::size_t lo = 0, hi = grid.size() - 1;
    auto key = [&](std::size_t i) { return sigma * ang[i]; };
    const double target = sigma * theta;
    while (hi - lo > 1) {
      const std::size_t mid = (lo + hi) / 2;
      (key(mid) <= target ? lo : hi) = mid;
    }
    double a = grid[lo], b = grid[hi];
    double u = a + (b - a) * std::clamp((target - key(lo)) / (key(hi) - key(lo)), 0.0, 1.0);
    for (int it = 0; it < 60; ++it) {
      const double f = sigma * theta_of(u, lo) - target;
      if (std::abs(f) < 1e-15) break;
      f < 0 ? a = u : b = u;
      const double step = f / rate(u);
      double next = u - step;
      if (!(next > a && next < b)) next = 0.5 * (a + b);
      if (std::abs(next - u) < 1e-16 * std::max(1.0, std::abs(u))) {
        u = next;
        break;
      }
      u = next;
    }
    return u;
  };

  const double th0 = std::min(ang.front(), ang.back());
  const double th1 = std::max(ang.front(), ang.back());
  const std::size_t n = std::max<std::size_t>(opt.theta_nodes, 3);
  std::vector<double> th(n), q(n), dq(n), ddq(n);
  for (std::size_t i = 0; i < n; ++i) {
    th[i] = th0 + (th1 - th0) * static_cast<double>(i) / static_cast<double>(n - 1);
    double u;
    if (i == 0) u = sigma > 0 ? grid.front() : grid.back();
    else if (i == n - 1) u = sigma > 0 ? grid.back() : grid.front();
    else u = u_of(th[i]);
    const CurveJet j = c(u);
    const cplx local = j.pos * std::polar(1.0, -th[i]);
    q[i] = local.real();
    dq[i] = local.imag();
    ddq[i] = 1.0 / std::abs(signed_curvature(j)) - q[i];
  }

  auto data = std::make_shared<const std::array<std::vector<double>, 4>>(
      std::array<std::vector<double>, 4>{std::move(th), std::move(q), std::move(dq), std::move(ddq)});
  return SupportCurve(
      {th0, th1},
      [data](double theta) {
        const auto& [t, q, dq, ddq] = *data;
        const std::size_t i = detail::locate(t, theta);
        const double h = t[i + 1] - t[i];
        const auto p = detail::quintic_hermite<double>(q[i], q[i + 1], dq[i] * h, dq[i + 1] * h, ddq[i] * h * h,
                                                       ddq[i + 1] * h * h);
        const auto v = p.eval((theta - t[i]) / h);
        return SupportJet{v[0], v[1] / h, v[2] / (h * h), v[3] / (h * h * h)};
      },
      sigma);
}

/// gamma(theta) = (q + i q') e^{i theta}; rejects arcs where q + q'' <= 0.
inline BaseCurve from_support(const SupportCurve& sc, std::size_t check_points = 2001) {
  for (std::size_t i = 0; i < check_points; ++i) {
    const double th = sc.domain().at(static_cast<double>(i) / static_cast<double>(check_points - 1));
    const auto j = sc(th);
    if (!(j.q + j.ddq > 0.0)) {
      throw Error(ErrorKind::ConvexityViolation, "q + q'' <= 0 at theta=" + std::to_string(th));
    }
  }
  return BaseCurve(sc.domain(), [sc](double th) {
    const auto j = sc(th);
    const cplx e = std::polar(1.0, th);
    const cplx ie(0, 1);
    const double rho = j.q + j.ddq;
    return CurveJet{cplx(j.q, j.dq) * e, ie * rho * e, ie * (j.dq + j.dddq) * e - rho * e};
  });
}

}  // namespace cmc
