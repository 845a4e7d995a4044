#pragma once

// Gauss-Legendre rules, composite panels with doubling, and a recursive
// adaptive integrator used for arc length.

#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <mutex>
#include <utility>
#include <vector>

#include "cmc/error.hpp"

namespace cmc::quad {

struct Rule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

namespace detail {
// Returns (P_n(x), P_n'(x)) by the three-term recurrence.
inline std::pair<double, double> legendre(std::size_t n, double x) {
  double p0 = 1.0, p1 = x;
  if (n == 0) return {1.0, 0.0};
  for (std::size_t k = 2; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double pk = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
    p0 = p1;
    p1 = pk;
  }
  return {p1, static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0)};
}
}  // namespace detail

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline Rule gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "Gauss-Legendre rule needs n >= 1");
  Rule r;
  r.nodes.assign(n, 0.0);
  r.weights.assign(n, 0.0);
  if (n == 1) {
    r.weights[0] = 2.0;
    return r;
  }
  const double dn = static_cast<double>(n);
  for (std::size_t i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(3.14159265358979323846 * (static_cast<double>(i) + 0.75) / (dn + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto [p, dp] = detail::legendre(n, x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double dp = detail::legendre(n, x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

/// Cached rule; rules are immutable once built.
inline const Rule& cached_rule(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, Rule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, gauss_legendre(n)).first;
  return it->second;
}

template <class F>
double composite(F&& f, double a, double b, std::size_t panels, const Rule& rule) {
  const double h = (b - a) / static_cast<double>(panels);
  double total = 0.0;
  for (std::size_t p = 0; p < panels; ++p) {
    const double lo = a + h * static_cast<double>(p);
    const double mid = lo + 0.5 * h;
    double s = 0.0;
    for (std::size_t i = 0; i < rule.nodes.size(); ++i) s += rule.weights[i] * f(mid + 0.5 * h * rule.nodes[i]);
    total += 0.5 * h * s;
  }
  return total;
}

struct CompositeOptions {
  std::size_t nodes = 32;
  std::size_t start_panels = 8;
  std::size_t max_panels = 64;
  double tol = 1e-11;
};

struct CompositeResult {
  double value = 0.0;
  std::size_t panels = 0;
  double last_change = 0.0;
};

/// Composite Gauss-Legendre with panel doubling until two successive values
/// differ by less than opts.tol or opts.max_panels is reached.
template <class F>
CompositeResult composite_doubling(F&& f, double a, double b, const CompositeOptions& opts = {}) {
  const Rule& rule = cached_rule(opts.nodes);
  std::size_t panels = opts.start_panels;
  double prev = composite(f, a, b, panels, rule);
  double change = 0.0;
  while (panels < opts.max_panels) {
    panels *= 2;
    const double next = composite(f, a, b, panels, rule);
    change = std::abs(next - prev);
    prev = next;
    if (change < opts.tol) break;
  }
  return {prev, panels, change};
}

/// Tensor-product composite rule on [a0, b0] x [a1, b1] with the same
/// doubling strategy applied to both directions at once.
template <class F>
CompositeResult composite_doubling_2d(F&& f, double a0, double b0, double a1, double b1,
                                      const CompositeOptions& opts = {}) {
  const Rule& rule = cached_rule(opts.nodes);
  auto eval = [&](std::size_t panels) {
    return composite(
        [&](double x) { return composite([&](double y) { return f(x, y); }, a1, b1, panels, rule); }, a0,
        b0, panels, rule);
  };
  std::size_t panels = opts.start_panels;
  double prev = eval(panels);
  double change = 0.0;
  while (panels < opts.max_panels) {
    panels *= 2;
    const double next = eval(panels);
    change = std::abs(next - prev);
    prev = next;
    if (change < opts.tol) break;
  }
  return {prev, panels, change};
}

namespace detail {
template <class F>
double adaptive_rec(F& f, double a, double b, double whole, double tol, int depth, const Rule& rule) {
  const double m = 0.5 * (a + b);
  const double left = composite(f, a, m, 1, rule);
  const double right = composite(f, m, b, 1, rule);
  if (depth <= 0 || std::abs(left + right - whole) <= tol) return left + right;
  return adaptive_rec(f, a, m, left, 0.5 * tol, depth - 1, rule) +
         adaptive_rec(f, m, b, right, 0.5 * tol, depth - 1, rule);
}
}  // namespace detail

/// Recursive bisection with a 15-point rule; tol is an absolute target.
template <class F>
double adaptive(F&& f, double a, double b, double tol = 1e-12, int max_depth = 40) {
  if (a == b) return 0.0;
  const Rule& rule = cached_rule(15);
  const double whole = composite(f, a, b, 1, rule);
  return detail::adaptive_rec(f, a, b, whole, tol, max_depth, rule);
}

}  // namespace cmc::quad
