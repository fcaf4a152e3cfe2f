#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "specpert/errors.hpp"

namespace specpert {

enum class QuadratureMethod { adaptive, composite };

struct QuadratureSpec {
  QuadratureMethod method = QuadratureMethod::adaptive;
  double abs_tol = 1e-10;
  double rel_tol = 1e-9;
  int max_subdivisions = 2000;
  // Half-width of the Taylor-switch zone around t = s, as a fraction of the
  // support length of the model.
  double singularity_delta = 1e-3;

  void validate() const;
  QuadratureSpec tightened(double factor) const;
};

template <typename T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  int panels = 0;
};

namespace detail {

// One Gauss-Kronrod (7, 15) panel on [a, b]; nodes and weights come from
// Boost.Math.
template <typename F>
auto gk15_panel(const F& f, double a, double b, double* err) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double e = 0.0;
  auto r = GK::integrate([&](double u) { return f(mid + half * u); }, -1.0, 1.0, 0, 0.0, &e);
  *err = std::abs(half) * e;
  return r * half;
}

}  // namespace detail

// Integrates f over [points.front(), points.back()] split at every interior
// point. Adaptive mode bisects the panel with the largest error estimate until
// the summed estimate is below max(abs_tol, rel_tol * |value|). Composite mode
// uses max_subdivisions equal panels per piece. Throws NumericalError when the
// adaptive budget runs out.
template <typename F>
auto integrate(const F& f, std::span<const double> points, const QuadratureSpec& q)
    -> QuadratureResult<std::invoke_result_t<F, double>> {
  using T = std::invoke_result_t<F, double>;
  QuadratureResult<T> out;
  if (points.size() < 2) return out;

  if (q.method == QuadratureMethod::composite) {
    for (std::size_t p = 0; p + 1 < points.size(); ++p) {
      const double a = points[p];
      const double b = points[p + 1];
      if (!(b > a)) continue;
      const int m = std::max(1, q.max_subdivisions);
      for (int k = 0; k < m; ++k) {
        const double lo = a + (b - a) * k / m;
        const double hi = (k + 1 == m) ? b : a + (b - a) * (k + 1) / m;
        double e = 0.0;
        out.value += detail::gk15_panel(f, lo, hi, &e);
        out.error += e;
        ++out.panels;
      }
    }
    return out;
  }

  struct Panel {
    double a, b;
    T value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  std::priority_queue<Panel> heap;
  for (std::size_t p = 0; p + 1 < points.size(); ++p) {
    const double a = points[p];
    const double b = points[p + 1];
    if (!(b > a)) continue;
    double e = 0.0;
    T v = detail::gk15_panel(f, a, b, &e);
    heap.push({a, b, v, e});
  }
  out.panels = static_cast<int>(heap.size());
  T running{};
  double running_err = 0.0;
  for (auto copy = heap; !copy.empty(); copy.pop()) {
    running += copy.top().value;
    running_err += copy.top().error;
  }
  const auto tolerance = [&q](const T& v) { return std::max(q.abs_tol, q.rel_tol * std::abs(v)); };
  while (!heap.empty() && running_err > tolerance(running)) {
    if (out.panels >= q.max_subdivisions) break;
    Panel worst = heap.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // panel at machine resolution
    heap.pop();
    double e1 = 0.0, e2 = 0.0;
    T v1 = detail::gk15_panel(f, worst.a, mid, &e1);
    T v2 = detail::gk15_panel(f, mid, worst.b, &e2);
    heap.push({worst.a, mid, v1, e1});
    heap.push({mid, worst.b, v2, e2});
    running += v1 + v2 - worst.value;
    running_err += e1 + e2 - worst.error;
    ++out.panels;
  }
  // Exact re-summation; the running sums only steer the loop.
  for (; !heap.empty(); heap.pop()) {
    out.value += heap.top().value;
    out.error += heap.top().error;
  }
  if (out.error <= tolerance(out.value)) return out;
  char msg[200];
  std::snprintf(msg, sizeof msg,
                "adaptive quadrature did not reach tolerance within %d subdivisions on [%g, %g] "
                "(estimated error %.3g, value %.6g)",
                q.max_subdivisions, points.front(), points.back(), out.error, std::abs(out.value));
  throw NumericalError(msg);
}

// Sorted, de-duplicated breakpoints clipped to [lo, hi], with lo and hi as the
// outer ends.
std::vector<double> breakpoints_within(double lo, double hi, std::vector<double> interior);

// Fixed n-point Gauss-Legendre rule on [0, 1].
template <int Points, typename F>
auto gauss_legendre_unit(const F& f) {
  using G = boost::math::quadrature::gauss<double, Points>;
  return G::integrate([&](double x) { return f(0.5 * (x + 1.0)); }, -1.0, 1.0) * 0.5;
}

}  // namespace specpert
