#pragma once

// Truncated Taylor arithmetic. A Taylor<N> holds c[k] = f^(k)(t0) / k! for
// k = 0..N; arithmetic on these coefficient vectors propagates exact
// derivatives through products, quotients, and exp without finite
// differences.

#include <array>
#include <cmath>
#include <cstddef>

namespace specpert {

template <int N>
struct Taylor {
  static_assert(N >= 0);
  std::array<double, N + 1> c{};

  static Taylor constant(double v) {
    Taylor r;
    r.c[0] = v;
    return r;
  }

  // The identity function expanded at t0.
  static Taylor variable(double t0) {
    Taylor r;
    r.c[0] = t0;
    if constexpr (N >= 1) r.c[1] = 1.0;
    return r;
  }

  double value() const { return c[0]; }

  double derivative(int k) const {
    double fact = 1.0;
    for (int j = 2; j <= k; ++j) fact *= j;
    return c[static_cast<std::size_t>(k)] * fact;
  }

  // Composition with t -> p + q t, given this expansion at p + q t0.
  Taylor rescaled(double q) const {
    Taylor r = *this;
    double qk = 1.0;
    for (int k = 0; k <= N; ++k) {
      r.c[k] *= qk;
      qk *= q;
    }
    return r;
  }

  Taylor& operator+=(const Taylor& o) {
    for (int k = 0; k <= N; ++k) c[k] += o.c[k];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (int k = 0; k <= N; ++k) c[k] -= o.c[k];
    return *this;
  }
  Taylor& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
  Taylor& operator+=(double s) {
    c[0] += s;
    return *this;
  }

  friend Taylor operator+(Taylor a, const Taylor& b) { return a += b; }
  friend Taylor operator-(Taylor a, const Taylor& b) { return a -= b; }
  friend Taylor operator+(Taylor a, double s) { return a += s; }
  friend Taylor operator+(double s, Taylor a) { return a += s; }
  friend Taylor operator-(Taylor a, double s) { return a += -s; }
  friend Taylor operator-(double s, Taylor a) {
    a *= -1.0;
    return a += s;
  }
  friend Taylor operator*(Taylor a, double s) { return a *= s; }
  friend Taylor operator*(double s, Taylor a) { return a *= s; }
  friend Taylor operator-(Taylor a) { return a *= -1.0; }

  friend Taylor operator*(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int k = 0; k <= N; ++k) {
      double s = 0.0;
      for (int j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
      r.c[k] = s;
    }
    return r;
  }

  friend Taylor operator/(const Taylor& a, const Taylor& b) {
    Taylor r;
    for (int k = 0; k <= N; ++k) {
      double s = a.c[k];
      for (int j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
      r.c[k] = s / b.c[0];
    }
    return r;
  }

  friend Taylor operator/(double s, const Taylor& b) { return constant(s) / b; }
};

template <int N>
Taylor<N> exp(const Taylor<N>& a) {
  Taylor<N> r;
  r.c[0] = std::exp(a.c[0]);
  for (int k = 1; k <= N; ++k) {
    double s = 0.0;
    for (int j = 1; j <= k; ++j) s += j * a.c[j] * r.c[k - j];
    r.c[k] = s / k;
  }
  return r;
}

}  // namespace specpert
