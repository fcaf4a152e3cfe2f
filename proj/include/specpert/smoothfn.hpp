#pragma once

// C^7 test functions with exact derivatives, plus the almost-analytic
// extension machinery used to pass from resolvents to smooth functions.

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specpert/quadrature.hpp"
#include "specpert/taylor.hpp"

namespace specpert {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool contains(double t) const { return t >= lo && t <= hi; }
};

class SmoothFunction {
 public:
  static constexpr int kOrder = 7;
  // One order beyond the contract; used only to certify sup bounds.
  using Expansion = Taylor<kOrder + 1>;
  using Derivatives = std::array<double, kOrder + 1>;
  using Generator = std::function<Expansion(double)>;

  SmoothFunction(std::string name, Generator gen, std::optional<Interval> support, double d7_sup);

  double operator()(double t) const { return gen_(t).c[0]; }
  // 0 <= k <= 7.
  double derivative(int k, double t) const;
  Derivatives derivatives(double t) const;
  Expansion expansion(double t) const { return gen_(t); }

  // Set when the function and all its derivatives vanish outside an interval.
  const std::optional<Interval>& support() const { return support_; }
  // Certified upper bound on sup |phi^(7)|; +inf when none is available.
  double d7_sup() const { return d7_sup_; }
  const std::string& name() const { return name_; }

  SmoothFunction scaled(double factor) const;
  friend SmoothFunction operator+(const SmoothFunction& a, const SmoothFunction& b);

 private:
  std::string name_;
  Generator gen_;
  std::optional<Interval> support_;
  double d7_sup_;
};

/// Smooth transition: 1 on (-inf, 0], 0 on [1, inf), strictly decreasing in
/// between. Built from g(t) = exp(-1/t) as g(1-t) / (g(t) + g(1-t)).
SmoothFunction psi();
SmoothFunction::Expansion psi_expansion(double t);
/// Certified bound on sup |psi^(7)|.
double psi_d7_sup();

/// Smooth lower bound of the indicator of [c - alpha, c + alpha]: equal to 1 on
/// [c - alpha + omega, c + alpha - omega], supported in [c - alpha, c + alpha].
/// Requires alpha > omega > 0.
SmoothFunction window_minus(double center, double alpha, double omega);
/// Smooth upper bound: 1 on [c - alpha, c + alpha], supported in
/// [c - alpha - omega, c + alpha + omega].
SmoothFunction window_plus(double center, double alpha, double omega);

/// exp(1 - 1/(1 - u^2)) with u the affine map of (a, b) onto (-1, 1): positive
/// exactly on (a, b), peak 1 at the midpoint.
SmoothFunction bump(double a, double b);

/// sum_k coeffs[k] t^k.
SmoothFunction polynomial(std::vector<double> coeffs);

/// Real or imaginary part of t -> 1/(z - t). Im z must be nonzero.
SmoothFunction resolvent_part(std::complex<double> z, bool imaginary_part);

/// Presets addressable by name: "bump:a,b", "window-:c,alpha,omega",
/// "window+:c,alpha,omega", "poly:c0,c1,...", "psi".
SmoothFunction parse_preset(const std::string& spec);

/// sum_{k=0}^{6} (iy)^k phi^(k)(x) / k!  at z = x + iy.
std::complex<double> almost_analytic_ext(const SmoothFunction& phi, std::complex<double> z);

/// (1/2)(d_x + i d_y) of the extension above, in closed form:
/// (iy)^6 phi^(7)(x) / (2 * 6!).
std::complex<double> dbar_extension(const SmoothFunction& phi, std::complex<double> z);

struct DbarGridCheck {
  double max_gap = 0.0;  // largest |closed form - finite difference|
  double max_abs = 0.0;  // largest |closed form|
};

/// Compares dbar_extension with a fourth-order central difference of
/// almost_analytic_ext (step h in x and y) on the 10 x 10 grid
/// x = x_lo + (x_hi - x_lo) a / 9, y = y_max (b + 1) / 10. The difference
/// quotient's truncation error scales like h^4 sup |phi^(k+4)| y^k, so for
/// steep functions the grid has to stay away from the support ends.
DbarGridCheck dbar_grid_check(const SmoothFunction& phi, double x_lo, double x_hi, double y_max, double h = 1e-4);

struct HsOptions {
  // Applied to the outer (imaginary-axis) integral. The inner integral uses a
  // 10x tighter relative tolerance and an absolute tolerance scaled so that
  // its error, integrated over the cutoff height, stays 10x below the outer one.
  QuadratureSpec q2d{QuadratureMethod::adaptive, 1e-7, 1e-8, 4000, 1e-3};
  // The strip |Im z| < exclude_strip is skipped; the integrand is O(y^5) there.
  double exclude_strip = 1e-6;
};

/// Evaluates phi(x0) = -(1/pi) * integral over C of dbar(ext(phi) chi)(z) / (z - x0)
/// with the cutoff chi = 1 for |Im z| <= chi_margin and 0 for |Im z| >= 2 chi_margin.
/// The extension vanishes off supp(phi), so no cutoff in Re z is needed. Small
/// margins keep y^k phi^(k) moderate for functions with steep derivatives.
double hs_reconstruct(const SmoothFunction& phi, double x0, double chi_margin = 0.05,
                      const HsOptions& opts = {});

}  // namespace specpert
