#include "specpert/smoothfn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "specpert/errors.hpp"

namespace specpert {

namespace {

using Expansion = SmoothFunction::Expansion;
constexpr int kJetOrder = SmoothFunction::kOrder + 1;

// Below this exponent exp() underflows to zero in double precision.
constexpr double kUnderflowExponent = -745.0;

// exp(-1/u) expanded around u.c0 > 0; zero where it underflows.
Expansion exp_neg_reciprocal(const Expansion& u) {
  if (!(u.c[0] > 0.0) || -1.0 / u.c[0] < kUnderflowExponent) return Expansion{};
  return exp(-(1.0 / u));
}

// max over a uniform grid of |f^(7)| plus the half-spacing times max |f^(8)|.
double certify_d7_sup(const SmoothFunction::Generator& gen, Interval range, int grid) {
  const double h = range.length() / (grid - 1);
  double m7 = 0.0;
  double m8 = 0.0;
  for (int k = 0; k < grid; ++k) {
    const Expansion e = gen(range.lo + h * k);
    m7 = std::max(m7, std::abs(e.derivative(7)));
    m8 = std::max(m8, std::abs(e.derivative(8)));
  }
  return 1.05 * (m7 + 0.5 * h * m8);
}

double factorial(int k) {
  double f = 1.0;
  for (int j = 2; j <= k; ++j) f *= j;
  return f;
}

std::vector<double> parse_numbers(const std::string& list, const std::string& context) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("preset '" + context + "': '" + item + "' is not a number");
    }
    if (used != item.size()) throw ValidationError("preset '" + context + "': '" + item + "' is not a number");
    out.push_back(v);
  }
  return out;
}

}  // namespace

SmoothFunction::SmoothFunction(std::string name, Generator gen, std::optional<Interval> support,
                               double d7_sup)
    : name_(std::move(name)), gen_(std::move(gen)), support_(support), d7_sup_(d7_sup) {}

double SmoothFunction::derivative(int k, double t) const {
  if (k < 0 || k > kOrder) throw ValidationError("derivative order must lie in [0, 7]");
  return gen_(t).derivative(k);
}

SmoothFunction::Derivatives SmoothFunction::derivatives(double t) const {
  const Expansion e = gen_(t);
  Derivatives d{};
  for (int k = 0; k <= kOrder; ++k) d[k] = e.derivative(k);
  return d;
}

SmoothFunction SmoothFunction::scaled(double factor) const {
  auto g = gen_;
  std::ostringstream name;
  name << factor << "*" << name_;
  return SmoothFunction(
      name.str(), [g, factor](double t) { return g(t) * factor; }, support_, std::abs(factor) * d7_sup_);
}

SmoothFunction operator+(const SmoothFunction& a, const SmoothFunction& b) {
  std::optional<Interval> support;
  if (a.support_ && b.support_)
    support = Interval{std::min(a.support_->lo, b.support_->lo), std::max(a.support_->hi, b.support_->hi)};
  auto ga = a.gen_;
  auto gb = b.gen_;
  return SmoothFunction(
      a.name_ + "+" + b.name_, [ga, gb](double t) { return ga(t) + gb(t); }, support,
      a.d7_sup_ + b.d7_sup_);
}

Expansion psi_expansion(double t) {
  if (t <= 0.0) return Expansion::constant(1.0);
  if (t >= 1.0) return Expansion{};
  const Expansion x = Expansion::variable(t);
  const Expansion left = exp_neg_reciprocal(x);
  const Expansion right = exp_neg_reciprocal(1.0 - x);
  return right / (left + right);
}

double psi_d7_sup() {
  static const double bound = certify_d7_sup(psi_expansion, Interval{0.0, 1.0}, 20001);
  return bound;
}

SmoothFunction psi() {
  return SmoothFunction("psi", psi_expansion, std::nullopt, psi_d7_sup());
}

namespace {

// psi(offset + slope * t) expanded in t.
Expansion psi_affine(double offset, double slope, double t) {
  return psi_expansion(offset + slope * t).rescaled(slope);
}

void check_window_args(double alpha, double omega) {
  if (!(omega > 0.0) || !(alpha > omega))
    throw ValidationError("window requires alpha > omega > 0");
}

std::string window_name(const char* tag, double c, double alpha, double omega) {
  std::ostringstream s;
  s.precision(17);
  s << tag << ":" << c << "," << alpha << "," << omega;
  return s.str();
}

}  // namespace

SmoothFunction window_minus(double center, double alpha, double omega) {
  check_window_args(alpha, omega);
  const double inv = 1.0 / omega;
  auto gen = [=](double t) {
    // psi(1 + (t - c - alpha)/omega) * psi(1 - (t - c + alpha)/omega)
    return psi_affine(1.0 - (center + alpha) * inv, inv, t) *
           psi_affine(1.0 + (center - alpha) * inv, -inv, t);
  };
  // The two transition zones are disjoint, so only one factor varies at a time.
  return SmoothFunction(window_name("window-", center, alpha, omega), gen,
                        Interval{center - alpha, center + alpha}, psi_d7_sup() * std::pow(inv, 7));
}

SmoothFunction window_plus(double center, double alpha, double omega) {
  check_window_args(alpha, omega);
  const double inv = 1.0 / omega;
  auto gen = [=](double t) {
    // psi((t - c - alpha)/omega) * psi(-(t - c + alpha)/omega)
    return psi_affine(-(center + alpha) * inv, inv, t) * psi_affine((center - alpha) * inv, -inv, t);
  };
  return SmoothFunction(window_name("window+", center, alpha, omega), gen,
                        Interval{center - alpha - omega, center + alpha + omega},
                        psi_d7_sup() * std::pow(inv, 7));
}

SmoothFunction bump(double a, double b) {
  if (!(a < b)) throw ValidationError("bump requires a < b");
  const double mid = 0.5 * (a + b);
  const double scale = 2.0 / (b - a);
  auto gen = [=](double t) {
    if (t <= a || t >= b) return Expansion{};
    const Expansion u = (Expansion::variable(t) - mid) * scale;
    const Expansion w = 1.0 - u * u;
    if (!(w.c[0] > 0.0) || 1.0 - 1.0 / w.c[0] < kUnderflowExponent) return Expansion{};
    return exp(1.0 - 1.0 / w);
  };
  std::ostringstream name;
  name.precision(17);
  name << "bump:" << a << "," << b;
  return SmoothFunction(name.str(), gen, Interval{a, b}, certify_d7_sup(gen, Interval{a, b}, 20001));
}

SmoothFunction polynomial(std::vector<double> coeffs) {
  while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
  if (coeffs.empty()) coeffs.push_back(0.0);
  const int degree = static_cast<int>(coeffs.size()) - 1;
  std::ostringstream name;
  name.precision(17);
  name << "poly:";
  for (std::size_t k = 0; k < coeffs.size(); ++k) name << (k ? "," : "") << coeffs[k];
  auto gen = [coeffs](double t) {
    const Expansion x = Expansion::variable(t);
    Expansion r{};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) r = r * x + *it;
    return r;
  };
  double d7 = 0.0;
  if (degree >= 7) d7 = degree == 7 ? std::abs(coeffs[7]) * factorial(7) : std::numeric_limits<double>::infinity();
  return SmoothFunction(name.str(), gen, std::nullopt, d7);
}

SmoothFunction resolvent_part(std::complex<double> z, bool imaginary_part) {
  if (z.imag() == 0.0) throw ValidationError("resolvent test function needs Im z != 0");
  auto gen = [z, imaginary_part](double t) {
    // 1/(z - t) = sum_k (t - t0)^k / (z - t0)^(k+1)
    const std::complex<double> inv = 1.0 / (z - t);
    std::complex<double> p = inv;
    Expansion e;
    for (int k = 0; k <= kJetOrder; ++k) {
      e.c[k] = imaginary_part ? p.imag() : p.real();
      p *= inv;
    }
    return e;
  };
  std::ostringstream name;
  name << (imaginary_part ? "im" : "re") << "(1/(z-t)),z=" << z;
  return SmoothFunction(name.str(), gen, std::nullopt, factorial(7) / std::pow(std::abs(z.imag()), 8));
}

SmoothFunction parse_preset(const std::string& spec) {
  if (spec == "psi") return psi();
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ValidationError("unknown function preset '" + spec + "'");
  const std::string kind = spec.substr(0, colon);
  const std::vector<double> args = parse_numbers(spec.substr(colon + 1), spec);
  const auto need = [&](std::size_t count) {
    if (args.size() != count)
      throw ValidationError("preset '" + spec + "' expects " + std::to_string(count) + " parameters");
  };
  if (kind == "bump") {
    need(2);
    return bump(args[0], args[1]);
  }
  if (kind == "window-") {
    need(3);
    return window_minus(args[0], args[1], args[2]);
  }
  if (kind == "window+") {
    need(3);
    return window_plus(args[0], args[1], args[2]);
  }
  if (kind == "poly") {
    if (args.empty()) throw ValidationError("preset '" + spec + "' needs at least one coefficient");
    return polynomial(args);
  }
  throw ValidationError("unknown function preset '" + spec + "'");
}

std::complex<double> almost_analytic_ext(const SmoothFunction& phi, std::complex<double> z) {
  const auto d = phi.derivatives(z.real());
  const std::complex<double> iy(0.0, z.imag());
  std::complex<double> sum = 0.0;
  std::complex<double> power = 1.0;
  for (int k = 0; k <= 6; ++k) {
    sum += power * d[k] / factorial(k);
    power *= iy;
  }
  return sum;
}

std::complex<double> dbar_extension(const SmoothFunction& phi, std::complex<double> z) {
  const double y = z.imag();
  // (iy)^6 = -y^6
  return {-std::pow(y, 6) * phi.derivative(7, z.real()) / (2.0 * factorial(6)), 0.0};
}

double hs_reconstruct(const SmoothFunction& phi, double x0, double chi_margin, const HsOptions& opts) {
  if (!phi.support()) throw ValidationError("Helffer-Sjostrand reconstruction needs a compactly supported function");
  if (!(chi_margin > 0.0)) throw ValidationError("chi_margin must be positive");
  opts.q2d.validate();
  const double a = phi.support()->lo;
  const double b = phi.support()->hi;
  const double m = chi_margin;
  const double inv_m = 1.0 / m;
  if (!(opts.exclude_strip < m)) throw ValidationError("exclude_strip must be smaller than chi_margin");

  // The extension and its dbar vanish for x outside [a, b], so the cutoff only
  // has to act in the imaginary direction: chi = psi(|y|/m - 1), equal to 1 for
  // |y| <= m and to 0 for |y| >= 2m.
  const double half_inv720 = 0.5 / factorial(6);
  // An inner error e per row contributes at most 2m e to the outer integral.
  QuadratureSpec inner = opts.q2d.tightened(0.1);
  inner.abs_tol = 0.1 * opts.q2d.abs_tol / (2.0 * m);
  const std::vector<double> x_points = breakpoints_within(a, b, {x0});

  // Only y > 0 is integrated: the integrand at conj(z) is the conjugate of
  // the integrand at z, so the full plane gives twice the real part.
  const auto row = [&](double y) {
    const auto cy = psi_affine(-1.0, inv_m, y);
    const double chi = cy.c[0];
    const std::complex<double> dbar_chi(0.0, 0.5 * cy.c[1]);
    const std::complex<double> iy(0.0, y);
    std::complex<double> iy6 = 1.0;
    for (int k = 0; k < 6; ++k) iy6 *= iy;
    const auto integrand = [&](double x) {
      const auto e = phi.expansion(x);
      std::complex<double> ext = 0.0;
      std::complex<double> power = 1.0;
      for (int k = 0; k <= 6; ++k) {
        ext += power * e.c[k];  // c[k] = phi^(k)(x) / k!
        power *= iy;
      }
      const std::complex<double> dbar_ext = iy6 * (e.derivative(7) * half_inv720);
      return (chi * dbar_ext + ext * dbar_chi) / std::complex<double>(x - x0, y);
    };
    return integrate(integrand, x_points, inner).value;
  };
  const std::vector<double> y_points = breakpoints_within(opts.exclude_strip, 2.0 * m, {m});
  const std::complex<double> total = integrate(row, y_points, opts.q2d).value;
  return -2.0 / std::numbers::pi * total.real();
}

DbarGridCheck dbar_grid_check(const SmoothFunction& phi, double x_lo, double x_hi, double y_max, double h) {
  if (!(h > 0.0) || !(y_max > 2.0 * h) || !(x_hi >= x_lo))
    throw ValidationError("dbar grid needs x_lo <= x_hi and y_max > 2h > 0");
  const auto ext = [&](double x, double y) { return almost_analytic_ext(phi, {x, y}); };
  DbarGridCheck out;
  for (int a = 0; a < 10; ++a)
    for (int b = 0; b < 10; ++b) {
      const double x = x_lo + (x_hi - x_lo) * a / 9.0;
      const double y = y_max * (b + 1) / 10.0;
      const auto dx = (-ext(x + 2 * h, y) + 8.0 * ext(x + h, y) - 8.0 * ext(x - h, y) + ext(x - 2 * h, y)) / (12 * h);
      const auto dy = (-ext(x, y + 2 * h) + 8.0 * ext(x, y + h) - 8.0 * ext(x, y - h) + ext(x, y - 2 * h)) / (12 * h);
      const std::complex<double> fd = 0.5 * (dx + std::complex<double>(0.0, 1.0) * dy);
      const auto closed = dbar_extension(phi, {x, y});
      out.max_gap = std::max(out.max_gap, std::abs(fd - closed));
      out.max_abs = std::max(out.max_abs, std::abs(closed));
    }
  return out;
}

}  // namespace specpert
