#include "specpert/theory.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "specpert/errors.hpp"

namespace specpert {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw ValidationError(std::string(what) + " must be finite");
}

std::vector<double> with_points(std::vector<double> pts, std::initializer_list<double> extra) {
  const double lo = pts.front();
  const double hi = pts.back();
  pts.insert(pts.end(), extra.begin(), extra.end());
  return breakpoints_within(lo, hi, std::move(pts));
}

}  // namespace

double xi_direct(const SpectralModel& model, double s, const SmoothFunction& phi, const QuadratureSpec& q) {
  q.validate();
  require_finite(s, "s");
  const double delta = q.singularity_delta * model.support.length();
  const auto ds = phi.derivatives(s);
  const double phi_s = ds[0];
  const double dphi_s = ds[1];

  const auto integrand = [&](double t) {
    const double w = model.tau(s, t) * model.rho(t);
    if (w == 0.0) return 0.0;
    const double h = t - s;
    if (std::abs(h) < delta) {
      const double r =
          gauss_legendre_unit<16>([&](double u) { return phi.derivative(2, s + u * h) * (1.0 - u); });
      return w * r;
    }
    return w * (phi(t) - phi_s - h * dphi_s) / (h * h);
  };

  auto pts = model.breakpoints(s);
  pts = with_points(std::move(pts), {s - delta, s, s + delta});
  if (const auto& sp = phi.support()) pts = with_points(std::move(pts), {sp->lo, sp->hi});
  return integrate(integrand, pts, q).value;
}

double zeta_kernel(const SpectralModel& model, double s, double y, const QuadratureSpec& q) {
  q.validate();
  require_finite(s, "s");
  require_finite(y, "y");
  if (y == s) throw ValidationError("zeta_kernel: y = s is not allowed (the kernel diverges logarithmically there)");
  const double d = y - s;
  // Radii r >= 1 with s + r d inside the support.
  double r_a = (model.support.lo - s) / d;
  double r_b = (model.support.hi - s) / d;
  if (r_a > r_b) std::swap(r_a, r_b);
  const double r_lo = std::max(1.0, r_a);
  const double r_hi = r_b;
  if (!(r_hi > r_lo)) return 0.0;

  // r = e^v turns (r-1)/r^2 dr into (1 - e^-v) dv and keeps long rays cheap.
  const auto integrand = [&](double v) {
    const double t = s + std::exp(v) * d;
    const double w = model.tau(s, t) * model.rho(t);
    if (w == 0.0) return 0.0;
    return -std::expm1(-v) * w;
  };
  std::vector<double> interior;
  for (double tb : model.breakpoints(s)) {
    const double rb = (tb - s) / d;
    if (rb > r_lo && rb < r_hi) interior.push_back(std::log(rb));
  }
  const auto pts = breakpoints_within(std::log(r_lo), std::log(r_hi), std::move(interior));
  return integrate(integrand, pts, q).value;
}

double xi_via_zeta(const SpectralModel& model, double s, const SmoothFunction& phi, const QuadratureSpec& q) {
  q.validate();
  require_finite(s, "s");
  double lo = std::min(model.support.lo, s);
  double hi = std::max(model.support.hi, s);
  if (const auto& sp = phi.support()) {
    lo = std::max(lo, sp->lo);
    hi = std::min(hi, sp->hi);
  }
  if (!(hi > lo)) return 0.0;
  const QuadratureSpec inner = q.tightened(1e-2);
  const auto integrand = [&](double y) {
    if (y == s) return 0.0;
    const double d2 = phi.derivative(2, y);
    if (d2 == 0.0) return 0.0;
    return d2 * zeta_kernel(model, s, y, inner);
  };
  std::vector<double> interior{s, model.support.lo, model.support.hi};
  for (double j : model.kernel_jumps) {
    interior.push_back(s - j);
    interior.push_back(s + j);
  }
  return integrate(integrand, breakpoints_within(lo, hi, std::move(interior)), q).value;
}

std::complex<double> xi_stieltjes(const SpectralModel& model, double s, std::complex<double> z,
                                  const QuadratureSpec& q) {
  q.validate();
  require_finite(s, "s");
  if (z.imag() == 0.0) throw ValidationError("xi_stieltjes: z must have a nonzero imaginary part");
  const std::complex<double> pre = 1.0 / ((z - s) * (z - s));
  const auto integrand = [&](double t) -> std::complex<double> {
    const double w = model.tau(s, t) * model.rho(t);
    if (w == 0.0) return 0.0;
    return w * pre / (z - t);
  };
  return integrate(integrand, model.breakpoints(s), q).value;
}

double overlap_prediction(const SpectralModel& model, double x0, double t) {
  const double fs = model.f(x0);
  const double h = t - fs;
  if (!(std::abs(h) >= 1e-9))
    throw ValidationError("overlap_prediction: t is within 1e-9 of f(x0), where the prediction is singular");
  return model.tau(fs, t) / (h * h);
}

namespace {

template <typename Scalar>
std::size_t checked_index(const PerturbedSystemT<Scalar>& system, const EigenDecompositionT<Scalar>& dec, double x) {
  if (!(system.epsilon > 0.0)) throw ValidationError("Pi_n needs eps > 0");
  if (static_cast<std::size_t>(dec.values.size()) != system.n())
    throw ValidationError("decomposition size does not match the system");
  return basis_index(system.n(), x);
}

}  // namespace

template <typename Scalar>
double pi_n_statistic(const PerturbedSystemT<Scalar>& system, const EigenDecompositionT<Scalar>& dec, double x,
                      const SmoothFunction& phi, double xi) {
  const std::size_t i = checked_index(system, dec, x);
  const double moment = integrate_measure(vector_spectral_measure(dec, i), phi);
  const auto ii = static_cast<Eigen::Index>(i);
  const double diag = std::real(system.d_eps(ii, ii));
  return (moment - phi(diag)) / (system.epsilon * system.epsilon) - xi;
}

template <typename Scalar>
double pi_n_statistic(const PerturbedSystemT<Scalar>& system, const EigenDecompositionT<Scalar>& dec, double x,
                      const SmoothFunction& phi, const SpectralModel& model, const QuadratureSpec& q) {
  return pi_n_statistic(system, dec, x, phi, xi_direct(model, model.f(x), phi, q));
}

template <typename Scalar>
std::complex<double> pi_n_resolvent(const PerturbedSystemT<Scalar>& system, const EigenDecompositionT<Scalar>& dec,
                                    double x, std::complex<double> z, std::complex<double> xi) {
  if (z.imag() == 0.0) throw ValidationError("Pi_n resolvent form needs Im z != 0");
  const std::size_t i = checked_index(system, dec, x);
  const auto g = integrate_measure(vector_spectral_measure(dec, i),
                                   [z](double t) { return 1.0 / (z - t); });
  const auto ii = static_cast<Eigen::Index>(i);
  const double diag = std::real(system.d_eps(ii, ii));
  return (g - 1.0 / (z - diag)) / (system.epsilon * system.epsilon) - xi;
}

template <typename Scalar>
std::complex<double> pi_n_resolvent(const PerturbedSystemT<Scalar>& system, const EigenDecompositionT<Scalar>& dec,
                                    double x, std::complex<double> z, const SpectralModel& model,
                                    const QuadratureSpec& q) {
  return pi_n_resolvent(system, dec, x, z, xi_stieltjes(model, model.f(x), z, q));
}

template double pi_n_statistic(const PerturbedSystem&, const EigenDecomposition&, double, const SmoothFunction&,
                               double);
template double pi_n_statistic(const ComplexPerturbedSystem&, const ComplexEigenDecomposition&, double,
                               const SmoothFunction&, double);
template double pi_n_statistic(const PerturbedSystem&, const EigenDecomposition&, double, const SmoothFunction&,
                               const SpectralModel&, const QuadratureSpec&);
template double pi_n_statistic(const ComplexPerturbedSystem&, const ComplexEigenDecomposition&, double,
                               const SmoothFunction&, const SpectralModel&, const QuadratureSpec&);
template std::complex<double> pi_n_resolvent(const PerturbedSystem&, const EigenDecomposition&, double,
                                             std::complex<double>, std::complex<double>);
template std::complex<double> pi_n_resolvent(const ComplexPerturbedSystem&, const ComplexEigenDecomposition&,
                                             double, std::complex<double>, std::complex<double>);
template std::complex<double> pi_n_resolvent(const PerturbedSystem&, const EigenDecomposition&, double,
                                             std::complex<double>, const SpectralModel&, const QuadratureSpec&);
template std::complex<double> pi_n_resolvent(const ComplexPerturbedSystem&, const ComplexEigenDecomposition&,
                                             double, std::complex<double>, const SpectralModel&,
                                             const QuadratureSpec&);

}  // namespace specpert
