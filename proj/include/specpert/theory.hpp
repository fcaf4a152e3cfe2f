#pragma once

// Deterministic limit functionals: Xi_s in its direct and zeta forms, the
// zeta kernel, the resolvent specialization, the overlap prediction, and the
// Pi_n discrepancy statistic.

#include <complex>

#include "specpert/ensemble.hpp"
#include "specpert/model.hpp"
#include "specpert/quadrature.hpp"
#include "specpert/smoothfn.hpp"
#include "specpert/spectra.hpp"

namespace specpert {

/// Xi_s(phi) = int tau(s,t) rho(t) (phi(t) - phi(s) - (t-s) phi'(s)) / (t-s)^2 dt.
/// Within q.singularity_delta * |support| of s the ratio is replaced by
/// tau rho * int_0^1 phi''(s + u(t-s)) (1-u) du on a 16-node Gauss rule.
double xi_direct(const SpectralModel& model, double s, const SmoothFunction& phi, const QuadratureSpec& q = {});

/// zeta_s(y) = int_1^inf (r-1)/r^2 tau(s, s + r(y-s)) rho(s + r(y-s)) dr, cut at
/// the radius where s + r(y-s) leaves the support. y = s is rejected.
double zeta_kernel(const SpectralModel& model, double s, double y, const QuadratureSpec& q = {});

/// Xi_s(phi) = int phi''(y) zeta_s(y) dy.
double xi_via_zeta(const SpectralModel& model, double s, const SmoothFunction& phi, const QuadratureSpec& q = {});

/// Xi_s(phi_z) for phi_z(t) = 1/(z - t):
/// int tau(s,t) rho(t) / ((z-s)^2 (z-t)) dt. Requires Im z != 0.
std::complex<double> xi_stieltjes(const SpectralModel& model, double s, std::complex<double> z,
                                  const QuadratureSpec& q = {});

/// tau(f(x0), t) / (t - f(x0))^2 at spectral location t.
double overlap_prediction(const SpectralModel& model, double x0, double t);

/// eps^-2 (int phi d mu_i - phi((D^eps)_ii)) - xi with i = basis_index(n, x).
/// The caller supplies xi, normally xi_direct(model, f(x), phi); this form lets
/// Monte Carlo loops evaluate Xi once.
template <typename Scalar>
double pi_n_statistic(const PerturbedSystemT<Scalar>& system, const EigenDecompositionT<Scalar>& dec, double x,
                      const SmoothFunction& phi, double xi);

template <typename Scalar>
double pi_n_statistic(const PerturbedSystemT<Scalar>& system, const EigenDecompositionT<Scalar>& dec, double x,
                      const SmoothFunction& phi, const SpectralModel& model, const QuadratureSpec& q = {});

/// Complex statistic for phi_z(t) = 1/(z - t), with xi = xi_stieltjes(model, f(x), z).
template <typename Scalar>
std::complex<double> pi_n_resolvent(const PerturbedSystemT<Scalar>& system, const EigenDecompositionT<Scalar>& dec,
                                    double x, std::complex<double> z, std::complex<double> xi);

template <typename Scalar>
std::complex<double> pi_n_resolvent(const PerturbedSystemT<Scalar>& system, const EigenDecompositionT<Scalar>& dec,
                                    double x, std::complex<double> z, const SpectralModel& model,
                                    const QuadratureSpec& q = {});

}  // namespace specpert
