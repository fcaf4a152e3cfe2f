#pragma once

// Limit profiles of the unperturbed spectrum and of the perturbation
// variances, and their size-n discretizations.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "specpert/smoothfn.hpp"

namespace specpert {

/// Limit objects: eigenvalue profile f on [0,1], density rho of the push-forward
/// of Lebesgue measure by f, variance kernel tau in eigenvalue coordinates, and
/// variance profile sigma2 in index coordinates, with sigma2(x,y) = tau(f(x), f(y))
/// off the diagonal. Immutable once built.
struct SpectralModel {
  std::string name;
  std::map<std::string, double> params;

  std::function<double(double)> f;
  std::function<double(double)> rho;
  std::function<double(double, double)> tau;
  std::function<double(double, double)> sigma2;
  Interval support;

  double f_lipschitz = 0.0;
  // Lipschitz constant of sigma2 away from its jump set.
  double sigma2_lipschitz = 0.0;
  // tau(s, t) may jump where |t - s| equals one of these offsets, and sigma2(x, y)
  // where |x - y| does. Quadrature splits there.
  std::vector<double> kernel_jumps;
  double tau_sup = 0.0;
  double rho_sup = 0.0;

  /// Points inside the support where t -> tau(s, t) rho(t) may be discontinuous,
  /// together with the support endpoints.
  std::vector<double> breakpoints(double s) const;
};

/// f(x) = x, rho = 1 on [0,1], tau = sigma2 = 1.
SpectralModel build_wigner_model();

/// f(x) = x, rho = 1 on [0,1], sigma2(x,y) = 1{|x-y| <= ell}, tau the same
/// indicator in eigenvalue coordinates. Requires 0 < ell <= 1.
SpectralModel build_band_model(double ell);

/// Finite-n data: eigenvalues of D_n and entry variances of sqrt(n) X_n.
/// Indices are zero-based: entry k corresponds to the one-based index k + 1.
struct DiscretizedModel {
  std::size_t n = 0;
  Eigen::VectorXd lambda;
  std::function<double(std::size_t, std::size_t)> variance;
  double eta_bound = 0.0;
  // Upper bound on max_{i,j} variance(i, j).
  double variance_max = 0.0;
  std::string source;
};

/// lambda_i = f(i/n), sigma_n^2(i,j) = sigma2(i/n, j/n) for one-based i, j.
/// eta_bound is certified from a 10n-point grid and the model's Lipschitz
/// constants; see the implementation for the treatment of kernel jumps.
DiscretizedModel discretize(const SpectralModel& model, std::size_t n);

/// Tabulated model: header line `n`, then n eigenvalues, then n*n variances in
/// row-major order, whitespace separated. eta_bound is user-declared.
DiscretizedModel load_tabulated_model(const std::string& path, double eta_bound);

/// One-based index floor(n x) clamped to [1, n], returned zero-based.
std::size_t basis_index(std::size_t n, double x);

}  // namespace specpert
