#pragma once

// Dense Hermitian eigendecomposition and the quantities built on it.

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "specpert/ensemble.hpp"
#include "specpert/smoothfn.hpp"

namespace specpert {

/// Ascending eigenvalues and orthonormal eigenvectors (column j pairs with
/// values(j)). Eigenvector phases are whatever the solver returns; every
/// downstream quantity uses squared moduli only.
template <typename Scalar>
struct EigenDecompositionT {
  Eigen::VectorXd values;
  MatrixOf<Scalar> vectors;
};

using EigenDecomposition = EigenDecompositionT<double>;
using ComplexEigenDecomposition = EigenDecompositionT<std::complex<double>>;

/// Full decomposition through LAPACK ?syevd / ?heevd. Rejects input that is not
/// Hermitian within 1e-12 entrywise; throws NumericalError if the solver fails.
EigenDecomposition eigendecompose(const Eigen::MatrixXd& h);
ComplexEigenDecomposition eigendecompose(const Eigen::MatrixXcd& h);

/// Ascending eigenvalues only.
Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& h);
Eigen::VectorXd eigenvalues(const Eigen::MatrixXcd& h);

/// Max |eigenvalue|.
double operator_norm(const Eigen::MatrixXd& h);
double operator_norm(const Eigen::MatrixXcd& h);

/// Limits the BLAS backend to `threads` threads (no-op without OpenBLAS).
void set_blas_threads(int threads);

/// Decomposes a fixed 160x160 symmetric matrix and checks the reconstruction.
/// Some OpenBLAS builds pick kernels for the detected CPU that return wrong
/// eigenvectors once the blocked code paths engage (n around 100 and up).
bool blas_self_test();

/// Call first thing in main(). If blas_self_test() fails and OPENBLAS_CORETYPE
/// is unset, re-executes the current process with OPENBLAS_CORETYPE=Haswell
/// (the core type is read when the library loads, so it cannot be changed in
/// process). Throws NumericalError if the backend is still broken.
void ensure_working_blas(char** argv);

struct Atom {
  double location = 0.0;
  double weight = 0.0;
};

/// sum_j |<u_j, e_i>|^2 delta_{lambda_j} for a fixed basis vector e_i.
struct SpectralMeasure {
  std::vector<Atom> atoms;
  std::size_t basis_index = 0;

  double total_mass() const;
};

/// Atoms (values_j, |vectors(i, j)|^2); i is zero-based.
template <typename Scalar>
SpectralMeasure vector_spectral_measure(const EigenDecompositionT<Scalar>& dec, std::size_t i);

/// sum_j weight_j phi(location_j).
double integrate_measure(const SpectralMeasure& m, const SmoothFunction& phi);
std::complex<double> integrate_measure(const SpectralMeasure& m,
                                       const std::function<std::complex<double>(double)>& phi);

/// (phi(H))_{ii} computed as the (i, i) entry of the full product U phi(Lambda) U^H.
template <typename Scalar>
double matrix_function_diagonal(const EigenDecompositionT<Scalar>& dec, std::size_t i, const SmoothFunction& phi);

/// True iff max_j |lambda_eps_j - lambda_j| <= eps * xnorm + 1e-10 for two
/// ascending spectra of equal length.
bool weyl_check(std::span<const double> lambda_sorted, std::span<const double> lambda_eps_sorted, double epsilon,
                double xnorm);

/// Number of entries in the open interval (center - alpha, center + alpha) of an
/// ascending sequence.
std::size_t count_window(std::span<const double> sorted, double center, double alpha);

inline std::span<const double> as_span(const Eigen::VectorXd& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

}  // namespace specpert
