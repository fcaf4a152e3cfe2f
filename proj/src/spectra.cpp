#include "specpert/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include <unistd.h>

#include <lapacke.h>

#include "specpert/errors.hpp"

#ifdef SPECPERT_HAVE_OPENBLAS
extern "C" void openblas_set_num_threads(int num_threads);
#endif

namespace specpert {

void set_blas_threads(int threads) {
#ifdef SPECPERT_HAVE_OPENBLAS
  openblas_set_num_threads(std::max(1, threads));
#else
  (void)threads;
#endif
}

namespace {

template <typename Matrix>
void check_hermitian_input(const Matrix& h) {
  if (h.rows() != h.cols()) throw ValidationError("eigendecomposition needs a square matrix");
  if (!h.allFinite()) throw ValidationError("eigendecomposition input has non-finite entries");
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (h.size() > 0 && asym > 1e-12)
    throw ValidationError("eigendecomposition input is not Hermitian (max |H - H^*| = " + std::to_string(asym) + ")");
}

[[noreturn]] void solver_failure(const char* routine, lapack_int info, Eigen::Index n, double max_abs) {
  std::ostringstream msg;
  msg << routine << " failed with info = " << info << " (n = " << n << ", max |H_ij| = " << max_abs
      << "); the tridiagonal eigensolver did not converge";
  throw NumericalError(msg.str());
}

// Residual |H v - lambda v| on three columns. Costs O(n^2) and catches a
// backend that returns garbage without a nonzero info code.
template <typename Matrix, typename Dec>
void spot_check(const char* routine, const Matrix& h, const Dec& dec) {
  const auto n = h.rows();
  const double scale = 1.0 + h.cwiseAbs().maxCoeff();
  for (Eigen::Index j : {Eigen::Index{0}, n / 2, n - 1}) {
    const double r = (h * dec.vectors.col(j) - dec.values(j) * dec.vectors.col(j)).cwiseAbs().maxCoeff();
    if (!(r <= 1e-8 * scale * static_cast<double>(n))) {
      std::ostringstream msg;
      msg << routine << " returned an eigenpair with residual " << r << " (n = " << n
          << "); the BLAS backend is unreliable on this CPU, try setting OPENBLAS_CORETYPE";
      throw NumericalError(msg.str());
    }
  }
}

}  // namespace

bool blas_self_test() {
  constexpr Eigen::Index n = 160;
  Eigen::MatrixXd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) h(i, j) = std::cos(0.37 * static_cast<double>((i + 1) * (j + 1)) + 0.1 * static_cast<double>(i + j));
  h = (0.5 * (h + h.transpose())).eval();
  Eigen::MatrixXd v = h;
  Eigen::VectorXd w(n);
  if (LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), v.data(), static_cast<lapack_int>(n),
                     w.data()) != 0)
    return false;
  const double err = (v * w.asDiagonal() * v.transpose() - h).cwiseAbs().maxCoeff();
  return err < 1e-10;
}

void ensure_working_blas(char** argv) {
  if (blas_self_test()) return;
  if (std::getenv("OPENBLAS_CORETYPE") == nullptr && argv != nullptr) {
    ::setenv("OPENBLAS_CORETYPE", "Haswell", 1);
    ::execv("/proc/self/exe", argv);
  }
  throw NumericalError("the LAPACK/BLAS backend fails a 160x160 eigendecomposition self-test");
}

EigenDecomposition eigendecompose(const Eigen::MatrixXd& h) {
  check_hermitian_input(h);
  EigenDecomposition dec;
  const auto n = h.rows();
  dec.vectors = h;
  dec.values.resize(n);
  if (n == 0) return dec;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), dec.vectors.data(),
                                         static_cast<lapack_int>(n), dec.values.data());
  if (info != 0) solver_failure("dsyevd", info, n, h.cwiseAbs().maxCoeff());
  spot_check("dsyevd", h, dec);
  return dec;
}

ComplexEigenDecomposition eigendecompose(const Eigen::MatrixXcd& h) {
  check_hermitian_input(h);
  ComplexEigenDecomposition dec;
  const auto n = h.rows();
  dec.vectors = h;
  dec.values.resize(n);
  if (n == 0) return dec;
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n),
                     reinterpret_cast<lapack_complex_double*>(dec.vectors.data()), static_cast<lapack_int>(n),
                     dec.values.data());
  if (info != 0) solver_failure("zheevd", info, n, h.cwiseAbs().maxCoeff());
  spot_check("zheevd", h, dec);
  return dec;
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXd& h) {
  check_hermitian_input(h);
  const auto n = h.rows();
  Eigen::MatrixXd work = h;
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', static_cast<lapack_int>(n), work.data(),
                                         static_cast<lapack_int>(n), w.data());
  if (info != 0) solver_failure("dsyevd", info, n, h.cwiseAbs().maxCoeff());
  return w;
}

Eigen::VectorXd eigenvalues(const Eigen::MatrixXcd& h) {
  check_hermitian_input(h);
  const auto n = h.rows();
  Eigen::MatrixXcd work = h;
  Eigen::VectorXd w(n);
  if (n == 0) return w;
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', static_cast<lapack_int>(n),
                     reinterpret_cast<lapack_complex_double*>(work.data()), static_cast<lapack_int>(n), w.data());
  if (info != 0) solver_failure("zheevd", info, n, h.cwiseAbs().maxCoeff());
  return w;
}

double operator_norm(const Eigen::MatrixXd& h) {
  const auto w = eigenvalues(h);
  return w.size() ? std::max(std::abs(w(0)), std::abs(w(w.size() - 1))) : 0.0;
}

double operator_norm(const Eigen::MatrixXcd& h) {
  const auto w = eigenvalues(h);
  return w.size() ? std::max(std::abs(w(0)), std::abs(w(w.size() - 1))) : 0.0;
}

double SpectralMeasure::total_mass() const {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

template <typename Scalar>
SpectralMeasure vector_spectral_measure(const EigenDecompositionT<Scalar>& dec, std::size_t i) {
  const auto n = static_cast<std::size_t>(dec.values.size());
  if (i >= n) throw ValidationError("basis index " + std::to_string(i) + " out of range for n = " + std::to_string(n));
  SpectralMeasure m;
  m.basis_index = i;
  m.atoms.resize(n);
  const auto row = static_cast<Eigen::Index>(i);
  for (std::size_t j = 0; j < n; ++j) {
    const auto col = static_cast<Eigen::Index>(j);
    m.atoms[j] = {dec.values(col), std::norm(dec.vectors(row, col))};
  }
  return m;
}

template SpectralMeasure vector_spectral_measure(const EigenDecomposition&, std::size_t);
template SpectralMeasure vector_spectral_measure(const ComplexEigenDecomposition&, std::size_t);

double integrate_measure(const SpectralMeasure& m, const SmoothFunction& phi) {
  double s = 0.0;
  for (const auto& a : m.atoms)
    if (a.weight != 0.0) s += a.weight * phi(a.location);
  return s;
}

std::complex<double> integrate_measure(const SpectralMeasure& m,
                                       const std::function<std::complex<double>(double)>& phi) {
  std::complex<double> s = 0.0;
  for (const auto& a : m.atoms)
    if (a.weight != 0.0) s += a.weight * phi(a.location);
  return s;
}

template <typename Scalar>
double matrix_function_diagonal(const EigenDecompositionT<Scalar>& dec, std::size_t i, const SmoothFunction& phi) {
  const auto n = dec.values.size();
  if (static_cast<Eigen::Index>(i) >= n) throw ValidationError("basis index out of range");
  Eigen::VectorXd f(n);
  for (Eigen::Index j = 0; j < n; ++j) f(j) = phi(dec.values(j));
  const MatrixOf<Scalar> full = dec.vectors * f.asDiagonal() * dec.vectors.adjoint();
  return std::real(full(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)));
}

template double matrix_function_diagonal(const EigenDecomposition&, std::size_t, const SmoothFunction&);
template double matrix_function_diagonal(const ComplexEigenDecomposition&, std::size_t, const SmoothFunction&);

bool weyl_check(std::span<const double> lambda_sorted, std::span<const double> lambda_eps_sorted, double epsilon,
                double xnorm) {
  if (lambda_sorted.size() != lambda_eps_sorted.size())
    throw ValidationError("weyl_check: spectra have different lengths");
  double worst = 0.0;
  for (std::size_t j = 0; j < lambda_sorted.size(); ++j)
    worst = std::max(worst, std::abs(lambda_eps_sorted[j] - lambda_sorted[j]));
  return worst <= epsilon * xnorm + 1e-10;
}

std::size_t count_window(std::span<const double> sorted, double center, double alpha) {
  if (!(alpha > 0.0)) throw ValidationError("window half-width alpha must be positive");
  const auto lo = std::upper_bound(sorted.begin(), sorted.end(), center - alpha);
  const auto hi = std::lower_bound(lo, sorted.end(), center + alpha);
  return static_cast<std::size_t>(hi - lo);
}

}  // namespace specpert
