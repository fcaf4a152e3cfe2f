#pragma once

// Sampling of the Hermitian perturbation X_n and assembly of D_n + eps X_n.

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

#include "specpert/model.hpp"

namespace specpert {

/// Standardized entry laws (mean 0, variance 1, finite sixth moment).
enum class EntryLaw { gaussian, rademacher, uniform_centered };

EntryLaw parse_entry_law(const std::string& name);
std::string to_string(EntryLaw law);

/// Standardized real draw for matrix position (i, j), i <= j, zero-based. A
/// pure function of its arguments.
double standardized_entry(std::uint64_t seed, std::size_t i, std::size_t j, EntryLaw law);

/// Complex variant: off-diagonal draws have independent real and imaginary
/// parts of variance 1/2 each; diagonal draws are real.
std::complex<double> standardized_complex_entry(std::uint64_t seed, std::size_t i, std::size_t j, EntryLaw law);

/// X_n with entries sigma_n(i,j) * xi_ij / sqrt(n), upper triangle drawn and the
/// lower triangle mirrored. Row blocks are filled by `workers` threads; the
/// result does not depend on the worker count.
Eigen::MatrixXd sample_perturbation(const DiscretizedModel& model, EntryLaw law, std::uint64_t seed,
                                    int workers = 1);
/// Complex Hermitian variant, lower triangle mirrored by conjugation.
Eigen::MatrixXcd sample_hermitian_perturbation(const DiscretizedModel& model, EntryLaw law,
                                               std::uint64_t seed, int workers = 1);

template <typename Scalar>
using MatrixOf = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// D_n, the sampled X_n, eps, and D_n^eps = D_n + eps X_n.
template <typename Scalar>
struct PerturbedSystemT {
  DiscretizedModel model;
  MatrixOf<Scalar> x;
  double epsilon = 0.0;
  MatrixOf<Scalar> d_eps;
  std::uint64_t seed = 0;

  std::size_t n() const { return model.n; }
};

using PerturbedSystem = PerturbedSystemT<double>;
using ComplexPerturbedSystem = PerturbedSystemT<std::complex<double>>;

/// Builds D_n^eps with d_eps(i,i) = lambda_i + eps x(i,i) and d_eps(i,j) = eps x(i,j).
/// eps = 0 is accepted and gives the unperturbed diagonal matrix.
PerturbedSystem assemble(const DiscretizedModel& model, Eigen::MatrixXd x, double epsilon,
                         std::uint64_t seed = 0);
ComplexPerturbedSystem assemble(const DiscretizedModel& model, Eigen::MatrixXcd x, double epsilon,
                                std::uint64_t seed = 0);

/// eps = n^(-gamma); gamma must exceed 1/2.
double epsilon_rule(std::size_t n, double gamma);

/// Binary dump of a sampled matrix: 8-byte magic ("SPXREAL1" or "SPXCPLX1"),
/// uint64 n, float64 epsilon, uint64 seed, then n*n row-major float64 values
/// (complex entries as consecutive real/imaginary pairs), little-endian.
struct MatrixDump {
  std::size_t n = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  bool complex = false;
  Eigen::MatrixXd real;
  Eigen::MatrixXcd cplx;
};

void write_matrix_dump(const std::string& path, const Eigen::MatrixXd& x, double epsilon, std::uint64_t seed);
void write_matrix_dump(const std::string& path, const Eigen::MatrixXcd& x, double epsilon, std::uint64_t seed);
MatrixDump read_matrix_dump(const std::string& path);

}  // namespace specpert
