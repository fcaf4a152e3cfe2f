#include "specpert/ensemble.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>
#include <vector>

#include "specpert/errors.hpp"
#include "specpert/rng.hpp"

namespace specpert {

static_assert(std::endian::native == std::endian::little, "matrix dumps assume a little-endian host");

EntryLaw parse_entry_law(const std::string& name) {
  if (name == "gaussian") return EntryLaw::gaussian;
  if (name == "rademacher") return EntryLaw::rademacher;
  if (name == "uniform" || name == "uniform-centered") return EntryLaw::uniform_centered;
  throw ValidationError("unknown entry distribution '" + name + "' (expected gaussian, rademacher, uniform)");
}

std::string to_string(EntryLaw law) {
  switch (law) {
    case EntryLaw::gaussian:
      return "gaussian";
    case EntryLaw::rademacher:
      return "rademacher";
    case EntryLaw::uniform_centered:
      return "uniform-centered";
  }
  return "unknown";
}

namespace {

std::uint64_t position_key(std::size_t i, std::size_t j) {
  return (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
}

double draw(EntryLaw law, std::uint64_t w0, std::uint64_t w1) {
  switch (law) {
    case EntryLaw::gaussian:
      return rng::normal_pair(w0, w1).first;
    case EntryLaw::rademacher:
      return (w0 >> 63) ? 1.0 : -1.0;
    case EntryLaw::uniform_centered:
      return std::sqrt(3.0) * (2.0 * rng::to_unit_open(w0) - 1.0);
  }
  return 0.0;
}

template <typename Fill>
void fill_rows(std::size_t n, int workers, const Fill& fill_row) {
  const std::size_t w = static_cast<std::size_t>(std::max(1, workers));
  if (w == 1 || n < 64) {
    for (std::size_t i = 0; i < n; ++i) fill_row(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < w; ++t)
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += w) fill_row(i);
    });
}

}  // namespace

double standardized_entry(std::uint64_t seed, std::size_t i, std::size_t j, EntryLaw law) {
  const std::uint64_t key = position_key(i, j);
  return draw(law, rng::hash3(seed, key, 0), rng::hash3(seed, key, 1));
}

std::complex<double> standardized_complex_entry(std::uint64_t seed, std::size_t i, std::size_t j, EntryLaw law) {
  if (i == j) return {standardized_entry(seed, i, j, law), 0.0};
  const std::uint64_t key = position_key(i, j);
  const double re = draw(law, rng::hash3(seed, key, 2), rng::hash3(seed, key, 3));
  const double im = draw(law, rng::hash3(seed, key, 4), rng::hash3(seed, key, 5));
  return std::complex<double>(re, im) * std::sqrt(0.5);
}

Eigen::MatrixXd sample_perturbation(const DiscretizedModel& model, EntryLaw law, std::uint64_t seed, int workers) {
  const std::size_t n = model.n;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd x(n, n);
  fill_rows(n, workers, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      const double var = model.variance(i, j);
      const double v = var > 0.0 ? std::sqrt(var) * standardized_entry(seed, i, j, law) * inv_sqrt_n : 0.0;
      x(i, j) = v;
      x(j, i) = v;
    }
  });
  return x;
}

Eigen::MatrixXcd sample_hermitian_perturbation(const DiscretizedModel& model, EntryLaw law, std::uint64_t seed,
                                               int workers) {
  const std::size_t n = model.n;
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXcd x(n, n);
  fill_rows(n, workers, [&](std::size_t i) {
    for (std::size_t j = i; j < n; ++j) {
      const double var = model.variance(i, j);
      const std::complex<double> v =
          var > 0.0 ? std::sqrt(var) * standardized_complex_entry(seed, i, j, law) * inv_sqrt_n
                    : std::complex<double>(0.0, 0.0);
      x(i, j) = v;
      x(j, i) = std::conj(v);
    }
  });
  return x;
}

namespace {

template <typename Scalar>
PerturbedSystemT<Scalar> assemble_impl(const DiscretizedModel& model, MatrixOf<Scalar> x, double epsilon,
                                       std::uint64_t seed) {
  const auto n = static_cast<Eigen::Index>(model.n);
  if (x.rows() != n || x.cols() != n)
    throw ValidationError("perturbation is " + std::to_string(x.rows()) + "x" + std::to_string(x.cols()) +
                          " but the model has n = " + std::to_string(model.n));
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ValidationError("epsilon must be finite and >= 0");
  PerturbedSystemT<Scalar> sys;
  sys.model = model;
  sys.epsilon = epsilon;
  sys.seed = seed;
  sys.d_eps = epsilon * x;
  for (Eigen::Index i = 0; i < n; ++i) sys.d_eps(i, i) += model.lambda(i);
  sys.x = std::move(x);
  return sys;
}

}  // namespace

PerturbedSystem assemble(const DiscretizedModel& model, Eigen::MatrixXd x, double epsilon, std::uint64_t seed) {
  return assemble_impl<double>(model, std::move(x), epsilon, seed);
}

ComplexPerturbedSystem assemble(const DiscretizedModel& model, Eigen::MatrixXcd x, double epsilon,
                                std::uint64_t seed) {
  return assemble_impl<std::complex<double>>(model, std::move(x), epsilon, seed);
}

double epsilon_rule(std::size_t n, double gamma) {
  if (!(gamma > 0.5))
    throw ValidationError("gamma = " + std::to_string(gamma) +
                          " violates the hypothesis eps = eps_n << n^(-1/2); need gamma > 1/2");
  if (n < 1) throw ValidationError("matrix size n must be at least 1");
  return std::pow(static_cast<double>(n), -gamma);
}

namespace {

constexpr char kMagicReal[9] = "SPXREAL1";
constexpr char kMagicComplex[9] = "SPXCPLX1";

void write_header(std::ofstream& out, const char* magic, std::size_t n, double epsilon, std::uint64_t seed) {
  const std::uint64_t n64 = n;
  out.write(magic, 8);
  out.write(reinterpret_cast<const char*>(&n64), sizeof n64);
  out.write(reinterpret_cast<const char*>(&epsilon), sizeof epsilon);
  out.write(reinterpret_cast<const char*>(&seed), sizeof seed);
}

std::ofstream open_dump(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write matrix dump '" + path + "'");
  return out;
}

}  // namespace

void write_matrix_dump(const std::string& path, const Eigen::MatrixXd& x, double epsilon, std::uint64_t seed) {
  auto out = open_dump(path);
  const auto n = static_cast<std::size_t>(x.rows());
  write_header(out, kMagicReal, n, epsilon, seed);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = x;
  out.write(reinterpret_cast<const char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * n * n));
  if (!out) throw std::runtime_error("write failed for matrix dump '" + path + "'");
}

void write_matrix_dump(const std::string& path, const Eigen::MatrixXcd& x, double epsilon, std::uint64_t seed) {
  auto out = open_dump(path);
  const auto n = static_cast<std::size_t>(x.rows());
  write_header(out, kMagicComplex, n, epsilon, seed);
  const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = x;
  out.write(reinterpret_cast<const char*>(rm.data()),
            static_cast<std::streamsize>(sizeof(std::complex<double>) * n * n));
  if (!out) throw std::runtime_error("write failed for matrix dump '" + path + "'");
}

MatrixDump read_matrix_dump(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open matrix dump '" + path + "'");
  char magic[8];
  std::uint64_t n64 = 0;
  MatrixDump dump;
  in.read(magic, 8);
  in.read(reinterpret_cast<char*>(&n64), sizeof n64);
  in.read(reinterpret_cast<char*>(&dump.epsilon), sizeof dump.epsilon);
  in.read(reinterpret_cast<char*>(&dump.seed), sizeof dump.seed);
  if (!in) throw ValidationError("matrix dump '" + path + "': truncated header");
  if (std::memcmp(magic, kMagicReal, 8) == 0) {
    dump.complex = false;
  } else if (std::memcmp(magic, kMagicComplex, 8) == 0) {
    dump.complex = true;
  } else {
    throw ValidationError("matrix dump '" + path + "': bad magic");
  }
  if (n64 == 0 || n64 > (1u << 20)) throw ValidationError("matrix dump '" + path + "': implausible n");
  dump.n = static_cast<std::size_t>(n64);
  const auto n = static_cast<Eigen::Index>(dump.n);
  if (dump.complex) {
    Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(n, n);
    in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(sizeof(std::complex<double>) * n * n));
    dump.cplx = rm;
  } else {
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(n, n);
    in.read(reinterpret_cast<char*>(rm.data()), static_cast<std::streamsize>(sizeof(double) * n * n));
    dump.real = rm;
  }
  if (!in) throw ValidationError("matrix dump '" + path + "': truncated payload");
  return dump;
}

}  // namespace specpert
