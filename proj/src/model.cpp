#include "specpert/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "specpert/errors.hpp"

namespace specpert {

std::vector<double> SpectralModel::breakpoints(double s) const {
  std::vector<double> interior;
  for (double d : kernel_jumps) {
    interior.push_back(s - d);
    interior.push_back(s + d);
  }
  return breakpoints_within(support.lo, support.hi, std::move(interior));
}

namespace {

double unit_indicator(double t) { return (t >= 0.0 && t <= 1.0) ? 1.0 : 0.0; }

}  // namespace

SpectralModel build_wigner_model() {
  SpectralModel m;
  m.name = "wigner";
  m.f = [](double x) { return x; };
  m.rho = unit_indicator;
  m.tau = [](double, double) { return 1.0; };
  m.sigma2 = [](double, double) { return 1.0; };
  m.support = {0.0, 1.0};
  m.f_lipschitz = 1.0;
  m.sigma2_lipschitz = 0.0;
  m.tau_sup = 1.0;
  m.rho_sup = 1.0;
  return m;
}

SpectralModel build_band_model(double ell) {
  if (!(ell > 0.0 && ell <= 1.0)) throw ValidationError("band width ell must lie in (0, 1]");
  SpectralModel m;
  m.name = "band";
  m.params["ell"] = ell;
  m.f = [](double x) { return x; };
  m.rho = unit_indicator;
  const auto indicator = [ell](double a, double b) { return std::abs(a - b) <= ell ? 1.0 : 0.0; };
  m.tau = indicator;
  m.sigma2 = indicator;
  m.support = {0.0, 1.0};
  m.f_lipschitz = 1.0;
  m.sigma2_lipschitz = 0.0;
  if (ell < 1.0) m.kernel_jumps = {ell};
  m.tau_sup = 1.0;
  m.rho_sup = 1.0;
  return m;
}

std::size_t basis_index(std::size_t n, double x) {
  const double scaled = std::floor(static_cast<double>(n) * x);
  const double clamped = std::clamp(scaled, 1.0, static_cast<double>(n));
  return static_cast<std::size_t>(clamped) - 1;
}

// eta_n is the sum of two sup-norm discrepancies. Each is bounded by the
// smaller of (max over a 10n-point grid + Lipschitz constant * grid spacing)
// and (Lipschitz constant * cell diameter), since every point shares its
// floor cell with the sample point that defines the discrete value.
//
// A jump of sigma2 makes the sup-norm discrepancy 1 in a strip of width O(1/n)
// around the jump set for every n. Those strips (|x - y| within 2/n of a
// kernel jump) are left out of the sigma2 term.
DiscretizedModel discretize(const SpectralModel& model, std::size_t n) {
  if (n < 1) throw ValidationError("matrix size n must be at least 1");
  DiscretizedModel d;
  d.n = n;
  d.source = model.name;
  const double nd = static_cast<double>(n);
  d.lambda.resize(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) d.lambda(static_cast<Eigen::Index>(k)) = model.f((k + 1) / nd);

  auto sigma2 = model.sigma2;
  d.variance = [sigma2, nd](std::size_t i, std::size_t j) { return sigma2((i + 1) / nd, (j + 1) / nd); };
  d.variance_max = model.tau_sup;

  const std::size_t grid = 10 * n;
  const double h = 1.0 / static_cast<double>(grid);

  double lambda_grid = 0.0;
  for (std::size_t k = 0; k <= grid; ++k) {
    const double x = k * h;
    const double v = d.lambda(static_cast<Eigen::Index>(basis_index(n, x)));
    lambda_grid = std::max(lambda_grid, std::abs(v - model.f(x)));
  }
  const double lambda_part = std::min(lambda_grid + model.f_lipschitz * h, model.f_lipschitz / nd);

  constexpr double kGolden = 0.61803398874989484820;
  const double strip = 2.0 / nd;
  double sigma_grid = 0.0;
  for (std::size_t k = 0; k <= grid; ++k) {
    const double x = k * h;
    const double y = std::fmod(k * kGolden, 1.0);
    const double gap = std::abs(x - y);
    const bool near_jump = std::any_of(model.kernel_jumps.begin(), model.kernel_jumps.end(),
                                       [&](double j) { return std::abs(gap - j) <= strip; });
    if (near_jump) continue;
    const double v = d.variance(basis_index(n, x), basis_index(n, y));
    sigma_grid = std::max(sigma_grid, std::abs(v - model.sigma2(x, y)));
  }
  const double diag = std::sqrt(2.0);
  const double sigma_part =
      std::min(sigma_grid + model.sigma2_lipschitz * diag * h, model.sigma2_lipschitz * diag / nd);

  d.eta_bound = lambda_part + sigma_part;
  return d;
}

DiscretizedModel load_tabulated_model(const std::string& path, double eta_bound) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open model file '" + path + "'");
  long long n_read = 0;
  if (!(in >> n_read) || n_read < 1) throw ValidationError("model file '" + path + "': bad header n");
  if (!(eta_bound >= 0.0)) throw ValidationError("declared eta_bound must be non-negative");
  const auto n = static_cast<std::size_t>(n_read);
  DiscretizedModel d;
  d.n = n;
  d.source = path;
  d.eta_bound = eta_bound;
  d.lambda.resize(static_cast<Eigen::Index>(n));
  for (std::size_t k = 0; k < n; ++k) {
    double v = 0.0;
    if (!(in >> v) || !std::isfinite(v))
      throw ValidationError("model file '" + path + "': missing or non-finite eigenvalue " + std::to_string(k + 1));
    d.lambda(static_cast<Eigen::Index>(k)) = v;
  }
  auto table = std::make_shared<Eigen::MatrixXd>(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double v = 0.0;
      if (!(in >> v) || !std::isfinite(v) || v < 0.0)
        throw ValidationError("model file '" + path + "': bad variance entry (" + std::to_string(i + 1) + ", " +
                              std::to_string(j + 1) + ")");
      (*table)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  std::string extra;
  if (in >> extra) throw ValidationError("model file '" + path + "': trailing data");
  const double asym = (*table - table->transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * std::max(1.0, table->cwiseAbs().maxCoeff()))
    throw ValidationError("model file '" + path + "': variance table is not symmetric");
  d.variance_max = table->maxCoeff();
  d.variance = [table](std::size_t i, std::size_t j) {
    return (*table)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  return d;
}

}  // namespace specpert
