#include "specpert/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "specpert/errors.hpp"
#include "specpert/rng.hpp"
#include "specpert/smoothfn.hpp"
#include "specpert/spectra.hpp"
#include "specpert/theory.hpp"

namespace specpert {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Moments {
  double mean = kNaN;
  double sd = kNaN;
  std::size_t count = 0;
};

// Mean and sample standard deviation of the finite entries, in index order.
Moments moments(const std::vector<double>& v) {
  Moments m;
  double sum = 0.0;
  for (double x : v)
    if (std::isfinite(x)) {
      sum += x;
      ++m.count;
    }
  if (m.count == 0) return m;
  m.mean = sum / static_cast<double>(m.count);
  if (m.count > 1) {
    double ss = 0.0;
    for (double x : v)
      if (std::isfinite(x)) ss += (x - m.mean) * (x - m.mean);
    m.sd = std::sqrt(ss / static_cast<double>(m.count - 1));
  }
  return m;
}

std::vector<std::uint64_t> trial_seeds(const ExperimentConfig& cfg, std::size_t n) {
  std::vector<std::uint64_t> seeds(static_cast<std::size_t>(cfg.trials));
  for (std::size_t k = 0; k < seeds.size(); ++k) seeds[k] = rng::derive_seed(cfg.master_seed, n, k);
  return seeds;
}

// Samples X with the given seed, assembles D + eps X, diagonalizes it and hands
// (system, decomposition, ||X||) to fn. ||X|| is NaN unless requested.
template <typename Fn>
auto with_trial(const ExperimentConfig& cfg, const DiscretizedModel& dm, std::uint64_t seed, double eps,
                bool need_xnorm, Fn&& fn) {
  if (cfg.complex_entries) {
    Eigen::MatrixXcd x = sample_hermitian_perturbation(dm, cfg.law, seed);
    const double xnorm = need_xnorm ? operator_norm(x) : kNaN;
    const auto sys = assemble(dm, std::move(x), eps, seed);
    const auto dec = eigendecompose(sys.d_eps);
    return fn(sys, dec, xnorm);
  }
  Eigen::MatrixXd x = sample_perturbation(dm, cfg.law, seed);
  const double xnorm = need_xnorm ? operator_norm(x) : kNaN;
  const auto sys = assemble(dm, std::move(x), eps, seed);
  const auto dec = eigendecompose(sys.d_eps);
  return fn(sys, dec, xnorm);
}

nlohmann::json alpha_regime(const ExperimentConfig& cfg, std::size_t n, double eta) {
  const double nd = static_cast<double>(n);
  const double a8 = std::pow(cfg.alpha(n), 8);
  const double rhs = std::max({std::sqrt(nd) * cfg.epsilon(n), eta, 1.0 / std::sqrt(nd)});
  return {{"alpha", cfg.alpha(n)},
          {"alpha_pow8", a8},
          {"max_sqrt_n_eps_eta_inv_sqrt_n", rhs},
          {"ratio", a8 / rhs},
          {"window_condition_met", a8 > rhs},
          {"window_exponent_below_half", cfg.window_a < 0.5}};
}

std::vector<double> sorted_copy(const Eigen::VectorXd& v) {
  std::vector<double> out(v.data(), v.data() + v.size());
  std::sort(out.begin(), out.end());
  return out;
}

// Sum of w_j phi(lambda_j) over atoms with locations in [lo, hi]; the atoms are
// in ascending location order.
double measure_on(const SpectralMeasure& m, const SmoothFunction& phi, double lo, double hi) {
  const auto first = std::lower_bound(m.atoms.begin(), m.atoms.end(), lo,
                                      [](const Atom& a, double v) { return a.location < v; });
  double s = 0.0;
  for (auto it = first; it != m.atoms.end() && it->location <= hi; ++it) s += it->weight * phi(it->location);
  return s;
}

}  // namespace

DiscretizedModel ResolvedModel::at(std::size_t n) const {
  if (limit) return discretize(*limit, n);
  if (table->n != n)
    throw ValidationError("tabulated model has n = " + std::to_string(table->n) + " but n = " + std::to_string(n) +
                          " was requested");
  return *table;
}

const SpectralModel& ResolvedModel::require_limit(const std::string& purpose) const {
  if (!limit) throw ValidationError(purpose + " needs a limit model (wigner or band), not tabulated data");
  return *limit;
}

ResolvedModel resolve_model(const ModelSpec& spec) {
  ResolvedModel r;
  if (spec.name == "wigner") {
    r.limit = build_wigner_model();
  } else if (spec.name == "band") {
    r.limit = build_band_model(spec.ell);
  } else if (spec.name == "table") {
    if (spec.table_path.empty()) throw ValidationError("model 'table' needs a table path");
    r.table = load_tabulated_model(spec.table_path, spec.table_eta);
  } else {
    throw ValidationError("unknown model '" + spec.name + "' (expected wigner, band, table)");
  }
  return r;
}

void ExperimentConfig::validate() const {
  if (model.name != "wigner" && model.name != "band" && model.name != "table")
    throw ValidationError("unknown model '" + model.name + "' (expected wigner, band, table)");
  if (model.name == "band" && !(model.ell > 0.0 && model.ell <= 1.0))
    throw ValidationError("band width ell must lie in (0, 1]");
  if (n_list.empty()) throw ValidationError("n list must not be empty");
  for (std::size_t n : n_list)
    if (n < 1) throw ValidationError("matrix size n must be at least 1");
  if (!(gamma > 0.5))
    throw ValidationError("gamma = " + std::to_string(gamma) +
                          " violates the hypothesis eps = n^(-gamma) << n^(-1/2); need gamma > 1/2");
  if (!(x0 >= 0.0 && x0 <= 1.0)) throw ValidationError("x0 must lie in [0, 1]");
  if (trials < 1) throw ValidationError("trials must be at least 1");
  if (!(window_c > 0.0) || !(window_a > 0.0))
    throw ValidationError("window rule alpha = c n^(-a) needs c > 0 and a > 0 so that alpha -> 0");
  if (!(ma_width >= 0.0)) throw ValidationError("moving-average width must be non-negative");
  if (workers < 1) throw ValidationError("workers must be at least 1");
  if (z.imag() == 0.0) throw ValidationError("z must have a nonzero imaginary part");
  for (double d : deltas)
    if (!(d > 0.0)) throw ValidationError("opnorm deltas must be positive");
  for (double c : centers)
    if (!std::isfinite(c)) throw ValidationError("window centers must be finite");
  quadrature.validate();
}

double ExperimentConfig::alpha(std::size_t n) const {
  return window_c * std::pow(static_cast<double>(n), -window_a);
}

double ExperimentConfig::epsilon(std::size_t n) const { return epsilon_rule(n, gamma); }

nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["model"] = cfg.model.name;
  if (cfg.model.name == "band") j["ell"] = cfg.model.ell;
  if (cfg.model.name == "table") {
    j["table"] = cfg.model.table_path;
    j["table_eta"] = cfg.model.table_eta;
  }
  j["n"] = cfg.n_list;
  j["gamma"] = cfg.gamma;
  j["x0"] = cfg.x0;
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  j["window_c"] = cfg.window_c;
  j["window_a"] = cfg.window_a;
  j["ma_width"] = cfg.ma_width;
  j["law"] = to_string(cfg.law);
  j["complex"] = cfg.complex_entries;
  j["centers"] = cfg.centers;
  j["check_invariants"] = cfg.check_invariants;
  j["phi"] = cfg.phi;
  j["z"] = {cfg.z.real(), cfg.z.imag()};
  j["deltas"] = cfg.deltas;
  return j;
}

Report run_thm2(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto resolved = resolve_model(cfg.model);
  const std::size_t n = cfg.n_list.front();
  const DiscretizedModel dm = resolved.at(n);
  const double eps = cfg.epsilon(n);
  const double alpha = cfg.alpha(n);
  const std::size_t i0 = basis_index(n, cfg.x0);
  const double f0 = resolved.limit ? resolved.limit->f(cfg.x0) : dm.lambda(static_cast<Eigen::Index>(i0));

  std::vector<double> centers = cfg.centers;
  if (centers.empty()) {
    for (int k = 1; k <= 19; ++k) {
      const double t = 0.05 * k;
      if (std::abs(t - f0) >= 2.0 * alpha) centers.push_back(t);
    }
  } else {
    for (double t : centers)
      if (std::abs(t - f0) < 2.0 * alpha)
        throw ValidationError("window center " + std::to_string(t) + " is closer than 2 alpha_n = " +
                              std::to_string(2.0 * alpha) + " to f(x0) = " + std::to_string(f0));
  }
  const std::size_t m = centers.size();
  const std::vector<double> lambda0 = sorted_copy(dm.lambda);
  const double omega = alpha / 4.0;
  std::vector<SmoothFunction> lower, upper;
  if (cfg.check_invariants)
    for (double t : centers) {
      lower.push_back(window_minus(t, alpha, omega));
      upper.push_back(window_plus(t, alpha, omega));
    }

  struct TrialOut {
    std::vector<double> s, count;
    int weyl_failures = 0, count_violations = 0, sandwich_violations = 0;
  };
  const auto seeds = trial_seeds(cfg, n);
  const auto outs = run_indexed<TrialOut>(seeds.size(), cfg.workers, [&](std::size_t k) {
    return with_trial(cfg, dm, seeds[k], eps, cfg.check_invariants, [&](const auto& sys, const auto& dec, double xn) {
      (void)sys;
      TrialOut o;
      o.s.assign(m, kNaN);
      o.count.assign(m, 0.0);
      const auto lam = as_span(dec.values);
      const auto meas = vector_spectral_measure(dec, i0);
      if (cfg.check_invariants && !weyl_check(lambda0, lam, eps, xn)) ++o.weyl_failures;
      for (std::size_t c = 0; c < m; ++c) {
        const double t = centers[c];
        const auto lo = std::upper_bound(lam.begin(), lam.end(), t - alpha) - lam.begin();
        const auto hi = std::lower_bound(lam.begin(), lam.end(), t + alpha) - lam.begin();
        const auto count = static_cast<std::size_t>(hi - lo);
        double mass = 0.0;
        for (auto j = lo; j < hi; ++j) mass += meas.atoms[static_cast<std::size_t>(j)].weight;
        o.count[c] = static_cast<double>(count);
        if (count > 0) o.s[c] = static_cast<double>(n) / (eps * eps) * mass / static_cast<double>(count);
        if (cfg.check_invariants) {
          const double shift = eps * xn + 1e-10;
          const std::size_t inner = alpha > shift ? count_window(lambda0, t, alpha - shift) : 0;
          const std::size_t outer = count_window(lambda0, t, alpha + shift);
          if (count < inner || count > outer) ++o.count_violations;
          const double below = measure_on(meas, lower[c], t - alpha, t + alpha);
          const double above = measure_on(meas, upper[c], t - alpha - omega, t + alpha + omega);
          if (below > mass + 1e-12 || mass > above + 1e-12) ++o.sandwich_violations;
        }
      }
      return o;
    });
  });

  Report r;
  r.name = "thm2";
  r.columns = {"t", "mean_S", "sd_S", "prediction", "n_windows_mean"};
  int weyl = 0, counts = 0, sandwich = 0;
  for (const auto& o : outs) {
    weyl += o.weyl_failures;
    counts += o.count_violations;
    sandwich += o.sandwich_violations;
  }
  nlohmann::json missing = nlohmann::json::array();
  for (std::size_t c = 0; c < m; ++c) {
    std::vector<double> s(outs.size()), cnt(outs.size());
    for (std::size_t k = 0; k < outs.size(); ++k) {
      s[k] = outs[k].s[c];
      cnt[k] = outs[k].count[c];
    }
    const Moments ms = moments(s);
    const double pred = resolved.limit ? overlap_prediction(*resolved.limit, cfg.x0, centers[c]) : kNaN;
    if (ms.count < outs.size()) missing.push_back({{"t", centers[c]}, {"empty_trials", outs.size() - ms.count}});
    r.rows.push_back({centers[c], ms.mean, ms.sd, pred, moments(cnt).mean});
  }
  r.metadata["experiment"] = "thm2";
  r.metadata["config"] = to_json(cfg);
  r.metadata["n"] = n;
  r.metadata["epsilon"] = eps;
  r.metadata["basis_index"] = i0 + 1;
  r.metadata["eta_bound"] = dm.eta_bound;
  r.metadata["alpha_regime"] = alpha_regime(cfg, n, dm.eta_bound);
  r.metadata["trial_seeds"] = seeds;
  r.metadata["empty_windows"] = missing;
  if (cfg.check_invariants)
    r.metadata["invariants"] = {{"weyl_check_failures", weyl},
                                {"window_count_violations", counts},
                                {"sandwich_violations", sandwich},
                                {"sandwich_omega", omega}};
  return r;
}

namespace {

// Shared driver for thm1 and pi-decay: per n, the mean over trials of
// stat(system, decomposition).
template <typename Stat>
Report run_pi_family(const ExperimentConfig& cfg, const std::string& name, const Stat& stat,
                     const std::function<double(std::size_t, double, double)>& bound_shape,
                     nlohmann::json& per_n) {
  Report r;
  r.name = name;
  r.columns = {"n", "mean_pi_sq", "bound_shape"};
  const auto resolved = resolve_model(cfg.model);
  double c_fit = kNaN;
  for (std::size_t n : cfg.n_list) {
    const DiscretizedModel dm = resolved.at(n);
    const double eps = cfg.epsilon(n);
    const auto seeds = trial_seeds(cfg, n);
    const auto values = run_indexed<double>(seeds.size(), cfg.workers, [&](std::size_t k) {
      return with_trial(cfg, dm, seeds[k], eps, false,
                        [&](const auto& sys, const auto& dec, double) { return stat(sys, dec); });
    });
    const Moments ms = moments(values);
    const double bound = bound_shape(n, eps, dm.eta_bound);
    if (std::isnan(c_fit) && bound > 0.0) c_fit = ms.mean / bound;
    const double ratio = ms.mean / (c_fit * bound);
    r.rows.push_back({static_cast<double>(n), ms.mean, bound});
    per_n.push_back({{"n", n},
                     {"epsilon", eps},
                     {"eta_bound", dm.eta_bound},
                     {"sd_pi_sq", ms.sd},
                     {"ratio_to_fitted_bound", ratio},
                     {"within_fitted_bound", ratio <= 1.0 + 1e-12},
                     {"trial_seeds", seeds}});
  }
  r.metadata["c_fit"] = c_fit;
  return r;
}

}  // namespace

Report run_thm1(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto resolved = resolve_model(cfg.model);
  const SpectralModel& model = resolved.require_limit("thm1");
  const SmoothFunction phi = parse_preset(cfg.phi);
  const double xi = xi_direct(model, model.f(cfg.x0), phi, cfg.quadrature);
  const auto stat = [&](const auto& sys, const auto& dec) {
    const double p = pi_n_statistic(sys, dec, cfg.x0, phi, xi);
    return p * p;
  };
  const auto bound = [](std::size_t n, double eps, double eta) {
    const double nd = static_cast<double>(n);
    const double b = eta + 1.0 / std::sqrt(nd) + eps * std::sqrt(nd);
    return b * b;
  };
  nlohmann::json per_n = nlohmann::json::array();
  Report r = run_pi_family(cfg, "thm1", stat, bound, per_n);
  r.metadata["experiment"] = "thm1";
  r.metadata["config"] = to_json(cfg);
  r.metadata["xi"] = xi;
  r.metadata["phi_d7_sup"] = phi.d7_sup();
  r.metadata["basis_x"] = cfg.x0;
  r.metadata["per_n"] = per_n;
  return r;
}

Report run_pi_decay(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto resolved = resolve_model(cfg.model);
  const SpectralModel& model = resolved.require_limit("pi-decay");
  const std::complex<double> z = cfg.z;
  const std::complex<double> xi = xi_stieltjes(model, model.f(cfg.x0), z, cfg.quadrature);
  const auto stat = [&](const auto& sys, const auto& dec) {
    return std::norm(pi_n_resolvent(sys, dec, cfg.x0, z, xi));
  };
  const double y = std::abs(z.imag());
  const auto bound = [y](std::size_t n, double eps, double eta) {
    const double nd = static_cast<double>(n);
    return (eta * eta + 1.0 / nd) / std::pow(y, 6) + nd * eps * eps / std::pow(y, 8) +
           std::pow(eps, 4) / (nd * nd * std::pow(y, 10)) + std::pow(eps, 6) / (nd * nd * nd * std::pow(y, 12));
  };
  nlohmann::json per_n = nlohmann::json::array();
  Report r = run_pi_family(cfg, "pi-decay", stat, bound, per_n);
  r.metadata["experiment"] = "pi-decay";
  r.metadata["config"] = to_json(cfg);
  r.metadata["xi"] = {xi.real(), xi.imag()};
  r.metadata["per_n"] = per_n;
  return r;
}

FigureKind parse_figure_kind(const std::string& name) {
  if (name == "fig1") return FigureKind::fig1;
  if (name == "fig2") return FigureKind::fig2;
  throw ValidationError("unknown figure '" + name + "' (expected fig1 or fig2)");
}

Report run_figures(const ExperimentConfig& cfg_in, FigureKind which) {
  ExperimentConfig cfg = cfg_in;
  cfg.model.name = which == FigureKind::fig1 ? "wigner" : "band";
  cfg.validate();
  const auto resolved = resolve_model(cfg.model);
  const SpectralModel& model = *resolved.limit;
  const std::size_t n = cfg.n_list.front();
  const DiscretizedModel dm = resolved.at(n);
  const double eps = cfg.epsilon(n);
  const std::size_t i0 = basis_index(n, cfg.x0);
  const double width = cfg.ma_width > 0.0 ? cfg.ma_width : 1.0 / std::sqrt(static_cast<double>(n));
  const double scale = static_cast<double>(n) / (eps * eps);

  const auto seeds = trial_seeds(cfg, n);
  const auto curves = run_indexed<std::vector<double>>(seeds.size(), cfg.workers, [&](std::size_t k) {
    return with_trial(cfg, dm, seeds[k], eps, false, [&](const auto&, const auto& dec, double) {
      const auto meas = vector_spectral_measure(dec, i0);
      std::vector<double> raw(n);
      for (std::size_t j = 0; j < n; ++j) raw[j] = scale * meas.atoms[j].weight;
      return raw;
    });
  });
  // Eigenvector j (ascending) is plotted at the j-th smallest unperturbed eigenvalue.
  const std::vector<double> t = sorted_copy(dm.lambda);
  std::vector<double> raw(n, 0.0);
  for (const auto& c : curves)
    for (std::size_t j = 0; j < n; ++j) raw[j] += c[j];
  for (double& v : raw) v /= static_cast<double>(curves.size());

  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) prefix[j + 1] = prefix[j] + raw[j];
  Report r;
  r.name = which == FigureKind::fig1 ? "fig1" : "fig2";
  r.columns = {"t", "raw", "smoothed", "prediction"};
  std::size_t lo = 0, hi = 0;
  const double f0 = model.f(cfg.x0);
  for (std::size_t j = 0; j < n; ++j) {
    while (t[j] - t[lo] > 0.5 * width) ++lo;
    while (hi < n && t[hi] - t[j] <= 0.5 * width) ++hi;
    const double smoothed = (prefix[hi] - prefix[lo]) / static_cast<double>(hi - lo);
    const double pred = std::abs(t[j] - f0) < 1e-9 ? kNaN : overlap_prediction(model, cfg.x0, t[j]);
    r.rows.push_back({t[j], raw[j], smoothed, pred});
  }
  r.metadata["experiment"] = r.name;
  r.metadata["config"] = to_json(cfg);
  r.metadata["n"] = n;
  r.metadata["epsilon"] = eps;
  r.metadata["basis_index"] = i0 + 1;
  r.metadata["moving_average_width"] = width;
  r.metadata["trial_seeds"] = seeds;
  return r;
}

Report run_opnorm_tail(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto resolved = resolve_model(cfg.model);
  Report r;
  r.name = "opnorm";
  r.columns = {"n", "delta", "frequency", "trials"};
  std::vector<double> deltas = cfg.deltas;
  std::sort(deltas.begin(), deltas.end());
  nlohmann::json per_n = nlohmann::json::array();
  for (std::size_t n : cfg.n_list) {
    const DiscretizedModel dm = resolved.at(n);
    if (dm.variance_max > 1.0 + 1e-12)
      throw ValidationError("opnorm needs a normalized variance profile (sup sigma^2 <= 1)");
    const auto seeds = trial_seeds(cfg, n);
    const auto norms = run_indexed<double>(seeds.size(), cfg.workers, [&](std::size_t k) {
      if (cfg.complex_entries) return operator_norm(sample_hermitian_perturbation(dm, cfg.law, seeds[k]));
      return operator_norm(sample_perturbation(dm, cfg.law, seeds[k]));
    });
    for (double d : deltas) {
      const auto hits = std::count_if(norms.begin(), norms.end(), [d](double v) { return v >= 2.0 + d; });
      r.rows.push_back({static_cast<double>(n), d, static_cast<double>(hits) / static_cast<double>(norms.size()),
                        static_cast<double>(norms.size())});
    }
    per_n.push_back({{"n", n},
                     {"max_norm", *std::max_element(norms.begin(), norms.end())},
                     {"mean_norm", moments(norms).mean},
                     {"trial_seeds", seeds}});
  }
  r.metadata["experiment"] = "opnorm";
  r.metadata["config"] = to_json(cfg);
  r.metadata["per_n"] = per_n;
  return r;
}

Report run_xi_table(const SpectralModel& model, const std::string& phi_preset, const std::vector<double>& s_values,
                    const QuadratureSpec& q) {
  q.validate();
  const SmoothFunction phi = parse_preset(phi_preset);
  Report r;
  r.name = "xi";
  r.columns = {"s", "xi_direct", "xi_via_zeta", "abs_diff"};
  for (double s : s_values) {
    const double a = xi_direct(model, s, phi, q);
    const double b = xi_via_zeta(model, s, phi, q);
    r.rows.push_back({s, a, b, std::abs(a - b)});
  }
  r.metadata["experiment"] = "xi";
  r.metadata["model"] = model.name;
  r.metadata["model_params"] = model.params;
  r.metadata["phi"] = phi_preset;
  return r;
}

Report run_hs_check(const std::string& phi_preset, const std::vector<double>& points, double chi_margin) {
  if (!(chi_margin > 0.0)) throw ValidationError("chi margin must be positive");
  const SmoothFunction phi = parse_preset(phi_preset);
  Report r;
  r.name = "hs-check";
  r.columns = {"x", "exact", "reconstructed", "abs_err"};
  double sup_err = 0.0;
  for (double x : points) {
    const double exact = phi(x);
    const double rec = hs_reconstruct(phi, x, chi_margin);
    sup_err = std::max(sup_err, std::abs(rec - exact));
    r.rows.push_back({x, exact, rec, std::abs(rec - exact)});
  }

  // Central half of the support, 0 < y <= 0.3.
  double lo = 0.0, hi = 1.0;
  if (const auto& sp = phi.support()) {
    lo = sp->lo;
    hi = sp->hi;
  }
  const double x_lo = lo + 0.25 * (hi - lo), x_hi = hi - 0.25 * (hi - lo), y_max = 0.3, h = 1e-4;
  const DbarGridCheck dbar = dbar_grid_check(phi, x_lo, x_hi, y_max, h);
  r.metadata["experiment"] = "hs-check";
  r.metadata["phi"] = phi_preset;
  r.metadata["chi_margin"] = chi_margin;
  r.metadata["sup_abs_err"] = sup_err;
  r.metadata["dbar_grid"] = {{"x_range", {x_lo, x_hi}}, {"y_range", {y_max / 10.0, y_max}}, {"points", 100}, {"step", h}};
  r.metadata["dbar_max_fd_gap"] = dbar.max_gap;
  r.metadata["dbar_max_abs"] = dbar.max_abs;
  return r;
}

}  // namespace specpert
