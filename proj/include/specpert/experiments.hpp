#pragma once

// Monte Carlo drivers. Every trial draws its matrix from
// rng::derive_seed(master_seed, n, trial); trials run on a worker pool and are
// reduced in trial order, so reports do not depend on the worker count.

#include <complex>
#include <cstdint>
#include <exception>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "specpert/ensemble.hpp"
#include "specpert/model.hpp"
#include "specpert/quadrature.hpp"
#include "specpert/report.hpp"

namespace specpert {

struct ModelSpec {
  // "wigner", "band" or "table".
  std::string name = "wigner";
  double ell = 0.1;
  // For "table": file in the load_tabulated_model format and its declared eta.
  std::string table_path;
  double table_eta = 0.0;
};

/// Limit model (absent for tabulated data) plus a size-n discretizer.
struct ResolvedModel {
  std::optional<SpectralModel> limit;
  std::optional<DiscretizedModel> table;

  DiscretizedModel at(std::size_t n) const;
  const SpectralModel& require_limit(const std::string& purpose) const;
};

ResolvedModel resolve_model(const ModelSpec& spec);

struct ExperimentConfig {
  ModelSpec model;
  std::vector<std::size_t> n_list{2000};
  double gamma = 0.7;
  double x0 = 0.5;
  int trials = 20;
  std::uint64_t master_seed = 12345;
  // Window half-width alpha_n = window_c * n^(-window_a).
  double window_c = 1.0;
  double window_a = 0.5;
  // Moving-average width for figure curves; 0 selects n^(-1/2).
  double ma_width = 0.0;
  EntryLaw law = EntryLaw::gaussian;
  // Complex Hermitian perturbation instead of real symmetric.
  bool complex_entries = false;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  // thm2 window centers in spectral coordinates; empty selects 0.05, 0.10, ..., 0.95
  // minus the centers closer than 2 alpha_n to f(x0).
  std::vector<double> centers;
  // Track the Weyl window-count and smooth-sandwich invariants in thm2.
  bool check_invariants = true;
  // thm1 test function preset.
  std::string phi = "bump:0.7,0.9";
  // pi-decay resolvent parameter.
  std::complex<double> z{0.6, 2.0};
  // opnorm thresholds 2 + delta.
  std::vector<double> deltas{0.1, 0.25, 0.5};
  QuadratureSpec quadrature;

  void validate() const;
  double alpha(std::size_t n) const;
  double epsilon(std::size_t n) const;
};

/// Config echo for report sidecars.
nlohmann::json to_json(const ExperimentConfig& cfg);

/// Columns t, mean_S, sd_S, prediction, n_windows_mean for the first n of n_list.
Report run_thm2(const ExperimentConfig& cfg);

/// Columns n, mean_pi_sq, bound_shape with phi = parse_preset(cfg.phi).
Report run_thm1(const ExperimentConfig& cfg);

/// Columns n, mean_pi_sq, bound_shape for phi_z(t) = 1/(z - t), z = cfg.z.
Report run_pi_decay(const ExperimentConfig& cfg);

enum class FigureKind { fig1, fig2 };
FigureKind parse_figure_kind(const std::string& name);

/// Columns t, raw, smoothed, prediction. fig1 uses the wigner model and fig2 the
/// band model with cfg.model.ell; the first n of n_list is used and trials are
/// averaged.
Report run_figures(const ExperimentConfig& cfg, FigureKind which);

/// Columns n, delta, frequency, trials.
Report run_opnorm_tail(const ExperimentConfig& cfg);

/// Columns s, xi_direct, xi_via_zeta, abs_diff.
Report run_xi_table(const SpectralModel& model, const std::string& phi_preset, const std::vector<double>& s_values,
                    const QuadratureSpec& q);

/// Columns x, exact, reconstructed, abs_err; the sidecar also records the
/// largest gap between the closed-form dbar of the extension and a central
/// finite difference on a 10 x 10 grid.
Report run_hs_check(const std::string& phi_preset, const std::vector<double>& points, double chi_margin);

/// Runs body(k) for k in [0, count) on `workers` threads and returns the results
/// in index order. The first exception thrown by any task is rethrown.
template <typename R, typename F>
std::vector<R> run_indexed(std::size_t count, int workers, const F& body);

}  // namespace specpert

#include "specpert/detail/run_indexed.hpp"
