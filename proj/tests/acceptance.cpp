// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits
// nonzero if any criterion fails. All thresholds are fixed below.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "specpert/ensemble.hpp"
#include "specpert/experiments.hpp"
#include "specpert/report.hpp"
#include "specpert/rng.hpp"
#include "specpert/spectra.hpp"
#include "specpert/theory.hpp"

using namespace specpert;

namespace {

constexpr std::uint64_t kMasterSeed = 12345;

// Criterion 1
constexpr int kXiCases = 20;
constexpr double kXiRelTol = 1e-8;
constexpr double kXiSeconds = 30.0;
// Criterion 2
constexpr double kAnalyticTol = 1e-9;
// Criterion 3
constexpr double kHsTol = 1e-4;
constexpr double kDbarTol = 1e-6;
constexpr double kHsMargin = 0.05;
constexpr double kHsSeconds = 120.0;
// Criterion 4
constexpr std::size_t kIdentityN = 500;
constexpr int kIdentityTrials = 5;
constexpr double kMassTol = 1e-10;
constexpr double kMomentTol = 1e-8;
constexpr double kTwoDefinitionsTol = 1e-9;
// Criterion 5
constexpr std::size_t kOverlapN = 2000;
constexpr int kOverlapTrials = 20;
constexpr double kWignerRelTol = 0.20;
// Criterion 6
constexpr double kBandRelTol = 0.25;
constexpr double kBandOutsideMax = 20.0;
// Criterion 7
constexpr int kPiTrials = 50;
constexpr double kPiSeconds = 600.0;
// Criterion 8
constexpr int kNormTrials = 50;
constexpr double kNormSlack = 0.1;

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome xi_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(kMasterSeed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < kXiCases; ++k) {
    const int which = k % 3;
    const SpectralModel m = which == 0 ? build_wigner_model() : build_band_model(which == 1 ? 0.1 : 0.3);
    const double s = 0.1 + 0.8 * u(gen);
    const double c = 0.15 + 0.7 * u(gen), w = 0.05 + 0.2 * u(gen);
    const auto phi = bump(c - w, c + w);
    const double d = xi_direct(m, s, phi);
    const double z = xi_via_zeta(m, s, phi);
    worst = std::max(worst, std::abs(d - z) / (1.0 + std::abs(d)));
  }
  const double secs = seconds_since(t0);
  return {worst <= kXiRelTol && secs <= kXiSeconds,
          fmt("max |direct - zeta|/(1+|direct|) = %.3g over %d cases, %.1f s", worst, kXiCases, secs)};
}

Outcome analytic_values() {
  const auto w = build_wigner_model();
  const double quad = xi_direct(w, 0.5, polynomial({0.25, -1.0, 1.0}));
  const double affine = xi_direct(w, 0.5, polynomial({2.0, 3.0}));
  const double zeta = zeta_kernel(w, 0.5, 0.75);
  const double e1 = std::abs(quad - 1.0), e2 = std::abs(affine), e3 = std::abs(zeta - (std::log(2.0) - 0.5));
  return {e1 <= kAnalyticTol && e2 <= kAnalyticTol && e3 <= kAnalyticTol,
          fmt("|Xi(quadratic)-1| = %.2g, |Xi(affine)| = %.2g, |zeta-(ln2-1/2)| = %.2g", e1, e2, e3)};
}

Outcome helffer_sjostrand() {
  const auto t0 = std::chrono::steady_clock::now();
  std::vector<double> pts;
  for (int k = 0; k <= 10; ++k) pts.push_back(0.1 * k);
  const auto r = run_hs_check("bump:0.3,0.7", pts, kHsMargin);
  const double sup = r.metadata["sup_abs_err"].get<double>();
  const double gap = r.metadata["dbar_max_fd_gap"].get<double>();
  const double secs = seconds_since(t0);
  return {sup <= kHsTol && gap <= kDbarTol && secs <= kHsSeconds,
          fmt("sup reconstruction error %.3g at 11 points, dbar finite-difference gap %.3g on 10x10 grid, %.1f s",
              sup, gap, secs)};
}

Outcome measure_identities() {
  const auto model = build_wigner_model();
  const auto d = discretize(model, kIdentityN);
  const double eps = epsilon_rule(kIdentityN, 0.7);
  double mass = 0.0, moment = 0.0, defs = 0.0;
  bool weyl = true;
  std::vector<double> lam0(d.lambda.data(), d.lambda.data() + d.lambda.size());
  std::sort(lam0.begin(), lam0.end());
  const auto id = polynomial({0.0, 1.0});
  const auto phi = bump(0.35, 0.8);
  for (int t = 0; t < kIdentityTrials; ++t) {
    const auto seed = rng::derive_seed(kMasterSeed, kIdentityN, static_cast<std::uint64_t>(t));
    const auto sys = assemble(d, sample_perturbation(d, EntryLaw::gaussian, seed), eps, seed);
    const auto dec = eigendecompose(sys.d_eps);
    weyl = weyl && weyl_check(lam0, as_span(dec.values), eps, operator_norm(sys.x));
    for (std::size_t i = 0; i < kIdentityN; ++i) {
      const auto m = vector_spectral_measure(dec, i);
      mass = std::max(mass, std::abs(m.total_mass() - 1.0));
      const auto ii = static_cast<Eigen::Index>(i);
      moment = std::max(moment, std::abs(integrate_measure(m, id) - sys.d_eps(ii, ii)));
      if (i % 25 == 0) defs = std::max(defs, std::abs(integrate_measure(m, phi) - matrix_function_diagonal(dec, i, phi)));
    }
  }
  return {mass <= kMassTol && moment <= kMomentTol && defs <= kTwoDefinitionsTol && weyl,
          fmt("mass gap %.2g, first-moment gap %.2g, two-definition gap %.2g, Weyl %s (n=%zu, %d trials)", mass,
              moment, defs, weyl ? "holds" : "violated", kIdentityN, kIdentityTrials)};
}

ExperimentConfig overlap_config() {
  ExperimentConfig c;
  c.n_list = {kOverlapN};
  c.trials = kOverlapTrials;
  c.master_seed = kMasterSeed;
  return c;
}

Outcome wigner_overlaps() {
  auto c = overlap_config();
  c.centers = {0.2, 0.3, 0.7, 0.8};
  const auto r = run_thm2(c);
  double worst = 0.0;
  std::string detail = "mean S:";
  for (const auto& row : r.rows) {
    const double rel = std::abs(row[1] - row[3]) / row[3];
    worst = std::max(worst, rel);
    detail += fmt(" t=%.1f %.2f (pred %.2f)", row[0], row[1], row[3]);
  }
  return {worst <= kWignerRelTol, detail + fmt("; worst relative gap %.3f", worst)};
}

Outcome band_localization() {
  auto c = overlap_config();
  c.model.name = "band";
  c.model.ell = 0.1;
  c.centers = {0.45, 0.75};
  const auto r = run_thm2(c);
  const double inside = r.rows[0][1], outside = r.rows[1][1], pred = r.rows[0][3];
  const double rel = std::abs(inside - pred) / pred;
  return {rel <= kBandRelTol && outside <= kBandOutsideMax,
          fmt("mean S(0.45) = %.1f vs %.0f (relative gap %.3f, limit %.2f); mean S(0.75) = %.3g (limit %.0f)", inside,
              pred, rel, kBandRelTol, outside, kBandOutsideMax)};
}

Outcome pi_decay() {
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentConfig c;
  c.n_list = {500, 2000};
  c.trials = kPiTrials;
  c.master_seed = kMasterSeed;
  c.phi = "bump:0.7,0.9";
  c.z = {0.6, 2.0};
  const auto bump_report = run_thm1(c);
  const auto res_report = run_pi_decay(c);
  const double b500 = bump_report.rows[0][1], b2000 = bump_report.rows[1][1];
  const double z500 = res_report.rows[0][1], z2000 = res_report.rows[1][1];
  const double secs = seconds_since(t0);
  return {b2000 < b500 && z2000 < z500 && secs <= kPiSeconds,
          fmt("bump: %.4g (n=500) -> %.4g (n=2000); resolvent: %.4g -> %.4g; %.0f s", b500, b2000, z500, z2000, secs)};
}

Outcome operator_norm_tail() {
  ExperimentConfig c;
  c.n_list = {500, 1000};
  c.trials = kNormTrials;
  c.master_seed = kMasterSeed;
  c.deltas = {0.25, 0.5};
  const auto r = run_opnorm_tail(c);
  double f500_025 = -1, f1000_025 = -1, f_05_max = 0.0;
  for (const auto& row : r.rows) {
    if (row[1] == 0.5) f_05_max = std::max(f_05_max, row[2]);
    if (row[1] == 0.25) (row[0] == 500 ? f500_025 : f1000_025) = row[2];
  }
  return {f_05_max == 0.0 && f1000_025 <= f500_025 + kNormSlack,
          fmt("max frequency of ||X|| >= 2.5 is %.2f; frequency at 2.25: %.2f (n=500), %.2f (n=1000)", f_05_max,
              f500_025, f1000_025)};
}

std::string csv_text(const Report& r, const std::filesystem::path& dir) {
  const auto path = write_report(r, dir);
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome reproducibility() {
  const auto root = std::filesystem::temp_directory_path() / "specpert_acceptance_replay";
  std::filesystem::remove_all(root);
  ExperimentConfig base;
  base.n_list = {300};
  base.trials = 6;
  base.master_seed = kMasterSeed;
  const std::vector<std::pair<std::string, std::function<Report(const ExperimentConfig&)>>> runs{
      {"thm2", [](const ExperimentConfig& c) { return run_thm2(c); }},
      {"thm1", [](const ExperimentConfig& c) { return run_thm1(c); }},
      {"pi-decay", [](const ExperimentConfig& c) { return run_pi_decay(c); }},
      {"opnorm", [](const ExperimentConfig& c) { return run_opnorm_tail(c); }},
      {"figures", [](const ExperimentConfig& c) { return run_figures(c, FigureKind::fig2); }}};
  int identical = 0;
  std::string mismatched;
  for (const auto& [name, run] : runs) {
    std::vector<std::string> texts;
    for (int workers : {1, 3, 1}) {
      auto c = base;
      c.workers = workers;
      texts.push_back(csv_text(run(c), root / (name + std::to_string(texts.size()))));
    }
    if (texts[0] == texts[1] && texts[0] == texts[2])
      ++identical;
    else
      mismatched += " " + name;
  }
  std::filesystem::remove_all(root);
  return {identical == static_cast<int>(runs.size()),
          fmt("%d of %zu experiments byte-identical across reruns with 1, 3, 1 workers%s", identical, runs.size(),
              mismatched.empty() ? "" : (";" + std::string(" mismatch:") + mismatched).c_str())};
}

}  // namespace

int main(int, char** argv) {
  ensure_working_blas(argv);
  set_blas_threads(1);
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"Xi direct and zeta forms agree", xi_equivalence},
      {"Analytic Xi and zeta values", analytic_values},
      {"Almost-analytic reconstruction", helffer_sjostrand},
      {"Exact spectral-measure identities", measure_identities},
      {"Wigner window overlaps match |t - 1/2|^-2", wigner_overlaps},
      {"Band overlaps localize within ell", band_localization},
      {"Pi_n second moment decreases with n", pi_decay},
      {"Operator-norm tail", operator_norm_tail},
      {"Bitwise reproducibility", reproducibility}};
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("criterion %zu %s: %s -- %s [%.1f s]\n", k + 1, o.pass ? "PASS" : "FAIL", criteria[k].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
