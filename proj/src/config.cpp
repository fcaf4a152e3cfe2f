#include "specpert/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include <CLI11.hpp>

#include "specpert/errors.hpp"
#include "specpert/smoothfn.hpp"

namespace specpert {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

[[noreturn]] void type_error(const std::string& key, const char* expected, const std::string& value) {
  throw ValidationError("key '" + key + "': expected " + expected + ", got '" + value + "'");
}

double to_real(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  errno = 0;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0' || errno == ERANGE || !std::isfinite(d)) type_error(key, "a finite real number", value);
  return d;
}

long long to_integer(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  errno = 0;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || errno == ERANGE) type_error(key, "an integer", value);
  return i;
}

std::uint64_t to_u64(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  char* end = nullptr;
  errno = 0;
  const unsigned long long u = std::strtoull(v.c_str(), &end, 0);
  if (v.empty() || v[0] == '-' || *end != '\0' || errno == ERANGE) type_error(key, "an unsigned 64-bit integer", value);
  return u;
}

bool to_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  type_error(key, "a boolean (true/false)", value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_real_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const auto& item : split_list(value)) out.push_back(to_real(key, item));
  return out;
}

std::vector<std::size_t> to_size_list(const std::string& key, const std::string& value) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(value)) {
    const long long v = to_integer(key, item);
    if (v < 1) throw ValidationError("key '" + key + "': matrix sizes must be at least 1");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) type_error(key, "a comma-separated list of sizes", value);
  return out;
}

// Round-trip exact formatting for echoed values.
std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ',';
    if constexpr (std::is_floating_point_v<T>)
      out += exact(v[k]);
    else
      out += std::to_string(v[k]);
  }
  return out;
}

struct Setting {
  const char* key;
  const char* help;
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

const std::vector<Setting>& settings() {
  static const std::vector<Setting> table = {
      {"model", "perturbation model: wigner, band or table",
       [](RunConfig& c, const std::string&, const std::string& v) { c.exp.model.name = trim(v); },
       [](const RunConfig& c) { return c.exp.model.name; }},
      {"ell", "relative band width for the band model, in (0, 1]",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.model.ell = to_real(k, v); },
       [](const RunConfig& c) { return exact(c.exp.model.ell); }},
      {"table", "tabulated model file (model = table)",
       [](RunConfig& c, const std::string&, const std::string& v) { c.exp.model.table_path = trim(v); },
       [](const RunConfig& c) { return c.exp.model.table_path; }},
      {"table-eta", "declared discretization error of the tabulated model",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.model.table_eta = to_real(k, v); },
       [](const RunConfig& c) { return exact(c.exp.model.table_eta); }},
      {"n", "matrix size(s), comma separated",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.n_list = to_size_list(k, v); },
       [](const RunConfig& c) { return join(c.exp.n_list); }},
      {"gamma", "eps = n^(-gamma); must exceed 1/2",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.gamma = to_real(k, v); },
       [](const RunConfig& c) { return exact(c.exp.gamma); }},
      {"x0", "basis vector position in [0, 1]",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.x0 = to_real(k, v); },
       [](const RunConfig& c) { return exact(c.exp.x0); }},
      {"trials", "Monte Carlo trials per size",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long long t = to_integer(k, v);
         if (t < 1 || t > 1000000) throw ValidationError("key 'trials': must lie in [1, 1000000]");
         c.exp.trials = static_cast<int>(t);
       },
       [](const RunConfig& c) { return std::to_string(c.exp.trials); }},
      {"seed", "master seed (64-bit)",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.master_seed = to_u64(k, v); },
       [](const RunConfig& c) { return std::to_string(c.exp.master_seed); }},
      {"window-c", "window half-width alpha = c n^(-a): constant c",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.window_c = to_real(k, v); },
       [](const RunConfig& c) { return exact(c.exp.window_c); }},
      {"window-a", "window half-width alpha = c n^(-a): exponent a",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.window_a = to_real(k, v); },
       [](const RunConfig& c) { return exact(c.exp.window_a); }},
      {"ma-width", "moving-average width for figures (0 = n^(-1/2))",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.ma_width = to_real(k, v); },
       [](const RunConfig& c) { return exact(c.exp.ma_width); }},
      {"law", "entry distribution: gaussian, rademacher, uniform",
       [](RunConfig& c, const std::string&, const std::string& v) { c.exp.law = parse_entry_law(trim(v)); },
       [](const RunConfig& c) { return to_string(c.exp.law); }},
      {"complex", "complex Hermitian perturbation (true/false)",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.complex_entries = to_bool(k, v); },
       [](const RunConfig& c) { return std::string(c.exp.complex_entries ? "true" : "false"); }},
      {"workers", "worker threads for trials (does not change results)",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long long w = to_integer(k, v);
         if (w < 1 || w > 1024) throw ValidationError("key 'workers': must lie in [1, 1024]");
         c.exp.workers = static_cast<int>(w);
       },
       [](const RunConfig& c) { return std::to_string(c.exp.workers); }},
      {"centers", "thm2 window centers, comma separated (empty = default grid)",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.centers = to_real_list(k, v); },
       [](const RunConfig& c) { return join(c.exp.centers); }},
      {"check-invariants", "thm2: track Weyl and sandwich invariants (true/false)",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.check_invariants = to_bool(k, v); },
       [](const RunConfig& c) { return std::string(c.exp.check_invariants ? "true" : "false"); }},
      {"phi", "thm1 test function preset (bump:a,b | poly:c0,c1,.. | window-:c,a,w | window+:c,a,w | psi)",
       [](RunConfig& c, const std::string&, const std::string& v) { c.exp.phi = trim(v); },
       [](const RunConfig& c) { return c.exp.phi; }},
      {"z", "pi-decay resolvent point as re,im",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const auto parts = to_real_list(k, v);
         if (parts.size() != 2) type_error(k, "two numbers re,im", v);
         c.exp.z = {parts[0], parts[1]};
       },
       [](const RunConfig& c) { return exact(c.exp.z.real()) + "," + exact(c.exp.z.imag()); }},
      {"deltas", "opnorm thresholds 2 + delta, comma separated",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.deltas = to_real_list(k, v); },
       [](const RunConfig& c) { return join(c.exp.deltas); }},
      {"which", "figures: fig1 (wigner) or fig2 (band)",
       [](RunConfig& c, const std::string&, const std::string& v) { c.which = trim(v); },
       [](const RunConfig& c) { return c.which; }},
      {"function", "xi and hs-check: test function preset",
       [](RunConfig& c, const std::string&, const std::string& v) { c.xi_phi = trim(v); },
       [](const RunConfig& c) { return c.xi_phi; }},
      {"s", "xi: evaluation points s, comma separated",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.s_values = to_real_list(k, v); },
       [](const RunConfig& c) { return join(c.s_values); }},
      {"points", "hs-check: reconstruction points, comma separated",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.hs_points = to_real_list(k, v); },
       [](const RunConfig& c) { return join(c.hs_points); }},
      {"margin", "hs-check: cutoff height in Im z",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.hs_margin = to_real(k, v); },
       [](const RunConfig& c) { return exact(c.hs_margin); }},
      {"quadrature", "quadrature method: adaptive or composite",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const std::string m = trim(v);
         if (m == "adaptive")
           c.exp.quadrature.method = QuadratureMethod::adaptive;
         else if (m == "composite")
           c.exp.quadrature.method = QuadratureMethod::composite;
         else
           type_error(k, "adaptive or composite", v);
       },
       [](const RunConfig& c) {
         return std::string(c.exp.quadrature.method == QuadratureMethod::adaptive ? "adaptive" : "composite");
       }},
      {"abs-tol", "quadrature absolute tolerance",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.quadrature.abs_tol = to_real(k, v); },
       [](const RunConfig& c) { return exact(c.exp.quadrature.abs_tol); }},
      {"rel-tol", "quadrature relative tolerance",
       [](RunConfig& c, const std::string& k, const std::string& v) { c.exp.quadrature.rel_tol = to_real(k, v); },
       [](const RunConfig& c) { return exact(c.exp.quadrature.rel_tol); }},
      {"max-subdivisions", "quadrature subdivision budget",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         const long long m = to_integer(k, v);
         if (m < 1 || m > 100000000) throw ValidationError("key 'max-subdivisions': must lie in [1, 1e8]");
         c.exp.quadrature.max_subdivisions = static_cast<int>(m);
       },
       [](const RunConfig& c) { return std::to_string(c.exp.quadrature.max_subdivisions); }},
      {"singularity-delta", "Taylor-switch half-width around t = s, as a fraction of the support length",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         c.exp.quadrature.singularity_delta = to_real(k, v);
       },
       [](const RunConfig& c) { return exact(c.exp.quadrature.singularity_delta); }},
      {"out", "output directory",
       [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = trim(v); },
       [](const RunConfig& c) { return c.output_dir.string(); }},
      {"verbosity", "quiet, info or debug",
       [](RunConfig& c, const std::string&, const std::string& v) { c.verbosity = trim(v); },
       [](const RunConfig& c) { return c.verbosity; }},
  };
  return table;
}

const Setting* find_setting(const std::string& key) {
  const std::string k = normalize_key(key);
  for (const auto& s : settings())
    if (k == s.key) return &s;
  return nullptr;
}

void apply_subcommand_defaults(RunConfig& c) {
  auto& e = c.exp;
  if (c.subcommand == "figures") {
    e.n_list = {10000};
    e.trials = 1;
  } else if (c.subcommand == "thm2") {
    e.n_list = {2000};
    e.trials = 20;
  } else if (c.subcommand == "thm1") {
    e.n_list = {500, 1000, 2000};
    e.trials = 50;
  } else if (c.subcommand == "pi-decay") {
    e.n_list = {500, 2000};
    e.trials = 50;
  } else if (c.subcommand == "opnorm") {
    e.n_list = {500, 1000};
    e.trials = 50;
  } else if (c.subcommand == "sample") {
    e.n_list = {1000};
    e.trials = 1;
  }
}

const char* subcommand_help(const std::string& name) {
  if (name == "figures") return "moving-average overlap curves with the limit prediction (fig1 wigner, fig2 band)";
  if (name == "thm1") return "mean |Pi_n(phi)|^2 against the error-bound shape, per n";
  if (name == "thm2") return "window-averaged overlaps S(t) against the limit prediction";
  if (name == "pi-decay") return "mean |Pi_n(phi_z)|^2 for the resolvent test function, per n";
  if (name == "opnorm") return "frequency of ||X_n|| >= 2 + delta, per n and delta";
  if (name == "xi") return "Xi_s(phi) by the direct and the zeta forms";
  if (name == "hs-check") return "almost-analytic reconstruction of a test function";
  if (name == "sample") return "dump one sampled perturbation and the spectral measure of e_i";
  return "";
}

}  // namespace

std::map<std::string, std::string> RunConfig::echo() const {
  std::map<std::string, std::string> out;
  for (const auto& s : settings()) out[s.key] = s.get(*this);
  return out;
}

const std::vector<std::string>& subcommand_names() {
  static const std::vector<std::string> names = {"figures", "thm1", "thm2", "pi-decay",
                                                 "opnorm",  "xi",   "hs-check", "sample"};
  return names;
}

void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  const Setting* s = find_setting(key);
  if (!s) throw ValidationError("unknown key '" + key + "'");
  s->set(cfg, s->key, value);
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path.string() + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    try {
      apply_setting(cfg, key, trim(line.substr(eq + 1)));
    } catch (const ValidationError& e) {
      throw ValidationError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

void validate(const RunConfig& cfg) {
  const auto& names = subcommand_names();
  if (std::find(names.begin(), names.end(), cfg.subcommand) == names.end())
    throw ValidationError("unknown subcommand '" + cfg.subcommand + "'");
  if (cfg.verbosity != "quiet" && cfg.verbosity != "info" && cfg.verbosity != "debug")
    throw ValidationError("key 'verbosity': expected quiet, info or debug");
  if (cfg.output_dir.empty()) throw ValidationError("key 'out': output directory must not be empty");
  const std::string& sub = cfg.subcommand;
  if (sub == "xi") {
    cfg.exp.quadrature.validate();
    if (cfg.exp.model.name == "table") throw ValidationError("xi needs a limit model (wigner or band)");
    if (cfg.s_values.empty()) throw ValidationError("key 's': at least one evaluation point is required");
    (void)parse_preset(cfg.xi_phi);
    ExperimentConfig probe = cfg.exp;
    probe.validate();
    return;
  }
  if (sub == "hs-check") {
    if (cfg.hs_points.empty()) throw ValidationError("key 'points': at least one point is required");
    if (!(cfg.hs_margin > 0.0)) throw ValidationError("key 'margin': the cutoff margin must be positive");
    (void)parse_preset(cfg.xi_phi);
    return;
  }
  cfg.exp.validate();
  if (sub == "figures") (void)parse_figure_kind(cfg.which);
  if ((sub == "thm1" || sub == "pi-decay") && cfg.exp.model.name == "table")
    throw ValidationError(sub + " needs a limit model (wigner or band) to evaluate Xi");
  if (sub == "thm1") (void)parse_preset(cfg.exp.phi);
}

RunConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app{"specpert: eigenvector perturbation experiments for D_n + eps X_n"};
  app.require_subcommand(1);
  app.fallthrough(false);

  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  std::string config_path;
  std::vector<CLI::App*> subs;
  for (const auto& name : subcommand_names()) {
    CLI::App* sc = app.add_subcommand(name, subcommand_help(name));
    sc->add_option("--config", config_path, "flat key = value config file; flags override it");
    for (const auto& s : settings()) {
      const std::string key = s.key;
      options[name + "/" + key] = sc->add_option("--" + key, values[key], s.help);
    }
    subs.push_back(sc);
  }

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  RunConfig cfg;
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    std::ostringstream out;
    app.exit(e, out, out);
    cfg.help_text = out.str();
    if (cfg.help_text.empty()) cfg.help_text = app.help();
    return cfg;
  } catch (const CLI::ParseError& e) {
    throw ValidationError(e.what());
  }

  for (auto* sc : subs)
    if (sc->parsed()) cfg.subcommand = sc->get_name();
  apply_subcommand_defaults(cfg);
  if (!config_path.empty()) apply_config_file(cfg, config_path);
  for (const auto& s : settings()) {
    const auto* opt = options.at(cfg.subcommand + "/" + s.key);
    if (opt->count() > 0) apply_setting(cfg, s.key, values[s.key]);
  }
  validate(cfg);
  return cfg;
}

}  // namespace specpert
