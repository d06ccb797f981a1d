#include "magsense/cli/commands.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include "magsense/cli/csv.hpp"
#include "magsense/cli/figures.hpp"
#include "magsense/cli/svg.hpp"
#include "magsense/errors.hpp"
#include "magsense/langevin.hpp"
#include "magsense/param_file.hpp"
#include "magsense/spectra.hpp"
#include "magsense/verification.hpp"

namespace magsense::cli {

namespace fs = std::filesystem;
using constants::two_pi;

namespace {

struct GridOptions {
  std::string config;
  std::optional<double> r_m;
  std::optional<double> temperature;
  std::vector<double> reservoir;  // {r_n, phi_n}
  double omega_max = 5.0;
  std::size_t points = 1001;
  std::string out;
};

struct Resolved {
  SystemParameters params;
  std::optional<SqueezedReservoir> reservoir;
};

Resolved resolve(const GridOptions& o) {
  Resolved r;
  r.params = o.config.empty() ? baseline_parameters() : load_parameter_file(o.config);
  if (o.r_m) r.params = with_squeeze(r.params, *o.r_m);
  if (o.temperature) r.params.temperature = *o.temperature;
  if (!o.reservoir.empty()) r.reservoir = SqueezedReservoir{o.reservoir[0], o.reservoir[1]};
  validate(r.params);
  return r;
}

std::string snapshot_comment(const SystemParameters& p, const std::optional<SqueezedReservoir>& res) {
  std::string c = "params_hash=" + parameter_hash(p);
  if (res) c += " reservoir_r_n=" + format_number(res->r_n) + " reservoir_phi_n=" + format_number(res->phi_n);
  return c;
}

CsvTable budget_table(const Resolved& r, double omega_max, std::size_t points) {
  const auto dp = derived_parameters(r.params);
  const Eigen::ArrayXd grid = uniform_grid(omega_max, points);
  CsvTable t;
  t.comment = snapshot_comment(r.params, r.reservoir);
  t.columns = {"omega_over_kappa_m", "omega_rad_s", "response", "additional_noise", "thermal_noise",
               "s_out",              "s_bnoise_t2_per_hz", "sensitivity_t_per_rthz"};
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const auto b = noise_budget(dp, grid(i) * dp.kappa_m, r.reservoir);
    t.add_row({grid(i), b.omega, b.response, b.additional_noise, b.thermal_noise, b.s_out, b.s_bnoise, b.sensitivity});
  }
  return t;
}

CsvTable spectrum_table(const Resolved& r, double omega_max, std::size_t points) {
  const auto dp = derived_parameters(r.params);
  const Eigen::ArrayXd grid = uniform_grid(omega_max, points);
  const Eigen::ArrayXd omega = grid * dp.kappa_m;
  const Eigen::ArrayXd s = output_spectrum(dp, omega, r.reservoir);
  CsvTable t;
  t.comment = snapshot_comment(r.params, r.reservoir);
  t.columns = {"omega_over_kappa_m", "omega_rad_s", "s_out"};
  for (Eigen::Index i = 0; i < grid.size(); ++i) t.add_row({grid(i), omega(i), s(i)});
  return t;
}

void emit(const CsvTable& t, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << t.render();
    return;
  }
  const auto h = write_csv(path, t);
  out << path << " fnv1a64=" << hex64(h) << '\n';
}

// ---- sweep ----------------------------------------------------------------

struct Axis {
  std::string name;
  std::vector<double> values;
};

using Setter = std::function<void(Resolved&, double)>;

const std::map<std::string, Setter>& axis_setters() {
  static const std::map<std::string, Setter> setters = {
      {"r_m", [](Resolved& r, double v) { r.params.anisotropy = SqueezeAmplitude{v}; }},
      {"omega_m_hz", [](Resolved& r, double v) { r.params.anisotropy = AnisotropyCoefficient{two_pi * v}; }},
      {"omega_a_hz", [](Resolved& r, double v) { r.params.omega_a = two_pi * v; }},
      {"omega_0_hz", [](Resolved& r, double v) { r.params.omega_0 = two_pi * v; }},
      {"g0_hz", [](Resolved& r, double v) { r.params.g_0 = two_pi * v; }},
      {"mod_amplitude", [](Resolved& r, double v) { r.params.mod_amplitude = v; }},
      {"kappa_a_hz", [](Resolved& r, double v) { r.params.kappa_a = two_pi * v; }},
      {"kappa_m_hz", [](Resolved& r, double v) { r.params.kappa_m = two_pi * v; }},
      {"lambda_hz_per_t", [](Resolved& r, double v) { r.params.lambda_coupling = two_pi * v; }},
      {"temperature_k", [](Resolved& r, double v) { r.params.temperature = v; }},
      {"delta_a_hz", [](Resolved& r, double v) { r.params.delta_a = two_pi * v; }},
      {"delta_0p_hz", [](Resolved& r, double v) { r.params.delta_0p = two_pi * v; }},
      {"r_n", [](Resolved& r, double v) { r.reservoir = SqueezedReservoir{v, r.reservoir ? r.reservoir->phi_n : 0.0}; }},
      {"phi_n", [](Resolved& r, double v) { r.reservoir = SqueezedReservoir{r.reservoir ? r.reservoir->r_n : 0.0, v}; }},
  };
  return setters;
}

Axis parse_axis(const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) throw CLI::ValidationError("--axis", "expected name=v1,v2,... got '" + spec + "'");
  Axis a{spec.substr(0, eq), {}};
  if (!axis_setters().contains(a.name)) throw CLI::ValidationError("--axis", "unknown axis '" + a.name + "'");
  std::stringstream ss(spec.substr(eq + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v))
      throw CLI::ValidationError("--axis", "bad value '" + item + "' for axis " + a.name);
    a.values.push_back(v);
  }
  if (a.values.empty()) throw CLI::ValidationError("--axis", "axis " + a.name + " has no values");
  return a;
}

/// Lines "key = value" of the canonical parameter text, as a JSON object.
nlohmann::ordered_json parameter_snapshot(const SystemParameters& p) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  std::stringstream ss(format_parameters(p));
  std::string line;
  while (std::getline(ss, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    j[trim(line.substr(0, eq))] = std::stod(trim(line.substr(eq + 1)));
  }
  return j;
}

template <class Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < n;) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < std::min<std::size_t>(threads, n); ++t) pool.emplace_back(worker);
    worker();
  }
  if (failure) std::rethrow_exception(failure);
}

int run_sweep(const GridOptions& o, const std::vector<std::string>& axis_specs, const std::string& out_dir,
              unsigned threads, std::ostream& out) {
  std::vector<Axis> axes;
  for (const auto& s : axis_specs) axes.push_back(parse_axis(s));
  const Resolved base = resolve(o);

  std::size_t total = 1;
  for (const auto& a : axes) total *= a.values.size();
  std::vector<std::vector<double>> combos(total);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t rem = k;
    combos[k].resize(axes.size());
    for (std::size_t a = axes.size(); a-- > 0;) {
      combos[k][a] = axes[a].values[rem % axes[a].values.size()];
      rem /= axes[a].values.size();
    }
  }

  // Resolve and validate every point first so a bad value fails before any output.
  std::vector<Resolved> points(total, base);
  for (std::size_t k = 0; k < total; ++k) {
    for (std::size_t a = 0; a < axes.size(); ++a) axis_setters().at(axes[a].name)(points[k], combos[k][a]);
    validate(points[k].params);
  }

  std::vector<CsvTable> tables(total);
  parallel_for(total, threads, [&](std::size_t k) { tables[k] = budget_table(points[k], o.omega_max, o.points); });

  nlohmann::ordered_json manifest;
  manifest["command"] = "sweep";
  manifest["parameters"] = parameter_snapshot(base.params);
  manifest["parameters_hash"] = parameter_hash(base.params);
  manifest["sweep_axes"] = nlohmann::ordered_json::array();
  for (const auto& a : axes) manifest["sweep_axes"].push_back({{"name", a.name}, {"values", a.values}});
  manifest["grid"] = {{"omega_over_kappa_m_max", o.omega_max}, {"points", o.points}};
  manifest["outputs"] = nlohmann::ordered_json::array();

  fs::create_directories(out_dir);
  for (std::size_t k = 0; k < total; ++k) {
    std::ostringstream name;
    name << "point_" << std::setw(4) << std::setfill('0') << k << ".csv";
    const fs::path path = fs::path(out_dir) / name.str();
    const auto h = write_csv(path, tables[k]);
    nlohmann::ordered_json point = nlohmann::ordered_json::object();
    for (std::size_t a = 0; a < axes.size(); ++a) point[axes[a].name] = combos[k][a];
    manifest["outputs"].push_back({{"path", name.str()}, {"fnv1a64", hex64(h)}, {"axes", point}});
  }
  const fs::path manifest_path = fs::path(out_dir) / "manifest.json";
  std::ofstream(manifest_path, std::ios::binary) << manifest.dump(2) << '\n';
  out << "wrote " << total << " budget files and " << manifest_path.string() << '\n';
  return kExitOk;
}

// ---- verify ---------------------------------------------------------------

struct VerifyOptions {
  std::string config;
  std::uint64_t seed = 42;
  double tolerance = 0.10;
  double gain_tolerance = 0.15;
  std::size_t segments = 256;
  std::vector<std::string> checks{"routes", "psd", "gain", "covariance"};
  std::string dump_trace;
};

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

int run_verify(const VerifyOptions& v, unsigned threads, std::ostream& out) {
  const SystemParameters params = v.config.empty() ? baseline_parameters() : load_parameter_file(v.config);
  validate(params);
  const auto dp0 = derived_parameters(params);
  require_backaction_evading(dp0, "verify");
  const OracleOptions oracle{v.seed, threads, 0.09};
  const auto wants = [&](std::string_view c) { return std::find(v.checks.begin(), v.checks.end(), c) != v.checks.end(); };
  bool ok = true;

  out << std::setprecision(6);
  out << "params_hash=" << parameter_hash(params) << " seed=" << v.seed << " rng=" << kRngAlgorithm
      << " rng_stream_version=" << kRngStreamVersion << " threads=" << threads << '\n';

  if (wants("routes")) {
    const auto d = route_discrepancy(dp0);
    const bool pass = std::abs(d.k4_authoritative_at_zero - 1.0) < 1e-9 && d.k1_max_relative_difference <= 1e-9 &&
                      d.k2_k3_max_ratio < 1e-12;
    out << "[routes] |K4(0)| drift-matrix route = " << std::setprecision(12) << d.k4_authoritative_at_zero
        << ", rational closed form = " << d.k4_closed_form_at_zero << std::setprecision(6)
        << " (closed form K4 carries an extra -2; the drift-matrix route is used)\n";
    out << "[routes] max | |k1| route difference | / |k1| = " << d.k1_max_relative_difference
        << ", max(|k2|,|k3|)/|k1| = " << d.k2_k3_max_ratio << "  " << verdict(pass) << '\n';
    ok &= pass;
  }

  if (wants("psd")) {
    PsdCheckOptions po;
    po.tolerance = v.tolerance;
    po.segments = v.segments;
    const double r_ref = std::max(dp0.r_m, 1.5);
    struct Case {
      std::string name;
      DerivedParameters dp;
      std::optional<SqueezedReservoir> reservoir;
    };
    const std::vector<Case> cases = {
        {"r_m=0", derived_parameters(with_squeeze(params, 0.0)), std::nullopt},
        {"r_m=" + format_number(r_ref), derived_parameters(with_squeeze(params, r_ref)), std::nullopt},
        {"r_m=" + format_number(r_ref) + " nulling reservoir", derived_parameters(with_squeeze(params, r_ref)),
         SqueezedReservoir{r_ref, std::numbers::pi}},
    };
    for (const auto& c : cases) {
      const auto cmp = compare_output_psd(c.dp, c.reservoir, po, oracle);
      out << "[psd] " << c.name << ": segments=" << cmp.segments << " max relative error=" << cmp.max_relative_error
          << " (tolerance " << po.tolerance << ")  " << verdict(cmp.passed) << '\n';
      ok &= cmp.passed;
    }
  }

  if (wants("gain")) {
    GainCheckOptions go;
    go.tolerance = v.gain_tolerance;
    for (double f : {0.2, 0.5, 1.0}) {
      const auto g = compare_gain(dp0, f * dp0.kappa_m, go, oracle);
      out << "[gain] delta=" << f << " kappa_m: measured=" << g.measured << " analytic=" << g.analytic
          << " relative error=" << g.relative_error << "  " << verdict(g.passed) << '\n';
      ok &= g.passed;
    }
  }

  if (wants("covariance")) {
    DerivedParameters decoupled = dp0;
    decoupled.g_prime = 0.0;
    const std::vector<std::pair<std::string, DerivedParameters>> cases = {{"decoupled", decoupled},
                                                                          {"coupled", dp0}};
    for (const auto& [name, dp] : cases) {
      const auto c = compare_covariance(dp, std::nullopt, CovarianceCheckOptions{}, oracle);
      out << "[covariance] " << name << ": max |sim - lyapunov| / SE = " << c.max_sigma << "  " << verdict(c.passed)
          << '\n';
      ok &= c.passed;
    }
  }

  if (!v.dump_trace.empty()) {
    const auto cfg = oracle_config(dp0, 0.05, 4096, 1, oracle);
    const auto trace = simulate(dp0, std::nullopt, std::nullopt, cfg, 0);
    write_trace_csv(v.dump_trace, trace, dp0, cfg);
    out << "trace written to " << v.dump_trace << '\n';
  }

  out << (ok ? "verify: PASS" : "verify: FAIL") << '\n';
  return ok ? kExitOk : kExitVerificationFailed;
}

// ---- reproduce ------------------------------------------------------------

int run_reproduce(const std::string& figure, const std::string& config, const std::string& out_dir,
                  std::size_t points, std::ostream& out) {
  const SystemParameters base = config.empty() ? baseline_parameters() : load_parameter_file(config);
  validate(base);
  for (const auto& d : figure_datasets(figure, base, points)) {
    const fs::path csv = fs::path(out_dir) / (d.stem + ".csv");
    const auto h = write_csv(csv, d.table);
    write_svg(fs::path(out_dir) / (d.stem + ".svg"), d.plot);
    out << csv.string() << " fnv1a64=" << hex64(h) << '\n';
  }
  return kExitOk;
}

void add_grid_options(CLI::App* cmd, GridOptions& o) {
  cmd->add_option("--config", o.config, "parameter file (default: built-in reference point)");
  cmd->add_option("--rm", o.r_m, "override squeeze amplitude r_m")->check(CLI::NonNegativeNumber);
  cmd->add_option("--temp", o.temperature, "override temperature (K)")->check(CLI::NonNegativeNumber);
  cmd->add_option("--reservoir", o.reservoir, "squeezed reservoir r_n,phi_n (phi in rad)")
      ->delimiter(',')
      ->expected(2);
  cmd->add_option("--wmax", o.omega_max, "grid upper edge in units of kappa_m")->check(CLI::PositiveNumber);
  cmd->add_option("--points", o.points, "grid points")->check(CLI::Range(2, 10000000));
}

}  // namespace

unsigned resolve_threads(int requested) {
  if (requested > 0) return unsigned(requested);
  if (const char* env = std::getenv("MAGNON_SENSE_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && n > 0) return unsigned(n);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Squeezed-magnon weak-field sensing: noise budgets, spectra and oracle checks", "magsense"};
  app.require_subcommand(1, 1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads (default: MAGNON_SENSE_THREADS or all cores)")
      ->check(CLI::NonNegativeNumber);

  GridOptions budget_opts, spectrum_opts, sweep_opts;
  auto* budget = app.add_subcommand("budget", "noise budget over a frequency grid");
  add_grid_options(budget, budget_opts);
  budget->add_option("--out", budget_opts.out, "CSV path (default: stdout)");

  auto* spectrum = app.add_subcommand("spectrum", "output noise spectrum over a frequency grid");
  add_grid_options(spectrum, spectrum_opts);
  spectrum->add_option("--out", spectrum_opts.out, "CSV path (default: stdout)");

  auto* sweep = app.add_subcommand("sweep", "noise budgets over a parameter grid");
  add_grid_options(sweep, sweep_opts);
  std::vector<std::string> axis_specs;
  std::string sweep_dir = "sweep";
  sweep->add_option("--axis", axis_specs, "name=v1,v2,...")->required()->allow_extra_args(false);
  sweep->add_option("--out-dir", sweep_dir, "output directory");

  VerifyOptions verify_opts;
  auto* verify = app.add_subcommand("verify", "compare analytic solvers with the Langevin oracle");
  verify->add_option("--config", verify_opts.config, "parameter file");
  verify->add_option("--seed", verify_opts.seed, "oracle seed");
  verify->add_option("--tolerance", verify_opts.tolerance, "PSD relative tolerance")->check(CLI::PositiveNumber);
  verify->add_option("--gain-tolerance", verify_opts.gain_tolerance, "gain relative tolerance")
      ->check(CLI::PositiveNumber);
  verify->add_option("--segments", verify_opts.segments, "Welch segments per PSD check")->check(CLI::Range(1, 1 << 20));
  verify->add_option("--checks", verify_opts.checks, "subset of routes,psd,gain,covariance")
      ->delimiter(',')
      ->check(CLI::IsMember({"routes", "psd", "gain", "covariance"}));
  verify->add_option("--dump-trace", verify_opts.dump_trace, "write one baseline trajectory as CSV");
  verify->add_option("--threads", threads, "worker threads")->check(CLI::NonNegativeNumber);

  std::string figure, reproduce_config, reproduce_dir = "figures";
  std::size_t reproduce_points = 1001;
  auto* reproduce = app.add_subcommand("reproduce", "figure datasets (CSV + SVG)");
  reproduce->add_option("figure", figure, "fig3 ... fig8")
      ->required()
      ->check(CLI::IsMember({"fig3", "fig4", "fig5", "fig6", "fig7", "fig8"}));
  reproduce->add_option("--config", reproduce_config, "parameter file (default: reference point)");
  reproduce->add_option("--out-dir", reproduce_dir, "output directory");
  reproduce->add_option("--points", reproduce_points, "frequency grid points")->check(CLI::Range(2, 10000000));

  std::vector<std::string> storage{"magsense"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& s : storage) argv.push_back(s.c_str());

  try {
    app.parse(int(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const unsigned n_threads = resolve_threads(threads);
    if (*budget) {
      emit(budget_table(resolve(budget_opts), budget_opts.omega_max, budget_opts.points), budget_opts.out, out);
      return kExitOk;
    }
    if (*spectrum) {
      emit(spectrum_table(resolve(spectrum_opts), spectrum_opts.omega_max, spectrum_opts.points), spectrum_opts.out,
           out);
      return kExitOk;
    }
    if (*sweep) return run_sweep(sweep_opts, axis_specs, sweep_dir, n_threads, out);
    if (*verify) return run_verify(verify_opts, n_threads, out);
    if (*reproduce) return run_reproduce(figure, reproduce_config, reproduce_dir, reproduce_points, out);
  } catch (const CLI::ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParameterError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitBadParameters;
  } catch (const ConfigError& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitBadParameters;
  } catch (const DomainError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return kExitBadParameters;
  } catch (const PreconditionError& e) {
    err << "precondition failed: " << e.what() << '\n';
    return kExitBadParameters;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

int run_command(int argc, const char* const* argv) {
  std::vector<std::string> args(argv + (argc > 0 ? 1 : 0), argv + argc);
  return run_command(args, std::cout, std::cerr);
}

}  // namespace magsense::cli
