// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "magsense/cli/commands.hpp"
#include "magsense/param_file.hpp"
#include "magsense/spectra.hpp"
#include "magsense/transfer.hpp"
#include "magsense/verification.hpp"

using namespace magsense;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DerivedParameters dp_at(double r_m, double temperature = 0.05) {
  auto p = with_squeeze(baseline_parameters(), r_m);
  p.temperature = temperature;
  return derived_parameters(p);
}

const OracleOptions& oracle() {
  static const OracleOptions o{42, cli::resolve_threads(0), 0.09};
  return o;
}

Outcome backaction_evasion() {
  double worst = 0.0;
  for (double r : {0.0, 1.5}) {
    const auto dp = dp_at(r);
    for (int i = 0; i <= 1000; ++i) {
      const double w = 10.0 * dp.kappa_m * i / 1000.0;
      for (const auto& k : {frequency_response(dp, w), closed_form_response(dp, w)}) {
        worst = std::max({worst, std::abs(k.k2) / std::abs(k.k1), std::abs(k.k3) / std::abs(k.k1)});
      }
    }
  }
  return {worst < 1e-12, fmt("max(|k2|,|k3|)/|k1| = %.3g over both routes, r_m in {0, 1.5}", worst)};
}

Outcome thermal_suppression() {
  const double n0 = noise_budget(dp_at(0.0), 0.0).thermal_noise;
  double worst = 0.0, ratio15 = 0.0;
  for (double r : {0.25, 0.5, 1.0, 1.5}) {
    const double ratio = noise_budget(dp_at(r), 0.0).thermal_noise / n0;
    worst = std::max(worst, std::abs(ratio / std::exp(-4.0 * r) - 1.0));
    if (r == 1.5) ratio15 = ratio;
  }
  return {worst < 4 * std::numeric_limits<double>::epsilon(),
          fmt("N_mth(1.5)/N_mth(0) = %.12e (exp(-6) = %.12e), worst rel error %.2g", ratio15, std::exp(-6.0), worst)};
}

Outcome kappa_a_invariance() {
  const auto base = with_squeeze(baseline_parameters(), 1.5);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double f : {0.5, 1.0, 2.0}) {
    auto p = base;
    p.kappa_a = f * base.kappa_a;
    const auto dp = derived_parameters(p);
    for (double x : {0.0, 1.0, 5.0}) {
      const double n = noise_budget(dp, x * dp.kappa_m).thermal_noise;
      lo = std::min(lo, n);
      hi = std::max(hi, n);
    }
  }
  const double spread = (hi - lo) / hi;
  return {spread <= std::numeric_limits<double>::epsilon(), fmt("N_mth spread across kappa_a {0.5,1,2}x: %.3g", spread)};
}

Outcome coupling_trends() {
  auto p = with_squeeze(baseline_parameters(), 1.5);
  p.kappa_a = 0.2 * p.kappa_m;
  bool ok = true;
  double prev_a = 0.0, prev_n = std::numeric_limits<double>::infinity();
  double a_first = 0, a_last = 0, n_first = 0, n_last = 0;
  const int steps = 40;
  for (int i = 0; i <= steps; ++i) {
    auto q = p;
    q.g_0 = p.g_0 * 0.5 * std::pow(4.0, double(i) / steps);  // g' spans a factor 4
    const auto b = noise_budget(derived_parameters(q), 0.0);
    ok &= b.response > prev_a && b.additional_noise < prev_n;
    prev_a = b.response;
    prev_n = b.additional_noise;
    if (i == 0) a_first = b.response, n_first = b.additional_noise;
    a_last = b.response;
    n_last = b.additional_noise;
  }
  return {ok, fmt("A_m(0): %.4g -> %.4g increasing, N_qn(0): %.4g -> %.4g decreasing", a_first, a_last, n_first,
                  n_last)};
}

Outcome sensitivity_improvement() {
  const double y0 = noise_budget(dp_at(0.0, 280.0), 0.0).sensitivity;
  const double y15 = noise_budget(dp_at(1.5, 280.0), 0.0).sensitivity;
  const double ratio = y15 / y0;
  return {std::abs(ratio / std::exp(-3.0) - 1.0) <= 0.01,
          fmt("Y(0) = %.6g, Y(1.5) = %.6g T/rtHz, ratio %.10f vs exp(-3) = %.10f", y0, y15, ratio, std::exp(-3.0))};
}

Outcome reservoir_nulling() {
  double worst_null = 0.0;
  for (double r : {0.5, 1.0, 1.5}) {
    const auto o = reservoir_occupations(r, std::numbers::pi, r);
    worst_null = std::max({worst_null, std::abs(o.n_e), std::abs(o.m_e)});
  }
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rr(0.0, 2.0), ph(-std::numbers::pi, std::numbers::pi);
  double worst_rel = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const auto o = reservoir_occupations(rr(rng), ph(rng), rr(rng));
    const double rhs = o.n_e * (o.n_e + 1.0);
    const double lhs = std::norm(o.m_e);
    if (rhs > 0.0) worst_rel = std::max(worst_rel, std::abs(lhs - rhs) / rhs);
    else worst_rel = std::max(worst_rel, lhs > 1e-24 ? 1.0 : 0.0);
  }
  return {worst_null < 1e-12 && worst_rel <= 1e-9,
          fmt("max(N_e, |M_e|) at nulling = %.3g; |M_e|^2 vs N_e(N_e+1) worst rel %.3g over 1000 draws", worst_null,
              worst_rel)};
}

Outcome ft_level() {
  const double y = approx_suppressed_sensitivity(dp_at(1.5, 280.0), 0.0);
  return {y >= 1e-15 && y <= 1e-13, fmt("approx suppressed Y(0) = %.6g T/rtHz at 280 K, r_m = 1.5", y)};
}

Outcome psd_equivalence() {
  struct Case {
    const char* name;
    double r_m;
    bool reservoir;
  };
  bool ok = true;
  std::string detail;
  for (const Case c : {Case{"r_m=0", 0.0, false}, Case{"r_m=1.5", 1.5, false}, Case{"r_m=1.5+reservoir", 1.5, true}}) {
    std::optional<SqueezedReservoir> res;
    if (c.reservoir) res = SqueezedReservoir{c.r_m, std::numbers::pi};
    const auto cmp = compare_output_psd(dp_at(c.r_m), res, PsdCheckOptions{}, oracle());
    ok &= cmp.passed;
    detail += fmt("%s%s: %.2f%% (%zu seg)", detail.empty() ? "" : "; ", c.name, 100 * cmp.max_relative_error,
                  cmp.segments);
  }
  return {ok, "max rel error over [0.1, 5] kappa_m: " + detail};
}

Outcome gain_equivalence() {
  bool ok = true;
  std::string detail;
  for (double r : {0.0, 1.5}) {
    const auto dp = dp_at(r);
    for (double f : {0.2, 0.5, 1.0}) {
      const auto g = compare_gain(dp, f * dp.kappa_m, GainCheckOptions{}, oracle());
      ok &= g.passed;
      detail += fmt("%sr_m=%g d=%g: %.2f%%", detail.empty() ? "" : "; ", r, f, 100 * g.relative_error);
    }
  }
  return {ok, "tone gain vs A_m(delta): " + detail};
}

Outcome covariance_check() {
  auto decoupled = dp_at(1.5, 0.0);
  decoupled.g_prime = 0.0;
  const auto d = compare_covariance(decoupled, std::nullopt, CovarianceCheckOptions{}, oracle());
  const auto c = compare_covariance(dp_at(1.0), std::nullopt, CovarianceCheckOptions{}, oracle());
  return {d.passed && c.passed,
          fmt("max |sim - Lyapunov|/SE: decoupled %.2f, coupled %.2f (limit 3)", d.max_sigma, c.max_sigma)};
}

Outcome discrepancy_report() {
  std::ostringstream out, err;
  const int code = cli::run_command({"verify", "--checks", "routes"}, out, err);
  const auto d = route_discrepancy(dp_at(0.0));
  const std::string report = out.str();
  const bool shown = report.find("drift-matrix route = 1,") != std::string::npos &&
                     report.find("rational closed form = 3 ") != std::string::npos;
  const bool ok = code == 0 && shown && std::abs(d.k4_authoritative_at_zero - 1.0) < 1e-12 &&
                  std::abs(d.k4_closed_form_at_zero - 3.0) < 1e-12 && d.k1_max_relative_difference <= 1e-9;
  return {ok, fmt("|K4(0)| = %.12g (drift) vs %.12g (closed form); |k1| route difference %.3g; report %s",
                  d.k4_authoritative_at_zero, d.k4_closed_form_at_zero, d.k1_max_relative_difference,
                  shown ? "shows both" : "incomplete")};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"1 backaction evasion", backaction_evasion},
      {"2 thermal-noise suppression", thermal_suppression},
      {"3 kappa_a invariance of thermal noise", kappa_a_invariance},
      {"4 response/additional-noise trends in g'", coupling_trends},
      {"5 sensitivity improvement at 280 K", sensitivity_improvement},
      {"6 reservoir nulling", reservoir_nulling},
      {"7 fT-level approximate sensitivity", ft_level},
      {"8 oracle PSD equivalence", psd_equivalence},
      {"9 oracle gain equivalence", gain_equivalence},
      {"10 Lyapunov covariance", covariance_check},
      {"11 transfer-route discrepancy report", discrepancy_report},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s  %-42s %s  [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += !o.pass;
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
