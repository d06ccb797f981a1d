#include "magsense/cli/figures.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "magsense/param_file.hpp"
#include "magsense/spectra.hpp"

namespace magsense::cli {

namespace {

using constants::two_pi;

std::string label(const char* name, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s=%g", name, value);
  return buf;
}

/// One column per curve, first column the shared x axis.
FigureDataset curves(std::string stem, std::string comment, std::string x_name, const Eigen::ArrayXd& x,
                     const std::vector<std::string>& names, const std::vector<Eigen::ArrayXd>& ys,
                     std::string title, std::string y_label, bool log_y) {
  FigureDataset d;
  d.stem = std::move(stem);
  d.table.comment = std::move(comment);
  d.table.columns.push_back(x_name);
  for (const auto& n : names) d.table.columns.push_back(n);
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    std::vector<double> row{x(i)};
    for (const auto& y : ys) row.push_back(y(i));
    d.table.add_row(std::move(row));
  }
  d.plot.title = std::move(title);
  d.plot.x_label = std::move(x_name);
  d.plot.y_label = std::move(y_label);
  d.plot.log_y = log_y;
  for (std::size_t k = 0; k < names.size(); ++k) {
    Series s{names[k], {x.data(), x.data() + x.size()}, {ys[k].data(), ys[k].data() + ys[k].size()}};
    d.plot.series.push_back(std::move(s));
  }
  return d;
}

struct BudgetColumns {
  Eigen::ArrayXd response, additional, thermal, sensitivity;
};

BudgetColumns budget_columns(const SystemParameters& params, const Eigen::ArrayXd& normalized) {
  const auto dp = derived_parameters(params);
  BudgetColumns c{Eigen::ArrayXd(normalized.size()), Eigen::ArrayXd(normalized.size()),
                  Eigen::ArrayXd(normalized.size()), Eigen::ArrayXd(normalized.size())};
  for (Eigen::Index i = 0; i < normalized.size(); ++i) {
    const auto b = noise_budget(dp, normalized(i) * dp.kappa_m);
    c.response(i) = b.response;
    c.additional(i) = b.additional_noise;
    c.thermal(i) = b.thermal_noise;
    c.sensitivity(i) = b.sensitivity;
  }
  return c;
}

std::vector<FigureDataset> budget_triplet(const std::string& fig, const std::string& comment,
                                          const Eigen::ArrayXd& grid, const std::vector<std::string>& names,
                                          const std::vector<SystemParameters>& variants, bool with_thermal) {
  std::vector<Eigen::ArrayXd> resp, add, therm;
  for (const auto& p : variants) {
    auto c = budget_columns(p, grid);
    resp.push_back(std::move(c.response));
    add.push_back(std::move(c.additional));
    therm.push_back(std::move(c.thermal));
  }
  std::vector<FigureDataset> out;
  out.push_back(curves(fig + "_response", comment, "omega_over_kappa_m", grid, names, resp,
                       fig + ": response A_m", "A_m", true));
  out.push_back(curves(fig + "_additional_noise", comment, "omega_over_kappa_m", grid, names, add,
                       fig + ": additional noise N_qn", "N_qn", true));
  if (with_thermal) {
    out.push_back(curves(fig + "_thermal_noise", comment, "omega_over_kappa_m", grid, names, therm,
                         fig + ": thermal noise N_mth", "N_mth", true));
  }
  return out;
}

}  // namespace

Eigen::ArrayXd uniform_grid(double max, std::size_t points) {
  if (points < 2) throw std::invalid_argument("grid needs at least two points");
  Eigen::ArrayXd g(static_cast<Eigen::Index>(points));
  for (std::size_t i = 0; i < points; ++i) g(Eigen::Index(i)) = max * double(i) / double(points - 1);
  g(Eigen::Index(points - 1)) = max;
  return g;
}

std::string parameter_hash(const SystemParameters& params) { return hex64(fnv1a64(format_parameters(params))); }

std::vector<FigureDataset> figure_datasets(std::string_view figure, const SystemParameters& base, std::size_t points) {
  const Eigen::ArrayXd grid = uniform_grid(5.0, points);
  const std::string fig{figure};
  const std::string comment = "params_hash=" + parameter_hash(base) + " figure=" + fig;

  if (fig == "fig3" || fig == "fig6" || fig == "fig8") {
    SystemParameters p = base;
    if (fig != "fig3") p.temperature = 280.0;
    std::vector<std::string> names;
    std::vector<SystemParameters> variants;
    for (double r : kFigureSqueezes) {
      names.push_back(label("r_m", r));
      variants.push_back(with_squeeze(p, r));
    }
    const std::string c = comment + " temperature_k=" + label("", p.temperature).substr(1);
    if (fig == "fig3") return budget_triplet(fig, c, grid, names, variants, true);

    std::vector<Eigen::ArrayXd> ys;
    std::vector<std::string> cols;
    for (std::size_t k = 0; k < variants.size(); ++k) {
      const auto dp = derived_parameters(variants[k]);
      if (fig == "fig6") {
        ys.push_back(budget_columns(variants[k], grid).sensitivity);
        cols.push_back(names[k]);
        continue;
      }
      // fig8: the approximation with the magnon channel dropped, next to the exact
      // budget under the nulling reservoir (which keeps the vacuum half-quantum).
      Eigen::ArrayXd approx(grid.size()), exact(grid.size());
      const SqueezedReservoir nulling{dp.r_m, std::numbers::pi};
      for (Eigen::Index i = 0; i < grid.size(); ++i) {
        approx(i) = approx_suppressed_sensitivity(dp, grid(i) * dp.kappa_m);
        exact(i) = noise_budget(dp, grid(i) * dp.kappa_m, nulling).sensitivity;
      }
      ys.push_back(std::move(approx));
      cols.push_back("approx_" + names[k]);
      ys.push_back(std::move(exact));
      cols.push_back("reservoir_exact_" + names[k]);
    }
    const std::string title = fig == "fig6" ? "fig6: sensitivity at 280 K (T/sqrt(Hz))"
                                            : "fig8: sensitivity with thermal-noise nulling, 280 K (T/sqrt(Hz))";
    return {curves(fig + "_sensitivity", c, "omega_over_kappa_m", grid, cols, ys, title, "Y", true)};
  }

  if (fig == "fig4") {
    std::vector<std::string> names;
    std::vector<SystemParameters> variants;
    for (double f : {0.2, 0.5, 1.0, 2.0}) {
      SystemParameters p = with_squeeze(base, 1.5);
      p.kappa_a = f * base.kappa_m;
      names.push_back(label("kappa_a/kappa_m", f));
      variants.push_back(p);
    }
    return budget_triplet(fig, comment + " r_m=1.5", grid, names, variants, true);
  }

  if (fig == "fig5") {
    std::vector<std::string> names;
    std::vector<SystemParameters> variants;
    for (double g_ghz : {0.625, 1.25, 2.5, 5.0}) {
      SystemParameters p = with_squeeze(base, 1.5);
      p.kappa_a = 0.2 * base.kappa_m;
      p.g_0 = two_pi * g_ghz * 1e9 / p.mod_amplitude;
      names.push_back(label("g/2pi_GHz", g_ghz));
      variants.push_back(p);
    }
    return budget_triplet(fig, comment + " r_m=1.5 kappa_a/kappa_m=0.2", grid, names, variants, false);
  }

  if (fig == "fig7") {
    const Eigen::ArrayXd axis = uniform_grid(2.0, 201);
    std::vector<std::string> names;
    std::vector<Eigen::ArrayXd> vs_ratio, vs_phase;
    for (double r_m : {0.5, 1.0, 1.5}) {
      names.push_back(label("r_m", r_m));
      Eigen::ArrayXd a(axis.size()), b(axis.size());
      for (Eigen::Index i = 0; i < axis.size(); ++i) {
        a(i) = reservoir_occupations(axis(i) * r_m, std::numbers::pi, r_m).n_e;
        b(i) = reservoir_occupations(r_m, axis(i) * std::numbers::pi, r_m).n_e;
      }
      vs_ratio.push_back(std::move(a));
      vs_phase.push_back(std::move(b));
    }
    return {curves("fig7a_ne_vs_rn", comment + " phi_n=pi", "r_n_over_r_m", axis, names, vs_ratio,
                   "fig7a: N_e vs r_n/r_m (phi_n = pi)", "N_e", false),
            curves("fig7b_ne_vs_phi", comment + " r_n=r_m", "phi_n_over_pi", axis, names, vs_phase,
                   "fig7b: N_e vs phi_n/pi (r_n = r_m)", "N_e", false)};
  }

  throw std::invalid_argument("unknown figure '" + fig + "' (expected fig3 ... fig8)");
}

}  // namespace magsense::cli
