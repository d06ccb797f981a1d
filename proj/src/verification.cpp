#include "magsense/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "magsense/errors.hpp"
#include "magsense/transfer.hpp"

namespace magsense {

SimulationConfig oracle_config(const DerivedParameters& dp, double record_interval, std::size_t samples,
                               std::size_t trajectories, const OracleOptions& oracle, double burn_in_factor,
                               double resolved_rate) {
  SimulationConfig cfg;
  cfg.dt = oracle.step_fraction / std::max(fastest_rate(dp), resolved_rate);
  const double interval = record_interval / dp.kappa_m;
  cfg.record_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(interval / cfg.dt)));
  cfg.burn_in = burn_in_factor / std::min(dp.kappa_a, dp.kappa_m);
  // Half a sample of slack so floor() in the integrator lands on `samples`.
  cfg.duration = cfg.burn_in + (double(samples) + 0.5) * cfg.sample_interval();
  cfg.n_trajectories = trajectories;
  cfg.seed = oracle.seed;
  return cfg;
}

PsdComparison compare_output_psd(const DerivedParameters& dp, const std::optional<SqueezedReservoir>& reservoir,
                                 const PsdCheckOptions& options, const OracleOptions& oracle) {
  if (options.trajectories == 0 || options.segments == 0 || options.band_bins == 0) {
    throw ConfigError("PSD check needs trajectories, segments and band width");
  }
  const std::size_t per_trajectory = (options.segments + options.trajectories - 1) / options.trajectories;
  const std::size_t hop =
      std::max<std::size_t>(1, options.segment_length -
                                   static_cast<std::size_t>(std::floor(options.overlap * double(options.segment_length))));
  const std::size_t samples = (per_trajectory - 1) * hop + options.segment_length;
  const auto cfg = oracle_config(dp, options.record_interval, samples, options.trajectories, oracle);

  const auto traces = simulate_ensemble(dp, reservoir, std::nullopt, cfg, oracle.threads);
  const auto psd = estimate_psd(traces, options.segment_length, options.overlap);

  std::vector<Eigen::Index> bins;
  for (Eigen::Index k = 0; k < psd.omega.size(); ++k) {
    const double x = psd.omega(k) / dp.kappa_m;
    if (x >= options.omega_min && x <= options.omega_max) bins.push_back(k);
  }
  if (bins.empty()) throw ConfigError("PSD check: no frequency bins inside the comparison window");

  Eigen::ArrayXd bin_omega(Eigen::Index(bins.size()));
  for (std::size_t i = 0; i < bins.size(); ++i) bin_omega(Eigen::Index(i)) = psd.omega(bins[i]);
  const Eigen::ArrayXd analytic_bins = output_spectrum(dp, bin_omega, reservoir);

  const std::size_t bands = (bins.size() + options.band_bins - 1) / options.band_bins;
  PsdComparison result;
  result.segments = psd.segments;
  result.omega.resize(Eigen::Index(bands));
  result.estimate.resize(Eigen::Index(bands));
  result.analytic.resize(Eigen::Index(bands));
  for (std::size_t b = 0; b < bands; ++b) {
    const std::size_t first = b * options.band_bins;
    const std::size_t last = std::min(bins.size(), first + options.band_bins);
    double est = 0.0, ana = 0.0, om = 0.0;
    for (std::size_t i = first; i < last; ++i) {
      est += psd.density(bins[i]);
      ana += analytic_bins(Eigen::Index(i));
      om += bin_omega(Eigen::Index(i));
    }
    const double n = double(last - first);
    result.omega(Eigen::Index(b)) = om / n;
    result.estimate(Eigen::Index(b)) = est / n;
    result.analytic(Eigen::Index(b)) = ana / n;
  }
  result.max_relative_error = ((result.estimate - result.analytic).abs() / result.analytic).maxCoeff();
  result.passed = result.segments >= 200 && result.max_relative_error <= options.tolerance;
  return result;
}

GainComparison compare_gain(const DerivedParameters& dp, double offset, const GainCheckOptions& options,
                            const OracleOptions& oracle) {
  require_backaction_evading(dp, "compare_gain");
  GainComparison result;
  result.offset = offset;
  result.analytic = response(dp, offset);

  const auto samples = static_cast<std::size_t>(std::ceil(options.record_duration / options.record_interval));
  const double carrier_rate = options.mode == ToneMode::full_rate ? options.carrier + std::abs(offset) : 0.0;
  const auto cfg = oracle_config(dp, options.record_interval, samples, options.trajectories, oracle,
                                 options.burn_in_factor, carrier_rate);
  const double record_time = double(samples) * cfg.sample_interval();
  const double noise = output_spectrum_at(dp, offset);
  const double input_density = 2e6 * noise / (result.analytic * record_time);

  ToneSignal tone;
  tone.amplitude = std::sqrt(4.0 * dp.kappa_m * input_density) / dp.lambda;
  tone.frequency = offset;
  tone.mode = options.mode;
  tone.carrier = options.carrier;

  result.measured = measure_gain(dp, tone, cfg, oracle.threads).gain;
  result.relative_error = std::abs(result.measured - result.analytic) / result.analytic;
  result.passed = result.relative_error <= options.tolerance;
  return result;
}

Matrix4<double> analytic_covariance(const DerivedParameters& dp, const std::optional<SqueezedReservoir>& reservoir) {
  const auto sys = drift_system<double>(dp);
  const auto noise = input_noise_matrix(input_quadrature_variances(dp.r_m, dp.nbar_m, reservoir), dp.nbar_a);
  const Matrix4<double> diffusion = sys.input_gain * noise * sys.input_gain.transpose();
  return lyapunov_covariance<double>(sys.drift, diffusion);
}

CovarianceComparison compare_covariance(const DerivedParameters& dp, const std::optional<SqueezedReservoir>& reservoir,
                                        const CovarianceCheckOptions& options, const OracleOptions& oracle) {
  if (options.trajectories < 2) throw ConfigError("covariance check needs at least two trajectories");
  const auto samples = static_cast<std::size_t>(std::ceil(options.record_duration / options.record_interval));
  const auto cfg = oracle_config(dp, options.record_interval, samples, options.trajectories, oracle);
  const auto traces = simulate_ensemble(dp, reservoir, std::nullopt, cfg, oracle.threads);

  std::vector<Matrix4<double>> per_trajectory;
  for (const auto& trace : traces) {
    Matrix4<double> second = Matrix4<double>::Zero();
    for (const auto& q : trace.quadratures) second += q * q.transpose();
    per_trajectory.push_back(second / double(trace.quadratures.size()));
  }
  const double n = double(per_trajectory.size());
  Matrix4<double> mean = Matrix4<double>::Zero();
  for (const auto& m : per_trajectory) mean += m;
  mean /= n;
  Matrix4<double> spread = Matrix4<double>::Zero();
  for (const auto& m : per_trajectory) spread += (m - mean).cwiseAbs2();

  CovarianceComparison result;
  result.simulated = mean;
  result.analytic = analytic_covariance(dp, reservoir);
  result.standard_error = (spread / (n - 1.0) / n).cwiseSqrt();
  const Matrix4<double> deviation = (result.simulated - result.analytic).cwiseAbs();
  double worst = 0.0;
  for (int i = 0; i < 4; ++i) {
    for (int j = i; j < 4; ++j) {
      const double se = result.standard_error(i, j);
      const double z = se > 0.0 ? deviation(i, j) / se
                                : (deviation(i, j) == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      worst = std::max(worst, z);
    }
  }
  result.max_sigma = worst;
  result.passed = worst <= options.sigma_limit;
  return result;
}

RouteDiscrepancy route_discrepancy(const DerivedParameters& dp, std::size_t points) {
  DerivedParameters resonant = dp;
  resonant.delta_a = 0.0;
  resonant.delta_0p = 0.0;
  DerivedParameters decoupled = resonant;
  decoupled.g_prime = 0.0;

  RouteDiscrepancy r;
  r.k4_authoritative_at_zero = std::abs(frequency_response(decoupled, 0.0).k4);
  r.k4_closed_form_at_zero = std::abs(closed_form_response(decoupled, 0.0).k4);
  for (std::size_t i = 0; i < points; ++i) {
    const double omega = 10.0 * resonant.kappa_m * double(i) / double(std::max<std::size_t>(1, points - 1));
    const auto a = frequency_response(resonant, omega);
    const auto c = closed_form_response(resonant, omega);
    const double k1 = std::abs(a.k1);
    r.k1_max_relative_difference = std::max(r.k1_max_relative_difference, std::abs(k1 - std::abs(c.k1)) / k1);
    const double leak = std::max({std::abs(a.k2), std::abs(a.k3), std::abs(c.k2), std::abs(c.k3)});
    r.k2_k3_max_ratio = std::max(r.k2_k3_max_ratio, leak / k1);
  }
  return r;
}

}  // namespace magsense
