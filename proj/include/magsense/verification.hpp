#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "magsense/langevin.hpp"
#include "magsense/model.hpp"
#include "magsense/spectra.hpp"

namespace magsense {

// Comparisons between the analytic solvers and the stochastic oracle. Frequencies and
// durations in the option structs are in units of kappa_m and 1/kappa_m.

struct OracleOptions {
  std::uint64_t seed = 42;
  unsigned threads = 1;
  double step_fraction = 0.09;  // dt * fastest_rate
};

/// Guarded step, whole-sample stride close to `record_interval` (1/kappa_m units) and
/// a duration that yields exactly `samples` recorded points after `burn_in_factor`/min(kappa).
/// `resolved_rate` (rad/s) raises the step resolution beyond the system rates, e.g. a carrier.
SimulationConfig oracle_config(const DerivedParameters& dp, double record_interval, std::size_t samples,
                               std::size_t trajectories, const OracleOptions& oracle, double burn_in_factor = 10.0,
                               double resolved_rate = 0.0);

struct PsdCheckOptions {
  std::size_t segments = 256;  // total across trajectories
  std::size_t segment_length = 4096;
  double overlap = 0.5;
  double record_interval = 0.05;
  std::size_t trajectories = 4;
  std::size_t band_bins = 8;
  double omega_min = 0.1;
  double omega_max = 5.0;
  double tolerance = 0.10;
};

struct PsdComparison {
  Eigen::ArrayXd omega;     // band centres, rad/s
  Eigen::ArrayXd estimate;  // band-averaged Welch estimate
  Eigen::ArrayXd analytic;  // band-averaged output_spectrum on the same bins
  std::size_t segments = 0;
  double max_relative_error = 0.0;
  bool passed = false;
};

PsdComparison compare_output_psd(const DerivedParameters& dp, const std::optional<SqueezedReservoir>& reservoir,
                                 const PsdCheckOptions& options, const OracleOptions& oracle);

struct GainCheckOptions {
  double record_duration = 400.0;
  double record_interval = 0.05;
  double burn_in_factor = 40.0;
  std::size_t trajectories = 2;
  double tolerance = 0.15;
  ToneMode mode = ToneMode::envelope;
  double carrier = 0.0;  // rad/s, full-rate only
};

struct GainComparison {
  double offset = 0.0;  // rad/s
  double measured = 0.0;
  double analytic = 0.0;
  double relative_error = 0.0;
  bool passed = false;
};

/// Tone amplitude chosen so the fitted tone sits ~60 dB above the fit's noise floor.
GainComparison compare_gain(const DerivedParameters& dp, double offset, const GainCheckOptions& options,
                            const OracleOptions& oracle);

struct CovarianceCheckOptions {
  std::size_t trajectories = 32;
  double record_duration = 200.0;
  double record_interval = 0.5;
  double sigma_limit = 3.0;
};

struct CovarianceComparison {
  Matrix4<double> simulated;
  Matrix4<double> analytic;
  Matrix4<double> standard_error;
  double max_sigma = 0.0;  // largest |simulated - analytic| / standard_error
  bool passed = false;
};

/// Stationary covariance of the state for input-noise matrix built from dp.
Matrix4<double> analytic_covariance(const DerivedParameters& dp, const std::optional<SqueezedReservoir>& reservoir);

CovarianceComparison compare_covariance(const DerivedParameters& dp, const std::optional<SqueezedReservoir>& reservoir,
                                        const CovarianceCheckOptions& options, const OracleOptions& oracle);

/// Route comparison for the discrepancy report. Uses dp's rates with both detunings
/// forced to zero; the K4 entries are evaluated with g' = 0 as well.
struct RouteDiscrepancy {
  double k4_authoritative_at_zero = 0.0;
  double k4_closed_form_at_zero = 0.0;
  double k1_max_relative_difference = 0.0;  // | |k1|_a - |k1|_c | / |k1|_a over omega in [0, 10 kappa_m]
  double k2_k3_max_ratio = 0.0;             // max(|k2|, |k3|) / |k1| over both routes
};

RouteDiscrepancy route_discrepancy(const DerivedParameters& dp, std::size_t points = 1001);

}  // namespace magsense
