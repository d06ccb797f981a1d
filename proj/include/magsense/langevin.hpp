#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "magsense/model.hpp"
#include "magsense/spectra.hpp"
#include "magsense/welch.hpp"

namespace magsense {

/// Recorded in trace metadata so a run can be replayed bit for bit.
inline constexpr std::string_view kRngAlgorithm = "mt19937_64/seed_seq(seed,trajectory)/normal_distribution";
inline constexpr int kRngStreamVersion = 1;

struct SimulationConfig {
  double dt = 0.0;        // s
  double duration = 0.0;  // s, including burn-in
  double burn_in = 0.0;   // s
  std::size_t n_trajectories = 1;
  std::uint64_t seed = 0;
  /// Samples kept every `record_stride` steps. Quadratures are sampled at the end of
  /// each block; the output record is the block mean, which keeps white-noise density.
  std::size_t record_stride = 1;

  double sample_interval() const { return dt * double(record_stride); }
};

enum class ToneMode { envelope, full_rate };

/// Field tone B_ex(t) = amplitude cos((omega_b + frequency) t).
struct ToneSignal {
  double amplitude = 0.0;  // T
  double frequency = 0.0;  // offset from the magnon drive, rad/s
  ToneMode mode = ToneMode::envelope;
  double carrier = 0.0;    // omega_b, rad/s; read only in full-rate mode
};

struct SimulationTrace {
  std::vector<double> times;
  std::vector<Eigen::Vector4d> quadratures;  // (X_M, P_M, X_a, P_a)
  std::vector<double> output_record;         // P_out
  double sample_interval = 0.0;
  std::uint64_t seed = 0;
  std::size_t trajectory = 0;
};

/// Largest rate the explicit step must resolve: max(kappa_a, kappa_m, |Delta|, 2 g').
double fastest_rate(const DerivedParameters& dp);

/// Throws ConfigError when dt * fastest_rate >= 0.1, burn-in is shorter than
/// 10 / min(kappa), or the recorded window is empty.
void validate(const SimulationConfig& cfg, const DerivedParameters& dp,
              const std::optional<ToneSignal>& signal = {});

/// Euler-Maruyama integration of the quadrature Langevin equations for one trajectory.
SimulationTrace simulate(const DerivedParameters& dp, const std::optional<SqueezedReservoir>& reservoir,
                         const std::optional<ToneSignal>& signal, const SimulationConfig& cfg,
                         std::size_t trajectory = 0);

/// Same integrator with an explicit 4x4 input-noise density over (X'_M, P'_M, X_a, P_a).
SimulationTrace simulate_with_noise(const DerivedParameters& dp, const Matrix4<double>& input_noise,
                                    const std::optional<ToneSignal>& signal, const SimulationConfig& cfg,
                                    std::size_t trajectory = 0);

/// cfg.n_trajectories independent trajectories; result order is trajectory order
/// whatever the thread count.
std::vector<SimulationTrace> simulate_ensemble(const DerivedParameters& dp,
                                               const std::optional<SqueezedReservoir>& reservoir,
                                               const std::optional<ToneSignal>& signal,
                                               const SimulationConfig& cfg, unsigned threads = 1);

PowerSpectrum estimate_psd(const SimulationTrace& trace, std::size_t segment_length, double overlap);
PowerSpectrum estimate_psd(const std::vector<SimulationTrace>& traces, std::size_t segment_length, double overlap);

struct GainMeasurement {
  double gain = 0.0;           // output tone mean square / input field density
  double tone_power = 0.0;     // mean square of the fitted output tone
  double input_density = 0.0;  // S_Bex1 = lambda^2 B0^2 / (4 kappa_m)
};

/// Least-squares fit of a cos/sin pair at `omega` to the output record, coherently
/// averaged over trajectories. Returns the fitted mean square.
double tone_power(const std::vector<SimulationTrace>& traces, double omega);

GainMeasurement measure_gain(const DerivedParameters& dp, const ToneSignal& tone, const SimulationConfig& cfg,
                             unsigned threads = 1);

/// CSV dump: metadata comments, then t,X_M,P_M,X_a,P_a,P_out.
void write_trace_csv(const std::filesystem::path& path, const SimulationTrace& trace, const DerivedParameters& dp,
                     const SimulationConfig& cfg);

}  // namespace magsense
