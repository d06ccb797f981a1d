#include "magsense/langevin.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <thread>

#include "magsense/errors.hpp"
#include "magsense/transfer.hpp"

namespace magsense {

namespace {

/// Square-root factor F with F F^T = noise; tolerates singular (e.g. all-zero) matrices.
Matrix4<double> noise_factor(const Matrix4<double>& noise) {
  const Eigen::LDLT<Matrix4<double>> ldlt(noise);
  const Eigen::Vector4d root_d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
  const Matrix4<double> lower = ldlt.matrixL();
  return ldlt.transpositionsP().transpose() * (lower * root_d.asDiagonal());
}

std::mt19937_64 trajectory_engine(std::uint64_t seed, std::size_t trajectory) {
  const auto t = static_cast<std::uint64_t>(trajectory);
  std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(t), std::uint32_t(t >> 32)};
  return std::mt19937_64(seq);
}

struct ToneDrive {
  double amplitude = 0.0;  // lambda' B0
  double offset = 0.0;
  double carrier = 0.0;
  bool full_rate = false;

  // Deterministic additions to the X_M and P_M equations at time t.
  void at(double t, double& fx, double& fp) const {
    if (full_rate) {
      const double field = amplitude * std::cos((carrier + offset) * t);
      fx = -std::numbers::sqrt2 * field * std::sin(carrier * t);
      fp = std::numbers::sqrt2 * field * std::cos(carrier * t);
    } else {
      const double a = amplitude / std::numbers::sqrt2;
      fx = a * std::sin(offset * t);
      fp = a * std::cos(offset * t);
    }
  }
};

SimulationTrace integrate(const DerivedParameters& dp, const Matrix4<double>& input_noise,
                          const std::optional<ToneSignal>& signal, const SimulationConfig& cfg,
                          std::size_t trajectory) {
  const auto sys = drift_system<double>(dp);
  const Matrix4<double> factor = noise_factor(input_noise);
  const Eigen::Vector4d gain = sys.input_gain.diagonal();
  const double dt = cfg.dt;
  const double root_dt = std::sqrt(dt);
  const double root_ka = std::sqrt(dp.kappa_a);

  std::optional<ToneDrive> drive;
  if (signal && signal->amplitude != 0.0) {
    drive = ToneDrive{dp.lambda_prime * signal->amplitude, signal->frequency, signal->carrier,
                      signal->mode == ToneMode::full_rate};
  }

  auto engine = trajectory_engine(cfg.seed, trajectory);
  std::normal_distribution<double> normal;

  const auto burn_steps = static_cast<std::size_t>(std::ceil(cfg.burn_in / dt));
  const auto blocks = static_cast<std::size_t>(std::floor((cfg.duration - cfg.burn_in) / cfg.sample_interval()));

  SimulationTrace trace;
  trace.sample_interval = cfg.sample_interval();
  trace.seed = cfg.seed;
  trace.trajectory = trajectory;
  trace.times.reserve(blocks);
  trace.quadratures.reserve(blocks);
  trace.output_record.reserve(blocks);

  Eigen::Vector4d x = Eigen::Vector4d::Zero();
  std::size_t step = 0;
  double out = 0.0;
  const auto advance = [&]() {
    Eigen::Vector4d z;
    for (int i = 0; i < 4; ++i) z(i) = normal(engine);
    const Eigen::Vector4d dw = root_dt * (factor * z);
    Eigen::Vector4d rhs = sys.drift * x;
    if (drive) {
      double fx = 0.0, fp = 0.0;
      drive->at(double(step) * dt, fx, fp);
      rhs(kMagnonX) += fx;
      rhs(kMagnonP) += fp;
    }
    const Eigen::Vector4d next = x + dt * rhs + gain.cwiseProduct(dw);
    // Pair the input increment with the midpoint of the cavity phase quadrature; the
    // discrete reflection is then exactly all-pass, like the continuous one.
    out = root_ka * 0.5 * (x(kCavityP) + next(kCavityP)) - dw(kCavityP) / dt;
    x = next;
    ++step;
  };

  for (std::size_t i = 0; i < burn_steps; ++i) advance();
  for (std::size_t b = 0; b < blocks; ++b) {
    double block_sum = 0.0;
    for (std::size_t j = 0; j < cfg.record_stride; ++j) {
      advance();
      block_sum += out;
    }
    trace.times.push_back(double(step) * dt);
    trace.quadratures.push_back(x);
    trace.output_record.push_back(block_sum / double(cfg.record_stride));
  }
  return trace;
}

}  // namespace

double fastest_rate(const DerivedParameters& dp) {
  return std::max({dp.kappa_a, dp.kappa_m, std::abs(dp.delta_a), std::abs(dp.delta_0p), 2.0 * std::abs(dp.g_prime)});
}

void validate(const SimulationConfig& cfg, const DerivedParameters& dp, const std::optional<ToneSignal>& signal) {
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw ConfigError("dt must be positive");
  if (cfg.n_trajectories == 0) throw ConfigError("need at least one trajectory");
  if (cfg.record_stride == 0) throw ConfigError("record stride must be at least 1");
  const double courant = cfg.dt * fastest_rate(dp);
  if (!(courant < 0.1)) {
    std::ostringstream msg;
    msg << "time step too coarse: dt * max(kappa, |Delta|, 2 g') = " << courant << " (must be < 0.1)";
    throw ConfigError(msg.str());
  }
  const double settle = 10.0 / std::min(dp.kappa_a, dp.kappa_m);
  if (!(cfg.burn_in >= settle * (1.0 - 1e-12))) {
    std::ostringstream msg;
    msg << "burn-in " << cfg.burn_in << " s is shorter than 10 / min(kappa) = " << settle << " s";
    throw ConfigError(msg.str());
  }
  if (!(cfg.duration - cfg.burn_in >= cfg.sample_interval())) {
    throw ConfigError("duration leaves no recorded samples after burn-in");
  }
  if (signal) {
    if (!(signal->amplitude >= 0.0)) throw ConfigError("tone amplitude must be non-negative");
    if (signal->mode == ToneMode::full_rate && !(cfg.dt * (std::abs(signal->carrier) + std::abs(signal->frequency)) < 0.1)) {
      throw ConfigError("time step does not resolve the full-rate carrier");
    }
  }
}

SimulationTrace simulate(const DerivedParameters& dp, const std::optional<SqueezedReservoir>& reservoir,
                         const std::optional<ToneSignal>& signal, const SimulationConfig& cfg,
                         std::size_t trajectory) {
  validate(cfg, dp, signal);
  const auto magnon = input_quadrature_variances(dp.r_m, dp.nbar_m, reservoir);
  return integrate(dp, input_noise_matrix(magnon, dp.nbar_a), signal, cfg, trajectory);
}

SimulationTrace simulate_with_noise(const DerivedParameters& dp, const Matrix4<double>& input_noise,
                                    const std::optional<ToneSignal>& signal, const SimulationConfig& cfg,
                                    std::size_t trajectory) {
  validate(cfg, dp, signal);
  return integrate(dp, input_noise, signal, cfg, trajectory);
}

std::vector<SimulationTrace> simulate_ensemble(const DerivedParameters& dp,
                                               const std::optional<SqueezedReservoir>& reservoir,
                                               const std::optional<ToneSignal>& signal,
                                               const SimulationConfig& cfg, unsigned threads) {
  validate(cfg, dp, signal);
  std::vector<SimulationTrace> traces(cfg.n_trajectories);
  std::vector<std::exception_ptr> errors(traces.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&]() {
    for (std::size_t i = next++; i < traces.size(); i = next++) {
      try {
        traces[i] = simulate(dp, reservoir, signal, cfg, i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned pool = std::max(1u, std::min<unsigned>(threads, unsigned(traces.size())));
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::jthread> workers;
    for (unsigned t = 0; t < pool; ++t) workers.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return traces;
}

PowerSpectrum estimate_psd(const SimulationTrace& trace, std::size_t segment_length, double overlap) {
  if (trace.output_record.empty()) throw ParameterError("estimate_psd: empty trace");
  return welch_psd(trace.output_record, trace.sample_interval, segment_length, overlap);
}

PowerSpectrum estimate_psd(const std::vector<SimulationTrace>& traces, std::size_t segment_length, double overlap) {
  if (traces.empty()) throw ParameterError("estimate_psd: no traces");
  std::vector<std::span<const double>> records;
  for (const auto& t : traces) {
    if (t.output_record.empty()) throw ParameterError("estimate_psd: empty trace");
    records.emplace_back(t.output_record);
  }
  return welch_psd(records, traces.front().sample_interval, segment_length, overlap);
}

double tone_power(const std::vector<SimulationTrace>& traces, double omega) {
  if (traces.empty()) throw ParameterError("tone_power: no traces");
  Eigen::Vector2d mean_coeffs = Eigen::Vector2d::Zero();
  for (const auto& trace : traces) {
    Eigen::Matrix2d normal = Eigen::Matrix2d::Zero();
    Eigen::Vector2d rhs = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < trace.output_record.size(); ++i) {
      const Eigen::Vector2d basis(std::cos(omega * trace.times[i]), std::sin(omega * trace.times[i]));
      normal += basis * basis.transpose();
      rhs += basis * trace.output_record[i];
    }
    mean_coeffs += normal.ldlt().solve(rhs);
  }
  mean_coeffs /= double(traces.size());

  // Each output sample is a mean over one sample interval; undo its sinc attenuation.
  const double half = 0.5 * omega * traces.front().sample_interval;
  const double attenuation = half == 0.0 ? 1.0 : std::sin(half) / half;
  return 0.5 * mean_coeffs.squaredNorm() / (attenuation * attenuation);
}

GainMeasurement measure_gain(const DerivedParameters& dp, const ToneSignal& tone, const SimulationConfig& cfg,
                             unsigned threads) {
  require_backaction_evading(dp, "measure_gain");
  if (!(tone.amplitude > 0.0)) throw ConfigError("measure_gain needs a non-zero tone amplitude");
  const auto traces = simulate_ensemble(dp, std::nullopt, tone, cfg, threads);
  GainMeasurement m;
  m.tone_power = tone_power(traces, tone.frequency);
  m.input_density = dp.lambda * dp.lambda * tone.amplitude * tone.amplitude / (4.0 * dp.kappa_m);
  m.gain = m.tone_power / m.input_density;
  return m;
}

void write_trace_csv(const std::filesystem::path& path, const SimulationTrace& trace, const DerivedParameters& dp,
                     const SimulationConfig& cfg) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot write trace file " + path.string());
  out.precision(17);
  out << "# rng=" << kRngAlgorithm << " version=" << kRngStreamVersion << '\n';
  out << "# seed=" << trace.seed << " trajectory=" << trace.trajectory << " dt=" << cfg.dt
      << " sample_interval=" << trace.sample_interval << " burn_in=" << cfg.burn_in << '\n';
  out << "# r_m=" << dp.r_m << " g_prime=" << dp.g_prime << " kappa_a=" << dp.kappa_a << " kappa_m=" << dp.kappa_m
      << " delta_a=" << dp.delta_a << " delta_0p=" << dp.delta_0p << " nbar_a=" << dp.nbar_a
      << " nbar_m=" << dp.nbar_m << '\n';
  out << "t,X_M,P_M,X_a,P_a,P_out\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const auto& q = trace.quadratures[i];
    out << trace.times[i] << ',' << q(0) << ',' << q(1) << ',' << q(2) << ',' << q(3) << ','
        << trace.output_record[i] << '\n';
  }
}

}  // namespace magsense
