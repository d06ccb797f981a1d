#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <span>
#include <vector>

namespace magsense {

/// One-sided (omega >= 0) Welch estimate. A white sequence with delta-correlated
/// density V (per-sample variance V / dt) estimates flat at V.
struct PowerSpectrum {
  Eigen::ArrayXd omega;    // rad/s
  Eigen::ArrayXd density;
  std::size_t segments = 0;
};

/// Hann-windowed, segment-averaged periodogram pooled over several equally sampled
/// records. Segment sums use compensated accumulation in record order.
PowerSpectrum welch_psd(std::span<const std::span<const double>> records, double sample_interval,
                        std::size_t segment_length, double overlap);

PowerSpectrum welch_psd(std::span<const double> record, double sample_interval, std::size_t segment_length,
                        double overlap);

/// Discrete Parseval: integral of the density over [0, pi/dt] divided by pi.
double integrated_power(const PowerSpectrum& psd);

}  // namespace magsense
