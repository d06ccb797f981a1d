#include "magsense/welch.hpp"

#include <unsupported/Eigen/FFT>
#include <cmath>
#include <complex>
#include <numbers>

#include "magsense/errors.hpp"

namespace magsense {

namespace {

// Neumaier summation; the spectrum is a sum of hundreds of strictly positive terms.
struct CompensatedSum {
  double sum = 0.0;
  double carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::abs(sum) >= std::abs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

}  // namespace

PowerSpectrum welch_psd(std::span<const std::span<const double>> records, double sample_interval,
                        std::size_t segment_length, double overlap) {
  if (records.empty()) throw ParameterError("welch_psd: no records");
  if (!(sample_interval > 0.0)) throw ParameterError("welch_psd: sample interval must be positive");
  if (!(overlap >= 0.0 && overlap < 1.0)) throw ParameterError("welch_psd: overlap must lie in [0, 1)");
  if (segment_length < 2) throw ParameterError("welch_psd: segment length must be at least 2");
  for (const auto& r : records) {
    if (r.empty()) throw ParameterError("welch_psd: empty record");
    if (segment_length > r.size()) throw ParameterError("welch_psd: segment longer than record");
  }

  const std::size_t n = segment_length;
  const auto hop = std::max<std::size_t>(1, n - static_cast<std::size_t>(std::floor(overlap * double(n))));

  std::vector<double> window(n);
  double window_power = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * double(i) / double(n));
    window_power += window[i] * window[i];
  }

  const std::size_t bins = n / 2 + 1;
  std::vector<CompensatedSum> acc(bins);
  std::vector<double> buffer(n);
  std::vector<std::complex<double>> spectrum;
  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::HalfSpectrum);

  std::size_t segments = 0;
  for (const auto& r : records) {
    for (std::size_t start = 0; start + n <= r.size(); start += hop) {
      for (std::size_t i = 0; i < n; ++i) buffer[i] = r[start + i] * window[i];
      fft.fwd(spectrum, buffer);
      for (std::size_t k = 0; k < bins; ++k) acc[k].add(std::norm(spectrum[k]));
      ++segments;
    }
  }

  PowerSpectrum psd;
  psd.segments = segments;
  psd.omega.resize(Eigen::Index(bins));
  psd.density.resize(Eigen::Index(bins));
  const double scale = sample_interval / (window_power * double(segments));
  const double d_omega = 2.0 * std::numbers::pi / (double(n) * sample_interval);
  for (std::size_t k = 0; k < bins; ++k) {
    psd.omega(Eigen::Index(k)) = d_omega * double(k);
    psd.density(Eigen::Index(k)) = acc[k].value() * scale;
  }
  return psd;
}

PowerSpectrum welch_psd(std::span<const double> record, double sample_interval, std::size_t segment_length,
                        double overlap) {
  const std::span<const double> one[] = {record};
  return welch_psd(std::span<const std::span<const double>>(one), sample_interval, segment_length, overlap);
}

double integrated_power(const PowerSpectrum& psd) {
  const Eigen::Index m = psd.density.size();
  if (m < 2) return 0.0;
  const double d_omega = psd.omega(1) - psd.omega(0);
  double total = psd.density.sum() - 0.5 * psd.density(0) - 0.5 * psd.density(m - 1);
  return total * d_omega / std::numbers::pi;
}

}  // namespace magsense
