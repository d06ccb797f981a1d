#include "magsense/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "magsense/errors.hpp"

namespace magsense {

ReservoirOccupations reservoir_occupations(double r_n, double phi_n, double r_m) {
  if (!(r_n >= 0.0)) throw ParameterError("reservoir squeeze amplitude r_n must be non-negative");
  const double sn = std::sinh(r_n), cn = std::cosh(r_n);
  const double sm = std::sinh(r_m), cm = std::cosh(r_m);

  const double n_e = sn * sn * cm * cm + sm * sm * cn * cn +
                     0.5 * std::cos(phi_n) * std::sinh(2.0 * r_n) * std::sinh(2.0 * r_m);
  const std::complex<double> phase = std::polar(1.0, phi_n);
  const std::complex<double> m_e = (cn * sm + phase * sn * cm) * (cn * cm + std::conj(phase) * sn * sm);
  // The expanded N_e cancels to ~1e-16 at the null; it cannot be negative.
  return {std::max(n_e, 0.0), m_e};
}

QuadratureVariances input_quadrature_variances(double r_m, double nbar_m,
                                               const std::optional<SqueezedReservoir>& reservoir) {
  if (!(nbar_m >= 0.0)) throw ParameterError("nbar_m must be non-negative");
  if (!reservoir) {
    const double half = nbar_m + 0.5;
    return {std::exp(-2.0 * r_m) * half, std::exp(2.0 * r_m) * half, 0.0};
  }
  const auto [n_e, m_e] = reservoir_occupations(reservoir->r_n, reservoir->phi_n, r_m);
  return {n_e + 0.5 + m_e.real(), n_e + 0.5 - m_e.real(), m_e.imag()};
}

Matrix4<double> input_noise_matrix(const QuadratureVariances& magnon, double nbar_a) {
  Matrix4<double> n = Matrix4<double>::Zero();
  n.topLeftCorner<2, 2>() = magnon.matrix();
  n(kCavityX, kCavityX) = nbar_a + 0.5;
  n(kCavityP, kCavityP) = nbar_a + 0.5;
  return n;
}

namespace {

double spectrum_value(const TransferResponsed& k, const QuadratureVariances& v, double nbar_a,
                      double signal_x, double signal_p) {
  return (nbar_a + 0.5) * (std::norm(k.k3) + std::norm(k.k4)) + std::norm(k.k1) * (v.v_x + signal_x) +
         std::norm(k.k2) * (v.v_p + signal_p) + 2.0 * std::real(k.k1 * std::conj(k.k2)) * v.c_xp;
}

}  // namespace

Eigen::ArrayXd output_spectrum(const DerivedParameters& dp, const Eigen::Ref<const Eigen::ArrayXd>& grid,
                               const std::optional<SqueezedReservoir>& reservoir,
                               const std::optional<SignalPsd>& signal) {
  if (grid.size() == 0) throw ParameterError("output_spectrum: empty frequency grid");
  if (!grid.allFinite()) throw ParameterError("output_spectrum: frequency grid contains non-finite values");
  if (signal && (signal->amplitude_channel.size() != grid.size() || signal->phase_channel.size() != grid.size())) {
    throw ParameterError("output_spectrum: signal densities must have one value per grid point");
  }
  const auto v = input_quadrature_variances(dp.r_m, dp.nbar_m, reservoir);
  Eigen::ArrayXd out(grid.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const auto k = frequency_response(dp, grid(i));
    const double sx = signal ? signal->amplitude_channel(i) : 0.0;
    const double sp = signal ? signal->phase_channel(i) : 0.0;
    out(i) = spectrum_value(k, v, dp.nbar_a, sx, sp);
  }
  return out;
}

double output_spectrum_at(const DerivedParameters& dp, double omega,
                          const std::optional<SqueezedReservoir>& reservoir) {
  return output_spectrum(dp, Eigen::ArrayXd::Constant(1, omega), reservoir)(0);
}

void require_backaction_evading(const DerivedParameters& dp, const char* caller) {
  if (dp.delta_a != 0.0 || dp.delta_0p != 0.0) {
    std::ostringstream msg;
    msg << caller << ": defined only at the backaction-evading point, but";
    if (dp.delta_a != 0.0) msg << " delta_a = " << dp.delta_a << " rad/s";
    if (dp.delta_a != 0.0 && dp.delta_0p != 0.0) msg << " and";
    if (dp.delta_0p != 0.0) msg << " delta_0p = " << dp.delta_0p << " rad/s";
    throw PreconditionError(msg.str());
  }
}

NoiseBudget noise_budget(const DerivedParameters& dp, double omega,
                         const std::optional<SqueezedReservoir>& reservoir) {
  require_backaction_evading(dp, "noise_budget");
  const auto k = frequency_response(dp, omega);
  const auto v = input_quadrature_variances(dp.r_m, dp.nbar_m, reservoir);
  const double k1_sq = std::norm(k.k1);

  NoiseBudget b;
  b.omega = omega;
  b.response = dp.xi * k1_sq;
  b.thermal_noise = v.v_x / dp.xi;
  b.additional_noise = k1_sq < kTransductionFloor ? std::numeric_limits<double>::infinity()
                                                  : (dp.nbar_a + 0.5) / dp.xi * std::norm(k.k4) / k1_sq;
  b.s_out = spectrum_value(k, v, dp.nbar_a, 0.0, 0.0);
  b.s_bnoise = 2.0 * dp.kappa_m / (dp.lambda * dp.lambda) * (b.thermal_noise + b.additional_noise);
  b.sensitivity = std::sqrt(b.s_bnoise);
  return b;
}

double approx_suppressed_sensitivity(const DerivedParameters& dp, double omega) {
  require_backaction_evading(dp, "approx_suppressed_sensitivity");
  const auto k = frequency_response(dp, omega);
  const double k1_sq = std::norm(k.k1);
  if (k1_sq < kTransductionFloor) return std::numeric_limits<double>::infinity();
  const double additional = (dp.nbar_a + 0.5) / dp.xi * std::norm(k.k4) / k1_sq;
  return std::sqrt(2.0 * dp.kappa_m * additional) / dp.lambda;
}

double response(const DerivedParameters& dp, double omega) {
  return dp.xi * std::norm(frequency_response(dp, omega).k1);
}

}  // namespace magsense
