#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>

#include "magsense/model.hpp"
#include "magsense/transfer.hpp"

namespace magsense {

/// Symmetrized, delta-correlated densities of the magnon input quadratures.
struct QuadratureVariances {
  double v_x = 0.5;
  double v_p = 0.5;
  double c_xp = 0.0;

  Eigen::Matrix2d matrix() const { return (Eigen::Matrix2d() << v_x, c_xp, c_xp, v_p).finished(); }
};

/// Squeezed-vacuum bath for the magnon: amplitude r_n >= 0 and phase phi_n (rad).
struct SqueezedReservoir {
  double r_n = 0.0;
  double phi_n = 0.0;
};

/// Effective occupation N_e and anomalous correlator M_e of the engineered magnon input.
struct ReservoirOccupations {
  double n_e = 0.0;
  std::complex<double> m_e{};
};

/// Per-frequency noise budget at the backaction-evading point.
struct NoiseBudget {
  double omega = 0.0;             // rad/s
  double response = 0.0;          // A_m
  double additional_noise = 0.0;  // N_qn
  double thermal_noise = 0.0;     // N_mth
  double s_out = 0.0;
  double s_bnoise = 0.0;          // T^2/Hz
  double sensitivity = 0.0;       // T/sqrt(Hz)

  /// |B_ex(omega)| / sqrt(S_Bnoise).
  double snr(double field_amplitude) const { return field_amplitude / std::sqrt(s_bnoise); }
};

/// Caller-supplied signal densities S'_Bex1 (amplitude channel) and S'_Bex2 (phase
/// channel), one value per grid point, already carrying the xi amplification.
struct SignalPsd {
  Eigen::ArrayXd amplitude_channel;
  Eigen::ArrayXd phase_channel;
};

/// |k1|^2 below this is treated as "no transduction" and yields infinite noise.
inline constexpr double kTransductionFloor = 1e-30;

ReservoirOccupations reservoir_occupations(double r_n, double phi_n, double r_m);

QuadratureVariances input_quadrature_variances(double r_m, double nbar_m,
                                               const std::optional<SqueezedReservoir>& reservoir = {});

/// Full 4x4 input-noise density matrix over (X'_M, P'_M, X_a, P_a).
Matrix4<double> input_noise_matrix(const QuadratureVariances& magnon, double nbar_a);

/// Symmetrized homodyne spectrum of the output phase quadrature on each grid point.
Eigen::ArrayXd output_spectrum(const DerivedParameters& dp, const Eigen::Ref<const Eigen::ArrayXd>& grid,
                               const std::optional<SqueezedReservoir>& reservoir = {},
                               const std::optional<SignalPsd>& signal = {});

double output_spectrum_at(const DerivedParameters& dp, double omega,
                          const std::optional<SqueezedReservoir>& reservoir = {});

/// Throws PreconditionError naming the detuning when dp is off Delta_a = Delta'_0 = 0.
void require_backaction_evading(const DerivedParameters& dp, const char* caller);

NoiseBudget noise_budget(const DerivedParameters& dp, double omega,
                         const std::optional<SqueezedReservoir>& reservoir = {});

/// Sensitivity with the magnon channel dropped entirely: sqrt(2 kappa_m N_qn)/lambda.
double approx_suppressed_sensitivity(const DerivedParameters& dp, double omega);

/// Response A_m = xi |k1|^2 from the authoritative solve.
double response(const DerivedParameters& dp, double omega);

}  // namespace magsense
