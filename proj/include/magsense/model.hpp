#pragma once

#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace magsense {

/// CODATA-2018 exact/recommended values.
namespace constants {
inline constexpr double hbar = 1.054571817e-34;  // J s
inline constexpr double k_B = 1.380649e-23;      // J / K
inline constexpr double two_pi = 2.0 * std::numbers::pi;
}  // namespace constants

/// Anisotropic coupling coefficient omega_m (rad/s).
struct AnisotropyCoefficient {
  double omega_m = 0.0;
};

/// Squeeze amplitude r_m given directly.
struct SqueezeAmplitude {
  double r_m = 0.0;
};

using Anisotropy = std::variant<AnisotropyCoefficient, SqueezeAmplitude>;

/// Pump frequencies and amplitudes. Recorded for completeness; the fluctuation
/// solvers never read the amplitudes.
struct DriveRecord {
  double omega_l = 0.0;  // rad/s
  double omega_b = 0.0;  // rad/s
  double e_l = 0.0;
  double e_b = 0.0;
};

/// Raw physical inputs. All frequencies and rates are angular (rad/s).
struct SystemParameters {
  double omega_a = 0.0;
  double omega_0 = 0.0;
  Anisotropy anisotropy = SqueezeAmplitude{0.0};
  double g_0 = 0.0;
  double mod_amplitude = 1.0;
  double kappa_a = 0.0;
  double kappa_m = 0.0;
  double lambda_coupling = 0.0;  // rad / (s T)
  double temperature = 0.0;      // K
  double delta_a = 0.0;
  double delta_0p = 0.0;
  std::optional<DriveRecord> drive;

  double bare_coupling() const { return mod_amplitude * g_0; }
};

/// Post-squeezing quantities consumed by every solver.
struct DerivedParameters {
  double r_m = 0.0;
  double xi = 1.0;
  double omega_0_prime = 0.0;
  double g_prime = 0.0;
  double lambda_prime = 0.0;
  double lambda = 0.0;
  double kappa_a = 0.0;
  double kappa_m = 0.0;
  double delta_a = 0.0;
  double delta_0p = 0.0;
  double nbar_a = 0.0;
  double nbar_m = 0.0;

  bool at_backaction_evading_point() const { return delta_a == 0.0 && delta_0p == 0.0; }
};

/// Bose-Einstein occupation 1/(exp(hbar w / k_B T) - 1); exactly 0 at T = 0.
double thermal_occupation(double omega, double temperature);

/// r_m = 1/4 ln((w0 + wm)/(w0 - wm)). Throws DomainError unless |wm| < w0.
double derive_squeeze_amplitude(double omega_0, double omega_m);

/// Inverse map: omega_m = omega_0 tanh(2 r_m).
double anisotropy_from_squeeze(double omega_0, double r_m);

/// omega_m = gamma B_b - omega_0 for a bias field B_b along z.
double anisotropy_from_bias_field(double gamma, double bias_field, double omega_0);

/// lambda = gamma sqrt(5N)/2 for gyromagnetic ratio gamma (rad/(s T)) and N spins.
double field_coupling_from_spins(double gamma, double spin_number);

/// Squeeze amplitude implied by whichever anisotropy form the parameters carry.
double squeeze_amplitude(const SystemParameters& params);

/// Throws ParameterError / DomainError when an invariant is violated.
void validate(const SystemParameters& params);

/// Non-fatal findings, currently only the rotating-wave condition g' < omega_l + omega_b.
std::vector<std::string> validation_warnings(const SystemParameters& params);

DerivedParameters derived_parameters(const SystemParameters& params);

/// Copy of params with the anisotropy replaced by r_m.
SystemParameters with_squeeze(SystemParameters params, double r_m);

}  // namespace magsense
