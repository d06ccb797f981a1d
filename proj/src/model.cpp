#include "magsense/model.hpp"

#include <cmath>
#include <sstream>

#include "magsense/errors.hpp"

namespace magsense {

namespace {

// Below this hbar w / k_B T the Bose factor loses digits to cancellation in expm1's
// reciprocal; the two-term Laurent series is exact to O(x).
constexpr double kHighTemperatureCutoff = 1e-6;

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) throw ParameterError(std::string(name) + " must be finite");
}

}  // namespace

double thermal_occupation(double omega, double temperature) {
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw ParameterError("thermal_occupation: omega must be positive and finite");
  }
  if (!(temperature >= 0.0) || !std::isfinite(temperature)) {
    throw ParameterError("thermal_occupation: temperature must be non-negative");
  }
  if (temperature == 0.0) return 0.0;
  const double x = constants::hbar * omega / (constants::k_B * temperature);
  if (x < kHighTemperatureCutoff) return 1.0 / x - 0.5;
  return 1.0 / std::expm1(x);
}

double derive_squeeze_amplitude(double omega_0, double omega_m) {
  if (!(omega_0 > 0.0)) throw ParameterError("magnon frequency omega_0 must be positive");
  if (!(std::abs(omega_m) < omega_0)) {
    std::ostringstream msg;
    msg << "squeeze amplitude undefined: |omega_m| = " << std::abs(omega_m)
        << " must be below omega_0 = " << omega_0;
    throw DomainError(msg.str());
  }
  // atanh(wm/w0)/2 == ln((w0+wm)/(w0-wm))/4, and is accurate near wm = 0.
  return 0.5 * std::atanh(omega_m / omega_0);
}

double anisotropy_from_squeeze(double omega_0, double r_m) { return omega_0 * std::tanh(2.0 * r_m); }

double anisotropy_from_bias_field(double gamma, double bias_field, double omega_0) {
  return gamma * bias_field - omega_0;
}

double field_coupling_from_spins(double gamma, double spin_number) {
  if (!(spin_number >= 0.0)) throw ParameterError("spin number must be non-negative");
  return gamma * std::sqrt(5.0 * spin_number) / 2.0;
}

double squeeze_amplitude(const SystemParameters& params) {
  if (const auto* coeff = std::get_if<AnisotropyCoefficient>(&params.anisotropy)) {
    return derive_squeeze_amplitude(params.omega_0, coeff->omega_m);
  }
  const double r_m = std::get<SqueezeAmplitude>(params.anisotropy).r_m;
  if (!std::isfinite(r_m)) throw DomainError("r_m must be finite");
  return r_m;
}

void validate(const SystemParameters& params) {
  require_finite(params.omega_a, "omega_a");
  require_finite(params.omega_0, "omega_0");
  require_finite(params.g_0, "g_0");
  require_finite(params.mod_amplitude, "mod_amplitude");
  require_finite(params.kappa_a, "kappa_a");
  require_finite(params.kappa_m, "kappa_m");
  require_finite(params.lambda_coupling, "lambda");
  require_finite(params.temperature, "temperature");
  require_finite(params.delta_a, "delta_a");
  require_finite(params.delta_0p, "delta_0p");
  if (!(params.omega_a > 0.0)) throw ParameterError("omega_a must be positive");
  if (!(params.omega_0 > 0.0)) throw ParameterError("omega_0 must be positive");
  if (!(params.kappa_a > 0.0)) throw ParameterError("kappa_a must be positive");
  if (!(params.kappa_m > 0.0)) throw ParameterError("kappa_m must be positive");
  if (!(params.temperature >= 0.0)) throw ParameterError("temperature must be non-negative");
  if (squeeze_amplitude(params) < 0.0) {
    throw ParameterError("negative squeeze amplitude: the amplitude quadrature must be the squeezed one (xi >= 1)");
  }
}

std::vector<std::string> validation_warnings(const SystemParameters& params) {
  std::vector<std::string> warnings;
  if (!params.drive) return warnings;
  const double g_prime = params.bare_coupling() * std::exp(squeeze_amplitude(params));
  const double sum = params.drive->omega_l + params.drive->omega_b;
  if (!(g_prime < sum)) {
    std::ostringstream msg;
    msg << "rotating-wave approximation questionable: g' = " << g_prime
        << " rad/s is not below omega_l + omega_b = " << sum << " rad/s";
    warnings.push_back(msg.str());
  }
  return warnings;
}

DerivedParameters derived_parameters(const SystemParameters& params) {
  validate(params);
  const double r_m = squeeze_amplitude(params);
  const double amplification = std::exp(r_m);

  DerivedParameters dp;
  dp.r_m = r_m;
  dp.xi = std::exp(2.0 * r_m);
  dp.omega_0_prime = params.omega_0 / std::cosh(2.0 * r_m);
  dp.g_prime = params.bare_coupling() * amplification;
  dp.lambda = params.lambda_coupling;
  dp.lambda_prime = params.lambda_coupling * amplification;
  dp.kappa_a = params.kappa_a;
  dp.kappa_m = params.kappa_m;
  dp.delta_a = params.delta_a;
  dp.delta_0p = params.delta_0p;
  dp.nbar_a = thermal_occupation(params.omega_a, params.temperature);
  dp.nbar_m = thermal_occupation(params.omega_0, params.temperature);
  return dp;
}

SystemParameters with_squeeze(SystemParameters params, double r_m) {
  params.anisotropy = SqueezeAmplitude{r_m};
  return params;
}

}  // namespace magsense
