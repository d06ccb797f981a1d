#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "magsense/model.hpp"

namespace magsense {

// Flat `key = value` parameter documents. Frequencies are read in Hz and stored as
// rad/s; temperature in K; `#` starts a comment. Unknown or repeated keys are errors.
//
//   omega_a_hz, omega_0_hz, g0_hz, kappa_a_hz, kappa_m_hz, temperature_k   required
//   omega_m_hz | r_m                                                        exactly one
//   lambda_hz_per_t | (gamma_hz_per_t and spin_number)                      exactly one
//   mod_amplitude (default 1), delta_a_hz, delta_0p_hz (default 0)
//   omega_l_hz, omega_b_hz (together), e_l, e_b                             drive record

SystemParameters parse_parameters(std::string_view text);

SystemParameters load_parameter_file(const std::filesystem::path& path);

/// Canonical text form in Hz units with 17 significant digits; parsing it back
/// reproduces every rad/s value to within a couple of ulps.
std::string format_parameters(const SystemParameters& params);

/// Reference operating point: omega_0/2pi = omega_a/2pi = 37.5 GHz, g/2pi = 2.5 GHz,
/// kappa_m/2pi = 15 MHz, kappa_a/2pi = 16.5 MHz, lambda/2pi = 14 sqrt(17.5) THz/T,
/// T = 50 mK, both detunings zero, r_m = 0.
SystemParameters baseline_parameters();

}  // namespace magsense
