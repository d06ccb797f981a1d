#include "magsense/param_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "magsense/errors.hpp"

namespace magsense {

namespace {

using constants::two_pi;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view token, std::string_view key, int line) {
  double value = 0.0;
  // from_chars rejects a leading '+', accept it for hand-written files.
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const auto* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(token.data(), end, value);
  if (ec != std::errc{} || ptr != end || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "line " << line << ": value for '" << key << "' is not a finite number";
    throw ParameterError(msg.str());
  }
  return value;
}

const std::map<std::string, bool, std::less<>>& known_keys() {
  // key -> required
  static const std::map<std::string, bool, std::less<>> keys = {
      {"omega_a_hz", true},       {"omega_0_hz", true},     {"omega_m_hz", false},
      {"r_m", false},             {"g0_hz", true},          {"mod_amplitude", false},
      {"kappa_a_hz", true},       {"kappa_m_hz", true},     {"lambda_hz_per_t", false},
      {"gamma_hz_per_t", false},  {"spin_number", false},   {"temperature_k", true},
      {"delta_a_hz", false},      {"delta_0p_hz", false},   {"omega_l_hz", false},
      {"omega_b_hz", false},      {"e_l", false},           {"e_b", false},
  };
  return keys;
}

}  // namespace

SystemParameters parse_parameters(std::string_view text) {
  std::map<std::string, double, std::less<>> values;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParameterError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key{trim(line.substr(0, eq))};
    if (!known_keys().contains(key)) {
      throw ParameterError("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    if (values.contains(key)) {
      throw ParameterError("line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    values[key] = parse_number(trim(line.substr(eq + 1)), key, line_no);
  }

  for (const auto& [key, required] : known_keys()) {
    if (required && !values.contains(key)) throw ParameterError("missing required key '" + key + "'");
  }
  const auto get = [&](std::string_view key, double fallback) {
    const auto it = values.find(key);
    return it == values.end() ? fallback : it->second;
  };

  SystemParameters p;
  p.omega_a = two_pi * values.at("omega_a_hz");
  p.omega_0 = two_pi * values.at("omega_0_hz");
  p.g_0 = two_pi * values.at("g0_hz");
  p.mod_amplitude = get("mod_amplitude", 1.0);
  p.kappa_a = two_pi * values.at("kappa_a_hz");
  p.kappa_m = two_pi * values.at("kappa_m_hz");
  p.temperature = values.at("temperature_k");
  p.delta_a = two_pi * get("delta_a_hz", 0.0);
  p.delta_0p = two_pi * get("delta_0p_hz", 0.0);

  const bool has_wm = values.contains("omega_m_hz");
  const bool has_rm = values.contains("r_m");
  if (has_wm == has_rm) throw ParameterError("exactly one of 'omega_m_hz' or 'r_m' must be given");
  if (has_wm) {
    p.anisotropy = AnisotropyCoefficient{two_pi * values.at("omega_m_hz")};
  } else {
    p.anisotropy = SqueezeAmplitude{values.at("r_m")};
  }

  const bool has_lambda = values.contains("lambda_hz_per_t");
  const bool has_gamma = values.contains("gamma_hz_per_t");
  const bool has_spins = values.contains("spin_number");
  if (has_gamma != has_spins) {
    throw ParameterError("'gamma_hz_per_t' and 'spin_number' must be given together");
  }
  if (has_lambda == has_gamma) {
    throw ParameterError("give either 'lambda_hz_per_t' or 'gamma_hz_per_t' with 'spin_number'");
  }
  p.lambda_coupling = has_lambda ? two_pi * values.at("lambda_hz_per_t")
                                 : field_coupling_from_spins(two_pi * values.at("gamma_hz_per_t"),
                                                             values.at("spin_number"));

  const bool has_wl = values.contains("omega_l_hz");
  const bool has_wb = values.contains("omega_b_hz");
  if (has_wl != has_wb) throw ParameterError("'omega_l_hz' and 'omega_b_hz' must be given together");
  if (!has_wl && (values.contains("e_l") || values.contains("e_b"))) {
    throw ParameterError("drive amplitudes given without drive frequencies");
  }
  if (has_wl) {
    p.drive = DriveRecord{two_pi * values.at("omega_l_hz"), two_pi * values.at("omega_b_hz"),
                          get("e_l", 0.0), get("e_b", 0.0)};
  }

  validate(p);
  return p;
}

SystemParameters load_parameter_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open parameter file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_parameters(buffer.str());
}

std::string format_parameters(const SystemParameters& p) {
  std::ostringstream out;
  out.precision(17);
  const auto hz = [](double w) { return w / two_pi; };
  out << "omega_a_hz = " << hz(p.omega_a) << '\n';
  out << "omega_0_hz = " << hz(p.omega_0) << '\n';
  if (const auto* c = std::get_if<AnisotropyCoefficient>(&p.anisotropy)) {
    out << "omega_m_hz = " << hz(c->omega_m) << '\n';
  } else {
    out << "r_m = " << std::get<SqueezeAmplitude>(p.anisotropy).r_m << '\n';
  }
  out << "g0_hz = " << hz(p.g_0) << '\n';
  out << "mod_amplitude = " << p.mod_amplitude << '\n';
  out << "kappa_a_hz = " << hz(p.kappa_a) << '\n';
  out << "kappa_m_hz = " << hz(p.kappa_m) << '\n';
  out << "lambda_hz_per_t = " << hz(p.lambda_coupling) << '\n';
  out << "temperature_k = " << p.temperature << '\n';
  out << "delta_a_hz = " << hz(p.delta_a) << '\n';
  out << "delta_0p_hz = " << hz(p.delta_0p) << '\n';
  if (p.drive) {
    out << "omega_l_hz = " << hz(p.drive->omega_l) << '\n';
    out << "omega_b_hz = " << hz(p.drive->omega_b) << '\n';
    out << "e_l = " << p.drive->e_l << '\n';
    out << "e_b = " << p.drive->e_b << '\n';
  }
  return out.str();
}

SystemParameters baseline_parameters() {
  SystemParameters p;
  p.omega_a = two_pi * 37.5e9;
  p.omega_0 = two_pi * 37.5e9;
  p.anisotropy = SqueezeAmplitude{0.0};
  p.g_0 = two_pi * 2.5e9;
  p.mod_amplitude = 1.0;
  p.kappa_a = two_pi * 16.5e6;
  p.kappa_m = two_pi * 15e6;
  p.lambda_coupling = two_pi * 14.0 * std::sqrt(17.5) * 1e12;
  p.temperature = 0.05;
  return p;
}

}  // namespace magsense
