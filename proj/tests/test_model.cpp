#include <cmath>
#include <numbers>
#include <random>

#include "magsense/errors.hpp"
#include "support.hpp"

using namespace magsense;
using testing::rel_diff;

TEST_SUITE("model") {
  TEST_CASE("thermal occupation against high-precision values") {
    const double w = constants::two_pi * 37.5e9;
    CHECK(rel_diff(thermal_occupation(w, 0.05), 2.3327281435890292e-16) < 1e-12);
    CHECK(rel_diff(thermal_occupation(w, 280.0), 155.08062517894427) < 1e-13);
    CHECK(thermal_occupation(w, 0.0) == 0.0);
    // high-temperature limit kT/(hbar w) - 1/2
    const double high = constants::k_B * 280.0 / (constants::hbar * w);
    CHECK(rel_diff(high, 155.58008954950612) < 1e-14);
    CHECK(std::abs(thermal_occupation(w, 280.0) - (high - 0.5)) < 1e-3);
  }

  TEST_CASE("thermal occupation is monotone in temperature and continuous through the series branch") {
    const double w = constants::two_pi * 1e6;
    double prev = 0.0;
    for (double t = 1e-6; t < 1e3; t *= 1.7) {
      const double n = thermal_occupation(w, t);
      CHECK(n >= prev);
      prev = n;
    }
    // x straddling 1e-6, where the evaluation switches to 1/x - 1/2
    const double t_switch = constants::hbar * w / (constants::k_B * 1e-6);
    const double lo = thermal_occupation(w, t_switch * (1 - 1e-9));
    const double hi = thermal_occupation(w, t_switch * (1 + 1e-9));
    CHECK(rel_diff(lo, hi) < 1e-8);
  }

  TEST_CASE("squeeze amplitude from anisotropy") {
    CHECK(rel_diff(derive_squeeze_amplitude(1.0, 0.5), 0.27465307216702742) < 1e-15);
    CHECK(derive_squeeze_amplitude(1.0, 0.0) == 0.0);
    CHECK_THROWS_AS(derive_squeeze_amplitude(1.0, 1.0), DomainError);
    CHECK_THROWS_AS(derive_squeeze_amplitude(1.0, -1.5), DomainError);
  }

  TEST_CASE("anisotropy round trip") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> r(0.0, 2.0), w(1e6, 1e12);
    for (int i = 0; i < 500; ++i) {
      const double r_m = r(rng), w0 = w(rng);
      const double back = derive_squeeze_amplitude(w0, anisotropy_from_squeeze(w0, r_m));
      CHECK(std::abs(back - r_m) < 1e-10);
    }
  }

  TEST_CASE("r_m is strictly increasing in omega_m") {
    double prev = -1.0;
    for (double x = 0.0; x < 0.999; x += 0.01) {
      const double r = derive_squeeze_amplitude(1.0, x);
      CHECK(r > prev);
      prev = r;
    }
  }

  TEST_CASE("derived parameters at r_m = 1.5") {
    const auto dp = testing::baseline_dp(1.5);
    CHECK(rel_diff(dp.xi, 20.085536923187668) < 1e-15);
    CHECK(rel_diff(dp.g_prime / constants::two_pi, 11204222675.845162) < 1e-14);
    CHECK(rel_diff(dp.omega_0_prime / constants::two_pi, 3724797278.2287453) < 1e-14);
    CHECK(rel_diff(dp.lambda_prime, dp.lambda * std::exp(1.5)) < 1e-15);
    CHECK(dp.at_backaction_evading_point());
  }

  TEST_CASE("r_m = 0 leaves everything unamplified") {
    const auto dp = testing::baseline_dp(0.0);
    const auto p = baseline_parameters();
    CHECK(dp.xi == 1.0);
    CHECK(dp.g_prime == p.bare_coupling());
    CHECK(dp.omega_0_prime == p.omega_0);
    CHECK(dp.lambda_prime == dp.lambda);
  }

  TEST_CASE("spin-number coupling and bias field") {
    const double gamma = constants::two_pi * 28e9;
    CHECK(rel_diff(field_coupling_from_spins(gamma, 4.0), gamma * std::sqrt(20.0) / 2.0) < 1e-15);
    CHECK(anisotropy_from_bias_field(2.0, 3.0, 1.0) == 5.0);
  }

  TEST_CASE("validation rejects non-physical inputs") {
    auto p = baseline_parameters();
    CHECK_NOTHROW(validate(p));
    auto bad = p;
    bad.kappa_m = 0.0;
    CHECK_THROWS_AS(validate(bad), ParameterError);
    bad = p;
    bad.kappa_a = -1.0;
    CHECK_THROWS_AS(validate(bad), ParameterError);
    bad = p;
    bad.temperature = -0.1;
    CHECK_THROWS_AS(validate(bad), ParameterError);
    bad = p;
    bad.temperature = std::nan("");
    CHECK_THROWS_AS(validate(bad), ParameterError);
    bad = with_squeeze(p, -0.1);
    CHECK_THROWS_AS(validate(bad), ParameterError);
    bad = p;
    bad.anisotropy = AnisotropyCoefficient{2.0 * p.omega_0};
    CHECK_THROWS_AS(derived_parameters(bad), DomainError);
  }

  TEST_CASE("rotating-wave warning") {
    auto p = with_squeeze(baseline_parameters(), 1.5);
    CHECK(validation_warnings(p).empty());
    p.drive = DriveRecord{constants::two_pi * 1e9, constants::two_pi * 1e9, 0.0, 0.0};
    CHECK(validation_warnings(p).size() == 1);
    p.drive = DriveRecord{constants::two_pi * 200e12, constants::two_pi * 37.5e9, 1.0, 1.0};
    CHECK(validation_warnings(p).empty());
  }
}
