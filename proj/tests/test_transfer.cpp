#include <cmath>
#include <complex>
#include <random>

#include "magsense/errors.hpp"
#include "magsense/transfer.hpp"
#include "support.hpp"

using namespace magsense;
using testing::rel_diff;

namespace {

DerivedParameters random_detuned(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.1, 3.0), d(-2.0, 2.0);
  DerivedParameters dp;
  dp.kappa_m = u(rng);
  dp.kappa_a = u(rng);
  dp.g_prime = 0.5 * u(rng);
  dp.delta_a = d(rng);
  dp.delta_0p = d(rng);
  return dp;
}

bool hurwitz(const Matrix4<double>& a) {
  return (Eigen::EigenSolver<Matrix4<double>>(a).eigenvalues().real().array() < 0.0).all();
}

}  // namespace

TEST_SUITE("transfer") {
  TEST_CASE("drift matrix layout") {
    DerivedParameters dp;
    dp.kappa_m = 2;
    dp.kappa_a = 4;
    dp.g_prime = 3;
    dp.delta_a = 5;
    dp.delta_0p = 7;
    const auto sys = drift_system(dp);
    Matrix4<double> expected;
    expected << -1, 7, 0, 0, -7, -1, -6, 0, 0, 0, -2, 5, -6, 0, -5, -2;
    CHECK(sys.drift == expected);
    CHECK(sys.input_gain.diagonal().isApprox(Eigen::Vector4d(std::sqrt(2.0), std::sqrt(2.0), 2, 2)));
  }

  TEST_CASE("backaction evasion on both routes") {
    for (double r_m : {0.0, 1.5}) {
      const auto dp = testing::baseline_dp(r_m);
      for (int i = 0; i <= 1000; ++i) {
        const double w = 10.0 * dp.kappa_m * i / 1000.0;
        for (const auto& k : {frequency_response(dp, w), closed_form_response(dp, w)}) {
          CHECK(std::abs(k.k2) < 1e-12 * std::abs(k.k1));
          CHECK(std::abs(k.k3) < 1e-12 * std::abs(k.k1));
        }
      }
    }
  }

  TEST_CASE("reference |k1(0)|^2") {
    const auto dp = testing::baseline_dp(1.5);
    CHECK(rel_diff(std::norm(frequency_response(dp, 0.0).k1), 32461473.815252796) < 1e-12);
    CHECK(rel_diff(std::norm(closed_form_response(dp, 0.0).k1), 32461473.815252796) < 1e-12);
  }

  TEST_CASE("cavity reflection is all-pass at zero detuning") {
    const auto dp = testing::baseline_dp(1.5);
    for (double x : {0.0, 0.3, 1.0, 7.0, 100.0}) {
      CHECK(std::abs(std::abs(frequency_response(dp, x * dp.kappa_m).k4) - 1.0) < 1e-12);
    }
  }

  TEST_CASE("closed-form K4 reads -3 at resonance") {
    auto dp = testing::baseline_dp(0.0);
    dp.g_prime = 0.0;
    CHECK(std::abs(closed_form_response(dp, 0.0).k4 - std::complex<double>(-3.0, 0.0)) < 1e-12);
    CHECK(std::abs(std::abs(frequency_response(dp, 0.0).k4) - 1.0) < 1e-14);
  }

  TEST_CASE("routes agree in magnitude at zero detuning for random rates") {
    std::mt19937_64 rng(11);
    for (int n = 0; n < 200; ++n) {
      auto dp = random_detuned(rng);
      dp.delta_a = dp.delta_0p = 0.0;
      const double w = std::uniform_real_distribution<double>(-5.0, 5.0)(rng);
      const auto a = frequency_response(dp, w);
      const auto c = closed_form_response(dp, w);
      CHECK(rel_diff(std::abs(a.k1), std::abs(c.k1)) < 1e-9);
      CHECK(std::abs(c.k2) < 1e-12 * std::abs(c.k1));
      CHECK(std::abs(c.k3) < 1e-12 * std::abs(c.k1));
    }
  }

  TEST_CASE("closed forms disagree off the backaction-evading point") {
    // Only the zero-detuning reduction of the closed forms matches the drift solve.
    DerivedParameters dp;
    dp.kappa_m = 1.0;
    dp.kappa_a = 1.3;
    dp.g_prime = 0.4;
    dp.delta_a = 0.8;
    const double w = 0.7;
    CHECK(rel_diff(std::abs(frequency_response(dp, w).k1), std::abs(closed_form_response(dp, w).k1)) > 1e-3);
  }

  TEST_CASE("conjugate symmetry and evenness of |k|") {
    const auto dp = testing::baseline_dp(1.0);
    for (double x : {0.1, 0.7, 2.5}) {
      const auto p = frequency_response(dp, x * dp.kappa_m);
      const auto m = frequency_response(dp, -x * dp.kappa_m);
      for (int i = 0; i < 4; ++i) CHECK(std::abs(p[i] - std::conj(m[i])) < 1e-12 * (1 + std::abs(p[i])));
      const auto cp = closed_form_response(dp, x * dp.kappa_m);
      const auto cm = closed_form_response(dp, -x * dp.kappa_m);
      for (int i = 0; i < 4; ++i) CHECK(rel_diff(std::abs(cp[i]) + 1e-300, std::abs(cm[i]) + 1e-300) < 1e-12);
    }
  }

  TEST_CASE("|k1| is continuous on a fine grid") {
    const auto dp = testing::baseline_dp(1.5);
    double prev = std::abs(frequency_response(dp, 0.0).k1);
    for (int i = 1; i <= 2000; ++i) {
      const double cur = std::abs(frequency_response(dp, 5.0 * dp.kappa_m * i / 2000.0).k1);
      CHECK(rel_diff(cur, prev) < 0.01);
      prev = cur;
    }
  }

  TEST_CASE("scalar types agree") {
    const auto dp = testing::baseline_dp(1.5);
    const auto d = frequency_response<double>(dp, 1.3 * dp.kappa_m);
    const auto l = frequency_response<long double>(dp, 1.3L * (long double)dp.kappa_m);
    CHECK(std::abs(std::complex<double>(l.k1) - d.k1) < 1e-12 * std::abs(d.k1));
    const auto f = frequency_response<float>(dp, float(1.3 * dp.kappa_m));
    CHECK(std::abs(std::complex<double>(f.k1) - d.k1) < 1e-3 * std::abs(d.k1));
  }

  TEST_CASE("closed form reports poles") {
    DerivedParameters dp;
    dp.kappa_m = 1.0;
    dp.kappa_a = 2.0;
    dp.delta_a = 1.0;  // kappa_a^2 - 4 delta_a^2 = 0 at omega = 0
    dp.g_prime = 0.3;
    CHECK_THROWS_AS(closed_form_response(dp, 0.0), PoleError);
    try {
      closed_form_response(dp, 0.0);
    } catch (const PoleError& e) {
      CHECK(e.omega() == 0.0);
    }
  }

  TEST_CASE("Lyapunov solution for random stable systems") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);
    int solved = 0;
    for (int trial = 0; trial < 300 && solved < 50; ++trial) {
      Matrix4<double> a;
      for (int i = 0; i < 16; ++i) a.data()[i] = n(rng);
      a -= 1.5 * Matrix4<double>::Identity();
      if (!hurwitz(a)) continue;
      Matrix4<double> l;
      for (int i = 0; i < 16; ++i) l.data()[i] = n(rng);
      const Matrix4<double> d = l * l.transpose();
      const auto s = lyapunov_covariance(a, d);
      CHECK((a * s + s * a.transpose() + d).norm() < 1e-9 * d.norm() * (1 + s.norm()));
      CHECK(Eigen::SelfAdjointEigenSolver<Matrix4<double>>(s).eigenvalues().minCoeff() > -1e-12);
      ++solved;
    }
    CHECK(solved == 50);
  }
}
