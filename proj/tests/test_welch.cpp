#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "magsense/errors.hpp"
#include "magsense/welch.hpp"
#include "support.hpp"

using namespace magsense;

namespace {
std::vector<double> white(std::size_t n, double density, double dt, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(density / dt));
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}
}  // namespace

TEST_SUITE("welch") {
  TEST_CASE("white noise reads flat at its density") {
    const double dt = 0.01, v = 3.0;
    const auto x = white(1 << 20, v, dt, 1);
    const auto psd = welch_psd(x, dt, 1024, 0.5);
    CHECK(psd.segments == 2047);
    CHECK(psd.omega.size() == 513);
    CHECK(psd.omega(1) == doctest::Approx(2 * std::numbers::pi / (1024 * dt)));
    const double mean = psd.density.segment(1, 511).mean();
    CHECK(mean == doctest::Approx(v).epsilon(0.01));
    // each bin averages ~2000 periodograms: a few percent scatter at most
    CHECK((psd.density.segment(1, 511) / v - 1.0).abs().maxCoeff() < 0.15);
  }

  TEST_CASE("Parseval: integrated density equals the sample variance") {
    const double dt = 0.5;
    const auto x = white(1 << 18, 1.0, dt, 2);
    const auto psd = welch_psd(x, dt, 2048, 0.5);
    double var = 0.0;
    for (double v : x) var += v * v;
    var /= double(x.size());
    CHECK(integrated_power(psd) == doctest::Approx(var).epsilon(0.01));
  }

  TEST_CASE("sinusoid lands in its bin with the right power") {
    const double dt = 1e-3, amp = 2.0;
    const std::size_t len = 4096;
    const double w0 = 2 * std::numbers::pi * 100.0 / (len * dt);  // exactly bin 100
    std::vector<double> x(len * 16);
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = amp * std::sin(w0 * dt * double(i));
    const auto psd = welch_psd(x, dt, len, 0.5);
    Eigen::Index peak = 0;
    psd.density.maxCoeff(&peak);
    CHECK(peak == 100);
    CHECK(integrated_power(psd) == doctest::Approx(amp * amp / 2).epsilon(1e-6));
  }

  TEST_CASE("pooled records equal the concatenated segment average") {
    const double dt = 1.0;
    const auto a = white(8192, 1.0, dt, 3), b = white(8192, 1.0, dt, 4);
    const std::vector<std::span<const double>> both{a, b};
    const auto pooled = welch_psd(both, dt, 512, 0.5);
    const auto pa = welch_psd(a, dt, 512, 0.5), pb = welch_psd(b, dt, 512, 0.5);
    CHECK(pooled.segments == pa.segments + pb.segments);
    const Eigen::ArrayXd expect = (pa.density * double(pa.segments) + pb.density * double(pb.segments)) /
                                  double(pooled.segments);
    CHECK((pooled.density - expect).abs().maxCoeff() < 1e-12 * expect.maxCoeff());
  }

  TEST_CASE("bad arguments") {
    const std::vector<double> x(100, 1.0);
    CHECK_THROWS_AS(welch_psd(x, 1.0, 200, 0.5), ParameterError);
    CHECK_THROWS_AS(welch_psd(x, 0.0, 50, 0.5), ParameterError);
    CHECK_THROWS_AS(welch_psd(x, 1.0, 50, 1.0), ParameterError);
    CHECK_THROWS_AS(welch_psd(x, 1.0, 1, 0.0), ParameterError);
  }
}
