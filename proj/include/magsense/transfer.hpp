#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>

#include "magsense/errors.hpp"
#include "magsense/model.hpp"

namespace magsense {

/// State ordering of the quadrature fluctuation vector.
enum Quadrature : int { kMagnonX = 0, kMagnonP = 1, kCavityX = 2, kCavityP = 3 };

template <typename Scalar>
using Matrix4 = Eigen::Matrix<Scalar, 4, 4>;

/// Linear Langevin system  d/dt x = drift * x + input_gain * x_in  over (X_M, P_M, X_a, P_a).
template <typename Scalar>
struct DriftSystem {
  Matrix4<Scalar> drift;
  Matrix4<Scalar> input_gain;
};

/// Coefficients of the output phase quadrature on the four input channels
/// (X'_M, P'_M, X_a, P_a) at one analysis frequency.
template <typename Scalar>
struct TransferResponse {
  std::complex<Scalar> k1, k2, k3, k4;
  Scalar omega{};

  const std::complex<Scalar>& operator[](int i) const {
    switch (i) {
      case 0: return k1;
      case 1: return k2;
      case 2: return k3;
      default: return k4;
    }
  }
};

using DriftSystemd = DriftSystem<double>;
using TransferResponsed = TransferResponse<double>;

template <typename Scalar = double>
DriftSystem<Scalar> drift_system(const DerivedParameters& dp) {
  const Scalar km = Scalar(dp.kappa_m);
  const Scalar ka = Scalar(dp.kappa_a);
  const Scalar d0 = Scalar(dp.delta_0p);
  const Scalar da = Scalar(dp.delta_a);
  const Scalar two_g = Scalar(2) * Scalar(dp.g_prime);

  DriftSystem<Scalar> sys;
  // clang-format off
  sys.drift <<  -km / 2,  d0,       Scalar(0), Scalar(0),
                -d0,      -km / 2,  -two_g,    Scalar(0),
                Scalar(0), Scalar(0), -ka / 2,  da,
                -two_g,   Scalar(0), -da,       -ka / 2;
  // clang-format on
  sys.input_gain.setZero();
  sys.input_gain.diagonal() << std::sqrt(km), std::sqrt(km), std::sqrt(ka), std::sqrt(ka);
  return sys;
}

/// Susceptibility chi(omega) = (-i omega I - drift)^{-1} input_gain, Fourier convention
/// O(omega) = \int dt O(t) e^{i omega t}.
template <typename Scalar>
Matrix4<std::complex<Scalar>> susceptibility(const DriftSystem<Scalar>& sys, Scalar omega) {
  using Complex = std::complex<Scalar>;
  const Matrix4<Complex> system =
      Complex(Scalar(0), -omega) * Matrix4<Complex>::Identity() - sys.drift.template cast<Complex>();
  const Eigen::FullPivLU<Matrix4<Complex>> lu(system);
  if (!lu.isInvertible()) {
    std::ostringstream msg;
    msg << "singular Langevin system at omega = " << static_cast<double>(omega);
    throw NumericalError(msg.str());
  }
  return lu.solve(sys.input_gain.template cast<Complex>());
}

/// Output phase-quadrature response from the drift-matrix solve and the input-output
/// relation  P_out = sqrt(kappa_a) P_a - P_in.
template <typename Scalar = double>
TransferResponse<Scalar> frequency_response(const DerivedParameters& dp, Scalar omega) {
  const auto sys = drift_system<Scalar>(dp);
  const auto chi = susceptibility(sys, omega);
  const Scalar root_ka = std::sqrt(Scalar(dp.kappa_a));
  const auto row = (root_ka * chi.row(kCavityP)).eval();
  TransferResponse<Scalar> r;
  r.k1 = row(kMagnonX);
  r.k2 = row(kMagnonP);
  r.k3 = row(kCavityX);
  r.k4 = row(kCavityP) - Scalar(1);
  r.omega = omega;
  return r;
}

/// Rational closed forms for K1..K4, kept as an independent comparison
/// surface. K4 here does not satisfy |K4| = 1 in the passive limit; see README.
template <typename Scalar = double>
TransferResponse<Scalar> closed_form_response(const DerivedParameters& dp, Scalar omega) {
  using Complex = std::complex<Scalar>;
  const Scalar km = Scalar(dp.kappa_m);
  const Scalar ka = Scalar(dp.kappa_a);
  const Scalar d0 = Scalar(dp.delta_0p);
  const Scalar da = Scalar(dp.delta_a);
  const Scalar g = Scalar(dp.g_prime);
  const Complex i_two_w(Scalar(0), Scalar(2) * omega);

  const Complex cavity = ka - i_two_w;     // kappa_a - 2 i w
  const Complex magnon = km - i_two_w;     // kappa_m - 2 i w
  const Complex magnon_poly = magnon * magnon + Scalar(4) * d0 * d0;
  const Scalar cavity_poly = Scalar(4) * omega * omega + ka * ka - Scalar(4) * da * da;

  const Complex cross_term = Scalar(64) * d0 * da * g * g;
  const Complex product_term = magnon_poly * cavity_poly;
  const Complex denominator = cross_term + product_term;
  const Scalar scale = std::max(std::abs(cross_term), std::abs(product_term));
  if (!(std::abs(denominator) >= Scalar(1e-12) * scale) || scale == Scalar(0)) {
    std::ostringstream msg;
    msg << "closed-form response has a pole at omega = " << static_cast<double>(omega);
    throw PoleError(msg.str(), static_cast<double>(omega));
  }

  const Scalar root = std::sqrt(ka * km);
  TransferResponse<Scalar> r;
  r.k1 = Scalar(8) * g * root * cavity * magnon / denominator;
  r.k2 = Scalar(16) * g * d0 * root * cavity / denominator;
  r.k3 = Scalar(4) * ka * (Scalar(-16) * g * g * d0 + da * magnon_poly) / denominator;
  r.k4 = Scalar(-1) - Scalar(2) * ka * cavity * magnon_poly / denominator;
  r.omega = omega;
  return r;
}

/// Steady-state covariance Sigma solving  drift Sigma + Sigma drift^T + diffusion = 0.
/// Uses the 16x16 Kronecker form, fine for a 4-mode system.
template <typename Scalar>
Matrix4<Scalar> lyapunov_covariance(const Matrix4<Scalar>& drift, const Matrix4<Scalar>& diffusion) {
  using Big = Eigen::Matrix<Scalar, 16, 16>;
  const Matrix4<Scalar> id = Matrix4<Scalar>::Identity();
  Big op;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      // vec(A S) = (I kron A) vec S ; vec(S A^T) = (A kron I) vec S  (column-major vec)
      op.template block<4, 4>(4 * j, 4 * i) = id(j, i) * drift + drift(j, i) * id;
    }
  }
  const Eigen::Matrix<Scalar, 16, 1> rhs = -Eigen::Map<const Eigen::Matrix<Scalar, 16, 1>>(diffusion.data());
  const Eigen::Matrix<Scalar, 16, 1> solution = op.fullPivLu().solve(rhs);
  Matrix4<Scalar> sigma = Eigen::Map<const Matrix4<Scalar>>(solution.data());
  return (sigma + sigma.transpose()) / Scalar(2);
}

}  // namespace magsense
