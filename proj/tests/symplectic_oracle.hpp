// Brute-force symplectic spectra of Gaussian covariance matrices.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <vector>

namespace oracle {

// Positive symplectic eigenvalues of a 2n x 2n covariance matrix, as the
// moduli of the eigenvalues of i Omega sigma (each appears twice).
inline std::vector<double> symplectic_spectrum(const Eigen::MatrixXd& sigma) {
  const Eigen::Index n = sigma.rows() / 2;
  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(sigma.rows(), sigma.cols());
  for (Eigen::Index k = 0; k < n; ++k) {
    omega(2 * k, 2 * k + 1) = 1.0;
    omega(2 * k + 1, 2 * k) = -1.0;
  }
  const Eigen::MatrixXcd m = std::complex<double>(0.0, 1.0) * (omega * sigma).cast<std::complex<double>>();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  std::vector<double> mags;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    mags.push_back(std::abs(solver.eigenvalues()(i)));
  }
  std::sort(mags.begin(), mags.end(), std::greater<>());
  std::vector<double> out;
  for (std::size_t i = 0; i < mags.size(); i += 2) out.push_back(0.5 * (mags[i] + mags[i + 1]));
  return out;
}

// nu_1..nu_4 for an entangling-cloner channel of transmittance t and excess
// noise xi (channel input), modulation v_a, reverse reconciliation with
// homodyne detection on x_B.
inline std::array<double, 4> symplectic_eigenvalues(double v_a, double t, double xi) {
  const double v = v_a + 1.0;
  const double c = std::sqrt(t * (v * v - 1.0));
  const double b = t * (v - 1.0) + 1.0 + t * xi;
  Eigen::Matrix4d sigma;
  sigma << v, 0, c, 0,
           0, v, 0, -c,
           c, 0, b, 0,
           0, -c, 0, b;
  const auto ab = symplectic_spectrum(sigma);

  const Eigen::Matrix2d sa = sigma.topLeftCorner<2, 2>();
  const Eigen::Matrix2d sb = sigma.bottomRightCorner<2, 2>();
  const Eigen::Matrix2d sc = sigma.topRightCorner<2, 2>();
  Eigen::Matrix2d proj = Eigen::Matrix2d::Zero();
  proj(0, 0) = 1.0;
  const Eigen::Matrix2d pinv =
      Eigen::CompleteOrthogonalDecomposition<Eigen::Matrix2d>(proj * sb * proj).pseudoInverse();
  const Eigen::MatrixXd cond = sa - sc * pinv * sc.transpose();
  const auto a_given_b = symplectic_spectrum(cond);
  // the remaining mode of the purification is left in vacuum by the
  // homodyne projection
  return {ab[0], ab[1], a_given_b[0], 1.0};
}

}  // namespace oracle
