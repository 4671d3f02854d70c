#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "tunneltime/first_passage.hpp"

namespace tunneltime::testing {

/// Brute force: dense matrix exponential of the complex generator, then
/// explicit projector products, independent of the eigendecomposition path.
inline std::vector<double> dense_survival(const LatticeSpec& s) {
  const int n = s.n_sites;
  Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    gen(i, i + 1) = std::complex<double>(0.0, s.hopping * s.tau);  // -i * (-J) * tau
    gen(i + 1, i) = std::complex<double>(0.0, s.hopping * s.tau);
  }
  const Eigen::MatrixXcd u = gen.exp();
  Eigen::MatrixXcd proj = Eigen::MatrixXcd::Identity(n, n);
  for (int d : s.detector_sites) proj(d, d) = 0.0;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(n);
  psi(s.initial_site) = 1.0;
  std::vector<double> out;
  for (int step = 0; step < s.n_steps; ++step) {
    psi = proj * (u * psi);
    out.push_back(psi.squaredNorm());
  }
  return out;
}

}  // namespace tunneltime::testing
