#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tunneltime/potentials.hpp"

namespace tunneltime {

/// Stroboscopically monitored particle on an open 1D tight-binding chain.
struct LatticeSpec {
  int n_sites = 3;
  double hopping = 1.0;
  int initial_site = 0;
  std::vector<int> detector_sites;
  double tau = 1.0;  // interval between measurements
  int n_steps = 1;
};

std::vector<std::string> validate(const LatticeSpec& spec);

/// Entry n-1 belongs to the n-th measurement.
struct DetectionRecord {
  std::vector<double> detection;    // p(n)
  std::vector<double> survival;     // S(n)
  std::vector<double> bookkeeping;  // sum_{m<=n} p(m) + S(n)
};

/// Nearest-neighbour hopping matrix (-J off the diagonal, hard walls).
Eigen::MatrixXd hopping_matrix(int n_sites, double hopping);

/// U = exp(-i H tau) from the eigendecomposition of the hopping matrix.
Eigen::MatrixXcd step_propagator(const LatticeSpec& spec);

DetectionRecord evolve_project(const LatticeSpec& spec);

/// Survival ||psi(n tau)||^2, n = 1..n_steps, under H - i gamma sum_d |d><d|.
std::vector<double> evolve_nonhermitian(const LatticeSpec& spec, double gamma);

struct PowerLawFit {
  double exponent = 0.0;
  double log_prefactor = 0.0;
  double residual = 0.0;  // RMS deviation of log S from the fitted line
};

/// Least-squares line through (log n, log S(n)) for n in the half-open window
/// [begin, end) of measurement numbers (n starts at 1).
PowerLawFit fit_power_law(const std::vector<double>& survival, IndexRange window);

/// Measurements between the first arrival of the ballistic front (speed
/// 2 hopping) at a detector and the first return of a wall-reflected front.
IndexRange pre_recurrence_window(const LatticeSpec& spec);

struct ZenoPoint {
  double tau = 0.0;
  int n_measurements = 0;
  double survival = 1.0;
};

/// S(t_fixed) for each interval with n = round(t_fixed / tau). Points run in
/// parallel on up to `workers` threads (0: hardware concurrency).
std::vector<ZenoPoint> zeno_scan(const LatticeSpec& spec, const std::vector<double>& taus,
                                 double t_fixed, unsigned workers = 0);

struct GammaCalibration {
  double gamma = 0.0;
  double max_relative_deviation = 0.0;  // over the window
  std::vector<double> deviations;       // one per candidate gamma
};

/// Picks the candidate gamma whose non-Hermitian survival best matches the
/// projective one over `window`.
GammaCalibration calibrate_gamma(const LatticeSpec& spec, const std::vector<double>& gammas,
                                 IndexRange window, unsigned workers = 0);

}  // namespace tunneltime
