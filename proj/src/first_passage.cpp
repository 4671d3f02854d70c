#include "tunneltime/first_passage.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "tunneltime/error.hpp"
#include "tunneltime/parallel.hpp"

namespace tunneltime {

namespace {

using cplx = std::complex<double>;

void require_valid(const LatticeSpec& spec) {
  const auto problems = validate(spec);
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid lattice spec:";
  for (const auto& p : problems) os << ' ' << p << ';';
  throw Error(ErrorCode::validation, os.str());
}

Eigen::VectorXcd initial_state(const LatticeSpec& spec) {
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(spec.n_sites);
  psi(spec.initial_site) = 1.0;
  return psi;
}

}  // namespace

std::vector<std::string> validate(const LatticeSpec& spec) {
  std::vector<std::string> out;
  if (spec.n_sites < 3) out.push_back("n_sites must be >= 3");
  if (!(spec.hopping > 0.0) || !std::isfinite(spec.hopping)) out.push_back("hopping must be finite and > 0");
  if (spec.initial_site < 0 || spec.initial_site >= spec.n_sites) out.push_back("initial_site out of range");
  if (spec.detector_sites.empty()) out.push_back("detector_sites must be non-empty");
  for (int d : spec.detector_sites)
    if (d < 0 || d >= spec.n_sites) {
      out.push_back("detector site " + std::to_string(d) + " out of range");
    }
  if (std::set<int>(spec.detector_sites.begin(), spec.detector_sites.end()).size() != spec.detector_sites.size())
    out.push_back("detector_sites contains duplicates");
  if (!(spec.tau > 0.0) || !std::isfinite(spec.tau)) out.push_back("tau must be finite and > 0");
  if (spec.n_steps < 1) out.push_back("n_steps must be >= 1");
  return out;
}

Eigen::MatrixXd hopping_matrix(int n_sites, double hopping) {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n_sites, n_sites);
  for (int i = 0; i + 1 < n_sites; ++i) {
    h(i, i + 1) = -hopping;
    h(i + 1, i) = -hopping;
  }
  return h;
}

Eigen::MatrixXcd step_propagator(const LatticeSpec& spec) {
  require_valid(spec);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hopping_matrix(spec.n_sites, spec.hopping));
  const Eigen::MatrixXcd v = eig.eigenvectors().cast<cplx>();
  Eigen::VectorXcd phases(spec.n_sites);
  for (int i = 0; i < spec.n_sites; ++i) phases(i) = std::exp(cplx{0.0, -eig.eigenvalues()(i) * spec.tau});
  return v * phases.asDiagonal() * v.transpose();
}

DetectionRecord evolve_project(const LatticeSpec& spec) {
  const Eigen::MatrixXcd u = step_propagator(spec);
  Eigen::VectorXcd psi = initial_state(spec);
  DetectionRecord rec;
  rec.detection.reserve(spec.n_steps);
  rec.survival.reserve(spec.n_steps);
  rec.bookkeeping.reserve(spec.n_steps);
  double detected = 0.0;
  for (int n = 0; n < spec.n_steps; ++n) {
    psi = u * psi;
    double p = 0.0;
    for (int d : spec.detector_sites) {
      p += std::norm(psi(d));
      psi(d) = 0.0;
    }
    detected += p;
    const double s = psi.squaredNorm();
    rec.detection.push_back(p);
    rec.survival.push_back(s);
    rec.bookkeeping.push_back(detected + s);
  }
  return rec;
}

std::vector<double> evolve_nonhermitian(const LatticeSpec& spec, double gamma) {
  require_valid(spec);
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error(ErrorCode::validation, "gamma must be finite and > 0");
  Eigen::MatrixXcd h = hopping_matrix(spec.n_sites, spec.hopping).cast<cplx>();
  for (int d : spec.detector_sites) h(d, d) -= cplx{0.0, gamma};
  const Eigen::MatrixXcd step = (cplx{0.0, -spec.tau} * h).exp();
  Eigen::VectorXcd psi = initial_state(spec);
  std::vector<double> survival;
  survival.reserve(spec.n_steps);
  for (int n = 0; n < spec.n_steps; ++n) {
    psi = step * psi;
    survival.push_back(psi.squaredNorm());
  }
  return survival;
}

PowerLawFit fit_power_law(const std::vector<double>& survival, IndexRange window) {
  if (window.begin < 1 || window.end > survival.size() + 1 || window.size() < 2)
    throw Error(ErrorCode::validation, "fit_power_law: window must hold at least two measurements in range");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double m = static_cast<double>(window.size());
  for (std::size_t n = window.begin; n < window.end; ++n) {
    const double s = survival[n - 1];
    if (!(s > 0.0)) {
      std::ostringstream os;
      os << "fit_power_law: S(" << n << ") = " << s << " is not positive";
      throw Error(ErrorCode::validation, os.str());
    }
    const double x = std::log(static_cast<double>(n));
    const double y = std::log(s);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  PowerLawFit fit;
  const double denom = m * sxx - sx * sx;
  fit.exponent = (m * sxy - sx * sy) / denom;
  fit.log_prefactor = (sy - fit.exponent * sx) / m;
  double ss = 0.0;
  for (std::size_t n = window.begin; n < window.end; ++n) {
    const double r = std::log(survival[n - 1]) - fit.log_prefactor - fit.exponent * std::log(static_cast<double>(n));
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / m);
  return fit;
}

IndexRange pre_recurrence_window(const LatticeSpec& spec) {
  require_valid(spec);
  const double speed = 2.0 * spec.hopping;
  const int last = spec.n_sites - 1;
  int arrival = std::numeric_limits<int>::max();
  int recurrence = std::numeric_limits<int>::max();
  for (int d : spec.detector_sites) {
    arrival = std::min(arrival, std::abs(spec.initial_site - d));
    recurrence = std::min(recurrence, spec.initial_site + d);
    recurrence = std::min(recurrence, (last - spec.initial_site) + (last - d));
  }
  const double t_start = std::max(2.0 * arrival / speed, 1.0 / spec.hopping);
  const double t_stop = recurrence / speed;
  IndexRange w;
  w.begin = static_cast<std::size_t>(std::max(1.0, std::ceil(t_start / spec.tau)));
  w.end = static_cast<std::size_t>(std::floor(t_stop / spec.tau)) + 1;
  w.end = std::min<std::size_t>(w.end, static_cast<std::size_t>(spec.n_steps) + 1);
  if (w.end < w.begin) w.end = w.begin;
  return w;
}

std::vector<ZenoPoint> zeno_scan(const LatticeSpec& spec, const std::vector<double>& taus, double t_fixed,
                                 unsigned workers) {
  require_valid(spec);
  if (!(t_fixed > 0.0)) throw Error(ErrorCode::validation, "zeno_scan: t_fixed must be > 0");
  for (double tau : taus)
    if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorCode::validation, "zeno_scan: every tau must be > 0");
  std::vector<ZenoPoint> out(taus.size());
  parallel_for(taus.size(), workers, [&](std::size_t i) {
    LatticeSpec s = spec;
    s.tau = taus[i];
    const int n = static_cast<int>(std::lround(t_fixed / taus[i]));
    out[i].tau = taus[i];
    out[i].n_measurements = n;
    if (n == 0) {
      out[i].survival = 1.0;
      return;
    }
    s.n_steps = n;
    out[i].survival = evolve_project(s).survival.back();
  });
  return out;
}

GammaCalibration calibrate_gamma(const LatticeSpec& spec, const std::vector<double>& gammas, IndexRange window,
                                 unsigned workers) {
  require_valid(spec);
  if (gammas.empty()) throw Error(ErrorCode::validation, "calibrate_gamma: no candidate gammas");
  if (window.begin < 1 || window.end > static_cast<std::size_t>(spec.n_steps) + 1 || window.empty())
    throw Error(ErrorCode::validation, "calibrate_gamma: window out of range");
  const DetectionRecord reference = evolve_project(spec);
  GammaCalibration cal;
  cal.deviations.assign(gammas.size(), 0.0);
  parallel_for(gammas.size(), workers, [&](std::size_t i) {
    const std::vector<double> s = evolve_nonhermitian(spec, gammas[i]);
    double worst = 0.0;
    for (std::size_t n = window.begin; n < window.end; ++n)
      worst = std::max(worst, std::abs(s[n - 1] - reference.survival[n - 1]) / reference.survival[n - 1]);
    cal.deviations[i] = worst;
  });
  const auto best = std::min_element(cal.deviations.begin(), cal.deviations.end());
  cal.gamma = gammas[best - cal.deviations.begin()];
  cal.max_relative_deviation = *best;
  return cal;
}

}  // namespace tunneltime
