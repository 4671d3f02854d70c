#pragma once

#include <complex>
#include <string>
#include <vector>

namespace tunneltime {

// Units: c = 1, mu = 1. Fields are real scalars; H = n(omega) E per frequency.

enum class MediumModel { vacuum, lorentz, plasma };

struct MediumSpec {
  MediumModel model = MediumModel::vacuum;
  double resonance = 0.0;  // omega_0 (lorentz)
  double strength = 0.0;   // omega_p
  double damping = 0.0;    // gamma
  double thickness = 1.0;  // L
};

/// Gaussian-envelope carrier E(t) = exp(-(t - center)^2 / (2 duration^2)) cos(carrier (t - center))
/// sampled at t_j = j * time_span / n_samples.
struct PulseSpec {
  double carrier = 1.0;
  double duration = 10.0;
  int n_samples = 4096;
  double time_span = 400.0;
  double center = 100.0;
};

std::vector<std::string> validate(const MediumSpec& medium);
std::vector<std::string> validate(const PulseSpec& pulse);

std::complex<double> permittivity(const MediumSpec& medium, double omega);
/// sqrt(permittivity) on the Im(n) >= 0 branch.
std::complex<double> refractive_index(const MediumSpec& medium, double omega);
/// dn/domega = (deps/domega) / (2 n).
std::complex<double> refractive_index_derivative(const MediumSpec& medium, double omega);

struct PlaneFields {
  std::vector<double> e;
  std::vector<double> h;
};

struct PropagationResult {
  std::vector<double> time;
  PlaneFields entry;
  PlaneFields exit;
};

/// Spectral propagation through the index-matched slab. Throws Error{grid}
/// when the input or output leaks more than 1e-6 (relative) into the edge of
/// the spectral or temporal window.
PropagationResult propagate(const PulseSpec& pulse, const MediumSpec& medium);

/// First temporal moment of the Poynting flux E*H; Error{validation} on zero net flux.
double centroid_time(const std::vector<double>& time, const PlaneFields& fields);

struct DelayReport {
  double t_in = 0.0;
  double t_out = 0.0;
  double delta_t = 0.0;
  double delta_t_group = 0.0;
  double delta_t_reshape = 0.0;
  double residual = 0.0;
  double relative_residual = 0.0;  // |residual| / max(|delta_t|, 1e-3 duration)
  bool residual_flagged = false;   // relative_residual above 1e-6
  double evanescent_fraction = 0.0;  // input spectral energy where Re(eps) < 0
  bool evanescent_regime = false;
  bool luminal = true;               // t_out >= t_in
  double transmitted_energy = 0.0;   // exit / entry Poynting energy
};

DelayReport delay_decomposition(const PulseSpec& pulse, const MediumSpec& medium);

/// |sum x^2 - spectral energy| / sum x^2 for a real signal.
double parseval_mismatch(const std::vector<double>& signal);

struct DetectorCheck {
  double centroid = 0.0;    // Poynting centroid at the detector face
  double absorption = 0.0;  // centroid of the absorbed power sigma E^2
  double relative_difference = 0.0;
};

/// Arrival time read off a thin, weakly conducting detector slab
/// (eps = 1 + i sigma / omega) placed at the exit plane, compared with the
/// Poynting centroid of the field incident on it.
DetectorCheck detector_cross_check(const PulseSpec& pulse, const MediumSpec& medium, double sigma,
                                   double detector_thickness);

}  // namespace tunneltime
