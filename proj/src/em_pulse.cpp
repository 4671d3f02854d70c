#include "tunneltime/em_pulse.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <fftw3.h>

#include "tunneltime/error.hpp"

namespace tunneltime {

namespace {

using cplx = std::complex<double>;
// Spectra are kept in FFTW's sign convention X_k = sum_j x_j e^{-i w_k t_j};
// the physical e^{-i w t} amplitude at w_k > 0 is conj(X_k).
using Spectrum = std::vector<cplx>;

constexpr double kLeakageTolerance = 1e-6;
constexpr double kResidualTolerance = 1e-6;

// FFTW planning is not thread-safe; execution with the new-array interface is.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

Spectrum forward(const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  std::vector<double> in(x);
  Spectrum out(n / 2 + 1);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_r2c_1d(n, in.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

std::vector<double> inverse(const Spectrum& x, int n) {
  Spectrum in(x);
  std::vector<double> out(n);
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    plan = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(in.data()), out.data(), FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(plan);
  }
  for (double& v : out) v /= n;
  return out;
}

// Bins other than DC and Nyquist stand for both +w and -w.
double multiplicity(std::size_t k, int n) { return (k == 0 || 2 * k == static_cast<std::size_t>(n)) ? 1.0 : 2.0; }

struct Grid {
  int n;
  double dt;
  std::vector<double> time;
  std::vector<double> omega;
};

Grid make_grid(const PulseSpec& pulse) {
  Grid g;
  g.n = pulse.n_samples;
  g.dt = pulse.time_span / pulse.n_samples;
  g.time.resize(g.n);
  for (int j = 0; j < g.n; ++j) g.time[j] = j * g.dt;
  g.omega.resize(g.n / 2 + 1);
  for (int k = 0; k <= g.n / 2; ++k) g.omega[k] = 2.0 * std::numbers::pi * k / (g.n * g.dt);
  return g;
}

void require(const std::vector<std::string>& problems, const char* what) {
  if (problems.empty()) return;
  std::ostringstream os;
  os << "invalid " << what << ':';
  for (const auto& p : problems) os << ' ' << p << ';';
  throw Error(ErrorCode::validation, os.str());
}

// Index at DC is not defined for a plasma; the bin is dropped instead.
bool index_defined(const MediumSpec& medium, double omega) {
  return !(omega == 0.0 && medium.model == MediumModel::plasma);
}

std::vector<cplx> index_on_grid(const MediumSpec& medium, const Grid& g) {
  std::vector<cplx> n(g.omega.size());
  for (std::size_t k = 0; k < n.size(); ++k)
    n[k] = index_defined(medium, g.omega[k]) ? refractive_index(medium, g.omega[k]) : cplx{0.0, 0.0};
  return n;
}

Spectrum times_conj(const Spectrum& x, const std::vector<cplx>& f) {
  Spectrum out(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) out[k] = x[k] * std::conj(f[k]);
  return out;
}

void check_spectral_edge(const Spectrum& x, const char* where) {
  double peak = 0.0;
  for (const cplx& v : x) peak = std::max(peak, std::abs(v));
  const std::size_t edge = std::max<std::size_t>(1, x.size() / 100);
  double tail = 0.0;
  for (std::size_t k = x.size() - edge; k < x.size(); ++k) tail = std::max(tail, std::abs(x[k]));
  if (peak > 0.0 && tail > kLeakageTolerance * peak) {
    std::ostringstream os;
    os << where << ": spectral leakage " << tail / peak << " at the Nyquist edge exceeds 1e-6; refine the time step";
    throw Error(ErrorCode::grid, os.str());
  }
}

void check_time_edge(const std::vector<double>& x, const char* where) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  const std::size_t edge = std::max<std::size_t>(1, x.size() / 100);
  double tail = 0.0;
  for (std::size_t j = 0; j < edge; ++j)
    tail = std::max({tail, std::abs(x[j]), std::abs(x[x.size() - 1 - j])});
  if (peak > 0.0 && tail > kLeakageTolerance * peak) {
    std::ostringstream os;
    os << where << ": field " << tail / peak
       << " of its peak at the edge of the time window exceeds 1e-6; widen the window or move the pulse";
    throw Error(ErrorCode::grid, os.str());
  }
}

std::vector<double> input_field(const PulseSpec& pulse, const Grid& g) {
  std::vector<double> e(g.n);
  for (int j = 0; j < g.n; ++j) {
    const double s = g.time[j] - pulse.center;
    e[j] = std::exp(-s * s / (2.0 * pulse.duration * pulse.duration)) * std::cos(pulse.carrier * s);
  }
  return e;
}

struct Propagated {
  Grid grid;
  std::vector<cplx> index;
  Spectrum entry;
  Spectrum exit;
  Spectrum attenuated;  // entry spectrum times |exp(i n w L)|
  PropagationResult fields;
};

Propagated run(const PulseSpec& pulse, const MediumSpec& medium) {
  require(validate(pulse), "pulse");
  require(validate(medium), "medium");
  Propagated p;
  p.grid = make_grid(pulse);
  const Grid& g = p.grid;
  p.index = index_on_grid(medium, g);
  const std::vector<double> e_in = input_field(pulse, g);
  check_time_edge(e_in, "entry field");
  p.entry = forward(e_in);
  check_spectral_edge(p.entry, "entry spectrum");

  p.exit.resize(p.entry.size());
  p.attenuated.resize(p.entry.size());
  for (std::size_t k = 0; k < p.entry.size(); ++k) {
    if (!index_defined(medium, g.omega[k])) {
      p.exit[k] = 0.0;
      p.attenuated[k] = 0.0;
      continue;
    }
    const cplx phase = std::exp(cplx{0.0, 1.0} * p.index[k] * g.omega[k] * medium.thickness);
    p.exit[k] = p.entry[k] * std::conj(phase);
    p.attenuated[k] = p.entry[k] * std::abs(phase);
  }
  p.fields.time = g.time;
  p.fields.entry.e = e_in;
  p.fields.entry.h = inverse(times_conj(p.entry, p.index), g.n);
  p.fields.exit.e = inverse(p.exit, g.n);
  p.fields.exit.h = inverse(times_conj(p.exit, p.index), g.n);
  check_time_edge(p.fields.exit.e, "exit field");
  return p;
}

// Centroid of the fields with spectrum x in a medium of index n, with the
// frequency derivative taken spectrally from the time moment t * x(t).
// Times are measured from origin and wrapped into half a period on either
// side, so tails that leak before the pulse are not weighted as late arrivals.
double spectral_centroid(const Spectrum& x, const std::vector<cplx>& n, const Grid& g, double origin) {
  std::vector<double> moment = inverse(x, g.n);
  const double span = g.dt * g.n;
  for (int j = 0; j < g.n; ++j) {
    const double s = g.time[j] - origin;
    moment[j] *= s - span * std::floor(s / span + 0.5);
  }
  const Spectrum y = forward(moment);
  double num = 0.0;
  double den = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double m = multiplicity(k, g.n);
    const cplx f = std::conj(x[k]);
    const cplx df = cplx{0.0, 1.0} * std::conj(y[k]);
    num += m * (std::conj(n[k]) * df * std::conj(f)).imag();
    den += m * n[k].real() * std::norm(f);
  }
  if (!(std::abs(den) > 0.0)) throw Error(ErrorCode::validation, "centroid: zero net energy flux");
  return num / den;
}

double flux_energy(const PlaneFields& f) {
  double s = 0.0;
  for (std::size_t j = 0; j < f.e.size(); ++j) s += f.e[j] * f.h[j];
  return s;
}

}  // namespace

std::vector<std::string> validate(const MediumSpec& medium) {
  std::vector<std::string> out;
  if (!(medium.thickness > 0.0) || !std::isfinite(medium.thickness)) out.push_back("thickness must be finite and > 0");
  if (!(medium.damping >= 0.0) || !std::isfinite(medium.damping)) out.push_back("damping must be finite and >= 0");
  if (!(medium.strength >= 0.0) || !std::isfinite(medium.strength)) out.push_back("strength must be finite and >= 0");
  if (medium.model == MediumModel::lorentz && (!(medium.resonance > 0.0) || !std::isfinite(medium.resonance)))
    out.push_back("lorentz resonance must be finite and > 0");
  return out;
}

std::vector<std::string> validate(const PulseSpec& pulse) {
  std::vector<std::string> out;
  if (!(pulse.carrier > 0.0) || !std::isfinite(pulse.carrier)) out.push_back("carrier must be finite and > 0");
  if (!(pulse.duration > 0.0) || !std::isfinite(pulse.duration)) out.push_back("duration must be finite and > 0");
  if (pulse.n_samples < 2 || (pulse.n_samples & (pulse.n_samples - 1)) != 0)
    out.push_back("n_samples must be a power of two");
  if (!(pulse.time_span > 0.0) || !std::isfinite(pulse.time_span)) out.push_back("time_span must be finite and > 0");
  if (!out.empty()) return out;
  if (pulse.time_span < 8.0 * pulse.duration) out.push_back("time_span must cover at least 8 durations");
  const double nyquist = std::numbers::pi * pulse.n_samples / pulse.time_span;
  if (nyquist <= pulse.carrier + 6.0 / pulse.duration)
    out.push_back("Nyquist frequency must exceed carrier + 6 / duration");
  if (!(pulse.center >= 0.0 && pulse.center <= pulse.time_span)) out.push_back("center must lie inside the time span");
  return out;
}

cplx permittivity(const MediumSpec& medium, double omega) {
  const cplx i{0.0, 1.0};
  const double wp2 = medium.strength * medium.strength;
  switch (medium.model) {
    case MediumModel::vacuum: return 1.0;
    case MediumModel::lorentz:
      return 1.0 + wp2 / (medium.resonance * medium.resonance - omega * omega - i * medium.damping * omega);
    case MediumModel::plasma: return 1.0 - wp2 / (omega * omega + i * medium.damping * omega);
  }
  return 1.0;
}

cplx refractive_index(const MediumSpec& medium, double omega) {
  const cplx eps = permittivity(medium, omega);
  cplx n = std::sqrt(eps);
  if (n.imag() < 0.0 || (n.imag() == 0.0 && eps.imag() == 0.0 && eps.real() < 0.0)) n = -n;
  if (n.imag() == 0.0 && n.real() < 0.0) n = -n;
  return n;
}

cplx refractive_index_derivative(const MediumSpec& medium, double omega) {
  const cplx i{0.0, 1.0};
  const double wp2 = medium.strength * medium.strength;
  cplx deps = 0.0;
  switch (medium.model) {
    case MediumModel::vacuum: return 0.0;
    case MediumModel::lorentz: {
      const cplx d = medium.resonance * medium.resonance - omega * omega - i * medium.damping * omega;
      deps = -wp2 * (-2.0 * omega - i * medium.damping) / (d * d);
      break;
    }
    case MediumModel::plasma: {
      const cplx d = omega * omega + i * medium.damping * omega;
      deps = wp2 * (2.0 * omega + i * medium.damping) / (d * d);
      break;
    }
  }
  return deps / (2.0 * refractive_index(medium, omega));
}

PropagationResult propagate(const PulseSpec& pulse, const MediumSpec& medium) { return run(pulse, medium).fields; }

double centroid_time(const std::vector<double>& time, const PlaneFields& fields) {
  if (time.size() != fields.e.size() || time.size() != fields.h.size())
    throw Error(ErrorCode::validation, "centroid_time: time and field sizes differ");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t j = 0; j < time.size(); ++j) {
    const double s = fields.e[j] * fields.h[j];
    num += time[j] * s;
    den += s;
  }
  if (!(std::abs(den) > 0.0)) throw Error(ErrorCode::validation, "centroid_time: zero net energy flux");
  return num / den;
}

DelayReport delay_decomposition(const PulseSpec& pulse, const MediumSpec& medium) {
  const Propagated p = run(pulse, medium);
  const Grid& g = p.grid;
  DelayReport rep;
  rep.t_in = centroid_time(g.time, p.fields.entry);
  rep.t_out = centroid_time(g.time, p.fields.exit);
  rep.delta_t = rep.t_out - rep.t_in;

  double num = 0.0;
  double den = 0.0;
  double evanescent = 0.0;
  double total = 0.0;
  for (std::size_t k = 0; k < p.exit.size(); ++k) {
    const double m = multiplicity(k, g.n);
    total += m * std::norm(p.entry[k]);
    if (!index_defined(medium, g.omega[k])) continue;
    if (permittivity(medium, g.omega[k]).real() < 0.0) evanescent += m * std::norm(p.entry[k]);
    const double w = m * p.index[k].real() * std::norm(p.exit[k]);
    const double group = medium.thickness *
                         (p.index[k].real() + g.omega[k] * refractive_index_derivative(medium, g.omega[k]).real());
    num += w * group;
    den += w;
  }
  if (!(std::abs(den) > 0.0)) throw Error(ErrorCode::validation, "delay_decomposition: no energy reaches the exit");
  rep.delta_t_group = num / den;
  rep.delta_t_reshape =
      spectral_centroid(p.attenuated, p.index, g, pulse.center) - spectral_centroid(p.entry, p.index, g, pulse.center);
  rep.residual = rep.delta_t - (rep.delta_t_group + rep.delta_t_reshape);
  rep.relative_residual = std::abs(rep.residual) / std::max(std::abs(rep.delta_t), 1e-3 * pulse.duration);
  rep.residual_flagged = rep.relative_residual > kResidualTolerance;
  rep.evanescent_fraction = total > 0.0 ? evanescent / total : 0.0;
  rep.evanescent_regime = rep.evanescent_fraction > 1e-6;
  rep.luminal = rep.t_out >= rep.t_in;
  rep.transmitted_energy = flux_energy(p.fields.exit) / flux_energy(p.fields.entry);
  return rep;
}

double parseval_mismatch(const std::vector<double>& signal) {
  if (signal.size() < 2) throw Error(ErrorCode::validation, "parseval_mismatch: need at least two samples");
  const int n = static_cast<int>(signal.size());
  const Spectrum x = forward(signal);
  double time_energy = 0.0;
  for (double v : signal) time_energy += v * v;
  double spec_energy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) spec_energy += multiplicity(k, n) * std::norm(x[k]);
  spec_energy /= n;
  if (time_energy == 0.0) return spec_energy;
  return std::abs(time_energy - spec_energy) / time_energy;
}

DetectorCheck detector_cross_check(const PulseSpec& pulse, const MediumSpec& medium, double sigma,
                                   double detector_thickness) {
  if (!(sigma > 0.0) || !(detector_thickness > 0.0))
    throw Error(ErrorCode::validation, "detector_cross_check: sigma and thickness must be > 0");
  const Propagated p = run(pulse, medium);
  const Grid& g = p.grid;

  std::vector<cplx> nd(g.omega.size(), cplx{0.0, 0.0});
  for (std::size_t k = 1; k < nd.size(); ++k) {
    const cplx eps = 1.0 + cplx{0.0, sigma / g.omega[k]};
    nd[k] = std::sqrt(eps);
  }
  Spectrum face = p.exit;
  face[0] = 0.0;

  DetectorCheck out;
  out.centroid = centroid_time(g.time, PlaneFields{inverse(face, g.n), inverse(times_conj(face, nd), g.n)});

  using Quad = boost::math::quadrature::gauss<double, 10>;
  std::vector<double> power(g.n, 0.0);
  auto add_depth = [&](double z, double weight) {
    Spectrum at(face.size());
    for (std::size_t k = 0; k < face.size(); ++k)
      at[k] = face[k] * std::conj(std::exp(cplx{0.0, 1.0} * nd[k] * g.omega[k] * z));
    const std::vector<double> e = inverse(at, g.n);
    for (int j = 0; j < g.n; ++j) power[j] += weight * sigma * e[j] * e[j];
  };
  const double half = 0.5 * detector_thickness;
  const auto& x = Quad::abscissa();
  const auto& w = Quad::weights();
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) {
      add_depth(half, half * w[i]);
    } else {
      add_depth(half * (1.0 + x[i]), half * w[i]);
      add_depth(half * (1.0 - x[i]), half * w[i]);
    }
  }
  double num = 0.0;
  double den = 0.0;
  for (int j = 0; j < g.n; ++j) {
    num += g.time[j] * power[j];
    den += power[j];
  }
  if (!(den > 0.0)) throw Error(ErrorCode::validation, "detector_cross_check: nothing absorbed");
  out.absorption = num / den;
  out.relative_difference = std::abs(out.absorption - out.centroid) / std::abs(out.centroid);
  return out;
}

}  // namespace tunneltime
