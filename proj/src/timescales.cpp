#include "tunneltime/timescales.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "tunneltime/error.hpp"

namespace tunneltime {

namespace {

constexpr cplx I{0.0, 1.0};
// Amplitudes below this magnitude make logarithmic derivatives meaningless.
constexpr double kAmplitudeFloor = 1e-8;

std::vector<std::size_t> clock_segments(const PotentialProfile& profile) {
  require_valid(profile);
  if (profile.clock_region.empty())
    throw Error(ErrorCode::validation, "clock region is empty");
  std::vector<std::size_t> out;
  for (std::size_t j = profile.clock_region.begin; j < profile.clock_region.end; ++j) out.push_back(j);
  return out;
}

cplx channel_amplitude(const ScatteringSolution& s, Channel channel) {
  if (channel == Channel::reflection) return s.r;
  if (channel == Channel::transmission) return s.t;
  throw Error(ErrorCode::validation, "channel must be transmission or reflection");
}

void require_amplitude(cplx a, const char* what) {
  if (!(std::abs(a) >= kAmplitudeFloor)) {
    std::ostringstream os;
    os << what << ": amplitude magnitude " << std::abs(a)
       << " below 1e-8; the logarithmic derivative is singular here";
    throw Error(ErrorCode::log_singularity, os.str());
  }
}

bool on_branch_point(double energy, double v) {
  return std::abs(energy - v) <= 1e-12 * std::max(1.0, std::abs(v));
}

// max(E, |V0 - E|) over the given segments.
double nominal_scale(const PotentialProfile& profile, double energy,
                     const std::vector<std::size_t>& segs) {
  double s = std::abs(energy);
  for (std::size_t j : segs) s = std::max(s, std::abs(profile.segments[j].v_real - energy));
  return s;
}

// min(1, |1 - r21 r23 e^{2ikL}|) around segment j: narrows probes near sharp
// multiple-reflection resonances of the clock segment.
double resonance_factor(const PotentialProfile& profile, double energy, std::size_t j) {
  const Segment& seg = profile.segments[j];
  const cplx k0 = wavevector(energy, cplx{seg.v_real, 0.0});
  if (k0 == 0.0) return 1.0;
  try {
    const StackSplit st = split_stacks(profile, energy, j, j + 1, k0, k0);
    const cplx z = st.left.rp * st.right.r * std::exp(2.0 * I * k0 * seg.length);
    return std::clamp(std::abs(1.0 - z), 1e-6, 1.0);
  } catch (const Error&) {
    return 1.0;
  }
}

// Natural scale of a potential-like clock strength (V_I, or omega_L / 2).
double clock_strength_scale(const PotentialProfile& profile, double energy,
                            const std::vector<std::size_t>& segs) {
  double scale = nominal_scale(profile, energy, segs);
  for (std::size_t j : segs) {
    const Segment& seg = profile.segments[j];
    const double gap = std::abs(energy - seg.v_real);
    const double local = std::max(1.0 / (seg.length * seg.length),
                                  std::min(gap, 2.0 * std::sqrt(gap) / seg.length));
    scale = std::min(scale, local * resonance_factor(profile, energy, j));
  }
  return scale;
}

double energy_scale(const PotentialProfile& profile, double energy) {
  std::vector<std::size_t> all;
  for (std::size_t j = 0; j < profile.segments.size(); ++j) all.push_back(j);
  double scale = nominal_scale(profile, energy, all);
  const double lead_gap = energy - std::max(profile.left.v_real, profile.right.v_real);
  scale = std::min(scale, lead_gap);
  const double x = profile.total_length();
  if (x > 0.0) {
    const double kmin = std::sqrt(lead_gap);
    scale = std::min(scale, 2.0 * kmin / x);
  }
  return scale;
}

TimeValue to_time(const DerivativeEstimate& d, double factor) {
  TimeValue tv;
  tv.value = factor * d.value;
  tv.error = std::abs(factor) * d.error;
  tv.steps = d.steps;
  return tv;
}

// Phase of a relative to reference, rejecting probe jumps beyond pi/2.
double relative_phase(cplx a, cplx reference) {
  const double ph = std::arg(a * std::conj(reference));
  if (std::abs(ph) > 0.5 * std::numbers::pi)
    throw Error(ErrorCode::step_size, "phase jumps by more than pi/2 between probes; reduce the probe steps");
  return ph;
}

enum class Dressing { imaginary, larmor_up, larmor_down };

// Full S-matrix with the segments in `xi_of` dressed by their share of the
// paired variable and every interface pinned at zero clock strength.
SMatrix dressed_smatrix(const PotentialProfile& profile, double energy,
                        const std::vector<std::pair<std::size_t, double>>& xi_of, Dressing dressing) {
  const double kl = lead_wavevector(profile, energy, false);
  const double kr = lead_wavevector(profile, energy, true);
  SMatrix total;
  for (std::size_t j = 0; j < profile.segments.size(); ++j) {
    const Segment& seg = profile.segments[j];
    auto it = std::find_if(xi_of.begin(), xi_of.end(), [j](const auto& p) { return p.first == j; });
    if (it == xi_of.end()) {
      total = star(total, embedded_smatrix(segment_transfer(wavevector(energy, seg), seg.length), kl));
      continue;
    }
    const cplx k0 = wavevector(energy, cplx{seg.v_real, 0.0});
    if (k0 == 0.0)
      throw Error(ErrorCode::regime_ambiguity, "energy sits on the clock-segment potential; offset E");
    const double xi = it->second;
    cplx kd = k0;
    switch (dressing) {
      case Dressing::imaginary: kd = k0 + I * xi / (2.0 * k0 * seg.length); break;
      case Dressing::larmor_up: kd = k0 + xi / (4.0 * k0 * seg.length); break;
      case Dressing::larmor_down: kd = k0 - xi / (4.0 * k0 * seg.length); break;
    }
    total = star(total, interface_smatrix(kl, k0));
    total = star(total, propagation_smatrix(kd, seg.length));
    total = star(total, interface_smatrix(k0, kl));
  }
  return star(total, interface_smatrix(kl, kr));
}

cplx prompt_reflection_before(const PotentialProfile& profile, double energy, std::size_t first) {
  const Segment& seg = profile.segments[first];
  const cplx k0 = wavevector(energy, cplx{seg.v_real, 0.0});
  if (k0 == 0.0)
    throw Error(ErrorCode::regime_ambiguity, "energy sits on the clock-segment potential; offset E");
  return split_stacks(profile, energy, first, first + 1, k0, k0).left.r;
}

void check_resummable(const PotentialProfile& profile, double energy, std::size_t j) {
  const Segment& seg = profile.segments[j];
  const cplx k0 = wavevector(energy, cplx{seg.v_real, 0.0});
  const StackSplit st = split_stacks(profile, energy, j, j + 1, k0, k0);
  const cplx z = st.left.rp * st.right.r * std::exp(2.0 * I * k0 * seg.length);
  if (std::abs(z) >= 1.0) {
    std::ostringstream os;
    os << "segment " << j << ": |r21 r23 e^{2ik'L}| = " << std::abs(z)
       << " >= 1, partial-wave series diverges";
    throw Error(ErrorCode::resummation_divergence, os.str());
  }
}

struct RegimeGroup {
  ClockRegime regime;
  std::vector<std::size_t> segments;
  double length = 0.0;
};

std::vector<RegimeGroup> group_by_regime(const PotentialProfile& profile, double energy,
                                         const std::vector<std::size_t>& segs) {
  std::vector<RegimeGroup> groups;
  for (std::size_t j : segs) {
    const ClockRegime reg = segment_regime(profile.segments[j], energy);
    auto it = std::find_if(groups.begin(), groups.end(), [reg](const RegimeGroup& g) { return g.regime == reg; });
    if (it == groups.end()) {
      groups.push_back(RegimeGroup{reg, {}, 0.0});
      it = groups.end() - 1;
    }
    it->segments.push_back(j);
    it->length += profile.segments[j].length;
  }
  return groups;
}

std::vector<std::size_t> checked_segment_set(const PotentialProfile& profile,
                                             const std::vector<std::size_t>& segments) {
  require_valid(profile);
  if (segments.empty()) throw Error(ErrorCode::validation, "sojourn: no clock segments given");
  std::set<std::size_t> uniq(segments.begin(), segments.end());
  if (uniq.size() != segments.size()) throw Error(ErrorCode::validation, "sojourn: duplicate clock segments");
  if (*uniq.rbegin() >= profile.segments.size())
    throw Error(ErrorCode::validation, "sojourn: clock segment index out of range");
  return {uniq.begin(), uniq.end()};
}

TimeValue paired_sojourn(const PotentialProfile& profile, double energy,
                         const std::vector<std::size_t>& segments, Channel channel,
                         const DerivativeSpec& spec, bool larmor) {
  if (channel == Channel::unconditional)
    throw Error(ErrorCode::validation, "sojourn: channel must be transmission or reflection");
  const std::vector<std::size_t> segs = checked_segment_set(profile, segments);
  const auto groups = group_by_regime(profile, energy, segs);
  for (std::size_t j : segs) check_resummable(profile, energy, j);

  const cplx r12 = channel == Channel::reflection ? prompt_reflection_before(profile, energy, segs.front())
                                                  : cplx{0.0, 0.0};

  TimeValue total;
  for (const RegimeGroup& g : groups) {
    auto xi_map = [&](double xi) {
      std::vector<std::pair<std::size_t, double>> m;
      for (std::size_t j : segs) {
        const bool in_group = std::find(g.segments.begin(), g.segments.end(), j) != g.segments.end();
        m.emplace_back(j, in_group ? xi * profile.segments[j].length / g.length : 0.0);
      }
      return m;
    };
    auto amplitude = [&](double xi, Dressing d) {
      const SMatrix s = dressed_smatrix(profile, energy, xi_map(xi), d);
      const cplx a = channel == Channel::transmission ? s.t : s.r - r12;
      require_amplitude(a, "sojourn");
      return a;
    };

    double xi_scale = nominal_scale(profile, energy, g.segments);
    for (std::size_t j : g.segments) {
      const Segment& seg = profile.segments[j];
      const double k0 = std::sqrt(std::abs(energy - seg.v_real));
      xi_scale = std::min(xi_scale, 2.0 * k0 / seg.length * resonance_factor(profile, energy, j));
    }
    xi_scale *= g.length;

    DerivativeEstimate d;
    double factor = 0.0;
    if (!larmor) {
      const cplx a0 = amplitude(0.0, Dressing::imaginary);
      if (g.regime == ClockRegime::propagating) {
        d = richardson_derivative([&](double xi) { return std::log(std::norm(amplitude(xi, Dressing::imaginary))); },
                                  0.0, xi_scale, spec);
        factor = -0.5 * g.length;
      } else {
        d = richardson_derivative([&](double xi) { return relative_phase(amplitude(xi, Dressing::imaginary), a0); },
                                  0.0, xi_scale, spec);
        factor = g.length;
      }
    } else {
      auto spin = [&](double xi, bool precession) {
        const cplx up = amplitude(xi, Dressing::larmor_up);
        const cplx down = amplitude(xi, Dressing::larmor_down);
        const double norm = std::norm(up) + std::norm(down);
        return precession ? (std::conj(up) * down).imag() / norm
                          : 0.5 * (std::norm(up) - std::norm(down)) / norm;
      };
      // Paired variable xi = omega_L L, so d/d(omega_L) = L d/d(xi).
      if (g.regime == ClockRegime::propagating) {
        d = richardson_derivative([&](double xi) { return spin(xi, true); }, 0.0, xi_scale, spec);
        factor = -2.0 * g.length;
      } else {
        d = richardson_derivative([&](double xi) { return spin(xi, false); }, 0.0, xi_scale, spec);
        factor = 2.0 * g.length;
      }
    }
    const TimeValue part = to_time(d, factor);
    total.value += part.value;
    total.error += part.error;
    if (total.steps.empty()) total.steps = part.steps;
  }
  return total;
}

}  // namespace

std::string_view to_string(Channel c) {
  switch (c) {
    case Channel::transmission: return "transmission";
    case Channel::reflection: return "reflection";
    case Channel::unconditional: return "unconditional";
  }
  return "unknown";
}

std::string_view to_string(Method m) {
  switch (m) {
    case Method::wigner: return "wigner";
    case Method::dwell: return "dwell";
    case Method::bl: return "bl";
    case Method::larmor_y: return "larmor_y";
    case Method::larmor_z: return "larmor_z";
    case Method::larmor_pythagorean: return "larmor_pythagorean";
    case Method::imag_clock: return "imag_clock";
    case Method::sojourn: return "sojourn";
  }
  return "unknown";
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> m{Method::wigner,   Method::dwell,    Method::bl,
                                     Method::larmor_y, Method::larmor_z, Method::larmor_pythagorean,
                                     Method::imag_clock, Method::sojourn};
  return m;
}

TimeValue wigner_delay(const PotentialProfile& profile, double energy, Channel channel,
                       const DerivativeSpec& spec) {
  const cplx a0 = channel_amplitude(solve(profile, energy), channel);
  require_amplitude(a0, "wigner_delay");
  auto phase = [&](double e) {
    const cplx a = channel_amplitude(solve(profile, e), channel);
    require_amplitude(a, "wigner_delay");
    return relative_phase(a, a0);
  };
  return to_time(richardson_derivative(phase, energy, energy_scale(profile, energy), spec), 1.0);
}

TimeValue dwell_time(const PotentialProfile& profile, double energy, IndexRange region) {
  require_valid(profile);
  if (region.empty() || region.end > profile.segments.size())
    throw Error(ErrorCode::validation, "dwell_time: region is empty or out of range");
  for (std::size_t j = region.begin; j < region.end; ++j)
    if (profile.segments[j].v_imag != 0.0)
      throw Error(ErrorCode::validation, "dwell_time: potential in the region must be real");
  const ScatteringSolution sol = solve(profile, energy);
  const double flux = 2.0 * sol.k_left;
  if (!(flux > 0.0)) throw Error(ErrorCode::validation, "dwell_time: incident flux vanishes");

  using boost::math::quadrature::gauss_kronrod;
  double integral = 0.0;
  double err_total = 0.0;
  for (std::size_t j = region.begin; j < region.end; ++j) {
    const SegmentCoefficients& c = sol.segment_coefficients[j];
    auto density = [&](double x) { return std::norm(wavefunction_at(sol, x, true)); };
    double err = 0.0;
    const double lo = c.x_begin;
    const double hi = c.x_begin + c.length;
    integral += gauss_kronrod<double, 31>::integrate(density, lo, hi, 15, 1e-13, &err);
    err_total += err;
  }
  TimeValue tv;
  tv.value = integral / flux;
  tv.error = err_total / flux;
  return tv;
}

double bl_time(const PotentialProfile& profile, double energy, IndexRange region) {
  require_valid(profile);
  if (region.empty() || region.end > profile.segments.size())
    throw Error(ErrorCode::validation, "bl_time: region is empty or out of range");
  double total = 0.0;
  for (std::size_t j = region.begin; j < region.end; ++j) {
    const Segment& seg = profile.segments[j];
    if (on_branch_point(energy, seg.v_real))
      throw Error(ErrorCode::divergent_integrand, "bl_time: E equals the segment potential, integrand diverges");
    total += seg.length / (2.0 * std::sqrt(std::abs(seg.v_real - energy)));
  }
  return total;
}

LarmorTimes larmor_times(const PotentialProfile& profile, double energy, const DerivativeSpec& spec) {
  const std::vector<std::size_t> segs = clock_segments(profile);
  auto with_field = [&](double omega) {
    PotentialProfile p = profile;
    for (std::size_t j : segs) p.segments[j].omega_larmor = omega;
    return p;
  };
  auto spin = [&](double omega, Channel channel, bool precession) {
    const SpinorAmplitudes sp = solve_spinor(with_field(omega), energy);
    const cplx up = channel == Channel::transmission ? sp.t_plus : sp.r_plus;
    const cplx down = channel == Channel::transmission ? sp.t_minus : sp.r_minus;
    const double norm = std::norm(up) + std::norm(down);
    if (!(norm > 2.0 * kAmplitudeFloor * kAmplitudeFloor))
      throw Error(ErrorCode::log_singularity, "larmor_times: channel carries no flux");
    return precession ? (std::conj(up) * down).imag() / norm : 0.5 * (std::norm(up) - std::norm(down)) / norm;
  };
  // The Zeeman shift is omega_L / 2, so the omega scale is twice the potential scale.
  const double scale = 2.0 * clock_strength_scale(profile, energy, segs);

  LarmorTimes out;
  for (Channel ch : {Channel::transmission, Channel::reflection}) {
    const DerivativeEstimate dy = richardson_derivative([&](double w) { return spin(w, ch, true); }, 0.0, scale, spec);
    const DerivativeEstimate dz = richardson_derivative([&](double w) { return spin(w, ch, false); }, 0.0, scale, spec);
    TimeValue ty = to_time(dy, 2.0);
    const int sign = ty.value < 0.0 ? -1 : 1;
    ty.value = std::abs(ty.value);
    const TimeValue tz = to_time(dz, 2.0);
    if (ch == Channel::transmission) {
      out.precession_transmission = ty;
      out.rotation_transmission = tz;
      out.precession_sign_transmission = sign;
    } else {
      out.precession_reflection = ty;
      out.rotation_reflection = tz;
      out.precession_sign_reflection = sign;
    }
  }
  return out;
}

TimeValue imag_clock_time(const PotentialProfile& profile, double energy, const DerivativeSpec& spec,
                          Channel channel) {
  const std::vector<std::size_t> segs = clock_segments(profile);
  auto log_prob = [&](double vi) {
    PotentialProfile p = profile;
    for (std::size_t j : segs) p.segments[j].v_imag += vi;
    const cplx a = channel_amplitude(solve(p, energy), channel);
    require_amplitude(a, "imag_clock_time");
    return std::log(std::norm(a));
  };
  require_amplitude(channel_amplitude(solve(profile, energy), channel), "imag_clock_time");
  const double scale = clock_strength_scale(profile, energy, segs);
  return to_time(richardson_derivative(log_prob, 0.0, scale, spec), -0.5);
}

ClockRegime segment_regime(const Segment& seg, double energy) {
  if (on_branch_point(energy, seg.v_real)) {
    std::ostringstream os;
    os << "energy " << energy << " is on the clock-region potential " << seg.v_real
       << " (branch point); offset E to pick the propagating or evanescent regime";
    throw Error(ErrorCode::regime_ambiguity, os.str());
  }
  return energy > seg.v_real ? ClockRegime::propagating : ClockRegime::evanescent;
}

cplx dressed_transmission(const PotentialProfile& profile, double energy, double xi, Channel channel) {
  const std::vector<std::size_t> segs = clock_segments(profile);
  const double total = profile.clock_length();
  std::vector<std::pair<std::size_t, double>> m;
  for (std::size_t j : segs) m.emplace_back(j, xi * profile.segments[j].length / total);
  const SMatrix s = dressed_smatrix(profile, energy, m, Dressing::imaginary);
  if (channel == Channel::transmission) return s.t;
  if (channel == Channel::reflection) return s.r;
  throw Error(ErrorCode::validation, "dressed_transmission: channel must be transmission or reflection");
}

cplx prompt_reflection(const PotentialProfile& profile, double energy) {
  const std::vector<std::size_t> segs = clock_segments(profile);
  return prompt_reflection_before(profile, energy, segs.front());
}

TimeValue sojourn_for_segments(const PotentialProfile& profile, double energy,
                               const std::vector<std::size_t>& segments, Channel channel,
                               const DerivativeSpec& spec) {
  return paired_sojourn(profile, energy, segments, channel, spec, false);
}

TimeValue sojourn_transmission(const PotentialProfile& profile, double energy, const DerivativeSpec& spec) {
  return paired_sojourn(profile, energy, clock_segments(profile), Channel::transmission, spec, false);
}

TimeValue sojourn_reflection(const PotentialProfile& profile, double energy, const DerivativeSpec& spec) {
  return paired_sojourn(profile, energy, clock_segments(profile), Channel::reflection, spec, false);
}

TimeValue larmor_sojourn(const PotentialProfile& profile, double energy, Channel channel,
                         const DerivativeSpec& spec) {
  return paired_sojourn(profile, energy, clock_segments(profile), channel, spec, true);
}

ClosedFormSojourn sojourn_closed_form(const PotentialProfile& profile, double energy) {
  const std::vector<std::size_t> segs = clock_segments(profile);
  if (segs.size() != 1)
    throw Error(ErrorCode::validation, "sojourn_closed_form: clock region must be a single segment");
  PotentialProfile pinned = profile;
  pinned.segments[segs.front()].v_imag = 0.0;
  pinned.segments[segs.front()].omega_larmor = 0.0;
  ClosedFormSojourn out;
  out.regime = segment_regime(pinned.segments[segs.front()], energy);
  const PartialWaveSet pw = partial_waves(pinned, energy);
  out.bl = bl_time(pinned, energy, pinned.clock_region);
  const cplx rho = pw.r21 * pw.r23;
  const double l = pw.length;
  double factor = 0.0;
  if (out.regime == ClockRegime::propagating) {
    const double kr = pw.k_inner.real();
    const double rho2 = std::norm(rho);
    factor = (1.0 - rho2) / (1.0 + rho2 - 2.0 * (rho * std::exp(2.0 * I * kr * l)).real());
  } else {
    const double kappa = pw.k_inner.imag();
    const double damp2 = std::exp(-2.0 * kappa * l);
    const double rho2 = std::norm(rho) * damp2 * damp2;
    factor = (1.0 - rho2) / (1.0 + rho2 - 2.0 * (rho * damp2).real());
  }
  out.transmission = factor * out.bl;
  out.reflection = out.transmission + out.bl;
  return out;
}

TimescaleReport full_report(const PotentialProfile& profile, double energy, const DerivativeSpec& spec,
                            Channel channel) {
  TimescaleReport rep;
  rep.energy = energy;
  rep.channel = channel;

  std::vector<std::size_t> segs;
  for (std::size_t j = profile.clock_region.begin; j < profile.clock_region.end && j < profile.segments.size(); ++j)
    segs.push_back(j);
  for (std::size_t j : segs)
    if (profile.segments[j].v_real > energy) rep.evanescent_regime = true;
  bool lossy_outside = false;
  for (std::size_t j = 0; j < profile.segments.size(); ++j)
    if (!profile.clock_region.contains(j) && profile.segments[j].v_imag != 0.0) lossy_outside = true;
  rep.extrapolated = segs.size() > 1 || lossy_outside;

  auto record = [&](Method m, auto&& compute) {
    TimeEntry e;
    try {
      const TimeValue tv = compute();
      e.value = tv.value;
      e.error_estimate = tv.error;
      e.steps = tv.steps;
    } catch (const Error& err) {
      e.reason = std::string(to_string(err.code())) + ": " + err.what();
    }
    rep.entries[m] = std::move(e);
  };
  auto absent = [&](Method m, const std::string& why) {
    TimeEntry e;
    e.reason = why;
    rep.entries[m] = std::move(e);
  };

  record(Method::dwell, [&] { return dwell_time(profile, energy, profile.clock_region); });
  record(Method::bl, [&] { return TimeValue{bl_time(profile, energy, profile.clock_region), 0.0, {}}; });

  if (channel == Channel::unconditional) {
    for (Method m : {Method::wigner, Method::larmor_y, Method::larmor_z, Method::larmor_pythagorean,
                     Method::imag_clock, Method::sojourn})
      absent(m, "validation: not defined for the unconditional channel");
    return rep;
  }

  record(Method::wigner, [&] { return wigner_delay(profile, energy, channel, spec); });
  record(Method::imag_clock, [&] { return imag_clock_time(profile, energy, spec, channel); });
  record(Method::sojourn, [&] {
    return channel == Channel::transmission ? sojourn_transmission(profile, energy, spec)
                                            : sojourn_reflection(profile, energy, spec);
  });

  try {
    const LarmorTimes lt = larmor_times(profile, energy, spec);
    const bool tr = channel == Channel::transmission;
    const TimeValue& y = tr ? lt.precession_transmission : lt.precession_reflection;
    const TimeValue& z = tr ? lt.rotation_transmission : lt.rotation_reflection;
    rep.entries[Method::larmor_y] = TimeEntry{y.value, y.error, y.steps, "",
                                              tr ? lt.precession_sign_transmission : lt.precession_sign_reflection};
    rep.entries[Method::larmor_z] = TimeEntry{z.value, z.error, z.steps, "", 1};
    const double pyth = std::hypot(y.value, z.value);
    const double perr = pyth > 0.0 ? (std::abs(y.value) * y.error + std::abs(z.value) * z.error) / pyth
                                   : y.error + z.error;
    rep.entries[Method::larmor_pythagorean] = TimeEntry{pyth, perr, y.steps, "", 1};
  } catch (const Error& err) {
    const std::string why = std::string(to_string(err.code())) + ": " + err.what();
    absent(Method::larmor_y, why);
    absent(Method::larmor_z, why);
    absent(Method::larmor_pythagorean, why);
  }
  return rep;
}

}  // namespace tunneltime
