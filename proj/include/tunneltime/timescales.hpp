#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tunneltime/derivative.hpp"
#include "tunneltime/potentials.hpp"
#include "tunneltime/scatter.hpp"

namespace tunneltime {

enum class Channel { transmission, reflection, unconditional };

enum class Method {
  wigner,
  dwell,
  bl,
  larmor_y,
  larmor_z,
  larmor_pythagorean,
  imag_clock,
  sojourn,
};

std::string_view to_string(Channel c);
std::string_view to_string(Method m);
const std::vector<Method>& all_methods();

/// A time together with how well it is known. For finite-difference results
/// `error` is the Richardson estimate and `steps` the absolute probe steps.
struct TimeValue {
  double value = 0.0;
  double error = 0.0;
  std::vector<double> steps;
};

// -- Individual timescales ----------------------------------------------------

/// Phase time dArg(A)/dE of A = t or r (hbar = 1 so omega = E).
TimeValue wigner_delay(const PotentialProfile& profile, double energy, Channel channel,
                       const DerivativeSpec& spec = {});

/// Smith dwell time: integral of |psi|^2 over `region` divided by the incident
/// flux 2 k_left. Requires a real potential in the region.
TimeValue dwell_time(const PotentialProfile& profile, double energy, IndexRange region);

/// Buttiker-Landauer time summed over `region`: d/(2 kappa) below the segment
/// potential and the classical crossing time d/(2 k) above it.
double bl_time(const PotentialProfile& profile, double energy, IndexRange region);

struct LarmorTimes {
  TimeValue precession_transmission;  // tau_y
  TimeValue rotation_transmission;    // tau_z
  TimeValue precession_reflection;
  TimeValue rotation_reflection;
  // Sign of the raw dS_y/d(omega_L) derivative; the reported tau_y is its magnitude.
  int precession_sign_transmission = 1;
  int precession_sign_reflection = 1;
};

/// Spin precession and rotation times from the Zeeman-split amplitudes with
/// the Larmor field applied uniformly in the clock region.
LarmorTimes larmor_times(const PotentialProfile& profile, double energy,
                         const DerivativeSpec& spec = {});

/// -(1/2) d ln|A|^2 / dV_I at V_I -> 0 with the absorptive potential applied
/// uniformly in the clock region (positive for absorption-delayed waves).
TimeValue imag_clock_time(const PotentialProfile& profile, double energy,
                          const DerivativeSpec& spec, Channel channel);

// -- Paired-variable correction -----------------------------------------------

enum class ClockRegime { propagating, evanescent };

/// Regime of a segment at `energy`; throws Error{regime_ambiguity} on the branch point.
ClockRegime segment_regime(const Segment& seg, double energy);

/// Amplitude with every interface held at zero clock strength while the
/// clock-region propagation carries the paired variable xi (distributed over
/// the clock segments in proportion to their length). channel = transmission
/// returns T(xi), reflection the full R(xi).
cplx dressed_transmission(const PotentialProfile& profile, double energy, double xi,
                          Channel channel);

/// Reflection from the stack left of the clock region, never entering it.
cplx prompt_reflection(const PotentialProfile& profile, double energy);

TimeValue sojourn_transmission(const PotentialProfile& profile, double energy,
                               const DerivativeSpec& spec = {});
TimeValue sojourn_reflection(const PotentialProfile& profile, double energy,
                             const DerivativeSpec& spec = {});

/// Sojourn time for an arbitrary set of (not necessarily contiguous) clock
/// segments. Segments of the same regime share one paired variable.
TimeValue sojourn_for_segments(const PotentialProfile& profile, double energy,
                               const std::vector<std::size_t>& segments, Channel channel,
                               const DerivativeSpec& spec = {});

/// The same correction applied to the Larmor clock (paired variable omega_L L):
/// precession for propagating regions, rotation for evanescent ones.
TimeValue larmor_sojourn(const PotentialProfile& profile, double energy, Channel channel,
                         const DerivativeSpec& spec = {});

struct ClosedFormSojourn {
  double transmission = 0.0;
  double reflection = 0.0;
  double bl = 0.0;
  ClockRegime regime = ClockRegime::propagating;
};

/// Closed-form sojourn times of a single constant clock segment from its
/// partial-wave amplitudes; reflection = transmission + tau_BL.
ClosedFormSojourn sojourn_closed_form(const PotentialProfile& profile, double energy);

// -- Aggregate report -----------------------------------------------------------

struct TimeEntry {
  std::optional<double> value;
  double error_estimate = 0.0;
  std::vector<double> steps;
  std::string reason;  // set when value is absent
  int sign = 1;
};

struct TimescaleReport {
  double energy = 0.0;
  Channel channel = Channel::transmission;
  std::map<Method, TimeEntry> entries;
  bool evanescent_regime = false;
  bool extrapolated = false;  // multi-segment clock region or absorption outside it
};

/// Every method at one energy; failures become absent entries with a reason.
TimescaleReport full_report(const PotentialProfile& profile, double energy,
                            const DerivativeSpec& spec = {},
                            Channel channel = Channel::transmission);

}  // namespace tunneltime
