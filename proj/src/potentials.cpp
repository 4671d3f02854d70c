#include "tunneltime/potentials.hpp"

#include <cmath>
#include <numeric>
#include <utility>
#include <sstream>

#include "tunneltime/error.hpp"

namespace tunneltime {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation: return "validation";
    case ErrorCode::no_open_channel: return "no_open_channel";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::resummation_divergence: return "resummation_divergence";
    case ErrorCode::derivative_failure: return "derivative_failure";
    case ErrorCode::step_size: return "step_size";
    case ErrorCode::log_singularity: return "log_singularity";
    case ErrorCode::regime_ambiguity: return "regime_ambiguity";
    case ErrorCode::divergent_integrand: return "divergent_integrand";
    case ErrorCode::grid: return "grid";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

double PotentialProfile::total_length() const {
  return segment_start(segments.size());
}

double PotentialProfile::segment_start(std::size_t i) const {
  double x = 0.0;
  for (std::size_t j = 0; j < i && j < segments.size(); ++j) x += segments[j].length;
  return x;
}

double PotentialProfile::clock_length() const {
  double sum = 0.0;
  for (std::size_t j = clock_region.begin; j < clock_region.end && j < segments.size(); ++j)
    sum += segments[j].length;
  return sum;
}

PotentialProfile make_rectangular_barrier(double v0, double width) {
  if (!(width > 0.0) || !std::isfinite(width))
    throw Error(ErrorCode::validation, "barrier width must be positive and finite");
  if (!std::isfinite(v0)) throw Error(ErrorCode::validation, "barrier height must be finite");
  PotentialProfile p;
  p.segments.push_back(Segment{width, v0, 0.0, 0.0});
  p.clock_region = {0, 1};
  return p;
}

std::vector<std::string> validate(const PotentialProfile& profile) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < profile.segments.size(); ++i) {
    const Segment& s = profile.segments[i];
    if (!std::isfinite(s.length) || !(s.length > 0.0)) {
      std::ostringstream os;
      os << "segment " << i << ": length must be positive and finite";
      out.push_back(os.str());
    }
    if (!std::isfinite(s.v_real) || !std::isfinite(s.v_imag) || !std::isfinite(s.omega_larmor)) {
      std::ostringstream os;
      os << "segment " << i << ": non-finite field";
      out.push_back(os.str());
    }
  }
  const IndexRange& c = profile.clock_region;
  if (c.end < c.begin || c.end > profile.segments.size())
    out.push_back("clock_region: indices out of range");
  const std::pair<const char*, const Lead*> leads[] = {{"left", &profile.left},
                                                       {"right", &profile.right}};
  for (const auto& [name, lead] : leads) {
    if (!std::isfinite(lead->v_real) || !std::isfinite(lead->v_imag) ||
        !std::isfinite(lead->omega_larmor)) {
      out.push_back(std::string(name) + " lead: non-finite field");
    } else if (lead->v_imag != 0.0 || lead->omega_larmor != 0.0) {
      out.push_back(std::string(name) + " lead: imaginary potential and Larmor field must vanish");
    }
  }
  return out;
}

void require_valid(const PotentialProfile& profile) {
  auto violations = validate(profile);
  if (violations.empty()) return;
  std::string msg = "invalid profile: ";
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i) msg += "; ";
    msg += violations[i];
  }
  throw Error(ErrorCode::validation, msg);
}

PotentialProfile with_clock(const PotentialProfile& profile, const ClockSettings& settings) {
  if (profile.clock_region.empty() || profile.clock_region.end > profile.segments.size())
    throw Error(ErrorCode::validation, "with_clock: clock region is empty");
  if (!(settings.strength >= 0.0) || !(settings.paired_xi >= 0.0))
    throw Error(ErrorCode::validation, "with_clock: clock strength and paired_xi are stored non-negative");
  PotentialProfile out = profile;
  for (std::size_t i = out.clock_region.begin; i < out.clock_region.end; ++i) {
    if (settings.kind == ClockKind::imaginary_potential)
      out.segments[i].v_imag = settings.strength;
    else
      out.segments[i].omega_larmor = settings.strength;
  }
  return out;
}

ClockSettings make_clock_settings(ClockKind kind, double strength, const PotentialProfile& profile) {
  return ClockSettings{kind, strength, strength * profile.clock_length()};
}

}  // namespace tunneltime
