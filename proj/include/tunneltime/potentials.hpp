#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tunneltime {

// Natural units throughout: hbar = 1, 2m = 1, so k = sqrt(E - V).

/// One piecewise-constant slab of the scattering landscape.
///
/// v_imag is the absorption strength: a positive value removes flux. It enters
/// the wave equation as V_eff = v_real - i*v_imag (time dependence e^{-iEt}).
/// omega_larmor is the Larmor frequency of the Zeeman clock in this slab; the
/// two spin channels see V_eff -/+ omega_larmor/2.
struct Segment {
  double length = 0.0;
  double v_real = 0.0;
  double v_imag = 0.0;
  double omega_larmor = 0.0;

  bool operator==(const Segment&) const = default;
};

/// Half-open index range [begin, end) into PotentialProfile::segments.
struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  bool empty() const { return end <= begin; }
  std::size_t size() const { return empty() ? 0 : end - begin; }
  bool contains(std::size_t i) const { return i >= begin && i < end; }

  bool operator==(const IndexRange&) const = default;
};

/// Semi-infinite asymptotic region. Only v_real may be non-zero in a valid
/// profile; the other fields exist so malformed input can be reported.
struct Lead {
  double v_real = 0.0;
  double v_imag = 0.0;
  double omega_larmor = 0.0;

  bool operator==(const Lead&) const = default;
};

/// Ordered segments laid out from x = 0 to the right, flanked by two leads.
struct PotentialProfile {
  std::vector<Segment> segments;
  IndexRange clock_region;
  Lead left;
  Lead right;

  double total_length() const;
  /// Position of the left edge of segment i (i == size() gives the right end).
  double segment_start(std::size_t i) const;
  /// Sum of clock-region segment lengths.
  double clock_length() const;

  bool operator==(const PotentialProfile&) const = default;
};

enum class ClockKind { imaginary_potential, larmor };

struct ClockSettings {
  ClockKind kind = ClockKind::imaginary_potential;
  double strength = 0.0;   // V_I or omega_L
  double paired_xi = 0.0;  // strength * clock length
};

/// Single-segment barrier whose clock region is the barrier itself.
PotentialProfile make_rectangular_barrier(double v0, double width);

/// Lists every violated invariant. Never throws.
std::vector<std::string> validate(const PotentialProfile& profile);

/// Throws Error{validation} with all violations joined if validate() is non-empty.
void require_valid(const PotentialProfile& profile);

/// Copy of `profile` with the clock strength written into every clock-region
/// segment (v_imag for the imaginary clock, omega_larmor for the Larmor clock).
PotentialProfile with_clock(const PotentialProfile& profile, const ClockSettings& settings);

/// Convenience: settings with paired_xi = strength * clock length of `profile`.
ClockSettings make_clock_settings(ClockKind kind, double strength, const PotentialProfile& profile);

}  // namespace tunneltime
