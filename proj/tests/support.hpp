#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "tunneltime/potentials.hpp"

namespace tunneltime::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

inline Segment random_segment(Rng& rng, double vmin, double vmax) {
  return Segment{uniform(rng, 0.1, 1.5), uniform(rng, vmin, vmax), 0.0, 0.0};
}

/// Real profile of 1-6 segments, clock region = everything, zero leads.
inline PotentialProfile random_real_profile(Rng& rng) {
  PotentialProfile p;
  const int n = uniform_int(rng, 1, 6);
  for (int i = 0; i < n; ++i) p.segments.push_back(random_segment(rng, -1.0, 3.0));
  p.clock_region = {0, p.segments.size()};
  return p;
}

/// Constant clock segment (v0, width) between random real flanking stacks of
/// 0-2 segments each.
inline PotentialProfile flanked_barrier(Rng& rng, double v0, double width) {
  PotentialProfile p;
  const int left = uniform_int(rng, 0, 2);
  const int right = uniform_int(rng, 0, 2);
  for (int i = 0; i < left; ++i) p.segments.push_back(random_segment(rng, -1.0, 1.5 * v0));
  p.segments.push_back(Segment{width, v0, 0.0, 0.0});
  p.clock_region = {static_cast<std::size_t>(left), static_cast<std::size_t>(left + 1)};
  for (int i = 0; i < right; ++i) p.segments.push_back(random_segment(rng, -1.0, 1.5 * v0));
  return p;
}

inline double rel_diff(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

}  // namespace tunneltime::testing
