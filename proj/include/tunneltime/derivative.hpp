#pragma once

#include <functional>
#include <string>
#include <vector>

namespace tunneltime {

/// How a lim_{p -> 0} d/dp is realized numerically. `steps` are dimensionless
/// factors; each operation multiplies them by the natural scale of its probe
/// parameter (energy, clock strength or paired variable).
struct DerivativeSpec {
  std::vector<double> steps{1e-2, 5e-3, 2.5e-3};
  int order = 2;              // 2: three-point central difference, 4: five-point
  int richardson_levels = 2;  // extrapolation levels in h^2
};

std::vector<std::string> validate(const DerivativeSpec& spec);

struct DerivativeEstimate {
  double value = 0.0;
  double error = 0.0;               // Richardson error estimate (with a round-off floor)
  std::vector<double> steps;        // absolute probe steps
  std::vector<double> raw;          // un-extrapolated difference quotients per step
};

/// Central-difference derivative of f at x0 with probes steps[i] * scale,
/// extrapolated to zero step by Neville's scheme in h^2.
/// Throws Error{validation} for a bad spec and Error{derivative_failure} when
/// the sequence is non-finite or fails to settle.
DerivativeEstimate richardson_derivative(const std::function<double(double)>& f, double x0,
                                         double scale, const DerivativeSpec& spec);

}  // namespace tunneltime
