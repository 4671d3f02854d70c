#include "tunneltime/derivative.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "tunneltime/error.hpp"

namespace tunneltime {

std::vector<std::string> validate(const DerivativeSpec& spec) {
  std::vector<std::string> out;
  if (spec.steps.size() < 2) out.push_back("derivative: at least two probe steps are required");
  for (std::size_t i = 0; i < spec.steps.size(); ++i) {
    if (!(spec.steps[i] > 0.0) || !std::isfinite(spec.steps[i]))
      out.push_back("derivative: steps must be positive and finite");
    if (i > 0 && !(spec.steps[i] < spec.steps[i - 1]))
      out.push_back("derivative: steps must be strictly decreasing");
  }
  if (spec.order != 2 && spec.order != 4) out.push_back("derivative: order must be 2 or 4");
  if (spec.richardson_levels < 0) out.push_back("derivative: richardson_levels must be >= 0");
  return out;
}

namespace {

double difference_quotient(const std::function<double(double)>& f, double x0, double h, int order,
                           double& magnitude) {
  if (order == 4) {
    const double f2p = f(x0 + 2 * h), f1p = f(x0 + h), f1m = f(x0 - h), f2m = f(x0 - 2 * h);
    magnitude = std::max({magnitude, std::abs(f2p), std::abs(f1p), std::abs(f1m), std::abs(f2m)});
    return (-f2p + 8 * f1p - 8 * f1m + f2m) / (12 * h);
  }
  const double fp = f(x0 + h), fm = f(x0 - h);
  magnitude = std::max({magnitude, std::abs(fp), std::abs(fm)});
  return (fp - fm) / (2 * h);
}

}  // namespace

DerivativeEstimate richardson_derivative(const std::function<double(double)>& f, double x0,
                                         double scale, const DerivativeSpec& spec) {
  if (auto v = validate(spec); !v.empty()) throw Error(ErrorCode::validation, v.front());
  if (!(scale > 0.0) || !std::isfinite(scale))
    throw Error(ErrorCode::derivative_failure, "derivative: probe scale must be positive and finite");

  DerivativeEstimate est;
  double magnitude = 0.0;
  for (double s : spec.steps) {
    const double h = s * scale;
    est.steps.push_back(h);
    est.raw.push_back(difference_quotient(f, x0, h, spec.order, magnitude));
    if (!std::isfinite(est.raw.back()))
      throw Error(ErrorCode::derivative_failure, "derivative: non-finite difference quotient");
  }

  // Neville tableau in the variable h^2, extrapolated to h = 0.
  const std::size_t n = est.raw.size();
  const std::size_t levels = std::min<std::size_t>(spec.richardson_levels, n - 1);
  std::vector<std::vector<double>> tab(n, std::vector<double>(levels + 1, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    tab[i][0] = est.raw[i];
    for (std::size_t j = 1; j <= levels && j <= i; ++j) {
      const double hi = est.steps[i] * est.steps[i];
      const double hj = est.steps[i - j] * est.steps[i - j];
      tab[i][j] = tab[i][j - 1] + (tab[i][j - 1] - tab[i - 1][j - 1]) * hi / (hj - hi);
    }
  }
  est.value = tab[n - 1][levels];
  double diff = 0.0;
  if (levels > 0) {
    diff = std::max(std::abs(est.value - tab[n - 1][levels - 1]),
                    std::abs(est.value - tab[n - 2][levels - 1]));
  } else {
    diff = std::abs(est.raw[n - 1] - est.raw[n - 2]);
  }
  // Round-off in the smallest-step quotient, amplified by the extrapolation weights.
  const double roundoff = 100.0 * std::numeric_limits<double>::epsilon() *
                          std::max(magnitude, 1e-300) / est.steps.back();
  est.error = std::max(diff, roundoff);
  if (!std::isfinite(est.value))
    throw Error(ErrorCode::derivative_failure, "derivative: extrapolation produced a non-finite value");
  const double spread = std::abs(est.raw.front() - est.raw.back());
  if (levels > 0 && diff > 10.0 * spread + roundoff && spread > 0.0) {
    std::ostringstream os;
    os << "derivative: Richardson sequence does not converge (raw";
    for (double r : est.raw) os << ' ' << r;
    os << ")";
    throw Error(ErrorCode::derivative_failure, os.str());
  }
  return est;
}

}  // namespace tunneltime
