#include "tunneltime/scatter.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tunneltime/error.hpp"

namespace tunneltime {

namespace {

constexpr cplx I{0.0, 1.0};

// sin(kL)/k, even in k and analytic at k = 0.
cplx sin_over_k(cplx k, double length) {
  const cplx z = k * length;
  if (std::abs(z) < 1e-3) {
    const cplx z2 = z * z;
    return length * (1.0 - z2 / 6.0 + z2 * z2 / 120.0);
  }
  return std::sin(z) / k;
}

// Below this |k|L the bounded plane-wave form is ill-conditioned (A, B ~ 1/k).
constexpr double kLinearThreshold = 1e-6;

SegmentCoefficients coefficients_from_edges(double x0, double length, cplx k, cplx psi_l,
                                            cplx dpsi_l, cplx psi_r, cplx dpsi_r) {
  SegmentCoefficients c;
  c.x_begin = x0;
  c.length = length;
  c.k = k;
  if (std::abs(k) * length < kLinearThreshold || std::abs(k) == 0.0) {
    c.linear = true;
    c.a = psi_l;
    c.b = dpsi_l;
    return c;
  }
  // Each coefficient taken from the edge where its exponential is largest.
  c.a = 0.5 * (psi_l + dpsi_l / (I * k));
  c.b = 0.5 * (psi_r - dpsi_r / (I * k));
  return c;
}

std::size_t locate(const ScatteringSolution& s, double x, bool from_right) {
  const auto& segs = s.segment_coefficients;
  const double xmax = s.total_length();
  if (segs.empty() || !(x >= 0.0) || !(x <= xmax)) {
    std::ostringstream os;
    os << "wavefunction_at: x = " << x << " outside [0, " << xmax << "]";
    throw Error(ErrorCode::out_of_range, os.str());
  }
  // First segment whose right edge is >= x (or > x when evaluating from the right).
  for (std::size_t j = 0; j < segs.size(); ++j) {
    const double xr = segs[j].x_begin + segs[j].length;
    if (from_right ? x < xr : x <= xr) return j;
  }
  return segs.size() - 1;
}

}  // namespace

cplx effective_potential(const Segment& seg, Zeeman channel) {
  cplx v{seg.v_real, -seg.v_imag};
  if (channel == Zeeman::up) v -= 0.5 * seg.omega_larmor;
  if (channel == Zeeman::down) v += 0.5 * seg.omega_larmor;
  return v;
}

cplx wavevector(double energy, cplx v_eff) {
  const cplx k2 = energy - v_eff;
  if (k2.imag() == 0.0) {
    // Explicit case analysis on the real axis: never rely on the sign of a zero.
    if (k2.real() >= 0.0) return {std::sqrt(k2.real()), 0.0};
    return {0.0, std::sqrt(-k2.real())};
  }
  cplx k = std::sqrt(k2);
  if (k.imag() < 0.0) k = -k;
  return k;
}

cplx wavevector(double energy, const Segment& seg, Zeeman channel) {
  return wavevector(energy, effective_potential(seg, channel));
}

SMatrix star(const SMatrix& a, const SMatrix& b) {
  const cplx denom = 1.0 - a.rp * b.r;
  if (denom == 0.0) throw Error(ErrorCode::resummation_divergence, "star product: singular multiple-reflection factor");
  SMatrix out;
  out.t = a.t * b.t / denom;
  out.r = a.r + a.t * b.r * a.tp / denom;
  out.tp = b.tp * a.tp / denom;
  out.rp = b.rp + b.tp * a.rp * b.t / denom;
  return out;
}

SMatrix interface_smatrix(cplx ka, cplx kb) {
  const cplx sum = ka + kb;
  if (sum == 0.0) throw Error(ErrorCode::regime_ambiguity, "interface between two k = 0 media");
  SMatrix s;
  s.r = (ka - kb) / sum;
  s.t = 2.0 * ka / sum;
  s.tp = 2.0 * kb / sum;
  s.rp = (kb - ka) / sum;
  return s;
}

SMatrix propagation_smatrix(cplx k, double length) {
  const cplx phase = std::exp(I * k * length);
  return SMatrix{0.0, phase, phase, 0.0};
}

Eigen::Matrix2cd segment_transfer(cplx k, double length) {
  const cplx c = std::cos(k * length);
  const cplx s = sin_over_k(k, length);
  Eigen::Matrix2cd m;
  m << c, s, -k * k * s, c;
  return m;
}

SMatrix embedded_smatrix(const Eigen::Matrix2cd& m, cplx q) {
  // (a, b) amplitudes of e^{+iqx}, e^{-iqx}: (psi, psi') = W (a, b).
  Eigen::Matrix2cd w;
  w << 1.0, 1.0, I * q, -I * q;
  Eigen::Matrix2cd w_inv;
  w_inv << 0.5, -0.5 * I / q, 0.5, 0.5 * I / q;
  const Eigen::Matrix2cd t = w_inv * m * w;
  if (t(1, 1) == 0.0) throw Error(ErrorCode::resummation_divergence, "embedded slab has a transmission pole");
  SMatrix s;
  s.r = -t(1, 0) / t(1, 1);
  s.t = 1.0 / t(1, 1);  // det(t) = det(m) = 1
  s.tp = 1.0 / t(1, 1);
  s.rp = t(0, 1) / t(1, 1);
  return s;
}

double lead_wavevector(const PotentialProfile& profile, double energy, bool right_lead) {
  const Lead& lead = right_lead ? profile.right : profile.left;
  if (!(energy > lead.v_real)) {
    std::ostringstream os;
    os << "energy " << energy << " is not above the " << (right_lead ? "right" : "left")
       << " lead potential " << lead.v_real << " (no open channel)";
    throw Error(ErrorCode::no_open_channel, os.str());
  }
  return std::sqrt(energy - lead.v_real);
}

Eigen::Matrix2cd transfer_matrix(const PotentialProfile& profile, double energy, Zeeman channel) {
  Eigen::Matrix2cd total = Eigen::Matrix2cd::Identity();
  for (const Segment& seg : profile.segments)
    total = segment_transfer(wavevector(energy, seg, channel), seg.length) * total;
  return total;
}

double ScatteringSolution::transmission() const {
  return std::norm(t) * k_right / k_left;
}

double ScatteringSolution::total_length() const {
  if (segment_coefficients.empty()) return 0.0;
  const auto& last = segment_coefficients.back();
  return last.x_begin + last.length;
}

ScatteringSolution solve(const PotentialProfile& profile, double energy, Zeeman channel) {
  require_valid(profile);
  const double kl = lead_wavevector(profile, energy, false);
  const double kr = lead_wavevector(profile, energy, true);

  const std::size_t n = profile.segments.size();
  std::vector<cplx> ks(n);
  std::vector<Eigen::Matrix2cd> ms(n);
  SMatrix total;  // identity
  for (std::size_t j = 0; j < n; ++j) {
    ks[j] = wavevector(energy, profile.segments[j], channel);
    ms[j] = segment_transfer(ks[j], profile.segments[j].length);
    total = star(total, embedded_smatrix(ms[j], kl));
  }
  total = star(total, interface_smatrix(kl, kr));

  ScatteringSolution sol;
  sol.energy = energy;
  sol.t = total.t;
  sol.r = total.r;
  sol.t_rev = total.tp;
  sol.r_rev = total.rp;
  sol.k_left = kl;
  sol.k_right = kr;

  // March (psi, psi') backwards from the exit, the direction in which the
  // physical solution dominates inside evanescent segments.
  sol.segment_coefficients.resize(n);
  cplx psi = sol.t;
  cplx dpsi = I * kr * sol.t;
  double x_right = profile.total_length();
  for (std::size_t jj = n; jj-- > 0;) {
    const Eigen::Matrix2cd& m = ms[jj];
    // m has unit determinant: inverse is [[d, -b], [-c, a]].
    const cplx psi_l = m(1, 1) * psi - m(0, 1) * dpsi;
    const cplx dpsi_l = -m(1, 0) * psi + m(0, 0) * dpsi;
    const double len = profile.segments[jj].length;
    const double x0 = x_right - len;
    sol.segment_coefficients[jj] = coefficients_from_edges(x0, len, ks[jj], psi_l, dpsi_l, psi, dpsi);
    psi = psi_l;
    dpsi = dpsi_l;
    x_right = x0;
  }
  // Re-anchor x_begin exactly to the forward cumulative sums.
  double x = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    sol.segment_coefficients[j].x_begin = x;
    x += profile.segments[j].length;
  }
  return sol;
}

cplx wavefunction_at(const ScatteringSolution& s, double x, bool from_right) {
  const SegmentCoefficients& c = s.segment_coefficients[locate(s, x, from_right)];
  const double d = std::clamp(x - c.x_begin, 0.0, c.length);
  if (c.linear) return c.a * std::cos(c.k * d) + c.b * sin_over_k(c.k, d);
  return c.a * std::exp(I * c.k * d) + c.b * std::exp(I * c.k * (c.length - d));
}

cplx wavefunction_derivative_at(const ScatteringSolution& s, double x, bool from_right) {
  const SegmentCoefficients& c = s.segment_coefficients[locate(s, x, from_right)];
  const double d = std::clamp(x - c.x_begin, 0.0, c.length);
  if (c.linear) return -c.a * c.k * c.k * sin_over_k(c.k, d) + c.b * std::cos(c.k * d);
  return I * c.k * (c.a * std::exp(I * c.k * d) - c.b * std::exp(I * c.k * (c.length - d)));
}

SpinorAmplitudes solve_spinor(const PotentialProfile& profile, double energy) {
  const ScatteringSolution up = solve(profile, energy, Zeeman::up);
  const ScatteringSolution down = solve(profile, energy, Zeeman::down);
  return SpinorAmplitudes{up.t, down.t, up.r, down.r};
}

StackSplit split_stacks(const PotentialProfile& profile, double energy, std::size_t first,
                        std::size_t last, cplx k_inner_left, cplx k_inner_right, Zeeman channel) {
  const double kl = lead_wavevector(profile, energy, false);
  const double kr = lead_wavevector(profile, energy, true);
  StackSplit out;
  for (std::size_t j = 0; j < first; ++j) {
    const Segment& seg = profile.segments[j];
    out.left = star(out.left, embedded_smatrix(segment_transfer(wavevector(energy, seg, channel), seg.length), kl));
  }
  out.left = star(out.left, interface_smatrix(kl, k_inner_left));

  out.right = interface_smatrix(k_inner_right, kl);
  for (std::size_t j = last; j < profile.segments.size(); ++j) {
    const Segment& seg = profile.segments[j];
    out.right = star(out.right, embedded_smatrix(segment_transfer(wavevector(energy, seg, channel), seg.length), kl));
  }
  out.right = star(out.right, interface_smatrix(kl, kr));
  return out;
}

cplx PartialWaveSet::round_trip() const {
  return r21 * r23 * std::exp(2.0 * I * k_inner * length);
}

cplx PartialWaveSet::transmission() const {
  return t12 * t23 * std::exp(I * k_inner * length) / (1.0 - round_trip());
}

cplx PartialWaveSet::reflection() const {
  return r12 + t12 * r23 * t21 * std::exp(2.0 * I * k_inner * length) / (1.0 - round_trip());
}

PartialWaveSet partial_waves(const PotentialProfile& profile, double energy, Zeeman channel) {
  require_valid(profile);
  if (profile.clock_region.size() != 1)
    throw Error(ErrorCode::validation, "partial_waves: clock region must be exactly one segment");
  const std::size_t idx = profile.clock_region.begin;
  const Segment& seg = profile.segments[idx];
  const cplx k_inner = wavevector(energy, seg, channel);
  if (k_inner == 0.0)
    throw Error(ErrorCode::regime_ambiguity, "partial_waves: energy sits exactly on the clock-region potential");
  const StackSplit st = split_stacks(profile, energy, idx, idx + 1, k_inner, k_inner, channel);

  PartialWaveSet pw;
  pw.t12 = st.left.t;
  pw.r12 = st.left.r;
  pw.t21 = st.left.tp;
  pw.r21 = st.left.rp;
  pw.t23 = st.right.t;
  pw.r23 = st.right.r;
  pw.k_inner = k_inner;
  pw.length = seg.length;
  if (std::abs(pw.round_trip()) >= 1.0)
    throw Error(ErrorCode::resummation_divergence, "partial_waves: |r21 r23 e^{2ik'L}| >= 1, geometric series diverges");
  return pw;
}

}  // namespace tunneltime
