#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "tunneltime/potentials.hpp"

namespace tunneltime {

using cplx = std::complex<double>;

/// Zeeman channel of the Larmor clock. `up` sees V - omega_L/2 (tunnels more
/// easily), `down` sees V + omega_L/2. `none` ignores omega_larmor entirely.
enum class Zeeman { none, up, down };

/// Effective complex potential of a segment: v_real - i*v_imag -/+ omega_L/2.
cplx effective_potential(const Segment& seg, Zeeman channel = Zeeman::none);

/// k = sqrt(E - V_eff) on the branch Im(k) >= 0; for a real V_eff above E the
/// root is i*kappa, below E it is the positive real root.
cplx wavevector(double energy, cplx v_eff);
cplx wavevector(double energy, const Segment& seg, Zeeman channel = Zeeman::none);

/// 2x2 scattering matrix of a two-port, amplitudes referenced at its two
/// reference planes. r/t: incidence from the left; rp/tp: from the right.
struct SMatrix {
  cplx r{0.0, 0.0};
  cplx t{1.0, 0.0};
  cplx tp{1.0, 0.0};
  cplx rp{0.0, 0.0};
};

/// Redheffer star product: `left` followed by `right`.
SMatrix star(const SMatrix& left, const SMatrix& right);

/// Single interface from a medium with wavevector ka (left) to kb (right).
SMatrix interface_smatrix(cplx ka, cplx kb);

/// Homogeneous slab of length `length` inside a medium of wavevector k.
SMatrix propagation_smatrix(cplx k, double length);

/// Transfer matrix of one segment acting on (psi, psi'): analytic at k = 0.
Eigen::Matrix2cd segment_transfer(cplx k, double length);

/// Scattering matrix of a slab with transfer matrix `m`, embedded between two
/// zero-thickness layers of a reference medium with wavevector q != 0.
SMatrix embedded_smatrix(const Eigen::Matrix2cd& m, cplx q);

/// Transfer matrix of the whole profile mapping (psi, psi') at x = 0 to the
/// right end. Composition: transfer(A then B) = transfer(B) * transfer(A).
Eigen::Matrix2cd transfer_matrix(const PotentialProfile& profile, double energy,
                                 Zeeman channel = Zeeman::none);

/// Field data of one segment. The interior wave is held in the bounded form
///   psi(x) = A e^{ik(x - x0)} + B e^{-ik(x - x0 - L)},
/// which never overflows for Im(k) >= 0. When |k| L is tiny the pair holds
/// (psi, psi') at the left edge instead and `linear` is set.
struct SegmentCoefficients {
  double x_begin = 0.0;
  double length = 0.0;
  cplx k{0.0, 0.0};
  cplx a{0.0, 0.0};
  cplx b{0.0, 0.0};
  bool linear = false;
};

/// Solution of the stationary problem at one energy, incident from the left
/// with unit amplitude e^{ik x}. The reflected wave r e^{-ikx} is referenced at
/// x = 0 and the transmitted wave t e^{ik(x - X)} at the right end X, so a free
/// segment of length L has t = e^{ikL}. Right-incidence amplitudes t_rev,
/// r_rev use the mirrored convention.
struct ScatteringSolution {
  double energy = 0.0;
  cplx t{1.0, 0.0};
  cplx r{0.0, 0.0};
  cplx t_rev{1.0, 0.0};
  cplx r_rev{0.0, 0.0};
  double k_left = 0.0;
  double k_right = 0.0;
  std::vector<SegmentCoefficients> segment_coefficients;

  /// Flux-normalized transmission |t|^2 k_right / k_left.
  double transmission() const;
  double reflection() const { return std::norm(r); }
  double total_length() const;
};

ScatteringSolution solve(const PotentialProfile& profile, double energy,
                         Zeeman channel = Zeeman::none);

/// psi(x) for x in [0, X]; throws Error{out_of_range} elsewhere. At an
/// interface the segment on the left is used unless `from_right` is set.
cplx wavefunction_at(const ScatteringSolution& solution, double x, bool from_right = false);
cplx wavefunction_derivative_at(const ScatteringSolution& solution, double x,
                                bool from_right = false);

struct SpinorAmplitudes {
  cplx t_plus, t_minus, r_plus, r_minus;
};

/// Two independent scalar solves; the Zeeman term acts wherever omega_larmor
/// is non-zero.
SpinorAmplitudes solve_spinor(const PotentialProfile& profile, double energy);

/// Partial-wave amplitudes around a single-segment clock region ("2") between
/// the left stack ("1") and the right stack ("3"). Amplitudes inside region 2
/// are referenced at its own edges.
struct PartialWaveSet {
  cplx t12, t21, t23, r12, r21, r23;
  cplx k_inner;
  double length = 0.0;

  /// Round-trip factor r21 r23 e^{2ik'L}.
  cplx round_trip() const;
  /// Geometric resummation of the transmitted partial waves.
  cplx transmission() const;
  /// Geometric resummation of the reflected partial waves (includes r12).
  cplx reflection() const;
};

/// Throws Error{validation} unless the clock region is exactly one segment,
/// Error{regime_ambiguity} if the inner wavevector vanishes, and
/// Error{resummation_divergence} if |round trip| >= 1.
PartialWaveSet partial_waves(const PotentialProfile& profile, double energy,
                             Zeeman channel = Zeeman::none);

/// Left/right stacks of a profile split around segment `index`, each as an
/// S-matrix between the outer lead and a semi-infinite medium of wavevector
/// k_inner. Exposed for the dressed-amplitude machinery.
struct StackSplit {
  SMatrix left;   // lead -> region
  SMatrix right;  // region -> lead
};
StackSplit split_stacks(const PotentialProfile& profile, double energy, std::size_t first,
                        std::size_t last, cplx k_inner_left, cplx k_inner_right,
                        Zeeman channel = Zeeman::none);

/// Incident-side wavevector of a profile at `energy`; throws
/// Error{no_open_channel} if either lead is closed.
double lead_wavevector(const PotentialProfile& profile, double energy, bool right_lead);

}  // namespace tunneltime
