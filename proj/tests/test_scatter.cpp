#include <catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"
#include "tunneltime/error.hpp"
#include "tunneltime/scatter.hpp"

using namespace tunneltime;
using testing::Rng;
using testing::uniform;

namespace {

// Textbook rectangular-barrier transmission for E < V0 (hbar = 1, 2m = 1).
double barrier_transmission(double v0, double width, double energy) {
  const double k = std::sqrt(energy);
  const double kappa = std::sqrt(v0 - energy);
  const double s = std::sinh(kappa * width);
  const double f = (kappa * kappa + k * k) * (kappa * kappa + k * k) / (4.0 * k * k * kappa * kappa);
  return 1.0 / (1.0 + f * s * s);
}

PotentialProfile random_complex_profile(Rng& rng) {
  PotentialProfile p = testing::random_real_profile(rng);
  for (Segment& s : p.segments) s.v_imag = uniform(rng, -0.2, 0.5);
  return p;
}

}  // namespace

TEST_CASE("wavevector branches") {
  CHECK(std::abs(wavevector(1.0, cplx{0.0, 0.0}) - 1.0) < 1e-15);
  CHECK(std::abs(wavevector(1.0, cplx{2.0, 0.0}) - cplx{0.0, 1.0}) < 1e-15);
  // Absorption (v_imag > 0) enters as V - i V_I, so k^2 = -1 + 0.01 i and
  // the evanescent wave picks up a small positive real part.
  const cplx k = wavevector(1.0, Segment{1.0, 2.0, 0.01, 0.0});
  CHECK(std::abs(k - cplx{0.005, 1.0}) < 1e-4);
  CHECK(k.imag() >= 0.0);
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    const cplx v{uniform(rng, -5.0, 5.0), uniform(rng, -1.0, 1.0)};
    const double e = uniform(rng, 0.0, 4.0);
    const cplx kk = wavevector(e, v);
    CHECK(kk.imag() >= 0.0);
    CHECK(std::abs(kk * kk - (e - v)) < 1e-12 * std::max(1.0, std::abs(e - v)));
  }
}

TEST_CASE("Zeeman split wavevectors follow kappa -/+ omega/(4 kappa)") {
  const Segment seg{1.0, 2.0, 0.0, 1e-3};
  const double kappa = 1.0;
  const double w = seg.omega_larmor;
  CHECK(std::abs(wavevector(1.0, seg, Zeeman::up).imag() - (kappa - w / (4 * kappa))) < 1e-6);
  CHECK(std::abs(wavevector(1.0, seg, Zeeman::down).imag() - (kappa + w / (4 * kappa))) < 1e-6);
}

TEST_CASE("free propagation") {
  PotentialProfile empty;
  const ScatteringSolution s0 = solve(empty, 1.3);
  CHECK(s0.t == cplx{1.0, 0.0});
  CHECK(s0.r == cplx{0.0, 0.0});

  const PotentialProfile free = make_rectangular_barrier(0.0, 2.5);
  const ScatteringSolution s = solve(free, 1.0);
  CHECK(std::abs(s.r) < 1e-14);
  CHECK(std::abs(std::abs(s.t) - 1.0) < 1e-14);
  // Transmitted wave referenced at the exit plane: t = e^{ikL}.
  CHECK(std::abs(s.t - std::exp(cplx{0.0, 2.5})) < 1e-13);
  for (double x : {0.0, 0.3, 1.7, 2.5}) CHECK(std::abs(std::abs(wavefunction_at(s, x)) - 1.0) < 1e-13);
}

TEST_CASE("rectangular barrier transmission matches the textbook closed form") {
  const ScatteringSolution s = solve(make_rectangular_barrier(2.0, 1.0), 1.0);
  const double expected = barrier_transmission(2.0, 1.0, 1.0);
  CHECK(expected == Catch::Approx(0.41997434161402614).epsilon(1e-12));
  CHECK(std::abs(s.transmission() - expected) < 1e-12);
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const double v0 = uniform(rng, 0.5, 5.0);
    const double w = uniform(rng, 0.1, 4.0);
    const double e = uniform(rng, 0.01, 0.99) * v0;
    CHECK(testing::rel_diff(solve(make_rectangular_barrier(v0, w), e).transmission(),
                            barrier_transmission(v0, w, e)) < 1e-10);
  }
}

TEST_CASE("no open channel below a lead") {
  PotentialProfile p = make_rectangular_barrier(2.0, 1.0);
  p.right.v_real = 1.5;
  CHECK_THROWS_AS(solve(p, 1.0), Error);
  try {
    solve(p, 1.0);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::no_open_channel);
  }
}

TEST_CASE("flux conservation for real profiles") {
  Rng rng(17);
  for (int trial = 0; trial < 200; ++trial) {
    PotentialProfile p = testing::random_real_profile(rng);
    p.left.v_real = uniform(rng, -0.5, 0.5);
    p.right.v_real = uniform(rng, -0.5, 0.5);
    for (int j = 0; j < 10; ++j) {
      const double e = uniform(rng, 0.55, 6.0);
      const ScatteringSolution s = solve(p, e);
      CHECK(std::abs(s.transmission() + s.reflection() - 1.0) < 1e-10);
    }
  }
}

TEST_CASE("absorption removes flux") {
  Rng rng(19);
  for (int trial = 0; trial < 200; ++trial) {
    PotentialProfile p = testing::random_real_profile(rng);
    p.segments[testing::uniform_int(rng, 0, static_cast<int>(p.segments.size()) - 1)].v_imag =
        uniform(rng, 1e-3, 0.5);
    const ScatteringSolution s = solve(p, uniform(rng, 0.05, 5.0));
    CHECK(s.transmission() + s.reflection() < 1.0);
  }
}

TEST_CASE("reciprocity t = t_rev") {
  Rng rng(23);
  for (int trial = 0; trial < 200; ++trial) {
    const PotentialProfile p = random_complex_profile(rng);
    const ScatteringSolution s = solve(p, uniform(rng, 0.05, 5.0));
    CHECK(std::abs(s.t - s.t_rev) < 1e-10 * std::max(1.0, std::abs(s.t)));
  }
}

TEST_CASE("transfer matrices compose") {
  Rng rng(29);
  for (int trial = 0; trial < 200; ++trial) {
    const PotentialProfile a = random_complex_profile(rng);
    const PotentialProfile b = random_complex_profile(rng);
    PotentialProfile ab = a;
    ab.segments.insert(ab.segments.end(), b.segments.begin(), b.segments.end());
    ab.clock_region = {0, ab.segments.size()};
    const double e = uniform(rng, 0.05, 5.0);
    const Eigen::Matrix2cd lhs = transfer_matrix(ab, e);
    const Eigen::Matrix2cd rhs = transfer_matrix(b, e) * transfer_matrix(a, e);
    CHECK((lhs - rhs).norm() <= 1e-10 * rhs.norm());
  }
}

TEST_CASE("wavefunction is continuous across interfaces") {
  Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const PotentialProfile p = random_complex_profile(rng);
    const ScatteringSolution s = solve(p, uniform(rng, 0.05, 5.0));
    for (std::size_t i = 1; i < p.segments.size(); ++i) {
      const double x = p.segment_start(i);
      const cplx l = wavefunction_at(s, x, false), r = wavefunction_at(s, x, true);
      const cplx dl = wavefunction_derivative_at(s, x, false), dr = wavefunction_derivative_at(s, x, true);
      CHECK(std::abs(l - r) < 1e-10 * std::max(1.0, std::abs(l)));
      CHECK(std::abs(dl - dr) < 1e-10 * std::max(1.0, std::abs(dl)));
    }
    // Boundary values match the asymptotic waves.
    CHECK(std::abs(wavefunction_at(s, 0.0) - (1.0 + s.r)) < 1e-10);
    CHECK(std::abs(wavefunction_at(s, p.total_length()) - s.t) < 1e-10);
  }
}

TEST_CASE("wavefunction outside the profile is an error") {
  const ScatteringSolution s = solve(make_rectangular_barrier(2.0, 1.0), 1.0);
  CHECK_THROWS_AS(wavefunction_at(s, -0.1), Error);
  CHECK_THROWS_AS(wavefunction_at(s, 1.1), Error);
}

TEST_CASE("wavefunction decays as exp(-kappa x) inside an opaque barrier") {
  const double kappa = 1.0;
  const ScatteringSolution s = solve(make_rectangular_barrier(2.0, 20.0), 1.0);
  for (double x : {2.0, 5.0, 10.0, 14.0}) {
    const double h = 0.5;
    const double slope = (std::log(std::abs(wavefunction_at(s, x + h))) - std::log(std::abs(wavefunction_at(s, x - h)))) /
                         (2.0 * h);
    CHECK(std::abs(slope + kappa) < 0.01 * kappa);
  }
}

TEST_CASE("very opaque barriers stay finite") {
  const ScatteringSolution s = solve(make_rectangular_barrier(2.0, 80.0), 1.0);
  CHECK(std::isfinite(std::abs(s.t)));
  CHECK(std::abs(s.t) > 0.0);
  CHECK(std::abs(std::log(std::abs(s.t)) + 80.0) < 1.0);
  CHECK(std::abs(s.transmission() + s.reflection() - 1.0) < 1e-12);
  CHECK(std::isfinite(std::abs(wavefunction_at(s, 40.0))));
}

TEST_CASE("energy on a segment potential uses the linear solution") {
  const PotentialProfile p = make_rectangular_barrier(2.0, 1.0);
  const ScatteringSolution at = solve(p, 2.0);
  const ScatteringSolution near = solve(p, 2.0 + 1e-9);
  CHECK(std::abs(at.t - near.t) < 1e-7);
  CHECK(std::abs(wavefunction_at(at, 0.5) - wavefunction_at(near, 0.5)) < 1e-7);
  CHECK(std::abs(at.transmission() + at.reflection() - 1.0) < 1e-12);
}

TEST_CASE("spinor channels") {
  PotentialProfile p = make_rectangular_barrier(2.0, 1.0);
  SECTION("zero field gives identical channels") {
    const SpinorAmplitudes sp = solve_spinor(p, 1.0);
    CHECK(sp.t_plus == sp.t_minus);
    CHECK(sp.r_plus == sp.r_minus);
    CHECK(sp.t_plus == solve(p, 1.0).t);
  }
  SECTION("spin up tunnels more easily") {
    p.segments[0].omega_larmor = 0.01;
    const SpinorAmplitudes sp = solve_spinor(p, 1.0);
    CHECK(std::abs(sp.t_plus) > std::abs(sp.t_minus));
  }
  SECTION("each channel is a scalar solve with the shifted potential") {
    Rng rng(37);
    for (int trial = 0; trial < 50; ++trial) {
      PotentialProfile q = testing::random_real_profile(rng);
      for (Segment& s : q.segments) s.omega_larmor = uniform(rng, 0.0, 0.2);
      const double e = uniform(rng, 0.1, 4.0);
      const SpinorAmplitudes sp = solve_spinor(q, e);
      CHECK(sp.t_plus == solve(q, e, Zeeman::up).t);
      CHECK(sp.t_minus == solve(q, e, Zeeman::down).t);
      PotentialProfile shifted = q;
      for (Segment& s : shifted.segments) {
        s.v_real -= 0.5 * s.omega_larmor;
        s.omega_larmor = 0.0;
      }
      CHECK(std::abs(sp.t_plus - solve(shifted, e).t) < 1e-12);
    }
  }
}

TEST_CASE("partial waves") {
  SECTION("bare barrier: single interface amplitudes") {
    const PotentialProfile p = make_rectangular_barrier(2.0, 1.0);
    for (double e : {0.5, 3.0}) {
      const PartialWaveSet pw = partial_waves(p, e);
      const cplx k = std::sqrt(e);
      const cplx kp = wavevector(e, cplx{2.0, 0.0});
      CHECK(std::abs(pw.r12 - (k - kp) / (k + kp)) < 1e-14);
      CHECK(std::abs(pw.r21 - pw.r23) < 1e-14);
    }
  }
  SECTION("resummation reproduces the direct solve") {
    Rng rng(41);
    int checked = 0;
    for (int trial = 0; trial < 300; ++trial) {
      const PotentialProfile p = testing::flanked_barrier(rng, uniform(rng, 0.5, 3.0), uniform(rng, 0.2, 2.0));
      const double e = uniform(rng, 1.1, 3.0) * p.segments[p.clock_region.begin].v_real;
      const ScatteringSolution s = solve(p, e);
      const PartialWaveSet pw = partial_waves(p, e);
      CHECK(std::abs(pw.transmission() - s.t) < 1e-8);
      CHECK(std::abs(pw.reflection() - s.r) < 1e-8);
      ++checked;
    }
    CHECK(checked == 300);
  }
  SECTION("mirror-symmetric flanks give r21 = r23") {
    PotentialProfile p;
    p.segments = {{0.7, 0.4, 0.0, 0.0}, {1.0, 2.0, 0.0, 0.0}, {0.7, 0.4, 0.0, 0.0}};
    p.clock_region = {1, 2};
    for (double e : {0.3, 1.0, 2.5}) {
      const PartialWaveSet pw = partial_waves(p, e);
      CHECK(std::abs(pw.r21 - pw.r23) < 1e-12);
    }
  }
  SECTION("an evanescent region between real stacks can defeat the series") {
    // |r23| seen from inside a barrier is not flux-bounded, so a thin barrier
    // next to a well can have a round trip larger than one.
    PotentialProfile p;
    p.segments = {{0.642531, -0.767316, 0.0, 0.0}, {0.303172, 1.64649, 0.0, 0.0},
                  {0.122001, 0.110078, 0.0, 0.0}, {1.02483, -0.174969, 0.0, 0.0}};
    p.clock_region = {1, 2};
    try {
      const PartialWaveSet pw = partial_waves(p, 0.325547);
      FAIL("expected a divergence error, round trip " << std::abs(pw.round_trip()));
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::resummation_divergence);
    }
  }
}
