#include <catch_amalgamated.hpp>

#include <cmath>

#include "support.hpp"
#include "tunneltime/error.hpp"
#include "tunneltime/timescales.hpp"

using namespace tunneltime;
using testing::rel_diff;
using testing::Rng;
using testing::uniform;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::validation;
}

// Random flanked barrier and an energy away from the clock potential.
std::pair<PotentialProfile, double> flanked_case(Rng& rng) {
  const double v0 = uniform(rng, 0.5, 3.0);
  PotentialProfile p = testing::flanked_barrier(rng, v0, uniform(rng, 0.3, 2.0));
  double e = 0.0;
  do e = uniform(rng, 0.1, 4.0) * v0;
  while (std::abs(e - v0) < 1e-3);
  return {p, e};
}

// Round trip inside the clock segment, evaluated without the convergence check.
cplx partial_round_trip(const PotentialProfile& p, double e) {
  const std::size_t i = p.clock_region.begin;
  const cplx k = wavevector(e, p.segments[i]);
  const StackSplit st = split_stacks(p, e, i, i + 1, k, k);
  return st.left.rp * st.right.r * std::exp(2.0 * cplx{0.0, 1.0} * k * p.segments[i].length);
}

}  // namespace

TEST_CASE("free segment times equal the crossing time") {
  const PotentialProfile p = make_rectangular_barrier(0.0, 1.0);
  CHECK(wigner_delay(p, 1.0, Channel::transmission).value == Catch::Approx(0.5).epsilon(1e-8));
  CHECK(dwell_time(p, 1.0, p.clock_region).value == Catch::Approx(0.5).epsilon(1e-10));
  CHECK(bl_time(p, 1.0, p.clock_region) == Catch::Approx(0.5).epsilon(1e-14));
  CHECK(imag_clock_time(p, 1.0, {}, Channel::transmission).value == Catch::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("Buttiker-Landauer time") {
  CHECK(bl_time(make_rectangular_barrier(2.0, 1.0), 1.0, {0, 1}) == Catch::Approx(0.5).epsilon(1e-14));
  PotentialProfile two;
  two.segments = {{1.0, 2.0, 0.0, 0.0}, {0.5, 5.0, 0.0, 0.0}};
  two.clock_region = {0, 2};
  CHECK(bl_time(two, 1.0, {0, 2}) == Catch::Approx(0.5 + 0.5 / (2.0 * 2.0)).epsilon(1e-14));
  CHECK(code_of([] { bl_time(make_rectangular_barrier(2.0, 1.0), 2.0, {0, 1}); }) ==
        ErrorCode::divergent_integrand);
}

TEST_CASE("dwell time is non-negative") {
  Rng rng(43);
  for (int trial = 0; trial < 100; ++trial) {
    const PotentialProfile p = testing::random_real_profile(rng);
    CHECK(dwell_time(p, uniform(rng, 0.05, 5.0), p.clock_region).value >= 0.0);
  }
}

TEST_CASE("dwell time needs a real potential") {
  PotentialProfile p = make_rectangular_barrier(2.0, 1.0);
  p.segments[0].v_imag = 0.1;
  CHECK(code_of([&] { dwell_time(p, 1.0, {0, 1}); }) == ErrorCode::validation);
}

TEST_CASE("high-energy limit approaches the classical crossing time") {
  const PotentialProfile p = make_rectangular_barrier(2.0, 1.0);
  const double e = 200.0;
  const double classical = 1.0 / (2.0 * std::sqrt(e - 2.0));
  const double wigner = wigner_delay(p, e, Channel::transmission).value;
  const LarmorTimes lt = larmor_times(p, e);
  CHECK(rel_diff(wigner, classical) < 0.01);
  CHECK(rel_diff(lt.precession_transmission.value, classical) < 0.01);
  CHECK(rel_diff(lt.precession_transmission.value, wigner) < 0.01);
  CHECK(rel_diff(imag_clock_time(p, e, {}, Channel::transmission).value, wigner) < 0.01);
  CHECK(rel_diff(sojourn_transmission(p, e).value, classical) < 0.01);
}

TEST_CASE("opaque barrier: rotation and sojourn times approach tau_BL") {
  const PotentialProfile p = make_rectangular_barrier(2.0, 10.0);
  const double bl = bl_time(p, 1.0, p.clock_region);
  CHECK(rel_diff(larmor_times(p, 1.0).rotation_transmission.value, bl) < 0.01);
  CHECK(rel_diff(sojourn_transmission(p, 1.0).value, bl) < 0.01);
}

TEST_CASE("imaginary-clock time over tau_BL falls as 1/(kappa L)") {
  // kappa = 1 at E = 1 for V0 = 2; widths stay where |t| is above the 1e-8 floor.
  double previous = 1e300;
  double scaled_first = 0.0;
  for (double width : {2.0, 4.0, 6.0, 8.0}) {
    const PotentialProfile p = make_rectangular_barrier(2.0, width);
    const double ratio = imag_clock_time(p, 1.0, {}, Channel::transmission).value / bl_time(p, 1.0, {0, 1});
    CHECK(ratio < previous);
    previous = ratio;
    if (width == 4.0) scaled_first = ratio * width;
    if (width == 8.0) CHECK(rel_diff(ratio * width, scaled_first) < 0.05);
  }
}

TEST_CASE("small-field spin rotation is omega tau_z / 2") {
  const PotentialProfile p = make_rectangular_barrier(2.0, 1.5);
  const double tz = larmor_times(p, 1.0).rotation_transmission.value;
  PotentialProfile clocked = p;
  const double w = 1e-4;
  clocked.segments[0].omega_larmor = w;
  const SpinorAmplitudes sp = solve_spinor(clocked, 1.0);
  const double tp = std::norm(sp.t_plus), tm = std::norm(sp.t_minus);
  const double sz = 0.5 * (tp - tm) / (tp + tm);
  CHECK(rel_diff(sz, 0.5 * w * tz) < 1e-3);
}

TEST_CASE("Hartmann saturation against linear sojourn growth") {
  const PotentialProfile p8 = make_rectangular_barrier(2.0, 8.0);
  const PotentialProfile p16 = make_rectangular_barrier(2.0, 16.0);
  CHECK(rel_diff(wigner_delay(p8, 1.0, Channel::transmission).value,
                 wigner_delay(p16, 1.0, Channel::transmission).value) < 0.01);
  CHECK(rel_diff(sojourn_transmission(p16, 1.0).value, 2.0 * sojourn_transmission(p8, 1.0).value) < 0.01);
}

TEST_CASE("dressed amplitude") {
  Rng rng(47);
  SECTION("xi = 0 reproduces the scattering amplitudes") {
    for (int trial = 0; trial < 100; ++trial) {
      auto [p, e] = flanked_case(rng);
      const ScatteringSolution s = solve(p, e);
      CHECK(std::abs(dressed_transmission(p, e, 0.0, Channel::transmission) - s.t) < 1e-10);
      CHECK(std::abs(dressed_transmission(p, e, 0.0, Channel::reflection) - s.r) < 1e-10);
    }
  }
  SECTION("propagating bare barrier matches the pinned resummation") {
    const PotentialProfile p = make_rectangular_barrier(1.0, 1.3);
    const double e = 2.2;
    const PartialWaveSet pw = partial_waves(p, e);
    const double kr = pw.k_inner.real();
    for (double xi : {0.0, 0.01, 0.1, 0.5}) {
      const cplx kd = kr + cplx{0.0, xi / (2.0 * kr * pw.length)};
      const cplx ph = std::exp(cplx{0.0, 1.0} * kd * pw.length);
      const cplx t = pw.t12 * pw.t23 * ph / (1.0 - pw.r21 * pw.r23 * ph * ph);
      CHECK(std::abs(std::norm(dressed_transmission(p, e, xi, Channel::transmission)) - std::norm(t)) < 1e-10);
    }
  }
  SECTION("evanescent clock moves the phase, not the modulus") {
    const PotentialProfile p = make_rectangular_barrier(2.0, 5.0);
    const cplx t0 = dressed_transmission(p, 1.0, 0.0, Channel::transmission);
    const cplx t1 = dressed_transmission(p, 1.0, 1e-3, Channel::transmission);
    const double dmod = std::abs(std::log(std::abs(t1) / std::abs(t0)));
    const double dphase = std::abs(std::arg(t1 / t0));
    CHECK(dphase > 1e-4);
    CHECK(dmod < 1e-3 * dphase);
  }
}

TEST_CASE("prompt reflection") {
  const PotentialProfile bare = make_rectangular_barrier(2.0, 1.0);
  for (double e : {0.5, 3.0}) {
    const cplx k = std::sqrt(e);
    const cplx kp = wavevector(e, cplx{2.0, 0.0});
    CHECK(std::abs(prompt_reflection(bare, e) - (k - kp) / (k + kp)) < 1e-14);
  }
  PotentialProfile matched;
  matched.segments = {{1.0, 0.0, 0.0, 0.0}, {1.0, 2.0, 0.0, 0.0}};
  matched.clock_region = {0, 1};
  CHECK(std::abs(prompt_reflection(matched, 1.0)) < 1e-14);
  Rng rng(53);
  for (int trial = 0; trial < 200; ++trial) {
    auto [p, e] = flanked_case(rng);
    CHECK(std::abs(prompt_reflection(p, e)) <= 1.0 + 1e-12);
  }
}

TEST_CASE("numerical sojourn times agree with the closed forms") {
  Rng rng(59);
  for (int trial = 0; trial < 200; ++trial) {
    auto [p, e] = flanked_case(rng);
    if (std::abs(partial_round_trip(p, e)) >= 1.0) continue;
    const ClosedFormSojourn cf = sojourn_closed_form(p, e);
    CHECK(rel_diff(sojourn_transmission(p, e).value, cf.transmission) < 1e-4);
    CHECK(rel_diff(sojourn_reflection(p, e).value, cf.reflection) < 1e-4);
  }
}

TEST_CASE("reflection sojourn exceeds transmission sojourn by tau_BL") {
  const PotentialProfile p = make_rectangular_barrier(2.0, 1.0);
  for (double e : {0.2, 0.9, 1.7, 2.3, 3.5, 8.0}) {
    const double bl = bl_time(p, e, p.clock_region);
    const double diff = sojourn_reflection(p, e).value - sojourn_transmission(p, e).value;
    CHECK(std::abs(diff - bl) < 1e-4 * bl);
  }
}

TEST_CASE("sojourn times are non-negative") {
  Rng rng(61);
  int evaluated = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto [p, e] = flanked_case(rng);
    double st = 0.0, sr = 0.0;
    try {
      st = sojourn_transmission(p, e).value;
      sr = sojourn_reflection(p, e).value;
    } catch (const Error& err) {
      // Only the partial-wave series may fail here; it does so in a small
      // fraction of evanescent cases.
      CHECK(err.code() == ErrorCode::resummation_divergence);
      continue;
    }
    CHECK(st >= 0.0);
    CHECK(sr >= 0.0);
    ++evaluated;
  }
  CHECK(evaluated > 290);
}

TEST_CASE("sojourn is additive over disjoint clock regions") {
  Rng rng(67);
  for (int trial = 0; trial < 50; ++trial) {
    PotentialProfile p;
    p.segments = {testing::random_segment(rng, -1.0, 3.0), testing::random_segment(rng, -1.0, 3.0),
                  testing::random_segment(rng, -1.0, 3.0), testing::random_segment(rng, -1.0, 3.0),
                  testing::random_segment(rng, -1.0, 3.0)};
    p.clock_region = {1, 2};
    const double e = uniform(rng, 0.1, 5.0);
    double a = 0.0, b = 0.0, ab = 0.0;
    try {
      a = sojourn_for_segments(p, e, {1}, Channel::transmission).value;
      b = sojourn_for_segments(p, e, {3}, Channel::transmission).value;
      ab = sojourn_for_segments(p, e, {1, 3}, Channel::transmission).value;
    } catch (const Error& err) {
      CHECK(err.code() == ErrorCode::resummation_divergence);
      continue;
    }
    CHECK(rel_diff(ab, a + b) < 1e-4);
  }
}

TEST_CASE("Larmor pairing reproduces the imaginary-clock sojourn") {
  Rng rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    auto [p, e] = flanked_case(rng);
    if (std::abs(partial_round_trip(p, e)) >= 1.0) continue;
    CHECK(rel_diff(larmor_sojourn(p, e, Channel::transmission).value, sojourn_transmission(p, e).value) < 1e-4);
    CHECK(rel_diff(larmor_sojourn(p, e, Channel::reflection).value, sojourn_reflection(p, e).value) < 1e-4);
  }
}

TEST_CASE("dwell time splits into conditional clock times") {
  Rng rng(73);
  for (int trial = 0; trial < 50; ++trial) {
    const PotentialProfile p = testing::random_real_profile(rng);
    const double e = uniform(rng, 0.05, 5.0);
    const ScatteringSolution s = solve(p, e);
    const double tt = imag_clock_time(p, e, {}, Channel::transmission).value;
    const double tr = imag_clock_time(p, e, {}, Channel::reflection).value;
    const double dwell = dwell_time(p, e, p.clock_region).value;
    CHECK(rel_diff(dwell, s.transmission() * tt + s.reflection() * tr) < 1e-6);
  }
}

TEST_CASE("singular and ambiguous points are reported") {
  const PotentialProfile free = make_rectangular_barrier(0.0, 1.0);
  CHECK(code_of([&] { sojourn_reflection(free, 1.0); }) == ErrorCode::log_singularity);
  CHECK(code_of([&] { imag_clock_time(free, 1.0, {}, Channel::reflection); }) == ErrorCode::log_singularity);
  const PotentialProfile p = make_rectangular_barrier(2.0, 1.0);
  CHECK(code_of([&] { sojourn_transmission(p, 2.0); }) == ErrorCode::regime_ambiguity);
}

TEST_CASE("full report") {
  const PotentialProfile p = make_rectangular_barrier(2.0, 1.0);
  SECTION("above the barrier every entry is present") {
    const TimescaleReport r = full_report(p, 3.0);
    CHECK_FALSE(r.evanescent_regime);
    CHECK_FALSE(r.extrapolated);
    for (Method m : all_methods()) {
      INFO(to_string(m));
      REQUIRE(r.entries.at(m).value.has_value());
      CHECK(r.entries.at(m).error_estimate >= 0.0);
    }
  }
  SECTION("below the barrier the evanescent flag is set") {
    const TimescaleReport r = full_report(p, 1.0);
    CHECK(r.evanescent_regime);
    CHECK(r.entries.at(Method::sojourn).value.has_value());
    CHECK(*r.entries.at(Method::sojourn).value >= 0.0);
  }
  SECTION("at the barrier top the sojourn entry is absent with a reason") {
    const TimescaleReport r = full_report(p, 2.0);
    CHECK_FALSE(r.entries.at(Method::sojourn).value.has_value());
    CHECK(r.entries.at(Method::sojourn).reason.find("regime_ambiguity") != std::string::npos);
  }
  SECTION("multi-segment clock regions are flagged") {
    PotentialProfile q;
    q.segments = {{1.0, 2.0, 0.0, 0.0}, {1.0, 1.0, 0.0, 0.0}};
    q.clock_region = {0, 2};
    CHECK(full_report(q, 1.5).extrapolated);
  }
}

TEST_CASE("halving the smallest probe step stays within the error estimate") {
  DerivativeSpec base;
  DerivativeSpec finer = base;
  finer.steps.back() *= 0.5;
  Rng rng(79);
  for (int trial = 0; trial < 20; ++trial) {
    auto [p, e] = flanked_case(rng);
    const TimescaleReport a = full_report(p, e, base);
    const TimescaleReport b = full_report(p, e, finer);
    for (Method m : all_methods()) {
      const TimeEntry& x = a.entries.at(m);
      const TimeEntry& y = b.entries.at(m);
      if (!x.value || !y.value) continue;
      INFO(to_string(m) << " at E=" << e);
      CHECK(std::abs(*x.value - *y.value) <= std::max(x.error_estimate, y.error_estimate) + 1e-14);
    }
  }
}
