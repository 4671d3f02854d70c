#include <catch_amalgamated.hpp>

#include <cmath>

#include "tunneltime/derivative.hpp"
#include "tunneltime/error.hpp"

using namespace tunneltime;

TEST_CASE("spec validation") {
  CHECK(validate(DerivativeSpec{}).empty());
  CHECK_FALSE(validate(DerivativeSpec{{1e-2}, 2, 1}).empty());
  CHECK_FALSE(validate(DerivativeSpec{{1e-2, 2e-2}, 2, 1}).empty());
  CHECK_FALSE(validate(DerivativeSpec{{1e-2, -1e-3}, 2, 1}).empty());
  CHECK_FALSE(validate(DerivativeSpec{{1e-2, 1e-3}, 3, 1}).empty());
  CHECK_THROWS_AS(richardson_derivative([](double x) { return x; }, 0.0, 1.0, DerivativeSpec{{1e-2}, 2, 1}), Error);
}

TEST_CASE("smooth functions are differentiated accurately") {
  for (int order : {2, 4}) {
    DerivativeSpec spec;
    spec.order = order;
    const DerivativeEstimate d = richardson_derivative([](double x) { return std::sin(3.0 * x); }, 0.4, 1.0, spec);
    CHECK(std::abs(d.value - 3.0 * std::cos(1.2)) < 1e-10);
    CHECK(d.error < 1e-8);
    CHECK(d.steps.size() == spec.steps.size());
  }
}

TEST_CASE("error estimate bounds the actual error") {
  DerivativeSpec coarse{{0.2, 0.1, 0.05}, 2, 1};
  const DerivativeEstimate d = richardson_derivative([](double x) { return std::exp(2.0 * x); }, 0.0, 1.0, coarse);
  CHECK(std::abs(d.value - 2.0) <= d.error);
}

TEST_CASE("non-finite samples are reported") {
  try {
    richardson_derivative([](double x) { return std::log(x); }, 0.0, 1.0, DerivativeSpec{});
    FAIL("expected failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::derivative_failure);
  }
}
