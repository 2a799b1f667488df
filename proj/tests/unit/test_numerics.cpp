#include <doctest.h>

#include <cmath>
#include <complex>

#include "errors.hpp"
#include "numerics.hpp"

using namespace lightcone;
using numerics::cplx;

TEST_SUITE("numerics") {

TEST_CASE("gauss_kronrod integrates low-degree polynomials exactly") {
  auto poly = [](double x) { return cplx{x * x * x * x * x * x, 0.0}; };
  auto r = numerics::gauss_kronrod(poly, 0.0, 2.0);
  CHECK(r.value.real() == doctest::Approx(128.0 / 7.0).epsilon(1e-14));
  CHECK(r.error < 1e-12);
}

TEST_CASE("integrate matches a closed-form oscillatory integral") {
  // integral_0^3 e^{ix} dx = (e^{3i} - 1) / i
  auto f = [](double x) { return std::exp(cplx{0.0, x}); };
  const cplx expected = (std::exp(cplx{0.0, 3.0}) - 1.0) / cplx{0.0, 1.0};
  auto r = numerics::integrate(f, 0.0, 3.0, {});
  CHECK(std::abs(r.value - expected) < 1e-12);
  CHECK(std::abs(r.value - expected) <= r.error + 1e-15);
}

TEST_CASE("integrate honours the absolute floor on vanishing integrals") {
  // Two full periods integrate to zero; a purely relative target could
  // never be met.  The floor must sit above the G7/K15 difference roundoff,
  // which sums to ~1e-14 over a window this long.
  auto f = [](double x) { return std::exp(cplx{0.0, x}); };
  numerics::QuadOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-13;
  auto r = numerics::integrate(f, 0.0, 4.0 * numerics::pi, opt);
  CHECK(std::abs(r.value) < 1e-13);
}

TEST_CASE("integrate reports convergence failure at the panel cap") {
  auto f = [](double x) { return cplx{std::cos(200.0 * x), 0.0}; };
  numerics::QuadOptions opt;
  opt.rel_tol = 1e-15;
  opt.abs_tol = 0.0;
  opt.max_panels = 4;
  CHECK_THROWS_AS(numerics::integrate(f, 0.0, 10.0, opt), Error);
  try {
    numerics::integrate(f, 0.0, 10.0, opt);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::convergence_failure);
  }
}

TEST_CASE("integrate validates its bounds and degenerate span") {
  auto f = [](double) { return cplx{1.0, 0.0}; };
  CHECK_THROWS_AS(numerics::integrate(f, 1.0, 0.0, {}), Error);
  auto r = numerics::integrate(f, 2.0, 2.0, {});
  CHECK(r.value == cplx{0.0, 0.0});
  CHECK(r.panels == 0);
}

TEST_CASE("breakpoints split the initial panel set") {
  int evals_left = 0, evals_right = 0;
  auto f = [&](double x) {
    (x < 1.0 ? evals_left : evals_right)++;
    return cplx{1.0, 0.0};
  };
  numerics::QuadOptions opt;
  opt.breakpoints = {1.0};
  auto r = numerics::integrate(f, 0.0, 4.0, opt);
  CHECK(r.value.real() == doctest::Approx(4.0));
  CHECK(evals_left >= 15);  // the [0, 1] panel was evaluated separately
}

TEST_CASE("period_breakpoints enumerates interior multiples") {
  auto bp = numerics::period_breakpoints(0.0, 1.0, 0.3);
  REQUIRE(bp.size() == 3);
  CHECK(bp[0] == doctest::Approx(0.3));
  CHECK(bp[2] == doctest::Approx(0.9));
  CHECK(numerics::period_breakpoints(0.0, 1.0, 0.0).empty());
}

TEST_CASE("linear_fit recovers an exact line") {
  const double x[] = {1.0, 2.0, 3.0, 4.0};
  const double y[] = {-1.0, 1.0, 3.0, 5.0};
  auto fit = numerics::linear_fit(x, y);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(-3.0).epsilon(1e-14));
  CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("linear_fit rejects malformed inputs") {
  const double x[] = {1.0, 2.0};
  const double y1[] = {1.0};
  CHECK_THROWS_AS(numerics::linear_fit(x, y1), Error);
  const double same[] = {1.0, 1.0};
  const double y2[] = {0.0, 1.0};
  CHECK_THROWS_AS(numerics::linear_fit(same, y2), Error);
}

TEST_CASE("loglog_fit extracts power-law exponents") {
  const double x[] = {0.5, 1.0, 2.0, 4.0};
  double y[4];
  for (int i = 0; i < 4; ++i) y[i] = 3.0 * x[i] * x[i];
  auto fit = numerics::loglog_fit(x, y);
  CHECK(fit.slope == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  const double bad[] = {0.5, -1.0, 2.0, 4.0};
  CHECK_THROWS_AS(numerics::loglog_fit(bad, y), Error);
}

}  // TEST_SUITE
