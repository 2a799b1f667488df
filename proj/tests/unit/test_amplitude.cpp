#include <doctest.h>

#include <cmath>
#include <complex>

#include "amplitude.hpp"
#include "errors.hpp"
#include "numerics.hpp"

using namespace lightcone;
using namespace lightcone::amplitude;

namespace {

const AtomPairConfig base{1.0, 1e-2, 1.0, 1.0, 1.0};

Errc thrown_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a lightcone::Error");
  return Errc::invalid_argument;
}

}  // namespace

TEST_SUITE("amplitude") {

TEST_CASE("config validation") {
  AtomPairConfig cfg = base;
  cfg.dipole = 0.0;
  CHECK_NOTHROW(cfg.validate());  // zero dipole allowed, amplitude vanishes
  cfg.dipole = -1.0;
  CHECK(thrown_code([&] { cfg.validate(); }) == Errc::invalid_argument);
  cfg = base;
  cfg.separation = 0.0;
  CHECK(thrown_code([&] { cfg.validate(); }) == Errc::invalid_argument);
  cfg = base;
  cfg.omega_a = -2.0;
  CHECK(thrown_code([&] { cfg.validate(); }) == Errc::invalid_argument);
  CHECK(base.phase() == 1.0);
  CHECK(base.far_zone_ratio() == 1.0);
}

TEST_CASE("closed forward amplitude matches frozen values") {
  auto out = amplitude_forward_closed(base);
  CHECK(out.b.real() == doctest::Approx(-1.1644278621773357e-06).epsilon(1e-14));
  CHECK(out.b.imag() == doctest::Approx(-4.0155868652295184e-07).epsilon(1e-14));
  CHECK(out.method == Method::closed_forward);
  CHECK(out.error_estimate == 0.0);
}

TEST_CASE("reverse amplitude is the forward form at negated frequency") {
  AtomPairConfig negated = base;
  negated.omega_a = 2.5;
  auto rev = amplitude_reverse_closed(negated);
  // (1 - cos x) is even and (x - sin x) odd, so the reverse conjugates.
  auto fwd = amplitude_forward_closed(negated);
  CHECK(rev.b.real() == doctest::Approx(fwd.b.real()).epsilon(1e-15));
  CHECK(rev.b.imag() == doctest::Approx(-fwd.b.imag()).epsilon(1e-15));
}

TEST_CASE("total amplitude is real, non-positive and frozen") {
  auto out = amplitude_total_closed(base);
  CHECK(out.b.imag() == 0.0);
  CHECK(out.b.real() == doctest::Approx(-2.3288557243546715e-06).epsilon(1e-14));
  auto sum = amplitude_forward_closed(base).b + amplitude_reverse_closed(base).b;
  CHECK(std::abs(out.b - sum) <= 1e-12 * std::abs(out.b) + 1e-20);
}

TEST_CASE("total amplitude vanishes at full oscillation periods") {
  AtomPairConfig cfg = base;
  cfg.delta_t = 2.0 * numerics::pi;  // omega * delta_t = 2 pi
  auto out = amplitude_total_closed(cfg);
  const double pref_scale = cfg.alpha * cfg.dipole * cfg.dipole;
  CHECK(std::abs(out.b) <= 1e-12 * pref_scale);
  // The forward piece alone stays finite there.
  CHECK(std::abs(amplitude_forward_closed(cfg).b) > 1e-7 * pref_scale);
}

TEST_CASE("zero window or zero dipole short-circuit to zero") {
  AtomPairConfig cfg = base;
  cfg.delta_t = 0.0;
  CHECK(amplitude_quadrature(cfg, PropagatorChoice::far_zone).b ==
        std::complex<double>{0.0, 0.0});
  CHECK(amplitude_forward_closed(cfg).b == std::complex<double>{0.0, 0.0});
  cfg = base;
  cfg.dipole = 0.0;
  cfg.delta_t = 0.5;  // geometry check still applies: stay off the light cone
  CHECK(amplitude_quadrature(cfg, PropagatorChoice::full).b ==
        std::complex<double>{0.0, 0.0});
}

TEST_CASE("far-zone quadrature agrees with the closed forward form") {
  for (double x : {0.3, 1.0, numerics::pi, 2.0 * numerics::pi, 7.5}) {
    AtomPairConfig cfg = base;
    cfg.delta_t = x / cfg.omega_a;
    auto closed = amplitude_forward_closed(cfg);
    auto quad = amplitude_quadrature(cfg, PropagatorChoice::far_zone, 1e-10);
    CHECK(quad.method == Method::quadrature_far);
    CHECK(std::abs(quad.b - closed.b) / std::abs(closed.b) < 1e-8);
  }
}

TEST_CASE("quadrature total matches the cosine form including zeros") {
  AtomPairConfig cfg = base;
  cfg.delta_t = 2.0;
  auto closed = amplitude_total_closed(cfg);
  auto quad = amplitude_quadrature_total(cfg, PropagatorChoice::far_zone, 1e-10);
  CHECK(std::abs(quad.b - closed.b) / std::abs(closed.b) < 1e-8);

  // At x = 2 pi the total vanishes; the quadrature must land near zero on the
  // scale of the surviving forward piece, not of the (zero) total.
  cfg.delta_t = 2.0 * numerics::pi;
  auto fwd = amplitude_forward_closed(cfg);
  auto zero = amplitude_quadrature_total(cfg, PropagatorChoice::far_zone, 1e-10);
  CHECK(std::abs(zero.b) / std::abs(fwd.b) < 1e-8);
}

TEST_CASE("full kernel needs separation beyond the window") {
  AtomPairConfig cfg = base;
  cfg.separation = 0.5;  // delta_t = 1 reaches the light cone
  CHECK(thrown_code([&] {
          amplitude_quadrature(cfg, PropagatorChoice::full);
        }) == Errc::domain_error);
}

TEST_CASE("full-kernel deviation follows a square law in the ratio") {
  AtomPairConfig cfg = base;
  auto scan = farzone_correction_scan(cfg, {1e-3, 1e-2, 1e-1});
  REQUIRE(scan.points.size() == 3);
  CHECK(scan.fit.slope == doctest::Approx(2.0).epsilon(0.05));
  for (const auto& p : scan.points) CHECK(p.relative_deviation > 0.0);
  CHECK(scan.points[0].relative_deviation < scan.points[2].relative_deviation);
  CHECK(thrown_code([&] { farzone_correction_scan(cfg, {0.6}); }) ==
        Errc::domain_error);
  CHECK(thrown_code([&] { farzone_correction_scan(cfg, {}); }) ==
        Errc::invalid_argument);
}

}  // TEST_SUITE
