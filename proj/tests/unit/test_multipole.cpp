#include <doctest.h>

#include <array>
#include <cmath>

#include "errors.hpp"
#include "multipole.hpp"
#include "rng.hpp"

using namespace lightcone;
using namespace lightcone::multipole;

namespace {

// The kernel the Taylor data describes, with both endpoints free.
double kernel(const std::array<double, 3>& r1, double t1,
              const std::array<double, 3>& r2, double t2) {
  const double dx = r1[0] - r2[0];
  const double dy = r1[1] - r2[1];
  const double dz = r1[2] - r2[2];
  const double dt = t1 - t2;
  return 1.0 / (dx * dx + dy * dy + dz * dz - dt * dt);
}

}  // namespace

TEST_SUITE("multipole") {

TEST_CASE("expansion point validation") {
  ExpansionPoint bad;
  bad.separation = 1.0;
  bad.atom_extent = 1.0;  // extent must be strictly inside the separation
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.atom_extent = -0.1;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.atom_extent = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad.separation = std::nan("");
  bad.atom_extent = 1e-3;
  CHECK_THROWS_AS(bad.validate(), Error);
  ExpansionPoint good{2.5, 1e-2};
  CHECK_NOTHROW(good.validate());
}

TEST_CASE("taylor coefficients match central differences of the kernel") {
  rng::Rng rng(515);
  for (int trial = 0; trial < 50; ++trial) {
    ExpansionPoint point;
    point.separation = 0.5 + 9.5 * rng.uniform();
    point.atom_extent = 1e-4 * point.separation;
    const auto partials = propagator_taylor_coefficients(point);
    const double r = point.separation;
    CHECK(partials.value == 1.0 / (r * r));

    // First atom at z = r, second at the origin, matching the sign choice of
    // the coefficients (z1 - z2 = +r).
    const std::array<double, 3> p1{0.0, 0.0, r};
    const std::array<double, 3> p2{0.0, 0.0, 0.0};
    const double h = 1e-5 * r;
    const auto fd = [&](double f_plus, double f_minus) {
      return (f_plus - f_minus) / (2.0 * h);
    };

    const double dz1 = fd(kernel({0, 0, r + h}, 0, p2, 0), kernel({0, 0, r - h}, 0, p2, 0));
    CHECK(dz1 == doctest::Approx(partials.d_z_first).epsilon(1e-6));
    const double dz2 = fd(kernel(p1, 0, {0, 0, h}, 0), kernel(p1, 0, {0, 0, -h}, 0));
    CHECK(dz2 == doctest::Approx(partials.d_z_second).epsilon(1e-6));
    CHECK(partials.d_z_first == -partials.d_z_second);

    // Equal times and transverse offsets are stationary points of the kernel,
    // so the central differences vanish identically.
    CHECK(partials.d_t_first == 0.0);
    CHECK(partials.d_t_second == 0.0);
    CHECK(partials.d_transverse == 0.0);
    CHECK(fd(kernel(p1, h, p2, 0), kernel(p1, -h, p2, 0)) == 0.0);
    CHECK(fd(kernel(p1, 0, p2, h), kernel(p1, 0, p2, -h)) == 0.0);
    CHECK(fd(kernel({h, 0, r}, 0, p2, 0), kernel({-h, 0, r}, 0, p2, 0)) == 0.0);
    CHECK(fd(kernel(p1, 0, {0, h, 0}, 0), kernel(p1, 0, {0, -h, 0}, 0)) == 0.0);
  }
}

TEST_CASE("ratio bound is the exact worst case of the first-order term") {
  ExpansionPoint point{4.0, 0.25};
  // Same operation order as the implementation, so the match is bitwise.
  CHECK(multipole_ratio_bound(point) == 2.0 * point.atom_extent / point.separation);

  // |first order| / |zeroth order| for one electron displaced by d_A along
  // the separation axis — the largest single partial-derivative term.
  const auto partials = propagator_taylor_coefficients(point);
  const double first = std::abs(partials.d_z_first) * point.atom_extent;
  CHECK(first / partials.value == doctest::Approx(multipole_ratio_bound(point))
                                      .epsilon(1e-15));

  ExpansionPoint bad{1.0, 2.0};
  CHECK_THROWS_AS(multipole_ratio_bound(bad), Error);
}

}  // TEST_SUITE
