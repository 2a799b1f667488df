#pragma once

// Feynman propagator of the massless scalar field between two spacetime
// points, evaluated in natural units (hbar = c = 1):
//
//   D_F(r, tau) = -1 / (4 i pi^2 (r^2 - tau^2 - i epsilon))
//
// together with an independent regulated mode-sum route to the same kernel
// and small Lorentz-boost utilities.  Only |D_F| and relative phases carry
// physical meaning; the overall sign follows the convention above.

#include <complex>
#include <vector>

#include "numerics.hpp"

namespace lightcone::propagator {

using cplx = std::complex<double>;

// Spatial separation r >= 0 and time separation tau between the two events.
struct SpacetimeInterval {
  double r = 0.0;
  double tau = 0.0;

  double invariant_interval() const { return r * r - tau * tau; }
  void validate() const;
};

enum class Regime { outside_cone, inside_cone, near_cone };

const char* regime_name(Regime);

// Light-cone proximity guard, in units of max(r^2, tau^2).
inline constexpr double cone_guard = 1e-9;

Regime classify(const SpacetimeInterval&);

struct PropagatorValue {
  cplx value{0.0, 0.0};
  Regime regime = Regime::outside_cone;
  double epsilon = 0.0;
};

// Closed-form evaluation.  epsilon > 0 regularises the light-cone pole;
// with epsilon = 0 an interval inside the near-cone guard is an error.
PropagatorValue feynman_propagator_closed(const SpacetimeInterval&, double epsilon);

// Large-separation limit -1/(4 i pi^2 r^2), valid for r >> tau.  Agrees
// bit-for-bit with the closed form at tau = 0, epsilon = 0.
cplx feynman_propagator_far(double r);

// Regulated radial mode sum
//   (1 / 4 pi^2 r) * integral_0^k_max dk sin(kr) exp(-(eta + i tau) k),
// whose eta -> 0, k_max -> infinity limit is 1/(4 pi^2 (r^2 - tau^2)),
// i.e. -i * D_F away from the light cone.
struct ModeSumConfig {
  double eta = 1e-2;
  double k_max = 5e3;
  int panels = 4096;

  // eta <= 0.01 * min(r, |r - tau|), k_max = 50 / eta.
  static ModeSumConfig for_interval(const SpacetimeInterval&);
  void validate() const;
  // The quoted error bounds assume the exponential cutoff is resolved.
  bool tail_resolved() const { return k_max * eta >= 10.0; }
};

struct ModeSumResult {
  cplx value{0.0, 0.0};
  double error_estimate = 0.0;    // quadrature + truncation tail, absolute
  bool regulator_warning = false; // set when k_max * eta is too small to trust
};

ModeSumResult mode_sum_propagator(const SpacetimeInterval&, const ModeSumConfig&,
                                  double tol = 1e-9);

// One-dimensional boost of an event (x, t) by the given rapidity.
struct Event {
  double x = 0.0;
  double t = 0.0;
};

Event lorentz_boost(const Event&, double rapidity);

// Boost applied to a separation: r transforms as |x'|.  Leaves
// invariant_interval unchanged up to floating round-off.
SpacetimeInterval boosted(const SpacetimeInterval&, double rapidity);

// Equal-time slice of |D_F| over a square grid, for map-style export.
// Rows inside the near-cone guard are clamped rather than singular; the
// magnitude cap is 1e6 times the far-zone value at the cone radius r = t.
struct GridRow {
  double x = 0.0;
  double y = 0.0;
  cplx value{0.0, 0.0};
  double magnitude = 0.0;
  Regime regime = Regime::outside_cone;
};

std::vector<GridRow> propagator_grid(double t, double half_extent, int resolution);

}  // namespace lightcone::propagator
