#include "propagator.hpp"

#include <cmath>

#include "errors.hpp"

namespace lightcone::propagator {

namespace {

constexpr double inv_four_pi_sq = 1.0 / numerics::four_pi_sq;

// Guard width in absolute units for a given interval.
double guard_width(const SpacetimeInterval& iv) {
  return cone_guard * std::max(iv.r * iv.r, iv.tau * iv.tau);
}

}  // namespace

void SpacetimeInterval::validate() const {
  require(std::isfinite(r) && std::isfinite(tau), Errc::invalid_argument,
          "interval coordinates must be finite");
  require(r >= 0.0, Errc::invalid_argument, "spatial separation must be non-negative");
}

const char* regime_name(Regime rg) {
  switch (rg) {
    case Regime::outside_cone: return "outside_cone";
    case Regime::inside_cone: return "inside_cone";
    case Regime::near_cone: return "near_cone";
  }
  return "unknown";
}

Regime classify(const SpacetimeInterval& iv) {
  const double s = iv.invariant_interval();
  const double guard = guard_width(iv);
  // The degenerate origin r = tau = 0 sits on the cone itself.
  if (std::abs(s) < guard || guard == 0.0) return Regime::near_cone;
  return s > 0.0 ? Regime::outside_cone : Regime::inside_cone;
}

PropagatorValue feynman_propagator_closed(const SpacetimeInterval& iv, double epsilon) {
  iv.validate();
  require(std::isfinite(epsilon) && epsilon >= 0.0, Errc::invalid_argument,
          "epsilon must be finite and non-negative");
  const double s = iv.invariant_interval();
  const Regime regime = classify(iv);
  if (epsilon == 0.0 && std::abs(s) <= guard_width(iv))
    raise(Errc::light_cone_singularity,
          "interval lies on the light cone; pass epsilon > 0 to regularise");
  // -1/(4 i pi^2 (s - i eps)) == -(1/4pi^2) / (eps + i s); no cancellation.
  const cplx value = -inv_four_pi_sq / cplx(epsilon, s);
  return {value, regime, epsilon};
}

cplx feynman_propagator_far(double r) {
  require(std::isfinite(r) && r > 0.0, Errc::invalid_argument,
          "far-zone form needs r > 0");
  return feynman_propagator_closed({r, 0.0}, 0.0).value;
}

ModeSumConfig ModeSumConfig::for_interval(const SpacetimeInterval& iv) {
  iv.validate();
  require(iv.r > 0.0, Errc::domain_error, "mode sum needs r > 0");
  const double scale = std::min(iv.r, std::abs(iv.r - std::abs(iv.tau)));
  require(scale > 0.0, Errc::domain_error,
          "no default regulator on the light cone; choose eta explicitly");
  ModeSumConfig cfg;
  cfg.eta = 0.01 * scale;
  cfg.k_max = 50.0 / cfg.eta;
  cfg.panels = 4096;
  return cfg;
}

void ModeSumConfig::validate() const {
  require(std::isfinite(eta) && eta > 0.0, Errc::invalid_argument, "eta must be > 0");
  require(std::isfinite(k_max) && k_max > 0.0, Errc::invalid_argument, "k_max must be > 0");
  require(panels >= 1, Errc::invalid_argument, "panels must be >= 1");
}

ModeSumResult mode_sum_propagator(const SpacetimeInterval& iv, const ModeSumConfig& cfg,
                                  double tol) {
  iv.validate();
  cfg.validate();
  require(iv.r > 0.0, Errc::domain_error, "mode sum needs r > 0");
  require(std::isfinite(tol) && tol > 0.0, Errc::invalid_argument, "tol must be > 0");

  const double r = iv.r;
  const cplx decay(cfg.eta, iv.tau);  // exp(-(eta + i tau) k)
  auto integrand = [&](double k) { return std::sin(k * r) * std::exp(-decay * k); };

  numerics::QuadOptions opt;
  opt.rel_tol = tol;
  opt.initial_splits = cfg.panels;
  opt.max_panels = std::max<std::size_t>(static_cast<std::size_t>(cfg.panels) * 16, 1u << 15);
  numerics::QuadResult q = numerics::integrate(integrand, 0.0, cfg.k_max, opt);

  const double prefactor = inv_four_pi_sq / r;
  // Tail truncation bound: |integral over k > k_max| <= exp(-eta k_max)/eta.
  const double tail = std::exp(-cfg.eta * cfg.k_max) / cfg.eta;
  ModeSumResult out;
  out.value = prefactor * q.value;
  out.error_estimate = prefactor * (q.error + tail);
  out.regulator_warning = !cfg.tail_resolved();
  return out;
}

Event lorentz_boost(const Event& ev, double rapidity) {
  require(std::isfinite(ev.x) && std::isfinite(ev.t) && std::isfinite(rapidity),
          Errc::invalid_argument, "boost inputs must be finite");
  const double ch = std::cosh(rapidity);
  const double sh = std::sinh(rapidity);
  return {ev.x * ch - ev.t * sh, ev.t * ch - ev.x * sh};
}

SpacetimeInterval boosted(const SpacetimeInterval& iv, double rapidity) {
  iv.validate();
  const Event ev = lorentz_boost({iv.r, iv.tau}, rapidity);
  return {std::abs(ev.x), ev.t};
}

std::vector<GridRow> propagator_grid(double t, double half_extent, int resolution) {
  require(std::isfinite(t) && t > 0.0, Errc::invalid_argument, "grid time must be > 0");
  require(std::isfinite(half_extent) && half_extent > 0.0, Errc::invalid_argument,
          "grid extent must be > 0");
  require(resolution >= 2, Errc::invalid_argument, "resolution must be >= 2");

  // Magnitude cap: 1e6 times the far-zone value at the cone radius.
  const double cap = 1e6 * inv_four_pi_sq / (t * t);
  const double t_sq = t * t;
  const double step = 2.0 * half_extent / (resolution - 1);

  std::vector<GridRow> rows;
  rows.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int iy = 0; iy < resolution; ++iy) {
    const double y = -half_extent + iy * step;
    for (int ix = 0; ix < resolution; ++ix) {
      const double x = -half_extent + ix * step;
      const double r_sq = x * x + y * y;
      const double s = r_sq - t_sq;
      GridRow row;
      row.x = x;
      row.y = y;
      const double guard = cone_guard * std::max(r_sq, t_sq);
      if (std::abs(s) < guard || s == 0.0) {
        // On/near the cone: the eps -> 0+ limit approaches the negative real
        // axis, so the clamped value keeps that phase.
        row.regime = Regime::near_cone;
        row.value = cplx(-cap, 0.0);
        row.magnitude = cap;
      } else {
        row.regime = s > 0.0 ? Regime::outside_cone : Regime::inside_cone;
        cplx value = -inv_four_pi_sq / cplx(0.0, s);
        double mag = inv_four_pi_sq / std::abs(s);
        if (mag > cap) {
          value *= cap / mag;
          mag = cap;
        }
        row.value = value;
        row.magnitude = mag;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace lightcone::propagator
