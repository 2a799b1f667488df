#include "amplitude.hpp"

#include <cmath>

#include "errors.hpp"
#include "propagator.hpp"

namespace lightcone::amplitude {

namespace {

constexpr double inv_four_pi_sq = 1.0 / numerics::four_pi_sq;
constexpr cplx imag_unit{0.0, 1.0};

// Forward closed form evaluated at a signed frequency; the reverse process is
// the same expression at -omega.
cplx closed_form(const AtomPairConfig& cfg, double omega) {
  const double x = omega * cfg.delta_t;
  const double pref = -(cfg.alpha * inv_four_pi_sq) * (cfg.dipole * cfg.dipole) /
                      (cfg.separation * cfg.separation);
  // i x + 1 - e^{ix} = (1 - cos x) + i (x - sin x)
  return pref * cplx(1.0 - std::cos(x), x - std::sin(x));
}

// Quadrature of the double time integral at a signed frequency.
AmplitudeResult quadrature(const AtomPairConfig& cfg, PropagatorChoice choice,
                           double tol, double omega) {
  cfg.validate();
  require(std::isfinite(tol) && tol > 0.0, Errc::invalid_argument, "tol must be > 0");
  if (choice == PropagatorChoice::full)
    require(cfg.separation > cfg.delta_t, Errc::domain_error,
            "full kernel needs separation > delta_t to stay off the light cone");

  const double r = cfg.separation;
  const double dt = cfg.delta_t;
  const cplx far_kernel = -inv_four_pi_sq / cplx(0.0, r * r);
  auto kernel = [&](double u) {
    if (choice == PropagatorChoice::far_zone) return far_kernel;
    return -inv_four_pi_sq / cplx(0.0, r * r - u * u);
  };

  const Method method = choice == PropagatorChoice::far_zone ? Method::quadrature_far
                                                             : Method::quadrature_full;
  if (dt == 0.0 || cfg.dipole == 0.0) return {cplx(0.0, 0.0), method, 0.0};

  const double period = std::abs(omega) > 0.0 ? 2.0 * numerics::pi / std::abs(omega) : 0.0;

  // Inner integral over t'' in [0, t'], kept well below the outer tolerance so
  // its noise does not masquerade as outer-panel error.  The inner value
  // legitimately vanishes at full oscillation periods, so the target needs an
  // absolute floor at the kernel's natural scale.
  double max_inner_err = 0.0;
  numerics::QuadOptions inner_opt;
  inner_opt.rel_tol = std::min(1e-12, 0.01 * tol);
  inner_opt.abs_tol = inner_opt.rel_tol * std::abs(kernel(dt)) * dt;
  auto outer_integrand = [&](double tp) {
    numerics::QuadOptions opt = inner_opt;
    opt.breakpoints = numerics::period_breakpoints(0.0, tp, period);
    auto inner = [&](double tpp) {
      const double u = tp - tpp;
      return std::exp(imag_unit * (omega * u)) * kernel(u);
    };
    numerics::QuadResult q = numerics::integrate(inner, 0.0, tp, opt);
    if (q.error > max_inner_err) max_inner_err = q.error;
    return q.value;
  };

  numerics::QuadOptions outer_opt;
  outer_opt.rel_tol = 0.1 * tol;
  outer_opt.breakpoints = numerics::period_breakpoints(0.0, dt, period);
  outer_opt.initial_splits = 2;
  numerics::QuadResult q = numerics::integrate(outer_integrand, 0.0, dt, outer_opt);

  const cplx prefactor = imag_unit * cfg.alpha * (cfg.dipole * omega) * (cfg.dipole * omega);
  AmplitudeResult out;
  out.method = method;
  out.b = prefactor * q.value;
  out.error_estimate = std::abs(prefactor) * (q.error + dt * max_inner_err);
  if (out.error_estimate > tol * std::abs(out.b) && std::abs(out.b) > 0.0)
    raise(Errc::convergence_failure, "amplitude quadrature missed the requested tolerance");
  return out;
}

}  // namespace

void AtomPairConfig::validate() const {
  require(std::isfinite(alpha) && alpha > 0.0, Errc::invalid_argument, "alpha must be > 0");
  require(std::isfinite(dipole) && dipole >= 0.0, Errc::invalid_argument,
          "dipole must be >= 0");
  require(std::isfinite(separation) && separation > 0.0, Errc::invalid_argument,
          "separation must be > 0");
  require(std::isfinite(omega_a) && omega_a > 0.0, Errc::invalid_argument,
          "omega_a must be > 0");
  require(std::isfinite(delta_t) && delta_t >= 0.0, Errc::invalid_argument,
          "delta_t must be >= 0");
}

const char* method_name(Method m) {
  switch (m) {
    case Method::closed_forward: return "closed_forward";
    case Method::closed_total: return "closed_total";
    case Method::quadrature_far: return "quadrature_far";
    case Method::quadrature_full: return "quadrature_full";
  }
  return "unknown";
}

AmplitudeResult amplitude_forward_closed(const AtomPairConfig& cfg) {
  cfg.validate();
  return {closed_form(cfg, cfg.omega_a), Method::closed_forward, 0.0};
}

AmplitudeResult amplitude_reverse_closed(const AtomPairConfig& cfg) {
  cfg.validate();
  return {closed_form(cfg, -cfg.omega_a), Method::closed_forward, 0.0};
}

AmplitudeResult amplitude_total_closed(const AtomPairConfig& cfg) {
  cfg.validate();
  const double x = cfg.phase();
  const double pref = -(cfg.alpha / (2.0 * numerics::pi * numerics::pi)) *
                      (cfg.dipole * cfg.dipole) / (cfg.separation * cfg.separation);
  const double total = pref * (1.0 - std::cos(x));
  // The cosine form must coincide with the explicit forward + reverse sum.
  // The sum cancels terms of size |pref| (1 + x), which sets the round-off scale.
  const cplx sum = closed_form(cfg, cfg.omega_a) + closed_form(cfg, -cfg.omega_a);
  require(std::abs(sum - total) <= 1e-12 * std::abs(pref) * (1.0 + x),
          Errc::numerical_failure, "forward/reverse sum disagrees with the total form");
  return {cplx(total, 0.0), Method::closed_total, 0.0};
}

AmplitudeResult amplitude_quadrature(const AtomPairConfig& cfg, PropagatorChoice choice,
                                     double tol) {
  return quadrature(cfg, choice, tol, cfg.omega_a);
}

AmplitudeResult amplitude_quadrature_total(const AtomPairConfig& cfg,
                                           PropagatorChoice choice, double tol) {
  AmplitudeResult fwd = quadrature(cfg, choice, tol, cfg.omega_a);
  AmplitudeResult rev = quadrature(cfg, choice, tol, -cfg.omega_a);
  AmplitudeResult out;
  out.method = fwd.method;
  out.b = fwd.b + rev.b;
  out.error_estimate = fwd.error_estimate + rev.error_estimate;
  return out;
}

FarzoneScan farzone_correction_scan(const AtomPairConfig& cfg, std::vector<double> ratios) {
  cfg.validate();
  require(!ratios.empty(), Errc::invalid_argument, "scan needs at least one ratio");
  require(cfg.delta_t > 0.0, Errc::invalid_argument, "scan needs delta_t > 0");
  require(cfg.dipole > 0.0, Errc::invalid_argument, "scan needs dipole > 0");

  FarzoneScan scan;
  std::vector<double> devs;
  for (double ratio : ratios) {
    require(ratio > 0.0 && ratio < 0.5, Errc::domain_error,
            "far-zone scan ratios must lie in (0, 0.5)");
    AtomPairConfig point = cfg;
    point.separation = cfg.delta_t / ratio;
    const cplx b_far = amplitude_forward_closed(point).b;
    const cplx b_full = amplitude_quadrature(point, PropagatorChoice::full, 1e-10).b;
    const double dev = std::abs(b_full - b_far) / std::abs(b_far);
    scan.points.push_back({ratio, dev});
    devs.push_back(dev);
  }
  scan.fit = numerics::loglog_fit(ratios, devs);
  return scan;
}

}  // namespace lightcone::amplitude
