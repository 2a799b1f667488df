// Acceptance gate: twelve numbered end-to-end checks over the public C++
// surface, one printed line each.  Run with no arguments for all twelve, or
// pass criterion numbers to run a subset.  Exit status 0 iff every selected
// criterion passes.  All tolerances and budgets are pinned here, not
// configurable.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "amplitude.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "multipole.hpp"
#include "numerics.hpp"
#include "propagator.hpp"
#include "protocols.hpp"
#include "quantum_state.hpp"
#include "rng.hpp"

namespace {

using namespace lightcone;
using cplx = std::complex<double>;

constexpr double pi = numerics::pi;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(const char* format, ...) {
  va_list args;
  va_start(args, format);
  char buffer[512];
  std::vsnprintf(buffer, sizeof(buffer), format, args);
  va_end(args);
  return buffer;
}

/* 1: far-zone quadrature amplitudes reproduce both closed forms to 1e-6
      over 40 phase points in [0.1, 4 pi], within 30 s. */
bool criterion1(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const int points = 40;
  const double phase_min = 0.1;
  const double phase_max = 4.0 * pi;
  double worst_forward = 0.0;
  double worst_total = 0.0;
  for (int i = 0; i < points; ++i) {
    const double x =
        phase_min + (phase_max - phase_min) * static_cast<double>(i) /
                        static_cast<double>(points - 1);
    const amplitude::AtomPairConfig cfg{1.0, 1e-4, 1.0, 1.0, x};
    const cplx closed_f = amplitude::amplitude_forward_closed(cfg).b;
    const cplx closed_t = amplitude::amplitude_total_closed(cfg).b;
    const cplx quad_f =
        amplitude::amplitude_quadrature(cfg, amplitude::PropagatorChoice::far_zone,
                                        1e-10)
            .b;
    const cplx quad_t = amplitude::amplitude_quadrature_total(
                            cfg, amplitude::PropagatorChoice::far_zone, 1e-10)
                            .b;
    worst_forward =
        std::max(worst_forward, std::abs(quad_f - closed_f) / std::abs(closed_f));
    // The total amplitude has zeros at full phase turns; measure against the
    // larger of the two closed magnitudes so the ratio stays meaningful.
    const double scale = std::max(std::abs(closed_t), std::abs(closed_f));
    worst_total = std::max(worst_total, std::abs(quad_t - closed_t) / scale);
  }
  const double elapsed = seconds_since(start);
  detail = fmt("worst rel forward %.2e, total %.2e, %.1f s", worst_forward,
               worst_total, elapsed);
  return worst_forward <= 1e-6 && worst_total <= 1e-6 && elapsed <= 30.0;
}

/* 2: full-kernel deviation from the far-zone form scales as the square of
      delta_t / separation; fitted exponent within 2.0 +/- 0.1, within 60 s. */
bool criterion2(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const amplitude::AtomPairConfig cfg{1.0, 1e-4, 1.0, 1.0, 1.0};
  const std::vector<double> ratios{1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  const amplitude::FarzoneScan scan = amplitude::farzone_correction_scan(cfg, ratios);
  const double elapsed = seconds_since(start);
  detail = fmt("fitted exponent %.4f (r^2 %.6f), %.1f s", scan.fit.slope,
               scan.fit.r_squared, elapsed);
  return scan.fit.slope >= 1.9 && scan.fit.slope <= 2.1 && elapsed <= 60.0;
}

/* 3: regulated mode sum vs closed form.  Equal-time error ratio between eta
      and eta/2 runs lies in [3.0, 5.3]; every error obeys 3 eta r / |s| over
      a 20-point (r, tau) grid with |s| >= 0.25 r^2, within 10 s. */
bool criterion3(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  const double radii[] = {0.5, 1.0, 2.0, 5.0};
  const double kappas[] = {0.0, 0.4, 0.8, 1.2, 1.4};
  const double tol = 1e-9;
  double ratio_lo = 1e300;
  double ratio_hi = 0.0;
  double worst_fraction = 0.0;
  bool bounds_ok = true;
  for (double r : radii) {
    for (double kappa : kappas) {
      const propagator::SpacetimeInterval iv{r, kappa * r};
      const double s = iv.invariant_interval();
      const propagator::ModeSumConfig base =
          propagator::ModeSumConfig::for_interval(iv);
      const propagator::ModeSumConfig half{0.5 * base.eta, 2.0 * base.k_max,
                                           base.panels};
      const cplx reference =
          cplx{0.0, -1.0} * propagator::feynman_propagator_closed(iv, 0.0).value;
      const double rel_full =
          std::abs(propagator::mode_sum_propagator(iv, base, tol).value - reference) /
          std::abs(reference);
      const double rel_half =
          std::abs(propagator::mode_sum_propagator(iv, half, tol).value - reference) /
          std::abs(reference);
      const double bound_full = 3.0 * base.eta * r / std::abs(s);
      const double bound_half = 3.0 * half.eta * r / std::abs(s);
      bounds_ok = bounds_ok && rel_full <= bound_full && rel_half <= bound_half;
      worst_fraction = std::max({worst_fraction, rel_full / bound_full,
                                 rel_half / bound_half});
      if (kappa == 0.0) {
        const double ratio = rel_full / rel_half;
        ratio_lo = std::min(ratio_lo, ratio);
        ratio_hi = std::max(ratio_hi, ratio);
      }
    }
  }
  const double elapsed = seconds_since(start);
  detail = fmt("equal-time ratio [%.3f, %.3f], worst bound fraction %.3f, %.1f s",
               ratio_lo, ratio_hi, worst_fraction, elapsed);
  return ratio_lo >= 3.0 && ratio_hi <= 5.3 && bounds_ok && elapsed <= 10.0;
}

/* 4: the closed-form propagator is Lorentz invariant: values before and
      after 100 random boosts agree to relative 1e-12. */
bool criterion4(std::string& detail) {
  rng::Rng rng(rng::mix_seed(20260817, 4));
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double r = rng.uniform(0.3, 3.0);
    const double kappa =
        rng.bernoulli(0.5) ? rng.uniform(0.0, 0.75) : rng.uniform(1.25, 2.0);
    const double rapidity = rng.uniform(-1.5, 1.5);
    const propagator::SpacetimeInterval iv{r, kappa * r};
    const cplx before = propagator::feynman_propagator_closed(iv, 0.0).value;
    const cplx after =
        propagator::feynman_propagator_closed(propagator::boosted(iv, rapidity), 0.0)
            .value;
    worst = std::max(worst, std::abs(after - before) / std::abs(before));
  }
  detail = fmt("worst rel change %.2e over 100 boosts", worst);
  return worst <= 1e-12;
}

/* 5: vacuum post-selection of a two-excitation-branch state.  With both
      branches populated the projected two-qubit state has two Schmidt values
      above product_tol; with the second branch absent, exactly one. */
bool criterion5(std::string& detail) {
  rng::Rng rng(rng::mix_seed(20260817, 5));
  auto schmidt_count = [](const qstate::JointState& state) {
    const qstate::VacuumProjection proj = qstate::project_vacuum(state);
    const Eigen::Vector4cd q = proj.normalized_qubits();
    Eigen::Matrix2cd m;
    m << q(0), q(1), q(2), q(3);
    const Eigen::JacobiSVD<Eigen::Matrix2cd> svd(m);
    int count = 0;
    for (int i = 0; i < 2; ++i) {
      if (svd.singularValues()(i) > qstate::product_tol) ++count;
    }
    return count;
  };
  auto random_state = [&rng](bool with_b) {
    qstate::JointState state(2);
    rng::Rng& r = rng;
    const cplx a = std::polar(r.uniform(0.3, 1.0), r.uniform(0.0, 2.0 * pi));
    state.set({qstate::Level::E, qstate::Level::G, {0, 0}}, a);
    if (with_b) {
      const cplx b = std::polar(r.uniform(0.05, 1.0), r.uniform(0.0, 2.0 * pi));
      state.set({qstate::Level::G, qstate::Level::E, {0, 0}}, b);
    }
    const cplx c1 = std::polar(r.uniform(0.0, 0.7), r.uniform(0.0, 2.0 * pi));
    const cplx c2 = std::polar(r.uniform(0.0, 0.7), r.uniform(0.0, 2.0 * pi));
    state.set({qstate::Level::G, qstate::Level::G, {1, 0}}, c1);
    state.set({qstate::Level::G, qstate::Level::G, {0, 1}}, c2);
    state.normalize();
    return state;
  };
  int wrong_entangled = 0;
  int wrong_product = 0;
  for (int i = 0; i < 100; ++i) {
    if (schmidt_count(random_state(true)) != 2) ++wrong_entangled;
    if (schmidt_count(random_state(false)) != 1) ++wrong_product;
  }
  detail = fmt("miscounted %d/100 two-branch and %d/100 one-branch states",
               wrong_entangled, wrong_product);
  return wrong_entangled == 0 && wrong_product == 0;
}

/* 6: concentration protocol.  Over 1000 random amplitude pairs the kept
      branch has concurrence >= 1 - 1e-9 and the success probability equals
      2 min(|a|^2,|b|^2)/(|a|^2+|b|^2) to 1e-12; a 10^5-pair Monte Carlo keep
      fraction sits within three binomial sigmas of the prediction. */
bool criterion6(std::string& detail) {
  rng::Rng rng(rng::mix_seed(20260817, 6));
  double worst_concurrence_gap = 0.0;
  double worst_prob_gap = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const cplx a = std::polar(rng.uniform(0.05, 1.0), rng.uniform(0.0, 2.0 * pi));
    const cplx b = std::polar(rng.uniform(0.05, 1.0), rng.uniform(0.0, 2.0 * pi));
    const protocols::ConcentrationBranches branches =
        protocols::concentrate_pair(a, b);
    const double wa = std::norm(a);
    const double wb = std::norm(b);
    const double expected = 2.0 * std::min(wa, wb) / (wa + wb);
    worst_prob_gap =
        std::max(worst_prob_gap, std::abs(branches.keep_probability - expected));
    Eigen::Vector4cd kept;
    kept << cplx{0.0, 0.0}, branches.kept_ge, branches.kept_eg, cplx{0.0, 0.0};
    kept.normalize();
    const qstate::TwoQubitDensity density{kept * kept.adjoint()};
    worst_concurrence_gap =
        std::max(worst_concurrence_gap, 1.0 - qstate::concurrence(density));
  }
  const std::uint64_t n = 100000;
  const protocols::PairSource source{cplx{0.8, 0.0}, cplx{0.0, 0.6}, 0.0};
  const protocols::EnsembleStats stats =
      protocols::run_ensemble(source, n, rng::mix_seed(20260817, 66));
  const double p = 0.72;  // 2 * 0.36 / 1.0 for the amplitudes above
  const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(n));
  const double fraction =
      static_cast<double>(stats.n_kept) / static_cast<double>(stats.n_input);
  const double mc_gap = std::abs(fraction - p);
  detail = fmt("max 1-C %.2e, max prob error %.2e, MC keep %.5f vs %.2f (3 sigma %.5f)",
               worst_concurrence_gap, worst_prob_gap, fraction, p, 3.0 * sigma);
  return worst_concurrence_gap <= 1e-9 && worst_prob_gap <= 1e-12 &&
         mc_gap <= 3.0 * sigma;
}

/* 7: mutual information of kept-pair outcomes.  Perfect anti-correlation
      gives exactly one bit at distribution level; a 10^4-pair sampled run
      lands within 0.02 bits; the 75%-agreement fixture matches
      1 - H2(0.25) to 1e-4. */
bool criterion7(std::string& detail) {
  const double exact_balanced =
      protocols::mutual_information({{{0, 2500}, {2500, 0}}});
  const double exact_tiny = protocols::mutual_information({{{0, 1}, {1, 0}}});
  const protocols::PairSource source{cplx{0.8, 0.0}, cplx{0.0, 0.6}, 0.28};
  const protocols::EnsembleStats stats =
      protocols::run_ensemble(source, 10000, rng::mix_seed(20260817, 7));
  const bool anti_correlated =
      stats.joint_counts[0][0] == 0 && stats.joint_counts[1][1] == 0;
  const double sampled_gap = std::abs(stats.mutual_info_bits - 1.0);
  const double fixture = protocols::mutual_information({{{3, 1}, {1, 3}}});
  const double fixture_target = 0.18872187554086717;  // 1 - H2(0.25) in bits
  const double fixture_gap = std::abs(fixture - fixture_target);
  detail = fmt("exact %.17g, sampled gap %.4f bits (n_kept %llu), fixture gap %.2e",
               exact_balanced, sampled_gap,
               static_cast<unsigned long long>(stats.n_kept), fixture_gap);
  return exact_balanced == 1.0 && exact_tiny == 1.0 && anti_correlated &&
         sampled_gap <= 0.02 && fixture_gap <= 1e-4;
}

/* 8: truncated-mode model, both coupling scalings at once: transfer
      amplitude quadratic in the coupling (exponent 2.0 +/- 0.1) and the
      state-dependent part of P2 at least quartic (exponent >= 3.5), with the
      model dimension capped at 20000, within 5 minutes. */
bool criterion8(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  lattice::ModelConfig base;
  base.n_modes = 16;
  base.n_max = 2;
  base.omega_a = 3.0 * pi / 8.0;
  base.atom_positions = {0.0, 4.0};
  base.counter_rotating = true;
  if (lattice::hilbert_dimension(base) > 20000) {
    detail = "model dimension exceeds 20000";
    return false;
  }
  const std::vector<double> couplings{1e-4, 3.1622776601683794e-4, 1e-3,
                                      3.1622776601683794e-3, 1e-2};
  const lattice::CausalityScan scan = lattice::causality_scan(base, couplings, 60.0);
  const double elapsed = seconds_since(start);
  detail = fmt("amplitude exponent %.4f, delta-P2 exponent %.4f, dim %d, %.1f s",
               scan.amplitude_fit.slope, scan.delta_p2_fit.slope,
               lattice::hilbert_dimension(base), elapsed);
  return scan.amplitude_fit.slope >= 1.9 && scan.amplitude_fit.slope <= 2.1 &&
         scan.delta_p2_fit.slope >= 3.5 && elapsed <= 300.0;
}

/* 9: with counter-rotating terms dropped, the detection density leaks
      outside the light cone: at distance 12 after t = 8 (max signal speed 1)
      it exceeds ten times the 1e-14 numerical floor. */
bool criterion9(std::string& detail) {
  lattice::ModelConfig cfg;
  cfg.n_modes = 24;
  cfg.n_max = 2;
  cfg.coupling = 0.05;
  cfg.omega_a = 1.0;
  cfg.atom_positions = {0.0, 6.0};
  cfg.counter_rotating = false;
  const auto model = lattice::build_model(cfg);
  qstate::JointState psi0(24);
  psi0.set({qstate::Level::E, qstate::Level::G, std::vector<std::uint8_t>(24, 0)},
           cplx{1.0, 0.0});
  const lattice::EvolvedState evolved = lattice::evolve(model, psi0, 8.0);
  const double detection = lattice::glauber_detection(evolved, 12.0);
  detail = fmt("detection %.3e at distance 12, horizon 8", detection);
  return detection > 1e-13;
}

/* 10: third-level dressing.  The dressed-vs-bare amplitude difference grows
       at least linearly in the admixture epsilon and vanishes (rel <= 1e-10)
       at epsilon = 0, within 5 minutes. */
bool criterion10(std::string& detail) {
  const auto start = std::chrono::steady_clock::now();
  lattice::ModelConfig base;
  base.n_modes = 12;
  base.n_max = 2;
  base.coupling = 0.05;
  base.omega_a = 1.0;
  base.omega_a2 = 1.05;
  base.atom_positions = {0.0, 3.0};
  base.counter_rotating = true;
  base.dressing = lattice::DressingConfig{0.45, 0.0};
  const std::vector<double> eps{0.0, 5e-5, 1e-4, 5e-4, 1e-3, 5e-3};
  const lattice::DressedCompare compare =
      lattice::dressed_amplitude_compare(base, eps, 20.0);
  double rel_at_zero = -1.0;
  for (const lattice::DressedPoint& point : compare.points) {
    if (point.epsilon == 0.0) rel_at_zero = point.relative_difference;
  }
  const double elapsed = seconds_since(start);
  detail = fmt("exponent %.4f, rel difference %.2e at epsilon 0, %.1f s",
               compare.fit.slope, rel_at_zero, elapsed);
  return compare.fit.slope >= 1.0 && rel_at_zero >= 0.0 && rel_at_zero <= 1e-10 &&
         elapsed <= 300.0;
}

/* 11: dipole-approximation certificate.  Analytic kernel partials match
       central differences to relative 1e-6 at 100 random separations, the
       ratio bound equals 2 d_A / r bitwise, and every configuration used by
       criteria 1-2 stays below 1e-3. */
bool criterion11(std::string& detail) {
  rng::Rng rng(rng::mix_seed(20260817, 11));
  // First atom at (0, 0, r), second at the origin, equal times — the
  // orientation the coefficients are quoted in (z1 - z2 = +r).
  const auto kernel = [](double x1, double z1, double t1, double x2, double z2,
                         double t2) {
    const double dx = x1 - x2;
    const double dz = z1 - z2;
    const double dt = t1 - t2;
    return 1.0 / (dx * dx + dz * dz - dt * dt);
  };
  double worst_rel = 0.0;
  bool bound_exact = true;
  bool zeros_exact = true;
  for (int i = 0; i < 100; ++i) {
    const double r = rng.uniform(0.3, 3.0);
    const multipole::ExpansionPoint point{r, 1e-4};
    const multipole::KernelPartials partials =
        multipole::propagator_taylor_coefficients(point);
    const double h = 1e-5 * r;
    const double fd_first =
        (kernel(0, r + h, 0, 0, 0, 0) - kernel(0, r - h, 0, 0, 0, 0)) / (2.0 * h);
    const double fd_second =
        (kernel(0, r, 0, 0, h, 0) - kernel(0, r, 0, 0, -h, 0)) / (2.0 * h);
    worst_rel = std::max(
        {worst_rel, std::abs(fd_first - partials.d_z_first) / std::abs(partials.d_z_first),
         std::abs(fd_second - partials.d_z_second) / std::abs(partials.d_z_second)});
    // Time and transverse displacements cancel symmetrically, so the central
    // differences vanish identically, matching the zero partials.
    const double fd_time = kernel(0, r, h, 0, 0, 0) - kernel(0, r, -h, 0, 0, 0);
    const double fd_transverse =
        kernel(h, r, 0, 0, 0, 0) - kernel(-h, r, 0, 0, 0, 0);
    zeros_exact = zeros_exact && fd_time == 0.0 && fd_transverse == 0.0 &&
                  partials.d_t_first == 0.0 && partials.d_t_second == 0.0 &&
                  partials.d_transverse == 0.0;
    bound_exact = bound_exact && multipole::multipole_ratio_bound(point) ==
                                     2.0 * point.atom_extent / point.separation;
  }
  bool configs_small = true;
  double worst_bound = 0.0;
  const double ratios[] = {1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  std::vector<multipole::ExpansionPoint> configs{{1.0, 1e-4}};
  for (double ratio : ratios) configs.push_back({1.0 / ratio, 1e-4});
  for (const multipole::ExpansionPoint& point : configs) {
    const double bound = multipole::multipole_ratio_bound(point);
    worst_bound = std::max(worst_bound, bound);
    configs_small = configs_small && bound <= 1e-3;
  }
  detail = fmt("worst FD rel %.2e, largest config bound %.2e", worst_rel,
               worst_bound);
  return worst_rel <= 1e-6 && bound_exact && zeros_exact && configs_small;
}

/* 12: one-time-pad capsule over kept-pair outcomes.  A correlated decoder
       (complement of the partner's bits) recovers a 10^4-bit message exactly;
       an independent key gives BER 0.5 within three sigmas. */
bool criterion12(std::string& detail) {
  const std::uint64_t n_bits = 10000;
  const protocols::PairSource source{cplx{0.8, 0.0}, cplx{0.0, 0.6}, 0.28};
  const protocols::OutcomeBits outcomes =
      protocols::sample_outcome_bits(source, n_bits, rng::mix_seed(20260817, 12));
  rng::Rng message_rng(rng::mix_seed(20260817, 121));
  std::vector<std::uint8_t> message(n_bits);
  for (std::uint8_t& bit : message) bit = message_rng.bernoulli(0.5) ? 1 : 0;
  const protocols::CapsuleRecord record =
      protocols::capsule_encode(message, outcomes.atom1);
  std::vector<std::uint8_t> correlated_key(n_bits);
  for (std::uint64_t i = 0; i < n_bits; ++i) {
    correlated_key[i] = static_cast<std::uint8_t>(1 - outcomes.atom2[i]);
  }
  const std::vector<std::uint8_t> decoded =
      protocols::capsule_decode(record, correlated_key);
  std::uint64_t correlated_errors = 0;
  for (std::uint64_t i = 0; i < n_bits; ++i) {
    if (decoded[i] != message[i]) ++correlated_errors;
  }
  rng::Rng pad_rng(rng::mix_seed(20260817, 122));
  std::vector<std::uint8_t> independent_key(n_bits);
  for (std::uint8_t& bit : independent_key) bit = pad_rng.bernoulli(0.5) ? 1 : 0;
  const std::vector<std::uint8_t> scrambled =
      protocols::capsule_decode(record, independent_key);
  std::uint64_t independent_errors = 0;
  for (std::uint64_t i = 0; i < n_bits; ++i) {
    if (scrambled[i] != message[i]) ++independent_errors;
  }
  const double ber =
      static_cast<double>(independent_errors) / static_cast<double>(n_bits);
  detail = fmt("correlated errors %llu/%llu, independent BER %.4f",
               static_cast<unsigned long long>(correlated_errors),
               static_cast<unsigned long long>(n_bits), ber);
  return correlated_errors == 0 && ber >= 0.485 && ber <= 0.515;
}

using CriterionFn = bool (*)(std::string&);

constexpr std::array<CriterionFn, 12> criteria{
    criterion1, criterion2, criterion3, criterion4,  criterion5,  criterion6,
    criterion7, criterion8, criterion9, criterion10, criterion11, criterion12,
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    char* end = nullptr;
    const long id = std::strtol(argv[i], &end, 10);
    if (end == argv[i] || *end != '\0' || id < 1 ||
        id > static_cast<long>(criteria.size())) {
      std::fprintf(stderr, "usage: %s [criterion-number ...]\n", argv[0]);
      return 2;
    }
    selected.push_back(static_cast<int>(id));
  }
  if (selected.empty()) {
    for (int id = 1; id <= static_cast<int>(criteria.size()); ++id) {
      selected.push_back(id);
    }
  }
  bool all_pass = true;
  for (int id : selected) {
    std::string detail;
    bool pass = false;
    try {
      pass = criteria[static_cast<std::size_t>(id - 1)](detail);
    } catch (const std::exception& e) {
      detail = fmt("exception: %s", e.what());
      pass = false;
    }
    std::printf("criterion %d: %s (%s)\n", id, pass ? "PASS" : "FAIL",
                detail.c_str());
    all_pass = all_pass && pass;
  }
  return all_pass ? 0 : 1;
}
