#pragma once

// Second-order transition amplitude for excitation transfer between two
// two-level atoms coupled through the field:
//
//   b = i alpha (d omega_a)^2
//       * integral_0^{dt} dt' integral_0^{t'} dt'' e^{i omega_a (t'-t'')} D_F(r, t'-t'')
//
// in natural units.  With the far-zone propagator the double integral has the
// closed forward form
//
//   b_fwd = -(alpha / 4 pi^2) (d/r)^2 (i omega_a dt + 1 - e^{i omega_a dt}),
//
// and adding the reverse process (omega_a -> -omega_a) gives the real total
//
//   b_tot = -(alpha / 2 pi^2) (d/r)^2 (1 - cos(omega_a dt)).
//
// The quadrature path below is kept independent of those closed forms so it
// can serve as a cross-check; its prefactor is fixed by requiring exact
// agreement with b_fwd when the far-zone kernel is used.

#include <complex>
#include <vector>

#include "numerics.hpp"

namespace lightcone::amplitude {

using cplx = std::complex<double>;

// alpha is the dimensionless coupling, dipole the transition dipole length,
// separation the interatomic distance, omega_a the transition frequency and
// delta_t the interaction window.  dipole and delta_t may be zero (the
// amplitude then vanishes); the rest must be positive.
struct AtomPairConfig {
  double alpha = 1.0;
  double dipole = 1e-4;
  double separation = 1.0;
  double omega_a = 1.0;
  double delta_t = 1.0;

  double far_zone_ratio() const { return delta_t / separation; }
  double phase() const { return omega_a * delta_t; }
  void validate() const;
};

enum class Method { closed_forward, closed_total, quadrature_far, quadrature_full };

const char* method_name(Method);

struct AmplitudeResult {
  cplx b{0.0, 0.0};
  Method method = Method::closed_forward;
  double error_estimate = 0.0;  // absolute; zero for closed forms
};

// Closed forward (emission-then-absorption) amplitude.
AmplitudeResult amplitude_forward_closed(const AtomPairConfig&);

// Reverse-process partner: the forward form with omega_a negated.
AmplitudeResult amplitude_reverse_closed(const AtomPairConfig&);

// Forward plus reverse.  Real and non-positive; the closed cosine form is
// returned after an internal consistency check against the explicit sum.
AmplitudeResult amplitude_total_closed(const AtomPairConfig&);

enum class PropagatorChoice {
  far_zone,  // constant kernel -1/(4 i pi^2 r^2)
  full,      // -1/(4 i pi^2 (r^2 - u^2)); requires separation > delta_t
};

// Direct numerical evaluation of the double time integral (forward process).
// tol is relative to |b|; the reported error estimate is absolute.
AmplitudeResult amplitude_quadrature(const AtomPairConfig&, PropagatorChoice,
                                     double tol = 1e-10);

// Forward plus reverse, both by quadrature.
AmplitudeResult amplitude_quadrature_total(const AtomPairConfig&, PropagatorChoice,
                                           double tol = 1e-10);

struct ScanPoint {
  double ratio = 0.0;               // delta_t / separation
  double relative_deviation = 0.0;  // |b_full - b_far| / |b_far|
};

struct FarzoneScan {
  std::vector<ScanPoint> points;
  numerics::LinearFit fit;  // log deviation against log ratio
};

// Deviation of the full-kernel amplitude from the far-zone closed form as the
// separation shrinks toward the interaction window.  Ratios must lie in
// (0, 0.5); the separation is delta_t / ratio with all else taken from cfg.
FarzoneScan farzone_correction_scan(const AtomPairConfig&, std::vector<double> ratios);

}  // namespace lightcone::amplitude
