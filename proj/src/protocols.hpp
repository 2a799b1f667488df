#pragma once

// Post-selection and entanglement-concentration machinery for states of the
// form  a |E1 G2, vac> + b |G1 E2, vac> + gamma |phi_perp>,  plus the
// classical-correlation bookkeeping (mutual information, one-time-pad
// capsules) used to quantify what the kept pairs can carry.

#include <array>
#include <complex>
#include <cstdint>
#include <vector>

#include "amplitude.hpp"
#include "quantum_state.hpp"
#include "rng.hpp"

namespace lightcone::protocols {

using cplx = std::complex<double>;

// Both branches of the photon-number measurement: keep on vacuum, reject
// otherwise.  Requires a normalised input state.
struct PostselectBranches {
  double keep_probability = 0.0;
  qstate::VacuumProjection projection;         // un-normalised vacuum sector
  Eigen::Vector4cd kept_state;                 // renormalised {GG, GE, EG, EE}
};

PostselectBranches postselect_no_photon(const qstate::JointState&);

// Draw one branch; true means the pair was kept.
bool sample_postselect(const PostselectBranches&, rng::Rng&);

// Partial transfer G2 -> F2 that balances the kept amplitudes.  theta is the
// pulse angle, phase the relative phase imprinted on the G2 branch, and
// success_prob the kept weight 2|b|^2/(|a|^2+|b|^2) for inputs with |a|>=|b|.
struct ConcentrationPlan {
  double theta = 0.0;
  double phase = 0.0;
  double success_prob = 0.0;
};

// Requires |a| >= |b| > 0; callers with |b| > |a| must use the mirrored
// entry point below, which pulses atom 1 instead.
ConcentrationPlan plan_concentration(cplx a, cplx b);
ConcentrationPlan plan_concentration_mirrored(cplx a, cplx b);

struct ConcentrationBranches {
  cplx kept_eg{0.0, 0.0};  // amplitude on |E1 G2| after the F-level rejection
  cplx kept_ge{0.0, 0.0};
  double keep_probability = 0.0;
};

// Apply a plan to the pure state (a, b).  The plan must match the one derived
// from the same amplitudes to within 1e-9 (else plan_mismatch).  The kept
// branch is the Bell state (|E1 G2> + |G1 E2>)/sqrt(2) up to a global phase.
ConcentrationBranches apply_concentration(cplx a, cplx b, const ConcentrationPlan&);
ConcentrationBranches apply_concentration_mirrored(cplx a, cplx b, const ConcentrationPlan&);

// Convenience dispatcher that picks the ordinary or mirrored protocol.
ConcentrationBranches concentrate_pair(cplx a, cplx b);

bool sample_concentration(const ConcentrationBranches&, rng::Rng&);

// I(X;Y) in bits from 2x2 joint counts; zero-count cells contribute zero.
double mutual_information(const std::array<std::array<std::uint64_t, 2>, 2>& counts);

// Source of identically prepared pairs.  (a, b) are relative amplitudes of
// the two single-excitation terms; residual_weight is the probability carried
// by the photon-escaped remainder |phi_perp>.  The stored state is
//   sqrt(1-w) * (a, b)/|(a, b)|  on the vacuum sector  +  sqrt(w) |G1 G2, 1>.
struct PairSource {
  cplx a{1.0, 0.0};
  cplx b{0.0, 0.0};
  double residual_weight = 0.0;

  void validate() const;
  qstate::JointState make_state() const;
  // b from the total closed-form amplitude, a from unitarity.
  static PairSource from_config(const amplitude::AtomPairConfig&, double residual_weight);
};

struct EnsembleStats {
  std::uint64_t n_input = 0;
  std::uint64_t n_photon_rejected = 0;
  std::uint64_t n_f_rejected = 0;
  std::uint64_t n_kept = 0;
  double mean_concurrence = 0.0;   // over kept pairs
  double mutual_info_bits = 0.0;   // of kept-pair measurement outcomes
  std::uint64_t seed = 0;
  std::array<std::array<std::uint64_t, 2>, 2> joint_counts{};  // [atom1][atom2], E=1
};

// Run the full keep/reject pipeline over n pairs.  Per-pair substreams are
// derived from the seed, so results are reproducible and order-independent.
EnsembleStats run_ensemble(const PairSource&, std::uint64_t n, std::uint64_t seed);

// Keep drawing pairs until n_bits of them survive both rejections, recording
// the measured level (E = 1) of each atom for the kept pairs.
struct OutcomeBits {
  std::vector<std::uint8_t> atom1;
  std::vector<std::uint8_t> atom2;
  std::uint64_t pairs_consumed = 0;
};

OutcomeBits sample_outcome_bits(const PairSource&, std::uint64_t n_bits,
                                std::uint64_t seed);

// XOR one-time pad over measurement outcomes ("time capsule"): the message
// is recoverable exactly when encoder and decoder hold correlated bits.
struct CapsuleRecord {
  std::vector<std::uint8_t> ciphertext;
  std::size_t pair_count = 0;
};

CapsuleRecord capsule_encode(const std::vector<std::uint8_t>& message,
                             const std::vector<std::uint8_t>& outcomes);
std::vector<std::uint8_t> capsule_decode(const CapsuleRecord&,
                                         const std::vector<std::uint8_t>& remote_outcomes);

}  // namespace lightcone::protocols
