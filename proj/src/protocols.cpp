#include "protocols.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace lightcone::protocols {

namespace {

constexpr double plan_tol = 1e-9;

double abs_sq(cplx z) { return std::norm(z); }

}  // namespace

PostselectBranches postselect_no_photon(const qstate::JointState& state) {
  const double n = state.norm();
  require(n > 1e-300, Errc::zero_state, "cannot post-select the zero state");

  qstate::JointState working = state;
  working.normalize();
  auto proj = qstate::project_vacuum(working);

  PostselectBranches out;
  out.projection = proj;
  out.keep_probability = proj.sector_weight();
  if (out.keep_probability > 0.0) {
    out.kept_state = proj.normalized_qubits();
  } else {
    out.kept_state = Eigen::Vector4cd::Zero();
  }
  return out;
}

bool sample_postselect(const PostselectBranches& branches, rng::Rng& rng) {
  return rng.bernoulli(branches.keep_probability);
}

ConcentrationPlan plan_concentration(cplx a, cplx b) {
  const double aa = std::abs(a);
  const double bb = std::abs(b);
  require(bb > 0.0, Errc::degenerate_input,
          "concentration undefined for b == 0 (no second branch)");
  require(aa >= bb, Errc::ordering_error,
          "plan_concentration requires |a| >= |b|; use the mirrored protocol");

  ConcentrationPlan plan;
  plan.theta = std::acos(std::clamp(bb / aa, 0.0, 1.0));
  plan.phase = std::arg(b) - std::arg(a);
  plan.success_prob = 2.0 * bb * bb / (aa * aa + bb * bb);
  return plan;
}

ConcentrationPlan plan_concentration_mirrored(cplx a, cplx b) {
  // Pulse atom 1 instead: swap the roles of the two amplitudes.
  return plan_concentration(b, a);
}

namespace {

ConcentrationBranches apply_impl(cplx a, cplx b, const ConcentrationPlan& plan,
                                 bool mirrored) {
  const ConcentrationPlan expected =
      mirrored ? plan_concentration_mirrored(a, b) : plan_concentration(a, b);
  const bool matches = std::abs(plan.theta - expected.theta) <= plan_tol &&
                       std::abs(plan.phase - expected.phase) <= plan_tol &&
                       std::abs(plan.success_prob - expected.success_prob) <= plan_tol;
  require(matches, Errc::plan_mismatch,
          "concentration plan does not match the pair amplitudes");

  // The pulse acts on the ground level of the larger branch: amplitude
  // cos(theta)*e^{i*phase} stays in G, sin(theta) moves to F and is
  // rejected.  After rejection both kept branches carry the modulus of the
  // smaller one and share its phase, i.e. the kept state is Bell.
  const cplx big = mirrored ? b : a;
  const cplx small = mirrored ? a : b;
  const cplx kept_big = big * std::cos(expected.theta) *
                        std::exp(cplx(0.0, expected.phase));
  const double norm_sq = abs_sq(kept_big) + abs_sq(small);
  const double input_sq = abs_sq(a) + abs_sq(b);

  ConcentrationBranches out;
  out.kept_eg = mirrored ? small : kept_big;
  out.kept_ge = mirrored ? kept_big : small;
  out.keep_probability = norm_sq / input_sq;
  return out;
}

}  // namespace

ConcentrationBranches apply_concentration(cplx a, cplx b, const ConcentrationPlan& plan) {
  return apply_impl(a, b, plan, false);
}

ConcentrationBranches apply_concentration_mirrored(cplx a, cplx b,
                                                   const ConcentrationPlan& plan) {
  return apply_impl(a, b, plan, true);
}

ConcentrationBranches concentrate_pair(cplx a, cplx b) {
  if (std::abs(a) >= std::abs(b)) {
    return apply_concentration(a, b, plan_concentration(a, b));
  }
  return apply_concentration_mirrored(a, b, plan_concentration_mirrored(a, b));
}

bool sample_concentration(const ConcentrationBranches& branches, rng::Rng& rng) {
  return rng.bernoulli(branches.keep_probability);
}

double mutual_information(const std::array<std::array<std::uint64_t, 2>, 2>& counts) {
  std::uint64_t total = 0;
  for (const auto& row : counts)
    for (auto c : row) total += c;
  require(total > 0, Errc::empty_counts, "mutual information of empty counts");

  const double n = static_cast<double>(total);
  std::array<double, 2> px{}, py{};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      px[x] += static_cast<double>(counts[x][y]) / n;
      py[y] += static_cast<double>(counts[x][y]) / n;
    }

  double bits = 0.0;
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) {
      if (counts[x][y] == 0) continue;
      const double pxy = static_cast<double>(counts[x][y]) / n;
      bits += pxy * std::log2(pxy / (px[x] * py[y]));
    }
  // Round-off can push an exactly-independent table a hair negative.
  return std::max(bits, 0.0);
}

void PairSource::validate() const {
  require(std::isfinite(a.real()) && std::isfinite(a.imag()) &&
              std::isfinite(b.real()) && std::isfinite(b.imag()),
          Errc::invalid_argument, "pair-source amplitudes must be finite");
  require(abs_sq(a) + abs_sq(b) > 0.0, Errc::zero_state,
          "pair source needs at least one nonzero amplitude");
  require(residual_weight >= 0.0 && residual_weight < 1.0, Errc::invalid_argument,
          "residual_weight must lie in [0, 1)");
}

qstate::JointState PairSource::make_state() const {
  validate();
  const double scale = std::sqrt((1.0 - residual_weight) / (abs_sq(a) + abs_sq(b)));
  qstate::JointState state(1);
  using qstate::Level;
  state.set({Level::E, Level::G, {0}}, a * scale);
  state.set({Level::G, Level::E, {0}}, b * scale);
  if (residual_weight > 0.0) {
    state.set({Level::G, Level::G, {1}}, cplx(std::sqrt(residual_weight), 0.0));
  }
  return state;
}

PairSource PairSource::from_config(const amplitude::AtomPairConfig& cfg,
                                   double residual_weight) {
  const cplx b = amplitude::amplitude_total_closed(cfg).b;
  require(std::abs(b) < 1.0, Errc::domain_error,
          "transition amplitude exceeds unity; perturbative source invalid");
  PairSource src;
  src.b = b;
  src.a = cplx(std::sqrt(1.0 - abs_sq(b)), 0.0);
  src.residual_weight = residual_weight;
  src.validate();
  return src;
}

EnsembleStats run_ensemble(const PairSource& source, std::uint64_t n,
                           std::uint64_t seed) {
  source.validate();
  require(n > 0, Errc::invalid_argument, "ensemble needs at least one pair");

  const qstate::JointState state = source.make_state();
  const auto post = postselect_no_photon(state);

  // Vacuum-sector amplitudes of the normalised source state.
  const cplx a = post.projection.eg;  // |E1 G2>
  const cplx b = post.projection.ge;  // |G1 E2>
  const auto branches = concentrate_pair(a, b);

  // Kept two-qubit state and its concurrence are the same for every kept
  // pair, so compute once.
  qstate::JointState kept(0);
  using qstate::Level;
  kept.set({Level::E, Level::G, {}}, branches.kept_eg);
  kept.set({Level::G, Level::E, {}}, branches.kept_ge);
  kept.normalize();
  const auto rho = qstate::partial_trace_field(kept);
  const double conc = qstate::concurrence(rho);

  // Probability that a kept pair reads (E1, G2) when both atoms are measured
  // in the energy basis.
  const double kept_norm_sq = abs_sq(branches.kept_eg) + abs_sq(branches.kept_ge);
  const double p_eg = abs_sq(branches.kept_eg) / kept_norm_sq;

  EnsembleStats stats;
  stats.n_input = n;
  stats.seed = seed;
  for (std::uint64_t i = 0; i < n; ++i) {
    rng::Rng trial(rng::mix_seed(seed, i));
    if (!sample_postselect(post, trial)) {
      ++stats.n_photon_rejected;
      continue;
    }
    if (!sample_concentration(branches, trial)) {
      ++stats.n_f_rejected;
      continue;
    }
    ++stats.n_kept;
    // Single-excitation sector: outcomes are perfectly anti-correlated.
    const bool atom1_excited = trial.bernoulli(p_eg);
    const int x = atom1_excited ? 1 : 0;
    const int y = atom1_excited ? 0 : 1;
    ++stats.joint_counts[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
  }

  stats.mean_concurrence = stats.n_kept > 0 ? conc : 0.0;
  stats.mutual_info_bits =
      stats.n_kept > 0 ? mutual_information(stats.joint_counts) : 0.0;
  return stats;
}

OutcomeBits sample_outcome_bits(const PairSource& source, std::uint64_t n_bits,
                                std::uint64_t seed) {
  source.validate();
  require(n_bits > 0, Errc::invalid_argument, "need at least one outcome bit");

  const auto post = postselect_no_photon(source.make_state());
  const auto branches = concentrate_pair(post.projection.eg, post.projection.ge);
  const double kept_norm_sq = abs_sq(branches.kept_eg) + abs_sq(branches.kept_ge);
  const double p_eg = abs_sq(branches.kept_eg) / kept_norm_sq;

  // With both rejection stages the keep rate is bounded below by the product
  // of branch probabilities; cap the draw count so a pathological source
  // fails loudly instead of spinning.
  const double keep_rate = post.keep_probability * branches.keep_probability;
  require(keep_rate > 0.0, Errc::degenerate_input, "source never keeps a pair");
  const std::uint64_t max_draws =
      static_cast<std::uint64_t>(100.0 + 20.0 * static_cast<double>(n_bits) / keep_rate);

  OutcomeBits out;
  out.atom1.reserve(n_bits);
  out.atom2.reserve(n_bits);
  std::uint64_t i = 0;
  while (out.atom1.size() < n_bits) {
    require(i < max_draws, Errc::convergence_failure,
            "keep rate too low to collect the requested outcome bits");
    rng::Rng trial(rng::mix_seed(seed, i));
    ++i;
    if (!sample_postselect(post, trial)) continue;
    if (!sample_concentration(branches, trial)) continue;
    const bool atom1_excited = trial.bernoulli(p_eg);
    out.atom1.push_back(atom1_excited ? 1 : 0);
    out.atom2.push_back(atom1_excited ? 0 : 1);
  }
  out.pairs_consumed = i;
  return out;
}

namespace {

void check_bits(const std::vector<std::uint8_t>& bits, const char* what) {
  for (auto b : bits) {
    require(b <= 1, Errc::invalid_argument, what);
  }
}

}  // namespace

CapsuleRecord capsule_encode(const std::vector<std::uint8_t>& message,
                             const std::vector<std::uint8_t>& outcomes) {
  require(message.size() == outcomes.size(), Errc::length_mismatch,
          "message and outcome streams differ in length");
  check_bits(message, "message bits must be 0 or 1");
  check_bits(outcomes, "outcome bits must be 0 or 1");

  CapsuleRecord rec;
  rec.pair_count = outcomes.size();
  rec.ciphertext.resize(message.size());
  for (std::size_t i = 0; i < message.size(); ++i) {
    rec.ciphertext[i] = message[i] ^ outcomes[i];
  }
  return rec;
}

std::vector<std::uint8_t> capsule_decode(const CapsuleRecord& rec,
                                         const std::vector<std::uint8_t>& remote_outcomes) {
  require(rec.ciphertext.size() == rec.pair_count, Errc::length_mismatch,
          "capsule ciphertext length disagrees with its pair count");
  require(remote_outcomes.size() == rec.pair_count, Errc::length_mismatch,
          "decode outcome stream differs in length from the capsule");
  check_bits(rec.ciphertext, "ciphertext bits must be 0 or 1");
  check_bits(remote_outcomes, "outcome bits must be 0 or 1");

  std::vector<std::uint8_t> out(rec.pair_count);
  for (std::size_t i = 0; i < rec.pair_count; ++i) {
    out[i] = rec.ciphertext[i] ^ remote_outcomes[i];
  }
  return out;
}

}  // namespace lightcone::protocols
