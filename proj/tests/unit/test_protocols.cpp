#include <doctest.h>

#include <cmath>
#include <complex>

#include "errors.hpp"
#include "protocols.hpp"

using namespace lightcone;
using namespace lightcone::protocols;
using cplx = std::complex<double>;

namespace {

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

TEST_SUITE("protocols") {

TEST_CASE("post-selection splits vacuum weight from the photon remainder") {
  PairSource src{{0.8, 0.0}, {0.0, 0.6}, 0.28};
  auto post = postselect_no_photon(src.make_state());
  CHECK(post.keep_probability == doctest::Approx(0.72).epsilon(1e-14));
  CHECK(post.kept_state.norm() == doctest::Approx(1.0).epsilon(1e-14));
  // Branch ratio survives the projection.
  CHECK(std::abs(post.kept_state(2) / post.kept_state(1)) ==
        doctest::Approx(0.8 / 0.6).epsilon(1e-13));
  CHECK(thrown_code([] {
          postselect_no_photon(qstate::JointState(1));
        }) == Errc::zero_state);
}

TEST_CASE("concentration plan for ordered amplitudes") {
  auto plan = plan_concentration({0.8, 0.0}, {0.6, 0.0});
  CHECK(plan.theta == doctest::Approx(std::acos(0.75)).epsilon(1e-15));
  CHECK(plan.phase == 0.0);
  CHECK(plan.success_prob == doctest::Approx(0.72).epsilon(1e-15));

  // The phase is the argument mismatch the pulse must undo.
  auto rotated = plan_concentration(std::polar(0.8, 0.4), std::polar(0.6, 1.3));
  CHECK(rotated.phase == doctest::Approx(0.9).epsilon(1e-13));

  CHECK(thrown_code([] { plan_concentration({0.8, 0.0}, {0.0, 0.0}); }) ==
        Errc::degenerate_input);
  CHECK(thrown_code([] { plan_concentration({0.5, 0.0}, {0.6, 0.0}); }) ==
        Errc::ordering_error);
  CHECK_NOTHROW(plan_concentration_mirrored({0.5, 0.0}, {0.6, 0.0}));
  CHECK(thrown_code([] {
          plan_concentration_mirrored({0.8, 0.0}, {0.6, 0.0});
        }) == Errc::ordering_error);
}

TEST_CASE("applying a plan balances the branches into a Bell pair") {
  const cplx a = std::polar(0.8, 0.3);
  const cplx b = std::polar(0.6, 1.2);
  auto out = apply_concentration(a, b, plan_concentration(a, b));
  // Both kept branches carry the smaller modulus and the smaller phase.
  CHECK(std::abs(out.kept_eg - b) < 1e-14);
  CHECK(std::abs(out.kept_ge - b) < 1e-14);
  CHECK(out.keep_probability == doctest::Approx(0.72).epsilon(1e-13));

  ConcentrationPlan doctored = plan_concentration(a, b);
  doctored.theta += 1e-6;
  CHECK(thrown_code([&] { apply_concentration(a, b, doctored); }) ==
        Errc::plan_mismatch);
}

TEST_CASE("the dispatcher mirrors when the second branch dominates") {
  const cplx a{0.3, 0.0};
  const cplx b{0.0, -0.9};
  auto out = concentrate_pair(a, b);
  CHECK(out.kept_eg == a);  // untouched smaller branch
  CHECK(std::abs(out.kept_ge) == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(std::arg(out.kept_ge) == doctest::Approx(std::arg(a)).epsilon(1e-13));
  CHECK(out.keep_probability == doctest::Approx(0.2).epsilon(1e-14));

  // Equal moduli need no pulse at all.
  auto equal = concentrate_pair({0.5, 0.5}, {0.5, -0.5});
  CHECK(equal.keep_probability == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("branch sampling tracks the stated probabilities") {
  PairSource src{{0.8, 0.0}, {0.6, 0.0}, 0.0};
  auto post = postselect_no_photon(src.make_state());
  auto branches = concentrate_pair(post.projection.eg, post.projection.ge);
  rng::Rng rng(99);
  int kept = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i)
    if (sample_concentration(branches, rng)) ++kept;
  // p = 0.72; six sigma is about 0.019.
  CHECK(static_cast<double>(kept) / n == doctest::Approx(0.72).epsilon(0.03));
}

TEST_CASE("mutual information of 2x2 counts") {
  CHECK(mutual_information({{{0, 5}, {5, 0}}}) == doctest::Approx(1.0));
  CHECK(mutual_information({{{4, 4}, {4, 4}}}) == 0.0);
  CHECK(mutual_information({{{1, 3}, {3, 1}}}) ==
        doctest::Approx(0.18872187554086717).epsilon(1e-15));
  CHECK(mutual_information({{{7, 0}, {0, 0}}}) == 0.0);
  CHECK(thrown_code([] { mutual_information({{{0, 0}, {0, 0}}}); }) ==
        Errc::empty_counts);
}

TEST_CASE("pair sources validate and build normalised states") {
  PairSource src{{0.8, 0.0}, {0.0, 0.6}, 0.28};
  auto state = src.make_state();
  CHECK(state.norm() == doctest::Approx(1.0).epsilon(1e-14));
  using qstate::Level;
  const double scale = std::sqrt(0.72);
  CHECK(std::abs(state.at({Level::E, Level::G, {0}}) - cplx{0.8 * scale, 0.0}) <
        1e-15);
  CHECK(std::abs(state.at({Level::G, Level::G, {1}}) -
                 cplx{std::sqrt(0.28), 0.0}) < 1e-15);

  PairSource bad = src;
  bad.residual_weight = 1.0;
  CHECK(thrown_code([&] { bad.validate(); }) == Errc::invalid_argument);
  PairSource zero{{0.0, 0.0}, {0.0, 0.0}, 0.0};
  CHECK(thrown_code([&] { zero.validate(); }) == Errc::zero_state);
}

TEST_CASE("sources derived from atom pairs take b from the closed form") {
  amplitude::AtomPairConfig cfg{1.0, 1e-2, 1.0, 1.0, 1.0};
  auto src = PairSource::from_config(cfg, 0.1);
  CHECK(src.b == amplitude::amplitude_total_closed(cfg).b);
  CHECK(src.a.imag() == 0.0);
  CHECK(std::norm(src.a) + std::norm(src.b) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("ensemble runs are reproducible and conserve counts") {
  PairSource src{{0.8, 0.0}, {0.0, 0.6}, 0.28};
  auto stats = run_ensemble(src, 5000, 11);
  CHECK(stats.n_input == 5000);
  CHECK(stats.n_photon_rejected + stats.n_f_rejected + stats.n_kept == 5000);
  CHECK(stats.joint_counts[0][1] + stats.joint_counts[1][0] == stats.n_kept);
  // Kept pairs are Bell: same-outcome cells stay empty.
  CHECK(stats.joint_counts[0][0] == 0);
  CHECK(stats.joint_counts[1][1] == 0);
  CHECK(stats.mean_concurrence >= 1.0 - 1e-12);
  CHECK(stats.mutual_info_bits > 0.9);
  // Keep rate 0.72 * 0.72 = 0.5184; ten sigma is about 0.07.
  CHECK(static_cast<double>(stats.n_kept) / 5000 ==
        doctest::Approx(0.5184).epsilon(0.15));

  auto again = run_ensemble(src, 5000, 11);
  CHECK(again.n_kept == stats.n_kept);
  CHECK(again.joint_counts == stats.joint_counts);
  auto reseeded = run_ensemble(src, 5000, 12);
  CHECK(reseeded.n_kept != stats.n_kept);

  CHECK(thrown_code([&] { run_ensemble(src, 0, 1); }) == Errc::invalid_argument);
}

TEST_CASE("outcome bits are anti-correlated and account for draws") {
  PairSource balanced{{1.0, 0.0}, {1.0, 0.0}, 0.0};
  auto bits = sample_outcome_bits(balanced, 500, 3);
  REQUIRE(bits.atom1.size() == 500);
  REQUIRE(bits.atom2.size() == 500);
  CHECK(bits.pairs_consumed == 500);  // nothing is ever rejected here
  int ones = 0;
  for (std::size_t i = 0; i < 500; ++i) {
    CHECK(bits.atom1[i] != bits.atom2[i]);
    ones += bits.atom1[i];
  }
  CHECK(ones > 150);
  CHECK(ones < 350);

  PairSource lossy{{0.8, 0.0}, {0.6, 0.0}, 0.3};
  auto sparse = sample_outcome_bits(lossy, 200, 3);
  CHECK(sparse.pairs_consumed > 200);
}

TEST_CASE("capsule XOR round trip") {
  const std::vector<std::uint8_t> message{1, 0, 0, 1, 1, 0, 1, 0};
  const std::vector<std::uint8_t> pad{0, 0, 1, 1, 0, 1, 1, 0};
  auto rec = capsule_encode(message, pad);
  CHECK(rec.pair_count == 8);
  CHECK(capsule_decode(rec, pad) == message);

  // An uncorrelated pad decodes to the XOR difference, not the message.
  std::vector<std::uint8_t> flipped = pad;
  for (auto& b : flipped) b ^= 1;
  auto garbled = capsule_decode(rec, flipped);
  for (std::size_t i = 0; i < 8; ++i) CHECK(garbled[i] == (1 ^ message[i]));

  CHECK(thrown_code([&] { capsule_encode(message, {0, 1}); }) ==
        Errc::length_mismatch);
  CHECK(thrown_code([&] { capsule_encode({1, 2}, {0, 1}); }) ==
        Errc::invalid_argument);
  CapsuleRecord broken = rec;
  broken.pair_count = 4;
  CHECK(thrown_code([&] { capsule_decode(broken, pad); }) ==
        Errc::length_mismatch);
}

}  // TEST_SUITE
