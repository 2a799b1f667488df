#include "lightcone/lightcone.h"

#include <complex>
#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "amplitude.hpp"
#include "errors.hpp"
#include "lattice.hpp"
#include "multipole.hpp"
#include "propagator.hpp"
#include "protocols.hpp"
#include "quantum_state.hpp"

using lightcone::Errc;
using cplx = std::complex<double>;

struct lc_state {
  lightcone::qstate::JointState impl;
};

struct lc_model {
  std::shared_ptr<const lightcone::lattice::LatticeModel> impl;
};

namespace {

thread_local std::string g_last_error;

lc_status status_from(Errc code) {
  switch (code) {
    case Errc::invalid_argument: return LC_INVALID_ARGUMENT;
    case Errc::domain_error: return LC_DOMAIN_ERROR;
    case Errc::light_cone_singularity: return LC_LIGHT_CONE_SINGULARITY;
    case Errc::convergence_failure: return LC_CONVERGENCE_FAILURE;
    case Errc::dimension_exceeded: return LC_DIMENSION_EXCEEDED;
    case Errc::numerical_failure: return LC_NUMERICAL_FAILURE;
    case Errc::ordering_error: return LC_ORDERING_ERROR;
    case Errc::degenerate_input: return LC_DEGENERATE_INPUT;
    case Errc::zero_state: return LC_ZERO_STATE;
    case Errc::invalid_levels: return LC_INVALID_LEVELS;
    case Errc::plan_mismatch: return LC_PLAN_MISMATCH;
    case Errc::empty_counts: return LC_EMPTY_COUNTS;
    case Errc::length_mismatch: return LC_LENGTH_MISMATCH;
    case Errc::denominator_underflow: return LC_DENOMINATOR_UNDERFLOW;
    case Errc::eigenstate_ambiguity: return LC_EIGENSTATE_AMBIGUITY;
  }
  return LC_UNKNOWN;
}

template <class F>
lc_status guarded(F&& body) noexcept {
  try {
    body();
    return LC_OK;
  } catch (const lightcone::Error& e) {
    g_last_error = e.message();
    return status_from(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return LC_UNKNOWN;
  } catch (...) {
    g_last_error = "unknown exception";
    return LC_UNKNOWN;
  }
}

void need(bool ok, const char* what) {
  lightcone::require(ok, Errc::invalid_argument, what);
}

lc_complex to_c(cplx z) { return {z.real(), z.imag()}; }
cplx from_c(lc_complex z) { return {z.re, z.im}; }

lc_fit to_c(const lightcone::numerics::LinearFit& fit) {
  return {fit.slope, fit.intercept, fit.r_squared};
}

lightcone::qstate::Level level_from(int level) {
  need(level >= 0 && level <= 2, "atom level must be 0 (G), 1 (E) or 2 (F)");
  return static_cast<lightcone::qstate::Level>(level);
}

lightcone::amplitude::AtomPairConfig pair_from(const lc_atom_pair* pair) {
  need(pair != nullptr, "null atom-pair config");
  lightcone::amplitude::AtomPairConfig cfg;
  cfg.alpha = pair->alpha;
  cfg.dipole = pair->dipole;
  cfg.separation = pair->separation;
  cfg.omega_a = pair->omega_a;
  cfg.delta_t = pair->delta_t;
  return cfg;
}

lightcone::lattice::ModelConfig model_config_from(const lc_model_config* cfg) {
  need(cfg != nullptr, "null model config");
  lightcone::lattice::ModelConfig out;
  out.n_modes = cfg->n_modes;
  out.n_max = cfg->n_max;
  out.coupling = cfg->coupling;
  out.omega_a = cfg->omega_a;
  if (cfg->omega_a2 > 0.0) out.omega_a2 = cfg->omega_a2;
  out.atom_positions = {cfg->atom_x1, cfg->atom_x2};
  out.counter_rotating = cfg->counter_rotating != 0;
  if (cfg->dressed != 0) {
    out.dressing = lightcone::lattice::DressingConfig{cfg->third_level_gap,
                                                      cfg->dressing_strength};
  }
  return out;
}

Eigen::VectorXcd initial_vector(const lightcone::lattice::LatticeModel& model,
                                lc_initial_state which) {
  using lightcone::qstate::Level;
  Level l1 = Level::G, l2 = Level::G;
  switch (which) {
    case LC_INITIAL_E1_G2: l1 = Level::E; break;
    case LC_INITIAL_G1_G2: break;
    case LC_INITIAL_G1_E2: l2 = Level::E; break;
    case LC_INITIAL_E1_E2: l1 = Level::E; l2 = Level::E; break;
    default:
      lightcone::raise(Errc::invalid_argument, "unknown initial-state selector");
  }
  const std::vector<std::uint8_t> vac(
      static_cast<std::size_t>(model.config().n_modes), 0);
  Eigen::VectorXcd v =
      Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(model.dimension()));
  v(static_cast<Eigen::Index>(model.basis_index(l1, l2, vac))) = 1.0;
  return v;
}

char* dup_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.c_str(), text.size() + 1);
  return out;
}

}  // namespace

extern "C" {

const char* lc_status_name(lc_status status) {
  switch (status) {
    case LC_OK: return "ok";
    case LC_INVALID_ARGUMENT: return "invalid_argument";
    case LC_DOMAIN_ERROR: return "domain_error";
    case LC_LIGHT_CONE_SINGULARITY: return "light_cone_singularity";
    case LC_CONVERGENCE_FAILURE: return "convergence_failure";
    case LC_DIMENSION_EXCEEDED: return "dimension_exceeded";
    case LC_NUMERICAL_FAILURE: return "numerical_failure";
    case LC_ORDERING_ERROR: return "ordering_error";
    case LC_DEGENERATE_INPUT: return "degenerate_input";
    case LC_ZERO_STATE: return "zero_state";
    case LC_INVALID_LEVELS: return "invalid_levels";
    case LC_PLAN_MISMATCH: return "plan_mismatch";
    case LC_EMPTY_COUNTS: return "empty_counts";
    case LC_LENGTH_MISMATCH: return "length_mismatch";
    case LC_DENOMINATOR_UNDERFLOW: return "denominator_underflow";
    case LC_EIGENSTATE_AMBIGUITY: return "eigenstate_ambiguity";
    case LC_UNKNOWN: break;
  }
  return "unknown";
}

const char* lc_last_error_message(void) { return g_last_error.c_str(); }

const char* lc_version(void) { return "1.0.0"; }

/* ------------------------------------------------------------------ */

const char* lc_regime_name(int regime) {
  using lightcone::propagator::Regime;
  switch (regime) {
    case LC_REGIME_OUTSIDE_CONE: return regime_name(Regime::outside_cone);
    case LC_REGIME_INSIDE_CONE: return regime_name(Regime::inside_cone);
    case LC_REGIME_NEAR_CONE: return regime_name(Regime::near_cone);
    default: return "unknown";
  }
}

lc_status lc_propagator_closed(double r, double tau, double epsilon,
                               lc_complex* value_out, int* regime_out) {
  return guarded([&] {
    need(value_out != nullptr, "null value_out");
    const auto result = lightcone::propagator::feynman_propagator_closed(
        {r, tau}, epsilon);
    *value_out = to_c(result.value);
    if (regime_out != nullptr) *regime_out = static_cast<int>(result.regime);
  });
}

lc_status lc_propagator_far(double r, lc_complex* value_out) {
  return guarded([&] {
    need(value_out != nullptr, "null value_out");
    *value_out = to_c(lightcone::propagator::feynman_propagator_far(r));
  });
}

lc_status lc_mode_sum_defaults(double r, double tau, double* eta_out,
                               double* k_max_out, uint64_t* panels_out) {
  return guarded([&] {
    need(eta_out != nullptr && k_max_out != nullptr && panels_out != nullptr,
         "null out-parameter");
    const auto cfg = lightcone::propagator::ModeSumConfig::for_interval({r, tau});
    *eta_out = cfg.eta;
    *k_max_out = cfg.k_max;
    *panels_out = cfg.panels;
  });
}

lc_status lc_mode_sum(double r, double tau, double eta, double k_max,
                      uint64_t panels, double tol, lc_mode_sum_result* out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    lightcone::propagator::ModeSumConfig cfg;
    cfg.eta = eta;
    cfg.k_max = k_max;
    cfg.panels = static_cast<std::size_t>(panels);
    const auto result =
        lightcone::propagator::mode_sum_propagator({r, tau}, cfg, tol);
    out->value = to_c(result.value);
    out->error_estimate = result.error_estimate;
    out->regulator_warning = result.regulator_warning ? 1 : 0;
  });
}

lc_status lc_lorentz_boost(double x, double t, double rapidity, double* x_out,
                           double* t_out) {
  return guarded([&] {
    need(x_out != nullptr && t_out != nullptr, "null out-parameter");
    const auto moved = lightcone::propagator::lorentz_boost({x, t}, rapidity);
    *x_out = moved.x;
    *t_out = moved.t;
  });
}

lc_status lc_boosted_interval(double r, double tau, double rapidity,
                              double* r_out, double* tau_out) {
  return guarded([&] {
    need(r_out != nullptr && tau_out != nullptr, "null out-parameter");
    const auto moved = lightcone::propagator::boosted({r, tau}, rapidity);
    *r_out = moved.r;
    *tau_out = moved.tau;
  });
}

lc_status lc_propagator_grid(double t, double half_extent, int resolution,
                             lc_grid_row* rows, size_t cap, size_t* n_out) {
  return guarded([&] {
    need(rows != nullptr && n_out != nullptr, "null out-parameter");
    const auto grid =
        lightcone::propagator::propagator_grid(t, half_extent, resolution);
    lightcone::require(grid.size() <= cap, Errc::length_mismatch,
                       "grid row buffer too small");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      rows[i].x = grid[i].x;
      rows[i].y = grid[i].y;
      rows[i].value = to_c(grid[i].value);
      rows[i].magnitude = grid[i].magnitude;
      rows[i].regime = static_cast<int>(grid[i].regime);
    }
    *n_out = grid.size();
  });
}

/* ------------------------------------------------------------------ */

lc_status lc_amplitude_forward_closed(const lc_atom_pair* pair, lc_complex* out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    *out = to_c(lightcone::amplitude::amplitude_forward_closed(pair_from(pair)).b);
  });
}

lc_status lc_amplitude_reverse_closed(const lc_atom_pair* pair, lc_complex* out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    *out = to_c(lightcone::amplitude::amplitude_reverse_closed(pair_from(pair)).b);
  });
}

lc_status lc_amplitude_total_closed(const lc_atom_pair* pair, lc_complex* out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    *out = to_c(lightcone::amplitude::amplitude_total_closed(pair_from(pair)).b);
  });
}

lc_status lc_amplitude_quadrature(const lc_atom_pair* pair, int full_kernel,
                                  double tol, lc_complex* out, double* error_out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    const auto choice = full_kernel != 0
                            ? lightcone::amplitude::PropagatorChoice::full
                            : lightcone::amplitude::PropagatorChoice::far_zone;
    const auto result =
        lightcone::amplitude::amplitude_quadrature(pair_from(pair), choice, tol);
    *out = to_c(result.b);
    if (error_out != nullptr) *error_out = result.error_estimate;
  });
}

lc_status lc_amplitude_quadrature_total(const lc_atom_pair* pair, int full_kernel,
                                        double tol, lc_complex* out,
                                        double* error_out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    const auto choice = full_kernel != 0
                            ? lightcone::amplitude::PropagatorChoice::full
                            : lightcone::amplitude::PropagatorChoice::far_zone;
    const auto result = lightcone::amplitude::amplitude_quadrature_total(
        pair_from(pair), choice, tol);
    *out = to_c(result.b);
    if (error_out != nullptr) *error_out = result.error_estimate;
  });
}

lc_status lc_farzone_scan(const lc_atom_pair* pair, const double* ratios,
                          size_t n, double* deviations_out, lc_fit* fit_out) {
  return guarded([&] {
    need(ratios != nullptr && deviations_out != nullptr && fit_out != nullptr,
         "null out-parameter");
    const auto scan = lightcone::amplitude::farzone_correction_scan(
        pair_from(pair), std::vector<double>(ratios, ratios + n));
    for (std::size_t i = 0; i < scan.points.size(); ++i) {
      deviations_out[i] = scan.points[i].relative_deviation;
    }
    *fit_out = to_c(scan.fit);
  });
}

/* ------------------------------------------------------------------ */

lc_status lc_state_new(size_t n_modes, lc_state** out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    *out = new lc_state{lightcone::qstate::JointState(n_modes)};
  });
}

void lc_state_free(lc_state* state) { delete state; }

lc_status lc_state_set(lc_state* state, int atom1, int atom2,
                       const uint8_t* occupations, size_t n_occ, lc_complex amp) {
  return guarded([&] {
    need(state != nullptr, "null state");
    need(occupations != nullptr || n_occ == 0, "null occupations");
    lightcone::qstate::BasisLabel label;
    label.atom1 = level_from(atom1);
    label.atom2 = level_from(atom2);
    label.occupations.assign(occupations, occupations + n_occ);
    state->impl.set(label, from_c(amp));
  });
}

lc_status lc_state_get(const lc_state* state, int atom1, int atom2,
                       const uint8_t* occupations, size_t n_occ, lc_complex* out) {
  return guarded([&] {
    need(state != nullptr, "null state");
    need(out != nullptr, "null out");
    need(occupations != nullptr || n_occ == 0, "null occupations");
    lightcone::qstate::BasisLabel label;
    label.atom1 = level_from(atom1);
    label.atom2 = level_from(atom2);
    label.occupations.assign(occupations, occupations + n_occ);
    *out = to_c(state->impl.at(label));
  });
}

lc_status lc_state_norm(const lc_state* state, double* out) {
  return guarded([&] {
    need(state != nullptr && out != nullptr, "null argument");
    *out = state->impl.norm();
  });
}

lc_status lc_state_normalize(lc_state* state) {
  return guarded([&] {
    need(state != nullptr, "null state");
    state->impl.normalize();
  });
}

lc_status lc_project_vacuum(const lc_state* state, lc_complex qubits_out[4],
                            double* residual_out, int* empty_out) {
  return guarded([&] {
    need(state != nullptr && qubits_out != nullptr && residual_out != nullptr &&
             empty_out != nullptr,
         "null argument");
    const auto proj = lightcone::qstate::project_vacuum(state->impl);
    qubits_out[0] = to_c(proj.gg);
    qubits_out[1] = to_c(proj.ge);
    qubits_out[2] = to_c(proj.eg);
    qubits_out[3] = to_c(proj.ee);
    *residual_out = proj.residual_norm;
    *empty_out = proj.empty ? 1 : 0;
  });
}

lc_status lc_schmidt_values(const lc_state* state, double* values, size_t cap,
                            size_t* n_out) {
  return guarded([&] {
    need(state != nullptr && n_out != nullptr, "null argument");
    const auto split = lightcone::qstate::Bipartition::atom1_vs_rest(
        state->impl.n_modes());
    const auto coeffs = lightcone::qstate::schmidt_values(state->impl, split);
    *n_out = coeffs.size();
    if (values == nullptr) return;  // count query
    lightcone::require(coeffs.size() <= cap, Errc::length_mismatch,
                       "schmidt value buffer too small");
    std::copy(coeffs.begin(), coeffs.end(), values);
  });
}

lc_status lc_partial_trace_field(const lc_state* state, lc_complex rho_out[16]) {
  return guarded([&] {
    need(state != nullptr && rho_out != nullptr, "null argument");
    const auto rho = lightcone::qstate::partial_trace_field(state->impl);
    for (int row = 0; row < 4; ++row)
      for (int col = 0; col < 4; ++col)
        rho_out[row * 4 + col] = to_c(rho.matrix(row, col));
  });
}

lc_status lc_concurrence(const lc_complex rho[16], double* out) {
  return guarded([&] {
    need(rho != nullptr && out != nullptr, "null argument");
    lightcone::qstate::TwoQubitDensity density;
    for (int row = 0; row < 4; ++row)
      for (int col = 0; col < 4; ++col)
        density.matrix(row, col) = from_c(rho[row * 4 + col]);
    *out = lightcone::qstate::concurrence(density);
  });
}

lc_status lc_state_to_json(const lc_state* state, char** json_out) {
  return guarded([&] {
    need(state != nullptr && json_out != nullptr, "null argument");
    *json_out = dup_string(lightcone::qstate::to_fixture_json(state->impl));
  });
}

lc_status lc_state_from_json(const char* json, lc_state** out) {
  return guarded([&] {
    need(json != nullptr && out != nullptr, "null argument");
    auto parsed = lightcone::qstate::state_from_fixture_json(json, -1);
    *out = new lc_state{std::move(parsed)};
  });
}

void lc_string_free(char* text) { delete[] text; }

/* ------------------------------------------------------------------ */

lc_status lc_plan_concentration(lc_complex a, lc_complex b,
                                lc_concentration_plan* out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    const auto plan = lightcone::protocols::plan_concentration(from_c(a), from_c(b));
    out->theta = plan.theta;
    out->phase = plan.phase;
    out->success_prob = plan.success_prob;
  });
}

lc_status lc_concentrate_pair(lc_complex a, lc_complex b, lc_complex kept_out[2],
                              double* keep_probability_out) {
  return guarded([&] {
    need(kept_out != nullptr && keep_probability_out != nullptr, "null argument");
    const auto kept = lightcone::protocols::concentrate_pair(from_c(a), from_c(b));
    kept_out[0] = to_c(kept.kept_eg);
    kept_out[1] = to_c(kept.kept_ge);
    *keep_probability_out = kept.keep_probability;
  });
}

lc_status lc_mutual_information(const uint64_t counts[4], double* out) {
  return guarded([&] {
    need(counts != nullptr && out != nullptr, "null argument");
    std::array<std::array<std::uint64_t, 2>, 2> table{
        {{counts[0], counts[1]}, {counts[2], counts[3]}}};
    *out = lightcone::protocols::mutual_information(table);
  });
}

lc_status lc_pair_source_from_atoms(const lc_atom_pair* pair,
                                    double residual_weight, lc_pair_source* out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    const auto src = lightcone::protocols::PairSource::from_config(
        pair_from(pair), residual_weight);
    out->a = to_c(src.a);
    out->b = to_c(src.b);
    out->residual_weight = src.residual_weight;
  });
}

namespace {

lightcone::protocols::PairSource source_from(const lc_pair_source* source) {
  need(source != nullptr, "null pair source");
  lightcone::protocols::PairSource out;
  out.a = from_c(source->a);
  out.b = from_c(source->b);
  out.residual_weight = source->residual_weight;
  return out;
}

}  // namespace

lc_status lc_run_ensemble(const lc_pair_source* source, uint64_t n, uint64_t seed,
                          lc_ensemble_stats* out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    const auto stats = lightcone::protocols::run_ensemble(source_from(source), n, seed);
    out->n_input = stats.n_input;
    out->n_photon_rejected = stats.n_photon_rejected;
    out->n_f_rejected = stats.n_f_rejected;
    out->n_kept = stats.n_kept;
    out->mean_concurrence = stats.mean_concurrence;
    out->mutual_info_bits = stats.mutual_info_bits;
    out->seed = stats.seed;
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y)
        out->joint_counts[x * 2 + y] =
            stats.joint_counts[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)];
  });
}

lc_status lc_sample_outcomes(const lc_pair_source* source, uint64_t n_bits,
                             uint64_t seed, uint8_t* atom1_bits,
                             uint8_t* atom2_bits, uint64_t* pairs_consumed_out) {
  return guarded([&] {
    need(atom1_bits != nullptr && atom2_bits != nullptr &&
             pairs_consumed_out != nullptr,
         "null out-parameter");
    const auto bits =
        lightcone::protocols::sample_outcome_bits(source_from(source), n_bits, seed);
    std::copy(bits.atom1.begin(), bits.atom1.end(), atom1_bits);
    std::copy(bits.atom2.begin(), bits.atom2.end(), atom2_bits);
    *pairs_consumed_out = bits.pairs_consumed;
  });
}

lc_status lc_capsule_encode(const uint8_t* message, const uint8_t* outcomes,
                            size_t n, uint8_t* cipher_out) {
  return guarded([&] {
    need(message != nullptr && outcomes != nullptr && cipher_out != nullptr,
         "null argument");
    const std::vector<std::uint8_t> msg(message, message + n);
    const std::vector<std::uint8_t> keys(outcomes, outcomes + n);
    const auto rec = lightcone::protocols::capsule_encode(msg, keys);
    std::copy(rec.ciphertext.begin(), rec.ciphertext.end(), cipher_out);
  });
}

lc_status lc_capsule_decode(const uint8_t* cipher, const uint8_t* remote_outcomes,
                            size_t n, uint8_t* message_out) {
  return guarded([&] {
    need(cipher != nullptr && remote_outcomes != nullptr && message_out != nullptr,
         "null argument");
    lightcone::protocols::CapsuleRecord rec;
    rec.ciphertext.assign(cipher, cipher + n);
    rec.pair_count = n;
    const std::vector<std::uint8_t> keys(remote_outcomes, remote_outcomes + n);
    const auto msg = lightcone::protocols::capsule_decode(rec, keys);
    std::copy(msg.begin(), msg.end(), message_out);
  });
}

/* ------------------------------------------------------------------ */

void lc_model_config_defaults(lc_model_config* out) {
  if (out == nullptr) return;
  const lightcone::lattice::ModelConfig defaults;
  out->n_modes = defaults.n_modes;
  out->n_max = defaults.n_max;
  out->coupling = defaults.coupling;
  out->omega_a = defaults.omega_a;
  out->omega_a2 = 0.0;  // "same as omega_a"
  out->atom_x1 = defaults.atom_positions[0];
  out->atom_x2 = defaults.atom_positions[1];
  out->counter_rotating = defaults.counter_rotating ? 1 : 0;
  out->dressed = 0;
  const lightcone::lattice::DressingConfig dressing_defaults;
  out->third_level_gap = dressing_defaults.third_level_gap;
  out->dressing_strength = dressing_defaults.strength;
}

lc_status lc_model_build(const lc_model_config* cfg, lc_model** out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    *out = new lc_model{lightcone::lattice::build_model(model_config_from(cfg))};
  });
}

void lc_model_free(lc_model* model) { delete model; }

lc_status lc_model_dimension(const lc_model* model, size_t* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr, "null argument");
    *out = model->impl->dimension();
  });
}

lc_status lc_model_evolve(const lc_model* model, const lc_state* initial,
                          double t, lc_state** out) {
  return guarded([&] {
    need(model != nullptr && initial != nullptr && out != nullptr, "null argument");
    const auto evolved = lightcone::lattice::evolve(model->impl, initial->impl, t);
    *out = new lc_state{evolved.joint_state()};
  });
}

lc_status lc_transfer_amplitude(const lc_model* model, lc_initial_state initial,
                                double t, lc_complex* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr, "null argument");
    const auto evolved = lightcone::lattice::evolve(
        model->impl, initial_vector(*model->impl, initial), t);
    *out = to_c(lightcone::lattice::transfer_amplitude(evolved));
  });
}

lc_status lc_excitation_probability(const lc_model* model, lc_initial_state initial,
                                    double t, int atom_index, double* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr, "null argument");
    const auto evolved = lightcone::lattice::evolve(
        model->impl, initial_vector(*model->impl, initial), t);
    *out = lightcone::lattice::excitation_probability(evolved, atom_index);
  });
}

lc_status lc_glauber_detection(const lc_model* model, lc_initial_state initial,
                               double t, double position, double* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr, "null argument");
    const auto evolved = lightcone::lattice::evolve(
        model->impl, initial_vector(*model->impl, initial), t);
    *out = lightcone::lattice::glauber_detection(evolved, position);
  });
}

lc_status lc_g2_coherence(const lc_model* model, lc_initial_state initial,
                          double t, double x1, double x2, double* out) {
  return guarded([&] {
    need(model != nullptr && out != nullptr, "null argument");
    const auto evolved = lightcone::lattice::evolve(
        model->impl, initial_vector(*model->impl, initial), t);
    *out = lightcone::lattice::g2_coherence(evolved, x1, x2);
  });
}

lc_status lc_causality_scan(const lc_model_config* cfg, const double* couplings,
                            size_t n_couplings, double time,
                            lc_causality_row* rows, lc_fit* amplitude_fit_out,
                            lc_fit* delta_p2_fit_out) {
  return guarded([&] {
    need(couplings != nullptr && rows != nullptr && amplitude_fit_out != nullptr &&
             delta_p2_fit_out != nullptr,
         "null out-parameter");
    const auto scan = lightcone::lattice::causality_scan(
        model_config_from(cfg), std::span<const double>(couplings, n_couplings),
        time);
    // Rows arrive interleaved (two quantities per coupling); fold them.
    std::size_t row = 0;
    for (std::size_t i = 0; i + 1 < scan.rows.size(); i += 2) {
      rows[row].coupling = scan.rows[i].coupling;
      rows[row].transfer_amplitude = to_c(scan.rows[i].value);
      rows[row].delta_p2 = scan.rows[i + 1].value.real();
      ++row;
    }
    *amplitude_fit_out = to_c(scan.amplitude_fit);
    *delta_p2_fit_out = to_c(scan.delta_p2_fit);
  });
}

lc_status lc_dressed_compare(const lc_model_config* cfg, const double* eps,
                             size_t n_eps, double time, lc_dressed_point* points,
                             lc_fit* fit_out) {
  return guarded([&] {
    need(eps != nullptr && points != nullptr && fit_out != nullptr,
         "null out-parameter");
    const auto compare = lightcone::lattice::dressed_amplitude_compare(
        model_config_from(cfg), std::span<const double>(eps, n_eps), time);
    for (std::size_t i = 0; i < compare.points.size(); ++i) {
      points[i].epsilon = compare.points[i].epsilon;
      points[i].b_dressed = to_c(compare.points[i].b_dressed);
      points[i].b_bare = to_c(compare.points[i].b_bare);
      points[i].relative_difference = compare.points[i].relative_difference;
      points[i].overlap = compare.points[i].overlap;
    }
    *fit_out = to_c(compare.fit);
  });
}

/* ------------------------------------------------------------------ */

lc_status lc_multipole_taylor(double separation, double atom_extent,
                              lc_multipole_partials* out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    const auto partials = lightcone::multipole::propagator_taylor_coefficients(
        {separation, atom_extent});
    out->value = partials.value;
    out->d_z_first = partials.d_z_first;
    out->d_z_second = partials.d_z_second;
    out->d_t_first = partials.d_t_first;
    out->d_t_second = partials.d_t_second;
    out->d_transverse = partials.d_transverse;
  });
}

lc_status lc_multipole_ratio_bound(double separation, double atom_extent,
                                   double* out) {
  return guarded([&] {
    need(out != nullptr, "null out");
    *out = lightcone::multipole::multipole_ratio_bound({separation, atom_extent});
  });
}

} /* extern "C" */
