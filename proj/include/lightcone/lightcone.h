#ifndef LIGHTCONE_H
#define LIGHTCONE_H

/*
 * C interface to the lightcone library: propagator evaluation, two-atom
 * transition amplitudes, entanglement and concentration protocols, and the
 * truncated-mode dynamical oracle.
 *
 * Conventions:
 *   - Every fallible function returns lc_status; LC_OK is 0.  On failure the
 *     thread-local message from lc_last_error_message() describes the cause
 *     and stays valid until the next failing call on the same thread.
 *   - Out-parameters are written only on LC_OK unless stated otherwise.
 *   - Handles (lc_state, lc_model) are created and released by this library;
 *     the free functions accept NULL.
 *   - Atom levels are integers: 0 = G (ground), 1 = E (excited), 2 = F
 *     (auxiliary shelf level, present only in dressed models).
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum lc_status {
  LC_OK = 0,
  LC_INVALID_ARGUMENT = 1,
  LC_DOMAIN_ERROR = 2,
  LC_LIGHT_CONE_SINGULARITY = 3,
  LC_CONVERGENCE_FAILURE = 4,
  LC_DIMENSION_EXCEEDED = 5,
  LC_NUMERICAL_FAILURE = 6,
  LC_ORDERING_ERROR = 7,
  LC_DEGENERATE_INPUT = 8,
  LC_ZERO_STATE = 9,
  LC_INVALID_LEVELS = 10,
  LC_PLAN_MISMATCH = 11,
  LC_EMPTY_COUNTS = 12,
  LC_LENGTH_MISMATCH = 13,
  LC_DENOMINATOR_UNDERFLOW = 14,
  LC_EIGENSTATE_AMBIGUITY = 15,
  LC_UNKNOWN = 100
} lc_status;

const char* lc_status_name(lc_status);
const char* lc_last_error_message(void);
const char* lc_version(void);

typedef struct lc_complex {
  double re;
  double im;
} lc_complex;

typedef struct lc_fit {
  double slope;
  double intercept;
  double r_squared;
} lc_fit;

/* ------------------------------------------------------------------ */
/* Propagator                                                          */

/* Spacetime regimes relative to the light cone. */
enum {
  LC_REGIME_OUTSIDE_CONE = 0,
  LC_REGIME_INSIDE_CONE = 1,
  LC_REGIME_NEAR_CONE = 2
};

const char* lc_regime_name(int regime);

/* Closed-form propagator at spatial separation r, time separation tau, with
 * contour displacement epsilon >= 0.  regime_out may be NULL. */
lc_status lc_propagator_closed(double r, double tau, double epsilon,
                               lc_complex* value_out, int* regime_out);

/* Equal-time far-zone value i/(4 pi^2 r^2). */
lc_status lc_propagator_far(double r, lc_complex* value_out);

typedef struct lc_mode_sum_result {
  lc_complex value;
  double error_estimate;
  int regulator_warning; /* 1 if the mode cutoff leaves a visible tail */
} lc_mode_sum_result;

/* Regulator defaults for the interval (r, tau). */
lc_status lc_mode_sum_defaults(double r, double tau, double* eta_out,
                               double* k_max_out, uint64_t* panels_out);

/* Regulated mode-sum evaluation of the same propagator (times -i). */
lc_status lc_mode_sum(double r, double tau, double eta, double k_max,
                      uint64_t panels, double tol, lc_mode_sum_result* out);

/* Hyperbolic boost of the event (x, t) by the given rapidity. */
lc_status lc_lorentz_boost(double x, double t, double rapidity, double* x_out,
                           double* t_out);

/* (r, tau) of the boosted event (x = r, t = tau). */
lc_status lc_boosted_interval(double r, double tau, double rapidity,
                              double* r_out, double* tau_out);

typedef struct lc_grid_row {
  double x;
  double y;
  lc_complex value;
  double magnitude;
  int regime;
} lc_grid_row;

/* Equatorial-plane magnitude map at fixed time t: resolution x resolution
 * rows over [-half_extent, half_extent]^2, row-major in y then x.  cap is
 * the capacity of rows; the call fails with LC_LENGTH_MISMATCH if it is too
 * small.  n_out receives the row count. */
lc_status lc_propagator_grid(double t, double half_extent, int resolution,
                             lc_grid_row* rows, size_t cap, size_t* n_out);

/* ------------------------------------------------------------------ */
/* Transition amplitudes                                               */

typedef struct lc_atom_pair {
  double alpha;      /* overall interaction scale */
  double dipole;     /* d, dipole matrix element (length), >= 0 */
  double separation; /* r, atom separation */
  double omega_a;    /* atomic transition frequency */
  double delta_t;    /* interaction window, >= 0 */
} lc_atom_pair;

lc_status lc_amplitude_forward_closed(const lc_atom_pair*, lc_complex* out);
lc_status lc_amplitude_reverse_closed(const lc_atom_pair*, lc_complex* out);
lc_status lc_amplitude_total_closed(const lc_atom_pair*, lc_complex* out);

/* Adaptive double-quadrature evaluation; full_kernel = 0 uses the far-zone
 * kernel, 1 the full one (requires separation > delta_t).  error_out may be
 * NULL. */
lc_status lc_amplitude_quadrature(const lc_atom_pair*, int full_kernel,
                                  double tol, lc_complex* out, double* error_out);
lc_status lc_amplitude_quadrature_total(const lc_atom_pair*, int full_kernel,
                                        double tol, lc_complex* out,
                                        double* error_out);

/* Relative deviation of the full-kernel amplitude from the far-zone closed
 * form at delta_t/separation = ratios[i]; deviations_out has length n.  The
 * log-log fit of deviation vs ratio lands in fit_out (slope ~ 2). */
lc_status lc_farzone_scan(const lc_atom_pair*, const double* ratios, size_t n,
                          double* deviations_out, lc_fit* fit_out);

/* ------------------------------------------------------------------ */
/* Joint atom-field states                                             */

typedef struct lc_state lc_state;

lc_status lc_state_new(size_t n_modes, lc_state** out);
void lc_state_free(lc_state*);

/* Set one amplitude; occupations has length n_modes (entries are photon
 * counts per mode).  A zero amplitude removes the entry. */
lc_status lc_state_set(lc_state*, int atom1, int atom2,
                       const uint8_t* occupations, size_t n_occ, lc_complex amp);
lc_status lc_state_get(const lc_state*, int atom1, int atom2,
                       const uint8_t* occupations, size_t n_occ, lc_complex* out);
lc_status lc_state_norm(const lc_state*, double* out);
lc_status lc_state_normalize(lc_state*);

/* Project onto the zero-photon sector.  qubits_out is {GG, GE, EG, EE} (un-
 * normalised), residual_out the weight outside the sector, empty_out 1 when
 * the sector is numerically empty. */
lc_status lc_project_vacuum(const lc_state*, lc_complex qubits_out[4],
                            double* residual_out, int* empty_out);

/* Schmidt coefficients across the (atom 1) vs (atom 2 + field) split, in
 * non-increasing order.  Two-call pattern: pass values=NULL to query the
 * count. */
lc_status lc_schmidt_values(const lc_state*, double* values, size_t cap,
                            size_t* n_out);

/* Reduced two-qubit density matrix after tracing out the field, row-major
 * 4x4 in the basis {GG, GE, EG, EE}. */
lc_status lc_partial_trace_field(const lc_state*, lc_complex rho_out[16]);

/* Wootters concurrence of a two-qubit density matrix (row-major 4x4). */
lc_status lc_concurrence(const lc_complex rho[16], double* out);

/* JSON round trip.  *json_out is heap-allocated; release it with
 * lc_string_free. */
lc_status lc_state_to_json(const lc_state*, char** json_out);
lc_status lc_state_from_json(const char* json, lc_state** out);
void lc_string_free(char*);

/* ------------------------------------------------------------------ */
/* Post-selection, concentration, correlation protocols                */

typedef struct lc_concentration_plan {
  double theta;
  double phase;
  double success_prob;
} lc_concentration_plan;

/* Plan for amplitudes with |a| >= |b| > 0 (LC_ORDERING_ERROR otherwise). */
lc_status lc_plan_concentration(lc_complex a, lc_complex b,
                                lc_concentration_plan* out);

/* Full concentration of (a, b) with automatic mirroring; kept_out receives
 * the un-normalised kept amplitudes {EG, GE}. */
lc_status lc_concentrate_pair(lc_complex a, lc_complex b, lc_complex kept_out[2],
                              double* keep_probability_out);

/* I(X;Y) in bits of 2x2 counts, row-major [atom1][atom2]. */
lc_status lc_mutual_information(const uint64_t counts[4], double* out);

typedef struct lc_pair_source {
  lc_complex a;           /* |E1 G2, vac> amplitude (relative) */
  lc_complex b;           /* |G1 E2, vac> amplitude (relative) */
  double residual_weight; /* weight of the photon-escaped remainder */
} lc_pair_source;

/* Source whose b is the closed-form transition amplitude of the pair. */
lc_status lc_pair_source_from_atoms(const lc_atom_pair*, double residual_weight,
                                    lc_pair_source* out);

typedef struct lc_ensemble_stats {
  uint64_t n_input;
  uint64_t n_photon_rejected;
  uint64_t n_f_rejected;
  uint64_t n_kept;
  double mean_concurrence;
  double mutual_info_bits;
  uint64_t seed;
  uint64_t joint_counts[4]; /* row-major [atom1][atom2], E = 1 */
} lc_ensemble_stats;

lc_status lc_run_ensemble(const lc_pair_source*, uint64_t n, uint64_t seed,
                          lc_ensemble_stats* out);

/* Measurement bits of kept pairs only; both arrays have length n_bits.
 * pairs_consumed_out counts the source pairs drawn to collect them. */
lc_status lc_sample_outcomes(const lc_pair_source*, uint64_t n_bits,
                             uint64_t seed, uint8_t* atom1_bits,
                             uint8_t* atom2_bits, uint64_t* pairs_consumed_out);

/* XOR pad over bit arrays (entries 0/1). */
lc_status lc_capsule_encode(const uint8_t* message, const uint8_t* outcomes,
                            size_t n, uint8_t* cipher_out);
lc_status lc_capsule_decode(const uint8_t* cipher, const uint8_t* remote_outcomes,
                            size_t n, uint8_t* message_out);

/* ------------------------------------------------------------------ */
/* Truncated-mode dynamical oracle                                     */

typedef struct lc_model lc_model;

typedef struct lc_model_config {
  int n_modes;           /* even, >= 2; ring circumference = n_modes */
  int n_max;             /* total-photon truncation, >= 1 */
  double coupling;       /* g */
  double omega_a;        /* atom 1 transition frequency */
  double omega_a2;       /* atom 2; <= 0 means "same as omega_a" */
  double atom_x1;
  double atom_x2;
  int counter_rotating;  /* 0 = RWA, 1 = full coupling */
  int dressed;           /* 1 enables the F level and its coupling */
  double third_level_gap;
  double dressing_strength;
} lc_model_config;

void lc_model_config_defaults(lc_model_config* out);

lc_status lc_model_build(const lc_model_config*, lc_model** out);
void lc_model_free(lc_model*);
lc_status lc_model_dimension(const lc_model*, size_t* out);

/* Exact evolution of an arbitrary joint state for time t. */
lc_status lc_model_evolve(const lc_model*, const lc_state* initial, double t,
                          lc_state** out);

/* Product initial states used by the scenario helpers below. */
typedef enum lc_initial_state {
  LC_INITIAL_E1_G2 = 0,
  LC_INITIAL_G1_G2 = 1,
  LC_INITIAL_G1_E2 = 2,
  LC_INITIAL_E1_E2 = 3
} lc_initial_state;

/* Amplitude on |G1 E2, vac> after evolving the chosen initial state. */
lc_status lc_transfer_amplitude(const lc_model*, lc_initial_state, double t,
                                lc_complex* out);
lc_status lc_excitation_probability(const lc_model*, lc_initial_state, double t,
                                    int atom_index, double* out);
lc_status lc_glauber_detection(const lc_model*, lc_initial_state, double t,
                               double position, double* out);
lc_status lc_g2_coherence(const lc_model*, lc_initial_state, double t,
                          double x1, double x2, double* out);

typedef struct lc_causality_row {
  double coupling;
  lc_complex transfer_amplitude;
  double delta_p2;
} lc_causality_row;

/* Coupling-order scan; rows has length n_couplings. */
lc_status lc_causality_scan(const lc_model_config*, const double* couplings,
                            size_t n_couplings, double time,
                            lc_causality_row* rows, lc_fit* amplitude_fit_out,
                            lc_fit* delta_p2_fit_out);

typedef struct lc_dressed_point {
  double epsilon;
  lc_complex b_dressed;
  lc_complex b_bare;
  double relative_difference;
  double overlap;
} lc_dressed_point;

/* Dressed-vs-bare amplitude comparison; points has length n_eps.  The fit
 * covers the eps > 0 entries and is zeroed when fewer than two exist. */
lc_status lc_dressed_compare(const lc_model_config*, const double* eps,
                             size_t n_eps, double time, lc_dressed_point* points,
                             lc_fit* fit_out);

/* ------------------------------------------------------------------ */
/* Dipole-approximation certificate                                    */

typedef struct lc_multipole_partials {
  double value;        /* kernel at the expansion point, 1/r^2 */
  double d_z_first;    /* -2/r^3 */
  double d_z_second;   /* +2/r^3 */
  double d_t_first;    /* 0 */
  double d_t_second;   /* 0 */
  double d_transverse; /* 0 */
} lc_multipole_partials;

lc_status lc_multipole_taylor(double separation, double atom_extent,
                              lc_multipole_partials* out);
lc_status lc_multipole_ratio_bound(double separation, double atom_extent,
                                   double* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* LIGHTCONE_H */
