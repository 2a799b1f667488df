#pragma once

// Exact dynamics of two atoms coupled to a truncated set of ring modes.
//
// The field lives on a 1-D ring of circumference L = n_modes with linear
// dispersion w_k = |k| (so the maximum signal speed is 1).  Modes are the
// nonzero wavenumbers k_j = 2*pi*j/L for j = +-1 .. +-n_modes/2, ordered
// {+1, -1, +2, -2, ...}.  Each atom couples through
//
//   H_int = sum_k g_k (sigma+ + sigma-) (a_k e^{i k x} + a_k^dag e^{-i k x}),
//   g_k   = g / sqrt(2 w_k n_modes),
//
// with the number-nonconserving terms dropped when counter_rotating=false.
// An optional third atomic level F (used as a concentration shelf and for
// dressed-state comparisons) couples F<->G and F<->E through the same mode
// structure with its own strength; that coupling is always kept in full.
//
// The model is diagonalized densely once at build time; evolution is then
// exact, e^{-iHt} = V e^{-i Lambda t} V^dag.  This is the structural oracle
// for order-counting tests: it knows nothing of the perturbative amplitude
// formulas it is used to check.

#include <array>
#include <complex>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "numerics.hpp"
#include "quantum_state.hpp"

namespace lightcone::lattice {

using cplx = std::complex<double>;

inline constexpr std::size_t dim_cap = 20000;

struct DressingConfig {
  double third_level_gap = 0.5;  // energy of |F> above |G>
  double strength = 0.0;         // eps; per-mode eps_k = eps/sqrt(2 w_k n_modes)
};

struct ModelConfig {
  int n_modes = 32;  // even, >= 2; ring circumference L = n_modes
  int n_max = 2;     // total-photon truncation, >= 1
  double coupling = 0.01;
  double omega_a = 1.0;                  // atom 1 transition frequency
  std::optional<double> omega_a2;        // atom 2; defaults to omega_a
  std::array<double, 2> atom_positions{0.0, 8.0};
  bool counter_rotating = true;
  std::optional<DressingConfig> dressing;  // presence enables the F level

  int levels() const { return dressing ? 3 : 2; }
  double ring_length() const { return static_cast<double>(n_modes); }
  double atom2_frequency() const { return omega_a2 ? *omega_a2 : omega_a; }
  void validate() const;
};

// Photon-sector size and total Hilbert-space dimension, computed without
// allocating the basis (so the cap can be enforced first).
std::size_t photon_sector_size(int n_modes, int n_max);
std::size_t hilbert_dimension(const ModelConfig&);

class LatticeModel;

struct EvolvedState {
  std::shared_ptr<const LatticeModel> model;
  Eigen::VectorXcd coefficients;
  double time = 0.0;

  qstate::JointState joint_state() const;
};

class LatticeModel : public std::enable_shared_from_this<LatticeModel> {
 public:
  static std::shared_ptr<const LatticeModel> build(const ModelConfig&);

  const ModelConfig& config() const { return config_; }
  std::size_t dimension() const { return static_cast<std::size_t>(hamiltonian_.rows()); }
  const std::vector<double>& mode_wavenumbers() const { return wavenumbers_; }
  const std::vector<double>& mode_frequencies() const { return frequencies_; }
  const Eigen::MatrixXcd& hamiltonian() const { return hamiltonian_; }
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  const Eigen::MatrixXcd& eigenvectors() const { return eigenvectors_; }

  // Basis labels are (level1, level2, occupations); occupations are listed
  // per mode in the ordering above.  Lookup throws invalid_argument for
  // labels outside the truncated basis, invalid_levels for F in a two-level
  // model.
  std::size_t basis_index(qstate::Level l1, qstate::Level l2,
                          std::span<const std::uint8_t> occ) const;
  struct BasisEntry {
    qstate::Level atom1;
    qstate::Level atom2;
    const std::vector<std::uint8_t>* occupations;
  };
  BasisEntry basis_entry(std::size_t index) const;

  Eigen::VectorXcd state_vector(const qstate::JointState&) const;

 private:
  LatticeModel() = default;

  ModelConfig config_;
  std::vector<double> wavenumbers_;
  std::vector<double> frequencies_;
  std::vector<std::vector<std::uint8_t>> sectors_;  // lexicographically sorted
  Eigen::MatrixXcd hamiltonian_;
  Eigen::VectorXd eigenvalues_;
  Eigen::MatrixXcd eigenvectors_;
};

std::shared_ptr<const LatticeModel> build_model(const ModelConfig&);

EvolvedState evolve(const std::shared_ptr<const LatticeModel>&,
                    const Eigen::VectorXcd& initial, double t);
EvolvedState evolve(const std::shared_ptr<const LatticeModel>&,
                    const qstate::JointState& initial, double t);

// Amplitude on |G1, E2, vacuum> — the photon-exchange transfer amplitude.
cplx transfer_amplitude(const EvolvedState&);

// P(atom in E), atom_index is 0 or 1.
double excitation_probability(const EvolvedState&, int atom_index);

// Photon-counting detection rate eta * <E^-(x) E^+(x)> with eta = 1 and the
// positive-frequency field E^+(x) = sum_m f_m e^{i k_m x} a_m,
// f_m = 1/sqrt(2 w_m n_modes).  Under the RWA this is nonzero even at
// space-like separation from the source — that artifact is the point.
double glauber_detection(const EvolvedState&, double position);

// Equal-time second-order coherence
//   <E^- (x1) E^- (x2) E^+ (x2) E^+ (x1)> / (I(x1) I(x2)).
// Both intensities must exceed 1e-14 (denominator_underflow otherwise).
double g2_coherence(const EvolvedState&, double x1, double x2);

// Coupling-order scan: for each g, the transfer amplitude b from initial
// |E1 G2, vac> and the initial-state sensitivity of atom 2's excitation,
//   delta_p2 = |P2(atom 1 starts in E) - P2(atom 1 starts in G)|.
// Log-log fits give the order exponents (b is second order, delta_p2 is
// fourth order and beyond).
struct ScanRow {
  double coupling;
  std::string quantity;  // "transfer_amplitude" or "delta_p2"
  cplx value;
};

struct CausalityScan {
  std::vector<ScanRow> rows;
  numerics::LinearFit amplitude_fit;  // log|b| vs log g
  numerics::LinearFit delta_p2_fit;   // log delta_p2 vs log g
};

CausalityScan causality_scan(const ModelConfig& base,
                             std::span<const double> couplings, double time);

// Dressed-vs-bare transfer amplitude.  For each eps the always-on F-level
// coupling is present in both Hamiltonians; the G<->E coupling g is switched
// on only for the evolution window [0, t].  The dressed initial/final states
// are the eigenstates of the switched-off Hamiltonian with the largest
// overlap on |E1 G2, vac> / |G1 E2, vac> (eigenstate_ambiguity below 0.9);
// at eps = 0 they are the bare basis states exactly.
struct DressedPoint {
  double epsilon;
  cplx b_dressed;
  cplx b_bare;
  double relative_difference;
  double overlap;  // smaller of the two dressed/bare overlaps
};

struct DressedCompare {
  std::vector<DressedPoint> points;
  numerics::LinearFit fit;  // log rel-diff vs log eps over the eps > 0 points
};

DressedCompare dressed_amplitude_compare(const ModelConfig& base,
                                         std::span<const double> epsilons,
                                         double time);

}  // namespace lightcone::lattice
