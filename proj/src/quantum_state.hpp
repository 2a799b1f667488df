#pragma once

// Joint state of two three-level atoms (G, E and an auxiliary shelf level F)
// and a truncated multimode field, plus the entanglement diagnostics used on
// it: vacuum projection, Schmidt decomposition across an arbitrary cut,
// partial trace over the field and the two-qubit concurrence.

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"

namespace lightcone::qstate {

using cplx = std::complex<double>;

enum class Level : std::uint8_t { G = 0, E = 1, F = 2 };

const char* level_name(Level);
Level level_from_name(const std::string&);

// Basis labels order as (atom1, atom2, occupations) with G < E < F and
// occupation vectors compared lexicographically.
struct BasisLabel {
  Level atom1 = Level::G;
  Level atom2 = Level::G;
  std::vector<std::uint8_t> occupations;

  bool is_vacuum() const;
  friend auto operator<=>(const BasisLabel&, const BasisLabel&) = default;
};

// Sparse amplitude map over the labels above.  The mode count is fixed at
// construction; every label must carry an occupation vector of that length.
class JointState {
 public:
  explicit JointState(int n_modes);

  int n_modes() const { return n_modes_; }
  bool normalized() const { return normalized_; }
  std::size_t term_count() const { return amps_.size(); }

  void set(const BasisLabel&, cplx amplitude);
  cplx at(const BasisLabel&) const;  // zero when absent

  double norm() const;
  void normalize();  // throws zero_state below 1e-300

  const std::map<BasisLabel, cplx>& amplitudes() const { return amps_; }

 private:
  int n_modes_;
  std::map<BasisLabel, cplx> amps_;
  bool normalized_ = false;
};

// Amplitudes below this are treated as absent by the product test.
inline constexpr double product_tol = 1e-10;

// Zero-photon amplitudes restricted to {G, E}; everything else lands in the
// residual.  `empty` flags an all-but-vanished vacuum sector.
struct VacuumProjection {
  cplx gg{0.0, 0.0};
  cplx ge{0.0, 0.0};
  cplx eg{0.0, 0.0};
  cplx ee{0.0, 0.0};
  double residual_norm = 0.0;
  bool empty = false;

  double sector_weight() const;
  // Normalised two-qubit vector in the {GG, GE, EG, EE} order.
  Eigen::Vector4cd normalized_qubits() const;  // throws zero_state when empty
};

VacuumProjection project_vacuum(const JointState&);

enum class Side : std::uint8_t { A = 0, B = 1 };

// Assignment of each tensor factor to one side of the cut.
struct Bipartition {
  Side atom1 = Side::A;
  Side atom2 = Side::B;
  std::vector<Side> modes;  // length n_modes

  static Bipartition atom1_vs_rest(int n_modes);
};

// Singular values of the amplitude matrix reshaped across the cut,
// non-increasing.  Exactly one value exceeds product_tol iff the (normalised)
// state is a product across the cut.
std::vector<double> schmidt_values(const JointState&, const Bipartition&);

// Reduced state of the two atoms in the {GG, GE, EG, EE} basis.
struct TwoQubitDensity {
  Eigen::Matrix4cd matrix = Eigen::Matrix4cd::Zero();

  // Hermiticity, unit trace and positivity, each within 1e-12.
  void validate() const;
};

// Trace over the field.  Requires vanishing F-level population (above 1e-12
// in amplitude it is an invalid_levels error).
TwoQubitDensity partial_trace_field(const JointState&);

// Wootters concurrence of a (valid) two-qubit density matrix.
double concurrence(const TwoQubitDensity&);

// Fixture serialisation: a JSON array of {atom1, atom2, occupations, re, im}
// records, and 4x4 grids of [re, im] pairs for density matrices.
std::string to_fixture_json(const JointState&);
JointState state_from_fixture_json(const std::string&, int n_modes);
std::string to_fixture_json(const TwoQubitDensity&);
TwoQubitDensity density_from_fixture_json(const std::string&);

}  // namespace lightcone::qstate
