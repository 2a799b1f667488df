#include "quantum_state.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace lightcone::qstate {

namespace {

using nlohmann::json;

int qubit_index(Level a1, Level a2) {
  // {GG, GE, EG, EE} ordering.
  return 2 * (a1 == Level::E ? 1 : 0) + (a2 == Level::E ? 1 : 0);
}

// sigma_y x sigma_y, the spin-flip kernel entering the concurrence.
Eigen::Matrix4d spin_flip_kernel() {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s(0, 3) = -1.0;
  s(1, 2) = 1.0;
  s(2, 1) = 1.0;
  s(3, 0) = -1.0;
  return s;
}

}  // namespace

const char* level_name(Level l) {
  switch (l) {
    case Level::G: return "G";
    case Level::E: return "E";
    case Level::F: return "F";
  }
  return "?";
}

Level level_from_name(const std::string& s) {
  if (s == "G") return Level::G;
  if (s == "E") return Level::E;
  if (s == "F") return Level::F;
  raise(Errc::invalid_argument, "unknown atom level '" + s + "'");
}

bool BasisLabel::is_vacuum() const {
  return std::all_of(occupations.begin(), occupations.end(),
                     [](std::uint8_t n) { return n == 0; });
}

JointState::JointState(int n_modes) : n_modes_(n_modes) {
  require(n_modes >= 0, Errc::invalid_argument, "mode count must be >= 0");
}

void JointState::set(const BasisLabel& label, cplx amplitude) {
  require(static_cast<int>(label.occupations.size()) == n_modes_, Errc::length_mismatch,
          "occupation vector length differs from the state's mode count");
  require(std::isfinite(amplitude.real()) && std::isfinite(amplitude.imag()),
          Errc::invalid_argument, "amplitude must be finite");
  normalized_ = false;
  if (amplitude == cplx(0.0, 0.0)) {
    amps_.erase(label);
    return;
  }
  amps_[label] = amplitude;
}

cplx JointState::at(const BasisLabel& label) const {
  auto it = amps_.find(label);
  return it == amps_.end() ? cplx(0.0, 0.0) : it->second;
}

double JointState::norm() const {
  double sum = 0.0;
  for (const auto& [label, amp] : amps_) sum += std::norm(amp);
  return std::sqrt(sum);
}

void JointState::normalize() {
  const double n = norm();
  require(n >= 1e-300, Errc::zero_state, "cannot normalise a (near-)zero state");
  for (auto& [label, amp] : amps_) amp /= n;
  normalized_ = true;
}

double VacuumProjection::sector_weight() const {
  return std::norm(gg) + std::norm(ge) + std::norm(eg) + std::norm(ee);
}

Eigen::Vector4cd VacuumProjection::normalized_qubits() const {
  const double w = sector_weight();
  require(w >= 1e-300, Errc::zero_state, "vacuum sector carries no weight");
  Eigen::Vector4cd v;
  v << gg, ge, eg, ee;
  return v / std::sqrt(w);
}

VacuumProjection project_vacuum(const JointState& state) {
  VacuumProjection out;
  double residual_sq = 0.0;
  for (const auto& [label, amp] : state.amplitudes()) {
    const bool qubit_levels = label.atom1 != Level::F && label.atom2 != Level::F;
    if (qubit_levels && label.is_vacuum()) {
      switch (qubit_index(label.atom1, label.atom2)) {
        case 0: out.gg = amp; break;
        case 1: out.ge = amp; break;
        case 2: out.eg = amp; break;
        case 3: out.ee = amp; break;
      }
    } else {
      residual_sq += std::norm(amp);
    }
  }
  out.residual_norm = std::sqrt(residual_sq);
  out.empty = std::abs(out.gg) < 1e-15 && std::abs(out.ge) < 1e-15 &&
              std::abs(out.eg) < 1e-15 && std::abs(out.ee) < 1e-15;
  return out;
}

Bipartition Bipartition::atom1_vs_rest(int n_modes) {
  Bipartition cut;
  cut.atom1 = Side::A;
  cut.atom2 = Side::B;
  cut.modes.assign(static_cast<std::size_t>(n_modes), Side::B);
  return cut;
}

std::vector<double> schmidt_values(const JointState& state, const Bipartition& cut) {
  require(static_cast<int>(cut.modes.size()) == state.n_modes(), Errc::length_mismatch,
          "bipartition mode assignment length differs from the state's mode count");
  require(!state.amplitudes().empty(), Errc::zero_state, "state has no amplitudes");

  // Composite keys for each side, encoded as byte strings in factor order.
  auto split_key = [&](const BasisLabel& label, Side side) {
    std::vector<std::uint8_t> key;
    if (cut.atom1 == side) key.push_back(static_cast<std::uint8_t>(label.atom1));
    if (cut.atom2 == side) key.push_back(static_cast<std::uint8_t>(label.atom2));
    for (std::size_t m = 0; m < cut.modes.size(); ++m)
      if (cut.modes[m] == side) key.push_back(label.occupations[m]);
    return key;
  };

  std::map<std::vector<std::uint8_t>, int> rows, cols;
  for (const auto& [label, amp] : state.amplitudes()) {
    rows.emplace(split_key(label, Side::A), 0);
    cols.emplace(split_key(label, Side::B), 0);
  }
  int idx = 0;
  for (auto& [key, i] : rows) i = idx++;
  idx = 0;
  for (auto& [key, i] : cols) i = idx++;

  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(rows.size()),
                                              static_cast<Eigen::Index>(cols.size()));
  for (const auto& [label, amp] : state.amplitudes())
    m(rows.at(split_key(label, Side::A)), cols.at(split_key(label, Side::B))) += amp;

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
  const auto& sv = svd.singularValues();
  return {sv.data(), sv.data() + sv.size()};
}

void TwoQubitDensity::validate() const {
  constexpr double tol = 1e-12;
  require(matrix.allFinite(), Errc::invalid_argument, "density matrix must be finite");
  require((matrix - matrix.adjoint()).cwiseAbs().maxCoeff() <= tol,
          Errc::invalid_argument, "density matrix is not Hermitian");
  require(std::abs(matrix.trace() - cplx(1.0, 0.0)) <= tol, Errc::invalid_argument,
          "density matrix trace differs from one");
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(matrix, Eigen::EigenvaluesOnly);
  require(es.eigenvalues().minCoeff() >= -tol, Errc::invalid_argument,
          "density matrix has a negative eigenvalue");
}

TwoQubitDensity partial_trace_field(const JointState& state) {
  // Group terms by field configuration; each group contributes a rank-one
  // block to the reduced state.
  std::map<std::vector<std::uint8_t>, Eigen::Vector4cd> groups;
  for (const auto& [label, amp] : state.amplitudes()) {
    if (label.atom1 == Level::F || label.atom2 == Level::F) {
      require(std::abs(amp) <= 1e-12, Errc::invalid_levels,
              "partial trace requires vanishing F-level population");
      continue;
    }
    auto it = groups.try_emplace(label.occupations, Eigen::Vector4cd::Zero()).first;
    it->second(qubit_index(label.atom1, label.atom2)) += amp;
  }
  TwoQubitDensity rho;
  for (const auto& [occ, v] : groups) rho.matrix += v * v.adjoint();
  return rho;
}

double concurrence(const TwoQubitDensity& rho) {
  static const Eigen::Matrix4d flip = spin_flip_kernel();
  // The four sqrt-eigenvalues of rho * flip * conj(rho) * flip are the
  // singular values of G = sqrt(rho) * flip * conj(sqrt(rho)): G G^dag is
  // similar to that product. Taking sqrt before the flip sandwich keeps the
  // zero channels of near-pure states at machine precision instead of
  // sqrt(machine precision).
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(rho.matrix);
  require(es.info() == Eigen::Success, Errc::numerical_failure,
          "eigen solve failed in concurrence");
  const Eigen::Vector4d root_w = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Eigen::Matrix4cd sqrt_rho =
      es.eigenvectors() * root_w.asDiagonal() * es.eigenvectors().adjoint();
  const Eigen::Matrix4cd g = sqrt_rho * flip * sqrt_rho.conjugate();
  Eigen::JacobiSVD<Eigen::Matrix4cd> svd(g);
  const Eigen::Vector4d sigma = svd.singularValues();
  return std::max(0.0, sigma(0) - sigma(1) - sigma(2) - sigma(3));
}

std::string to_fixture_json(const JointState& state) {
  json records = json::array();
  for (const auto& [label, amp] : state.amplitudes()) {
    json rec;
    rec["atom1"] = level_name(label.atom1);
    rec["atom2"] = level_name(label.atom2);
    rec["occupations"] = label.occupations;
    rec["re"] = amp.real();
    rec["im"] = amp.imag();
    records.push_back(std::move(rec));
  }
  return records.dump();
}

JointState state_from_fixture_json(const std::string& text, int n_modes) {
  json records;
  try {
    records = json::parse(text);
  } catch (const json::exception& e) {
    raise(Errc::invalid_argument, std::string("fixture parse failed: ") + e.what());
  }
  require(records.is_array(), Errc::invalid_argument, "state fixture must be a JSON array");
  try {
    if (n_modes < 0) {
      // Infer the mode count from the first record.
      n_modes = 0;
      if (!records.empty()) {
        n_modes = static_cast<int>(records.front().at("occupations").size());
      }
    }
    JointState state(static_cast<std::size_t>(n_modes));
    for (const auto& rec : records) {
      BasisLabel label;
      label.atom1 = level_from_name(rec.at("atom1").get<std::string>());
      label.atom2 = level_from_name(rec.at("atom2").get<std::string>());
      for (const auto& n : rec.at("occupations")) {
        const int v = n.get<int>();
        require(v >= 0 && v <= 255, Errc::invalid_argument, "occupation out of range");
        label.occupations.push_back(static_cast<std::uint8_t>(v));
      }
      require(state.at(label) == cplx(0.0, 0.0), Errc::invalid_argument,
              "duplicate basis label in fixture");
      state.set(label, cplx(rec.at("re").get<double>(), rec.at("im").get<double>()));
    }
    return state;
  } catch (const json::exception& e) {
    raise(Errc::invalid_argument, std::string("malformed state fixture: ") + e.what());
  }
}

std::string to_fixture_json(const TwoQubitDensity& rho) {
  json grid = json::array();
  for (int i = 0; i < 4; ++i) {
    json row = json::array();
    for (int j = 0; j < 4; ++j)
      row.push_back({rho.matrix(i, j).real(), rho.matrix(i, j).imag()});
    grid.push_back(std::move(row));
  }
  return grid.dump();
}

TwoQubitDensity density_from_fixture_json(const std::string& text) {
  json grid;
  try {
    grid = json::parse(text);
  } catch (const json::exception& e) {
    raise(Errc::invalid_argument, std::string("fixture parse failed: ") + e.what());
  }
  require(grid.is_array() && grid.size() == 4, Errc::invalid_argument,
          "density fixture must be a 4x4 grid");
  TwoQubitDensity rho;
  for (int i = 0; i < 4; ++i) {
    require(grid[i].is_array() && grid[i].size() == 4, Errc::invalid_argument,
            "density fixture must be a 4x4 grid");
    for (int j = 0; j < 4; ++j) {
      const auto& cell = grid[i][j];
      require(cell.is_array() && cell.size() == 2, Errc::invalid_argument,
              "density fixture cells are [re, im] pairs");
      rho.matrix(i, j) = cplx(cell[0].get<double>(), cell[1].get<double>());
    }
  }
  return rho;
}

}  // namespace lightcone::qstate
