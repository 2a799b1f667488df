#include "lattice.hpp"

#include <algorithm>
#include <cmath>

#include "errors.hpp"

namespace lightcone::lattice {

namespace {

constexpr double hermiticity_tol = 1e-12;
constexpr double eigen_residual_tol = 1e-10;
constexpr double norm_drift_tol = 1e-12;
constexpr double intensity_guard = 1e-14;
constexpr double overlap_floor = 0.9;

double mode_norm(double omega, int n_modes) {
  return 1.0 / std::sqrt(2.0 * omega * static_cast<double>(n_modes));
}

}  // namespace

void ModelConfig::validate() const {
  require(n_modes >= 2 && n_modes % 2 == 0, Errc::invalid_argument,
          "n_modes must be even and at least 2");
  require(n_max >= 1, Errc::invalid_argument, "n_max must be at least 1");
  require(std::isfinite(coupling) && coupling >= 0.0, Errc::invalid_argument,
          "coupling must be finite and non-negative");
  require(std::isfinite(omega_a) && omega_a > 0.0, Errc::invalid_argument,
          "omega_a must be positive");
  if (omega_a2) {
    require(std::isfinite(*omega_a2) && *omega_a2 > 0.0, Errc::invalid_argument,
            "omega_a2 must be positive when given");
  }
  const double length = ring_length();
  for (double x : atom_positions) {
    require(std::isfinite(x) && x >= 0.0 && x <= length, Errc::invalid_argument,
            "atom positions must lie on the ring [0, n_modes]");
  }
  if (dressing) {
    require(std::isfinite(dressing->strength) && dressing->strength >= 0.0,
            Errc::invalid_argument, "dressing strength must be non-negative");
    require(std::isfinite(dressing->third_level_gap) && dressing->third_level_gap > 0.0,
            Errc::invalid_argument, "third_level_gap must be positive");
  }
}

std::size_t photon_sector_size(int n_modes, int n_max) {
  // sum_{n=0}^{n_max} C(n_modes + n - 1, n), clamped so callers can compare
  // against dim_cap without overflow.
  long double total = 0.0L;
  for (int n = 0; n <= n_max; ++n) {
    long double c = 1.0L;
    for (int i = 1; i <= n; ++i) {
      c *= static_cast<long double>(n_modes - 1 + i) / static_cast<long double>(i);
    }
    total += c;
    if (total > 1e15L) return std::size_t{1} << 62;
  }
  return static_cast<std::size_t>(total + 0.5L);
}

std::size_t hilbert_dimension(const ModelConfig& cfg) {
  const std::size_t sectors = photon_sector_size(cfg.n_modes, cfg.n_max);
  const std::size_t lv = static_cast<std::size_t>(cfg.levels());
  if (sectors > dim_cap) return std::size_t{1} << 62;
  return lv * lv * sectors;
}

namespace {

void generate_sectors(int n_modes, int n_max,
                      std::vector<std::vector<std::uint8_t>>& out) {
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(n_modes), 0);
  // Depth-first with ascending occupancy per mode emits lexicographic order.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == n_modes) {
      out.push_back(occ);
      return;
    }
    for (int c = 0; c <= remaining; ++c) {
      occ[static_cast<std::size_t>(pos)] = static_cast<std::uint8_t>(c);
      self(self, pos + 1, remaining - c);
    }
    occ[static_cast<std::size_t>(pos)] = 0;
  };
  rec(rec, 0, n_max);
}

int occupation_total(const std::vector<std::uint8_t>& occ) {
  int total = 0;
  for (auto c : occ) total += c;
  return total;
}

}  // namespace

std::shared_ptr<const LatticeModel> LatticeModel::build(const ModelConfig& cfg) {
  cfg.validate();
  const std::size_t dim = hilbert_dimension(cfg);
  require(dim <= dim_cap, Errc::dimension_exceeded,
          "Hilbert dimension exceeds the dense-solver cap");

  auto model = std::shared_ptr<LatticeModel>(new LatticeModel());
  model->config_ = cfg;

  const int n_modes = cfg.n_modes;
  const double length = cfg.ring_length();
  model->wavenumbers_.resize(static_cast<std::size_t>(n_modes));
  model->frequencies_.resize(static_cast<std::size_t>(n_modes));
  for (int m = 0; m < n_modes; ++m) {
    const int j = (m / 2 + 1) * (m % 2 == 0 ? 1 : -1);
    const double k = 2.0 * numerics::pi * static_cast<double>(j) / length;
    model->wavenumbers_[static_cast<std::size_t>(m)] = k;
    model->frequencies_[static_cast<std::size_t>(m)] = std::abs(k);
  }

  generate_sectors(n_modes, cfg.n_max, model->sectors_);
  const std::size_t n_ph = model->sectors_.size();
  const int levels = cfg.levels();

  Eigen::MatrixXcd& h = model->hamiltonian_;
  h = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim),
                             static_cast<Eigen::Index>(dim));

  using qstate::Level;
  const double omega_atom[2] = {cfg.omega_a, cfg.atom2_frequency()};
  const double gap = cfg.dressing ? cfg.dressing->third_level_gap : 0.0;
  const double eps = cfg.dressing ? cfg.dressing->strength : 0.0;

  auto level_energy = [&](int level, int atom) -> double {
    switch (static_cast<Level>(level)) {
      case Level::G: return 0.0;
      case Level::E: return omega_atom[atom];
      case Level::F: return gap;
    }
    return 0.0;
  };

  auto index_of = [&](int l1, int l2, std::size_t p) -> Eigen::Index {
    return static_cast<Eigen::Index>(
        (static_cast<std::size_t>(l1 * levels + l2)) * n_ph + p);
  };

  // Index of the sector reached by changing mode m's occupancy by +-1.
  std::vector<std::uint8_t> scratch;
  auto shifted_sector = [&](std::size_t p, int m, int delta) -> std::size_t {
    scratch = model->sectors_[p];
    scratch[static_cast<std::size_t>(m)] =
        static_cast<std::uint8_t>(scratch[static_cast<std::size_t>(m)] + delta);
    auto it = std::lower_bound(model->sectors_.begin(), model->sectors_.end(), scratch);
    return static_cast<std::size_t>(it - model->sectors_.begin());
  };

  for (std::size_t p = 0; p < n_ph; ++p) {
    const auto& occ = model->sectors_[p];
    const int total = occupation_total(occ);
    double field_energy = 0.0;
    for (int m = 0; m < n_modes; ++m) {
      field_energy += model->frequencies_[static_cast<std::size_t>(m)] *
                      static_cast<double>(occ[static_cast<std::size_t>(m)]);
    }

    for (int l1 = 0; l1 < levels; ++l1) {
      for (int l2 = 0; l2 < levels; ++l2) {
        const Eigen::Index i = index_of(l1, l2, p);
        h(i, i) += field_energy + level_energy(l1, 0) + level_energy(l2, 1);

        // Interaction terms.  Only the level-raising halves are written;
        // each insertion adds the conjugate element, which realizes the
        // corresponding lowering term.
        const int lv[2] = {l1, l2};
        for (int atom = 0; atom < 2; ++atom) {
          const double x = cfg.atom_positions[static_cast<std::size_t>(atom)];
          for (int m = 0; m < n_modes; ++m) {
            const std::size_t mm = static_cast<std::size_t>(m);
            const double f = mode_norm(model->frequencies_[mm], n_modes);
            const double kx = model->wavenumbers_[mm] * x;
            const cplx phase_abs = std::exp(cplx(0.0, kx));    // with a
            const cplx phase_emit = std::conj(phase_abs);      // with a^dag

            auto add = [&](int to_level, int delta, cplx amp) {
              const std::size_t q = shifted_sector(p, m, delta);
              const int n1 = atom == 0 ? to_level : l1;
              const int n2 = atom == 1 ? to_level : l2;
              const Eigen::Index jdx = index_of(n1, n2, q);
              h(jdx, i) += amp;
              h(i, jdx) += std::conj(amp);
            };

            const int nq = occ[mm];
            // G <-> E coupling, strength g_m.
            if (lv[atom] == static_cast<int>(Level::G) && cfg.coupling > 0.0) {
              const double g_m = cfg.coupling * f;
              if (nq > 0) {
                add(static_cast<int>(Level::E), -1,
                    g_m * phase_abs * std::sqrt(static_cast<double>(nq)));
              }
              if (cfg.counter_rotating && total < cfg.n_max) {
                add(static_cast<int>(Level::E), +1,
                    g_m * phase_emit * std::sqrt(static_cast<double>(nq + 1)));
              }
            }
            // F-level dressing, strength eps_m, F <-> G and F <-> E, always
            // with both rotating and counter-rotating parts.
            if (eps > 0.0 && lv[atom] != static_cast<int>(Level::F)) {
              const double e_m = eps * f;
              if (nq > 0) {
                add(static_cast<int>(Level::F), -1,
                    e_m * phase_abs * std::sqrt(static_cast<double>(nq)));
              }
              if (total < cfg.n_max) {
                add(static_cast<int>(Level::F), +1,
                    e_m * phase_emit * std::sqrt(static_cast<double>(nq + 1)));
              }
            }
          }
        }
      }
    }
  }

  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  const double asym = (h - h.adjoint()).cwiseAbs().maxCoeff();
  require(asym <= hermiticity_tol * scale, Errc::numerical_failure,
          "assembled Hamiltonian is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  require(solver.info() == Eigen::Success, Errc::numerical_failure,
          "eigendecomposition did not converge");
  model->eigenvalues_ = solver.eigenvalues();
  model->eigenvectors_ = solver.eigenvectors();

  // Spot-check the decomposition on a few eigenpairs.
  const Eigen::Index d = static_cast<Eigen::Index>(dim);
  const double eigenvalue_scale =
      std::max(1.0, model->eigenvalues_.cwiseAbs().maxCoeff());
  for (Eigen::Index probe : {Eigen::Index(0), d / 4, d / 2, (3 * d) / 4, d - 1}) {
    const auto v = model->eigenvectors_.col(probe);
    const double resid = (h * v - model->eigenvalues_(probe) * v).norm();
    require(resid <= eigen_residual_tol * eigenvalue_scale, Errc::numerical_failure,
            "eigenpair residual exceeds tolerance");
  }

  return model;
}

std::shared_ptr<const LatticeModel> build_model(const ModelConfig& cfg) {
  return LatticeModel::build(cfg);
}

std::size_t LatticeModel::basis_index(qstate::Level l1, qstate::Level l2,
                                      std::span<const std::uint8_t> occ) const {
  const int levels = config_.levels();
  using qstate::Level;
  require(levels == 3 || (l1 != Level::F && l2 != Level::F), Errc::invalid_levels,
          "F level is absent from a two-level model");
  require(occ.size() == static_cast<std::size_t>(config_.n_modes),
          Errc::invalid_argument, "occupation list length must equal n_modes");
  int total = 0;
  for (auto c : occ) total += c;
  require(total <= config_.n_max, Errc::invalid_argument,
          "total occupation exceeds the photon truncation");

  std::vector<std::uint8_t> key(occ.begin(), occ.end());
  auto it = std::lower_bound(sectors_.begin(), sectors_.end(), key);
  require(it != sectors_.end() && *it == key, Errc::invalid_argument,
          "occupation pattern not in the basis");
  const std::size_t p = static_cast<std::size_t>(it - sectors_.begin());
  const std::size_t l1i = static_cast<std::size_t>(l1);
  const std::size_t l2i = static_cast<std::size_t>(l2);
  return (l1i * static_cast<std::size_t>(levels) + l2i) * sectors_.size() + p;
}

LatticeModel::BasisEntry LatticeModel::basis_entry(std::size_t index) const {
  require(index < dimension(), Errc::invalid_argument, "basis index out of range");
  const std::size_t n_ph = sectors_.size();
  const std::size_t p = index % n_ph;
  const std::size_t rest = index / n_ph;
  const int levels = config_.levels();
  const auto l2 = static_cast<qstate::Level>(rest % static_cast<std::size_t>(levels));
  const auto l1 = static_cast<qstate::Level>(rest / static_cast<std::size_t>(levels));
  return BasisEntry{l1, l2, &sectors_[p]};
}

Eigen::VectorXcd LatticeModel::state_vector(const qstate::JointState& state) const {
  require(state.n_modes() == config_.n_modes, Errc::invalid_argument,
          "state mode count must equal n_modes");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dimension()));
  for (const auto& [label, amp] : state.amplitudes()) {
    const std::size_t i = basis_index(label.atom1, label.atom2, label.occupations);
    v(static_cast<Eigen::Index>(i)) = amp;
  }
  return v;
}

qstate::JointState EvolvedState::joint_state() const {
  require(model != nullptr, Errc::invalid_argument, "evolved state has no model");
  qstate::JointState out(static_cast<std::size_t>(model->config().n_modes));
  for (Eigen::Index i = 0; i < coefficients.size(); ++i) {
    const cplx c = coefficients(i);
    if (c == cplx(0.0, 0.0)) continue;
    const auto entry = model->basis_entry(static_cast<std::size_t>(i));
    out.set({entry.atom1, entry.atom2, *entry.occupations}, c);
  }
  return out;
}

EvolvedState evolve(const std::shared_ptr<const LatticeModel>& model,
                    const Eigen::VectorXcd& initial, double t) {
  require(model != nullptr, Errc::invalid_argument, "null model");
  require(std::isfinite(t), Errc::invalid_argument, "time must be finite");
  require(initial.size() == static_cast<Eigen::Index>(model->dimension()),
          Errc::invalid_argument, "initial vector size must equal the dimension");
  const double n0 = initial.norm();
  require(n0 > 0.0, Errc::zero_state, "cannot evolve the zero state");

  const auto& vecs = model->eigenvectors();
  Eigen::VectorXcd c = vecs.adjoint() * initial;
  const auto& vals = model->eigenvalues();
  for (Eigen::Index i = 0; i < c.size(); ++i) {
    c(i) *= std::exp(cplx(0.0, -vals(i) * t));
  }
  EvolvedState out;
  out.model = model;
  out.coefficients = vecs * c;
  out.time = t;

  const double drift = std::abs(out.coefficients.norm() - n0);
  require(drift <= norm_drift_tol * n0, Errc::numerical_failure,
          "evolution norm drift exceeds tolerance");
  return out;
}

EvolvedState evolve(const std::shared_ptr<const LatticeModel>& model,
                    const qstate::JointState& initial, double t) {
  require(model != nullptr, Errc::invalid_argument, "null model");
  return evolve(model, model->state_vector(initial), t);
}

cplx transfer_amplitude(const EvolvedState& evolved) {
  require(evolved.model != nullptr, Errc::invalid_argument, "evolved state has no model");
  const auto& model = *evolved.model;
  const std::vector<std::uint8_t> vac(
      static_cast<std::size_t>(model.config().n_modes), 0);
  const std::size_t i = model.basis_index(qstate::Level::G, qstate::Level::E, vac);
  return evolved.coefficients(static_cast<Eigen::Index>(i));
}

double excitation_probability(const EvolvedState& evolved, int atom_index) {
  require(evolved.model != nullptr, Errc::invalid_argument, "evolved state has no model");
  require(atom_index == 0 || atom_index == 1, Errc::invalid_argument,
          "atom_index must be 0 or 1");
  const auto& model = *evolved.model;
  double p = 0.0;
  for (Eigen::Index i = 0; i < evolved.coefficients.size(); ++i) {
    const auto entry = model.basis_entry(static_cast<std::size_t>(i));
    const qstate::Level level = atom_index == 0 ? entry.atom1 : entry.atom2;
    if (level == qstate::Level::E) {
      p += std::norm(evolved.coefficients(i));
    }
  }
  return p;
}

namespace {

// E^+(x) |psi>: one photon removed, weighted by f_m e^{i k_m x} sqrt(n_m).
Eigen::VectorXcd apply_positive_field(const EvolvedState& evolved, double x) {
  const auto& model = *evolved.model;
  const auto& cfg = model.config();
  const int n_modes = cfg.n_modes;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(evolved.coefficients.size());
  std::vector<std::uint8_t> lowered;
  for (Eigen::Index i = 0; i < evolved.coefficients.size(); ++i) {
    const cplx c = evolved.coefficients(i);
    if (c == cplx(0.0, 0.0)) continue;
    const auto entry = model.basis_entry(static_cast<std::size_t>(i));
    const auto& occ = *entry.occupations;
    for (int m = 0; m < n_modes; ++m) {
      const std::size_t mm = static_cast<std::size_t>(m);
      if (occ[mm] == 0) continue;
      lowered = occ;
      --lowered[mm];
      const std::size_t j = model.basis_index(entry.atom1, entry.atom2, lowered);
      const double w = model.mode_frequencies()[mm];
      const double f = mode_norm(w, n_modes);
      const double kx = model.mode_wavenumbers()[mm] * x;
      out(static_cast<Eigen::Index>(j)) +=
          c * f * std::exp(cplx(0.0, kx)) * std::sqrt(static_cast<double>(occ[mm]));
    }
  }
  return out;
}

}  // namespace

double glauber_detection(const EvolvedState& evolved, double position) {
  require(evolved.model != nullptr, Errc::invalid_argument, "evolved state has no model");
  const double length = evolved.model->config().ring_length();
  require(std::isfinite(position) && position >= 0.0 && position <= length,
          Errc::invalid_argument, "detector position must lie on the ring");
  return apply_positive_field(evolved, position).squaredNorm();
}

double g2_coherence(const EvolvedState& evolved, double x1, double x2) {
  require(evolved.model != nullptr, Errc::invalid_argument, "evolved state has no model");
  const double length = evolved.model->config().ring_length();
  for (double x : {x1, x2}) {
    require(std::isfinite(x) && x >= 0.0 && x <= length, Errc::invalid_argument,
            "detector position must lie on the ring");
  }
  const Eigen::VectorXcd w1 = apply_positive_field(evolved, x1);
  const double i1 = w1.squaredNorm();
  const double i2 = apply_positive_field(evolved, x2).squaredNorm();
  require(i1 > intensity_guard && i2 > intensity_guard, Errc::denominator_underflow,
          "field intensity below the coherence denominator guard");

  EvolvedState lowered;
  lowered.model = evolved.model;
  lowered.coefficients = w1;
  lowered.time = evolved.time;
  const double numerator = apply_positive_field(lowered, x2).squaredNorm();
  return numerator / (i1 * i2);
}

CausalityScan causality_scan(const ModelConfig& base,
                             std::span<const double> couplings, double time) {
  require(couplings.size() >= 2, Errc::invalid_argument,
          "need at least two couplings to fit exponents");
  require(std::isfinite(time) && time > 0.0, Errc::invalid_argument,
          "scan time must be positive");

  using qstate::Level;
  CausalityScan scan;
  std::vector<double> gs, bs, dps;
  for (double g : couplings) {
    require(std::isfinite(g) && g > 0.0, Errc::invalid_argument,
            "scan couplings must be positive");
    ModelConfig cfg = base;
    cfg.coupling = g;
    auto model = build_model(cfg);
    const auto dim = static_cast<Eigen::Index>(model->dimension());
    const std::vector<std::uint8_t> vac(static_cast<std::size_t>(cfg.n_modes), 0);

    Eigen::VectorXcd excited = Eigen::VectorXcd::Zero(dim);
    excited(static_cast<Eigen::Index>(
        model->basis_index(Level::E, Level::G, vac))) = 1.0;
    const auto ev_e = evolve(model, excited, time);
    const cplx b = transfer_amplitude(ev_e);
    const double p2_e = excitation_probability(ev_e, 1);

    Eigen::VectorXcd ground = Eigen::VectorXcd::Zero(dim);
    ground(static_cast<Eigen::Index>(
        model->basis_index(Level::G, Level::G, vac))) = 1.0;
    const auto ev_g = evolve(model, ground, time);
    const double p2_g = excitation_probability(ev_g, 1);

    const double dp2 = std::abs(p2_e - p2_g);
    scan.rows.push_back({g, "transfer_amplitude", b});
    scan.rows.push_back({g, "delta_p2", cplx(dp2, 0.0)});
    gs.push_back(g);
    bs.push_back(std::abs(b));
    dps.push_back(dp2);
  }

  scan.amplitude_fit = numerics::loglog_fit(gs, bs);
  scan.delta_p2_fit = numerics::loglog_fit(gs, dps);
  return scan;
}

namespace {

// Eigenvector of the model with the largest weight on basis state `target`,
// phase-fixed so that component is real positive.
Eigen::VectorXcd nearest_eigenstate(const LatticeModel& model, std::size_t target,
                                    double& overlap_out) {
  const auto& vecs = model.eigenvectors();
  const auto row = static_cast<Eigen::Index>(target);
  Eigen::Index best = 0;
  double best_mag = -1.0;
  for (Eigen::Index col = 0; col < vecs.cols(); ++col) {
    const double mag = std::abs(vecs(row, col));
    if (mag > best_mag) {
      best_mag = mag;
      best = col;
    }
  }
  require(best_mag >= overlap_floor, Errc::eigenstate_ambiguity,
          "no eigenstate has dominant overlap with the requested basis state");
  Eigen::VectorXcd v = vecs.col(best);
  const cplx comp = v(row);
  v *= std::conj(comp) / std::abs(comp);
  overlap_out = best_mag;
  return v;
}

}  // namespace

DressedCompare dressed_amplitude_compare(const ModelConfig& base,
                                         std::span<const double> epsilons,
                                         double time) {
  require(base.dressing.has_value(), Errc::invalid_argument,
          "dressed comparison needs a dressing configuration");
  require(!epsilons.empty(), Errc::invalid_argument, "need at least one epsilon");
  require(std::isfinite(time) && time > 0.0, Errc::invalid_argument,
          "comparison time must be positive");
  require(base.coupling > 0.0, Errc::invalid_argument,
          "comparison needs a nonzero transition coupling");

  using qstate::Level;
  DressedCompare out;
  std::vector<double> log_eps_x, log_rel_y;
  for (double eps : epsilons) {
    require(std::isfinite(eps) && eps >= 0.0, Errc::invalid_argument,
            "dressing strengths must be non-negative");
    ModelConfig cfg_on = base;
    cfg_on.dressing->strength = eps;
    auto model_on = build_model(cfg_on);

    const auto dim = static_cast<Eigen::Index>(model_on->dimension());
    const std::vector<std::uint8_t> vac(static_cast<std::size_t>(base.n_modes), 0);
    const std::size_t idx_i = model_on->basis_index(Level::E, Level::G, vac);
    const std::size_t idx_f = model_on->basis_index(Level::G, Level::E, vac);

    Eigen::VectorXcd bare_i = Eigen::VectorXcd::Zero(dim);
    bare_i(static_cast<Eigen::Index>(idx_i)) = 1.0;

    Eigen::VectorXcd dressed_i, dressed_f;
    double overlap = 1.0;
    if (eps == 0.0) {
      // The switched-off Hamiltonian is diagonal; dressed == bare exactly.
      dressed_i = bare_i;
      dressed_f = Eigen::VectorXcd::Zero(dim);
      dressed_f(static_cast<Eigen::Index>(idx_f)) = 1.0;
    } else {
      ModelConfig cfg_off = cfg_on;
      cfg_off.coupling = 0.0;
      auto model_off = build_model(cfg_off);
      double o_i = 0.0, o_f = 0.0;
      dressed_i = nearest_eigenstate(*model_off, idx_i, o_i);
      dressed_f = nearest_eigenstate(*model_off, idx_f, o_f);
      overlap = std::min(o_i, o_f);
    }

    const auto ev_dressed = evolve(model_on, dressed_i, time);
    const cplx b_dressed = dressed_f.dot(ev_dressed.coefficients);
    const auto ev_bare = evolve(model_on, bare_i, time);
    const cplx b_bare = ev_bare.coefficients(static_cast<Eigen::Index>(idx_f));
    require(std::abs(b_bare) > 0.0, Errc::numerical_failure,
            "bare transfer amplitude vanished; cannot form a relative difference");

    const double rel = std::abs(b_dressed - b_bare) / std::abs(b_bare);
    out.points.push_back({eps, b_dressed, b_bare, rel, overlap});
    if (eps > 0.0 && rel > 0.0) {
      log_eps_x.push_back(eps);
      log_rel_y.push_back(rel);
    }
  }

  if (log_eps_x.size() >= 2) {
    out.fit = numerics::loglog_fit(log_eps_x, log_rel_y);
  }
  return out;
}

}  // namespace lightcone::lattice
