#include "multipole.hpp"

#include <cmath>

#include "errors.hpp"

namespace lightcone::multipole {

void ExpansionPoint::validate() const {
  require(std::isfinite(separation) && std::isfinite(atom_extent),
          Errc::invalid_argument, "expansion point must be finite");
  require(atom_extent > 0.0 && atom_extent < separation, Errc::invalid_argument,
          "atom extent must satisfy 0 < d_A < r");
}

KernelPartials propagator_taylor_coefficients(const ExpansionPoint& point) {
  point.validate();
  const double r = point.separation;
  KernelPartials partials;
  partials.value = 1.0 / (r * r);
  partials.d_z_first = -2.0 / (r * r * r);
  partials.d_z_second = 2.0 / (r * r * r);
  partials.d_t_first = 0.0;
  partials.d_t_second = 0.0;
  partials.d_transverse = 0.0;
  return partials;
}

double multipole_ratio_bound(const ExpansionPoint& point) {
  point.validate();
  return 2.0 * point.atom_extent / point.separation;
}

}  // namespace lightcone::multipole
