#pragma once

// First-order Taylor data for the far-zone interaction kernel
//
//   f(r1, t1; r2, t2) = 1 / (|r1 - r2|^2 - (t1 - t2)^2)
//
// expanded about the atom centers (separation r along z, equal times).  The
// only nonvanishing first-order partials are the longitudinal ones, so the
// first-order term is at most a factor 2*d_A/r of the zeroth-order term when
// the electron coordinates stay within a ball of radius d_A around each
// center.  That ratio is the dipole-approximation validity certificate.

namespace lightcone::multipole {

struct ExpansionPoint {
  double separation = 1.0;    // r, center-to-center distance
  double atom_extent = 1e-4;  // d_A, characteristic size of each atom

  void validate() const;  // requires 0 < atom_extent < separation
};

struct KernelPartials {
  double value;         // f at the expansion point: 1/r^2
  double d_z_first;     // -2/r^3, longitudinal partial at the first point
  double d_z_second;    // +2/r^3, longitudinal partial at the second point
  double d_t_first;     // 0
  double d_t_second;    // 0
  double d_transverse;  // 0, shared by all four transverse partials
};

KernelPartials propagator_taylor_coefficients(const ExpansionPoint&);

// Worst-case |first-order term| / |zeroth-order term| = 2 * d_A / r.
double multipole_ratio_bound(const ExpansionPoint&);

}  // namespace lightcone::multipole
