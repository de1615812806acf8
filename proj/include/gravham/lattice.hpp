#pragma once

#include <utility>
#include <vector>

#include "gravham/field_point.hpp"

// 1+1D lattice laboratory: one spatial axis (x^1), full d=4 index structure,
// fields uniform along the suppressed directions. The temporal metric row is
// gauge-fixed to its flat values and held there; only the six spatial
// components g_mn and their momenta evolve.

namespace gravham {

enum class Boundary { Periodic, Fixed };

// Symmetric-pair layout for the spatial block: 11,12,13,22,23,33.
inline constexpr int kSpatialPairs = 6;
inline constexpr int kPairA[kSpatialPairs] = {1, 1, 1, 2, 2, 3};
inline constexpr int kPairB[kSpatialPairs] = {1, 2, 3, 2, 3, 3};

struct LatticeField {
  int n = 0;
  double dx = 0.0;
  Boundary boundary = Boundary::Periodic;
  std::vector<double> g;   // n * 6, spatial metric components per site
  std::vector<double> pi;  // n * 6, conjugate momenta per site

  double& g_at(int site, int pair) { return g[site * kSpatialPairs + pair]; }
  double g_at(int site, int pair) const { return g[site * kSpatialPairs + pair]; }
  double& pi_at(int site, int pair) { return pi[site * kSpatialPairs + pair]; }
  double pi_at(int site, int pair) const { return pi[site * kSpatialPairs + pair]; }
};

LatticeField make_flat(int n, double dx, Boundary boundary = Boundary::Periodic);

// Flat lattice with a single-site momentum kick pi^11 = amplitude at the
// center (or the given site).
LatticeField make_kick(int n, double dx, double amplitude = 0.01,
                       Boundary boundary = Boundary::Periodic, int site = -1);

// First-derivative stencil for site j: list of (site, coefficient) such that
// g_mn,1(j) = sum c * g_mn(site). Central in the interior (and everywhere on
// periodic lattices), second-order one-sided at fixed boundaries.
std::vector<std::pair<int, double>> deriv_stencil(const LatticeField& lat, int j);

// Full canonical field point at a site, with the gauge-fixed temporal row
// and d_spatial synchronized from the stencil. Throws MetricDegenerated if
// the site metric stops being invertible/Lorentzian.
FieldPoint<double> field_point_at(const LatticeField& lat, int site);

// H_c per site.
std::vector<double> energy_density(const LatticeField& lat);
double total_energy(const LatticeField& lat);

// Discrete divergence theorem for the flux G^1: volume integral of div G
// against the surface term. Periodic: both vanish identically (telescoping
// sum, no boundary). Fixed: trapezoid-weighted volume sum vs G(right)-G(left),
// equal exactly for linear fields and to O(dx^2) for smooth ones.
std::pair<double, double> gauss_energy(const LatticeField& lat);

struct EvolveOptions {
  double cfl_factor = 0.2;     // require dt <= cfl_factor * dx
  double midpoint_tol = 1e-13; // fixed-point stop for the implicit stage
  int max_iterations = 60;
  int record_stride = 20;      // snapshot every this many steps
  double drift_guard = 0.02;   // abort when |H - H0| exceeds this (absolute,
                               // scaled by max(1,|H0|))
};

struct Snapshot {
  int step;
  std::vector<double> g, pi, density;
};

struct EvolveResult {
  LatticeField state;                // final state
  std::vector<double> energy;        // total H_c after every step (index 0 = initial)
  std::vector<Snapshot> snapshots;   // every record_stride steps (plus initial/final)
  int fp_iterations_max = 0;         // worst fixed-point iteration count
};

// Implicit-midpoint (symplectic, time-reversible) integration of
//   dg/dt = {g, H},  dpi/dt = {pi, H},  H = sum_sites H_c
// with forces from forward-mode differentiation of H_c; neighbor coupling
// enters through the derivative stencils. g_0sigma stay at their gauge-fixed
// values throughout. Fixed boundaries clamp the end sites.
EvolveResult hamilton_evolve(const LatticeField& lat, double dt, int steps,
                             const EvolveOptions& opts = {});

struct FrontInfo {
  int step;
  double position;              // site index of the front (lattice units)
  double energy_fraction;       // energy inside the window around the front
  double behind_front_variance; // variance of g components behind the window
};

// Per-snapshot front diagnostics for a localized perturbation. threshold is
// the fraction of the peak density a site must carry to count as the front;
// threshold <= 0 means the window is the whole lattice (fraction 1 by
// construction). Throws NoFront when no snapshot carries energy.
std::vector<FrontInfo> front_diagnostics(const EvolveResult& traj, double threshold = 0.01,
                                         int window = 5);

}  // namespace gravham
