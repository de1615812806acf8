#pragma once

#include <Eigen/Sparse>
#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "gravham/common.hpp"
#include "gravham/field_point.hpp"

namespace gravham {

// One retained metric component g_ab sampled on [lo, hi] with `points`
// uniform nodes.  Spatial-diagonal components keep a positive margin.
struct GridAxis {
  int a = 1, b = 1;
  double lo = 0.2, hi = 1.8;
  int points = 64;

  double spacing() const { return (hi - lo) / (points - 1); }
  std::string label() const { return "g" + std::to_string(a) + std::to_string(b); }
};

// Tensor-product configuration grid over the retained components.
// Axis 0 is the slowest-varying index in the flat ordering.
class ConfigGrid {
 public:
  explicit ConfigGrid(std::vector<GridAxis> axes);

  int axis_count() const { return static_cast<int>(axes_.size()); }
  const GridAxis& axis(int i) const { return axes_[i]; }
  long total_points() const { return total_; }
  double cell_volume() const;

  long stride(int axis) const { return strides_[axis]; }
  std::vector<int> unflatten(long idx) const;
  long flatten(const std::vector<int>& multi) const;
  double coordinate(int axis, int node) const;
  std::vector<double> point(long idx) const;
  // true when every axis index keeps `margin` nodes from both ends
  bool interior(long idx, int margin = 1) const;

 private:
  std::vector<GridAxis> axes_;
  std::vector<long> strides_;
  long total_ = 0;
};

struct WaveFunction {
  ConfigGrid grid;
  Eigen::VectorXcd amp;

  double norm_sq() const;  // sum |psi|^2 * cell volume
  double norm() const;
};

// Gaussian packet exp(-(x-c)^2/(4 sigma^2) + i k x) per axis, unit norm.
WaveFunction gaussian_packet(const ConfigGrid& grid, const std::vector<double>& center,
                             const std::vector<double>& sigma, const std::vector<double>& wavenumber);

using OperatorMatrix = Eigen::SparseMatrix<std::complex<double>>;

// Per-axis gauge shift f(g-coordinates); the vector is parallel to the grid
// axes.  Empty vector means f == 0.
using GaugeFunctions = std::vector<std::function<double(const std::vector<double>&)>>;

// Diagonal multiplication by the axis coordinate.
OperatorMatrix position_operator(const ConfigGrid& grid, int axis);

// pi-hat = -i hbar (D + f) with the antisymmetric central difference D along
// the axis (implicit zero beyond the ends).  Off-diagonal components carry
// the symmetric-pair derivative weight 1/2.  A supplied gauge must satisfy
// the cross-derivative symmetry test to 1e-8.
OperatorMatrix momentum_operator(const ConfigGrid& grid, int axis, double hbar = 1.0,
                                 const GaugeFunctions& gauge = {});

// max over retained axis pairs and a smooth test set of
// ||(g-hat pi-hat - pi-hat g-hat) psi - i hbar Delta psi|| / ||psi||,
// interior-restricted; second order in the spacing.
double quantum_bracket_check(const ConfigGrid& grid, double hbar = 1.0);

struct HamiltonianInfo {
  double hermiticity_defect = 0.0;  // max |H - adjoint(H)| entry
  bool frozen = true;
  bool drift_present = false;
  double kinetic_coefficient_11 = 0.0;  // one-variable reduction diagnostic
};

// Scalar Hamiltonian operator on the grid:
//   H = -hbar^2 I_mnpq d2/dg_pq dg_mn + i hbar sqrt(-g) (I C1)_mn d/dg_mn
//       + (1/4)(-g)[I C2 C1 - g^00 BDD]
// with coefficients taken from the context point (frozen, default) or
// re-evaluated at each grid point's metric (frozen = false; the printed
// coefficient-times-derivative ordering is kept, so the matrix may lose
// Hermiticity — reported in `info`, never symmetrized away).
OperatorMatrix build_hamiltonian_operator(const ConfigGrid& grid,
                                          const FieldPoint<double>& context,
                                          double hbar = 1.0, bool frozen = true,
                                          HamiltonianInfo* info = nullptr);

struct QuantumEvolveOptions {
  double norm_drift_per_step = 1e-8;  // relative; exceeding throws NonUnitaryDrift
  int record_stride = 100;
};

struct QuantumTrajectory {
  WaveFunction state;
  std::vector<double> norms;  // per step, including step 0
  std::vector<Eigen::VectorXcd> snapshots;
  std::vector<int> snapshot_steps;
};

// Cayley / Crank-Nicolson stepping of i hbar dPsi/dtau = H Psi; the implicit
// matrix is factored once.  Unconditionally stable for Hermitian H of either
// signature.
QuantumTrajectory evolve_schrodinger(const WaveFunction& psi0, const OperatorMatrix& H,
                                     double dtau, int steps, double hbar = 1.0,
                                     const QuantumEvolveOptions& opts = {});

// || i hbar dPsi/dg_0sigma - c Psi || / ||Psi|| on interior nodes, where the
// frozen coefficient c = (1/2) sqrt(-g) B~^((0 sigma)0|mn k) g_mn,k comes
// from the context point.  The grid axis must hold a temporal-row component.
double primary_constraint_apply(const WaveFunction& psi, int axis,
                                const FieldPoint<double>& context, double hbar = 1.0);

// (i/hbar) [C, H]; iterating yields the consistency chain.
OperatorMatrix constraint_chain_step(const OperatorMatrix& C, const OperatorMatrix& H,
                                     double hbar = 1.0);

// Residual of the uncontracted tensor equation per component:
//   || (pi-hat^pq pi-hat^mn + S-hat^pqmn) Psi - (E^pqmn/(d-1)^2) H Psi || / ||Psi||
// with frozen coefficients; contracting with I_mnpq collapses to the scalar
// equation, so the I-weighted combination vanishes by construction.
DenseTensor<double> tensor_equation_residual(const ConfigGrid& grid,
                                             const FieldPoint<double>& context,
                                             const WaveFunction& psi, double hbar = 1.0,
                                             double* max_residual = nullptr);

}  // namespace gravham
