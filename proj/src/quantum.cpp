#include "gravham/quantum.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>

#include "gravham/grav_tensors.hpp"
#include "gravham/metric.hpp"

namespace gravham {

namespace {

using Complex = std::complex<double>;
using Triplets = std::vector<Eigen::Triplet<Complex>>;

constexpr long kMaxGridPoints = 1L << 22;

}  // namespace

ConfigGrid::ConfigGrid(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
  if (axes_.empty()) throw BadInput("grid needs at least one axis");
  total_ = 1;
  for (const auto& ax : axes_) {
    if (ax.points < 8) throw BadInput("each axis needs at least 8 points");
    if (!(ax.lo < ax.hi)) throw BadInput("axis range must have lo < hi");
    if (ax.a < 0 || ax.b < 0 || ax.a >= kMaxDim || ax.b >= kMaxDim)
      throw BadInput("axis component index out of range");
    if (ax.a == ax.b && ax.a > 0 && ax.lo <= 0.0)
      throw BadInput("spatial-diagonal axis needs a positive lower margin");
    total_ *= ax.points;
    if (total_ > kMaxGridPoints) throw BadInput("grid too large");
  }
  strides_.assign(axes_.size(), 1);
  for (int i = static_cast<int>(axes_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * axes_[i + 1].points;
}

double ConfigGrid::cell_volume() const {
  double v = 1.0;
  for (const auto& ax : axes_) v *= ax.spacing();
  return v;
}

std::vector<int> ConfigGrid::unflatten(long idx) const {
  std::vector<int> multi(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) {
    multi[i] = static_cast<int>(idx / strides_[i]);
    idx %= strides_[i];
  }
  return multi;
}

long ConfigGrid::flatten(const std::vector<int>& multi) const {
  long idx = 0;
  for (std::size_t i = 0; i < axes_.size(); ++i) idx += multi[i] * strides_[i];
  return idx;
}

double ConfigGrid::coordinate(int axis, int node) const {
  return axes_[axis].lo + node * axes_[axis].spacing();
}

std::vector<double> ConfigGrid::point(long idx) const {
  std::vector<int> multi = unflatten(idx);
  std::vector<double> x(axes_.size());
  for (std::size_t i = 0; i < axes_.size(); ++i) x[i] = coordinate(static_cast<int>(i), multi[i]);
  return x;
}

bool ConfigGrid::interior(long idx, int margin) const {
  std::vector<int> multi = unflatten(idx);
  for (std::size_t i = 0; i < axes_.size(); ++i)
    if (multi[i] < margin || multi[i] >= axes_[i].points - margin) return false;
  return true;
}

double WaveFunction::norm_sq() const {
  double s = 0.0;
  for (long i = 0; i < amp.size(); ++i) s += std::norm(amp[i]);
  return s * grid.cell_volume();
}

double WaveFunction::norm() const { return std::sqrt(norm_sq()); }

WaveFunction gaussian_packet(const ConfigGrid& grid, const std::vector<double>& center,
                             const std::vector<double>& sigma,
                             const std::vector<double>& wavenumber) {
  const std::size_t na = static_cast<std::size_t>(grid.axis_count());
  if (center.size() != na || sigma.size() != na || wavenumber.size() != na)
    throw BadInput("packet parameter lists must match the axis count");
  for (double s : sigma)
    if (s <= 0.0) throw BadInput("packet widths must be positive");
  WaveFunction psi{grid, Eigen::VectorXcd(grid.total_points())};
  for (long idx = 0; idx < grid.total_points(); ++idx) {
    std::vector<double> x = grid.point(idx);
    double logmag = 0.0, phase = 0.0;
    for (std::size_t a = 0; a < na; ++a) {
      double dx = x[a] - center[a];
      logmag -= dx * dx / (4.0 * sigma[a] * sigma[a]);
      phase += wavenumber[a] * x[a];
    }
    psi.amp[idx] = std::exp(Complex(logmag, phase));
  }
  double n = psi.norm();
  if (n <= 0.0) throw BadInput("packet has zero norm on this grid");
  psi.amp /= n;
  return psi;
}

OperatorMatrix position_operator(const ConfigGrid& grid, int axis) {
  if (axis < 0 || axis >= grid.axis_count()) throw BadInput("axis out of range");
  OperatorMatrix op(grid.total_points(), grid.total_points());
  Triplets trip;
  trip.reserve(grid.total_points());
  for (long idx = 0; idx < grid.total_points(); ++idx) {
    std::vector<int> multi = grid.unflatten(idx);
    trip.emplace_back(idx, idx, Complex(grid.coordinate(axis, multi[axis]), 0.0));
  }
  op.setFromTriplets(trip.begin(), trip.end());
  return op;
}

namespace {

// Antisymmetric central first difference along one axis; nodes beyond the
// ends contribute zero.
void add_first_difference(const ConfigGrid& grid, int axis, Complex scale, Triplets& trip) {
  const double inv2h = 1.0 / (2.0 * grid.axis(axis).spacing());
  const long stride = grid.stride(axis);
  const int n = grid.axis(axis).points;
  for (long idx = 0; idx < grid.total_points(); ++idx) {
    int node = grid.unflatten(idx)[axis];
    if (node + 1 < n) trip.emplace_back(idx, idx + stride, scale * inv2h);
    if (node - 1 >= 0) trip.emplace_back(idx, idx - stride, -scale * inv2h);
  }
}

// Standard 3-point second difference along one axis, implicit zero ghosts.
void add_second_difference(const ConfigGrid& grid, int axis, Complex scale, Triplets& trip) {
  const double h = grid.axis(axis).spacing();
  const double invh2 = 1.0 / (h * h);
  const long stride = grid.stride(axis);
  const int n = grid.axis(axis).points;
  for (long idx = 0; idx < grid.total_points(); ++idx) {
    int node = grid.unflatten(idx)[axis];
    trip.emplace_back(idx, idx, -2.0 * scale * invh2);
    if (node + 1 < n) trip.emplace_back(idx, idx + stride, scale * invh2);
    if (node - 1 >= 0) trip.emplace_back(idx, idx - stride, scale * invh2);
  }
}

// Mixed second derivative as the product of the two central differences.
void add_cross_difference(const ConfigGrid& grid, int a, int b, Complex scale, Triplets& trip) {
  const Complex w = scale / (4.0 * grid.axis(a).spacing() * grid.axis(b).spacing());
  const long sa = grid.stride(a), sb = grid.stride(b);
  const int na = grid.axis(a).points, nb = grid.axis(b).points;
  for (long idx = 0; idx < grid.total_points(); ++idx) {
    std::vector<int> multi = grid.unflatten(idx);
    int ia = multi[a], ib = multi[b];
    for (int da = -1; da <= 1; da += 2)
      for (int db = -1; db <= 1; db += 2) {
        if (ia + da < 0 || ia + da >= na || ib + db < 0 || ib + db >= nb) continue;
        trip.emplace_back(idx, idx + da * sa + db * sb, Complex(da * db, 0) * w);
      }
  }
}

void check_gauge_integrability(const ConfigGrid& grid, const GaugeFunctions& gauge) {
  if (gauge.empty()) return;
  if (static_cast<int>(gauge.size()) != grid.axis_count())
    throw BadInput("gauge function list must match the axis count");
  const double tol = 1e-8;
  // Cross-derivative symmetry sampled on a coarse sublattice.
  for (int a = 0; a < grid.axis_count(); ++a)
    for (int b = a + 1; b < grid.axis_count(); ++b) {
      double ha = 0.5 * grid.axis(a).spacing(), hb = 0.5 * grid.axis(b).spacing();
      long step = std::max(1L, grid.total_points() / 64);
      for (long idx = 0; idx < grid.total_points(); idx += step) {
        if (!grid.interior(idx)) continue;
        std::vector<double> x = grid.point(idx);
        auto dfd = [&](int which, int along, double h) {
          std::vector<double> xp = x, xm = x;
          xp[along] += h;
          xm[along] -= h;
          return (gauge[which](xp) - gauge[which](xm)) / (2.0 * h);
        };
        double cross_ab = dfd(a, b, hb);
        double cross_ba = dfd(b, a, ha);
        if (std::abs(cross_ab - cross_ba) > tol)
          throw NonIntegrableGauge("gauge cross-derivatives differ by " +
                                   std::to_string(std::abs(cross_ab - cross_ba)));
      }
    }
}

}  // namespace

OperatorMatrix momentum_operator(const ConfigGrid& grid, int axis, double hbar,
                                 const GaugeFunctions& gauge) {
  if (axis < 0 || axis >= grid.axis_count()) throw BadInput("axis out of range");
  check_gauge_integrability(grid, gauge);
  const GridAxis& ax = grid.axis(axis);
  // Symmetric-pair entry derivative: off-diagonal components pick up 1/2.
  const double weight = ax.a == ax.b ? 1.0 : 0.5;
  Triplets trip;
  trip.reserve(grid.total_points() * 3);
  add_first_difference(grid, axis, Complex(0.0, -hbar * weight), trip);
  if (!gauge.empty()) {
    for (long idx = 0; idx < grid.total_points(); ++idx)
      trip.emplace_back(idx, idx, Complex(0.0, -hbar * gauge[axis](grid.point(idx))));
  }
  OperatorMatrix op(grid.total_points(), grid.total_points());
  op.setFromTriplets(trip.begin(), trip.end());
  return op;
}

double quantum_bracket_check(const ConfigGrid& grid, double hbar) {
  const int na = grid.axis_count();
  std::vector<OperatorMatrix> pos(na), mom(na);
  for (int a = 0; a < na; ++a) {
    pos[a] = position_operator(grid, a);
    mom[a] = momentum_operator(grid, a, hbar);
  }
  // Smooth test set: three packets with different widths and wavenumbers.
  std::vector<WaveFunction> tests;
  std::vector<double> center(na), sigma(na), k(na);
  for (int a = 0; a < na; ++a) center[a] = 0.5 * (grid.axis(a).lo + grid.axis(a).hi);
  for (int variant = 0; variant < 3; ++variant) {
    for (int a = 0; a < na; ++a) {
      double span = grid.axis(a).hi - grid.axis(a).lo;
      sigma[a] = span * (0.10 + 0.04 * variant);
      k[a] = (variant - 1) * 2.0 / span;
    }
    tests.push_back(gaussian_packet(grid, center, sigma, k));
  }

  double worst = 0.0;
  const double dv = grid.cell_volume();
  for (int a = 0; a < na; ++a)
    for (int b = 0; b < na; ++b) {
      const GridAxis &va = grid.axis(a), &vb = grid.axis(b);
      double delta = 0.0;  // Delta^{(vb)}_{(va)} between the retained pairs
      if (va.a == vb.a && va.b == vb.b) delta = va.a == va.b ? 1.0 : 0.5;
      OperatorMatrix comm = pos[a] * mom[b] - mom[b] * pos[a];
      for (const auto& psi : tests) {
        Eigen::VectorXcd r = comm * psi.amp - Complex(0.0, hbar * delta) * psi.amp;
        double num = 0.0;
        for (long idx = 0; idx < grid.total_points(); ++idx)
          if (grid.interior(idx)) num += std::norm(r[idx]);
        worst = std::max(worst, std::sqrt(num * dv) / psi.norm());
      }
    }
  return worst;
}

namespace {

// Frozen-coefficient bundle entering the scalar operator.
struct ScalarCoefficients {
  std::vector<double> kinetic;  // axis x axis, I_{aa bb}
  std::vector<double> drift;    // per axis, sqrt(-g) (I C1)_{aa}
  double potential = 0.0;
};

ScalarCoefficients scalar_coefficients(const FieldPoint<double>& p,
                                       const std::vector<GridAxis>& axes) {
  const int d = p.metric.d;
  ScalarCoefficients out;
  const int na = static_cast<int>(axes.size());
  out.kinetic.assign(na * na, 0.0);
  out.drift.assign(na, 0.0);
  for (int i = 0; i < na; ++i)
    for (int j = 0; j < na; ++j)
      out.kinetic[i * na + j] = i_component(p.metric, axes[i].a, axes[i].a, axes[j].a, axes[j].a);

  auto dc = detail::contract_derivs(p);
  const double sg = p.metric.sqrt_neg_det;
  for (int i = 0; i < na; ++i) {
    double ic1 = 0.0;
    for (int pp = 1; pp < d; ++pp)
      for (int q = 1; q < d; ++q)
        ic1 += i_component(p.metric, axes[i].a, axes[i].a, pp, q) * dc.c1[pp * d + q];
    out.drift[i] = sg * ic1;
  }
  double ic2c1 = 0.0;
  for (int m = 1; m < d; ++m)
    for (int n = 1; n < d; ++n)
      for (int pp = 1; pp < d; ++pp)
        for (int q = 1; q < d; ++q)
          ic2c1 += i_component(p.metric, m, n, pp, q) * dc.c2[m * d + n] * dc.c1[pp * d + q];
  const double neg_g = -p.metric.det;
  out.potential = 0.25 * neg_g * (ic2c1 - p.metric.upper(0, 0) * dc.bdd);
  return out;
}

FieldPoint<double> context_at(const FieldPoint<double>& base, const std::vector<GridAxis>& axes,
                              const std::vector<double>& x) {
  DenseTensor<double> g = base.metric.g_lower;
  for (std::size_t i = 0; i < axes.size(); ++i) {
    g(axes[i].a, axes[i].b) = x[i];
    g(axes[i].b, axes[i].a) = x[i];
  }
  FieldPoint<double> p = make_field_point(invert_metric(g));
  p.d_spatial = base.d_spatial;
  return p;
}

}  // namespace

OperatorMatrix build_hamiltonian_operator(const ConfigGrid& grid,
                                          const FieldPoint<double>& context, double hbar,
                                          bool frozen, HamiltonianInfo* info) {
  const int na = grid.axis_count();
  std::vector<GridAxis> axes(na);
  for (int i = 0; i < na; ++i) {
    axes[i] = grid.axis(i);
    if (axes[i].a != axes[i].b || axes[i].a == 0)
      throw BadInput("retained variables must be spatial-diagonal components");
    if (axes[i].a >= context.metric.d) throw BadInput("axis component beyond dimension");
  }

  Triplets trip;
  trip.reserve(grid.total_points() * (3 * na + 4 * na * na));
  bool drift_present = false;
  double kin11 = 0.0;

  if (frozen) {
    ScalarCoefficients c = scalar_coefficients(context, axes);
    kin11 = c.kinetic[0];
    for (int i = 0; i < na; ++i) {
      add_second_difference(grid, i, Complex(-hbar * hbar * c.kinetic[i * na + i], 0.0), trip);
      for (int j = i + 1; j < na; ++j)
        add_cross_difference(grid, i, j, Complex(-2.0 * hbar * hbar * c.kinetic[i * na + j], 0.0),
                             trip);
      if (c.drift[i] != 0.0) {
        drift_present = true;
        add_first_difference(grid, i, Complex(0.0, hbar * c.drift[i]), trip);
      }
    }
    if (c.potential != 0.0)
      for (long idx = 0; idx < grid.total_points(); ++idx)
        trip.emplace_back(idx, idx, Complex(c.potential, 0.0));
  } else {
    // Grid-local coefficients, printed ordering: coefficient times
    // derivative.  Assembled row by row, so each row carries its own
    // point-evaluated coefficients.
    for (long idx = 0; idx < grid.total_points(); ++idx) {
      FieldPoint<double> local = context_at(context, axes, grid.point(idx));
      ScalarCoefficients c = scalar_coefficients(local, axes);
      if (idx == 0) kin11 = c.kinetic[0];
      std::vector<int> multi = grid.unflatten(idx);
      for (int i = 0; i < na; ++i) {
        const double h = grid.axis(i).spacing();
        const long s = grid.stride(i);
        const int n = grid.axis(i).points;
        // second difference: kd*(psi_+ - 2 psi_0 + psi_-)
        const double kd = -hbar * hbar * c.kinetic[i * na + i] / (h * h);
        trip.emplace_back(idx, idx, Complex(-2.0 * kd, 0.0));
        if (multi[i] + 1 < n) trip.emplace_back(idx, idx + s, Complex(kd, 0.0));
        if (multi[i] - 1 >= 0) trip.emplace_back(idx, idx - s, Complex(kd, 0.0));
        for (int j = i + 1; j < na; ++j) {
          const double w = -2.0 * hbar * hbar * c.kinetic[i * na + j] /
                           (4.0 * grid.axis(i).spacing() * grid.axis(j).spacing());
          const long sj = grid.stride(j);
          const int nj = grid.axis(j).points;
          for (int da = -1; da <= 1; da += 2)
            for (int db = -1; db <= 1; db += 2) {
              if (multi[i] + da < 0 || multi[i] + da >= n) continue;
              if (multi[j] + db < 0 || multi[j] + db >= nj) continue;
              trip.emplace_back(idx, idx + da * s + db * sj, Complex(da * db * w, 0.0));
            }
        }
        if (c.drift[i] != 0.0) {
          drift_present = true;
          const Complex dw(0.0, hbar * c.drift[i] / (2.0 * h));
          if (multi[i] + 1 < n) trip.emplace_back(idx, idx + s, dw);
          if (multi[i] - 1 >= 0) trip.emplace_back(idx, idx - s, -dw);
        }
      }
      if (c.potential != 0.0) trip.emplace_back(idx, idx, Complex(c.potential, 0.0));
    }
  }

  OperatorMatrix op(grid.total_points(), grid.total_points());
  op.setFromTriplets(trip.begin(), trip.end());
  if (info) {
    OperatorMatrix defect = op - OperatorMatrix(op.adjoint());
    double worst = 0.0;
    for (int k = 0; k < defect.outerSize(); ++k)
      for (OperatorMatrix::InnerIterator it(defect, k); it; ++it)
        worst = std::max(worst, std::abs(it.value()));
    info->hermiticity_defect = worst;
    info->frozen = frozen;
    info->drift_present = drift_present;
    info->kinetic_coefficient_11 = kin11;
  }
  return op;
}

QuantumTrajectory evolve_schrodinger(const WaveFunction& psi0, const OperatorMatrix& H,
                                     double dtau, int steps, double hbar,
                                     const QuantumEvolveOptions& opts) {
  if (steps < 0 || dtau <= 0.0) throw BadInput("need dtau > 0 and steps >= 0");
  if (H.rows() != psi0.amp.size()) throw ShapeMismatch("operator does not match the grid");
  const long n = psi0.amp.size();
  OperatorMatrix id(n, n);
  id.setIdentity();
  const Complex half(0.0, dtau / (2.0 * hbar));
  OperatorMatrix A = id + half * H;
  OperatorMatrix B = id - half * H;
  A.makeCompressed();
  Eigen::SparseLU<OperatorMatrix> solver;
  solver.compute(A);
  if (solver.info() != Eigen::Success)
    throw UnstableStep("implicit step factorization failed");

  QuantumTrajectory out{psi0, {}, {}, {}};
  out.norms.reserve(steps + 1);
  const double n0 = psi0.norm();
  out.norms.push_back(n0);
  out.snapshots.push_back(psi0.amp);
  out.snapshot_steps.push_back(0);
  for (int s = 1; s <= steps; ++s) {
    Eigen::VectorXcd rhs = B * out.state.amp;
    out.state.amp = solver.solve(rhs);
    if (solver.info() != Eigen::Success) throw UnstableStep("implicit solve failed");
    double nk = out.state.norm();
    double drift = std::abs(nk - out.norms.back()) / n0;
    out.norms.push_back(nk);
    if (drift > opts.norm_drift_per_step)
      throw NonUnitaryDrift("norm drift " + std::to_string(drift) + " at step " +
                            std::to_string(s));
    if (s % opts.record_stride == 0 || s == steps) {
      out.snapshots.push_back(out.state.amp);
      out.snapshot_steps.push_back(s);
    }
  }
  return out;
}

double primary_constraint_apply(const WaveFunction& psi, int axis,
                                const FieldPoint<double>& context, double hbar) {
  const ConfigGrid& grid = psi.grid;
  if (axis < 0 || axis >= grid.axis_count()) throw BadInput("axis out of range");
  const GridAxis& ax = grid.axis(axis);
  if (ax.a != 0) throw BadInput("constraint axis must hold a temporal-row component g_0sigma");
  const int sigma = ax.b;
  const int d = context.metric.d;
  if (sigma >= d) throw BadInput("axis component beyond dimension");

  // Frozen coefficient of Psi in the first-order condition.
  double c = 0.0;
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int k = 1; k < d; ++k) {
        double dmn = context.deriv(m, n, k);
        if (dmn == 0.0) continue;
        c += bds_component(context.metric, 0, sigma, 0, m, n, k) * dmn;
      }
  c *= 0.5 * context.metric.sqrt_neg_det;

  // i hbar (plain central difference along the axis) - c, interior-restricted.
  const long stride = grid.stride(axis);
  const double inv2h = 1.0 / (2.0 * grid.axis(axis).spacing());
  double num = 0.0;
  double den = 0.0;
  for (long idx = 0; idx < grid.total_points(); ++idx) {
    if (!grid.interior(idx)) continue;
    Complex dpsi = (psi.amp[idx + stride] - psi.amp[idx - stride]) * inv2h;
    Complex r = Complex(0.0, hbar) * dpsi - c * psi.amp[idx];
    num += std::norm(r);
    den += std::norm(psi.amp[idx]);
  }
  if (den == 0.0) throw BadInput("wave function vanishes on the interior");
  return std::sqrt(num / den);
}

OperatorMatrix constraint_chain_step(const OperatorMatrix& C, const OperatorMatrix& H,
                                     double hbar) {
  if (C.rows() != H.rows()) throw ShapeMismatch("operators live on different grids");
  OperatorMatrix comm = C * H - H * C;
  return OperatorMatrix((Complex(0.0, 1.0 / hbar) * comm).pruned(1e-300));
}

DenseTensor<double> tensor_equation_residual(const ConfigGrid& grid,
                                             const FieldPoint<double>& context,
                                             const WaveFunction& psi, double hbar,
                                             double* max_residual) {
  const int d = context.metric.d;
  const int na = grid.axis_count();
  std::vector<GridAxis> axes(na);
  for (int i = 0; i < na; ++i) axes[i] = grid.axis(i);

  OperatorMatrix Hs = build_hamiltonian_operator(grid, context, hbar, true);
  Eigen::VectorXcd hpsi = Hs * psi.amp;

  // pi-hat per spatial pair: nonzero only for retained diagonal components.
  std::vector<OperatorMatrix> axis_momentum(na);
  std::vector<int> axis_of(kMaxDim, -1);
  for (int i = 0; i < na; ++i) {
    axis_momentum[i] = momentum_operator(grid, i, hbar);
    axis_of[axes[i].a] = i;
  }
  auto momentum_for = [&](int p, int q) -> const OperatorMatrix* {
    if (p != q || axis_of[p] < 0) return nullptr;
    return &axis_momentum[axis_of[p]];
  };

  auto dc = detail::contract_derivs(context);
  const double sg = context.metric.sqrt_neg_det;
  const double neg_g = -context.metric.det;
  const double carrier = 1.0 / ((d - 1.0) * (d - 1.0));
  const double g00 = context.metric.upper(0, 0);
  const double psin = psi.norm();
  const double dv = grid.cell_volume();

  DenseTensor<double> out(d, {Variance::Upper, Variance::Upper, Variance::Upper, Variance::Upper});
  double worst = 0.0;
  for (int p = 1; p < d; ++p)
    for (int q = 1; q < d; ++q)
      for (int m = 1; m < d; ++m)
        for (int n = 1; n < d; ++n) {
          const OperatorMatrix* pi_pq = momentum_for(p, q);
          const OperatorMatrix* pi_mn = momentum_for(m, n);
          Eigen::VectorXcd lhs = Eigen::VectorXcd::Zero(grid.total_points());
          if (pi_pq && pi_mn) lhs += (*pi_pq) * ((*pi_mn) * psi.amp);
          const double c1pq = dc.c1[p * d + q];
          if (pi_mn && c1pq != 0.0) lhs -= sg * c1pq * ((*pi_mn) * psi.amp);
          const double e_pqmn = E_component(context.metric, p, q, m, n);
          const double s_scalar =
              0.25 * neg_g * (dc.c1[p * d + q] * dc.c2[m * d + n] -
                              g00 * e_pqmn * carrier * dc.bdd);
          lhs += s_scalar * psi.amp;
          Eigen::VectorXcd r = lhs - e_pqmn * carrier * hpsi;
          double num = 0.0;
          for (long idx = 0; idx < grid.total_points(); ++idx) num += std::norm(r[idx]);
          double res = std::sqrt(num * dv) / psin;
          out(p, q, m, n) = res;
          worst = std::max(worst, res);
        }
  if (max_residual) *max_residual = worst;
  return out;
}

}  // namespace gravham
