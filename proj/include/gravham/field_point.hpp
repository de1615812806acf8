#pragma once

#include <vector>

#include "gravham/grav_tensors.hpp"
#include "gravham/metric.hpp"
#include "gravham/tensor.hpp"

// One canonical field point: the metric, its first derivatives (index 0 of
// the derivative slot is time), and the conjugate momenta. All dynamics
// formulas live here as free functions templated on the scalar so the same
// code path runs on plain doubles and on forward-mode dual numbers.

namespace gravham {

template <typename S>
struct FieldPoint {
  MetricState<S> metric;
  DenseTensor<S> velocity;   // g_ab,0  {L,L}
  DenseTensor<S> d_spatial;  // g_ab,k  {L,L,L}, slice k=0 unused and kept zero
  DenseTensor<S> momentum;   // pi^ab   {U,U}

  // g_ab,c with the time/space split folded back together.
  S deriv(int a, int b, int c) const { return c == 0 ? velocity(a, b) : d_spatial(a, b, c); }
};

template <typename S>
FieldPoint<S> make_field_point(MetricState<S> m) {
  FieldPoint<S> p;
  const int d = m.d;
  p.metric = std::move(m);
  p.velocity = DenseTensor<S>(d, {Variance::Lower, Variance::Lower});
  p.d_spatial = DenseTensor<S>(d, {Variance::Lower, Variance::Lower, Variance::Lower});
  p.momentum = DenseTensor<S>(d, {Variance::Upper, Variance::Upper});
  return p;
}

// 1/4 sqrt(-g) B^{abc|mno} g_ab,c g_mn,o over all index values.
template <typename S>
S lagrangian_B(const FieldPoint<S>& p) {
  const int d = p.metric.d;
  S sum(0);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c) {
        S dab = p.deriv(a, b, c);
        if (value_of(dab) == 0.0) continue;
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n)
            for (int o = 0; o < d; ++o) {
              S dmn = p.deriv(m, n, o);
              if (value_of(dmn) == 0.0) continue;
              sum += b_component(p.metric, a, b, c, m, n, o) * dab * dmn;
            }
      }
  return S(0.25) * p.metric.sqrt_neg_det * sum;
}

// Gamma^mu_{a n} = 1/2 g^{mu l} (g_la,n + g_ln,a - g_an,l)
template <typename S>
DenseTensor<S> christoffel(const FieldPoint<S>& p) {
  const int d = p.metric.d;
  DenseTensor<S> gam(d, {Variance::Upper, Variance::Lower, Variance::Lower});
  for (int mu = 0; mu < d; ++mu)
    for (int a = 0; a < d; ++a)
      for (int n = 0; n < d; ++n) {
        S s(0);
        for (int l = 0; l < d; ++l)
          s += p.metric.upper(mu, l) * (p.deriv(l, a, n) + p.deriv(l, n, a) - p.deriv(a, n, l));
        gam(mu, a, n) = S(0.5) * s;
      }
  return gam;
}

// First-derivative Lagrangian sqrt(-g) g^ab (G^m_an G^n_bm - G^n_ab G^m_nm),
// cross-checked on every call against the quadratic B-contraction form.
template <typename S>
S lagrangian_gamma_gamma(const FieldPoint<S>& p, double rel_tol = 1e-9) {
  const int d = p.metric.d;
  DenseTensor<S> gam = christoffel(p);
  std::vector<S> trace(d, S(0));  // trace[n] = Gamma^m_nm
  for (int n = 0; n < d; ++n)
    for (int m = 0; m < d; ++m) trace[n] += gam(m, n, m);
  S t1(0), t2(0);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b) {
      S s1(0), s2(0);
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) s1 += gam(m, a, n) * gam(n, b, m);
      for (int n = 0; n < d; ++n) s2 += gam(n, a, b) * trace[n];
      t1 += p.metric.upper(a, b) * s1;
      t2 += p.metric.upper(a, b) * s2;
    }
  S lgg = p.metric.sqrt_neg_det * (t1 - t2);
  S lb = lagrangian_B(p);
  double diff = std::abs(value_of(lgg) - value_of(lb));
  if (diff > rel_tol * std::max(1.0, std::abs(value_of(lgg))))
    throw ChristoffelMismatch("quadratic form and Christoffel form disagree by " +
                              std::to_string(diff));
  return lgg;
}

template <typename S>
struct LagrangianSplit {
  S kinetic;  // 1/4 sqrt(-g) B^{ab0|mn0} velocity velocity
  S cross;    // 1/2 sqrt(-g) B^(ab0|mnk) velocity g_mn,k
  S spatial;  // 1/4 sqrt(-g) B^{abk|mnl} g_ab,k g_mn,l
};

template <typename S>
LagrangianSplit<S> lagrangian_split(const FieldPoint<S>& p) {
  const int d = p.metric.d;
  const S sq = p.metric.sqrt_neg_det;
  S kin(0), cross(0), spat(0);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
          kin += b_component(p.metric, a, b, 0, m, n, 0) * p.velocity(a, b) * p.velocity(m, n);
          for (int k = 1; k < d; ++k) {
            cross += bs_component(p.metric, a, b, 0, m, n, k) * p.velocity(a, b) *
                     p.d_spatial(m, n, k);
            for (int l = 1; l < d; ++l)
              spat += b_component(p.metric, a, b, k, m, n, l) * p.d_spatial(a, b, k) *
                      p.d_spatial(m, n, l);
          }
        }
  return {S(0.25) * sq * kin, S(0.5) * sq * cross, S(0.25) * sq * spat};
}

// pi^gs = 1/2 sqrt(-g) [ B^((gs)0|mn0) g_mn,0 + B^((gs)0|mnk) g_mn,k ]
template <typename S>
DenseTensor<S> momentum_from_velocity(const FieldPoint<S>& p) {
  const int d = p.metric.d;
  DenseTensor<S> pi(d, {Variance::Upper, Variance::Upper});
  for (int g = 0; g < d; ++g)
    for (int s = g; s < d; ++s) {
      S acc(0);
      for (int m = 0; m < d; ++m)
        for (int n = 0; n < d; ++n) {
          acc += bds_component(p.metric, g, s, 0, m, n, 0) * p.velocity(m, n);
          for (int k = 1; k < d; ++k)
            acc += bds_component(p.metric, g, s, 0, m, n, k) * p.d_spatial(m, n, k);
        }
      pi(g, s) = S(0.5) * p.metric.sqrt_neg_det * acc;
      pi(s, g) = pi(g, s);
    }
  return pi;
}

// Inversion of the spatial block of the momentum map:
// g_mn,0 = (1/g^00) I_mnpq (2/sqrt(-g) pi^pq - B^((pq)0|abk) g_ab,k)
template <typename S>
DenseTensor<S> velocity_from_momentum(const FieldPoint<S>& p) {
  require_dimension(p.metric.d);
  const int d = p.metric.d;
  const S v00 = p.metric.upper(0, 0);
  if (std::abs(value_of(v00)) < 1e-12) throw TemporalDegeneracy("g^00 vanishes");
  std::vector<S> inner(d * d, S(0));
  for (int pp = 1; pp < d; ++pp)
    for (int q = 1; q < d; ++q) {
      S acc = S(2.0) / p.metric.sqrt_neg_det * p.momentum(pp, q);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int k = 1; k < d; ++k)
            acc -= bds_component(p.metric, pp, q, 0, a, b, k) * p.d_spatial(a, b, k);
      inner[pp * d + q] = acc;
    }
  DenseTensor<S> vel(d, {Variance::Lower, Variance::Lower});
  for (int m = 1; m < d; ++m)
    for (int n = 1; n < d; ++n) {
      S acc(0);
      for (int pp = 1; pp < d; ++pp)
        for (int q = 1; q < d; ++q) acc += i_component(p.metric, m, n, pp, q) * inner[pp * d + q];
      vel(m, n) = acc / v00;
    }
  return vel;
}

namespace detail {

// The three derivative contractions every Hamiltonian form shares:
// c1^pq = B^(pq0|abk) g_ab,k   (third-index symmetrization)
// c2^pq = B^((pq)0|abk) g_ab,k (double symmetrization)
// bdd   = B^{abk|mnl} g_ab,k g_mn,l
template <typename S>
struct DerivContractions {
  std::vector<S> c1, c2;  // d*d, spatial rows filled
  S bdd;
};

template <typename S>
DerivContractions<S> contract_derivs(const FieldPoint<S>& p) {
  const int d = p.metric.d;
  DerivContractions<S> out;
  out.c1.assign(d * d, S(0));
  out.c2.assign(d * d, S(0));
  out.bdd = S(0);
  for (int pp = 1; pp < d; ++pp)
    for (int q = 1; q < d; ++q) {
      S s1(0), s2(0);
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          for (int k = 1; k < d; ++k) {
            S dab = p.d_spatial(a, b, k);
            if (value_of(dab) == 0.0) continue;
            s1 += bs_component(p.metric, pp, q, 0, a, b, k) * dab;
            s2 += bds_component(p.metric, pp, q, 0, a, b, k) * dab;
          }
      out.c1[pp * d + q] = s1;
      out.c2[pp * d + q] = s2;
    }
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int k = 1; k < d; ++k) {
        S dab = p.d_spatial(a, b, k);
        if (value_of(dab) == 0.0) continue;
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n)
            for (int l = 1; l < d; ++l) {
              S dmn = p.d_spatial(m, n, l);
              if (value_of(dmn) == 0.0) continue;
              out.bdd += b_component(p.metric, a, b, k, m, n, l) * dab * dmn;
            }
      }
  return out;
}

}  // namespace detail

// Dynamical Hamiltonian:
//   H_c = (1/(sqrt(-g) g^00)) I pi pi - (1/g^00) I pi c1
//       + 1/4 sqrt(-g) [ (1/g^00) I c2 c1 - bdd ]
template <typename S>
S hamiltonian_Hc(const FieldPoint<S>& p) {
  require_dimension(p.metric.d);
  const int d = p.metric.d;
  const S v00 = p.metric.upper(0, 0);
  if (std::abs(value_of(v00)) < 1e-12) throw TemporalDegeneracy("g^00 vanishes");
  const S sq = p.metric.sqrt_neg_det;
  auto dc = detail::contract_derivs(p);
  S ipp(0), ipc1(0), ic2c1(0);
  for (int m = 1; m < d; ++m)
    for (int n = 1; n < d; ++n)
      for (int pp = 1; pp < d; ++pp)
        for (int q = 1; q < d; ++q) {
          S i = i_component(p.metric, m, n, pp, q);
          ipp += i * p.momentum(m, n) * p.momentum(pp, q);
          ipc1 += i * p.momentum(m, n) * dc.c1[pp * d + q];
          ic2c1 += i * dc.c2[m * d + n] * dc.c1[pp * d + q];
        }
  return ipp / (sq * v00) - ipc1 / v00 + S(0.25) * sq * (ic2c1 / v00 - dc.bdd);
}

// sqrt(-g) g^00 H_c, evaluated directly so no division by g^00 appears.
template <typename S>
S hamiltonian_tilde(const FieldPoint<S>& p) {
  require_dimension(p.metric.d);
  const int d = p.metric.d;
  const S sq = p.metric.sqrt_neg_det;
  const S negg = sq * sq;  // -det
  auto dc = detail::contract_derivs(p);
  S ipp(0), ipc1(0), ic2c1(0);
  for (int m = 1; m < d; ++m)
    for (int n = 1; n < d; ++n)
      for (int pp = 1; pp < d; ++pp)
        for (int q = 1; q < d; ++q) {
          S i = i_component(p.metric, m, n, pp, q);
          ipp += i * p.momentum(m, n) * p.momentum(pp, q);
          ipc1 += i * p.momentum(m, n) * dc.c1[pp * d + q];
          ic2c1 += i * dc.c2[m * d + n] * dc.c1[pp * d + q];
        }
  return ipp - sq * ipc1 + S(0.25) * negg * (ic2c1 - p.metric.upper(0, 0) * dc.bdd);
}

template <typename S>
struct HamiltonianTensor {
  DenseTensor<S> htilde;  // pi^pq pi^mn + s^pqmn, spatial entries
  DenseTensor<S> spart;   // momentum-linear plus potential part
};

// Tensor-valued Hamiltonian whose I-contraction reproduces hamiltonian_tilde.
// The scalar bdd term is carried on E^pqmn/(d-1)^2, the unique I-preimage of
// a constant under the I.E master identity.
template <typename S>
HamiltonianTensor<S> hamiltonian_tensor(const FieldPoint<S>& p) {
  require_dimension(p.metric.d);
  const int d = p.metric.d;
  const S sq = p.metric.sqrt_neg_det;
  const S negg = sq * sq;
  const S v00 = p.metric.upper(0, 0);
  if (std::abs(value_of(v00)) < 1e-12) throw TemporalDegeneracy("g^00 vanishes");
  auto dc = detail::contract_derivs(p);
  const double carrier = 1.0 / ((d - 1.0) * (d - 1.0));
  HamiltonianTensor<S> out{
      DenseTensor<S>(d, {Variance::Upper, Variance::Upper, Variance::Upper, Variance::Upper}),
      DenseTensor<S>(d, {Variance::Upper, Variance::Upper, Variance::Upper, Variance::Upper})};
  for (int pp = 1; pp < d; ++pp)
    for (int q = 1; q < d; ++q)
      for (int m = 1; m < d; ++m)
        for (int n = 1; n < d; ++n) {
          S s = S(-1.0) * sq * dc.c1[pp * d + q] * p.momentum(m, n) +
                S(0.25) * negg *
                    (dc.c1[pp * d + q] * dc.c2[m * d + n] -
                     v00 * E_component(p.metric, pp, q, m, n) * S(carrier) * dc.bdd);
          out.spart(pp, q, m, n) = s;
          out.htilde(pp, q, m, n) = p.momentum(pp, q) * p.momentum(m, n) + s;
        }
  return out;
}

// phi^0s = pi^0s - 1/2 sqrt(-g) B^((0s)0|abk) g_ab,k
template <typename S>
S primary_constraint(const FieldPoint<S>& p, int sigma) {
  const int d = p.metric.d;
  if (sigma < 0 || sigma >= d) throw BadInput("constraint index out of range");
  S acc(0);
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int k = 1; k < d; ++k)
        acc += bds_component(p.metric, 0, sigma, 0, a, b, k) * p.d_spatial(a, b, k);
  return p.momentum(0, sigma) - S(0.5) * p.metric.sqrt_neg_det * acc;
}

// H_T = H_c + g_00,0 phi^00 + 2 g_0k,0 phi^0k
template <typename S>
S total_hamiltonian(const FieldPoint<S>& p, const std::vector<S>& temporal_velocities) {
  const int d = p.metric.d;
  if (static_cast<int>(temporal_velocities.size()) != d)
    throw BadInput("need d multiplier velocities g_0sigma,0");
  S h = hamiltonian_Hc(p);
  h += temporal_velocities[0] * primary_constraint(p, 0);
  for (int k = 1; k < d; ++k)
    h += S(2.0) * temporal_velocities[k] * primary_constraint(p, k);
  return h;
}

// Energy flux:
// G^k = 2 g_0m phi^mk - sqrt(-g) E^mnki g_mn,i
//     + sqrt(-g) g_ab,i (g^0a/g^00)(g^bk g^0i - g^bi g^0k)
// phi^mk has no definition in the source formulation; it is caller-supplied
// and defaults to zero.
template <typename S>
DenseTensor<S> flux_vector(const FieldPoint<S>& p, const DenseTensor<S>* phi_mk = nullptr) {
  require_dimension(p.metric.d);
  const int d = p.metric.d;
  const S v00 = p.metric.upper(0, 0);
  if (std::abs(value_of(v00)) < 1e-12) throw TemporalDegeneracy("g^00 vanishes");
  const S sq = p.metric.sqrt_neg_det;
  DenseTensor<S> G(d, {Variance::Upper});
  for (int k = 1; k < d; ++k) {
    S acc(0);
    if (phi_mk != nullptr)
      for (int m = 1; m < d; ++m) acc += S(2.0) * p.metric.lower(0, m) * (*phi_mk)(m, k);
    for (int m = 1; m < d; ++m)
      for (int n = 1; n < d; ++n)
        for (int i = 1; i < d; ++i)
          acc -= sq * E_component(p.metric, m, n, k, i) * p.d_spatial(m, n, i);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int i = 1; i < d; ++i) {
          S dab = p.d_spatial(a, b, i);
          if (value_of(dab) == 0.0) continue;
          acc += sq * dab * (p.metric.upper(0, a) / v00) *
                 (p.metric.upper(b, k) * p.metric.upper(0, i) -
                  p.metric.upper(b, i) * p.metric.upper(0, k));
        }
    G(k) = acc;
  }
  return G;
}

inline int dof_count(int d) {
  require_dimension(d);
  return d * (d + 1) / 2 - 2 * d;
}

template <typename S>
S tau_from_t(S t, const MetricState<S>& m) {
  const S v00 = m.upper(0, 0);
  if (std::abs(value_of(v00)) < 1e-12) throw TemporalDegeneracy("g^00 vanishes");
  return t / (m.sqrt_neg_det * v00);
}

}  // namespace gravham
