#pragma once

#include "gravham/common.hpp"
#include "gravham/metric.hpp"
#include "gravham/tensor.hpp"

// The specific index machines of the canonical formulation: the mixed and
// raised delta pairs, the spatial quadratic form I, the rank-6 structure B
// with its two symmetrizations, the temporal-projected inverse e, and the
// spatial tensor E that inverts I.
//
// Convention used throughout: every tensor is stored at full extent d with
// index 0 temporal; spatial objects (I, E) simply leave temporal slots zero,
// so they contract uniformly with everything else.

namespace gravham {

// B^{abc mno} = g^ab g^co g^mn - g^am g^bn g^co + 2 g^ao g^bn g^cm - 2 g^ab g^cm g^no
template <typename S>
inline S b_component(const MetricState<S>& g, int a, int b, int c, int m, int n, int o) {
  const auto& u = g.g_upper;
  return u(a, b) * u(c, o) * u(m, n) - u(a, m) * u(b, n) * u(c, o) +
         S(2.0) * u(a, o) * u(b, n) * u(c, m) - S(2.0) * u(a, b) * u(c, m) * u(n, o);
}

// Third-index symmetrization B^(abc|mno): half the sum over swapping the
// derivative slots c and o.
template <typename S>
inline S bs_component(const MetricState<S>& g, int a, int b, int c, int m, int n, int o) {
  return S(0.5) * (b_component(g, a, b, c, m, n, o) + b_component(g, a, b, o, m, n, c));
}

// Double symmetrization B^((ab)c|mno): additionally average over a <-> b.
template <typename S>
inline S bds_component(const MetricState<S>& g, int a, int b, int c, int m, int n, int o) {
  return S(0.25) * (b_component(g, a, b, c, m, n, o) + b_component(g, a, b, o, m, n, c) +
                    b_component(g, b, a, c, m, n, o) + b_component(g, b, a, o, m, n, c));
}

// I_mnpq = (1/(d-2)) g_mn g_pq - g_mp g_nq over spatial indices.
template <typename S>
inline S i_component(const MetricState<S>& g, int m, int n, int p, int q) {
  const auto& l = g.g_lower;
  return l(m, n) * l(p, q) * S(1.0 / (g.d - 2)) - l(m, p) * l(n, q);
}

// e^mn = g^mn - g^0m g^0n / g^00. Every row/column touching index 0 is zero.
template <typename S>
inline S e_component(const MetricState<S>& g, int m, int n) {
  const auto& u = g.g_upper;
  return u(m, n) - u(0, m) * u(0, n) / u(0, 0);
}

template <typename S>
inline S E_component(const MetricState<S>& g, int p, int q, int k, int l) {
  return e_component(g, p, q) * e_component(g, k, l) -
         e_component(g, p, k) * e_component(g, q, l);
}

inline DenseTensor<double> delta_mixed(int d) {
  DenseTensor<double> t(
      d, {Variance::Upper, Variance::Upper, Variance::Lower, Variance::Lower});
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) {
      t(m, n, m, n) += 0.5;
      t(m, n, n, m) += 0.5;
    }
  return t;
}

// Delta with both pair slots raised by the metric: 1/2 (g^am g^bn + g^an g^bm).
inline DenseTensor<double> delta_upper(const MetricState<double>& g) {
  const int d = g.d;
  DenseTensor<double> t(
      d, {Variance::Upper, Variance::Upper, Variance::Upper, Variance::Upper});
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n)
      for (int a = 0; a < d; ++a)
        for (int b = 0; b < d; ++b)
          t(m, n, a, b) = 0.5 * (g.upper(a, m) * g.upper(b, n) + g.upper(a, n) * g.upper(b, m));
  return t;
}

inline DenseTensor<double> tensor_I(const MetricState<double>& g) {
  require_dimension(g.d);
  const int d = g.d;
  DenseTensor<double> t(
      d, {Variance::Lower, Variance::Lower, Variance::Lower, Variance::Lower});
  for (int m = 1; m < d; ++m)
    for (int n = 1; n < d; ++n)
      for (int p = 1; p < d; ++p)
        for (int q = 1; q < d; ++q) t(m, n, p, q) = i_component(g, m, n, p, q);
  return t;
}

inline DenseTensor<double> tensor_B(const MetricState<double>& g) {
  const int d = g.d;
  DenseTensor<double> t(d, std::vector<Variance>(6, Variance::Upper));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n)
            for (int o = 0; o < d; ++o) t(a, b, c, m, n, o) = b_component(g, a, b, c, m, n, o);
  return t;
}

inline DenseTensor<double> tensor_B_sym(const MetricState<double>& g) {
  const int d = g.d;
  DenseTensor<double> t(d, std::vector<Variance>(6, Variance::Upper));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n)
            for (int o = 0; o < d; ++o) t(a, b, c, m, n, o) = bs_component(g, a, b, c, m, n, o);
  return t;
}

inline DenseTensor<double> tensor_B_dsym(const MetricState<double>& g) {
  const int d = g.d;
  DenseTensor<double> t(d, std::vector<Variance>(6, Variance::Upper));
  for (int a = 0; a < d; ++a)
    for (int b = 0; b < d; ++b)
      for (int c = 0; c < d; ++c)
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n)
            for (int o = 0; o < d; ++o) t(a, b, c, m, n, o) = bds_component(g, a, b, c, m, n, o);
  return t;
}

inline DenseTensor<double> tensor_e(const MetricState<double>& g) {
  if (std::abs(g.upper(0, 0)) < 1e-12) throw TemporalDegeneracy("g^00 vanishes");
  const int d = g.d;
  DenseTensor<double> t(d, {Variance::Upper, Variance::Upper});
  for (int m = 0; m < d; ++m)
    for (int n = 0; n < d; ++n) t(m, n) = e_component(g, m, n);
  return t;
}

inline DenseTensor<double> tensor_E(const MetricState<double>& g) {
  if (std::abs(g.upper(0, 0)) < 1e-12) throw TemporalDegeneracy("g^00 vanishes");
  const int d = g.d;
  DenseTensor<double> t(
      d, {Variance::Upper, Variance::Upper, Variance::Upper, Variance::Upper});
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l) t(p, q, k, l) = E_component(g, p, q, k, l);
  return t;
}

// E written out in plain inverse-metric components. The quartic g^0 terms of
// the two e-products cancel, leaving this bilinear-minus-correction form;
// kept separate from tensor_E as an independent route to the same values.
inline DenseTensor<double> tensor_E_from_g(const MetricState<double>& g) {
  const int d = g.d;
  const auto& u = g.g_upper;
  const double v = u(0, 0);
  if (std::abs(v) < 1e-12) throw TemporalDegeneracy("g^00 vanishes");
  DenseTensor<double> t(
      d, {Variance::Upper, Variance::Upper, Variance::Upper, Variance::Upper});
  for (int p = 0; p < d; ++p)
    for (int q = 0; q < d; ++q)
      for (int k = 0; k < d; ++k)
        for (int l = 0; l < d; ++l)
          t(p, q, k, l) = u(p, q) * u(k, l) - u(p, k) * u(q, l) -
                          (u(p, q) * u(0, k) * u(0, l) + u(k, l) * u(0, p) * u(0, q) -
                           u(p, k) * u(0, q) * u(0, l) - u(q, l) * u(0, p) * u(0, k)) /
                              v;
  return t;
}

// Master identity: I_mnpq E^pqkl = delta^k_m delta^l_n over spatial indices,
// exact up to rounding, with no symmetrization on the right-hand side.
inline double check_IE_inverse(const MetricState<double>& g) {
  require_dimension(g.d);
  const int d = g.d;
  double worst = 0.0;
  for (int m = 1; m < d; ++m)
    for (int n = 1; n < d; ++n)
      for (int k = 1; k < d; ++k)
        for (int l = 1; l < d; ++l) {
          double s = 0.0;
          for (int p = 1; p < d; ++p)
            for (int q = 1; q < d; ++q) s += i_component(g, m, n, p, q) * E_component(g, p, q, k, l);
          double expect = (m == k && n == l) ? 1.0 : 0.0;
          worst = std::max(worst, std::abs(s - expect));
        }
  return worst;
}

}  // namespace gravham
