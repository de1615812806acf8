#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "gravham/common.hpp"
#include "gravham/smallmat.hpp"
#include "gravham/tensor.hpp"

namespace gravham {

// One metric point: covariant components, inverse, determinant, sqrt(-g).
// Index 0 is temporal. Admissibility is det < 0 and g^00 != 0; no full
// signature test is performed (the dynamics formulas only ever divide by
// sqrt(-g) and g^00).
template <typename S>
struct MetricState {
  int d = 0;
  DenseTensor<S> g_lower;  // g_ab, both axes Lower
  DenseTensor<S> g_upper;  // g^ab, both axes Upper
  S det{};
  S sqrt_neg_det{};

  S lower(int a, int b) const { return g_lower(a, b); }
  S upper(int a, int b) const { return g_upper(a, b); }
};

template <typename S>
MetricState<S> invert_metric(const DenseTensor<S>& g_lower, double eps = 1e-12) {
  if (g_lower.rank() != 2) throw ShapeMismatch("metric must be rank 2");
  if (g_lower.variance()[0] != Variance::Lower || g_lower.variance()[1] != Variance::Lower)
    throw VarianceMismatch("metric input must be fully covariant");
  const int d = g_lower.extent();
  if (d < 2) throw DimensionTooSmall("need d >= 2, got d = " + std::to_string(d));
  if (d > kMaxDim)
    throw RankOverflow("d = " + std::to_string(d) + " exceeds compiled cap " +
                       std::to_string(kMaxDim));
  double scale = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) scale = std::max(scale, std::abs(value_of(g_lower(i, j))));
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (std::abs(value_of(g_lower(i, j)) - value_of(g_lower(j, i))) > 1e-9 * std::max(1.0, scale))
        throw BadInput("metric components not symmetric at (" + std::to_string(i) + "," +
                       std::to_string(j) + ")");

  SmallMat<S> m(d), inv(d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = g_lower(i, j);
  S det = invert_small(m, inv, eps);

  if (std::abs(value_of(det)) < eps)
    throw SingularMetric("|det| = " + std::to_string(std::abs(value_of(det))) +
                         " below threshold");
  if (value_of(det) >= 0.0)
    throw NonLorentzian("det = " + std::to_string(value_of(det)) + ", expected det < 0");
  if (std::abs(value_of(inv(0, 0))) < eps)
    throw TemporalDegeneracy("g^00 vanishes");

  if constexpr (std::is_same_v<S, double>) {
    // Cross-check the hand-rolled elimination against Eigen's LU on the
    // plain-double path; disagreement means the point is numerically unusable.
    Eigen::MatrixXd eg(d, d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) eg(i, j) = g_lower(i, j);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(eg);
    Eigen::MatrixXd einv = lu.inverse();
    double worst = std::abs(lu.determinant() - det);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j) worst = std::max(worst, std::abs(einv(i, j) - inv(i, j)));
    if (worst > 1e-8 * std::max(1.0, scale))
      throw SingularMetric("metric too ill-conditioned, inverse cross-check residual " +
                           std::to_string(worst));
  }

  MetricState<S> out;
  out.d = d;
  out.g_lower = g_lower;
  out.g_upper = DenseTensor<S>(d, {Variance::Upper, Variance::Upper});
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) out.g_upper(i, j) = inv(i, j);
  out.det = det;
  using std::sqrt;
  out.sqrt_neg_det = sqrt(S(-1.0) * det);
  return out;
}

template <typename S>
DenseTensor<S> metric_from_rows(int d, const std::vector<std::vector<double>>& rows) {
  if (static_cast<int>(rows.size()) != d) throw BadInput("metric row count != d");
  DenseTensor<S> g(d, {Variance::Lower, Variance::Lower});
  for (int i = 0; i < d; ++i) {
    if (static_cast<int>(rows[i].size()) != d) throw BadInput("metric column count != d");
    for (int j = 0; j < d; ++j) g(i, j) = S(rows[i][j]);
  }
  return g;
}

inline DenseTensor<double> diag_metric(const std::vector<double>& diag) {
  const int d = static_cast<int>(diag.size());
  DenseTensor<double> g(d, {Variance::Lower, Variance::Lower});
  for (int i = 0; i < d; ++i) g(i, i) = diag[i];
  return g;
}

inline DenseTensor<double> minkowski(int d) {
  std::vector<double> diag(d, 1.0);
  diag[0] = -1.0;
  return diag_metric(diag);
}

// Random admissible metric: Minkowski plus a symmetric perturbation of the
// given amplitude, rejection-sampled until inversion succeeds with healthy
// margins. zero_shift clamps g_0k = 0 (k spatial), which several canonical
// identities require.
inline MetricState<double> random_metric(Rng& rng, int d, double amplitude = 0.3,
                                         bool zero_shift = false) {
  for (int attempt = 0; attempt < 256; ++attempt) {
    DenseTensor<double> g = minkowski(d);
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) {
        double p = uniform(rng, -amplitude, amplitude);
        g(i, j) += p;
        if (j != i) g(j, i) += p;
      }
    if (zero_shift)
      for (int k = 1; k < d; ++k) g(0, k) = g(k, 0) = 0.0;
    try {
      MetricState<double> m = invert_metric(g);
      if (m.det > -0.05) continue;
      if (m.upper(0, 0) > -0.05) continue;
      return m;
    } catch (const Error&) {
      continue;
    }
  }
  throw MetricDegenerated("could not sample an admissible metric at amplitude " +
                          std::to_string(amplitude));
}

}  // namespace gravham
