#pragma once

#include <array>
#include <cmath>

#include "gravham/common.hpp"
#include "gravham/dual.hpp"

namespace gravham {

// Stack-allocated square matrix with runtime dimension <= kMaxDim, templated
// on scalar so the metric pipeline also runs on dual numbers. Double-precision
// callers that want Eigen use it directly on top of data(); this type only
// exists because Eigen's LU does not instantiate cleanly on custom scalars.
template <typename S>
struct SmallMat {
  int n = 0;
  std::array<S, kMaxDim * kMaxDim> a{};

  SmallMat() = default;
  explicit SmallMat(int dim) : n(dim) {}
  S& operator()(int i, int j) { return a[i * n + j]; }
  const S& operator()(int i, int j) const { return a[i * n + j]; }
};

// Gauss-Jordan with partial pivoting on |value|. Returns det; fills inv.
// Throws SingularMetric when a pivot magnitude falls below eps.
template <typename S>
S invert_small(const SmallMat<S>& m, SmallMat<S>& inv, double eps = 1e-12) {
  const int n = m.n;
  SmallMat<S> w = m;
  inv = SmallMat<S>(n);
  for (int i = 0; i < n; ++i) inv(i, i) = S(1.0);
  S det = S(1.0);
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::abs(value_of(w(r, c))) > std::abs(value_of(w(piv, c)))) piv = r;
    if (std::abs(value_of(w(piv, c))) < eps)
      throw SingularMetric("pivot " + std::to_string(value_of(w(piv, c))) +
                           " below threshold " + std::to_string(eps));
    if (piv != c) {
      for (int j = 0; j < n; ++j) {
        std::swap(w(piv, j), w(c, j));
        std::swap(inv(piv, j), inv(c, j));
      }
      det = -det;
    }
    det *= w(c, c);
    S invp = S(1.0) / w(c, c);
    for (int j = 0; j < n; ++j) {
      w(c, j) *= invp;
      inv(c, j) *= invp;
    }
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      S f = w(r, c);
      if (value_of(f) == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        w(r, j) -= f * w(c, j);
        inv(r, j) -= f * inv(c, j);
      }
    }
  }
  return det;
}

template <typename S>
S det_small(const SmallMat<S>& m) {
  SmallMat<S> inv;
  return invert_small(m, inv);
}

}  // namespace gravham
