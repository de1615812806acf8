#pragma once

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "gravham/common.hpp"

namespace gravham {

enum class Variance : uint8_t { Upper, Lower };

inline char variance_tag(Variance v) { return v == Variance::Upper ? 'u' : 'l'; }

// Dense rank-r tensor over a d-dimensional index range, row-major storage,
// one variance flag per axis. All axes share the extent d: mixed-extent
// objects (spatial-only tensors of extent d-1) are stored with their own d.
template <typename S>
class DenseTensor {
public:
  DenseTensor() = default;
  DenseTensor(int extent, std::vector<Variance> variance)
      : d_(extent), var_(std::move(variance)) {
    if (d_ < 1) throw ShapeMismatch("extent must be positive");
    if (static_cast<int>(var_.size()) > kMaxRank)
      throw RankOverflow("rank " + std::to_string(var_.size()) + " above cap " +
                         std::to_string(kMaxRank));
    size_t n = 1;
    for (size_t i = 0; i < var_.size(); ++i) n *= static_cast<size_t>(d_);
    data_.assign(n, S(0));
  }

  static constexpr int kMaxRank = 8;

  int extent() const { return d_; }
  int rank() const { return static_cast<int>(var_.size()); }
  const std::vector<Variance>& variance() const { return var_; }
  size_t size() const { return data_.size(); }
  S* data() { return data_.data(); }
  const S* data() const { return data_.data(); }

  template <typename... I>
  S& operator()(I... idx) {
    return data_[flat(idx...)];
  }
  template <typename... I>
  const S& operator()(I... idx) const {
    return data_[flat(idx...)];
  }

  S& at(const std::vector<int>& idx) { return data_[flat_vec(idx)]; }
  const S& at(const std::vector<int>& idx) const { return data_[flat_vec(idx)]; }

  template <typename... I>
  size_t flat(I... idx) const {
    static_assert((std::is_convertible_v<I, int> && ...));
    size_t f = 0;
    ((f = f * d_ + static_cast<size_t>(idx)), ...);
    return f;
  }

  size_t flat_vec(const std::vector<int>& idx) const {
    size_t f = 0;
    for (int i : idx) f = f * d_ + static_cast<size_t>(i);
    return f;
  }

private:
  int d_ = 0;
  std::vector<Variance> var_;
  std::vector<S> data_;
};

namespace detail {

// Odometer over `rank` indices each running in [0, d).
inline bool advance(std::vector<int>& idx, int d) {
  for (int i = static_cast<int>(idx.size()) - 1; i >= 0; --i) {
    if (++idx[i] < d) return true;
    idx[i] = 0;
  }
  return false;
}

template <typename F>
void parallel_chunks(size_t total, F&& body) {
  int workers = max_threads();
  if (workers <= 1 || total < 64) {
    body(size_t{0}, total);
    return;
  }
  std::vector<std::thread> pool;
  size_t chunk = (total + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    size_t lo = w * chunk, hi = std::min(total, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] { body(lo, hi); });
  }
  for (auto& t : pool) t.join();
}

}  // namespace detail

// Pairwise contraction: sum over the listed (axis-of-a, axis-of-b) pairs.
// Each pair must join one upper and one lower axis of equal extent.
// Output axes: surviving axes of a, then surviving axes of b, in order.
template <typename S>
DenseTensor<S> contract(const DenseTensor<S>& a, const DenseTensor<S>& b,
                        const std::vector<std::pair<int, int>>& pairs) {
  if (a.extent() != b.extent())
    throw ShapeMismatch("extent mismatch " + std::to_string(a.extent()) + " vs " +
                        std::to_string(b.extent()));
  const int d = a.extent();
  std::vector<bool> usedA(a.rank(), false), usedB(b.rank(), false);
  for (auto [ia, ib] : pairs) {
    if (ia < 0 || ia >= a.rank() || ib < 0 || ib >= b.rank())
      throw ShapeMismatch("contraction axis out of range");
    if (usedA[ia] || usedB[ib]) throw ShapeMismatch("axis contracted twice");
    if (a.variance()[ia] == b.variance()[ib])
      throw VarianceMismatch("contracted axes share variance '" +
                             std::string(1, variance_tag(a.variance()[ia])) + "'");
    usedA[ia] = usedB[ib] = true;
  }
  std::vector<int> freeA, freeB;
  std::vector<Variance> var;
  for (int i = 0; i < a.rank(); ++i)
    if (!usedA[i]) {
      freeA.push_back(i);
      var.push_back(a.variance()[i]);
    }
  for (int i = 0; i < b.rank(); ++i)
    if (!usedB[i]) {
      freeB.push_back(i);
      var.push_back(b.variance()[i]);
    }
  if (static_cast<int>(var.size()) > DenseTensor<S>::kMaxRank)
    throw RankOverflow("contraction result rank " + std::to_string(var.size()) +
                       " above cap " + std::to_string(DenseTensor<S>::kMaxRank));

  DenseTensor<S> out(d, var);
  const int nf = static_cast<int>(var.size());
  const int np = static_cast<int>(pairs.size());

  // Enumerate output entries by flat index; each entry is an independent sum,
  // so the loop parallelizes without any scheduling nondeterminism.
  detail::parallel_chunks(out.size(), [&](size_t lo, size_t hi) {
    std::vector<int> fidx(nf), ia(a.rank()), ib(b.rank()), sidx(np, 0);
    for (size_t f = lo; f < hi; ++f) {
      size_t rem = f;
      for (int i = nf - 1; i >= 0; --i) {
        fidx[i] = static_cast<int>(rem % d);
        rem /= d;
      }
      for (size_t i = 0; i < freeA.size(); ++i) ia[freeA[i]] = fidx[i];
      for (size_t i = 0; i < freeB.size(); ++i) ib[freeB[i]] = fidx[freeA.size() + i];
      std::fill(sidx.begin(), sidx.end(), 0);
      S sum(0);
      do {
        for (int p = 0; p < np; ++p) {
          ia[pairs[p].first] = sidx[p];
          ib[pairs[p].second] = sidx[p];
        }
        sum += a.at(ia) * b.at(ib);
      } while (np > 0 && detail::advance(sidx, d));
      out.data()[f] = sum;
    }
  });
  return out;
}

// Average over all permutations of the listed axes (same variance required).
template <typename S>
DenseTensor<S> symmetrize(const DenseTensor<S>& t, std::vector<int> axes) {
  if (axes.empty()) return t;
  for (int ax : axes) {
    if (ax < 0 || ax >= t.rank()) throw ShapeMismatch("symmetrize axis out of range");
    if (t.variance()[ax] != t.variance()[axes[0]])
      throw VarianceMismatch("symmetrized axes must share variance");
  }
  std::sort(axes.begin(), axes.end());
  std::vector<int> perm = axes;
  DenseTensor<S> out(t.extent(), t.variance());
  size_t nperm = 1;
  for (size_t i = 2; i <= axes.size(); ++i) nperm *= i;
  const S w = S(1.0) / S(static_cast<double>(nperm));

  std::vector<int> idx(t.rank(), 0), pidx(t.rank(), 0);
  do {
    std::copy(idx.begin(), idx.end(), pidx.begin());
    S sum(0);
    std::vector<int> p = perm;
    do {
      for (size_t i = 0; i < axes.size(); ++i) pidx[axes[i]] = idx[p[i]];
      sum += t.at(pidx);
    } while (std::next_permutation(p.begin(), p.end()));
    out.at(idx) = sum * w;
  } while (detail::advance(idx, t.extent()));
  return out;
}

inline double max_abs_diff(const DenseTensor<double>& a, const DenseTensor<double>& b) {
  if (a.size() != b.size()) throw ShapeMismatch("size mismatch in comparison");
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  return m;
}

// Flat CSV: one row per entry, index tuple in the first column.
inline std::string to_csv(const DenseTensor<double>& t) {
  std::string out = "indices,value\n";
  std::vector<int> idx(t.rank(), 0);
  char buf[64];
  do {
    std::string key;
    for (size_t i = 0; i < idx.size(); ++i) {
      if (i) key += ' ';
      key += std::to_string(idx[i]);
    }
    std::snprintf(buf, sizeof buf, "%.17g", t.at(idx));
    out += key + "," + buf + "\n";
  } while (detail::advance(idx, t.extent()));
  return out;
}

}  // namespace gravham
