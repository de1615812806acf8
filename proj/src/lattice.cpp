#include "gravham/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>

#include "gravham/dual.hpp"

namespace gravham {

namespace {

constexpr int kD = 4;
// Dual lanes: 0..5 site metric pairs, 6..11 derivative pairs, 12..17 momenta.
constexpr int kLanes = 3 * kSpatialPairs;
using D18 = Dual<kLanes>;

template <typename S>
MetricState<S> site_metric(const double* gsite) {
  DenseTensor<S> g(kD, {Variance::Lower, Variance::Lower});
  g(0, 0) = S(-1.0);
  for (int p = 0; p < kSpatialPairs; ++p) {
    g(kPairA[p], kPairB[p]) = S(gsite[p]);
    g(kPairB[p], kPairA[p]) = g(kPairA[p], kPairB[p]);
  }
  try {
    return invert_metric(g);
  } catch (const Error& e) {
    throw MetricDegenerated(std::string("site metric unusable: ") + e.what());
  }
}

struct SiteGrads {
  double dg[kSpatialPairs];   // dH_c/dg_mn (independent-variable convention)
  double dd[kSpatialPairs];   // dH_c/d(g_mn,1)
  double dpi[kSpatialPairs];  // dH_c/dpi^mn
};

// One dual-number sweep per site: H_c with all 18 local inputs seeded.
SiteGrads site_gradients(const double* gsite, const double* dsite, const double* psite) {
  DenseTensor<D18> gl(kD, {Variance::Lower, Variance::Lower});
  gl(0, 0) = D18(-1.0);
  for (int p = 0; p < kSpatialPairs; ++p) {
    D18 v = D18::seed(gsite[p], p);
    gl(kPairA[p], kPairB[p]) = v;
    gl(kPairB[p], kPairA[p]) = v;
  }
  MetricState<D18> m;
  try {
    m = invert_metric(gl);
  } catch (const Error& e) {
    throw MetricDegenerated(std::string("site metric unusable: ") + e.what());
  }
  FieldPoint<D18> fp = make_field_point(std::move(m));
  for (int p = 0; p < kSpatialPairs; ++p) {
    D18 dv = D18::seed(dsite[p], kSpatialPairs + p);
    fp.d_spatial(kPairA[p], kPairB[p], 1) = dv;
    fp.d_spatial(kPairB[p], kPairA[p], 1) = dv;
    D18 pv = D18::seed(psite[p], 2 * kSpatialPairs + p);
    fp.momentum(kPairA[p], kPairB[p]) = pv;
    fp.momentum(kPairB[p], kPairA[p]) = pv;
  }
  D18 h = hamiltonian_Hc(fp);
  SiteGrads out;
  for (int p = 0; p < kSpatialPairs; ++p) {
    out.dg[p] = h.d[p];
    out.dd[p] = h.d[kSpatialPairs + p];
    out.dpi[p] = h.d[2 * kSpatialPairs + p];
  }
  return out;
}

// Canonical weight translating independent-variable gradients into the
// symmetric-pair bracket: {g_mn, pi^pq} = 1 on the diagonal, 1/2 off it.
double pair_weight(int p) { return kPairA[p] == kPairB[p] ? 1.0 : 0.5; }

struct StencilTable {
  // fwd[j] = sites and weights building D(j); rev[i] = (j, c) pairs where
  // site i's metric enters D(j) with weight c.
  std::vector<std::vector<std::pair<int, double>>> fwd, rev;
};

StencilTable build_stencils(const LatticeField& lat) {
  StencilTable t;
  t.fwd.resize(lat.n);
  t.rev.resize(lat.n);
  for (int j = 0; j < lat.n; ++j) t.fwd[j] = deriv_stencil(lat, j);
  for (int j = 0; j < lat.n; ++j)
    for (auto [s, c] : t.fwd[j]) t.rev[s].push_back({j, c});
  return t;
}

void compute_derivs(const LatticeField& lat, const StencilTable& st,
                    const std::vector<double>& g, std::vector<double>& deriv) {
  deriv.assign(g.size(), 0.0);
  for (int j = 0; j < lat.n; ++j)
    for (auto [s, c] : st.fwd[j])
      for (int p = 0; p < kSpatialPairs; ++p)
        deriv[j * kSpatialPairs + p] += c * g[s * kSpatialPairs + p];
}

void for_each_site(int n, const std::function<void(int)>& body) {
  int workers = std::min(max_threads(), n);
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    int lo = w * chunk, hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([&body, lo, hi] {
      for (int i = lo; i < hi; ++i) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

// Time derivatives of (g, pi). Gradients of the lattice Hamiltonian assemble
// per site from the local sweep plus the derivative coupling pulled back
// through the reverse stencil.
void force(const LatticeField& lat, const StencilTable& st, const std::vector<double>& g,
           const std::vector<double>& pi, std::vector<double>& gdot,
           std::vector<double>& pidot) {
  const int n = lat.n;
  std::vector<double> deriv;
  compute_derivs(lat, st, g, deriv);
  std::vector<SiteGrads> grads(n);
  for_each_site(n, [&](int i) {
    grads[i] = site_gradients(&g[i * kSpatialPairs], &deriv[i * kSpatialPairs],
                              &pi[i * kSpatialPairs]);
  });
  gdot.assign(g.size(), 0.0);
  pidot.assign(g.size(), 0.0);
  const bool fixed = lat.boundary == Boundary::Fixed;
  for (int i = 0; i < n; ++i) {
    if (fixed && (i == 0 || i == n - 1)) continue;  // clamped ends
    for (int p = 0; p < kSpatialPairs; ++p) {
      double dHdg = grads[i].dg[p];
      for (auto [j, c] : st.rev[i]) dHdg += c * grads[j].dd[p];
      const double w = pair_weight(p);
      gdot[i * kSpatialPairs + p] = w * grads[i].dpi[p];
      pidot[i * kSpatialPairs + p] = -w * dHdg;
    }
  }
}

}  // namespace

LatticeField make_flat(int n, double dx, Boundary boundary) {
  if (n < 8) throw BadInput("lattice needs at least 8 sites");
  if (dx <= 0.0) throw BadInput("spacing must be positive");
  LatticeField lat;
  lat.n = n;
  lat.dx = dx;
  lat.boundary = boundary;
  lat.g.assign(static_cast<size_t>(n) * kSpatialPairs, 0.0);
  lat.pi.assign(lat.g.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    lat.g_at(i, 0) = 1.0;  // g_11
    lat.g_at(i, 3) = 1.0;  // g_22
    lat.g_at(i, 5) = 1.0;  // g_33
  }
  return lat;
}

LatticeField make_kick(int n, double dx, double amplitude, Boundary boundary, int site) {
  LatticeField lat = make_flat(n, dx, boundary);
  if (site < 0) site = n / 2;
  if (site >= n) throw BadInput("kick site out of range");
  lat.pi_at(site, 0) = amplitude;  // pi^11
  return lat;
}

std::vector<std::pair<int, double>> deriv_stencil(const LatticeField& lat, int j) {
  const double h = 0.5 / lat.dx;
  if (lat.boundary == Boundary::Periodic) {
    int jm = (j + lat.n - 1) % lat.n, jp = (j + 1) % lat.n;
    return {{jm, -h}, {jp, +h}};
  }
  if (j == 0) return {{0, -3 * h}, {1, 4 * h}, {2, -h}};
  if (j == lat.n - 1) return {{lat.n - 1, 3 * h}, {lat.n - 2, -4 * h}, {lat.n - 3, h}};
  return {{j - 1, -h}, {j + 1, +h}};
}

FieldPoint<double> field_point_at(const LatticeField& lat, int site) {
  if (site < 0 || site >= lat.n) throw BadInput("site out of range");
  FieldPoint<double> p = make_field_point(site_metric<double>(&lat.g[site * kSpatialPairs]));
  for (auto [s, c] : deriv_stencil(lat, site))
    for (int q = 0; q < kSpatialPairs; ++q) {
      p.d_spatial(kPairA[q], kPairB[q], 1) += c * lat.g_at(s, q);
      p.d_spatial(kPairB[q], kPairA[q], 1) = p.d_spatial(kPairA[q], kPairB[q], 1);
    }
  for (int q = 0; q < kSpatialPairs; ++q) {
    p.momentum(kPairA[q], kPairB[q]) = lat.pi_at(site, q);
    p.momentum(kPairB[q], kPairA[q]) = lat.pi_at(site, q);
  }
  return p;
}

std::vector<double> energy_density(const LatticeField& lat) {
  std::vector<double> dens(lat.n);
  for_each_site(lat.n, [&](int i) { dens[i] = hamiltonian_Hc(field_point_at(lat, i)); });
  return dens;
}

double total_energy(const LatticeField& lat) {
  std::vector<double> dens = energy_density(lat);
  double s = 0.0;
  for (double v : dens) s += v;
  return s;
}

std::pair<double, double> gauss_energy(const LatticeField& lat) {
  const int n = lat.n;
  std::vector<double> G(n);
  for (int i = 0; i < n; ++i) G[i] = flux_vector(field_point_at(lat, i))(1);
  double volume = 0.0, surface = 0.0;
  if (lat.boundary == Boundary::Periodic) {
    for (int i = 0; i < n; ++i) {
      int im = (i + n - 1) % n, ip = (i + 1) % n;
      volume += (G[ip] - G[im]) / (2.0 * lat.dx) * lat.dx;
    }
    surface = 0.0;  // no boundary
  } else {
    for (int i = 0; i < n; ++i) {
      double div;
      if (i == 0)
        div = (-3 * G[0] + 4 * G[1] - G[2]) / (2.0 * lat.dx);
      else if (i == n - 1)
        div = (3 * G[n - 1] - 4 * G[n - 2] + G[n - 3]) / (2.0 * lat.dx);
      else
        div = (G[i + 1] - G[i - 1]) / (2.0 * lat.dx);
      double w = (i == 0 || i == n - 1) ? 0.5 : 1.0;
      volume += w * div * lat.dx;
    }
    surface = G[n - 1] - G[0];  // outward normals +x and -x
  }
  return {volume, surface};
}

EvolveResult hamilton_evolve(const LatticeField& lat, double dt, int steps,
                             const EvolveOptions& opts) {
  if (steps < 0 || dt <= 0.0) throw BadInput("need dt > 0 and steps >= 0");
  if (dt > opts.cfl_factor * lat.dx)
    throw UnstableStep("dt = " + std::to_string(dt) + " exceeds stability bound " +
                       std::to_string(opts.cfl_factor * lat.dx));
  StencilTable st = build_stencils(lat);
  EvolveResult res;
  res.state = lat;
  res.energy.reserve(steps + 1);
  const double h0 = total_energy(res.state);
  res.energy.push_back(h0);
  const double guard = opts.drift_guard * std::max(1.0, std::abs(h0));

  auto snapshot = [&](int step) {
    res.snapshots.push_back({step, res.state.g, res.state.pi, energy_density(res.state)});
  };
  snapshot(0);

  std::vector<double> gh(lat.g.size()), ph(lat.g.size()), gdot, pidot;
  for (int s = 1; s <= steps; ++s) {
    const std::vector<double> g0 = res.state.g, p0 = res.state.pi;
    // Implicit midpoint: z_half = z0 + dt/2 f(z_half), fixed-point iteration
    // warm-started with an explicit half step.
    force(res.state, st, g0, p0, gdot, pidot);
    for (size_t i = 0; i < g0.size(); ++i) {
      gh[i] = g0[i] + 0.5 * dt * gdot[i];
      ph[i] = p0[i] + 0.5 * dt * pidot[i];
    }
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
      force(res.state, st, gh, ph, gdot, pidot);
      double delta = 0.0;
      for (size_t i = 0; i < g0.size(); ++i) {
        double ng = g0[i] + 0.5 * dt * gdot[i];
        double np = p0[i] + 0.5 * dt * pidot[i];
        delta = std::max({delta, std::abs(ng - gh[i]), std::abs(np - ph[i])});
        gh[i] = ng;
        ph[i] = np;
      }
      if (delta < opts.midpoint_tol) break;
    }
    if (it >= opts.max_iterations)
      throw UnstableStep("implicit stage failed to converge at step " + std::to_string(s));
    res.fp_iterations_max = std::max(res.fp_iterations_max, it + 1);
    for (size_t i = 0; i < g0.size(); ++i) {
      res.state.g[i] = 2.0 * gh[i] - g0[i];
      res.state.pi[i] = 2.0 * ph[i] - p0[i];
    }
    double h = total_energy(res.state);
    res.energy.push_back(h);
    if (std::abs(h - h0) > guard)
      throw UnstableStep("energy drift " + std::to_string(h - h0) + " at step " +
                         std::to_string(s));
    if (s % opts.record_stride == 0 || s == steps) snapshot(s);
  }
  return res;
}

std::vector<FrontInfo> front_diagnostics(const EvolveResult& traj, double threshold,
                                         int window) {
  if (traj.snapshots.empty()) throw NoFront("empty trajectory");
  double peak = 0.0;
  for (const auto& s : traj.snapshots)
    for (double v : s.density) peak = std::max(peak, std::abs(v));
  if (peak < 1e-14) throw NoFront("no energy anywhere along the trajectory");

  std::vector<FrontInfo> out;
  for (const auto& snap : traj.snapshots) {
    const int n = static_cast<int>(snap.density.size());
    double total = 0.0, mx = 0.0;
    for (double v : snap.density) {
      total += std::abs(v);
      mx = std::max(mx, std::abs(v));
    }
    FrontInfo info{snap.step, 0.0, 0.0, 0.0};
    int front = n - 1;
    if (threshold <= 0.0) {
      info.position = n - 1;
      info.energy_fraction = 1.0;
    } else {
      front = -1;
      for (int i = n - 1; i >= 0; --i)
        if (std::abs(snap.density[i]) > threshold * mx) {
          front = i;
          break;
        }
      if (front < 0) front = 0;
      info.position = front;
      double inside = 0.0;
      for (int i = std::max(0, front - window); i <= std::min(n - 1, front + window); ++i)
        inside += std::abs(snap.density[i]);
      info.energy_fraction = total > 0.0 ? inside / total : 0.0;
    }
    // Site-to-site variance behind the window, per component, then averaged
    // over components: zero iff the field is constant behind the front.
    const int behind_end = std::max(0, front - window);
    if (behind_end > 0) {
      double var_sum = 0.0;
      for (int p = 0; p < kSpatialPairs; ++p) {
        double mean = 0.0;
        for (int i = 0; i < behind_end; ++i) mean += snap.g[i * kSpatialPairs + p];
        mean /= behind_end;
        double var = 0.0;
        for (int i = 0; i < behind_end; ++i) {
          double dev = snap.g[i * kSpatialPairs + p] - mean;
          var += dev * dev;
        }
        var_sum += var / behind_end;
      }
      info.behind_front_variance = var_sum / kSpatialPairs;
    }
    out.push_back(info);
  }
  return out;
}

}  // namespace gravham
