#include "gravham/verify.hpp"

#include <cmath>
#include <functional>
#include <string>

#include "gravham/canonical.hpp"
#include "gravham/field_point.hpp"

namespace gravham {

namespace {

// Zero-shift point with purely spatial velocities and derivatives: the
// frozen-temporal-row domain on which the kinetic block inverts, the momentum
// map round-trips, and the action splits into its three displayed terms.
FieldPoint<double> sample_canonical_point(Rng& rng, int d) {
  auto p = make_field_point(random_metric(rng, d, 0.3, /*zero_shift=*/true));
  for (int m = 1; m < d; ++m)
    for (int n = m; n < d; ++n) {
      p.velocity(m, n) = p.velocity(n, m) = uniform(rng, -0.5, 0.5);
      p.momentum(m, n) = p.momentum(n, m) = uniform(rng, -0.5, 0.5);
      for (int k = 1; k < d; ++k)
        p.d_spatial(m, n, k) = p.d_spatial(n, m, k) = uniform(rng, -0.5, 0.5);
    }
  return p;
}

// Fully general point: shift, temporal velocities, everything nonzero.
FieldPoint<double> sample_general_point(Rng& rng, int d) {
  auto p = make_field_point(random_metric(rng, d, 0.3));
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      p.velocity(a, b) = p.velocity(b, a) = uniform(rng, -0.5, 0.5);
      p.momentum(a, b) = p.momentum(b, a) = uniform(rng, -0.5, 0.5);
      for (int k = 1; k < d; ++k)
        p.d_spatial(a, b, k) = p.d_spatial(b, a, k) = uniform(rng, -0.5, 0.5);
    }
  return p;
}

double check_direct_inverse(Rng& rng, int d, int samples) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s)
    worst = std::max(worst, check_IE_inverse(random_metric(rng, d, 0.3)));
  return worst;
}

// I times the kinetic block of the structure tensor, which must reproduce
// g^00 times the symmetric pair delta on zero-shift metrics. The B values
// come from `b_src` so the fault fixture can redirect them.
double check_kinetic_block(
    Rng& rng, int d, int samples,
    const std::function<double(const MetricState<double>&, int, int, int, int, int, int)>&
        b_src) {
  auto bds_src = [&](const MetricState<double>& g, int a, int b, int c, int m, int n, int o) {
    return 0.25 * (b_src(g, a, b, c, m, n, o) + b_src(g, a, b, o, m, n, c) +
                   b_src(g, b, a, c, m, n, o) + b_src(g, b, a, o, m, n, c));
  };
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto g = random_metric(rng, d, 0.3, /*zero_shift=*/true);
    for (int m = 1; m < d; ++m)
      for (int n = 1; n < d; ++n)
        for (int k = 1; k < d; ++k)
          for (int l = 1; l < d; ++l) {
            double acc = 0.0;
            for (int p = 1; p < d; ++p)
              for (int q = 1; q < d; ++q)
                acc += i_component(g, m, n, p, q) * bds_src(g, p, q, 0, k, l, 0);
            acc /= g.upper(0, 0);
            double expect = 0.5 * ((m == k && n == l ? 1.0 : 0.0) +
                                   (m == l && n == k ? 1.0 : 0.0));
            worst = std::max(worst, std::abs(acc - expect));
          }
  }
  return worst;
}

double check_b_symmetries(Rng& rng, int d, int samples) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto g = random_metric(rng, d, 0.3);
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int m = 0; m < d; ++m)
            for (int n = 0; n < d; ++n)
              for (int o = 0; o < d; ++o) {
                worst = std::max(worst, std::abs(bs_component(g, a, b, c, m, n, o) -
                                                 bs_component(g, a, b, o, m, n, c)));
                worst = std::max(worst, std::abs(bds_component(g, a, b, c, m, n, o) -
                                                 bds_component(g, b, a, o, m, n, c)));
              }
  }
  return worst;
}

double check_e_inverse(Rng& rng, int d, int samples) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto g = random_metric(rng, d, 0.3);
    for (int m = 0; m < d; ++m)
      for (int l = 1; l < d; ++l) {
        double acc = 0.0;
        for (int k = 0; k < d; ++k) acc += e_component(g, m, k) * g.lower(k, l);
        worst = std::max(worst, std::abs(acc - (m == l ? 1.0 : 0.0)));
      }
  }
  return worst;
}

double check_lagrangian_equality(Rng& rng, int d, int samples) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto p = sample_general_point(rng, d);
    double lb = lagrangian_B(p);
    double lgg = lagrangian_gamma_gamma(p);
    worst = std::max(worst, std::abs(lgg - lb) / std::max(1.0, std::abs(lgg)));
  }
  return worst;
}

double check_lagrangian_split(Rng& rng, int d, int samples) {
  // The three-term split uses the pair-symmetrised cross kernel, which agrees
  // with the slot decomposition of the full quadratic form only when the
  // temporal metric row is frozen; sample accordingly.
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto p = sample_canonical_point(rng, d);
    auto parts = lagrangian_split(p);
    double sum = parts.kinetic + parts.cross + parts.spatial;
    worst = std::max(worst, std::abs(sum - lagrangian_B(p)));
  }
  return worst;
}

double check_legendre_roundtrip(Rng& rng, int d, int samples) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto p = sample_canonical_point(rng, d);
    FieldPoint<double> q = p;
    q.momentum = momentum_from_velocity(p);
    auto vel = velocity_from_momentum(q);
    double scale = 1.0;
    for (int m = 1; m < d; ++m)
      for (int n = 1; n < d; ++n) scale = std::max(scale, std::abs(p.velocity(m, n)));
    for (int m = 1; m < d; ++m)
      for (int n = 1; n < d; ++n)
        worst = std::max(worst, std::abs(vel(m, n) - p.velocity(m, n)) / scale);
  }
  return worst;
}

double check_legendre_flat_example(int d) {
  auto p = make_field_point(invert_metric(minkowski(d)));
  for (int m = 2; m < d; ++m) p.momentum(m, m) = -0.5;
  auto vel = velocity_from_momentum(p);
  double worst = 0.0;
  for (int m = 1; m < d; ++m)
    for (int n = 1; n < d; ++n)
      worst = std::max(worst, std::abs(vel(m, n) - (m == 1 && n == 1 ? 1.0 : 0.0)));
  return worst;
}

double check_hamiltonian_legendre(Rng& rng, int d, int samples) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto p = sample_canonical_point(rng, d);
    FieldPoint<double> q = p;
    q.momentum = momentum_from_velocity(p);
    double pv = 0.0;
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b) pv += q.momentum(a, b) * p.velocity(a, b);
    double h = pv - lagrangian_B(p);
    double hc = hamiltonian_Hc(q);
    worst = std::max(worst, std::abs(h - hc) / std::max(1.0, std::abs(hc)));
  }
  return worst;
}

double check_canonical_pairs(Rng& rng, int d) {
  auto p = sample_general_point(rng, d);
  auto value = [&](int ga, int gb, int pa, int pb) {
    CanonicalExpr g(Symbol::g_lower(ga, gb));
    CanonicalExpr pi(Symbol::momentum(pa, pb));
    return eval(poisson_bracket(g, pi), p);
  };
  double worst = std::abs(value(1, 1, 1, 1) - 1.0);
  worst = std::max(worst, std::abs(value(1, 2, 1, 2) - 0.5));
  worst = std::max(worst, std::abs(value(1, 2, 1, 1)));
  CanonicalExpr g11(Symbol::g_lower(1, 1));
  CanonicalExpr pi11(Symbol::momentum(1, 1));
  worst = std::max(worst, std::abs(eval(poisson_bracket(pi11, g11), p) + 1.0));
  return worst;
}

double check_bracket_axioms(Rng& rng, int d, int triples) {
  double worst = 0.0;
  for (int t = 0; t < triples; ++t) {
    auto p = sample_general_point(rng, d);
    CanonicalExpr A = random_expr(rng, d, 2);
    CanonicalExpr B = random_expr(rng, d, 2);
    CanonicalExpr C = random_expr(rng, d, 2);
    double anti = eval(poisson_bracket(A, B) + poisson_bracket(B, A), p);
    double leib =
        eval(poisson_bracket(A, B * C) - poisson_bracket(A, B) * C - B * poisson_bracket(A, C), p);
    double jac = eval(poisson_bracket(A, poisson_bracket(B, C)) +
                          poisson_bracket(B, poisson_bracket(C, A)) +
                          poisson_bracket(C, poisson_bracket(A, B)),
                      p);
    double scale = std::max(1.0, std::abs(eval(A, p)) * std::abs(eval(B, p)) *
                                     std::max(1.0, std::abs(eval(C, p))));
    worst = std::max({worst, std::abs(anti) / scale, std::abs(leib) / scale,
                      std::abs(jac) / scale});
  }
  return worst;
}

double check_bracket_routes(Rng& rng, int d, int samples) {
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto p = sample_general_point(rng, d);
    for (int pp = 1; pp < d; ++pp)
      for (int q = pp; q < d; ++q) {
        auto direct = bracket_pi_with_Bg(p, pp, q);
        auto engine = bracket_pi_with_Bg_engine(p, pp, q);
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n)
            worst = std::max(worst, std::abs(direct(m, n) - engine(m, n)));
      }
  }
  return worst;
}

std::string nsamp(int samples, int d) {
  return std::to_string(samples) + " samples, d=" + std::to_string(d);
}

}  // namespace

Report run_verify(const VerifyOptions& opt) {
  Report r;
  r.tool = "verify";
  r.d = opt.d;
  r.seed = opt.seed;
  r.fact("samples", std::to_string(opt.samples));
  if (opt.inject_bug) r.fact("fault_fixture", "structure-tensor sign flip active");

  try {
    require_dimension(opt.d);
  } catch (const Error& e) {
    r.add_error("dimension admissibility", e);
    return r;
  }

  Rng rng(opt.seed);
  const int d = opt.d;
  const int n = opt.samples;
  const int n_heavy = std::max(4, n / 4);

  auto b_src = [flip = opt.inject_bug](const MetricState<double>& g, int a, int b, int c,
                                       int m, int n2, int o) {
    double v = b_component(g, a, b, c, m, n2, o);
    if (flip) v += 2.0 * g.upper(a, m) * g.upper(b, n2) * g.upper(c, o);
    return v;
  };

  r.add("inverse identity (direct)", check_direct_inverse(rng, d, n), 1e-10,
        "I against the temporal-projected E, " + nsamp(n, d));
  r.add("kinetic block inverse (B route)", check_kinetic_block(rng, d, n_heavy, b_src), 1e-10,
        "I against the structure-tensor kinetic block, zero-shift, " + nsamp(n_heavy, d));
  r.add("derivative-slot symmetry", check_b_symmetries(rng, d, std::min(n, 8)), 1e-12,
        "single and double symmetrizations, " + nsamp(std::min(n, 8), d));
  r.add("temporal projection inverse", check_e_inverse(rng, d, n), 1e-12,
        "e^mk g_kl = delta on spatial columns, " + nsamp(n, d));
  r.add("first-derivative action equality", check_lagrangian_equality(rng, d, n_heavy), 1e-9,
        "quadratic form vs Christoffel form, relative, " + nsamp(n_heavy, d));
  r.add("action split consistency", check_lagrangian_split(rng, d, n_heavy), 1e-10,
        "kinetic + cross + spatial vs whole, " + nsamp(n_heavy, d));
  r.add("momentum map round-trip", check_legendre_roundtrip(rng, d, n), 1e-8,
        "velocity -> momentum -> velocity, relative, " + nsamp(n, d));
  r.add("canonical pair values", check_canonical_pairs(rng, d), 1e-11,
        "fundamental bracket on index pairs");
  r.add("bracket axioms", check_bracket_axioms(rng, d, std::max(10, n / 4)), 1e-11,
        "antisymmetry, Leibniz, Jacobi on random degree-2 expressions");
  r.add("momentum-structure bracket routes", check_bracket_routes(rng, d, std::min(n, 10)),
        1e-11, "direct Leibniz expansion vs generic engine, " + nsamp(std::min(n, 10), d));
  return r;
}

Report run_tensor_checks(int d, std::uint64_t seed, int samples, double tol) {
  if (tol <= 0.0) tol = 1e-10;
  Report r;
  r.tool = "tensors";
  r.d = d;
  r.seed = seed;
  r.fact("samples", std::to_string(samples));
  try {
    require_dimension(d);
  } catch (const Error& e) {
    r.add_error("dimension admissibility", e);
    return r;
  }
  Rng rng(seed);
  r.add("inverse identity (direct)", check_direct_inverse(rng, d, samples), tol,
        "I against the temporal-projected E, " + nsamp(samples, d));
  double route = 0.0;
  for (int s = 0; s < samples; ++s) {
    auto g = random_metric(rng, d, 0.3);
    auto a = tensor_E(g);
    auto b = tensor_E_from_g(g);
    for (int p = 0; p < d; ++p)
      for (int q = 0; q < d; ++q)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l)
            route = std::max(route, std::abs(a(p, q, k, l) - b(p, q, k, l)));
  }
  r.add("projected-tensor route equality", route, 1e-12,
        "e-product form vs expanded inverse-metric form, " + nsamp(samples, d));
  r.add("derivative-slot symmetry", check_b_symmetries(rng, d, std::min(samples, 8)), 1e-12,
        "single and double symmetrizations, " + nsamp(std::min(samples, 8), d));
  r.add("temporal projection inverse", check_e_inverse(rng, d, samples), 1e-12,
        "e^mk g_kl = delta on spatial columns, " + nsamp(samples, d));
  return r;
}

Report run_legendre_checks(int d, std::uint64_t seed, int samples, double tol) {
  if (tol <= 0.0) tol = 1e-8;
  Report r;
  r.tool = "legendre";
  r.d = d;
  r.seed = seed;
  r.fact("samples", std::to_string(samples));
  try {
    require_dimension(d);
  } catch (const Error& e) {
    r.add_error("dimension admissibility", e);
    return r;
  }
  Rng rng(seed);
  r.add("momentum map round-trip", check_legendre_roundtrip(rng, d, samples), tol,
        "velocity -> momentum -> velocity, relative, " + nsamp(samples, d));
  r.add("flat single-velocity inversion", check_legendre_flat_example(d), 1e-14,
        "spatial-diagonal momenta (0, -1/2, ...) recover g_11,0 = 1");
  r.add("hamiltonian Legendre consistency", check_hamiltonian_legendre(rng, d, samples), 1e-8,
        "pi g,0 - L against the canonical density, on-shell, " + nsamp(samples, d));
  return r;
}

}  // namespace gravham
