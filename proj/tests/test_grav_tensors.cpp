#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "gravham/grav_tensors.hpp"

using namespace gravham;

namespace {

// Independent of b_component: the four terms written one by one.
double b_oracle(const MetricState<double>& g, int a, int b, int c, int m, int n, int o) {
  auto u = [&](int i, int j) { return g.upper(i, j); };
  double t1 = u(a, b) * u(c, o) * u(m, n);
  double t2 = -u(a, m) * u(b, n) * u(c, o);
  double t3 = 2.0 * u(a, o) * u(b, n) * u(c, m);
  double t4 = -2.0 * u(a, b) * u(c, m) * u(n, o);
  return t1 + t2 + t3 + t4;
}

}  // namespace

TEST_CASE("spatial quadratic form at flat metrics") {
  auto flat4 = invert_metric(minkowski(4));
  CHECK(i_component(flat4, 1, 1, 1, 1) == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(i_component(flat4, 1, 1, 2, 2) == doctest::Approx(0.5).epsilon(1e-14));
  auto flat3 = invert_metric(minkowski(3));
  CHECK(i_component(flat3, 1, 1, 1, 1) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(tensor_I(invert_metric(minkowski(2))), DimensionTooSmall);
}

TEST_CASE("spatial quadratic form pair symmetry") {
  Rng rng(21);
  for (int s = 0; s < 10; ++s) {
    auto m = random_metric(rng, 4);
    auto I = tensor_I(m);
    for (int a = 1; a < 4; ++a)
      for (int b = 1; b < 4; ++b)
        for (int p = 1; p < 4; ++p)
          for (int q = 1; q < 4; ++q)
            CHECK(I(a, b, p, q) == doctest::Approx(I(p, q, a, b)).epsilon(1e-13));
  }
}

TEST_CASE("rank-6 structure tensor at flat metrics") {
  auto flat = invert_metric(minkowski(4));
  CHECK(b_component(flat, 0, 0, 0, 0, 0, 0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(b_component(flat, 1, 1, 0, 0, 0, 0) == doctest::Approx(-1.0).epsilon(1e-14));
  // mixed block: B^mn0pq0 = -(delta^mn delta^pq - delta^mp delta^nq) at flat
  for (int m = 1; m < 4; ++m)
    for (int n = 1; n < 4; ++n)
      for (int p = 1; p < 4; ++p)
        for (int q = 1; q < 4; ++q) {
          double expect = -((m == n ? 1.0 : 0.0) * (p == q ? 1.0 : 0.0) -
                            (m == p ? 1.0 : 0.0) * (n == q ? 1.0 : 0.0));
          CHECK(b_component(flat, m, n, 0, p, q, 0) == doctest::Approx(expect).epsilon(1e-14));
        }
}

TEST_CASE("rank-6 structure tensor matches the term-by-term oracle") {
  Rng rng(22);
  for (int s = 0; s < 5; ++s) {
    auto m = random_metric(rng, 4);
    auto B = tensor_B(m);
    std::vector<int> idx(6, 0);
    double worst = 0.0;
    do {
      worst = std::max(worst, std::abs(B.at(idx) - b_oracle(m, idx[0], idx[1], idx[2], idx[3],
                                                            idx[4], idx[5])));
    } while (detail::advance(idx, 4));
    CHECK(worst < 1e-13);
  }
}

TEST_CASE("derivative-slot symmetrization averages two lookups") {
  Rng rng(23);
  auto m = random_metric(rng, 4);
  auto flat = invert_metric(minkowski(4));
  CHECK(bs_component(flat, 0, 0, 0, 0, 0, 0) == doctest::Approx(0.0).epsilon(1e-14));
  std::vector<int> idx(6, 0);
  do {
    double avg = 0.5 * (b_oracle(m, idx[0], idx[1], idx[2], idx[3], idx[4], idx[5]) +
                        b_oracle(m, idx[0], idx[1], idx[5], idx[3], idx[4], idx[2]));
    CHECK(std::abs(bs_component(m, idx[0], idx[1], idx[2], idx[3], idx[4], idx[5]) - avg) <
          1e-13);
  } while (detail::advance(idx, 4));
}

TEST_CASE("double symmetrization averages four lookups and is pair symmetric") {
  Rng rng(24);
  auto m = random_metric(rng, 4);
  std::vector<int> idx(6, 0);
  do {
    int a = idx[0], b = idx[1], c = idx[2], mm = idx[3], n = idx[4], o = idx[5];
    double avg = 0.25 * (b_oracle(m, a, b, c, mm, n, o) + b_oracle(m, a, b, o, mm, n, c) +
                         b_oracle(m, b, a, c, mm, n, o) + b_oracle(m, b, a, o, mm, n, c));
    CHECK(std::abs(bds_component(m, a, b, c, mm, n, o) - avg) < 1e-13);
    CHECK(bds_component(m, a, b, c, mm, n, o) ==
          doctest::Approx(bds_component(m, b, a, c, mm, n, o)).epsilon(1e-14));
  } while (detail::advance(idx, 4));
  // degenerate permutations collapse to the plain component
  auto flat = invert_metric(minkowski(4));
  CHECK(bds_component(flat, 1, 1, 0, 1, 1, 0) ==
        doctest::Approx(b_component(flat, 1, 1, 0, 1, 1, 0)).epsilon(1e-14));
}

TEST_CASE("double symmetrization reduces to single on a repeated pair index") {
  Rng rng(25);
  for (int s = 0; s < 5; ++s) {
    auto m = random_metric(rng, 4);
    for (int a = 0; a < 4; ++a)
      for (int c = 0; c < 4; ++c)
        for (int mm = 0; mm < 4; ++mm)
          for (int n = 0; n < 4; ++n)
            for (int o = 0; o < 4; ++o)
              CHECK(bds_component(m, a, a, c, mm, n, o) ==
                    doctest::Approx(bs_component(m, a, a, c, mm, n, o)).epsilon(1e-13));
  }
}

TEST_CASE("temporal projection") {
  Rng rng(26);
  auto flat = invert_metric(minkowski(4));
  for (int m = 1; m < 4; ++m)
    for (int n = 1; n < 4; ++n)
      CHECK(e_component(flat, m, n) == doctest::Approx(m == n ? 1.0 : 0.0).epsilon(1e-14));
  for (int s = 0; s < 20; ++s) {
    auto g = random_metric(rng, 4);
    auto e = tensor_e(g);
    for (int v = 0; v < 4; ++v) {
      CHECK(std::abs(e(0, v)) < 1e-13);
      CHECK(std::abs(e(v, 0)) < 1e-13);
    }
    // spatial block inverts the spatial metric block
    for (int m = 1; m < 4; ++m)
      for (int k = 1; k < 4; ++k) {
        double s2 = 0.0;
        for (int n = 1; n < 4; ++n) s2 += e(m, n) * g.lower(n, k);
        CHECK(std::abs(s2 - (m == k ? 1.0 : 0.0)) < 1e-11);
      }
  }
}

TEST_CASE("projected rank-4 tensor values and symmetry") {
  auto flat = invert_metric(minkowski(4));
  CHECK(E_component(flat, 1, 1, 2, 2) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(E_component(flat, 1, 2, 1, 2) == doctest::Approx(-1.0).epsilon(1e-14));
  Rng rng(27);
  for (int s = 0; s < 10; ++s) {
    auto g = random_metric(rng, 4);
    auto E = tensor_E(g);
    for (int p = 0; p < 4; ++p)
      for (int q = 0; q < 4; ++q)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) {
            if (p == 0 || q == 0 || k == 0 || l == 0) CHECK(std::abs(E(p, q, k, l)) < 1e-12);
            CHECK(E(p, q, k, l) == doctest::Approx(E(k, l, p, q)).epsilon(1e-12));
          }
  }
}

TEST_CASE("two routes to the projected tensor agree") {
  Rng rng(28);
  for (int s = 0; s < 20; ++s) {
    auto g = random_metric(rng, 4);
    CHECK(max_abs_diff(tensor_E(g), tensor_E_from_g(g)) < 1e-12);
  }
}

TEST_CASE("master inverse identity across dimensions") {
  auto flat = invert_metric(minkowski(4));
  CHECK(check_IE_inverse(flat) < 1e-14);
  Rng rng(29);
  for (int d : {3, 4, 5}) {
    double worst = 0.0;
    for (int s = 0; s < 50; ++s) worst = std::max(worst, check_IE_inverse(random_metric(rng, d)));
    CHECK(worst < 1e-10);
  }
}

TEST_CASE("mixed delta acts as identity on symmetric pairs") {
  Rng rng(30);
  const int d = 4;
  auto D = delta_mixed(d);
  DenseTensor<double> s(d, {Variance::Lower, Variance::Lower});
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) s(i, j) = s(j, i) = uniform(rng, -1.0, 1.0);
  auto out = contract(D, s, {{0, 0}, {1, 1}});
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) CHECK(out(i, j) == doctest::Approx(s(i, j)).epsilon(1e-13));
}

TEST_CASE("raised delta matches its definition") {
  Rng rng(31);
  auto g = random_metric(rng, 4);
  auto D = delta_upper(g);
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) {
          double expect =
              0.5 * (g.upper(a, m) * g.upper(b, n) + g.upper(a, n) * g.upper(b, m));
          CHECK(D(m, n, a, b) == doctest::Approx(expect).epsilon(1e-13));
        }
}

TEST_CASE("degenerate temporal direction is rejected") {
  // force g^00 ~ 0: lightlike-ish time row via a crafted matrix
  DenseTensor<double> g(3, {Variance::Lower, Variance::Lower});
  g(0, 0) = 0.0;
  g(0, 1) = g(1, 0) = 1.0;
  g(1, 1) = 0.0;
  g(2, 2) = 1.0;
  // det = -1, inverse has g^00 = 0
  CHECK_THROWS_AS(invert_metric(g), TemporalDegeneracy);
}
