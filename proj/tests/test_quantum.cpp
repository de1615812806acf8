#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "gravham/grav_tensors.hpp"
#include "gravham/metric.hpp"
#include "gravham/quantum.hpp"

using namespace gravham;
using Complex = std::complex<double>;

namespace {

FieldPoint<double> flat_context(int d = 4) {
  DenseTensor<double> g(d, {Variance::Lower, Variance::Lower});
  for (int a = 0; a < d; ++a) g(a, a) = a == 0 ? -1.0 : 1.0;
  return make_field_point(invert_metric(g));
}

FieldPoint<double> perturbed_context() {
  DenseTensor<double> g(4, {Variance::Lower, Variance::Lower});
  g(0, 0) = -1.05;
  g(1, 1) = 1.1;
  g(2, 2) = 0.95;
  g(3, 3) = 1.02;
  g(0, 1) = g(1, 0) = 0.04;
  g(1, 2) = g(2, 1) = -0.06;
  FieldPoint<double> p = make_field_point(invert_metric(g));
  double v = 0.05;
  for (int a = 0; a < 4; ++a)
    for (int b = a; b < 4; ++b)
      for (int k = 1; k < 4; ++k) {
        p.d_spatial(a, b, k) = v;
        p.d_spatial(b, a, k) = v;
        v = -v * 0.9;
      }
  return p;
}

ConfigGrid line_grid(int points, double lo = 0.2, double hi = 1.8, int a = 1, int b = 1) {
  return ConfigGrid({GridAxis{a, b, lo, hi, points}});
}

// |psi|^2-weighted mean and standard deviation along one axis.
std::pair<double, double> packet_stats(const WaveFunction& psi, int axis) {
  double w = 0.0, m1 = 0.0;
  for (long idx = 0; idx < psi.grid.total_points(); ++idx) {
    double p = std::norm(psi.amp[idx]);
    w += p;
    m1 += p * psi.grid.point(idx)[axis];
  }
  double mean = m1 / w;
  double m2 = 0.0;
  for (long idx = 0; idx < psi.grid.total_points(); ++idx)
    m2 += std::norm(psi.amp[idx]) * std::pow(psi.grid.point(idx)[axis] - mean, 2);
  return {mean, std::sqrt(m2 / w)};
}

}  // namespace

TEST_CASE("grid indexing round-trips and guards its inputs") {
  ConfigGrid grid({GridAxis{1, 1, 0.4, 1.6, 16}, GridAxis{2, 2, 0.5, 1.5, 8}});
  CHECK(grid.axis_count() == 2);
  CHECK(grid.total_points() == 128);
  CHECK(grid.stride(0) == 8);
  CHECK(grid.stride(1) == 1);
  for (long idx : {0L, 17L, 127L}) CHECK(grid.flatten(grid.unflatten(idx)) == idx);
  CHECK(grid.coordinate(0, 0) == doctest::Approx(0.4));
  CHECK(grid.coordinate(0, 15) == doctest::Approx(1.6));
  CHECK(grid.cell_volume() ==
        doctest::Approx(grid.axis(0).spacing() * grid.axis(1).spacing()));
  CHECK(grid.interior(grid.flatten({5, 4})));
  CHECK_FALSE(grid.interior(grid.flatten({0, 4})));
  CHECK_FALSE(grid.interior(grid.flatten({5, 7})));

  CHECK_THROWS_AS(ConfigGrid({}), BadInput);
  CHECK_THROWS_AS(ConfigGrid({GridAxis{1, 1, 0.4, 1.6, 4}}), BadInput);
  CHECK_THROWS_AS(ConfigGrid({GridAxis{1, 1, 1.6, 0.4, 16}}), BadInput);
  CHECK_THROWS_AS(ConfigGrid({GridAxis{1, 1, -0.2, 1.6, 16}}), BadInput);  // diagonal margin
}

TEST_CASE("gaussian packets are unit norm with the requested moments") {
  auto grid = line_grid(256);
  auto psi = gaussian_packet(grid, {1.0}, {0.08}, {2.0});
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  auto [mean, sigma] = packet_stats(psi, 0);
  CHECK(mean == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(sigma == doctest::Approx(0.08).epsilon(1e-3));
  CHECK_THROWS_AS(gaussian_packet(grid, {1.0, 0.5}, {0.1}, {0.0}), BadInput);
  CHECK_THROWS_AS(gaussian_packet(grid, {1.0}, {-0.1}, {0.0}), BadInput);
}

TEST_CASE("canonical commutator residual refines at second order") {
  double r64 = quantum_bracket_check(line_grid(64));
  double r128 = quantum_bracket_check(line_grid(128));
  CHECK(r64 > 0.0);
  CHECK(r128 < r64);
  double h64 = line_grid(64).axis(0).spacing();
  double h128 = line_grid(128).axis(0).spacing();
  double order = std::log(r64 / r128) / std::log(h64 / h128);
  CHECK(order >= 1.8);
  CHECK(order <= 2.3);
}

TEST_CASE("mismatched components commute exactly") {
  ConfigGrid grid({GridAxis{1, 1, 0.4, 1.6, 24}, GridAxis{2, 2, 0.4, 1.6, 24}});
  auto g1 = position_operator(grid, 0);
  auto pi2 = momentum_operator(grid, 1);
  OperatorMatrix comm = g1 * pi2 - pi2 * g1;
  CHECK(comm.norm() == 0.0);
}

TEST_CASE("off-diagonal components carry the half-weight bracket") {
  ConfigGrid grid({GridAxis{1, 2, -0.4, 0.4, 128}});
  auto g12 = position_operator(grid, 0);
  auto pi12 = momentum_operator(grid, 0);
  auto psi = gaussian_packet(grid, {0.0}, {0.1}, {1.0});
  Eigen::VectorXcd r = (g12 * pi12 - pi12 * g12) * psi.amp - Complex(0.0, 0.5) * psi.amp;
  double num = 0.0;
  for (long idx = 0; idx < grid.total_points(); ++idx)
    if (grid.interior(idx)) num += std::norm(r[idx]);
  CHECK(std::sqrt(num * grid.cell_volume()) < 5e-3);
}

TEST_CASE("plane waves are exact eigenvectors of the discrete derivative") {
  const int n = 129;
  auto grid = line_grid(n);
  const double h = grid.axis(0).spacing();
  const double k = 3.0;
  WaveFunction psi{grid, Eigen::VectorXcd(n)};
  for (long idx = 0; idx < n; ++idx)
    psi.amp[idx] = std::exp(Complex(0.0, k * grid.coordinate(0, idx)));
  auto pi = momentum_operator(grid, 0);
  Eigen::VectorXcd out = pi * psi.amp;
  const double eig = std::sin(k * h) / h;  // discrete symbol of -i d/dg
  for (long idx = 2; idx < n - 2; ++idx)
    CHECK(std::abs(out[idx] - eig * psi.amp[idx]) < 1e-12);
  // eigenvalue approaches hbar*k at second order with the textbook constant
  CHECK(std::abs(eig - k) < k * (k * h) * (k * h) / 6.0 * 1.01);
  CHECK(std::abs(eig - k) > k * (k * h) * (k * h) / 6.0 * 0.9);
}

TEST_CASE("gauge shifts must be cross-derivative symmetric") {
  ConfigGrid grid({GridAxis{1, 1, 0.4, 1.6, 16}, GridAxis{2, 2, 0.4, 1.6, 16}});
  GaugeFunctions good = {[](const std::vector<double>& x) { return x[1]; },
                         [](const std::vector<double>& x) { return x[0]; }};
  CHECK_NOTHROW(momentum_operator(grid, 0, 1.0, good));

  GaugeFunctions bad = {[](const std::vector<double>& x) { return x[1]; },
                        [](const std::vector<double>&) { return 0.0; }};
  CHECK_THROWS_AS(momentum_operator(grid, 0, 1.0, bad), NonIntegrableGauge);

  GaugeFunctions short_list = {[](const std::vector<double>&) { return 0.0; }};
  CHECK_THROWS_AS(momentum_operator(grid, 0, 1.0, short_list), BadInput);

  // one retained variable: any shift is a gradient
  auto line = line_grid(32);
  GaugeFunctions any = {[](const std::vector<double>& x) { return x[0] * x[0]; }};
  CHECK_NOTHROW(momentum_operator(line, 0, 1.0, any));
}

TEST_CASE("gauge shift enters as a diagonal imaginary term") {
  auto grid = line_grid(64);
  GaugeFunctions f = {[](const std::vector<double>&) { return 0.7; }};
  auto with = momentum_operator(grid, 0, 1.0, f);
  auto without = momentum_operator(grid, 0, 1.0);
  OperatorMatrix diff = with - without;
  auto psi = gaussian_packet(grid, {1.0}, {0.2}, {0.0});
  Eigen::VectorXcd r = diff * psi.amp - Complex(0.0, -0.7) * psi.amp;
  CHECK(r.norm() < 1e-13);
}

TEST_CASE("flat-context generator is hermitian with the expected kinetic weight") {
  auto grid = line_grid(96);
  HamiltonianInfo info;
  auto H = build_hamiltonian_operator(grid, flat_context(), 1.0, true, &info);
  CHECK(info.frozen);
  CHECK_FALSE(info.drift_present);
  CHECK(info.kinetic_coefficient_11 == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(info.hermiticity_defect < 1e-12);

  // no derivative sources: constants are annihilated away from the ends
  Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(grid.total_points());
  Eigen::VectorXcd r = H * ones;
  for (long idx = 2; idx < grid.total_points() - 2; ++idx) CHECK(std::abs(r[idx]) < 1e-13);

  CHECK_THROWS_AS(build_hamiltonian_operator(
                      ConfigGrid({GridAxis{1, 2, -0.4, 0.4, 16}}), flat_context(), 1.0, true),
                  BadInput);
}

TEST_CASE("derivative-bearing context switches on the first-order term") {
  auto grid = line_grid(64);
  HamiltonianInfo info;
  auto H = build_hamiltonian_operator(grid, perturbed_context(), 1.0, true, &info);
  CHECK(info.drift_present);
  CHECK(info.hermiticity_defect < 1e-12);  // frozen coefficients keep symmetry
  CHECK(H.norm() > 0.0);
}

TEST_CASE("grid-local coefficients are reported non-hermitian") {
  auto grid = line_grid(64);
  HamiltonianInfo info;
  auto H = build_hamiltonian_operator(grid, flat_context(), 1.0, false, &info);
  CHECK_FALSE(info.frozen);
  CHECK(info.hermiticity_defect > 1e-3);

  auto psi = gaussian_packet(grid, {1.0}, {0.12}, {0.0});
  CHECK_THROWS_AS(evolve_schrodinger(psi, H, 1e-3, 200), NonUnitaryDrift);
}

TEST_CASE("implicit stepping conserves the norm") {
  auto grid = line_grid(128);
  auto H = build_hamiltonian_operator(grid, flat_context(), 1.0, true);
  auto psi = gaussian_packet(grid, {1.0}, {0.1}, {1.5});
  auto traj = evolve_schrodinger(psi, H, 5e-5, 1000);
  REQUIRE(traj.norms.size() == 1001);
  double n0 = traj.norms.front();
  double worst = 0.0;
  for (double n : traj.norms) worst = std::max(worst, std::abs(n / n0 - 1.0));
  CHECK(worst < 1e-7);
  CHECK(traj.snapshots.size() == traj.snapshot_steps.size());
  CHECK(traj.snapshots.size() >= 2);
  CHECK_THROWS_AS(evolve_schrodinger(psi, H, -1e-4, 10), BadInput);
}

TEST_CASE("packet width follows the free-spreading law") {
  auto grid = line_grid(256);
  HamiltonianInfo info;
  auto H = build_hamiltonian_operator(grid, flat_context(), 1.0, true, &info);
  const double sigma0 = 0.08;
  auto psi = gaussian_packet(grid, {1.0}, {sigma0}, {0.0});
  auto [m0, s0] = packet_stats(psi, 0);

  const double dtau = 4.8e-5;
  const int steps = 200;
  auto traj = evolve_schrodinger(psi, H, dtau, steps);
  auto [m1, s1] = packet_stats(traj.state, 0);

  const double tau = dtau * steps;
  const double kappa = info.kinetic_coefficient_11;
  double expected = std::sqrt(1.0 + std::pow(kappa * tau / (sigma0 * sigma0), 2));
  CHECK(expected > 1.2);  // the run genuinely spreads
  CHECK(s1 / s0 == doctest::Approx(expected).epsilon(0.01));
  CHECK(m1 == doctest::Approx(m0).epsilon(1e-6));  // zero wavenumber: no transport
}

TEST_CASE("temporal-row wave equation at a derivative-free context") {
  ConfigGrid grid({GridAxis{0, 0, -1.4, -0.6, 129}});
  // constant amplitude: both sides vanish
  WaveFunction flat_psi{grid, Eigen::VectorXcd::Ones(129)};
  CHECK(primary_constraint_apply(flat_psi, 0, flat_context()) == 0.0);

  // e^{i g00}: the derivative side alone survives with unit weight
  WaveFunction osc{grid, Eigen::VectorXcd(129)};
  for (long idx = 0; idx < 129; ++idx)
    osc.amp[idx] = std::exp(Complex(0.0, grid.coordinate(0, idx)));
  double r = primary_constraint_apply(osc, 0, flat_context());
  CHECK(r == doctest::Approx(1.0).epsilon(1e-4));

  // component index beyond the context dimension
  ConfigGrid g03({GridAxis{0, 3, -0.4, 0.4, 16}});
  WaveFunction w03{g03, Eigen::VectorXcd::Ones(16)};
  CHECK_THROWS_AS(primary_constraint_apply(w03, 0, flat_context(3)), BadInput);
}

TEST_CASE("constructed phase solves the constraint to second order") {
  auto ctx = perturbed_context();
  const int sigma = 1;
  double c = 0.0;
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n)
      for (int k = 1; k < 4; ++k)
        c += bds_component(ctx.metric, 0, sigma, 0, m, n, k) * ctx.deriv(m, n, k);
  c *= 0.5 * ctx.metric.sqrt_neg_det;
  REQUIRE(std::abs(c) > 1e-3);

  auto residual_at = [&](int points) {
    ConfigGrid grid({GridAxis{0, sigma, -0.4, 0.4, points}});
    WaveFunction psi{grid, Eigen::VectorXcd(points)};
    for (long idx = 0; idx < points; ++idx)
      psi.amp[idx] = std::exp(Complex(0.0, -c * grid.coordinate(0, idx)));
    return primary_constraint_apply(psi, 0, ctx);
  };
  double r65 = residual_at(65);
  double r129 = residual_at(129);
  const double h65 = 0.8 / 64.0;
  CHECK(r65 == doctest::Approx(std::abs(c) * std::pow(c * h65, 2) / 6.0).epsilon(0.01));
  CHECK(r65 / r129 == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("amplitudes blind to the temporal row satisfy the reduced condition") {
  ConfigGrid grid({GridAxis{0, 0, -1.4, -0.6, 16}, GridAxis{1, 1, 0.6, 1.4, 32}});
  WaveFunction psi{grid, Eigen::VectorXcd(grid.total_points())};
  for (long idx = 0; idx < grid.total_points(); ++idx) {
    double g11 = psi.grid.point(idx)[1];
    psi.amp[idx] = std::exp(-std::pow((g11 - 1.0) / 0.2, 2));
  }
  CHECK(primary_constraint_apply(psi, 0, flat_context()) == 0.0);

  ConfigGrid spatial({GridAxis{1, 1, 0.6, 1.4, 16}});
  WaveFunction bad{spatial, Eigen::VectorXcd::Ones(16)};
  CHECK_THROWS_AS(primary_constraint_apply(bad, 0, flat_context()), BadInput);
}

TEST_CASE("consistency chain: commuting operators close immediately") {
  auto grid = line_grid(32);
  auto g = position_operator(grid, 0);
  OperatorMatrix gsq = g * g;
  CHECK(constraint_chain_step(g, gsq).norm() == 0.0);
  auto pi = momentum_operator(grid, 0);
  CHECK(constraint_chain_step(pi, pi).norm() == 0.0);

  ConfigGrid other({GridAxis{2, 2, 0.4, 1.6, 16}});
  CHECK_THROWS_AS(constraint_chain_step(g, position_operator(other, 0)), ShapeMismatch);
}

TEST_CASE("consistency chain reproduces the classical bracket at second order") {
  auto error_at = [](int points) {
    auto grid = line_grid(points);
    auto g = position_operator(grid, 0);
    auto pi = momentum_operator(grid, 0);
    OperatorMatrix chain = constraint_chain_step(pi, OperatorMatrix(g * g));
    auto psi = gaussian_packet(grid, {1.0}, {0.15}, {1.0});
    Eigen::VectorXcd r = chain * psi.amp - 2.0 * (g * psi.amp);
    double num = 0.0;
    for (long idx = 0; idx < grid.total_points(); ++idx)
      if (grid.interior(idx, 2)) num += std::norm(r[idx]);
    return std::sqrt(num * grid.cell_volume());
  };
  double e65 = error_at(65);
  double e129 = error_at(129);
  double order = std::log(e65 / e129) / std::log((1.6 / 64.0) / (1.6 / 128.0));
  CHECK(e129 < e65);
  CHECK(order >= 1.8);
}

TEST_CASE("componentwise wave-equation residuals are finite and consistent") {
  auto grid = line_grid(48);
  auto psi = gaussian_packet(grid, {1.0}, {0.15}, {0.5});
  double worst = 0.0;
  auto res = tensor_equation_residual(grid, flat_context(), psi, 1.0, &worst);
  REQUIRE(res.extent() == 4);
  double seen = 0.0;
  for (int p = 1; p < 4; ++p)
    for (int q = 1; q < 4; ++q)
      for (int m = 1; m < 4; ++m)
        for (int n = 1; n < 4; ++n) {
          double v = res(p, q, m, n);
          CHECK(std::isfinite(v));
          CHECK(v >= 0.0);
          seen = std::max(seen, v);
        }
  CHECK(seen == doctest::Approx(worst));
  CHECK(worst > 0.0);
}
