#include <complex>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gravham/canonical.hpp"
#include "gravham/field_point.hpp"
#include "gravham/io.hpp"
#include "gravham/lattice.hpp"
#include "gravham/polynomial.hpp"
#include "gravham/quantum.hpp"
#include "gravham/report.hpp"
#include "gravham/verify.hpp"

namespace fs = std::filesystem;
using namespace gravham;

namespace {

struct CommonOpts {
  int d = 4;
  std::uint64_t seed = 7;
  double tol = 0.0;  // <= 0 keeps the subcommand default
  std::string out;
  std::string format = "text";
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--d", c.d, "spacetime dimension")->capture_default_str();
  cmd->add_option("--seed", c.seed, "seed of the single RNG, recorded in the report")
      ->capture_default_str();
  cmd->add_option("--tol", c.tol, "override for the subcommand's headline tolerance");
  cmd->add_option("--out", c.out, "directory for the report and any data files");
  cmd->add_option("--format", c.format, "report format on stdout")
      ->check(CLI::IsMember({"text", "json"}))
      ->capture_default_str();
}

int finish(const Report& rep, const CommonOpts& c) {
  std::cout << render(rep, c.format);
  if (!c.out.empty()) {
    fs::create_directories(c.out);
    write_text_file((fs::path(c.out) / (rep.tool + "_report.json")).string(), to_json(rep));
    write_text_file((fs::path(c.out) / (rep.tool + "_report.txt")).string(), to_text(rep));
  }
  return rep.exit_code();
}

LatticeField build_lattice(const std::string& preset, int n, double dx, double amplitude,
                           const std::string& boundary) {
  Boundary b;
  if (boundary == "periodic")
    b = Boundary::Periodic;
  else if (boundary == "fixed")
    b = Boundary::Fixed;
  else
    throw BadInput("boundary must be 'periodic' or 'fixed'");
  if (preset == "flat") return make_flat(n, dx, b);
  if (preset == "kick") return make_kick(n, dx, amplitude, b);
  return lattice_from_input(preset);  // JSON file path
}

std::vector<GridAxis> parse_axes(const std::string& vars, int points, double lo, double hi) {
  std::vector<GridAxis> axes;
  std::size_t start = 0;
  while (start < vars.size()) {
    std::size_t comma = vars.find(',', start);
    std::string tok = vars.substr(start, comma == std::string::npos ? comma : comma - start);
    start = comma == std::string::npos ? vars.size() : comma + 1;
    if (tok.size() != 3 || tok[0] != 'g' || !std::isdigit(tok[1]) || !std::isdigit(tok[2]))
      throw BadInput("variable '" + tok + "' is not of the form gAB (e.g. g11)");
    GridAxis ax;
    ax.a = tok[1] - '0';
    ax.b = tok[2] - '0';
    ax.lo = lo;
    ax.hi = hi;
    ax.points = points;
    axes.push_back(ax);
  }
  if (axes.empty()) throw BadInput("--vars needs at least one gAB entry");
  return axes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gravham: tensor identities, canonical dynamics, lattice and quantum labs "
               "for metric gravity"};
  app.require_subcommand(1);

  CommonOpts c;

  auto* cmd_verify = app.add_subcommand("verify", "run the identity and bracket suites");
  int verify_samples = 60;
  bool inject_bug = false;
  add_common(cmd_verify, c);
  cmd_verify->add_option("--samples", verify_samples, "random points per check")
      ->capture_default_str();
  cmd_verify->add_flag("--inject-bug", inject_bug,
                       "fault fixture: flip a structure-tensor sign inside the kinetic-block "
                       "check (it must then fail)");

  auto* cmd_tensors = app.add_subcommand("tensors", "inverse/projection identities");
  int tensor_samples = 50;
  std::string metric_path;
  add_common(cmd_tensors, c);
  cmd_tensors->add_option("--samples", tensor_samples, "random metrics")->capture_default_str();
  cmd_tensors->add_option("--metric", metric_path, "metric JSON file to check at (skips sampling)");

  auto* cmd_legendre = app.add_subcommand("legendre", "momentum map round-trip checks");
  int legendre_samples = 100;
  add_common(cmd_legendre, c);
  cmd_legendre->add_option("--samples", legendre_samples, "random points")->capture_default_str();

  auto* cmd_dof = app.add_subcommand("dof", "physical degree-of-freedom count");
  add_common(cmd_dof, c);

  auto* cmd_degrees = app.add_subcommand("degrees", "polynomial degree analysis of the "
                                                    "Hamiltonian terms");
  add_common(cmd_degrees, c);

  auto* cmd_gauss = app.add_subcommand("gauss", "discrete flux identity on the lattice");
  std::string g_preset = "kick", g_boundary = "periodic";
  int g_n = 64, g_steps = 200;
  double g_dx = 0.25, g_amplitude = 0.01, g_dt = 0.002;
  add_common(cmd_gauss, c);
  cmd_gauss->add_option("--preset", g_preset, "flat, kick, or a lattice JSON path")
      ->capture_default_str();
  cmd_gauss->add_option("--n", g_n, "sites")->capture_default_str();
  cmd_gauss->add_option("--dx", g_dx, "spacing")->capture_default_str();
  cmd_gauss->add_option("--amplitude", g_amplitude, "kick amplitude")->capture_default_str();
  cmd_gauss->add_option("--boundary", g_boundary, "periodic or fixed")->capture_default_str();
  cmd_gauss
      ->add_option("--steps", g_steps,
                   "evolve this many steps first so the flux field is nonzero")
      ->capture_default_str();
  cmd_gauss->add_option("--dt", g_dt, "time step for the warm-up evolution")
      ->capture_default_str();

  auto* cmd_evolve = app.add_subcommand("evolve", "Hamiltonian lattice evolution");
  std::string e_preset = "kick", e_boundary = "periodic";
  int e_n = 64, e_steps = 1000, e_stride = 20;
  double e_dx = 0.25, e_dt = 0.002, e_amplitude = 0.01;
  bool e_reverse = false;
  add_common(cmd_evolve, c);
  cmd_evolve->add_option("--preset", e_preset, "flat, kick, or a lattice JSON path")
      ->capture_default_str();
  cmd_evolve->add_option("--steps", e_steps, "time steps")->capture_default_str();
  cmd_evolve->add_option("--dt", e_dt, "time step")->capture_default_str();
  cmd_evolve->add_option("--n", e_n, "sites")->capture_default_str();
  cmd_evolve->add_option("--dx", e_dx, "spacing")->capture_default_str();
  cmd_evolve->add_option("--amplitude", e_amplitude, "kick amplitude")->capture_default_str();
  cmd_evolve->add_option("--boundary", e_boundary, "periodic or fixed")->capture_default_str();
  cmd_evolve->add_option("--stride", e_stride, "snapshot stride")->capture_default_str();
  cmd_evolve->add_flag("--reverse", e_reverse,
                       "run the time-reversal residual check (doubles the run time)");

  auto* cmd_quantize = app.add_subcommand("quantize", "truncated wave-equation solver");
  std::string q_vars = "g11";
  int q_points = 128, q_steps = 100;
  double q_lo = 0.2, q_hi = 1.8, q_dtau = 2e-4, q_hbar = 1.0, q_sigma = 0.08, q_wavenumber = 0.0;
  bool q_local = false;
  std::string q_metric;
  add_common(cmd_quantize, c);
  cmd_quantize->add_option("--vars", q_vars, "comma-separated diagonal variables, e.g. g11,g22")
      ->capture_default_str();
  cmd_quantize->add_option("--points", q_points, "grid points per axis")->capture_default_str();
  cmd_quantize->add_option("--lo", q_lo, "axis lower bound")->capture_default_str();
  cmd_quantize->add_option("--hi", q_hi, "axis upper bound")->capture_default_str();
  cmd_quantize->add_option("--steps", q_steps, "time steps")->capture_default_str();
  cmd_quantize->add_option("--dtau", q_dtau, "time step")->capture_default_str();
  cmd_quantize->add_option("--hbar", q_hbar, "hbar")->capture_default_str();
  cmd_quantize->add_option("--sigma", q_sigma, "packet width")->capture_default_str();
  cmd_quantize->add_option("--wavenumber", q_wavenumber, "packet wavenumber")
      ->capture_default_str();
  cmd_quantize->add_flag("--local", q_local,
                         "grid-local coefficients (printed ordering; not self-adjoint)");
  cmd_quantize->add_option("--metric", q_metric, "metric JSON for the frozen coefficients");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cmd_verify->parsed()) {
      VerifyOptions opt;
      opt.d = c.d;
      opt.seed = c.seed;
      opt.samples = verify_samples;
      opt.inject_bug = inject_bug;
      return finish(run_verify(opt), c);
    }

    if (cmd_tensors->parsed()) {
      if (metric_path.empty()) return finish(run_tensor_checks(c.d, c.seed, tensor_samples,
                                                               c.tol), c);
      Report r;
      r.tool = "tensors";
      r.seed = c.seed;
      try {
        auto m = load_metric(metric_path);
        r.d = m.d;
        require_dimension(m.d);
        r.fact("metric", metric_path);
        r.fact("det", format_number(m.det));
        r.fact("g00_upper", format_number(m.upper(0, 0)));
        r.add("inverse identity (direct)", check_IE_inverse(m),
              c.tol > 0 ? c.tol : 1e-10, "at the supplied metric");
        auto a = tensor_E(m), b = tensor_E_from_g(m);
        double route = 0.0;
        for (int p = 0; p < m.d; ++p)
          for (int q = 0; q < m.d; ++q)
            for (int k = 0; k < m.d; ++k)
              for (int l = 0; l < m.d; ++l)
                route = std::max(route, std::abs(a(p, q, k, l) - b(p, q, k, l)));
        r.add("projected-tensor route equality", route, 1e-12, "at the supplied metric");
      } catch (const Error& e) {
        r.add_error("metric admissibility", e);
      }
      return finish(r, c);
    }

    if (cmd_legendre->parsed())
      return finish(run_legendre_checks(c.d, c.seed, legendre_samples, c.tol), c);

    if (cmd_dof->parsed()) {
      Report r;
      r.tool = "dof";
      r.d = c.d;
      r.seed = c.seed;
      try {
        r.fact("degrees_of_freedom", std::to_string(dof_count(c.d)));
      } catch (const Error& e) {
        r.add_error("freedom count", e);
      }
      return finish(r, c);
    }

    if (cmd_degrees->parsed()) {
      Report r;
      r.tool = "degrees";
      r.d = c.d;
      r.seed = c.seed;
      try {
        DegreeReport deg = classify_S_terms(c.d);
        for (const TermReport& t : deg.terms) {
          r.fact(t.name, t.summary);
          if (!t.flags.empty()) {
            std::string flags;
            for (const auto& f : t.flags) flags += (flags.empty() ? "" : ", ") + f;
            r.fact(t.name + " flags", flags);
          }
        }
        r.fact("conclusion", deg.conclusion);
        r.add("all-quadratic rewrite absent", deg.reducible_to_quadratic ? 1.0 : 0.0, 0.5,
              "degree > 2 must survive in some term");
      } catch (const Error& e) {
        r.add_error("degree analysis", e);
      }
      return finish(r, c);
    }

    if (cmd_gauss->parsed()) {
      Report r;
      r.tool = "gauss";
      r.d = 4;
      r.seed = c.seed;
      try {
        LatticeField lat = build_lattice(g_preset, g_n, g_dx, g_amplitude, g_boundary);
        if (g_steps > 0) lat = hamilton_evolve(lat, g_dt, g_steps).state;
        auto [volume, surface] = gauss_energy(lat);
        double gmax = 0.0;
        for (int i = 0; i < lat.n; ++i)
          gmax = std::max(gmax, std::abs(flux_vector(field_point_at(lat, i))(1)));
        r.fact("preset", g_preset);
        r.fact("boundary", lat.boundary == Boundary::Periodic ? "periodic" : "fixed");
        r.fact("warmup_steps", format_number(g_steps));
        r.fact("max_flux", format_number(gmax));
        r.fact("volume_sum", format_number(volume));
        r.fact("surface_term", format_number(surface));
        const bool periodic = lat.boundary == Boundary::Periodic;
        double tol = c.tol > 0 ? c.tol : (periodic ? 1e-12 : 1e-2);
        r.add("discrete flux identity", std::abs(volume - surface), tol,
              periodic ? "telescoping interior sum vs vanishing boundary"
                       : "trapezoid volume sum vs boundary difference, O(dx^2)");
      } catch (const Error& e) {
        r.add_error("flux identity", e);
      }
      return finish(r, c);
    }

    if (cmd_evolve->parsed()) {
      Report r;
      r.tool = "evolve";
      r.d = 4;
      r.seed = c.seed;
      try {
        LatticeField lat = build_lattice(e_preset, e_n, e_dx, e_amplitude, e_boundary);
        EvolveOptions opts;
        opts.record_stride = e_stride;
        EvolveResult traj = hamilton_evolve(lat, e_dt, e_steps, opts);
        double h0 = traj.energy.front();
        double drift = 0.0;
        for (double h : traj.energy) drift = std::max(drift, std::abs(h - h0));
        drift /= std::max(1.0, std::abs(h0));
        r.fact("preset", e_preset);
        r.fact("steps", std::to_string(e_steps));
        r.fact("dt", format_number(e_dt));
        r.fact("energy_initial", format_number(h0));
        r.fact("energy_final", format_number(traj.energy.back()));
        r.fact("fp_iterations_max", std::to_string(traj.fp_iterations_max));
        r.add("energy conservation", drift, c.tol > 0 ? c.tol : 1e-6,
              "relative drift of the summed canonical density");
        double reversal = -1.0;
        if (e_reverse) {
          LatticeField back = traj.state;
          for (double& v : back.pi) v = -v;
          EvolveResult rtraj = hamilton_evolve(back, e_dt, e_steps, opts);
          double worst = 0.0;
          for (std::size_t i = 0; i < lat.g.size(); ++i)
            worst = std::max(worst, std::abs(rtraj.state.g[i] - lat.g[i]));
          for (std::size_t i = 0; i < lat.pi.size(); ++i)
            worst = std::max(worst, std::abs(rtraj.state.pi[i] + lat.pi[i]));
          reversal = worst;
          r.add("time reversal", reversal, c.tol > 0 ? c.tol : 1e-6,
                "momentum flip returns to the initial data");
        }
        try {
          auto fronts = front_diagnostics(traj);
          r.fact("front_first", format_number(fronts.front().position));
          r.fact("front_last", format_number(fronts.back().position));
          r.fact("front_energy_fraction", format_number(fronts.back().energy_fraction));
          r.fact("behind_front_variance", format_number(fronts.back().behind_front_variance));
        } catch (const NoFront&) {
          r.fact("front", "none (energy below threshold everywhere)");
        }
        std::string outdir = c.out.empty() ? "." : c.out;
        fs::create_directories(outdir);
        write_text_file((fs::path(outdir) / "trajectory.csv").string(),
                        trajectory_csv(traj, lat));
        write_text_file((fs::path(outdir) / "evolve_metadata.json").string(),
                        evolve_metadata_json(lat, e_preset, e_dt, e_steps, drift, reversal,
                                             traj.fp_iterations_max, c.seed));
      } catch (const Error& e) {
        r.add_error("evolution", e);
      }
      return finish(r, c);
    }

    if (cmd_quantize->parsed()) {
      Report r;
      r.tool = "quantize";
      r.d = c.d;
      r.seed = c.seed;
      try {
        ConfigGrid grid(parse_axes(q_vars, q_points, q_lo, q_hi));
        FieldPoint<double> ctx =
            q_metric.empty() ? make_field_point(invert_metric(minkowski(c.d)))
                             : make_field_point(load_metric(q_metric));
        HamiltonianInfo info;
        OperatorMatrix H = build_hamiltonian_operator(grid, ctx, q_hbar, !q_local, &info);
        std::vector<double> centers(grid.axis_count()), sigmas(grid.axis_count(), q_sigma),
            ks(grid.axis_count(), q_wavenumber);
        for (int a = 0; a < grid.axis_count(); ++a)
          centers[a] = 0.5 * (grid.axis(a).lo + grid.axis(a).hi);
        WaveFunction psi = gaussian_packet(grid, centers, sigmas, ks);
        QuantumEvolveOptions qopts;
        // Grid-local coefficients keep the printed operator ordering, which is
        // not self-adjoint; the norm is then diagnostic, not a gate.
        if (q_local) qopts.norm_drift_per_step = std::numeric_limits<double>::infinity();
        QuantumTrajectory traj = evolve_schrodinger(psi, H, q_dtau, q_steps, q_hbar, qopts);
        double n0 = traj.norms.front();
        double drift = 0.0;
        for (double nv : traj.norms) drift = std::max(drift, std::abs(nv - n0));
        drift /= n0;
        r.fact("variables", q_vars);
        r.fact("points_per_axis", std::to_string(q_points));
        r.fact("hbar", format_number(q_hbar));
        r.fact("dtau", format_number(q_dtau));
        r.fact("scheme", "crank-nicolson");
        r.fact("coefficients", q_local ? "grid-local" : "frozen");
        r.fact("kinetic_coefficient_11", format_number(info.kinetic_coefficient_11));
        if (q_local) {
          r.fact("norm_drift_rel", format_number(drift));
          r.fact("hermiticity_defect", format_number(info.hermiticity_defect));
        } else {
          r.add("norm conservation", drift, c.tol > 0 ? c.tol : 1e-7,
                "relative drift over " + std::to_string(q_steps) + " steps");
          r.add("generator self-adjointness", info.hermiticity_defect, 1e-12,
                "frozen coefficients, real drift on the antisymmetric stencil");
        }
        std::string outdir = c.out.empty() ? "." : c.out;
        fs::create_directories(outdir);
        write_text_file((fs::path(outdir) / "wavefunction.csv").string(),
                        wavefunction_csv(traj.state));
        std::vector<std::string> var_list;
        for (int a = 0; a < grid.axis_count(); ++a) var_list.push_back(grid.axis(a).label());
        write_text_file((fs::path(outdir) / "quantize_metadata.json").string(),
                        quantize_metadata_json(q_hbar, q_dtau, q_steps, "crank-nicolson",
                                               drift, !q_local, var_list, c.seed));
      } catch (const Error& e) {
        r.add_error("quantization", e);
      }
      return finish(r, c);
    }
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }
  return 2;
}
