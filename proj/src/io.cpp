#include "gravham/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "gravham/field_point.hpp"

namespace gravham {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json parse_or_throw(const std::string& text, const char* what) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw BadInput(std::string("invalid JSON in ") + what);
  return j;
}

Boundary boundary_from(const std::string& s) {
  if (s == "periodic") return Boundary::Periodic;
  if (s == "fixed") return Boundary::Fixed;
  throw BadInput("boundary must be 'periodic' or 'fixed', got '" + s + "'");
}

const char* boundary_name(Boundary b) {
  return b == Boundary::Periodic ? "periodic" : "fixed";
}

LatticeField lattice_from_preset_json(const json& j) {
  const std::string name = j.at("preset").get<std::string>();
  const int n = j.value("n", 64);
  const double dx = j.value("dx", 0.25);
  const Boundary b = boundary_from(j.value("boundary", std::string("periodic")));
  if (name == "flat") return make_flat(n, dx, b);
  if (name == "kick") {
    const double amplitude = j.value("amplitude", 0.01);
    const int site = j.value("site", -1);
    return make_kick(n, dx, amplitude, b, site);
  }
  throw BadInput("unknown lattice preset '" + name + "'");
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BadInput("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw BadInput("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw BadInput("short write to '" + path + "'");
}

DenseTensor<double> parse_metric_json(const std::string& text) {
  json j = parse_or_throw(text, "metric");
  if (!j.contains("d") || !j.contains("g")) throw BadInput("metric JSON needs fields d and g");
  const int d = j["d"].get<int>();
  if (d < 2 || d > kMaxDim) throw BadInput("metric dimension out of range");
  std::vector<std::vector<double>> rows;
  for (const auto& row : j["g"]) rows.push_back(row.get<std::vector<double>>());
  return metric_from_rows<double>(d, rows);
}

MetricState<double> load_metric(const std::string& path) {
  return invert_metric(parse_metric_json(read_text_file(path)));
}

std::string metric_json(const MetricState<double>& m) {
  ordered_json j;
  j["d"] = m.d;
  j["g"] = ordered_json::array();
  for (int i = 0; i < m.d; ++i) {
    ordered_json row = ordered_json::array();
    for (int k = 0; k < m.d; ++k) row.push_back(m.lower(i, k));
    j["g"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

LatticeField parse_lattice_json(const std::string& text) {
  json j = parse_or_throw(text, "lattice input");
  if (j.contains("preset")) return lattice_from_preset_json(j);
  if (!j.contains("n") || !j.contains("dx"))
    throw BadInput("lattice JSON needs preset, or n/dx with per-site data");
  const int n = j["n"].get<int>();
  const double dx = j["dx"].get<double>();
  LatticeField lat = make_flat(n, dx, boundary_from(j.value("boundary", std::string("periodic"))));
  auto fill = [&](const char* key, std::vector<double>& dst) {
    if (!j.contains(key)) return;
    const auto& rows = j[key];
    if (static_cast<int>(rows.size()) != n)
      throw BadInput(std::string(key) + " must carry one row of 6 per site");
    for (int s = 0; s < n; ++s) {
      auto row = rows[s].get<std::vector<double>>();
      if (static_cast<int>(row.size()) != kSpatialPairs)
        throw BadInput(std::string(key) + " rows must have 6 components (11,12,13,22,23,33)");
      for (int p = 0; p < kSpatialPairs; ++p) dst[s * kSpatialPairs + p] = row[p];
    }
  };
  fill("g", lat.g);
  fill("pi", lat.pi);
  return lat;
}

LatticeField lattice_from_input(const std::string& preset_or_path) {
  if (preset_or_path == "flat" || preset_or_path == "kick")
    return parse_lattice_json(lattice_preset_json(preset_or_path));
  return parse_lattice_json(read_text_file(preset_or_path));
}

std::string lattice_preset_json(const std::string& name) {
  if (name == "flat")
    return "{\"preset\": \"flat\", \"n\": 64, \"dx\": 0.25, \"boundary\": \"periodic\"}\n";
  if (name == "kick")
    return "{\"preset\": \"kick\", \"n\": 64, \"dx\": 0.25, \"boundary\": \"periodic\", "
           "\"amplitude\": 0.01, \"site\": -1}\n";
  throw BadInput("unknown lattice preset '" + name + "'");
}

std::string trajectory_csv(const EvolveResult& traj, const LatticeField& shape) {
  std::ostringstream os;
  os << "step,site,g11,g12,g13,g22,g23,g33,pi11,pi12,pi13,pi22,pi23,pi33,"
        "energy_density,flux1\n";
  LatticeField frame = shape;
  for (const Snapshot& snap : traj.snapshots) {
    frame.g = snap.g;
    frame.pi = snap.pi;
    for (int site = 0; site < frame.n; ++site) {
      os << snap.step << ',' << site;
      for (int p = 0; p < kSpatialPairs; ++p) os << ',' << fmt17(frame.g_at(site, p));
      for (int p = 0; p < kSpatialPairs; ++p) os << ',' << fmt17(frame.pi_at(site, p));
      os << ',' << fmt17(snap.density[site]);
      os << ',' << fmt17(flux_vector(field_point_at(frame, site))(1));
      os << '\n';
    }
  }
  return os.str();
}

std::string wavefunction_csv(const WaveFunction& psi) {
  std::ostringstream os;
  os << "index";
  for (int a = 0; a < psi.grid.axis_count(); ++a) os << ',' << psi.grid.axis(a).label();
  os << ",re,im\n";
  for (long i = 0; i < psi.grid.total_points(); ++i) {
    os << i;
    for (int a = 0; a < psi.grid.axis_count(); ++a)
      os << ',' << fmt17(psi.grid.point(i)[a]);
    os << ',' << fmt17(psi.amp[i].real()) << ',' << fmt17(psi.amp[i].imag()) << '\n';
  }
  return os.str();
}

std::string evolve_metadata_json(const LatticeField& initial, const std::string& preset,
                                 double dt, int steps, double energy_drift,
                                 double reversal_residual, int fp_iterations_max,
                                 std::uint64_t seed) {
  ordered_json j;
  j["preset"] = preset;
  j["n"] = initial.n;
  j["dx"] = initial.dx;
  j["boundary"] = boundary_name(initial.boundary);
  j["dt"] = dt;
  j["steps"] = steps;
  j["integrator"] = "implicit-midpoint";
  j["gauge"] = "g_0sigma held at flat values";
  j["flux_phi_mk"] = "zero (caller-supplied term omitted)";
  j["energy_drift_rel"] = energy_drift;
  if (reversal_residual >= 0.0) j["reversal_residual"] = reversal_residual;
  j["fp_iterations_max"] = fp_iterations_max;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

std::string quantize_metadata_json(double hbar, double dtau, int steps,
                                   const std::string& scheme, double norm_drift,
                                   bool frozen_coefficients,
                                   const std::vector<std::string>& variables,
                                   std::uint64_t seed) {
  ordered_json j;
  j["hbar"] = hbar;
  j["dtau"] = dtau;
  j["steps"] = steps;
  j["scheme"] = scheme;
  j["norm_drift_rel"] = norm_drift;
  j["coefficients"] = frozen_coefficients ? "frozen" : "grid-local";
  j["variables"] = variables;
  j["seed"] = seed;
  return j.dump(2) + "\n";
}

}  // namespace gravham
