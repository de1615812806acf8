#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gravham/lattice.hpp"
#include "gravham/metric.hpp"
#include "gravham/quantum.hpp"

// File formats of the toolkit:
//   metric JSON      {"d": 4, "g": [[row]...]}
//   lattice JSON     {"preset": "flat"|"kick", ...params} or explicit
//                    {"n", "dx", "boundary", "g": [[6]...], "pi": [[6]...]}
//   trajectory CSV   step,site,g11..g33,pi11..pi33,energy_density,flux1
//   wavefunction CSV index,<axis labels>,re,im
// All writers are deterministic: fixed float formatting, no timestamps.

namespace gravham {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

DenseTensor<double> parse_metric_json(const std::string& text);
MetricState<double> load_metric(const std::string& path);
std::string metric_json(const MetricState<double>& m);

LatticeField parse_lattice_json(const std::string& text);

// "flat" or "kick" build the library presets; anything else is read as a
// JSON file path.
LatticeField lattice_from_input(const std::string& preset_or_path);

// The built-in presets in their JSON form.
std::string lattice_preset_json(const std::string& name);

std::string trajectory_csv(const EvolveResult& traj, const LatticeField& shape);

std::string wavefunction_csv(const WaveFunction& psi);

std::string evolve_metadata_json(const LatticeField& initial, const std::string& preset,
                                 double dt, int steps, double energy_drift,
                                 double reversal_residual, int fp_iterations_max,
                                 std::uint64_t seed);

std::string quantize_metadata_json(double hbar, double dtau, int steps,
                                   const std::string& scheme, double norm_drift,
                                   bool frozen_coefficients,
                                   const std::vector<std::string>& variables,
                                   std::uint64_t seed);

}  // namespace gravham
