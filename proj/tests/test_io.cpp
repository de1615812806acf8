#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <string>

#include "json.hpp"

#include "gravham/io.hpp"
#include "gravham/report.hpp"

using namespace gravham;

namespace {

std::string temp_path(const char* stem) {
  return std::string("/tmp/gravham_io_test_") + stem;
}

}  // namespace

TEST_CASE("text file round-trip") {
  const std::string path = temp_path("roundtrip.txt");
  write_text_file(path, "line one\nline two\n");
  CHECK(read_text_file(path) == "line one\nline two\n");
  std::remove(path.c_str());
  CHECK_THROWS_AS(read_text_file("/nonexistent/nope.txt"), BadInput);
  CHECK_THROWS_AS(write_text_file("/nonexistent/dir/out.txt", "x"), BadInput);
}

TEST_CASE("metric JSON round-trips byte for byte") {
  Rng rng(781);
  auto m = random_metric(rng, 4);
  std::string text = metric_json(m);
  auto g = parse_metric_json(text);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b) CHECK(g(a, b) == m.lower(a, b));  // %.17g is lossless
  CHECK(metric_json(invert_metric(g)) == text);
}

TEST_CASE("metric JSON rejects malformed input") {
  CHECK_THROWS_AS(parse_metric_json("not json"), BadInput);
  CHECK_THROWS_AS(parse_metric_json("{\"d\": 4}"), BadInput);
  CHECK_THROWS_AS(parse_metric_json("{\"d\": 1, \"g\": [[1]]}"), BadInput);
  CHECK_THROWS_AS(parse_metric_json("{\"d\": 9, \"g\": []}"), BadInput);
  CHECK_THROWS_AS(parse_metric_json("{\"d\": 3, \"g\": [[1,0,0],[0,1,0]]}"), BadInput);
  CHECK_THROWS_AS(parse_metric_json("{\"d\": 3, \"g\": [[1,0],[0,1],[0,0]]}"), BadInput);
}

TEST_CASE("load_metric inverts what it reads") {
  const std::string path = temp_path("metric.json");
  write_text_file(path, "{\"d\": 3, \"g\": [[-4,0,0],[0,1,0],[0,0,1]]}");
  auto m = load_metric(path);
  std::remove(path.c_str());
  CHECK(m.d == 3);
  CHECK(m.upper(0, 0) == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK(m.sqrt_neg_det == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("lattice presets") {
  auto flat = lattice_from_input("flat");
  CHECK(flat.n == 64);
  CHECK(flat.dx == 0.25);
  CHECK(flat.boundary == Boundary::Periodic);
  CHECK(flat.g_at(10, 0) == 1.0);
  CHECK(flat.pi_at(10, 0) == 0.0);

  auto kick = lattice_from_input("kick");
  CHECK(kick.pi_at(32, 0) == 0.01);
  CHECK(kick.pi_at(31, 0) == 0.0);

  CHECK_THROWS_AS(lattice_preset_json("ripple"), BadInput);
  CHECK_THROWS_AS(parse_lattice_json("{\"preset\": \"ripple\"}"), BadInput);
}

TEST_CASE("explicit lattice JSON with per-site data") {
  nlohmann::ordered_json j;
  j["n"] = 8;
  j["dx"] = 0.5;
  j["boundary"] = "fixed";
  for (int s = 0; s < 8; ++s) {
    j["g"].push_back({1.0 + 0.01 * s, 0.0, 0.0, 1.0, 0.0, 1.0});
    j["pi"].push_back({0.0, 0.001 * s, 0.0, 0.0, 0.0, 0.0});
  }
  auto lat = parse_lattice_json(j.dump());
  CHECK(lat.n == 8);
  CHECK(lat.boundary == Boundary::Fixed);
  CHECK(lat.g_at(5, 0) == doctest::Approx(1.05));
  CHECK(lat.pi_at(7, 1) == doctest::Approx(0.007));

  j["boundary"] = "open";
  CHECK_THROWS_AS(parse_lattice_json(j.dump()), BadInput);
  j["boundary"] = "fixed";
  j["g"].push_back({1.0, 0.0, 0.0, 1.0, 0.0, 1.0});  // 9 rows for n=8
  CHECK_THROWS_AS(parse_lattice_json(j.dump()), BadInput);
  CHECK_THROWS_AS(parse_lattice_json("{\"dx\": 0.5}"), BadInput);
  CHECK_THROWS_AS(parse_lattice_json("{\"n\": 8, \"dx\": 0.5, \"g\": [[1,0,0]]}"), BadInput);
}

TEST_CASE("trajectory CSV layout and determinism") {
  auto kick = make_kick(16, 0.25, 0.01);
  auto traj = hamilton_evolve(kick, 0.002, 40);
  std::string csv = trajectory_csv(traj, kick);
  std::string again = trajectory_csv(traj, kick);
  CHECK(csv == again);

  auto first_line = csv.substr(0, csv.find('\n'));
  CHECK(first_line ==
        "step,site,g11,g12,g13,g22,g23,g33,pi11,pi12,pi13,pi22,pi23,pi33,"
        "energy_density,flux1");
  size_t rows = 0;
  for (char ch : csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 1 + traj.snapshots.size() * 16);
  CHECK(csv.substr(csv.find('\n') + 1, 4) == "0,0,");
}

TEST_CASE("wavefunction CSV layout") {
  ConfigGrid grid({GridAxis{1, 1, 0.5, 1.5, 8}, GridAxis{2, 2, 0.5, 1.5, 8}});
  auto psi = gaussian_packet(grid, {1.0, 1.0}, {0.2, 0.2}, {0.0, 1.0});
  std::string csv = wavefunction_csv(psi);
  auto first_line = csv.substr(0, csv.find('\n'));
  CHECK(first_line == "index,g11,g22,re,im");
  size_t rows = 0;
  for (char ch : csv)
    if (ch == '\n') ++rows;
  CHECK(rows == 1 + 64);
  CHECK(wavefunction_csv(psi) == csv);
}

TEST_CASE("evolution metadata records the gauge and flux conventions") {
  auto flat = make_flat(16, 0.25);
  std::string text = evolve_metadata_json(flat, "flat", 0.002, 100, 1e-9, 2e-8, 3, 42);
  auto j = nlohmann::json::parse(text);
  CHECK(j["preset"] == "flat");
  CHECK(j["n"] == 16);
  CHECK(j["boundary"] == "periodic");
  CHECK(j["integrator"] == "implicit-midpoint");
  CHECK(j["gauge"] == "g_0sigma held at flat values");
  CHECK(j["flux_phi_mk"] == "zero (caller-supplied term omitted)");
  CHECK(j["energy_drift_rel"] == 1e-9);
  CHECK(j["reversal_residual"] == 2e-8);
  CHECK(j["fp_iterations_max"] == 3);
  CHECK(j["seed"] == 42);

  // negative residual means "not measured": the key is omitted
  std::string none = evolve_metadata_json(flat, "flat", 0.002, 100, 1e-9, -1.0, 3, 42);
  CHECK_FALSE(nlohmann::json::parse(none).contains("reversal_residual"));
}

TEST_CASE("quantize metadata names the coefficient mode") {
  std::string frozen =
      quantize_metadata_json(1.0, 1e-4, 100, "cayley", 3e-12, true, {"g11", "g22"}, 7);
  auto j = nlohmann::json::parse(frozen);
  CHECK(j["scheme"] == "cayley");
  CHECK(j["coefficients"] == "frozen");
  CHECK(j["variables"] == nlohmann::json::array({"g11", "g22"}));
  auto local = nlohmann::json::parse(
      quantize_metadata_json(1.0, 1e-4, 100, "cayley", 0.4, false, {"g11"}, 7));
  CHECK(local["coefficients"] == "grid-local");
}

TEST_CASE("report lines, exit codes, and rendering") {
  Report r;
  r.tool = "demo";
  r.d = 4;
  r.seed = 11;
  r.fact("metric family", "random admissible");
  r.add("identity residual", 1e-12, 1e-10, "max over samples");
  CHECK(r.all_passed());
  CHECK(r.exit_code() == 0);

  r.add("tight bound", 2.0, 1.0, "deliberately failing");
  CHECK_FALSE(r.all_passed());
  CHECK(r.exit_code() == 1);

  std::string text = to_text(r);
  CHECK(text.find("tool: demo") == 0);
  CHECK(text.find("metric family: random admissible") != std::string::npos);
  CHECK(text.find("[PASS] identity residual") != std::string::npos);
  CHECK(text.find("[FAIL] tight bound") != std::string::npos);
  CHECK(text.find("status: FAIL (1/2 checks)") != std::string::npos);
  CHECK(to_text(r) == text);

  auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["checks"].size() == 2);
  CHECK(j["checks"][0]["status"] == "pass");
  CHECK(j["checks"][1]["status"] == "fail");
  CHECK(j["status"] == "fail");
  CHECK(j["exit_code"] == 1);

  CHECK(render(r, "json") == to_json(r));
  CHECK_THROWS_AS(render(r, "yaml"), BadInput);
}

TEST_CASE("structured errors dominate the exit code") {
  Report r;
  r.tool = "demo";
  r.add("fine", 0.0, 1.0, "");
  r.add_error("config trouble", BadInput("missing knob"));
  CHECK(r.exit_code() == 2);

  r.add_error("degenerate step", UnstableStep("dt too large"));
  CHECK(r.exit_code() == 3);  // worst structured code wins

  std::string text = to_text(r);
  CHECK(text.find("[ERR ] config trouble  BadInput: missing knob") != std::string::npos);
  auto j = nlohmann::json::parse(to_json(r));
  CHECK(j["checks"][1]["status"] == "error");
  CHECK(j["checks"][1]["error"] == "BadInput");
  CHECK_FALSE(j["checks"][1].contains("measured"));
}

TEST_CASE("fixed number rendering") {
  CHECK(format_number(0.5) == "0.5");
  CHECK(format_number(1e-11) == "1e-11");
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(2.0 / 3.0) == "0.666666666667");
}
