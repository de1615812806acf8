#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "json.hpp"

using nlohmann::json;

namespace {

int run_count = 0;

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run(const std::string& args, const std::string& env_prefix = "") {
  std::string capture = "/tmp/gravham_cli_capture_" + std::to_string(run_count++) + ".txt";
  std::string cmd = env_prefix + std::string(GRAVHAM_CLI_PATH) + " " + args + " > " + capture +
                    " 2>&1";
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  std::ifstream in(capture, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  std::remove(capture.c_str());
  return {code, os.str()};
}

bool file_exists(const std::string& path) { return std::ifstream(path).good(); }

}  // namespace

TEST_CASE("verify passes and reports every suite line") {
  auto r = run("verify --d 4 --samples 30");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("status: PASS (10/10 checks)") != std::string::npos);
  CHECK(r.output.find("[PASS] inverse identity (direct)") != std::string::npos);
  CHECK(r.output.find("[PASS] action split consistency") != std::string::npos);
  CHECK(r.output.find("[PASS] bracket axioms") != std::string::npos);
}

TEST_CASE("verify output is deterministic and thread-count independent") {
  const std::string args = "verify --d 3 --samples 20 --seed 99";
  auto a = run(args);
  auto b = run(args);
  CHECK(a.exit_code == 0);
  CHECK(a.output == b.output);
  auto one = run(args, "GRAVHAM_THREADS=1 ");
  auto three = run(args, "GRAVHAM_THREADS=3 ");
  CHECK(one.output == a.output);
  CHECK(three.output == a.output);
}

TEST_CASE("injected bug trips only the structure-tensor route") {
  auto r = run("verify --d 4 --samples 20 --inject-bug");
  CHECK(r.exit_code == 1);
  CHECK(r.output.find("[FAIL] kinetic block inverse (B route)") != std::string::npos);
  CHECK(r.output.find("[PASS] inverse identity (direct)") != std::string::npos);
}

TEST_CASE("dimension below the supported minimum exits as a degeneracy") {
  auto r = run("verify --d 2 --samples 10");
  CHECK(r.exit_code == 3);
}

TEST_CASE("json format renders a parseable report") {
  auto r = run("verify --d 4 --samples 15 --format json");
  CHECK(r.exit_code == 0);
  json j = json::parse(r.output);
  CHECK(j["status"] == "pass");
  CHECK(j["exit_code"] == 0);
  CHECK(j["checks"].size() == 10);

  auto bad = run("verify --format yaml");
  CHECK(bad.exit_code == 2);
}

TEST_CASE("unknown options and missing subcommands are configuration errors") {
  CHECK(run("").exit_code == 2);
  CHECK(run("verify --no-such-flag").exit_code == 2);
  CHECK(run("frobnicate").exit_code == 2);
}

TEST_CASE("dof reports the physical mode count") {
  auto r4 = run("dof --d 4");
  CHECK(r4.exit_code == 0);
  CHECK(r4.output.find("degrees_of_freedom: 2") != std::string::npos);
  auto r3 = run("dof --d 3");
  CHECK(r3.output.find("degrees_of_freedom: 0") != std::string::npos);
}

TEST_CASE("degrees prints the three-part degree split") {
  auto r = run("degrees --d 4");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("10 = 4 + 3 + 3") != std::string::npos);
  CHECK(r.output.find("[PASS] all-quadratic rewrite absent") != std::string::npos);
  CHECK(r.output.find("not reducible to quadratic") != std::string::npos);

  auto r5 = run("degrees --d 5");
  CHECK(r5.output.find("11 = 5 + 3 + 3") != std::string::npos);
}

TEST_CASE("tensors accepts a metric file and classifies bad ones") {
  const char* good = "/tmp/gravham_cli_metric_good.json";
  std::ofstream(good) << "{\"d\": 4, \"g\": [[-2,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}";
  auto r = run(std::string("tensors --metric ") + good);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("g00_upper: -0.5") != std::string::npos);
  CHECK(r.output.find("[PASS] projected-tensor route equality") != std::string::npos);
  std::remove(good);

  const char* singular = "/tmp/gravham_cli_metric_singular.json";
  std::ofstream(singular) << "{\"d\": 4, \"g\": [[0,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}";
  CHECK(run(std::string("tensors --metric ") + singular).exit_code == 3);
  std::remove(singular);

  const char* garbled = "/tmp/gravham_cli_metric_garbled.json";
  std::ofstream(garbled) << "{broken";
  CHECK(run(std::string("tensors --metric ") + garbled).exit_code == 2);
  std::remove(garbled);

  CHECK(run("tensors --samples 25").exit_code == 0);
}

TEST_CASE("legendre round-trip subcommand") {
  auto r = run("legendre --d 3 --samples 20");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("momentum map round-trip") != std::string::npos);
}

TEST_CASE("gauss flux identity on presets") {
  auto r = run("gauss --preset kick --n 48 --steps 120");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("[PASS] discrete flux identity") != std::string::npos);
  CHECK(r.output.find("max_flux:") != std::string::npos);
  CHECK(run("gauss --boundary moebius").exit_code == 2);
}

TEST_CASE("evolve writes artifacts and verifies conservation and reversal") {
  const std::string outdir = "/tmp/gravham_cli_evolve_out";
  auto r = run("evolve --preset kick --n 48 --steps 80 --dt 0.002 --reverse --out " + outdir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("[PASS] energy conservation") != std::string::npos);
  CHECK(r.output.find("[PASS] time reversal") != std::string::npos);
  CHECK(r.output.find("front_last:") != std::string::npos);
  CHECK(file_exists(outdir + "/trajectory.csv"));
  CHECK(file_exists(outdir + "/evolve_metadata.json"));
  CHECK(file_exists(outdir + "/evolve_report.json"));
  CHECK(file_exists(outdir + "/evolve_report.txt"));

  std::ifstream meta(outdir + "/evolve_metadata.json");
  json j = json::parse(meta);
  CHECK(j["integrator"] == "implicit-midpoint");
  CHECK(j["gauge"] == "g_0sigma held at flat values");

  CHECK(run("evolve --preset kick --dt 0.2 --steps 5").exit_code == 3);
  CHECK(run("evolve --preset whirl").exit_code == 2);
}

TEST_CASE("quantize conserves the norm with frozen coefficients") {
  const std::string outdir = "/tmp/gravham_cli_quantize_out";
  auto r = run("quantize --points 48 --steps 40 --out " + outdir);
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("[PASS] norm conservation") != std::string::npos);
  CHECK(r.output.find("[PASS] generator self-adjointness") != std::string::npos);
  CHECK(r.output.find("kinetic_coefficient_11: -0.5") != std::string::npos);
  CHECK(file_exists(outdir + "/wavefunction.csv"));
  CHECK(file_exists(outdir + "/quantize_metadata.json"));

  std::ifstream meta(outdir + "/quantize_metadata.json");
  json j = json::parse(meta);
  CHECK(j["scheme"] == "crank-nicolson");
  CHECK(j["coefficients"] == "frozen");
}

TEST_CASE("quantize --local reports the drift instead of failing") {
  auto r = run("quantize --points 32 --steps 10 --local");
  CHECK(r.exit_code == 0);
  CHECK(r.output.find("coefficients: grid-local") != std::string::npos);
  CHECK(r.output.find("norm_drift_rel:") != std::string::npos);
  CHECK(r.output.find("hermiticity_defect:") != std::string::npos);
  CHECK(r.output.find("norm conservation") == std::string::npos);
}

TEST_CASE("quantize rejects malformed variable lists") {
  CHECK(run("quantize --vars g12 --points 16 --steps 2").exit_code == 2);
  CHECK(run("quantize --vars g11 --points 16 --steps 2 --dtau -1").exit_code == 2);
}
