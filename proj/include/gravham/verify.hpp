#pragma once

#include <cstdint>

#include "gravham/report.hpp"

// Identity suites shared by the command-line tool and the tests. Sampling
// domains differ per check: the Gamma-Gamma and direct inverse identities
// hold on any admissible metric; the kinetic-block and Legendre checks hold
// on zero-shift points (g_0k = 0) with spatial velocities, which is the
// gauge the dynamics modules evolve in.

namespace gravham {

struct VerifyOptions {
  int d = 4;
  std::uint64_t seed = 7;
  int samples = 60;
  // Fault fixture: flips the sign of the second structure-tensor term inside
  // the kinetic-block check's own B evaluation. The identity then fails and
  // the report exits nonzero; nothing outside that check is affected.
  bool inject_bug = false;
};

Report run_verify(const VerifyOptions& opt);

// Subsets used by the narrower subcommands. tol <= 0 picks the default.
Report run_tensor_checks(int d, std::uint64_t seed, int samples, double tol);
Report run_legendre_checks(int d, std::uint64_t seed, int samples, double tol);

}  // namespace gravham
