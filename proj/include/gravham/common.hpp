#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>

namespace gravham {

// Spacetime dimension d: index 0 is temporal, 1..d-1 spatial.
// Everything in the library is runtime-dimensioned but capped so that
// small fixed buffers can live on the stack.
inline constexpr int kMaxDim = 8;
inline constexpr int kMinDim = 3;

// Error codes drive the CLI exit-code contract:
//   1 = a check failed, 2 = bad configuration, 3 = numeric degeneracy.
enum class ErrorCode : int { CheckFailure = 1, Config = 2, Degeneracy = 3 };

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, std::string name, const std::string& what)
      : std::runtime_error(name + ": " + what), code_(code), name_(std::move(name)) {}
  ErrorCode code() const { return code_; }
  const std::string& name() const { return name_; }

private:
  ErrorCode code_;
  std::string name_;
};

#define GRAVHAM_ERROR(NAME, CODE)                                        \
  class NAME : public Error {                                            \
  public:                                                                \
    explicit NAME(const std::string& what) : Error(CODE, #NAME, what) {} \
  }

GRAVHAM_ERROR(DimensionTooSmall, ErrorCode::Degeneracy);
GRAVHAM_ERROR(SingularMetric, ErrorCode::Degeneracy);
GRAVHAM_ERROR(NonLorentzian, ErrorCode::Degeneracy);
GRAVHAM_ERROR(TemporalDegeneracy, ErrorCode::Degeneracy);
GRAVHAM_ERROR(VarianceMismatch, ErrorCode::Config);
GRAVHAM_ERROR(RankOverflow, ErrorCode::Config);
GRAVHAM_ERROR(ShapeMismatch, ErrorCode::Config);
GRAVHAM_ERROR(UnsupportedSymbol, ErrorCode::Config);
GRAVHAM_ERROR(ChristoffelMismatch, ErrorCode::CheckFailure);
GRAVHAM_ERROR(MetricDegenerated, ErrorCode::Degeneracy);
GRAVHAM_ERROR(UnstableStep, ErrorCode::Degeneracy);
GRAVHAM_ERROR(NoFront, ErrorCode::Degeneracy);
GRAVHAM_ERROR(NonIntegrableGauge, ErrorCode::Config);
GRAVHAM_ERROR(NonUnitaryDrift, ErrorCode::Degeneracy);
GRAVHAM_ERROR(DegenerateFit, ErrorCode::Degeneracy);
GRAVHAM_ERROR(BadInput, ErrorCode::Config);

#undef GRAVHAM_ERROR

inline void require_dimension(int d) {
  if (d < kMinDim)
    throw DimensionTooSmall("need d >= 3, got d = " + std::to_string(d));
  if (d > kMaxDim)
    throw RankOverflow("d = " + std::to_string(d) + " exceeds compiled cap " +
                       std::to_string(kMaxDim));
}

// Deterministic RNG: one seeded engine per population, never std::random_device.
using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline double gaussian(Rng& rng) { return std::normal_distribution<double>(0.0, 1.0)(rng); }

// Worker cap for the few data-parallel loops. GRAVHAM_THREADS caps it;
// results are identical for any value because threads write disjoint outputs.
inline int max_threads() {
  unsigned hw = std::thread::hardware_concurrency();
  int n = hw == 0 ? 1 : static_cast<int>(hw);
  if (n > 4) n = 4;
  if (const char* env = std::getenv("GRAVHAM_THREADS")) {
    int cap = std::atoi(env);
    if (cap >= 1 && cap < n) n = cap;
  }
  return n < 1 ? 1 : n;
}

}  // namespace gravham
