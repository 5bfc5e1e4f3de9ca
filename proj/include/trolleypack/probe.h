// Randomized search for instances on which best-fit is not optimal: it either
// fails although a feasible assignment exists, or wastes strictly more than
// the brute-force optimum.

#ifndef TROLLEYPACK_PROBE_H_
#define TROLLEYPACK_PROBE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "trolleypack/core.h"

namespace trolleypack {

struct ProbeConfig {
  // Nested: module set totally ordered by componentwise comparison.
  bool nested = false;
  int min_parts = 2;
  int max_parts = 6;
  int min_modules = 2;
  int max_modules = 4;
  int max_capacity = 2;
  int max_dimension_mm = 40;
};

enum class DivergenceKind { kBestFitInfeasible, kBestFitSuboptimal };

struct Divergence {
  std::uint64_t seed = 0;
  std::int64_t trial = 0;
  DivergenceKind kind = DivergenceKind::kBestFitInfeasible;
  std::vector<Part> parts;
  std::vector<ModuleSpec> modules;
  std::optional<SquareMicrometers> best_fit_waste;
  SquareMicrometers exact_waste = 0;
};

bool IsNested(std::span<const ModuleSpec> modules);

// Compares best-fit against brute force on one instance.
std::optional<Divergence> Classify(const Instance& instance);

// The instance for (seed, trial). Deterministic in its arguments only.
Instance ProbeInstance(std::uint64_t seed, std::int64_t trial,
                       const ProbeConfig& config);

std::optional<Divergence> ProbeTrial(std::uint64_t seed, std::int64_t trial,
                                     const ProbeConfig& config);

// Divergences ordered by trial. The parallel kernel runs trials on OpenMP
// threads (0 = runtime default) and returns the same list.
std::vector<Divergence> CounterexampleProbeSerial(std::uint64_t seed,
                                                  std::int64_t trials,
                                                  const ProbeConfig& config);
std::vector<Divergence> CounterexampleProbeParallel(std::uint64_t seed,
                                                    std::int64_t trials,
                                                    const ProbeConfig& config,
                                                    int threads = 0);

}  // namespace trolleypack

#endif  // TROLLEYPACK_PROBE_H_
