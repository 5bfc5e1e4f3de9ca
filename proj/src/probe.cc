#include "trolleypack/probe.h"

#include <algorithm>
#include <random>

#include <omp.h>

#include "trolleypack/exact.h"
#include "trolleypack/heuristic.h"

namespace trolleypack {

bool IsNested(std::span<const ModuleSpec> modules) {
  std::vector<ModuleSpec> sorted(modules.begin(), modules.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const ModuleSpec& a, const ModuleSpec& b) {
              return a.length != b.length ? a.length < b.length
                                          : a.width < b.width;
            });
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    if (sorted[i].width < sorted[i - 1].width) return false;
  }
  return true;
}

std::optional<Divergence> Classify(const Instance& instance) {
  const Solution greedy = BestFitPack(instance);
  const ExactResult exact = SolveBruteforce(instance);
  if (!exact.solution) return std::nullopt;
  const SquareMicrometers optimum = *exact.solution->total_waste;
  Divergence d;
  d.parts.assign(instance.parts().begin(), instance.parts().end());
  d.modules.assign(instance.modules().begin(), instance.modules().end());
  d.exact_waste = optimum;
  if (!greedy.feasible) {
    d.kind = DivergenceKind::kBestFitInfeasible;
    return d;
  }
  if (*greedy.total_waste > optimum) {
    d.kind = DivergenceKind::kBestFitSuboptimal;
    d.best_fit_waste = greedy.total_waste;
    return d;
  }
  return std::nullopt;
}

Instance ProbeInstance(std::uint64_t seed, std::int64_t trial,
                       const ProbeConfig& config) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed),
                    static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(trial),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(trial) >> 32)};
  std::mt19937_64 rng(seq);
  auto uniform = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  const int num_modules = uniform(config.min_modules, config.max_modules);
  const int num_parts = uniform(config.min_parts, config.max_parts);

  std::vector<int> a(num_modules);
  std::vector<int> b(num_modules);
  for (int m = 0; m < num_modules; ++m) {
    a[m] = uniform(1, config.max_dimension_mm);
    b[m] = uniform(1, config.max_dimension_mm);
  }
  if (config.nested) {
    // Sorting both coordinates keeps max(a,b) and min(a,b) monotone, so the
    // normalized modules stay componentwise ordered.
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
  }
  std::vector<ModuleSpec> modules;
  for (int m = 0; m < num_modules; ++m) {
    modules.push_back(ModuleSpec::Make(m + 1, FromMillimeters(a[m]),
                                       FromMillimeters(b[m]),
                                       uniform(1, config.max_capacity)));
  }
  std::vector<Part> parts;
  for (int p = 0; p < num_parts; ++p) {
    parts.push_back(Part::Make(p + 1,
                               FromMillimeters(uniform(1, config.max_dimension_mm)),
                               FromMillimeters(uniform(1, config.max_dimension_mm))));
  }
  return Instance(std::move(parts), std::move(modules));
}

std::optional<Divergence> ProbeTrial(std::uint64_t seed, std::int64_t trial,
                                     const ProbeConfig& config) {
  std::optional<Divergence> d = Classify(ProbeInstance(seed, trial, config));
  if (d) {
    d->seed = seed;
    d->trial = trial;
  }
  return d;
}

std::vector<Divergence> CounterexampleProbeSerial(std::uint64_t seed,
                                                  std::int64_t trials,
                                                  const ProbeConfig& config) {
  std::vector<Divergence> found;
  for (std::int64_t t = 0; t < trials; ++t) {
    if (auto d = ProbeTrial(seed, t, config)) found.push_back(std::move(*d));
  }
  return found;
}

std::vector<Divergence> CounterexampleProbeParallel(std::uint64_t seed,
                                                    std::int64_t trials,
                                                    const ProbeConfig& config,
                                                    int threads) {
  std::vector<std::optional<Divergence>> slots(trials);
  const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 64) num_threads(workers)
  for (std::int64_t t = 0; t < trials; ++t) {
    slots[t] = ProbeTrial(seed, t, config);
  }
  std::vector<Divergence> found;
  for (auto& slot : slots) {
    if (slot) found.push_back(std::move(*slot));
  }
  return found;
}

}  // namespace trolleypack
