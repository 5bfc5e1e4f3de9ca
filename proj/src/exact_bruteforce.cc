#include <chrono>
#include <string>

#include "trolleypack/exact.h"

namespace trolleypack {

const char* ToString(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "optimal";
    case SolveStatus::kInfeasible:
      return "infeasible";
    case SolveStatus::kTimeout:
      return "timeout";
  }
  return "unknown";
}

namespace {

struct Enumerator {
  const Instance& instance;
  std::vector<int> remaining;
  std::vector<std::optional<std::size_t>> current;
  std::vector<std::optional<std::size_t>> best;
  std::optional<SquareMicrometers> best_cost;
  std::int64_t nodes = 0;

  void Visit(std::size_t i, SquareMicrometers cost) {
    ++nodes;
    if (i == instance.num_parts()) {
      if (!best_cost || cost < *best_cost) {
        best_cost = cost;
        best = current;
      }
      return;
    }
    const Part& part = instance.parts()[i];
    for (std::size_t m = 0; m < instance.num_modules(); ++m) {
      const ModuleSpec& module = instance.modules()[m];
      if (remaining[m] == 0 || !Fits(part, module)) continue;
      --remaining[m];
      current[i] = m;
      Visit(i + 1, cost + Waste(part, module));
      current[i].reset();
      ++remaining[m];
    }
  }
};

}  // namespace

ExactResult SolveBruteforce(const Instance& instance) {
  if (instance.num_parts() > kBruteforceMaxParts ||
      instance.num_modules() > kBruteforceMaxModules) {
    throw SizeGuardError("brute force is limited to " +
                         std::to_string(kBruteforceMaxParts) + " parts and " +
                         std::to_string(kBruteforceMaxModules) + " modules");
  }
  auto start = std::chrono::steady_clock::now();
  Enumerator e{instance, {}, {}, {}, std::nullopt, 0};
  for (const ModuleSpec& m : instance.modules()) e.remaining.push_back(m.capacity);
  e.current.resize(instance.num_parts());
  e.Visit(0, 0);

  ExactResult result;
  result.nodes_expanded = e.nodes;
  result.runtime_s = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  if (e.best_cost) {
    result.status = SolveStatus::kOptimal;
    result.solution =
        MakeSolution(instance, e.best, "exact-bruteforce", result.runtime_s);
  }
  return result;
}

}  // namespace trolleypack
