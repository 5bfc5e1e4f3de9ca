// Online best-fit packing: each part, in presentation order, goes to the
// fitting module with spare capacity that wastes the least area.

#ifndef TROLLEYPACK_HEURISTIC_H_
#define TROLLEYPACK_HEURISTIC_H_

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "trolleypack/core.h"

namespace trolleypack {

// Remaining slot counts for a fixed module list. Module positions, not ids,
// address the counters.
class PackingState {
 public:
  explicit PackingState(std::span<const ModuleSpec> modules);

  std::span<const ModuleSpec> modules() const { return modules_; }
  std::span<const int> remaining() const { return remaining_; }
  int remaining(std::size_t m) const { return remaining_[m]; }

  // Decrements module m. Requires remaining(m) > 0.
  void Take(std::size_t m);

 private:
  std::span<const ModuleSpec> modules_;
  std::vector<int> remaining_;
};

// Position of the best-fit module, or nullopt when no fitting module has
// capacity left. Equal waste resolves to the lower module id.
std::optional<std::size_t> BestFitModule(const Part& part,
                                         const PackingState& state);

// Ordered map keyed by (module area, module id) over modules that still have
// capacity. Depleted modules leave the map, so a query only probes live
// candidates in ascending waste order.
class ModuleIndex {
 public:
  explicit ModuleIndex(std::span<const ModuleSpec> modules);

  bool empty() const { return live_.empty(); }
  int remaining(std::size_t m) const { return remaining_[m]; }
  std::optional<std::size_t> BestFit(const Part& part) const;
  void Take(std::size_t m);

 private:
  std::span<const ModuleSpec> modules_;
  std::vector<int> remaining_;
  std::map<std::pair<SquareMicrometers, int>, std::size_t> live_;
};

std::optional<std::size_t> BestFitModuleIndexed(const Part& part,
                                                const ModuleIndex& index);

// Packs every part in order. A part with no eligible module stays unassigned
// and packing continues; the solution is then infeasible.
Solution BestFitPack(const Instance& instance);
Solution BestFitPackIndexed(const Instance& instance);

}  // namespace trolleypack

#endif  // TROLLEYPACK_HEURISTIC_H_
