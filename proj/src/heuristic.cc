#include "trolleypack/heuristic.h"

#include <cassert>
#include <chrono>
#include <limits>
#include <type_traits>

namespace trolleypack {

PackingState::PackingState(std::span<const ModuleSpec> modules)
    : modules_(modules) {
  remaining_.reserve(modules.size());
  for (const ModuleSpec& m : modules) remaining_.push_back(m.capacity);
}

void PackingState::Take(std::size_t m) {
  assert(remaining_[m] > 0);
  --remaining_[m];
}

std::optional<std::size_t> BestFitModule(const Part& part,
                                         const PackingState& state) {
  std::optional<std::size_t> best;
  SquareMicrometers best_waste = 0;
  const auto modules = state.modules();
  for (std::size_t m = 0; m < modules.size(); ++m) {
    if (state.remaining(m) <= 0 || !Fits(part, modules[m])) continue;
    SquareMicrometers waste = Waste(part, modules[m]);
    if (!best || waste < best_waste ||
        (waste == best_waste && modules[m].id < modules[*best].id)) {
      best = m;
      best_waste = waste;
    }
  }
  return best;
}

ModuleIndex::ModuleIndex(std::span<const ModuleSpec> modules)
    : modules_(modules) {
  remaining_.reserve(modules.size());
  for (std::size_t m = 0; m < modules.size(); ++m) {
    remaining_.push_back(modules[m].capacity);
    if (modules[m].capacity > 0) {
      live_.emplace(std::make_pair(modules[m].area(), modules[m].id), m);
    }
  }
}

std::optional<std::size_t> ModuleIndex::BestFit(const Part& part) const {
  // Waste is monotone in module area, so the first fitting entry at or above
  // the part's own area is the minimum-waste choice. Smaller modules cannot
  // contain the part. Equal areas with different shapes are each probed.
  auto it = live_.lower_bound({part.area(), std::numeric_limits<int>::min()});
  for (; it != live_.end(); ++it) {
    if (Fits(part, modules_[it->second])) return it->second;
  }
  return std::nullopt;
}

void ModuleIndex::Take(std::size_t m) {
  assert(remaining_[m] > 0);
  if (--remaining_[m] == 0) {
    live_.erase({modules_[m].area(), modules_[m].id});
  }
}

std::optional<std::size_t> BestFitModuleIndexed(const Part& part,
                                                const ModuleIndex& index) {
  return index.BestFit(part);
}

namespace {

template <typename State>
Solution PackInOrder(const Instance& instance, const char* name) {
  auto start = std::chrono::steady_clock::now();
  State state(instance.modules());
  std::vector<std::optional<std::size_t>> chosen(instance.num_parts());
  for (std::size_t i = 0; i < instance.num_parts(); ++i) {
    std::optional<std::size_t> m;
    if constexpr (std::is_same_v<State, PackingState>) {
      m = BestFitModule(instance.parts()[i], state);
    } else {
      m = BestFitModuleIndexed(instance.parts()[i], state);
    }
    if (m) state.Take(*m);
    chosen[i] = m;
  }
  double elapsed = std::chrono::duration<double>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return MakeSolution(instance, chosen, name, elapsed);
}

}  // namespace

Solution BestFitPack(const Instance& instance) {
  return PackInOrder<PackingState>(instance, "bestfit");
}

Solution BestFitPackIndexed(const Instance& instance) {
  return PackInOrder<ModuleIndex>(instance, "bestfit-indexed");
}

}  // namespace trolleypack
