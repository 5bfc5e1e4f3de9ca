// Helpers shared by the unit and acceptance tests.
//
// OracleMinWaste is a deliberately naive odometer over every part->module
// assignment vector with no pruning, written independently of the library's
// solvers so it can serve as their reference.

#ifndef TROLLEYPACK_TESTS_TEST_UTIL_H_
#define TROLLEYPACK_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <random>
#include <tuple>
#include <vector>

#include "trolleypack/core.h"

namespace trolleypack::testing {

// {length_mm, width_mm}; ids are 1-based positions.
inline std::vector<Part> Parts(
    std::initializer_list<std::pair<std::int64_t, std::int64_t>> dims) {
  std::vector<Part> parts;
  int id = 1;
  for (auto [a, b] : dims) {
    parts.push_back(Part::Make(id++, FromMillimeters(a), FromMillimeters(b)));
  }
  return parts;
}

// {length_mm, width_mm, capacity}; ids are 1-based positions.
inline std::vector<ModuleSpec> Modules(
    std::initializer_list<std::tuple<std::int64_t, std::int64_t, int>> dims) {
  std::vector<ModuleSpec> modules;
  int id = 1;
  for (auto [a, b, c] : dims) {
    modules.push_back(
        ModuleSpec::Make(id++, FromMillimeters(a), FromMillimeters(b), c));
  }
  return modules;
}

constexpr SquareMicrometers SquareMm(std::int64_t mm2) {
  return mm2 * kMicrometersPerMillimeter * kMicrometersPerMillimeter;
}

// Minimum total waste over all assignments satisfying fit, capacity and
// exactly-one constraints, or nullopt when none exists.
inline std::optional<SquareMicrometers> OracleMinWaste(const Instance& inst) {
  const std::size_t n = inst.num_parts();
  const std::size_t m = inst.num_modules();
  if (n == 0) return 0;
  if (m == 0) return std::nullopt;
  std::vector<std::size_t> pick(n, 0);
  std::optional<SquareMicrometers> best;
  while (true) {
    std::vector<int> used(m, 0);
    bool ok = true;
    SquareMicrometers cost = 0;
    for (std::size_t p = 0; p < n && ok; ++p) {
      const Part& part = inst.parts()[p];
      const ModuleSpec& mod = inst.modules()[pick[p]];
      const bool fits = (part.length <= mod.length && part.width <= mod.width) ||
                        (part.width <= mod.length && part.length <= mod.width);
      ok = fits && ++used[pick[p]] <= mod.capacity;
      cost += mod.length * mod.width - part.length * part.width;
    }
    if (ok && (!best || cost < *best)) best = cost;
    std::size_t k = 0;
    while (k < n && ++pick[k] == m) pick[k++] = 0;
    if (k == n) break;
  }
  return best;
}

// Small random instance; nested configurations have componentwise-ordered
// modules.
inline Instance RandomSmallInstance(std::mt19937_64& rng, int max_parts,
                                    int max_modules, bool nested,
                                    int max_dim = 30, int max_capacity = 3) {
  auto uniform = [&rng](int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng);
  };
  const int num_parts = uniform(0, max_parts);
  const int num_modules = uniform(1, max_modules);
  std::vector<int> a(num_modules), b(num_modules);
  for (int i = 0; i < num_modules; ++i) {
    a[i] = uniform(1, max_dim);
    b[i] = uniform(1, max_dim);
  }
  if (nested) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
  }
  std::vector<ModuleSpec> modules;
  for (int i = 0; i < num_modules; ++i) {
    modules.push_back(ModuleSpec::Make(10 + i, FromMillimeters(a[i]),
                                       FromMillimeters(b[i]),
                                       uniform(0, max_capacity)));
  }
  std::vector<Part> parts;
  for (int i = 0; i < num_parts; ++i) {
    parts.push_back(Part::Make(100 + i, FromMillimeters(uniform(1, max_dim)),
                               FromMillimeters(uniform(1, max_dim))));
  }
  return Instance(std::move(parts), std::move(modules));
}

}  // namespace trolleypack::testing

#endif  // TROLLEYPACK_TESTS_TEST_UTIL_H_
