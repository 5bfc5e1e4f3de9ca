// Seeded random part streams.
//
// Parts have whole-millimeter sides drawn uniformly: length in
// [min module width, max module length], width in [min module width, length].
// Draws that fit no module are rejected and redrawn. The stream is
// std::mt19937_64 fed through std::uniform_int_distribution, so sequences are
// reproducible for a given standard library.

#ifndef TROLLEYPACK_GENERATOR_H_
#define TROLLEYPACK_GENERATOR_H_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "trolleypack/core.h"

namespace trolleypack {

struct PartBounds {
  std::int64_t min_mm;  // smallest module width
  std::int64_t max_mm;  // largest module length
};

// Requires a non-empty module list with whole-millimeter dimensions.
PartBounds BoundsFor(std::span<const ModuleSpec> modules);

Part GeneratePart(std::mt19937_64& rng, std::span<const ModuleSpec> modules,
                  int id);

std::vector<Part> GenerateParts(std::mt19937_64& rng,
                                std::span<const ModuleSpec> modules, int count,
                                int first_id = 1);

}  // namespace trolleypack

#endif  // TROLLEYPACK_GENERATOR_H_
