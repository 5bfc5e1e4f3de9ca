#include "trolleypack/generator.h"

#include <algorithm>
#include <stdexcept>

namespace trolleypack {

PartBounds BoundsFor(std::span<const ModuleSpec> modules) {
  if (modules.empty()) {
    throw std::invalid_argument("part generation needs at least one module");
  }
  Micrometers min_width = modules.front().width;
  Micrometers max_length = modules.front().length;
  for (const ModuleSpec& m : modules) {
    min_width = std::min(min_width, m.width);
    max_length = std::max(max_length, m.length);
  }
  // Round inward to whole millimeters.
  PartBounds bounds{
      (min_width + kMicrometersPerMillimeter - 1) / kMicrometersPerMillimeter,
      max_length / kMicrometersPerMillimeter};
  if (bounds.min_mm > bounds.max_mm) {
    throw std::invalid_argument("module set admits no whole-millimeter part");
  }
  return bounds;
}

Part GeneratePart(std::mt19937_64& rng, std::span<const ModuleSpec> modules,
                  int id) {
  const PartBounds bounds = BoundsFor(modules);
  std::uniform_int_distribution<std::int64_t> length_dist(bounds.min_mm,
                                                          bounds.max_mm);
  while (true) {
    const std::int64_t length = length_dist(rng);
    std::uniform_int_distribution<std::int64_t> width_dist(bounds.min_mm,
                                                           length);
    const std::int64_t width = width_dist(rng);
    Part part = Part::Make(id, FromMillimeters(length), FromMillimeters(width));
    for (const ModuleSpec& m : modules) {
      if (Fits(part, m)) return part;
    }
  }
}

std::vector<Part> GenerateParts(std::mt19937_64& rng,
                                std::span<const ModuleSpec> modules, int count,
                                int first_id) {
  std::vector<Part> parts;
  parts.reserve(count);
  for (int i = 0; i < count; ++i) {
    parts.push_back(GeneratePart(rng, modules, first_id + i));
  }
  return parts;
}

}  // namespace trolleypack
