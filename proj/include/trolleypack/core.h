// Domain model for packing rectangular parts into trolley modules.
//
// Dimensions are fixed-point integers in micrometers; areas are in square
// micrometers. Input files use millimeters with up to three decimals, so every
// value read from disk converts exactly and all waste arithmetic is integral.

#ifndef TROLLEYPACK_CORE_H_
#define TROLLEYPACK_CORE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace trolleypack {

using Micrometers = std::int64_t;
using SquareMicrometers = std::int64_t;

inline constexpr Micrometers kMicrometersPerMillimeter = 1000;

constexpr Micrometers FromMillimeters(std::int64_t mm) {
  return mm * kMicrometersPerMillimeter;
}

// Thrown for malformed inputs: duplicate or dangling ids, wrong assignment
// counts, non-positive dimensions. Never used to signal infeasibility.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when a quantity that only exists for feasible solutions is requested
// on an infeasible one.
class InfeasibleError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct Part {
  int id = 0;
  Micrometers length = 0;
  Micrometers width = 0;

  // Swaps the sides so that length >= width. Throws on non-positive sides.
  static Part Make(int id, Micrometers a, Micrometers b);

  SquareMicrometers area() const { return length * width; }
  friend bool operator==(const Part&, const Part&) = default;
};

struct ModuleSpec {
  int id = 0;
  Micrometers length = 0;
  Micrometers width = 0;
  int capacity = 0;

  static ModuleSpec Make(int id, Micrometers a, Micrometers b, int capacity);

  SquareMicrometers area() const { return length * width; }
  friend bool operator==(const ModuleSpec&, const ModuleSpec&) = default;
};

// Wasted space of placing `part` in `module`: module area minus part area.
// Negative when the part is larger than the module.
constexpr SquareMicrometers Waste(const Part& part, const ModuleSpec& module) {
  return module.length * module.width - part.length * part.width;
}

// True iff the part fits in either orientation. Works on un-normalized values.
constexpr bool Fits(const Part& part, const ModuleSpec& module) {
  return (part.length <= module.length && part.width <= module.width) ||
         (part.length <= module.width && part.width <= module.length);
}

// Ordered parts plus the modules they may be assigned to. Part order is the
// presentation order used by online algorithms.
class Instance {
 public:
  Instance() = default;
  Instance(std::vector<Part> parts, std::vector<ModuleSpec> modules);

  std::span<const Part> parts() const { return parts_; }
  std::span<const ModuleSpec> modules() const { return modules_; }
  std::size_t num_parts() const { return parts_.size(); }
  std::size_t num_modules() const { return modules_.size(); }

  std::optional<std::size_t> PartIndex(int part_id) const;
  std::optional<std::size_t> ModuleIndex(int module_id) const;

  // Same parts, every module capacity multiplied by `trolleys`.
  Instance WithTrolleys(int trolleys) const;

 private:
  std::vector<Part> parts_;
  std::vector<ModuleSpec> modules_;
  std::unordered_map<int, std::size_t> part_index_;
  std::unordered_map<int, std::size_t> module_index_;
};

struct Assignment {
  int part_id = 0;
  std::optional<int> module_id;  // nullopt: unassigned
  friend bool operator==(const Assignment&, const Assignment&) = default;
};

struct Solution {
  std::vector<Assignment> assignments;
  bool feasible = false;
  std::optional<SquareMicrometers> total_waste;  // set iff feasible
  std::string solver_name;
  double runtime_s = 0.0;
};

struct FitViolation {
  int part_id;
  int module_id;
};

struct CapacityViolation {
  int module_id;
  int usage;
  int capacity;
};

struct FeasibilityReport {
  std::vector<FitViolation> fit;
  std::vector<CapacityViolation> capacity;
  std::vector<int> unassigned;

  bool feasible() const {
    return fit.empty() && capacity.empty() && unassigned.empty();
  }
};

// Checks fit, capacity and exactly-one-module constraints. Throws
// StructuralError if the solution does not have exactly one assignment per
// part (in instance order) or references unknown module ids.
FeasibilityReport CheckFeasible(const Instance& instance,
                                const Solution& solution);

// Sum of waste over all assignments. Throws InfeasibleError if the solution
// violates any constraint.
SquareMicrometers TotalWaste(const Instance& instance,
                             const Solution& solution);

// Builds a Solution from per-part module indices (nullopt = unassigned) and
// fills in the feasibility verdict and total waste.
Solution MakeSolution(const Instance& instance,
                      std::span<const std::optional<std::size_t>> module_of_part,
                      std::string solver_name, double runtime_s = 0.0);

// Recomputes `feasible` and `total_waste` from the assignments.
void Evaluate(const Instance& instance, Solution& solution);

}  // namespace trolleypack

#endif  // TROLLEYPACK_CORE_H_
