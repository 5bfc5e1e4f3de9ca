#include "trolleypack/core.h"

#include <algorithm>
#include <string>
#include <utility>

namespace trolleypack {

Part Part::Make(int id, Micrometers a, Micrometers b) {
  if (a <= 0 || b <= 0) {
    throw StructuralError("part " + std::to_string(id) +
                          " has a non-positive dimension");
  }
  return Part{id, std::max(a, b), std::min(a, b)};
}

ModuleSpec ModuleSpec::Make(int id, Micrometers a, Micrometers b,
                            int capacity) {
  if (a <= 0 || b <= 0) {
    throw StructuralError("module " + std::to_string(id) +
                          " has a non-positive dimension");
  }
  if (capacity < 0) {
    throw StructuralError("module " + std::to_string(id) +
                          " has a negative capacity");
  }
  return ModuleSpec{id, std::max(a, b), std::min(a, b), capacity};
}

Instance::Instance(std::vector<Part> parts, std::vector<ModuleSpec> modules)
    : parts_(std::move(parts)), modules_(std::move(modules)) {
  for (std::size_t i = 0; i < parts_.size(); ++i) {
    if (!part_index_.emplace(parts_[i].id, i).second) {
      throw StructuralError("duplicate part id " +
                            std::to_string(parts_[i].id));
    }
  }
  for (std::size_t i = 0; i < modules_.size(); ++i) {
    if (modules_[i].capacity < 0) {
      throw StructuralError("module " + std::to_string(modules_[i].id) +
                            " has a negative capacity");
    }
    if (!module_index_.emplace(modules_[i].id, i).second) {
      throw StructuralError("duplicate module id " +
                            std::to_string(modules_[i].id));
    }
  }
}

std::optional<std::size_t> Instance::PartIndex(int part_id) const {
  auto it = part_index_.find(part_id);
  if (it == part_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::size_t> Instance::ModuleIndex(int module_id) const {
  auto it = module_index_.find(module_id);
  if (it == module_index_.end()) return std::nullopt;
  return it->second;
}

Instance Instance::WithTrolleys(int trolleys) const {
  if (trolleys < 1) throw StructuralError("trolley count must be >= 1");
  std::vector<ModuleSpec> scaled = modules_;
  for (ModuleSpec& m : scaled) m.capacity *= trolleys;
  return Instance(parts_, std::move(scaled));
}

FeasibilityReport CheckFeasible(const Instance& instance,
                                const Solution& solution) {
  if (solution.assignments.size() != instance.num_parts()) {
    throw StructuralError(
        "solution has " + std::to_string(solution.assignments.size()) +
        " assignments for " + std::to_string(instance.num_parts()) + " parts");
  }
  FeasibilityReport report;
  std::vector<int> usage(instance.num_modules(), 0);
  for (std::size_t i = 0; i < solution.assignments.size(); ++i) {
    const Assignment& a = solution.assignments[i];
    if (a.part_id != instance.parts()[i].id) {
      throw StructuralError("assignment " + std::to_string(i) +
                            " refers to part " + std::to_string(a.part_id) +
                            ", expected " +
                            std::to_string(instance.parts()[i].id));
    }
    if (!a.module_id) {
      report.unassigned.push_back(a.part_id);
      continue;
    }
    std::optional<std::size_t> m = instance.ModuleIndex(*a.module_id);
    if (!m) {
      throw StructuralError("assignment of part " + std::to_string(a.part_id) +
                            " refers to unknown module " +
                            std::to_string(*a.module_id));
    }
    ++usage[*m];
    if (!Fits(instance.parts()[i], instance.modules()[*m])) {
      report.fit.push_back({a.part_id, *a.module_id});
    }
  }
  for (std::size_t m = 0; m < usage.size(); ++m) {
    const ModuleSpec& spec = instance.modules()[m];
    if (usage[m] > spec.capacity) {
      report.capacity.push_back({spec.id, usage[m], spec.capacity});
    }
  }
  return report;
}

SquareMicrometers TotalWaste(const Instance& instance,
                             const Solution& solution) {
  if (!CheckFeasible(instance, solution).feasible()) {
    throw InfeasibleError("total waste of an infeasible solution is undefined");
  }
  SquareMicrometers total = 0;
  for (std::size_t i = 0; i < solution.assignments.size(); ++i) {
    std::size_t m = *instance.ModuleIndex(*solution.assignments[i].module_id);
    total += Waste(instance.parts()[i], instance.modules()[m]);
  }
  return total;
}

void Evaluate(const Instance& instance, Solution& solution) {
  solution.feasible = CheckFeasible(instance, solution).feasible();
  solution.total_waste.reset();
  if (solution.feasible) solution.total_waste = TotalWaste(instance, solution);
}

Solution MakeSolution(const Instance& instance,
                      std::span<const std::optional<std::size_t>> module_of_part,
                      std::string solver_name, double runtime_s) {
  if (module_of_part.size() != instance.num_parts()) {
    throw StructuralError("module_of_part size does not match part count");
  }
  Solution solution;
  solution.solver_name = std::move(solver_name);
  solution.runtime_s = runtime_s;
  solution.assignments.reserve(module_of_part.size());
  for (std::size_t i = 0; i < module_of_part.size(); ++i) {
    Assignment a{instance.parts()[i].id, std::nullopt};
    if (module_of_part[i]) {
      if (*module_of_part[i] >= instance.num_modules()) {
        throw StructuralError("module index out of range");
      }
      a.module_id = instance.modules()[*module_of_part[i]].id;
    }
    solution.assignments.push_back(a);
  }
  Evaluate(instance, solution);
  return solution;
}

}  // namespace trolleypack
