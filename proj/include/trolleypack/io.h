// CSV and JSON file formats.
//
//   parts:    id,length,width            (millimeters, up to 3 decimals)
//   modules:  id,length,width,capacity
//   solution: part_id,module_id          (module_id empty when unassigned)
//
// Files are UTF-8 with LF line endings; a trailing CR is tolerated on input.

#ifndef TROLLEYPACK_IO_H_
#define TROLLEYPACK_IO_H_

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "trolleypack/core.h"

namespace trolleypack {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// "12", "12.5", "12.345" -> micrometers. Rejects signs, exponents and more
// than three decimals.
Micrometers ParseMillimeters(std::string_view text);

// Shortest exact decimal rendering, e.g. 12500 -> "12.5".
std::string FormatMillimeters(Micrometers value);
std::string FormatSquareMillimeters(SquareMicrometers value);
double ToSquareMillimeters(SquareMicrometers value);

std::vector<Part> ReadParts(std::istream& in);
std::vector<ModuleSpec> ReadModules(std::istream& in);
std::vector<Assignment> ReadAssignments(std::istream& in);

std::vector<Part> ReadPartsFile(const std::filesystem::path& path);
std::vector<ModuleSpec> ReadModulesFile(const std::filesystem::path& path);
std::vector<Assignment> ReadAssignmentsFile(const std::filesystem::path& path);

void WriteParts(std::ostream& out, std::span<const Part> parts);
void WriteModules(std::ostream& out, std::span<const ModuleSpec> modules);
void WriteAssignments(std::ostream& out, const Solution& solution);

// {solver, feasible, total_waste, runtime_s}; total_waste is mm^2 or null.
nlohmann::json SolutionSidecar(const Solution& solution);

nlohmann::json ReportToJson(const FeasibilityReport& report);

}  // namespace trolleypack

#endif  // TROLLEYPACK_IO_H_
