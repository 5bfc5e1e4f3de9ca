#include "trolleypack/io.h"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace trolleypack {
namespace {

std::vector<std::string> SplitFields(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t comma = line.find(',', start);
    fields.emplace_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

// Reads non-empty lines, checks the header, returns the data rows split into
// fields. Line numbers in errors are 1-based and count the header.
std::vector<std::vector<std::string>> ReadTable(std::istream& in,
                                                std::string_view header) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  bool seen_header = false;
  int line_no = 0;
  const std::size_t columns = SplitFields(header).size();
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header) {
        throw ParseError("expected header '" + std::string(header) +
                         "', got '" + line + "'");
      }
      seen_header = true;
      continue;
    }
    std::vector<std::string> fields = SplitFields(line);
    if (fields.size() != columns) {
      throw ParseError("line " + std::to_string(line_no) + ": expected " +
                       std::to_string(columns) + " fields, got " +
                       std::to_string(fields.size()));
    }
    rows.push_back(std::move(fields));
  }
  if (!seen_header) {
    throw ParseError("missing header '" + std::string(header) + "'");
  }
  return rows;
}

int ParseInt(std::string_view text) {
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw ParseError("invalid integer '" + std::string(text) + "'");
  }
  return value;
}

std::ifstream OpenForRead(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open " + path.string());
  return in;
}

std::string FormatFixedPoint(std::int64_t value, std::int64_t scale,
                             int digits) {
  std::string sign = value < 0 ? "-" : "";
  // Magnitudes here stay far below INT64_MAX, so negation is safe.
  std::int64_t magnitude = value < 0 ? -value : value;
  std::string out = sign + std::to_string(magnitude / scale);
  std::int64_t frac = magnitude % scale;
  if (frac == 0) return out;
  std::string frac_text = std::to_string(frac);
  frac_text.insert(0, digits - frac_text.size(), '0');
  while (frac_text.back() == '0') frac_text.pop_back();
  return out + "." + frac_text;
}

}  // namespace

Micrometers ParseMillimeters(std::string_view text) {
  std::size_t dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac =
      dot == std::string_view::npos ? std::string_view() : text.substr(dot + 1);
  auto all_digits = [](std::string_view s) {
    for (char c : s) {
      if (c < '0' || c > '9') return false;
    }
    return true;
  };
  if (whole.empty() || !all_digits(whole) || !all_digits(frac) ||
      frac.size() > 3 || (dot != std::string_view::npos && frac.empty()) ||
      whole.size() > 12) {
    throw ParseError("invalid millimeter value '" + std::string(text) + "'");
  }
  Micrometers value = 0;
  for (char c : whole) value = value * 10 + (c - '0');
  Micrometers fraction = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    fraction = fraction * 10 + (i < frac.size() ? frac[i] - '0' : 0);
  }
  return value * kMicrometersPerMillimeter + fraction;
}

std::string FormatMillimeters(Micrometers value) {
  return FormatFixedPoint(value, kMicrometersPerMillimeter, 3);
}

std::string FormatSquareMillimeters(SquareMicrometers value) {
  return FormatFixedPoint(value, kMicrometersPerMillimeter * kMicrometersPerMillimeter, 6);
}

double ToSquareMillimeters(SquareMicrometers value) {
  return static_cast<double>(value) / 1e6;
}

std::vector<Part> ReadParts(std::istream& in) {
  std::vector<Part> parts;
  for (const auto& row : ReadTable(in, "id,length,width")) {
    parts.push_back(Part::Make(ParseInt(row[0]), ParseMillimeters(row[1]),
                               ParseMillimeters(row[2])));
  }
  return parts;
}

std::vector<ModuleSpec> ReadModules(std::istream& in) {
  std::vector<ModuleSpec> modules;
  for (const auto& row : ReadTable(in, "id,length,width,capacity")) {
    modules.push_back(ModuleSpec::Make(ParseInt(row[0]),
                                       ParseMillimeters(row[1]),
                                       ParseMillimeters(row[2]),
                                       ParseInt(row[3])));
  }
  return modules;
}

std::vector<Assignment> ReadAssignments(std::istream& in) {
  std::vector<Assignment> assignments;
  for (const auto& row : ReadTable(in, "part_id,module_id")) {
    Assignment a{ParseInt(row[0]), std::nullopt};
    if (!row[1].empty()) a.module_id = ParseInt(row[1]);
    assignments.push_back(a);
  }
  return assignments;
}

std::vector<Part> ReadPartsFile(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return ReadParts(in);
}

std::vector<ModuleSpec> ReadModulesFile(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return ReadModules(in);
}

std::vector<Assignment> ReadAssignmentsFile(const std::filesystem::path& path) {
  std::ifstream in = OpenForRead(path);
  return ReadAssignments(in);
}

void WriteParts(std::ostream& out, std::span<const Part> parts) {
  out << "id,length,width\n";
  for (const Part& p : parts) {
    out << p.id << ',' << FormatMillimeters(p.length) << ','
        << FormatMillimeters(p.width) << '\n';
  }
}

void WriteModules(std::ostream& out, std::span<const ModuleSpec> modules) {
  out << "id,length,width,capacity\n";
  for (const ModuleSpec& m : modules) {
    out << m.id << ',' << FormatMillimeters(m.length) << ','
        << FormatMillimeters(m.width) << ',' << m.capacity << '\n';
  }
}

void WriteAssignments(std::ostream& out, const Solution& solution) {
  out << "part_id,module_id\n";
  for (const Assignment& a : solution.assignments) {
    out << a.part_id << ',';
    if (a.module_id) out << *a.module_id;
    out << '\n';
  }
}

nlohmann::json SolutionSidecar(const Solution& solution) {
  nlohmann::json j;
  j["solver"] = solution.solver_name;
  j["feasible"] = solution.feasible;
  j["total_waste"] = solution.total_waste
                         ? nlohmann::json(ToSquareMillimeters(*solution.total_waste))
                         : nlohmann::json(nullptr);
  j["runtime_s"] = solution.runtime_s;
  return j;
}

nlohmann::json ReportToJson(const FeasibilityReport& report) {
  nlohmann::json j;
  j["feasible"] = report.feasible();
  j["fit"] = nlohmann::json::array();
  for (const FitViolation& v : report.fit) {
    j["fit"].push_back({{"part_id", v.part_id}, {"module_id", v.module_id}});
  }
  j["capacity"] = nlohmann::json::array();
  for (const CapacityViolation& v : report.capacity) {
    j["capacity"].push_back({{"module_id", v.module_id},
                             {"usage", v.usage},
                             {"capacity", v.capacity}});
  }
  j["unassigned"] = report.unassigned;
  return j;
}

}  // namespace trolleypack
