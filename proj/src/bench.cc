#include "trolleypack/bench.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <omp.h>

#include "trolleypack/dqn.h"
#include "trolleypack/exact.h"
#include "trolleypack/generator.h"
#include "trolleypack/heuristic.h"
#include "trolleypack/io.h"

namespace trolleypack {

std::string_view CliName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kBestFit:
      return "bestfit";
    case Algorithm::kExactBnb:
      return "exact-bnb";
    case Algorithm::kExactFlow:
      return "exact-flow";
    case Algorithm::kDqn:
      return "dqn";
  }
  return "";
}

std::string_view FileLabel(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kBestFit:
      return "Best_Fit";
    case Algorithm::kExactBnb:
      return "Exact_BnB";
    case Algorithm::kExactFlow:
      return "Exact_Flow";
    case Algorithm::kDqn:
      return "DQN";
  }
  return "";
}

std::optional<Algorithm> ParseAlgorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kBestFit, Algorithm::kExactBnb,
                      Algorithm::kExactFlow, Algorithm::kDqn}) {
    if (CliName(a) == name) return a;
  }
  return std::nullopt;
}

void ExperimentConfig::Validate() const {
  if (max_parts < 1) throw std::invalid_argument("max_parts must be >= 1");
  if (module_set.empty()) throw std::invalid_argument("module set is empty");
  if (seeds.empty()) throw std::invalid_argument("no seeds given");
  if (algorithms.empty()) throw std::invalid_argument("no algorithms given");
  const bool wants_dqn = std::find(algorithms.begin(), algorithms.end(),
                                   Algorithm::kDqn) != algorithms.end();
  if (wants_dqn && module_set.size() != kNumActions) {
    throw std::invalid_argument("dqn requires exactly 6 modules");
  }
  if (wants_dqn && !dqn) {
    throw std::invalid_argument("dqn selected without a checkpoint");
  }
}

PartStream MakePartStream(const ExperimentConfig& config, std::uint64_t seed) {
  PartStream stream;
  std::mt19937_64 rng(seed);
  if (!config.real_parts) {
    stream.parts = GenerateParts(rng, config.module_set, config.max_parts);
    return stream;
  }
  stream.parts = *config.real_parts;
  std::shuffle(stream.parts.begin(), stream.parts.end(), rng);
  if (stream.parts.size() < static_cast<std::size_t>(config.max_parts)) {
    stream.truncated = true;
  } else {
    stream.parts.resize(config.max_parts);
  }
  return stream;
}

std::vector<int> TrolleySchedule(std::span<const Part> parts,
                                 std::span<const ModuleSpec> module_set) {
  std::vector<int> schedule;
  schedule.reserve(parts.size());
  for (std::size_t n = 1; n <= parts.size(); ++n) {
    schedule.push_back(MinTrolleys(parts.first(n), module_set));
  }
  return schedule;
}

namespace {

Solution Solve(const ExperimentConfig& config, Algorithm algorithm,
               const Instance& instance) {
  switch (algorithm) {
    case Algorithm::kBestFit:
      return BestFitPack(instance);
    case Algorithm::kExactBnb: {
      BnbOptions options;
      options.timeout_s = config.bnb_timeout_s;
      ExactResult r = SolveBnb(instance, options);
      if (r.solution) return *r.solution;
      break;
    }
    case Algorithm::kExactFlow: {
      ExactResult r = SolveFlow(instance);
      if (r.solution) return *r.solution;
      break;
    }
    case Algorithm::kDqn:
      return ActGreedy(*config.dqn, instance);
  }
  std::vector<std::optional<std::size_t>> none(instance.num_parts());
  return MakeSolution(instance, none, std::string(CliName(algorithm)));
}

double TimeSolve(const ExperimentConfig& config, Algorithm algorithm,
                 const Instance& instance, Solution& out) {
  auto timed = [&](Solution& s) {
    auto start = std::chrono::steady_clock::now();
    s = Solve(config, algorithm, instance);
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         start)
        .count();
  };
  double first = timed(out);
  if (first >= config.repeat_below_s) return first;
  Solution scratch;
  std::array<double, 3> times{first, timed(scratch), timed(scratch)};
  std::sort(times.begin(), times.end());
  return times[1];
}

}  // namespace

ResultSeries RunIncremental(const ExperimentConfig& config,
                            Algorithm algorithm, std::uint64_t seed) {
  config.Validate();
  PartStream stream = MakePartStream(config, seed);
  std::vector<int> schedule = TrolleySchedule(stream.parts, config.module_set);
  ResultSeries series{algorithm, seed, {}};
  series.points.reserve(stream.parts.size());
  for (std::size_t n = 1; n <= stream.parts.size(); ++n) {
    const Instance instance =
        Instance({stream.parts.begin(), stream.parts.begin() + n},
                 config.module_set)
            .WithTrolleys(schedule[n - 1]);
    Solution solution;
    SeriesPoint point;
    point.parts = static_cast<int>(n);
    point.trolleys = schedule[n - 1];
    point.runtime_s = TimeSolve(config, algorithm, instance, solution);
    point.feasible = CheckFeasible(instance, solution).feasible();
    if (point.feasible) point.wasted_space = TotalWaste(instance, solution);
    series.points.push_back(point);
  }
  return series;
}

std::vector<ResultSeries> RunGridSerial(const ExperimentConfig& config) {
  std::vector<ResultSeries> out;
  for (std::uint64_t seed : config.seeds) {
    for (Algorithm a : config.algorithms) {
      out.push_back(RunIncremental(config, a, seed));
    }
  }
  return out;
}

std::vector<ResultSeries> RunGridParallel(const ExperimentConfig& config,
                                          int threads) {
  config.Validate();
  const std::size_t num_algos = config.algorithms.size();
  const std::ptrdiff_t tasks =
      static_cast<std::ptrdiff_t>(config.seeds.size() * num_algos);
  std::vector<ResultSeries> out(tasks);
  std::vector<std::exception_ptr> errors(tasks);
  const int workers = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
  for (std::ptrdiff_t t = 0; t < tasks; ++t) {
    try {
      out[t] = RunIncremental(config, config.algorithms[t % num_algos],
                              config.seeds[t / num_algos]);
    } catch (...) {
      errors[t] = std::current_exception();
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

int ThreadsFromEnvironment() {
  const char* value = std::getenv("TROLLEYPACK_THREADS");
  if (!value) return 0;
  char* end = nullptr;
  long n = std::strtol(value, &end, 10);
  if (end == value || *end != '\0' || n < 1 || n > 4096) return 0;
  return static_cast<int>(n);
}

std::string WasteFileName(Algorithm algorithm, std::uint64_t seed) {
  return std::string(FileLabel(algorithm)) + "_wasted_space_sum" +
         std::to_string(seed) + ".csv";
}

std::string RuntimeFileName(Algorithm algorithm, std::uint64_t seed) {
  return std::string(FileLabel(algorithm)) + "_run_time" +
         std::to_string(seed) + ".csv";
}

namespace {

std::string FormatRuntime(double seconds) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", seconds);
  return buf;
}

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void WriteSeries(const ResultSeries& series, const std::filesystem::path& dir) {
  std::ostringstream waste;
  std::ostringstream runtime;
  waste << "parts,value\n";
  runtime << "parts,value\n";
  for (const SeriesPoint& p : series.points) {
    if (!p.feasible) continue;
    waste << p.parts << ',' << FormatSquareMillimeters(*p.wasted_space) << '\n';
    runtime << p.parts << ',' << FormatRuntime(p.runtime_s) << '\n';
  }
  WriteFile(dir / WasteFileName(series.algorithm, series.seed), waste.str());
  WriteFile(dir / RuntimeFileName(series.algorithm, series.seed),
            runtime.str());
}

std::vector<SeriesRow> ReadSeriesFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != "parts,value") {
    throw ParseError(path.string() + ": expected header 'parts,value'");
  }
  std::vector<SeriesRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::size_t comma = line.find(',');
    if (comma == std::string::npos) {
      throw ParseError(path.string() + ": malformed row '" + line + "'");
    }
    rows.push_back({std::stoi(line.substr(0, comma)), line.substr(comma + 1)});
  }
  return rows;
}

SquareMicrometers ParseSquareMillimeters(std::string_view text) {
  const bool negative = !text.empty() && text.front() == '-';
  if (negative) text.remove_prefix(1);
  std::size_t dot = text.find('.');
  std::string_view whole = text.substr(0, dot);
  std::string_view frac =
      dot == std::string_view::npos ? std::string_view() : text.substr(dot + 1);
  if (whole.empty() || frac.size() > 6 || whole.size() > 12) {
    throw ParseError("invalid area '" + std::string(text) + "'");
  }
  SquareMicrometers value = 0;
  for (char c : whole) {
    if (c < '0' || c > '9') throw ParseError("invalid area '" + std::string(text) + "'");
    value = value * 10 + (c - '0');
  }
  for (std::size_t i = 0; i < 6; ++i) {
    char c = i < frac.size() ? frac[i] : '0';
    if (c < '0' || c > '9') throw ParseError("invalid area '" + std::string(text) + "'");
    value = value * 10 + (c - '0');
  }
  return negative ? -value : value;
}

namespace {

double Percentile(std::vector<double> values, double q) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  // Nearest rank.
  std::size_t rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(values.size())));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  return values[rank - 1];
}

}  // namespace

nlohmann::json Summarize(std::span<const ResultSeries> series) {
  // Exact reference waste per (seed, n); flow preferred over B&B.
  std::map<std::pair<std::uint64_t, int>, SquareMicrometers> exact;
  for (Algorithm ref : {Algorithm::kExactBnb, Algorithm::kExactFlow}) {
    for (const ResultSeries& s : series) {
      if (s.algorithm != ref) continue;
      for (const SeriesPoint& p : s.points) {
        if (p.feasible) exact[{s.seed, p.parts}] = *p.wasted_space;
      }
    }
  }

  nlohmann::json algorithms = nlohmann::json::object();
  std::vector<Algorithm> order;
  for (const ResultSeries& s : series) {
    if (std::find(order.begin(), order.end(), s.algorithm) == order.end()) {
      order.push_back(s.algorithm);
    }
  }
  for (Algorithm a : order) {
    std::size_t points = 0;
    std::size_t feasible = 0;
    std::size_t gap_points = 0;
    double gap_sum = 0.0;
    std::vector<double> runtimes;
    for (const ResultSeries& s : series) {
      if (s.algorithm != a) continue;
      for (const SeriesPoint& p : s.points) {
        ++points;
        runtimes.push_back(p.runtime_s);
        if (!p.feasible) continue;
        ++feasible;
        auto it = exact.find({s.seed, p.parts});
        if (it != exact.end()) {
          ++gap_points;
          gap_sum += ToSquareMillimeters(*p.wasted_space - it->second);
        }
      }
    }
    nlohmann::json entry;
    entry["points"] = points;
    entry["feasible_points"] = feasible;
    entry["feasibility_rate"] =
        points ? static_cast<double>(feasible) / static_cast<double>(points) : 0.0;
    entry["mean_waste_gap_vs_exact"] =
        gap_points ? nlohmann::json(gap_sum / static_cast<double>(gap_points))
                   : nlohmann::json(nullptr);
    entry["runtime_s"] = {{"p50", Percentile(runtimes, 0.50)},
                          {"p90", Percentile(runtimes, 0.90)},
                          {"p99", Percentile(runtimes, 0.99)},
                          {"max", Percentile(runtimes, 1.0)}};
    algorithms[std::string(CliName(a))] = std::move(entry);
  }
  nlohmann::json summary;
  summary["algorithms"] = std::move(algorithms);
  std::vector<std::uint64_t> seeds;
  for (const ResultSeries& s : series) {
    if (std::find(seeds.begin(), seeds.end(), s.seed) == seeds.end()) {
      seeds.push_back(s.seed);
    }
  }
  summary["seeds"] = seeds;
  return summary;
}

std::string FormatSummaryTable(const nlohmann::json& summary) {
  std::ostringstream out;
  char line[160];
  std::snprintf(line, sizeof line, "%-12s %8s %10s %16s %12s %12s %12s\n",
                "algorithm", "points", "feasible", "gap_vs_exact", "p50_s",
                "p90_s", "p99_s");
  out << line;
  for (const auto& [name, e] : summary.at("algorithms").items()) {
    std::string gap = e.at("mean_waste_gap_vs_exact").is_null()
                          ? "-"
                          : [&] {
                              char b[32];
                              std::snprintf(b, sizeof b, "%.3f",
                                            e.at("mean_waste_gap_vs_exact").get<double>());
                              return std::string(b);
                            }();
    std::snprintf(line, sizeof line,
                  "%-12s %8zu %9.1f%% %16s %12.6f %12.6f %12.6f\n",
                  name.c_str(), e.at("points").get<std::size_t>(),
                  100.0 * e.at("feasibility_rate").get<double>(), gap.c_str(),
                  e.at("runtime_s").at("p50").get<double>(),
                  e.at("runtime_s").at("p90").get<double>(),
                  e.at("runtime_s").at("p99").get<double>());
    out << line;
  }
  return out.str();
}

}  // namespace trolleypack
